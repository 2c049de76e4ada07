"""Frozen conventions shared across modules.

Every sign rule, tolerance, and normalization that some computation fixed
once and later code must agree with lives here. Values are recorded, not
recomputed: tests assert the consequences (differentials square to zero,
evaluator output matches the series oracle) rather than re-deriving them.
"""

# --- total complex of the face double complex -------------------------------
# On the column indexed by p intersected faces, the total differential is
#   d = (Cech face-map part) + delta_column_sign(p) * (topological boundary).
# Tests assert d * d = 0 for every built complex under this rule.
TOTAL_SIGN_RULE = "cech-plus-signed-boundary"


def delta_column_sign(p):
    """Sign carried by the topological boundary on column p."""
    return -1 if p % 2 else 1


# --- comparison (full-chain) double complex ---------------------------------
# How the face maps, canonically defined only on admissible chains, are
# extended to every chain of the comparison complex:
#   "projected": precompose with the chain projection onto the admissible
#                subcomplex (guarantees squares commute on the nose);
#   "direct":    apply the cap-product formula verbatim to every chain.
# The shipped value was fixed by measuring which rule satisfies d * d = 0
# on the desk models.
COMPARISON_FACE_RULE = "projected"

# --- sign exponents for the cubical and evaluator assembly (all mod 2) ------


def product_sign_exponent(x, y):
    """Exponent for moving a left factor of degree x past degree y."""
    return (x * (x + 1)) // 2 + x * y


def product_sign_exponent_right(x, y):
    """Exponent for moving a right factor of degree y past degree x."""
    return x * y + (y * (y + 1)) // 2


def ladder_sign_exponent(j, a):
    """Exponent attached to the j-th rung of a bounding-chain ladder."""
    return (j * (j + 1)) // 2 + a


def term_sign_exponent(c, i, p):
    """Exponent of the (c, i) term in the weight-p evaluator sum."""
    return 1 + i * (c + 1 + p) + (c * (c - 1)) // 2


# --- evaluator normalization -------------------------------------------------
# Orientation sign of the iterated-integral term of index i at weight k,
# fixed once by requiring the weight-2 full evaluation to equal
# +Li_2(a)/(2 pi i)^2 and then applied unchanged at every weight.  The
# frozen chain orientations integrate to +Li_2(a)/(2 pi i)^2 on the
# nose, and the term carries an odd bookkeeping exponent, so the global
# sign is -1 (measured once, then pinned).
EVALUATOR_TERM_SIGN = -1

# --- numerics ----------------------------------------------------------------
DEFAULT_TOL = 1e-6
DEFAULT_QUAD_BUDGET = 200000
DEFAULT_SAMPLES = 100
SAMPLE_SEED = 20260817

# Quadrature: Gauss-Legendre base order and per-level order increment; cells
# of dimension >= QUAD_HIGHDIM_THRESHOLD use the cheaper pair so that two
# refinement levels stay inside the default budget.
QUAD_BASE_ORDER = 10
QUAD_ORDER_STEP = 4
QUAD_BASE_ORDER_HIGHDIM = 6
QUAD_ORDER_STEP_HIGHDIM = 2
QUAD_HIGHDIM_THRESHOLD = 4
QUAD_MAX_LEVEL = 24

# Divergence probe: number of refinement rounds inspected, and how many
# consecutive strictly-growing partial sums count as divergence.
PROBE_ROUNDS = 8
PROBE_GROWTH_ROUNDS = 4
