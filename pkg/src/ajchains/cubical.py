"""Cube symmetries, the alternating projector, and the cubical complex.

The hyperoctahedral group (coordinatewise inversions joined with axis
permutations) acts on the product models by simplicial automorphisms:
inversion swaps the 0/∞ tags of an axis and fixes the degenerate point,
and the rank function is constant on tag pairs, so every group element
preserves the staircase product triangulation.  Averaging against the
sign character gives the alternating projector; admissible alternating
chains under the cubical differential (the signed sum of the coordinate
face maps) form a cochain complex whose cohomology the module computes,
together with the signed comparison map from the face double complex.
"""

import itertools
import math
from fractions import Fraction

from . import config
from .admissible import (
    admissible_chain_basis,
    configuration_of,
    is_delta_admissible,
    thom_face_cache,
)
from .errors import (
    AxisMismatch,
    NotAdmissible,
    NotChainMap,
    NotGoodTriangulation,
)
from .homology import betti_numbers, check_differential, kernel_basis
from .models import get_point_model, p1_model, p1_squared_model

# inversion of one projective-line factor: swap the 0/∞ tags, fix the
# degenerate point and its antipode, rotate the remaining pair
_P1_INVERSION = {0: 1, 1: 0, 2: 2, 3: 3, 4: 5, 5: 4}


class CubeSymmetry:
    """One symmetry of the n-cube: per-axis inversions and an axis
    permutation.

    epsilons is a tuple of +-1; perm maps axis i (1-based) to
    perm[i - 1].  Acting on coordinates, the image's axis i carries the
    (possibly inverted) coordinate of the axis sent to i.
    """

    def __init__(self, epsilons, perm):
        self.epsilons = tuple(epsilons)
        self.perm = tuple(perm)
        self.n = len(self.epsilons)
        if sorted(self.perm) != list(range(1, self.n + 1)):
            raise AxisMismatch("perm must permute 1..n")

    @property
    def sign(self):
        sgn = 1
        for e in self.epsilons:
            sgn *= e
        seen = list(self.perm)
        for i in range(len(seen)):
            for j in range(i + 1, len(seen)):
                if seen[i] > seen[j]:
                    sgn = -sgn
        return sgn

    def compose(self, other):
        """The symmetry acting as self after other."""
        if self.n != other.n:
            raise AxisMismatch("compose needs equal axis counts")
        perm = tuple(self.perm[other.perm[i] - 1] for i in range(self.n))
        inv_self = [0] * self.n
        for i in range(self.n):
            inv_self[self.perm[i] - 1] = i + 1
        eps = tuple(self.epsilons[i] *
                    other.epsilons[inv_self[i] - 1] for i in range(self.n))
        return CubeSymmetry(eps, perm)

    def __eq__(self, other):
        return isinstance(other, CubeSymmetry) and \
            self.epsilons == other.epsilons and self.perm == other.perm

    def __hash__(self):
        return hash((self.epsilons, self.perm))

    def __repr__(self):
        return "CubeSymmetry(%r, %r)" % (self.epsilons, self.perm)


def identity_symmetry(n):
    return CubeSymmetry((1,) * n, tuple(range(1, n + 1)))


def axis_inversion(n, axis):
    eps = tuple(-1 if i == axis else 1 for i in range(1, n + 1))
    return CubeSymmetry(eps, tuple(range(1, n + 1)))


def enumerate_group(n):
    """All symmetries of the n-cube (2^n · n! of them)."""
    out = []
    for perm in itertools.permutations(range(1, n + 1)):
        for eps in itertools.product((1, -1), repeat=n):
            out.append(CubeSymmetry(eps, perm))
    return out


class FaceIndex:
    """A coordinate face (axis, tag) with its linear position.

    Positions alternate with axis parity — 0, ∞ for odd axes and ∞, 0
    for even ones — matching the face ordering of the models; beyond
    axis 4 the same period-four pattern is extrapolated.
    """

    def __init__(self, axis, value):
        if value not in ("0", "inf"):
            raise AxisMismatch("face tag must be '0' or 'inf'")
        self.axis = axis
        self.value = value

    @property
    def position(self):
        from .models import face_position
        return face_position(self.axis, self.value)

    def __repr__(self):
        return "FaceIndex(%d, %r)" % (self.axis, self.value)


class SignConvention:
    """The four sign exponents used by the duality and evaluator
    formulas, centralized; each matters modulo two only."""

    @staticmethod
    def epsilon_1(x, y):
        return config.product_sign_exponent(x, y)

    @staticmethod
    def epsilon_2(x, y):
        return config.product_sign_exponent_right(x, y)

    @staticmethod
    def epsilon_3(j, a):
        return config.ladder_sign_exponent(j, a)

    @staticmethod
    def epsilon(c, i, p):
        return config.term_sign_exponent(c, i, p)


# ---------------------------------------------------------------------------
# the action on chains
# ---------------------------------------------------------------------------


def _vertex_image(g, model, v):
    if model.axes == 0:
        return v
    if model.axes == 1:
        return _P1_INVERSION[v] if g.epsilons[0] < 0 else v
    coords = list(v)
    out = [None] * len(coords)
    inv_perm = [0] * g.n
    for i in range(g.n):
        inv_perm[g.perm[i] - 1] = i
    for i in range(g.n):
        c = coords[inv_perm[i]]
        if g.epsilons[i] < 0:
            c = _P1_INVERSION[c]
        out[i] = c
    return tuple(out)


def act(g, gamma, model=None):
    """The symmetry applied to a chain.

    Parametrized chains carry their own coordinates and implement
    apply_symmetry; simplicial chains need their model passed alongside.
    """
    if hasattr(gamma, "apply_symmetry"):
        return gamma.apply_symmetry(g)
    if model is None:
        raise AxisMismatch("acting on a bare chain requires its model")
    if g.n != model.axes:
        raise AxisMismatch(
            "symmetry of %d axes cannot act on %s" % (g.n, model.name))
    K = model.complex
    out = {}
    for s, c in gamma.items():
        canon, sgn = K.canon([_vertex_image(g, model, v) for v in s])
        acc = out.get(canon, 0) + sgn * c
        if acc:
            out[canon] = acc
        elif canon in out:
            del out[canon]
    return out


def alt_project(gamma, model=None):
    """Average of the signed symmetry action: the alternating part."""
    if hasattr(gamma, "apply_alternation"):
        return gamma.apply_alternation()
    if model is None:
        raise AxisMismatch("projecting a bare chain requires its model")
    group = enumerate_group(model.axes)
    scale = Fraction(1, len(group))
    out = {}
    for g in group:
        term = act(g, gamma, model)
        for s, c in term.items():
            acc = out.get(s, 0) + g.sign * scale * c
            if acc:
                out[s] = acc
            elif s in out:
                del out[s]
    return out


# ---------------------------------------------------------------------------
# the cubical differential
# ---------------------------------------------------------------------------


def cubical_boundary(gamma, model):
    """Signed sum of the coordinate face maps of a boundary-admissible
    chain: axis j contributes (-1)^(j-1) times (0-face minus ∞-face)."""
    cfg = configuration_of(model)
    if not is_delta_admissible(gamma, cfg):
        raise NotAdmissible(
            "cubical differential needs a boundary-admissible chain")
    gamma = cfg.reduce(gamma)
    if not gamma or model.axes == 0:
        return {}
    by_degree = {}
    for s, c in gamma.items():
        by_degree.setdefault(len(s) - 1, {})[s] = c
    out = {}
    for axis in range(1, model.axes + 1):
        axis_sign = -1 if (axis - 1) % 2 else 1
        for value, face_sign in (("0", 1), ("inf", -1)):
            face = model.face(axis, value)
            cache = thom_face_cache(model, face)
            for degree, part in by_degree.items():
                if degree < 2:
                    continue
                img = cache.apply_via_matrix(part, degree)
                img = {s: c for s, c in img.items()
                       if s not in face.submodel.D}
                for s, c in img.items():
                    acc = out.get(s, 0) + axis_sign * face_sign * c
                    if acc:
                        out[s] = acc
                    elif s in out:
                        del out[s]
    return out


# ---------------------------------------------------------------------------
# alternating admissible bases
# ---------------------------------------------------------------------------


class AlternatingBasis:
    """Basis of the alternating part of one admissible chain group."""

    def __init__(self, model, degree):
        self.model = model
        self.degree = degree
        cfg = configuration_of(model)
        self.ac = admissible_chain_basis(cfg, degree)
        dim = len(self.ac)
        group = enumerate_group(model.axes)
        scale = Fraction(1, len(group))
        rows = [dict() for _ in range(dim)]   # I - Alt in AC coordinates
        for j in range(dim):
            chain = self.ac.chain(j)
            acc = {}
            for g in group:
                term = act(g, chain, model)
                for s, c in term.items():
                    v = acc.get(s, 0) + g.sign * scale * c
                    if v:
                        acc[s] = v
                    elif s in acc:
                        del acc[s]
            coords = self.ac.coordinates(acc)
            rows[j][j] = Fraction(1)
            for i, v in coords.items():
                nv = rows[i].get(j, 0) - v
                if nv:
                    rows[i][j] = nv
                elif j in rows[i]:
                    del rows[i][j]
        self.kernel = kernel_basis(rows, dim)

    def __len__(self):
        return len(self.kernel)

    def chain(self, j):
        out = {}
        for c, v in self.kernel.vectors[j].items():
            for s, w in self.ac.chain(c).items():
                acc = out.get(s, 0) + v * w
                if acc:
                    out[s] = acc
                elif s in out:
                    del out[s]
        return out

    def chains(self):
        return [self.chain(j) for j in range(len(self))]

    def coordinates(self, chain):
        """Sparse coordinates; raises NotChainMap outside the subspace."""
        try:
            vec = self.ac.coordinates(chain)
        except NotAdmissible:
            raise NotChainMap(
                "chain leaves the admissible subgroup")
        try:
            coords = self.kernel.coordinates(vec)
        except ValueError:
            raise NotChainMap(
                "chain leaves the alternating subspace")
        return {j: v for j, v in enumerate(coords) if v}


_ALT_CACHE = {}


def alternating_chain_basis(model, degree):
    key = (model.name, degree)
    if key not in _ALT_CACHE:
        _ALT_CACHE[key] = AlternatingBasis(model, degree)
    return _ALT_CACHE[key]


# ---------------------------------------------------------------------------
# the cubical complex and the comparison map
# ---------------------------------------------------------------------------


def _cube_model(y_model, k):
    """The model of Y times the k-th power of the projective line."""
    if y_model.name != "point":
        raise NotGoodTriangulation(
            "no good product triangulations are available over %s"
            % y_model.name)
    if k == 0:
        return get_point_model()
    if k == 1:
        return p1_model()
    if k == 2:
        return p1_squared_model()
    raise NotGoodTriangulation(
        "no good product triangulation of %d cube factors" % k)


class CubicalComplex:
    """Total complex of the alternating cubical double complex.

    Column a holds the alternating admissible chains of Y times n - a
    projective-line factors; the first differential is the cubical one,
    the second the topological boundary with the alternating column
    sign.  Cohomological degree is a + b.
    """

    def __init__(self, y_model, n):
        self.y_model = y_model
        self.n = n
        self.m = y_model.axes
        self.models = {a: _cube_model(y_model, n - a) for a in range(n + 1)}
        self.basis = {}
        self.dims = {}
        self.gens = {}
        self.offsets = {}
        top = {a: 2 * (self.m + self.n - a) for a in range(n + 1)}
        jmax = 0
        for a in range(n + 1):
            jmax = max(jmax, a + top[a])
        for j in range(jmax + 1):
            gens = []
            for a in range(n + 1):
                b = j - a
                r = 2 * (self.m + self.n - a) - b
                if b < 0 or r < 0 or r > top[a]:
                    continue
                basis = alternating_chain_basis(self.models[a], r)
                self.basis[(a, b)] = basis
                self.offsets[(a, b)] = len(gens)
                gens.extend((a, b, i) for i in range(len(basis)))
            self.dims[j] = len(gens)
            self.gens[j] = gens
        self.diff = {}
        for j in range(jmax):
            self.diff[-j] = self._assemble(j)
        self.chain_dims = {-j: d for j, d in self.dims.items()}

    def _assemble(self, j):
        rows = [dict() for _ in range(self.dims.get(j + 1, 0))]
        for col, (a, b, i) in enumerate(self.gens[j]):
            model = self.models[a]
            cfg = configuration_of(model)
            chain = self.basis[(a, b)].chain(i)
            r = 2 * (self.m + self.n - a) - b
            img = cfg.reduce(model.complex.boundary(chain))
            if img:
                self._add(rows, (a, b + 1), img,
                          config.delta_column_sign(a), col)
            if r >= 2 and a < self.n:
                img = cubical_boundary(chain, model)
                if img:
                    self._add(rows, (a + 1, b), img, 1, col)
        return rows

    def _add(self, rows, tkey, img, sgn, col):
        if tkey not in self.offsets:
            raise NotChainMap(
                "differential image lands outside the complex at %r" %
                (tkey,))
        base = self.offsets[tkey]
        coords = self.basis[tkey].coordinates(img)
        for i, v in coords.items():
            cur = rows[base + i].get(col, 0) + sgn * v
            if cur:
                rows[base + i][col] = cur
            elif col in rows[base + i]:
                del rows[base + i][col]

    def cohomology_ranks(self):
        ranks = betti_numbers(self.chain_dims, self.diff)
        return {j: ranks[-j] for j in self.dims}

    def is_complex(self):
        return check_differential(self.chain_dims, self.diff)


def build_cubical_ac_complex(y_model, n):
    """The alternating cubical complex of n cube factors over Y."""
    return CubicalComplex(y_model, n)


def sigma_sign(positions):
    """Sign of the comparison map on the component at a face subset."""
    return -1 if sum(positions) % 2 else 1


def sigma_component(positions, chain, model):
    """One component of the comparison map: the signed chain followed by
    the alternating projector on its model."""
    scaled = {s: sigma_sign(positions) * c for s, c in chain.items()}
    return alt_project(scaled, model)


def sigma_map(components, n, y_model=None):
    """The signed alternating comparison map on one element of the face
    double complex.

    components maps face subsets (tuples of face positions) to chains on
    the corresponding intersection model; the result maps cubical slots
    (column, row) to alternating chains.
    """
    if y_model is None:
        y_model = get_point_model()
    out = {}
    for key, chain in components.items():
        key = tuple(sorted(key))
        a = len(key)
        model = _cube_model(y_model, n - a)
        img = sigma_component(key, chain, model)
        for s, c in img.items():
            b = 2 * (y_model.axes + n - a) - (len(s) - 1)
            slot = out.setdefault((a, b), {})
            acc = slot.get(s, 0) + c
            if acc:
                slot[s] = acc
            elif s in slot:
                del slot[s]
    return {k: v for k, v in out.items() if v}


def sigma_rows(face_dc, cubical):
    """Chain-convention matrices of the comparison map from the face
    double complex to the cubical complex."""
    out = {}
    for j, gens in face_dc.gens.items():
        rows = [dict() for _ in range(cubical.dims.get(j, 0))]
        for col, (key, r, idx) in enumerate(gens):
            a = len(key)
            b = 2 * (cubical.m + cubical.n - a) - r
            tkey = (a, b)
            if tkey not in cubical.offsets:
                raise NotChainMap(
                    "face component (%r, %d) has no cubical slot" % (key, r))
            chain = face_dc.basis[(key, r)].chain(idx)
            node_model = face_dc.nodes[key].model
            img = sigma_component(key, chain, node_model)
            if not img:
                continue
            coords = cubical.basis[tkey].coordinates(img)
            base = cubical.offsets[tkey]
            for i, v in coords.items():
                rows[base + i][col] = v
        out[-j] = rows
    return out


def sigma_quasi_iso_report(n):
    """Build the face double complex of n projective-line factors and
    the cubical complex of n cube factors over the point, then check
    that the signed alternating comparison map is a chain map with an
    exact mapping cone (so it is invertible on cohomology)."""
    from .admissible import build_ac_double_complex, is_chain_map
    from .homology import complex_is_exact, mapping_cone

    point = get_point_model()
    face_dc = build_ac_double_complex(configuration_of(_cube_model(point, n)))
    cubical = build_cubical_ac_complex(point, n)
    f = sigma_rows(face_dc, cubical)
    report = {
        "n": n,
        "face_dims": dict(face_dc.dims),
        "cubical_dims": dict(cubical.dims),
        "cubical_square_zero": check_differential(
            cubical.chain_dims, cubical.diff),
        "chain_map": is_chain_map(face_dc, cubical, f),
        "face_ranks": {j: betti_numbers(
            face_dc.chain_dims, face_dc.diff)[-j] for j in face_dc.dims},
        "cubical_ranks": cubical.cohomology_ranks(),
    }
    dims, diff = mapping_cone(
        face_dc.chain_dims, face_dc.diff,
        cubical.chain_dims, cubical.diff, f)
    report["cone_exact"] = complex_is_exact(dims, diff)
    report["quasi_isomorphism"] = (
        report["cubical_square_zero"] and report["chain_map"]
        and report["cone_exact"])
    return report
