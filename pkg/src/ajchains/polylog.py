"""Polylogarithm cycle families and their numerically verified evaluator.

The weight-p family consists, for each k = p - c, of a sphere-parametrized
cycle (the graph of the iterated-quotient coordinates) and of bounding
chains indexed by 0 <= i <= k-1 that trade one real simplex direction for
one free sphere coordinate at a time.  Boundary relations tie the family
together; they are verified by sampling boundary points and matching them
- membership and local orientation sign, in both directions - against the
other side, modulo the alternation symmetry and modulo pieces that land
in the degenerate locus (a cube coordinate equal to 1) or cancel under
the alternation.  The evaluator integrates the i = 0 chains against
logarithmic volume forms and compares with a certified series oracle; the
i > 0 integrands repeat differentials and are detected as exact zeros.

Orientation conventions are frozen once: the simplex parameters are
ordered from the outermost inequality inward, each cell's sign follows
the recursion in eta_sign, and the evaluator's overall sign is pinned in
config so the weight-2 value is +Li_2(a)/(2*pi*i)^2.
"""

import math

import numpy
import sympy

from . import analytic, config
from .analytic import LogForm, ParamCell, ParamChain
from .cubical import CubeSymmetry, enumerate_group
from .errors import (BadIndex, BadParameter, LadderBroken, NotConverged,
                     OutOfRadius)

_T = {}
_UV = {}


def _t(j):
    if j not in _T:
        _T[j] = sympy.Symbol("t%d" % j, real=True)
    return _T[j]


def _uv(m):
    if m not in _UV:
        _UV[m] = (sympy.Symbol("xu%d" % m, real=True),
                  sympy.Symbol("xv%d" % m, real=True))
    return _UV[m]


def _sphere_expr(m):
    u, v = _uv(m)
    return (sympy.tan(sympy.pi * (u - sympy.Rational(1, 2)))
            + sympy.I * sympy.tan(sympy.pi * (v - sympy.Rational(1, 2))))


def divisor_position(j, u):
    """Position of the divisor (slot j, value u) in the frozen ordering.

    Positions count from zero and alternate in the period-four pattern:
    (1,a) < (1,1/a) < (2,1/a) < (2,a) < (3,a) < (3,1/a) < (4,1/a) < ...
    """
    if u not in ("a", "1/a"):
        raise BadIndex("divisor value must be 'a' or '1/a', got %r" % (u,))
    if j < 1:
        raise BadIndex("divisor slot must be positive, got %r" % (j,))
    first_is_a = (j % 2 == 1)
    return 2 * (j - 1) + (0 if (u == "a") == first_is_a else 1)


def divisor_from_position(pos, p):
    """Inverse of divisor_position on the divisor set of the weight-p
    base; raises BadIndex outside the valid range."""
    if not 0 <= pos < 2 * (p - 1):
        raise BadIndex("divisor position %r outside 0..%d"
                       % (pos, 2 * (p - 1) - 1))
    j = pos // 2 + 1
    first_is_a = (j % 2 == 1)
    if pos % 2 == 0:
        return (j, "a" if first_is_a else "1/a")
    return (j, "1/a" if first_is_a else "a")


def _check_weight_value(p, a):
    if int(p) < 1:
        raise BadParameter("weight must be at least 1, got %r" % (p,))
    a = complex(a)
    if a in (0.0 + 0.0j, 1.0 + 0.0j):
        raise BadParameter("parameter value %r is excluded" % (a,))
    return a


def _a_expr(a):
    a = complex(a)
    if a.imag == 0.0:
        return sympy.nsimplify(a.real, rational=True)
    return (sympy.nsimplify(a.real, rational=True)
            + sympy.I * sympy.nsimplify(a.imag, rational=True))


def rho_cell(p, c, a):
    """Canonical representative cell of the weight-(p-c) cycle: free
    sphere coordinates x_1..x_{k-1} and cube coordinates
    (1 - x_1, 1 - x_2/x_1, ..., 1 - x_{k-1}/x_{k-2}, 1 - a/x_{k-1})."""
    k = p - c
    av = _a_expr(a)
    params, bounds, closed, xs = [], [], [], []
    for m in range(1, k):
        u, v = _uv(m)
        params += [u, v]
        bounds += [(0, 1), (0, 1)]
        closed += [len(params) - 2, len(params) - 1]
        xs.append(_sphere_expr(m))
    cube = []
    prev = sympy.Integer(1)
    for m in range(1, k):
        cube.append(1 - xs[m - 1] / prev)
        prev = xs[m - 1]
    cube.append(1 - av / prev)
    cell = ParamCell("rho[k=%d]" % k, params, bounds,
                     tuple(xs) + tuple(cube), closed=closed)
    cell.family = ("rho", k)
    return cell


def rho_cycle(p, c, a):
    """The weight-(p-c) cycle as a chain: the canonical cell with the
    frozen global sign, carried with the alternation tag."""
    a = _check_weight_value(p, a)
    if not 0 <= c <= p - 1:
        raise BadParameter("level %r outside 0..%d" % (c, p - 1))
    sign = -1 if (p - (p - c)) % 2 else 1
    return ParamChain(2 * (p - c) - 1, [(rho_cell(p, c, a), sign)],
                      alternating=True)


def eta_sign(p, k, i):
    """Frozen orientation sign of the (k, i) bounding chain at weight p.

    Fixed once during family construction: the base case i = k-1 is
    pinned by the cycle normalization (the top simplex facet is
    literally the cycle cell), the downward steps in i follow the
    frozen cube-face orientation rule, and the resulting evaluator
    terms carry one uniform global sign at every weight.
    """
    exp = (p - k) + (k + 1) * (k * (k - 1) // 2 - i * (i + 1) // 2)
    return -1 if exp % 2 else 1


def eta_cell(p, c, i, a):
    """Canonical cell of the (k = p - c, i) bounding chain.

    Free sphere coordinates x_1..x_i, nested simplex parameters
    0 <= t_i <= ... <= t_{k-1} <= a, base coordinates
    (x_1, ..., x_i, t_{i+1}, ..., t_{k-1}) and cube coordinates
    (1 - x_1, 1 - x_2/x_1, ..., 1 - x_i/x_{i-1}, 1 - t_i/x_i), with x_0
    read as 1 so the i = 0 cell carries the single cube coordinate
    1 - t_0.
    """
    k = p - c
    av = _a_expr(a)
    params, bounds, closed, xs = [], [], [], []
    for j in range(k - 1, i - 1, -1):
        params.append(_t(j))
        bounds.append((0, av if j == k - 1 else _t(j + 1)))
    for m in range(1, i + 1):
        u, v = _uv(m)
        params += [u, v]
        bounds += [(0, 1), (0, 1)]
        closed += [len(params) - 2, len(params) - 1]
        xs.append(_sphere_expr(m))
    ys = tuple(xs) + tuple(_t(j) for j in range(i + 1, k))
    cube = []
    prev = sympy.Integer(1)
    for m in range(1, i + 1):
        cube.append(1 - xs[m - 1] / prev)
        prev = xs[m - 1]
    cube.append(1 - _t(i) / prev)
    cell = ParamCell("eta[k=%d,i=%d]" % (k, i), params, bounds,
                     ys + tuple(cube), closed=closed)
    cell.family = ("eta", k, i)
    return cell


def eta_chain(p, c, i, a):
    a = _check_weight_value(p, a)
    if not 0 <= c <= p - 1:
        raise BadIndex("level %r outside 0..%d" % (c, p - 1))
    k = p - c
    if not 0 <= i <= k - 1:
        raise BadIndex("bounding-chain index %r outside 0..%d"
                       % (i, k - 1))
    return ParamChain(k + i, [(eta_cell(p, c, i, a), eta_sign(p, k, i))],
                      alternating=True)


# --- series oracle -----------------------------------------------------------


def li_oracle(k, a, tol=1e-12):
    """Partial sum of the order-k polylogarithm series with a certified
    tail bound below tol; defined inside the open unit disk only."""
    a = complex(a)
    r = abs(a)
    if r >= 1.0:
        raise OutOfRadius("series oracle needs |a| < 1, got |a| = %s" % r)
    total = 0.0 + 0.0j
    term = 1.0 + 0.0j
    n = 0
    while True:
        n += 1
        term *= a
        total += term / n ** k
        tail = r ** (n + 1) / ((n + 1) ** k * (1.0 - r))
        if tail < tol:
            return total


# --- evaluator ---------------------------------------------------------------


def _volume_form(k, i):
    """Log volume form on the (k, i) ambient: d-log factors on every
    base axis then every cube axis, with the matching 2*pi*i powers."""
    n = (k - 1) + (i + 1)
    return LogForm(n, tuple(range(1, n + 1)), twopii_power=-(k + i))


def aj_evaluate(p, J, a, tol=None, budget=None):
    """Evaluate the weight-p family on the divisor intersection selected
    by J against the log volume form, and compare with the series
    oracle divided by (2*pi*i)^(p - #J).

    Only the i = 0 term can be nonzero - the i > 0 integrands repeat
    differentials - and each i > 0 term is required to vanish within
    tolerance.  Returns the report dict; raises NotConverged when a
    quadrature fails, BadIndex/BadParameter on bad input.
    """
    tol = config.DEFAULT_TOL if tol is None else tol
    a = _check_weight_value(p, a)
    J = sorted(set(int(j) for j in J))
    for pos in J:
        divisor_from_position(pos, p)
    c = len(J)
    k = p - c
    if k < 1:
        raise BadIndex("divisor set selects %d conditions, weight %d "
                       "allows at most %d" % (c, p, p - 1))
    terms = []
    total = 0.0 + 0.0j
    for i in range(k):
        chain = eta_chain(p, c, i, a)
        res = analytic.integrate(chain, _volume_form(k, i), tol=tol,
                                 budget=budget)
        if not res["converged"]:
            raise NotConverged("term i=%d did not converge within budget"
                               % i)
        exponent = config.term_sign_exponent(c, i, p)
        sign = config.EVALUATOR_TERM_SIGN * (-1 if exponent % 2 else 1)
        value = sign * res["value"]
        if i > 0 and abs(value) > tol:
            raise NotConverged(
                "term i=%d should vanish identically but integrated "
                "to %r" % (i, value))
        terms.append({"i": i, "value": [value.real + 0.0,
                                        value.imag + 0.0]})
        total += value
    oracle = li_oracle(k, a, tol=1e-14) / analytic.TWO_PI_I ** k
    rel_err = (abs(total - oracle) / abs(oracle) if oracle != 0
               else abs(total))
    return {"p": int(p), "J": [int(j) for j in J], "a": [a.real, a.imag],
            "terms": terms,
            "total": [total.real + 0.0, total.imag + 0.0],
            "oracle": [oracle.real + 0.0, oracle.imag + 0.0],
            "rel_err": float(rel_err), "pass": bool(rel_err < tol)}


def _wedge_cube_logs(phi, cube_count):
    """phi on the base wedged with the cube log volume form, on base +
    cube axes; moving the cube logs past phi's smooth block costs the
    usual sign."""
    smooth_deg = phi.degree - len(phi.log_axes)
    sign = -1 if (smooth_deg * cube_count) % 2 else 1
    axes = phi.log_axes + tuple(range(phi.n + 1, phi.n + cube_count + 1))
    return LogForm(phi.n + cube_count, axes, phi.smooth,
                   sign * phi.prefactor, phi.twopii_power - cube_count,
                   phi.degree + cube_count)


def psi_evaluate(ladder, phi, tol=None, budget=None):
    """Pair a bounding-chain ladder against a closed base form.

    ladder[l] is the rung with l cube factors; consecutive rungs must
    satisfy the ladder relation (cube-face boundary of the next rung
    equals the topological boundary of the current one), which the
    caller attests and which forces each rung's dimension to exceed the
    previous one's by one.  Ambient and dimension conformance are
    checked here; LadderBroken is raised on violation.  The value is the
    signed sum of the rung integrals against the base form wedged with
    the cube log volume forms.
    """
    tol = config.DEFAULT_TOL if tol is None else tol
    n = len(ladder) - 1
    if n < 0:
        raise LadderBroken("empty ladder")
    dims = {}
    for l, rung in enumerate(ladder):
        if rung.is_zero():
            continue
        if rung.n != phi.n + l:
            raise LadderBroken("rung %d lives on %d axes, expected "
                               "base+%d = %d" % (l, rung.n, l, phi.n + l))
        ds = rung.dimensions()
        if len(ds) != 1:
            raise LadderBroken("rung %d mixes dimensions %s" % (l, ds))
        dims[l] = ds[0]
    for l in sorted(dims):
        if l + 1 in dims and dims[l + 1] != dims[l] + 1:
            raise LadderBroken(
                "rung %d has dimension %d, rung %d has %d; the ladder "
                "relation needs a step of one"
                % (l, dims[l], l + 1, dims[l + 1]))
    terms = []
    total = 0.0 + 0.0j
    evals = 0
    for j in range(n + 1):
        l = n - j
        rung = ladder[l]
        if rung.is_zero():
            terms.append({"j": j, "value": [0.0, 0.0]})
            continue
        res = analytic.integrate(rung, _wedge_cube_logs(phi, l), tol=tol,
                                 budget=budget)
        if not res["converged"]:
            raise NotConverged("ladder term j=%d did not converge" % j)
        exponent = (config.ladder_sign_exponent(dims[l], n - l)
                    + (j * (j - 1)) // 2)
        sign = -1 if exponent % 2 else 1
        value = sign * res["value"]
        terms.append({"j": j, "value": [value.real, value.imag]})
        total += value
        evals += res["evals"]
    return {"total": total, "terms": terms, "evals": evals}


def polylog_ladder(p, a):
    """The built-in weight-p ladder: rung l > 0 carries the (k = p,
    i = l - 1) bounding chain, rung 0 is zero, and the rung signs follow
    the recursion the ladder relation forces, normalized so the pairing
    against the base log volume form reproduces the evaluator."""
    a = _check_weight_value(p, a)
    ladder = [ParamChain.zero(p - 1)]
    mu = -1 if p % 2 else 1
    for l in range(1, p + 1):
        ladder.append(eta_chain(p, 0, l - 1, a).scaled(mu))
        mu *= -1 if (p + l) % 2 else 1
    phi = LogForm(p - 1, tuple(range(1, p)), twopii_power=-(p - 1))
    return ladder, phi


# --- sampled boundary-relation checks ----------------------------------------


def _read_eta_point(k, i, a, q, tol=1e-7):
    """Recover the (x, t) data of a point on the (k, i) chain support,
    or None; membership includes the simplex inequalities."""
    a = complex(a)
    y = q[:k - 1]
    cube = q[k - 1:]
    xs = [complex(v) for v in y[:i]]
    ts = {}
    for idx, j in enumerate(range(i + 1, k)):
        val = complex(y[i + idx])
        if abs(val.imag) > tol:
            return None
        ts[j] = val.real
    prev = 1.0 + 0.0j
    for m in range(1, i + 1):
        if prev == 0 or abs(cube[m - 1] - (1 - xs[m - 1] / prev)) > tol:
            return None
        prev = xs[m - 1]
    if prev == 0:
        return None
    t_i = (1 - complex(cube[i])) * prev
    if abs(t_i.imag) > tol:
        return None
    ts[i] = t_i.real
    seq = [ts[j] for j in range(i, k)]
    if any(s < -tol for s in seq):
        return None
    for m in range(len(seq) - 1):
        if seq[m] > seq[m + 1] + tol:
            return None
    if seq[-1] > a.real + tol:
        return None
    return {"x": xs, "t": ts}


def _read_rho_point(k, a, q, tol=1e-7):
    """Recover the sphere coordinates of a point on the weight-k cycle
    support, or None."""
    a = complex(a)
    y = q[:k - 1]
    cube = q[k - 1:]
    xs = [complex(v) for v in y]
    prev = 1.0 + 0.0j
    for m in range(1, k):
        if prev == 0 or abs(cube[m - 1] - (1 - xs[m - 1] / prev)) > tol:
            return None
        prev = xs[m - 1]
    if prev == 0 or abs(cube[k - 1] - (1 - a / prev)) > tol:
        return None
    return {"x": xs}


def _sphere_param(x):
    return (math.atan(x.real) / math.pi + 0.5,
            math.atan(x.imag) / math.pi + 0.5)


def _eta_box_point(k, i, a, reading, skip=None):
    """Box coordinates of a reading in the canonical (k, i) cell, the
    t-parameter `skip` removed for facet cells."""
    a = complex(a)
    ts = reading["t"]
    out = []
    for j in range(k - 1, i - 1, -1):
        if j == skip:
            continue
        hi = a.real if j == k - 1 else ts[j + 1]
        if hi <= 0:
            return None
        out.append(min(max(ts[j] / hi, 0.0), 1.0))
    for x in reading["x"]:
        out += list(_sphere_param(x))
    return numpy.array(out)


def _rho_box_point(reading):
    out = []
    for x in reading["x"]:
        out += list(_sphere_param(x))
    return numpy.array(out)


def cell_jacobian(cell, s_point):
    """Complex Jacobian d(coords)/d(box params) at one box point."""
    if not hasattr(cell, "_jac_fns"):
        svars, _, box_coords = cell.box_data()
        cell._jac_fns = [
            [sympy.lambdify(svars, sympy.diff(expr, s), "numpy")
             for s in svars]
            for expr in box_coords]
    jac = numpy.zeros((cell.n, cell.dimension), dtype=complex)
    args = [float(v) for v in s_point]
    for r, row in enumerate(cell._jac_fns):
        for cidx, fn in enumerate(row):
            jac[r, cidx] = complex(fn(*args))
    return jac


def _orientation_between(jac_target, jac_source):
    """+1/-1 when the two frames span the same space with equal or
    opposite orientation, 0 when they do not span the same space."""
    a_t = numpy.vstack([jac_target.real, jac_target.imag])
    a_s = numpy.vstack([jac_source.real, jac_source.imag])
    if a_t.shape[1] == 0:
        return 1
    sol, _, rank, _ = numpy.linalg.lstsq(a_t, a_s, rcond=None)
    if rank < a_t.shape[1]:
        return 0
    if (numpy.linalg.norm(a_t @ sol - a_s)
            > 1e-5 * (1 + numpy.linalg.norm(a_s))):
        return 0
    det = numpy.linalg.det(sol)
    if abs(det) < 1e-8:
        return 0
    return 1 if det.real > 0 else -1


def _act_on_point(g, q, n_y):
    """Action of a base-slot symmetry on an ambient point; the cube part
    is untouched."""
    out = numpy.array(q, dtype=complex)
    inv_perm = [0] * n_y
    for idx in range(n_y):
        inv_perm[g.perm[idx] - 1] = idx
    for idx in range(n_y):
        val = complex(q[inv_perm[idx]])
        if g.epsilons[idx] < 0:
            if val == 0:
                return None
            val = 1.0 / val
        out[idx] = val
    return out


def _act_on_jac(g, q, jac, n_y):
    out = jac.copy()
    inv_perm = [0] * n_y
    for idx in range(n_y):
        inv_perm[g.perm[idx] - 1] = idx
    for idx in range(n_y):
        src = inv_perm[idx]
        row = jac[src]
        if g.epsilons[idx] < 0:
            val = complex(q[src])
            if val == 0:
                return None
            row = -row / val ** 2
        out[idx] = row
    return out


def _sgn(x):
    x = float(x)
    return (x > 0) - (x < 0)


class _Target:
    """One side of a relation: a cell with its coefficient, a reader
    that recognizes ambient points of its support, and the box-point
    builder used for the orientation comparison."""

    def __init__(self, cell, coeff, reader, box_point):
        self.cell = cell
        self.coeff = coeff
        self.reader = reader
        self.box_point = box_point


def _match_sample(q, jac, coeff, targets, n_y):
    """Locate an ambient sample on one of the targets modulo the base
    symmetry group; True when membership and orientation sign match."""
    group = enumerate_group(n_y) if n_y else [CubeSymmetry((), ())]
    for g in group:
        q_moved = _act_on_point(g, q, n_y)
        if q_moved is None:
            continue
        jac_moved = None
        for target in targets:
            reading = target.reader(q_moved)
            if reading is None:
                continue
            s_point = target.box_point(reading)
            if s_point is None:
                continue
            if jac_moved is None:
                jac_moved = _act_on_jac(g, q, jac, n_y)
                if jac_moved is None:
                    break
            rel = _orientation_between(
                cell_jacobian(target.cell, s_point), jac_moved)
            if rel == 0:
                continue
            if _sgn(coeff) == _sgn(target.coeff) * g.sign * rel:
                return True
    return False


def _is_degenerate(q, n_y, tol=1e-8):
    """In the degenerate locus: some cube coordinate equals 1."""
    return any(abs(v - 1.0) < tol for v in q[n_y:])


def _is_alternation_cancelled(q, n_y, tol=1e-8):
    """Fixed pointwise by a sign minus-one base symmetry: two base
    slots coincide (a transposition fixes the germ) or a base slot sits
    at +-1 (an inversion fixes it)."""
    for idx in range(n_y - 1):
        for jdx in range(idx + 1, n_y):
            if abs(q[idx] - q[jdx]) < tol:
                return True
    return any(abs(q[idx] - 1.0) < tol or abs(q[idx] + 1.0) < tol
               for idx in range(n_y))


def _insertion_cell(p, c, i, a, slot, value):
    """The (k-1, i) bounding cell with a constant base coordinate
    inserted at the given slot (1-based) of the larger base."""
    k = p - c
    base = eta_cell(p, c + 1, i, a)
    y = list(base.coords[:k - 2])
    cube = list(base.coords[k - 2:])
    y.insert(slot - 1, value)
    cell = ParamCell("%s+slot%d" % (base.name, slot), base.params,
                     base.bounds, tuple(y) + tuple(cube),
                     closed=base.closed)
    cell.family = ("insertion", k, i, slot)
    return cell


def _insertion_rho_cell(p, c1, a, slot, value):
    """A constant base coordinate inserted into the weight-(p-c1) cycle
    cell at the given slot of the larger base."""
    base = rho_cell(p, c1, a)
    k1 = p - c1
    y = list(base.coords[:k1 - 1])
    cube = list(base.coords[k1 - 1:])
    y.insert(slot - 1, value)
    cell = ParamCell("%s+slot%d" % (base.name, slot), base.params,
                     base.bounds, tuple(y) + tuple(cube),
                     closed=base.closed)
    cell.family = ("rho-insertion", k1, slot)
    return cell


def _restricted_cube_cell(p, c, i, a):
    """The (k, i+1) chain's extra-cube-face restriction: the (k, i)
    cell with t_i replaced by t_{i+1}."""
    base = eta_cell(p, c, i, a)
    sub = {_t(i): _t(i + 1)}
    kept = [idx for idx, s in enumerate(base.params) if s != _t(i)]
    params = [base.params[idx] for idx in kept]
    bounds = [(base.bounds[idx][0].subs(sub),
               base.bounds[idx][1].subs(sub)) for idx in kept]
    shift = {old: new for new, old in enumerate(kept)}
    closed = {shift[idx] for idx in base.closed}
    coords = [cx.subs(sub) for cx in base.coords]
    cell = ParamCell(base.name + "|cube-face", params, bounds, coords,
                     closed=closed)
    cell.family = ("cube-face", p - c, i)
    return cell


def _rho_face_cell(p, c, a, m):
    """The weight-k cycle cell restricted to its m-th vanishing cube
    face: x_1 := 1 for m = 1, the diagonal x_m := x_{m-1} for middle m,
    the parameter value x_{k-1} := a for m = k."""
    k = p - c
    base = rho_cell(p, c, a)
    if m == 1:
        sub = {_sphere_expr(1): sympy.Integer(1)}
        drop = set(_uv(1))
    elif m < k:
        sub = {_sphere_expr(m): _sphere_expr(m - 1)}
        drop = set(_uv(m))
    else:
        sub = {_sphere_expr(k - 1): _a_expr(a)}
        drop = set(_uv(k - 1))
    kept = [idx for idx, s in enumerate(base.params) if s not in drop]
    params = [base.params[idx] for idx in kept]
    bounds = [base.bounds[idx] for idx in kept]
    coords = []
    for cidx, cx in enumerate(base.coords):
        if cidx == (k - 1) + (m - 1):
            continue
        coords.append(cx.subs(sub))
    cell = ParamCell("%s|face%d" % (base.name, m), params, bounds, coords,
                     closed=set(range(len(params))))
    cell.family = ("rho-face", k, m)
    return cell


def _relation_report(name, samples, failures, notes=None):
    report = {"relation": name, "samples": int(samples),
              "failures": failures, "pass": not failures}
    if notes:
        report["notes"] = notes
    return report


def _lhs_targets(p, c, i, a, which):
    """The honest boundary facets of the (k, i) chain as located
    targets: "top" is the last simplex parameter at its upper end,
    "diag" the innermost two simplex parameters equal."""
    k = p - c
    sign = eta_sign(p, k, i)
    facets = eta_cell(p, c, i, a).boundary()
    out = []
    if "top" in which:
        facet, fsign = facets[0]

        def top_reader(q):
            r = _read_eta_point(k, i, a, q)
            if r is None or abs(r["t"][k - 1] - complex(a).real) > 1e-6:
                return None
            return r

        out.append(_Target(facet, sign * fsign, top_reader,
                           lambda r: _eta_box_point(k, i, a, r,
                                                    skip=k - 1)))
    if "diag" in which and i < k - 1:
        facet, fsign = facets[2 * (k - 1 - i)]

        def diag_reader(q):
            r = _read_eta_point(k, i, a, q)
            if r is None or abs(r["t"][i] - r["t"][i + 1]) > 1e-6:
                return None
            return r

        out.append(_Target(facet, sign * fsign, diag_reader,
                           lambda r: _eta_box_point(k, i, a, r, skip=i)))
    return out


def _check_boundary_relation(p, c, i, a, n_samples, rng, rhs_a=None):
    """One bounding-chain relation, sampled in both directions."""
    k = p - c
    a_rhs = a if rhs_a is None else rhs_a
    lhs = eta_chain(p, c, i, a)
    n_y = k - 1
    failures = []

    if i == k - 1:
        rho_chain = rho_cycle(p, c, a_rhs)
        targets = [_Target(rho_chain.cells[0][0], rho_chain.cells[0][1],
                           lambda q: _read_rho_point(k, a_rhs, q),
                           _rho_box_point)]
        name = "boundary[k=%d,i=%d] = cycle[k=%d]" % (k, i, k)
        which_lhs = ("top",)
    else:
        targets = []
        # Anchor the insertion block to the top simplex facet: facet 0
        # carries parity +1 and coefficient eta_sign(p, k, i), and the
        # slot-(k-1) insertion at value a is that facet on the nose, so
        # the block normalization is (-1)^k * eta_sign(p, k, i).
        base_sign = (-1 if k % 2 else 1) * eta_sign(p, k, i)
        for slot in range(1, k):
            parity = -1 if (slot - 1) % 2 else 1
            for value, vsign in ((_a_expr(a_rhs), 1),
                                 (1 / _a_expr(a_rhs), -1)):
                cell = _insertion_cell(p, c, i, a_rhs, slot, value)

                def reader(q, _slot=slot, _val=complex(value)):
                    if abs(q[_slot - 1] - _val) > 1e-6:
                        return None
                    return _read_eta_point(k - 1, i, a_rhs,
                                           numpy.delete(q, _slot - 1))

                targets.append(_Target(
                    cell, parity * vsign * base_sign, reader,
                    lambda r: _eta_box_point(k - 1, i, a_rhs, r)))
        cube_cell = _restricted_cube_cell(p, c, i, a_rhs)
        # The cube-face piece is the t_i = t_{i+1} simplex facet, whose
        # boundary parity is (-1)^(k-1-i); the frozen face-orientation
        # rule fixes its coefficient relative to eta_sign(p, k, i).
        cube_sign = (-1 if (k - 1 - i) % 2 else 1) * eta_sign(p, k, i)

        def cube_reader(q):
            r = _read_eta_point(k, i, a_rhs, q)
            if r is None or abs(r["t"][i] - r["t"][i + 1]) > 1e-6:
                return None
            return r

        targets.append(_Target(cube_cell, cube_sign, cube_reader,
                               lambda r: _eta_box_point(k, i, a_rhs, r,
                                                        skip=i)))
        name = "boundary[k=%d,i=%d] = insertions + cube-face" % (k, i)
        which_lhs = ("top", "diag")

    degenerate = cancelled = matched = 0
    facet_list = [(facet, coeff * fsign)
                  for cell, coeff in lhs.cells
                  for facet, fsign in cell.boundary()]
    per = max(2, -(-n_samples // len(facet_list)))
    for facet, coeff in facet_list:
        s_pts, q_pts = facet.sample_points(per, rng)
        for s, q in zip(s_pts, q_pts):
            if _is_degenerate(q, n_y):
                degenerate += 1
                continue
            if _is_alternation_cancelled(q, n_y):
                cancelled += 1
                continue
            jac = cell_jacobian(facet, s)
            if _match_sample(q, jac, coeff, targets, n_y):
                matched += 1
            else:
                failures.append({"direction": "boundary-to-pieces",
                                 "facet": facet.name,
                                 "point": [[v.real, v.imag] for v in q]})

    lhs_targets = _lhs_targets(p, c, i, a, which_lhs)
    per = max(2, -(-n_samples // len(targets)))
    for target in targets:
        s_pts, q_pts = target.cell.sample_points(per, rng)
        for s, q in zip(s_pts, q_pts):
            if _is_degenerate(q, n_y) or _is_alternation_cancelled(q, n_y):
                continue
            jac = cell_jacobian(target.cell, s)
            if not _match_sample(q, jac, target.coeff, lhs_targets, n_y):
                failures.append({"direction": "pieces-to-boundary",
                                 "piece": target.cell.name,
                                 "point": [[v.real, v.imag] for v in q]})
    return _relation_report(
        name, n_samples, failures[:8],
        {"degenerate": degenerate, "alternation_cancelled": cancelled,
         "matched": matched})


def _check_cycle_cube_relation(p, c, a, n_samples, rng, rhs_a=None):
    """Cube-face boundary of the weight-k cycle against the insertions
    of the weight-(k-1) cycle.  The first face is fixed pointwise by an
    inversion and the middle faces by a transposition, so both cancel
    under the alternation; the last face matches the insertions; faces
    at infinity land in the degenerate locus and are covered by the
    vanishing checks."""
    k = p - c
    a_rhs = a if rhs_a is None else rhs_a
    n_y = k - 1
    failures = []
    rho_coeff = rho_cycle(p, c, a).cells[0][1]

    targets = []
    base_coeff = rho_cycle(p, c + 1, a_rhs).cells[0][1]
    for slot in range(1, k):
        parity = -1 if (slot - 1) % 2 else 1
        for value, vsign in ((_a_expr(a_rhs), 1),
                             (1 / _a_expr(a_rhs), -1)):
            cell = _insertion_rho_cell(p, c + 1, a_rhs, slot, value)

            def reader(q, _slot=slot, _val=complex(value)):
                if abs(q[_slot - 1] - _val) > 1e-6:
                    return None
                return _read_rho_point(k - 1, a_rhs,
                                       numpy.delete(q, _slot - 1))

            targets.append(_Target(cell, parity * vsign * base_coeff,
                                   reader, _rho_box_point))

    degenerate = cancelled = matched = 0
    per = max(2, -(-n_samples // k))
    for m in range(1, k + 1):
        face = _rho_face_cell(p, c, a, m)
        face_coeff = rho_coeff * (-1 if (m - 1) % 2 else 1)
        s_pts, q_pts = face.sample_points(per, rng)
        for s, q in zip(s_pts, q_pts):
            if _is_degenerate(q, n_y):
                degenerate += 1
                continue
            if _is_alternation_cancelled(q, n_y):
                cancelled += 1
                continue
            jac = cell_jacobian(face, s)
            if _match_sample(q, jac, face_coeff, targets, n_y):
                matched += 1
            else:
                failures.append({"direction": "cube-face-to-insertions",
                                 "face": face.name,
                                 "point": [[v.real, v.imag] for v in q]})

    last_face = _rho_face_cell(p, c, a, k)
    last_coeff = rho_coeff * (-1 if (k - 1) % 2 else 1)

    def last_face_reader(q):
        if abs(q[k - 2] - complex(a)) > 1e-6:
            return None
        return _read_rho_point(k - 1, a, numpy.delete(q, k - 2))

    lhs_targets = [_Target(last_face, last_coeff, last_face_reader,
                           _rho_box_point)]
    per = max(2, -(-n_samples // len(targets)))
    for target in targets:
        s_pts, q_pts = target.cell.sample_points(per, rng)
        for s, q in zip(s_pts, q_pts):
            if _is_degenerate(q, n_y) or _is_alternation_cancelled(q, n_y):
                continue
            jac = cell_jacobian(target.cell, s)
            if not _match_sample(q, jac, target.coeff, lhs_targets, n_y):
                failures.append({"direction": "insertions-to-cube-face",
                                 "piece": target.cell.name,
                                 "point": [[v.real, v.imag] for v in q]})
    return _relation_report(
        "cube-boundary[cycle k=%d] = insertions[cycle k=%d]"
        % (k, k - 1),
        n_samples, failures[:8],
        {"degenerate": degenerate, "alternation_cancelled": cancelled,
         "matched": matched})


def _check_v_face_relation(p, c, i, a, n_samples, rng):
    """Each free sphere coordinate degenerating to 0 or infinity drives
    some cube coordinate to 1: the pullbacks to those loci land in the
    degenerate locus and vanish in the relative complex."""
    k = p - c
    a = complex(a)
    if i is None:
        free_count = k - 1
        label = "v-face[cycle k=%d]" % k
    else:
        free_count = i
        label = "v-face[k=%d,i=%d]" % (k, i)
    if free_count == 0:
        return _relation_report(label, 0, [], {"free_slots": 0})
    xs = [sympy.Symbol("X%d" % m) for m in range(1, free_count + 1)]
    tsym = sympy.Symbol("T")
    cube = []
    prev = sympy.Integer(1)
    for m in range(1, free_count + 1):
        cube.append(1 - xs[m - 1] / prev)
        prev = xs[m - 1]
    cube.append(1 - (_a_expr(a) if i is None else tsym) / prev)
    syms = xs + [tsym]
    fns = [sympy.lambdify(syms, cx, "numpy") for cx in cube]
    failures = []
    count = max(4, -(-n_samples // (2 * free_count)))
    for m in range(free_count):
        for extreme in (1e8, 1e-8):
            for _ in range(count):
                vals = [rng.uniform(0.2, 0.8)
                        + 1j * rng.uniform(-0.5, 0.5) for _ in xs]
                vals.append(rng.uniform(0.05, abs(a)))
                vals[m] = extreme * (1 + 0.3j)
                row = [complex(fn(*vals)) for fn in fns]
                if min(abs(v - 1.0) for v in row) > 1e-6:
                    failures.append({"slot": m + 1, "extreme": extreme,
                                     "cube": [abs(v) for v in row]})
    return _relation_report(label, count * 2 * free_count, failures[:8])


def check_boundary_relations(p, a, n_samples=None, rhs_a=None, seed=None):
    """Sampled verification of every boundary relation of the weight-p
    family: membership and local orientation sign in both directions,
    modulo the alternation symmetry, with degenerate and
    alternation-cancelled pieces classified as such.  rhs_a builds the
    right-hand sides at a different parameter value, demonstrating that
    the check fails when the relations do not hold."""
    a = _check_weight_value(p, a)
    if abs(a.imag) > 1e-12:
        raise BadParameter("sampled relation checks need a real "
                           "parameter value, got %r" % (a,))
    n_samples = config.DEFAULT_SAMPLES if n_samples is None else n_samples
    rng = numpy.random.default_rng(
        config.SAMPLE_SEED if seed is None else seed)
    relations = []
    for c in range(p):
        k = p - c
        for i in range(k - 1, -1, -1):
            relations.append(_check_boundary_relation(
                p, c, i, a, n_samples, rng, rhs_a=rhs_a))
    for c in range(p - 1):
        relations.append(_check_cycle_cube_relation(
            p, c, a, n_samples, rng, rhs_a=rhs_a))
    for c in range(p):
        k = p - c
        relations.append(_check_v_face_relation(p, c, None, a,
                                                n_samples, rng))
        for i in range(k):
            relations.append(_check_v_face_relation(p, c, i, a,
                                                    n_samples, rng))
    return {"p": int(p), "a": [a.real, a.imag],
            "n_samples": int(n_samples),
            "pass": all(r["pass"] for r in relations),
            "relations": relations}
