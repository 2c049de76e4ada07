"""Parametrized chains integrated against logarithmic differential forms.

Cells are smooth maps from a product of intervals (with possibly nested
bounds) into affine charts of ambient coordinate space; chains are formal
rational combinations of cells.  Forms carry an ordered block of
logarithmic factors d(z_i)/z_i, a polynomial-coefficient smooth factor,
and a symbolic power of 2*pi*i that is only multiplied in at the very
end of a pairing.  The module supplies iterated residues along the
coordinate hyperplanes {z_i = 0}, numerical integration of pulled-back
forms, the face pairing, a Cauchy-Stokes verifier, and a divergence
probe for integrands with non-integrable poles.
"""

import itertools
import math

import numpy
import sympy

from . import config
from .errors import AxisMismatch, DegreeMismatch, NoLogPole, NotConverged
from .quadrature import _level_value, integrate_box

TWO_PI_I = complex(0.0, 2.0 * math.pi)

_ZSYM = {}
_ZBSYM = {}


def z_symbol(axis):
    """Coordinate symbol of the given ambient axis (1-based)."""
    if axis not in _ZSYM:
        _ZSYM[axis] = sympy.Symbol("z%d" % axis)
    return _ZSYM[axis]


def zb_symbol(axis):
    """Conjugate-coordinate symbol of the given ambient axis."""
    if axis not in _ZBSYM:
        _ZBSYM[axis] = sympy.Symbol("zb%d" % axis)
    return _ZBSYM[axis]


def _covector_key(cov):
    kind, axis = cov
    return (axis, 0 if kind == "z" else 1)


def _sort_covectors(key):
    """Canonically sort a covector tuple; return (sorted, parity sign)."""
    items = list(key)
    sign = 1
    for i in range(1, len(items)):
        j = i
        while j > 0 and _covector_key(items[j - 1]) > _covector_key(items[j]):
            items[j - 1], items[j] = items[j], items[j - 1]
            sign = -sign
            j -= 1
    return tuple(items), sign


def _expand_covector(cov):
    """Write a dx/dy covector as a z/zb combination; passthrough otherwise."""
    kind, axis = cov
    half = sympy.Rational(1, 2)
    if kind == "z" or kind == "zb":
        return [(cov, sympy.Integer(1))]
    if kind == "x":
        return [(("z", axis), half), (("zb", axis), half)]
    if kind == "y":
        return [(("z", axis), half / sympy.I), (("zb", axis), -half / sympy.I)]
    raise AxisMismatch("unknown covector kind %r" % (kind,))


class LogForm:
    """A form (product of d(z_i)/z_i factors) ^ (smooth factor).

    smooth maps covector tuples to coefficient expressions in the ambient
    symbols z1.., zb1..; the scalar prefactor and an integer power of
    2*pi*i multiply the whole form.  The logarithmic axes are pairwise
    distinct and the smooth keys all have one common length, so the form
    has a well-defined degree.
    """

    def __init__(self, n_ambient, log_axes=(), smooth=None, prefactor=1,
                 twopii_power=0, degree=None):
        self.n = int(n_ambient)
        self.log_axes = tuple(int(a) for a in log_axes)
        if len(set(self.log_axes)) != len(self.log_axes):
            raise AxisMismatch("logarithmic axes must be distinct")
        for a in self.log_axes:
            if not 1 <= a <= self.n:
                raise AxisMismatch("log axis %d outside ambient 1..%d"
                                   % (a, self.n))
        if smooth is None:
            smooth = {(): sympy.Integer(1)}
        norm = {}
        for key, coeff in smooth.items():
            coeff = sympy.sympify(coeff)
            if coeff == 0:
                continue
            pieces = [((), coeff)]
            for cov in key:
                pieces = [(k + (c,), w * s)
                          for k, w in pieces
                          for c, s in _expand_covector(cov)]
            for k, w in pieces:
                if len(set(k)) != len(k):
                    continue
                sk, parity = _sort_covectors(k)
                norm[sk] = norm.get(sk, sympy.Integer(0)) + parity * w
        self.smooth = {k: sympy.cancel(v) for k, v in norm.items()
                       if sympy.cancel(v) != 0}
        lengths = {len(k) for k in self.smooth}
        if len(lengths) > 1:
            raise DegreeMismatch("smooth factor mixes degrees %s"
                                 % sorted(lengths))
        if degree is None:
            degree = len(self.log_axes) + (lengths.pop() if lengths else 0)
        self.degree = degree
        self.prefactor = sympy.sympify(prefactor)
        self.twopii_power = int(twopii_power)

    def is_zero(self):
        return not self.smooth or self.prefactor == 0

    def scaled(self, scalar):
        return LogForm(self.n, self.log_axes, self.smooth,
                       self.prefactor * sympy.sympify(scalar),
                       self.twopii_power, self.degree)

    def exterior_derivative(self):
        """d of the form; the log block contributes no new terms."""
        sign = -1 if len(self.log_axes) % 2 else 1
        out = {}
        for key, coeff in self.smooth.items():
            for axis in range(1, self.n + 1):
                for kind, sym in (("z", z_symbol(axis)),
                                  ("zb", zb_symbol(axis))):
                    dc = sympy.diff(coeff, sym)
                    if dc == 0 or (kind, axis) in key:
                        continue
                    nk, parity = _sort_covectors(((kind, axis),) + key)
                    out[nk] = out.get(nk, sympy.Integer(0)) + parity * dc
        return LogForm(self.n, self.log_axes, out, sign * self.prefactor,
                       self.twopii_power, self.degree + 1)

    def __repr__(self):
        return ("LogForm(n=%d, logs=%s, terms=%d, degree=%d)"
                % (self.n, self.log_axes, len(self.smooth), self.degree))


def poincare_residue(form, axis):
    """Single residue along {z_axis = 0}.

    Writing the form as (d(z_axis)/z_axis) ^ psi + (pole-free part), the
    residue is psi restricted to the hyperplane; moving the matching log
    factor to the front of the log block costs the usual sign.
    """
    if axis not in form.log_axes:
        raise NoLogPole("form has no logarithmic pole on axis %d" % axis)
    pos = form.log_axes.index(axis)
    new_logs = tuple(a for a in form.log_axes if a != axis)
    sub = {z_symbol(axis): 0, zb_symbol(axis): 0}
    out = {}
    for key, coeff in form.smooth.items():
        if any(a == axis for _, a in key):
            continue
        c = coeff.subs(sub)
        if c != 0:
            out[key] = c
    sign = -1 if pos % 2 else 1
    return LogForm(form.n, new_logs, out, sign * form.prefactor,
                   form.twopii_power, form.degree - 1)


def residue_iterated(form, axes):
    """Iterated residue along a set of axes, deepest axis taken first."""
    out = form
    for axis in sorted(set(axes), reverse=True):
        out = poincare_residue(out, axis)
    return out


class ParamCell:
    """One parametrized cell of a chain.

    params are real parameter symbols; bounds[j] = (lo, hi) may reference
    parameters listed before j only, so the domain is a tower of
    intervals over a box.  coords are expressions for the ambient
    coordinates.  sign is the orientation coefficient.  closed lists
    parameter indices without boundary facets (e.g. angles closing up or
    full-sphere charts); graded lists (parameter index, end) pairs toward
    which quadrature panels are geometrically graded; touches records
    declared incidences with ambient faces as (axis, value, where) with
    where either None or (parameter index, end); on_faces lists ambient
    axes on which the cell lies identically.
    """

    def __init__(self, name, params, bounds, coords, sign=1, on_faces=(),
                 touches=(), graded=(), closed=()):
        self.name = str(name)
        self.params = tuple(params)
        self.bounds = tuple((sympy.sympify(lo), sympy.sympify(hi))
                            for lo, hi in bounds)
        self.coords = tuple(sympy.sympify(c) for c in coords)
        self.sign = sign
        self.on_faces = frozenset(int(a) for a in on_faces)
        self.touches = tuple(touches)
        self.graded = tuple((int(j), float(e)) for j, e in graded)
        self.closed = frozenset(int(j) for j in closed)
        if len(self.bounds) != len(self.params):
            raise AxisMismatch("one bound pair per parameter required")
        allowed = set()
        for j, (lo, hi) in enumerate(self.bounds):
            free = (lo.free_symbols | hi.free_symbols) & set(self.params)
            if not free <= allowed:
                raise AxisMismatch(
                    "bounds of %s may reference earlier parameters only"
                    % self.params[j])
            allowed.add(self.params[j])
        self._box = None
        self._compiled = {}

    @property
    def dimension(self):
        return len(self.params)

    @property
    def n(self):
        return len(self.coords)

    def box_data(self):
        """Compose the interval tower down to the unit box [0,1]^k."""
        if self._box is None:
            svars = [sympy.Symbol("s_%d" % j, real=True)
                     for j in range(self.dimension)]
            park = []
            for j, (lo, hi) in enumerate(self.bounds):
                sub = {self.params[i]: park[i] for i in range(j)}
                lo_c = lo.subs(sub)
                hi_c = hi.subs(sub)
                park.append(sympy.expand(lo_c + (hi_c - lo_c) * svars[j]))
            sub = {self.params[i]: park[i] for i in range(self.dimension)}
            box_coords = [c.subs(sub) for c in self.coords]
            self._box = (svars, park, box_coords)
        return self._box

    def scaled(self, scalar):
        cell = ParamCell(self.name, self.params, self.bounds, self.coords,
                         self.sign, self.on_faces, self.touches,
                         self.graded, self.closed)
        cell.sign = self.sign * scalar
        return cell

    def boundary(self):
        """Facets with induced orientations; closed directions have none."""
        out = []
        for j in range(self.dimension):
            if j in self.closed:
                continue
            lo, hi = self.bounds[j]
            parity = -1 if j % 2 else 1
            for end_expr, end_sign in ((hi, 1), (lo, -1)):
                sub = {self.params[j]: end_expr}
                params = self.params[:j] + self.params[j + 1:]
                bounds = [self.bounds[i] if i < j else
                          (self.bounds[i][0].subs(sub),
                           self.bounds[i][1].subs(sub))
                          for i in range(self.dimension) if i != j]
                coords = [c.subs(sub) for c in self.coords]
                shift = {i: (i if i < j else i - 1)
                         for i in range(self.dimension) if i != j}
                closed = {shift[i] for i in self.closed if i != j}
                graded = tuple((shift[i], e) for i, e in self.graded
                               if i != j)
                facet = ParamCell("%s|%s=%s" % (self.name, self.params[j],
                                                end_expr),
                                  params, bounds, coords,
                                  self.sign, self.on_faces, (),
                                  graded, closed)
                out.append((facet, parity * end_sign))
        return out

    def apply_symmetry(self, g):
        """Permute ambient axes and invert marked ones (z -> 1/z)."""
        if g.n != self.n:
            raise AxisMismatch("symmetry on %d axes applied to %d ambient"
                               % (g.n, self.n))
        inv_perm = [0] * self.n
        for i in range(self.n):
            inv_perm[g.perm[i] - 1] = i
        coords = []
        faces = set()
        for i in range(self.n):
            src = inv_perm[i]
            expr = self.coords[src]
            if g.epsilons[i] < 0:
                expr = 1 / expr
                if (src + 1) in self.on_faces:
                    raise AxisMismatch(
                        "inversion moves a face the cell lies on")
            elif (src + 1) in self.on_faces:
                faces.add(i + 1)
            coords.append(sympy.cancel(expr))
        return ParamCell(self.name + "~", self.params, self.bounds, coords,
                         self.sign, faces, (), self.graded, self.closed)

    def sample_points(self, count, rng):
        """Interior parameter points and their ambient images."""
        svars, park, box_coords = self.box_data()
        fns = [sympy.lambdify(svars, c, "numpy") for c in box_coords]
        s = rng.uniform(0.02, 0.98, size=(count, max(1, self.dimension)))
        cols = [s[:, j] for j in range(self.dimension)]
        vals = []
        for fn in fns:
            v = fn(*cols) if self.dimension else fn()
            vals.append(numpy.broadcast_to(
                numpy.asarray(v, dtype=complex), (count,)).copy())
        return s[:, :self.dimension], numpy.stack(vals, axis=-1)

    def validate(self, samples=32, seed=None, tol=1e-9):
        """Spot-check declared incidences and orientation positivity."""
        rng = numpy.random.default_rng(
            config.SAMPLE_SEED if seed is None else seed)
        _, pts = self.sample_points(samples, rng)
        if not numpy.all(numpy.isfinite(pts)):
            raise AxisMismatch("cell %s: map not finite on open domain"
                               % self.name)
        for axis in self.on_faces:
            if numpy.max(numpy.abs(pts[:, axis - 1])) > tol:
                raise AxisMismatch(
                    "cell %s: declared to lie on face of axis %d but the "
                    "coordinate does not vanish" % (self.name, axis))
        svars, park, box_coords = self.box_data()
        grid = (1e-6, 0.25, 0.5, 0.75, 1.0 - 1e-6)
        for axis, value, where in self.touches:
            if where is None:
                continue
            j, end = where
            anchor = 1e-6 if end == 0.0 else 1.0 - 1e-6
            fn = sympy.lambdify(svars, box_coords[axis - 1], "numpy")
            best = None
            free = [i for i in range(self.dimension) if i != j]
            for combo in itertools.product(grid, repeat=len(free)):
                args = [0.0] * self.dimension
                args[j] = anchor
                for i, g in zip(free, combo):
                    args[i] = g
                val = complex(fn(*args))
                mag = abs(val)
                best = mag if best is None else (
                    min(best, mag) if value == "0" else max(best, mag))
            ok = best < 0.05 if value == "0" else best > 20.0
            if not ok:
                raise AxisMismatch(
                    "cell %s: declared touch of axis %d at %r not seen "
                    "near the declared locus (extremal magnitude %s)"
                    % (self.name, axis, value, best))
        return True

    def __repr__(self):
        return ("ParamCell(%s, dim=%d, n=%d, sign=%s)"
                % (self.name, self.dimension, self.n, self.sign))


class ParamChain:
    """Formal rational combination of cells in one ambient space."""

    def __init__(self, n_ambient, cells=(), on_faces=(), alternating=False):
        self.n = int(n_ambient)
        self.cells = []
        for cell, coeff in cells:
            if cell.n != self.n:
                raise AxisMismatch("cell %s lives in %d ambient axes, "
                                   "chain in %d" % (cell.name, cell.n,
                                                    self.n))
            if coeff:
                self.cells.append((cell, coeff))
        self.on_faces = frozenset(int(a) for a in on_faces)
        self.alternating = bool(alternating)

    @classmethod
    def zero(cls, n_ambient):
        return cls(n_ambient)

    def is_zero(self):
        return not self.cells

    def dimensions(self):
        return sorted({c.dimension for c, _ in self.cells})

    def scaled(self, scalar):
        return ParamChain(self.n, [(c, k * scalar) for c, k in self.cells],
                          self.on_faces, self.alternating)

    def __add__(self, other):
        if other.n != self.n:
            raise AxisMismatch("ambient mismatch in chain sum")
        return ParamChain(self.n, list(self.cells) + list(other.cells),
                          self.on_faces | other.on_faces,
                          self.alternating and other.alternating)

    def __neg__(self):
        return self.scaled(-1)

    def apply_symmetry(self, g):
        return ParamChain(self.n,
                          [(c.apply_symmetry(g), k) for c, k in self.cells],
                          (), self.alternating)

    def apply_alternation(self):
        """Alternation is carried as a tag, never expanded into cells."""
        return ParamChain(self.n, self.cells, self.on_faces,
                          alternating=True)

    def boundary(self):
        cells = []
        for cell, coeff in self.cells:
            for facet, sgn in cell.boundary():
                cells.append((facet, coeff * sgn))
        return ParamChain(self.n, cells, self.on_faces, self.alternating)

    def __repr__(self):
        return ("ParamChain(n=%d, cells=%d, faces=%s)"
                % (self.n, len(self.cells), sorted(self.on_faces)))


def _form_fingerprint(form):
    return (form.log_axes,
            tuple(sorted((k, sympy.srepr(v))
                         for k, v in form.smooth.items())),
            sympy.srepr(form.prefactor), form.degree)


def _compile_integrand(cell, form):
    """Numeric pullback of the form through the cell map.

    Returns (integrand, degenerate): the integrand maps an (npoints, k)
    array of box points to complex values (prefactor and 2*pi*i powers
    excluded); degenerate is True when the pullback vanishes identically
    because the form's covectors are linearly dependent on the cell, in
    which case the integrand is None.
    """
    key = _form_fingerprint(form)
    if key in cell._compiled:
        return cell._compiled[key]
    k = cell.dimension
    svars, park, box_coords = cell.box_data()
    needed = sorted(set(form.log_axes)
                    | {a for term in form.smooth for _, a in term}
                    | {a for term in form.smooth
                       for a in range(1, form.n + 1)
                       if (z_symbol(a) in form.smooth[term].free_symbols
                           or zb_symbol(a) in form.smooth[term].free_symbols)})
    coord_fns = {}
    deriv_fns = {}
    for a in needed:
        expr = box_coords[a - 1]
        coord_fns[a] = sympy.lambdify(svars, expr, "numpy")
        deriv_fns[a] = [sympy.lambdify(svars, sympy.diff(expr, s), "numpy")
                        for s in svars]
    zsyms = [z_symbol(a) for a in range(1, form.n + 1)]
    zbsyms = [zb_symbol(a) for a in range(1, form.n + 1)]
    terms = []
    for term_key, coeff in form.smooth.items():
        rows = ([("log", a) for a in form.log_axes]
                + [(kind, a) for kind, a in term_key])
        coeff_fn = sympy.lambdify(zsyms + zbsyms, coeff, "numpy")
        terms.append((rows, coeff_fn))

    def evaluate(points):
        npts = points.shape[0]
        cols = [points[:, j] for j in range(k)]

        def broad(v):
            return numpy.broadcast_to(numpy.asarray(v, dtype=complex),
                                      (npts,))

        zval = {a: broad(coord_fns[a](*cols) if k else coord_fns[a]())
                for a in needed}
        dval = ({a: numpy.stack([broad(fn(*cols)) for fn in deriv_fns[a]],
                                axis=-1)
                 for a in needed} if k else {})
        zfull = [zval.get(a, numpy.zeros(npts, dtype=complex))
                 for a in range(1, form.n + 1)]
        zbfull = [numpy.conj(v) for v in zfull]
        total = numpy.zeros(npts, dtype=complex)
        for rows, coeff_fn in terms:
            if k:
                mat = numpy.empty((npts, len(rows), k), dtype=complex)
                for r, (kind, a) in enumerate(rows):
                    if kind == "log":
                        mat[:, r, :] = dval[a] / zval[a][:, None]
                    elif kind == "z":
                        mat[:, r, :] = dval[a]
                    else:
                        mat[:, r, :] = numpy.conj(dval[a])
                det = numpy.linalg.det(mat) if rows else numpy.ones(npts)
            else:
                det = numpy.ones(npts, dtype=complex)
            cv = broad(coeff_fn(*zfull, *zbfull))
            total = total + cv * det
        return total

    degenerate = False
    if k > 0 and terms and all(len(rows) == k for rows, _ in terms):
        rng = numpy.random.default_rng(config.SAMPLE_SEED)
        probes = rng.uniform(0.15, 0.85, size=(4, k))
        degenerate = True
        for rows, _ in terms:
            for p in probes:
                cols = [numpy.array([p[j]]) for j in range(k)]
                mat = numpy.empty((len(rows), k), dtype=complex)
                dv = {a: numpy.array([fn(*cols)[0]
                                      if numpy.ndim(fn(*cols)) else fn(*cols)
                                      for fn in deriv_fns[a]], dtype=complex)
                      for a in needed}
                zv = {a: complex(numpy.asarray(coord_fns[a](*cols),
                                               dtype=complex).reshape(-1)[0])
                      for a in needed}
                for r, (kind, a) in enumerate(rows):
                    if kind == "log":
                        mat[r, :] = dv[a] / zv[a]
                    elif kind == "z":
                        mat[r, :] = dv[a]
                    else:
                        mat[r, :] = numpy.conj(dv[a])
                if not numpy.all(numpy.isfinite(mat)):
                    degenerate = False
                    break
                sing = numpy.linalg.svd(mat, compute_uv=False)
                if sing[0] == 0:
                    continue
                if sing[-1] / sing[0] > 1e-12:
                    degenerate = False
                    break
            if not degenerate:
                break
    result = (None, True) if degenerate else (evaluate, False)
    cell._compiled[key] = result
    return result


def integrate(chain, form, tol=None, budget=None):
    """Integral of the form over the chain.

    Returns {"value", "abs_err_estimate", "converged", "evals"} plus a
    per-cell breakdown.  Cells whose dimension differs from the form
    degree contribute zero; exceeding the evaluation budget returns the
    best estimate with converged = False instead of raising.
    """
    tol = config.DEFAULT_TOL if tol is None else tol
    budget = config.DEFAULT_QUAD_BUDGET if budget is None else budget
    if isinstance(chain, ParamCell):
        chain = ParamChain(chain.n, [(chain, 1)])
    if form.n != chain.n:
        raise AxisMismatch("form on %d axes integrated over chain on %d"
                           % (form.n, chain.n))
    active = [(cell, coeff) for cell, coeff in chain.cells
              if cell.dimension == form.degree]
    pref = complex(form.prefactor) * TWO_PI_I ** form.twopii_power
    value = 0.0 + 0.0j
    err = 0.0
    evals = 0
    converged = True
    parts = []
    for idx, (cell, coeff) in enumerate(active):
        integrand, degenerate = _compile_integrand(cell, form)
        if degenerate:
            parts.append({"cell": cell.name, "value": 0.0, "evals": 0,
                          "degenerate": True})
            continue
        share = max(1, (budget - evals) // max(1, len(active) - idx))
        res = integrate_box(integrand, cell.dimension, tol=tol,
                            budget=share, graded_ends=cell.graded)
        scale = complex(coeff) * complex(cell.sign) * pref
        value += scale * res["value"]
        err += abs(scale) * res["abs_err_estimate"]
        evals += res["evals"]
        converged = converged and res["converged"]
        parts.append({"cell": cell.name, "value": scale * res["value"],
                      "evals": res["evals"],
                      "converged": res["converged"]})
    return {"value": value, "abs_err_estimate": err, "converged": converged,
            "evals": evals, "parts": parts}


def pairing_report(chain, form, tol=None, budget=None):
    """Pairing of a chain on coordinate faces with a form: the iterated
    residue along the chain's face axes is integrated and the result is
    multiplied by (2*pi*i)^(number of face axes)."""
    axes = sorted(chain.on_faces)
    stripped = residue_iterated(form, axes)
    res = integrate(chain, stripped, tol=tol, budget=budget)
    scale = TWO_PI_I ** len(axes)
    return {"value": scale * res["value"],
            "abs_err_estimate": abs(scale) * res["abs_err_estimate"],
            "converged": res["converged"], "evals": res["evals"]}


def pairing(chain, form, tol=None, budget=None):
    report = pairing_report(chain, form, tol=tol, budget=budget)
    if not report["converged"]:
        raise NotConverged("pairing did not converge within budget")
    return report["value"]


def verify_cauchy_stokes(gamma, phi, dh_gamma, tol=None, budget=None):
    """Check (face-boundary of gamma, phi) against
    (usual boundary of gamma, phi) - (-1)^(#faces) (gamma, d phi).

    The face boundary is caller-supplied as a chain on one more face.
    Returns the standard report dict; raises NotConverged if any of the
    three integrals fails to converge.
    """
    tol = config.DEFAULT_TOL if tol is None else tol
    n_faces = len(gamma.on_faces)
    lhs = pairing_report(dh_gamma, phi, tol=tol, budget=budget)
    rhs_boundary = pairing_report(gamma.boundary(), phi, tol=tol,
                                  budget=budget)
    rhs_exterior = pairing_report(gamma, phi.exterior_derivative(),
                                  tol=tol, budget=budget)
    if not (lhs["converged"] and rhs_boundary["converged"]
            and rhs_exterior["converged"]):
        raise NotConverged("a Cauchy-Stokes side did not converge "
                           "within budget")
    sign = -1 if n_faces % 2 else 1
    rhs = rhs_boundary["value"] - sign * rhs_exterior["value"]
    abs_err = abs(lhs["value"] - rhs)
    return {"check": "cauchy-stokes",
            "lhs": [lhs["value"].real, lhs["value"].imag],
            "rhs": [rhs.real, rhs.imag],
            "abs_err": abs_err,
            "tol": tol,
            "pass": bool(abs_err < tol * (1.0 + abs(rhs))),
            "evals": lhs["evals"] + rhs_boundary["evals"]
            + rhs_exterior["evals"]}


def divergence_probe(chain, form, budget=None, rounds=None, tol=None):
    """Refine the quadrature round by round and watch the partial sums.

    diverged becomes True when the partial sums grow strictly for at
    least the configured number of consecutive rounds while the
    round-to-round differences fail to shrink.  Deterministic for fixed
    configuration.
    """
    budget = config.DEFAULT_QUAD_BUDGET if budget is None else budget
    rounds = config.PROBE_ROUNDS if rounds is None else rounds
    tol = config.DEFAULT_TOL if tol is None else tol
    if isinstance(chain, ParamCell):
        chain = ParamChain(chain.n, [(chain, 1)])
    pref = complex(form.prefactor) * TWO_PI_I ** form.twopii_power
    active = []
    for cell, coeff in chain.cells:
        if cell.dimension != form.degree:
            continue
        integrand, degenerate = _compile_integrand(cell, form)
        if not degenerate:
            active.append((cell, complex(coeff) * complex(cell.sign),
                           integrand))
    trace = []
    evals = 0
    for level in range(rounds):
        total = 0.0 + 0.0j
        for cell, scale, integrand in active:
            graded = {}
            for axis, end in cell.graded:
                graded.setdefault(axis, set()).add(end)
            if cell.dimension >= config.QUAD_HIGHDIM_THRESHOLD:
                base = config.QUAD_BASE_ORDER_HIGHDIM
                step = config.QUAD_ORDER_STEP_HIGHDIM
            else:
                base = config.QUAD_BASE_ORDER
                step = config.QUAD_ORDER_STEP
            val, used = _level_value(integrand, cell.dimension, level,
                                     graded, base + step * level, base)
            total += scale * val
            evals += used
        trace.append(pref * total)
        if evals > budget:
            break
    diffs = [abs(trace[i] - trace[i - 1]) for i in range(1, len(trace))]
    growth = 0
    diverged = False
    for i in range(1, len(trace)):
        mag_grew = abs(trace[i]) > abs(trace[i - 1]) * (1 + 1e-12)
        err_stuck = (diffs[i - 1] > 1e-9 * (1 + abs(trace[i]))
                     and (i < 2 or diffs[i - 1] > 0.7 * diffs[i - 2]))
        growth = growth + 1 if (mag_grew and err_stuck) else 0
        if growth >= config.PROBE_GROWTH_ROUNDS:
            diverged = True
    return {"diverged": diverged,
            "trace": [[v.real, v.imag] for v in trace],
            "diffs": diffs,
            "evals": evals,
            "rounds": len(trace)}


# --- built-in verification cases --------------------------------------------


def _square_cell(lo, hi, name="square"):
    u, v = sympy.symbols("u v", real=True)
    return ParamCell(name, (u, v), ((lo, hi), (lo, hi)), (u + sympy.I * v,))


def builtin_cs_cases():
    """Named Cauchy-Stokes cases; each supplies gamma, phi, and the
    face-boundary chain whose multiplicities were verified numerically."""
    u, v = sympy.symbols("u v", real=True)
    cases = {}

    square = _square_cell(-1, 1, "square-around-origin")
    point0 = ParamCell("origin", (), (), (sympy.Integer(0),), on_faces=(1,))
    cases["square-log"] = {
        "gamma": ParamChain(1, [(square, 1)]),
        "phi": LogForm(1, (1,)),
        "dh_gamma": ParamChain(1, [(point0, 1)], on_faces=(1,)),
        "note": "2-cell around the origin against dz/z; both sides 2*pi*i",
    }

    off_square = ParamCell("offset-square", (u, v),
                           ((sympy.Rational(1, 4), sympy.Rational(3, 4)),
                            (sympy.Rational(1, 4), sympy.Rational(3, 4))),
                           (u + sympy.I * v,))
    half = sympy.Rational(1, 2)
    cases["smooth-stokes"] = {
        "gamma": ParamChain(1, [(off_square, 1)]),
        "phi": LogForm(1, (), {(("z", 1),):
                               half * (z_symbol(1) + zb_symbol(1))}),
        "dh_gamma": ParamChain.zero(1),
        "note": "cell away from all faces; classical Stokes",
    }

    flat = ParamCell("face-square", (u, v), ((-1, 1), (-1, 1)),
                     (sympy.Integer(0), u + sympy.I * v), on_faces=(1,))
    both0 = ParamCell("deep-point", (), (),
                      (sympy.Integer(0), sympy.Integer(0)),
                      on_faces=(1, 2))
    cases["c2-interlock"] = {
        "gamma": ParamChain(2, [(flat, 1)], on_faces=(1,)),
        "phi": LogForm(2, (1, 2)),
        "dh_gamma": ParamChain(2, [(both0, -1)], on_faces=(1, 2)),
        "note": "cell on one face meeting a second; iterated residue",
    }

    t = sympy.Symbol("t", real=True)
    seg = ParamCell("segment", (t,),
                    ((sympy.Rational(1, 5), sympy.Rational(4, 5)),), (t,))
    cases["segment-smooth"] = {
        "gamma": ParamChain(1, [(seg, 1)]),
        "phi": LogForm(1, (), {(): z_symbol(1) ** 2}),
        "dh_gamma": ParamChain.zero(1),
        "note": "1-cell against a 0-form; fundamental theorem",
    }

    cases["zero-chain"] = {
        "gamma": ParamChain.zero(1),
        "phi": LogForm(1, (1,)),
        "dh_gamma": ParamChain.zero(1),
        "note": "zero chain pairs to zero on both sides",
    }
    return cases


def run_cs_case(name, tol=None, budget=None):
    cases = builtin_cs_cases()
    case = cases[name]
    report = verify_cauchy_stokes(case["gamma"], case["phi"],
                                  case["dh_gamma"], tol=tol, budget=budget)
    report["case"] = name
    return report


def wedge_cell():
    """2-cell pinched exponentially against the second coordinate axis:
    first coordinate 1+u, second between exp(-1/u) and exp(-1)."""
    u, v = sympy.symbols("u v", real=True)
    lower = sympy.exp(-1 / u)
    upper = sympy.exp(-1)
    return ParamCell("pinched-wedge", (u, v), ((0, 1), (0, 1)),
                     (1 + u, lower + v * (upper - lower)),
                     touches=((2, "0", (0, 0.0)),),
                     graded=((0, 0.0),))


def builtin_probe_cases():
    """Named divergence-probe cases."""
    wedge = wedge_cell()
    square = _square_cell(-1, 1, "square-around-origin")
    contour = ParamChain(1, [(square, 1)]).boundary()
    return {
        "diverging-wedge": {
            "chain": ParamChain(2, [(wedge, 1)]),
            "phi": LogForm(2, (1, 2)),
            "expect_diverged": True,
            "note": "log pole on both axes over the pinched wedge",
        },
        "wedge-no-pole": {
            "chain": ParamChain(2, [(wedge, 1)]),
            "phi": LogForm(2, (), {(("z", 1), ("z", 2)): 1}),
            "expect_diverged": False,
            "note": "same cell, pole-free form; finite area integral",
        },
        "admissible-square": {
            "chain": contour,
            "phi": LogForm(1, (1,)),
            "expect_diverged": False,
            "note": "an admissible case from the verification suite",
        },
    }


def run_probe_case(name, budget=None, rounds=None):
    case = builtin_probe_cases()[name]
    report = divergence_probe(case["chain"], case["phi"], budget=budget,
                              rounds=rounds)
    report["case"] = name
    report["expected"] = case["expect_diverged"]
    return report
