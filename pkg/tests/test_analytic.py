"""Tests for parametrized chains, log forms, residues, and integration.

Numeric oracles are independent of the quadrature under test: closed
forms (2*pi*i, logarithms), convergent series summed in the test, and a
plain trapezoid rule on a fine grid.
"""

import math

import numpy
import pytest
import sympy

from ajchains import analytic as an
from ajchains import config
from ajchains.cubical import CubeSymmetry, axis_inversion
from ajchains.errors import (AxisMismatch, DegreeMismatch, NoLogPole,
                             NotConverged)

Z1, Z2, Z3 = (an.z_symbol(j) for j in (1, 2, 3))
ZB1, ZB2 = (an.zb_symbol(j) for j in (1, 2))


def dilog_series(a, terms=400):
    return sum(a ** n / n ** 2 for n in range(1, terms))


def circle_chain(radius=sympy.Rational(1, 2)):
    th = sympy.Symbol("th", real=True)
    cell = an.ParamCell("circle", (th,), ((0, 1),),
                        (radius * sympy.exp(2 * sympy.pi * sympy.I * th),),
                        closed=(0,))
    return an.ParamChain(1, [(cell, 1)])


def forms_equal(a, b):
    if a.log_axes != b.log_axes:
        return False
    keys = set(a.smooth) | set(b.smooth)
    for k in keys:
        lhs = a.prefactor * a.smooth.get(k, sympy.Integer(0))
        rhs = b.prefactor * b.smooth.get(k, sympy.Integer(0))
        if sympy.simplify(lhs - rhs) != 0:
            return False
    return True


# --- log forms ---------------------------------------------------------------


class TestLogForm:
    def test_degree(self):
        assert an.LogForm(2, (1, 2)).degree == 2
        assert an.LogForm(1, (), {(): Z1}).degree == 0
        assert an.LogForm(2, (1,), {(("z", 2),): 1}).degree == 2

    def test_distinct_log_axes_required(self):
        with pytest.raises(AxisMismatch):
            an.LogForm(2, (1, 1))

    def test_log_axis_in_ambient(self):
        with pytest.raises(AxisMismatch):
            an.LogForm(1, (2,))

    def test_mixed_degree_smooth_rejected(self):
        with pytest.raises(DegreeMismatch):
            an.LogForm(2, (), {(): 1, (("z", 1),): 1})

    def test_xy_covectors_expand(self):
        # dx ^ dy = (i/2) dz ^ dzb on one axis
        form = an.LogForm(1, (), {(("x", 1), ("y", 1)): 1})
        key = (("z", 1), ("zb", 1))
        assert set(form.smooth) == {key}
        assert sympy.simplify(form.smooth[key] - sympy.I / 2) == 0

    def test_repeated_covector_drops(self):
        form = an.LogForm(1, (), {(("x", 1), ("x", 1)): 5},
                          degree=2)
        assert form.is_zero()

    def test_exterior_derivative_squares_to_zero(self):
        form = an.LogForm(2, (1,), {(("z", 2),): Z1 * Z2 ** 2 + ZB1,
                                    (("zb", 2),): Z2 * ZB2})
        dd = form.exterior_derivative().exterior_derivative()
        assert dd.is_zero()

    def test_derivative_of_constant_coefficient(self):
        assert an.LogForm(1, (1,)).exterior_derivative().is_zero()

    def test_wirtinger_derivative(self):
        form = an.LogForm(1, (), {(): Z1 ** 2 * ZB1})
        d = form.exterior_derivative()
        assert sympy.simplify(d.smooth[(("z", 1),)] - 2 * Z1 * ZB1) == 0
        assert sympy.simplify(d.smooth[(("zb", 1),)] - Z1 ** 2) == 0


# --- residues ----------------------------------------------------------------


class TestResidues:
    def test_residue_of_dlog(self):
        res = an.poincare_residue(an.LogForm(1, (1,)), 1)
        assert res.log_axes == ()
        assert res.degree == 0
        assert sympy.simplify(res.prefactor * res.smooth[()] - 1) == 0

    def test_residue_drops_first_axis(self):
        res = an.poincare_residue(an.LogForm(2, (1, 2)), 1)
        assert res.log_axes == (2,)
        assert res.prefactor == 1

    def test_residue_position_sign(self):
        res = an.poincare_residue(an.LogForm(2, (1, 2)), 2)
        assert res.log_axes == (1,)
        assert res.prefactor == -1

    def test_no_log_pole(self):
        with pytest.raises(NoLogPole):
            an.poincare_residue(an.LogForm(2, (1,)), 2)

    def test_residue_restricts_coefficients(self):
        form = an.LogForm(2, (1,), {(("z", 2),): 1 + Z1 + Z2,
                                    (("zb", 1),): Z2})
        res = an.poincare_residue(form, 1)
        assert set(res.smooth) == {(("z", 2),)}
        assert sympy.simplify(res.smooth[(("z", 2),)] - (1 + Z2)) == 0

    def test_iterated_residue_full(self):
        res = an.residue_iterated(an.LogForm(2, (1, 2)), (1, 2))
        assert res.degree == 0
        assert sympy.simplify(res.prefactor * res.smooth[()] + 1) == 0

    @pytest.mark.parametrize("insert_axis,kept,parity", [
        (1, (2, 3), 1), (2, (1, 3), -1), (3, (1, 2), 1)])
    def test_insertion_sign(self, insert_axis, kept, parity):
        phi = an.LogForm(3, (1, 2, 3), {(): 1 + Z1 * Z2 + Z3 ** 2})
        full = an.residue_iterated(phi, (1, 2, 3))
        partial = an.poincare_residue(an.residue_iterated(phi, kept),
                                      insert_axis)
        assert forms_equal(full, partial.scaled(parity))

    @pytest.mark.parametrize("axes", [(1,), (3,), (1, 3), (1, 2, 3)])
    def test_derivation_identity(self, axes):
        phi = an.LogForm(3, (1, 2, 3),
                         {(): Z2 ** 2 * Z1 + Z3 + ZB2 * Z2})
        lhs = an.residue_iterated(phi, axes).exterior_derivative()
        rhs = an.residue_iterated(phi.exterior_derivative(), axes)
        sign = -1 if len(axes) % 2 else 1
        assert forms_equal(lhs, rhs.scaled(sign))


# --- cells and chains ---------------------------------------------------------


class TestCells:
    def test_bounds_must_reference_earlier_params(self):
        t1, t0 = sympy.symbols("t1 t0", real=True)
        with pytest.raises(AxisMismatch):
            an.ParamCell("bad", (t0, t1), ((0, t1), (0, 1)), (t0, t1))

    def test_interval_boundary(self):
        t = sympy.Symbol("t", real=True)
        cell = an.ParamCell("seg", (t,), ((0, sympy.Rational(3, 10)),), (t,))
        facets = cell.boundary()
        assert len(facets) == 2
        values = sorted((complex(f.coords[0]).real, s) for f, s in facets)
        assert values == [(0.0, -1), (0.3, 1)]

    def test_square_boundary_is_closed_contour(self):
        square = an._square_cell(-1, 1)
        chain = an.ParamChain(1, [(square, 1)]).boundary()
        assert len(chain.cells) == 4
        second = chain.boundary()
        total = {}
        for cell, coeff in second.cells:
            key = complex(cell.coords[0])
            key = (round(key.real, 9), round(key.imag, 9))
            total[key] = total.get(key, 0) + coeff * cell.sign
        assert all(v == 0 for v in total.values())

    def test_closed_directions_have_no_facets(self):
        assert circle_chain().boundary().is_zero()

    def test_nested_bounds_boundary(self):
        t1, t0 = sympy.symbols("t1 t0", real=True)
        cell = an.ParamCell("simplex", (t1, t0),
                            ((0, 1), (0, t1)), (t1, t0))
        facets = cell.boundary()
        assert len(facets) == 4
        diag = [f for f, _ in facets if f.coords == (f.params[0],) * 2]
        assert len(diag) == 1

    def test_validate_checks_declared_face(self):
        u = sympy.Symbol("u", real=True)
        liar = an.ParamCell("liar", (u,), ((0, 1),), (1 + u,),
                            on_faces=(1,))
        with pytest.raises(AxisMismatch):
            liar.validate()

    def test_builtin_cells_validate(self):
        assert an.wedge_cell().validate()
        for case in an.builtin_cs_cases().values():
            for cell, _ in case["gamma"].cells + case["dh_gamma"].cells:
                assert cell.validate()

    def test_chain_ambient_guard(self):
        square = an._square_cell(-1, 1)
        with pytest.raises(AxisMismatch):
            an.ParamChain(2, [(square, 1)])


# --- integration oracles -------------------------------------------------------


class TestIntegrate:
    def test_circle_against_dlog(self):
        res = an.integrate(circle_chain(), an.LogForm(1, (1,)), tol=1e-9)
        assert res["converged"]
        assert abs(res["value"] - 2j * math.pi) < 1e-9

    def test_segment_log_oracle(self):
        t = sympy.Symbol("t", real=True)
        seg = an.ParamCell("seg", (t,), ((0, sympy.Rational(3, 10)),), (t,))
        phi = an.LogForm(1, (), {(("z", 1),): 1 / (1 - Z1)})
        res = an.integrate(an.ParamChain(1, [(seg, 1)]), phi, tol=1e-9)
        assert res["converged"]
        assert abs(res["value"] - (-math.log(0.7))) < 1e-9

    def test_nested_two_cell_dilog_oracle(self):
        t1, t0 = sympy.symbols("t1 t0", real=True)
        cell = an.ParamCell("li2", (t1, t0),
                            ((0, sympy.Rational(3, 10)), (0, t1)), (t1, t0))
        phi = an.LogForm(2, (1,), {(("z", 2),): 1 / (1 - Z2)})
        res = an.integrate(an.ParamChain(2, [(cell, 1)]), phi, tol=1e-9)
        assert res["converged"]
        assert abs(res["value"] - dilog_series(0.3)) < 1e-8

    def test_orientation_linearity(self):
        phi = an.LogForm(1, (1,))
        plus = an.integrate(circle_chain(), phi, tol=1e-9)["value"]
        minus = an.integrate(circle_chain().scaled(-1), phi,
                             tol=1e-9)["value"]
        half = an.integrate(circle_chain().scaled(sympy.Rational(1, 2)),
                            phi, tol=1e-9)["value"]
        assert abs(plus + minus) < 1e-12
        assert abs(2 * half - plus) < 1e-12

    def test_cell_additivity(self):
        t = sympy.Symbol("t", real=True)
        whole = an.ParamCell("w", (t,), ((0, 1),), (t + 1,))
        left = an.ParamCell("l", (t,), ((0, sympy.Rational(1, 2)),),
                            (t + 1,))
        right = an.ParamCell("r", (t,), ((sympy.Rational(1, 2), 1),),
                             (t + 1,))
        phi = an.LogForm(1, (1,))
        a = an.integrate(an.ParamChain(1, [(whole, 1)]), phi,
                         tol=1e-10)["value"]
        b = an.integrate(an.ParamChain(1, [(left, 1), (right, 1)]), phi,
                         tol=1e-10)["value"]
        assert abs(a - b) < 1e-9
        assert abs(a - math.log(2)) < 1e-9

    def test_degree_mismatch_contributes_zero(self):
        res = an.integrate(circle_chain(), an.LogForm(1, (), {(): Z1}))
        assert res["value"] == 0
        assert res["converged"]

    def test_degenerate_pullback_detected(self):
        # a 2-cell mapping onto the real axis kills dz ^ dzb exactly
        u, v = sympy.symbols("u v", real=True)
        flat = an.ParamCell("flat", (u, v), ((0, 1), (0, 1)), (u + v,))
        phi = an.LogForm(1, (), {(("z", 1), ("zb", 1)): 1})
        res = an.integrate(an.ParamChain(1, [(flat, 1)]), phi)
        assert res["value"] == 0
        assert res["evals"] == 0
        assert res["parts"][0]["degenerate"]

    def test_budget_exhaustion_returns_best_estimate(self):
        res = an.integrate(circle_chain(), an.LogForm(1, (1,)),
                           tol=1e-14, budget=15)
        assert not res["converged"]
        assert res["value"] != 0

    def test_nested_tolerances_agree(self):
        phi = an.LogForm(1, (1,))
        loose = an.integrate(circle_chain(), phi, tol=1e-4)
        tight = an.integrate(circle_chain(), phi, tol=1e-6)
        assert loose["converged"] and tight["converged"]
        assert abs(loose["value"] - tight["value"]) < 1e-4

    def test_ambient_mismatch(self):
        with pytest.raises(AxisMismatch):
            an.integrate(circle_chain(), an.LogForm(2, (1,)))


# --- symmetry action -----------------------------------------------------------


class TestSymmetryAction:
    def test_inversion_negates_circle_integral(self):
        g = axis_inversion(1, 1)
        phi = an.LogForm(1, (1,))
        base = an.integrate(circle_chain(), phi, tol=1e-9)["value"]
        moved = an.integrate(circle_chain().apply_symmetry(g), phi,
                             tol=1e-9)["value"]
        assert abs(base + moved) < 1e-9

    def test_swap_permutes_axes(self):
        t = sympy.Symbol("t", real=True)
        cell = an.ParamCell("c", (t,), ((1, 2),), (t, sympy.Integer(5)))
        g = CubeSymmetry((1, 1), (2, 1))
        out = cell.apply_symmetry(g)
        assert out.coords == (sympy.Integer(5), t)

    def test_inversion_off_face_guard(self):
        point = an.ParamCell("p", (), (), (sympy.Integer(0),),
                             on_faces=(1,))
        with pytest.raises(AxisMismatch):
            point.apply_symmetry(axis_inversion(1, 1))

    def test_alternation_is_a_tag(self):
        chain = circle_chain().apply_alternation()
        assert chain.alternating
        assert len(chain.cells) == 1


# --- pairing and Cauchy-Stokes -------------------------------------------------


class TestPairing:
    def test_point_on_face_pairs_to_residue(self):
        point = an.ParamCell("p", (), (), (sympy.Integer(0),),
                             on_faces=(1,))
        chain = an.ParamChain(1, [(point, 1)], on_faces=(1,))
        value = an.pairing(chain, an.LogForm(1, (1,)))
        assert value == 2j * math.pi

    def test_pairing_raises_when_unconverged(self):
        with pytest.raises(NotConverged):
            an.pairing(circle_chain(), an.LogForm(1, (1,)),
                       tol=1e-14, budget=15)

    def test_cs_report_shape(self):
        report = an.run_cs_case("square-log")
        for key in ("check", "lhs", "rhs", "abs_err", "tol", "pass",
                    "evals"):
            assert key in report
        assert report["check"] == "cauchy-stokes"
        assert isinstance(report["lhs"], list)

    @pytest.mark.parametrize("name", sorted(an.builtin_cs_cases()))
    def test_cs_suite_passes(self, name):
        report = an.run_cs_case(name, tol=1e-6)
        assert report["pass"], report

    def test_square_log_exact_value(self):
        report = an.run_cs_case("square-log", tol=1e-6)
        lhs = complex(*report["lhs"])
        rhs = complex(*report["rhs"])
        assert lhs == 2j * math.pi
        assert abs(rhs - 2j * math.pi) < 1e-9

    def test_zero_chain_is_zero_zero(self):
        report = an.run_cs_case("zero-chain")
        assert report["lhs"] == [0.0, 0.0]
        assert report["rhs"] == [0.0, 0.0]


# --- divergence probe ----------------------------------------------------------


class TestDivergenceProbe:
    def test_wedge_diverges(self):
        report = an.run_probe_case("diverging-wedge")
        assert report["diverged"]
        mags = [abs(complex(*v)) for v in report["trace"]]
        assert mags == sorted(mags)

    def test_pole_free_wedge_converges(self):
        report = an.run_probe_case("wedge-no-pole")
        assert not report["diverged"]
        u = numpy.linspace(1e-9, 1.0, 400001)
        oracle = math.exp(-1) - numpy.trapezoid(numpy.exp(-1.0 / u), u)
        assert abs(complex(*report["trace"][-1]) - oracle) < 1e-5

    def test_admissible_case_not_flagged(self):
        report = an.run_probe_case("admissible-square")
        assert not report["diverged"]
        assert abs(complex(*report["trace"][-1]) - 2j * math.pi) < 1e-9

    def test_probe_deterministic(self):
        a = an.run_probe_case("diverging-wedge")
        b = an.run_probe_case("diverging-wedge")
        assert a["trace"] == b["trace"]
        assert a["evals"] == b["evals"]
