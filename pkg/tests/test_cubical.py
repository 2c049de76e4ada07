"""Cube symmetries, the alternating projector, and the cubical complex."""

import random
from fractions import Fraction

import pytest

from ajchains import config
from ajchains.admissible import (
    admissible_chain_basis,
    configuration_of,
    is_delta_admissible,
    random_admissible_chains,
    thom_face_cache,
)
from ajchains.cubical import (
    AlternatingBasis,
    CubeSymmetry,
    FaceIndex,
    SignConvention,
    act,
    alt_project,
    alternating_chain_basis,
    axis_inversion,
    build_cubical_ac_complex,
    cubical_boundary,
    enumerate_group,
    identity_symmetry,
    sigma_map,
    sigma_quasi_iso_report,
    sigma_sign,
)
from ajchains.errors import (
    AxisMismatch,
    NotAdmissible,
    NotGoodTriangulation,
)
from ajchains.models import get_point_model, p1_model, p1_squared_model


@pytest.fixture(scope="module")
def p1():
    return p1_model()


@pytest.fixture(scope="module")
def p1sq():
    return p1_squared_model()


# ---------------------------------------------------------------------------
# the symmetry group
# ---------------------------------------------------------------------------


def test_group_orders():
    assert len(enumerate_group(1)) == 2
    assert len(enumerate_group(2)) == 8
    assert len(enumerate_group(3)) == 48


@pytest.mark.parametrize("n", [1, 2, 3])
def test_sign_homomorphism_exhaustive(n):
    group = enumerate_group(n)
    assert sum(1 for g in group if g.sign == 1) == len(group) // 2
    for g in group:
        for h in group:
            assert g.compose(h).sign == g.sign * h.sign


def test_group_associativity_sample():
    group = enumerate_group(3)
    rng = random.Random(11)
    for _ in range(40):
        g, h, k = (rng.choice(group) for _ in range(3))
        assert g.compose(h).compose(k) == g.compose(h.compose(k))


def test_identity_and_inversion_elements():
    e = identity_symmetry(2)
    inv = axis_inversion(2, 1)
    assert e.sign == 1
    assert inv.sign == -1
    assert inv.compose(inv) == e
    swap = CubeSymmetry((1, 1), (2, 1))
    assert swap.sign == -1
    assert swap.compose(swap) == e


def test_bad_permutation_rejected():
    with pytest.raises(AxisMismatch):
        CubeSymmetry((1, 1), (1, 1))


# ---------------------------------------------------------------------------
# the action on chains
# ---------------------------------------------------------------------------


def test_identity_acts_trivially(p1sq):
    e = identity_symmetry(2)
    for _, chain in random_admissible_chains(p1sq, 4, random.Random(2)):
        assert act(e, chain, p1sq) == chain


def test_action_group_law_on_chains(p1sq):
    group = enumerate_group(2)
    rng = random.Random(5)
    chains = random_admissible_chains(p1sq, 3, random.Random(6))
    for _, chain in chains:
        for _ in range(8):
            g, h = rng.choice(group), rng.choice(group)
            assert act(g.compose(h), chain, p1sq) == \
                act(g, act(h, chain, p1sq), p1sq)


def test_inversion_swaps_axis_faces(p1, p1sq):
    inv = axis_inversion(1, 1)
    assert act(inv, {(4,): 1}, p1) == {(5,): 1}
    assert act(inv, {(5,): 1}, p1) == {(4,): 1}
    inv1 = axis_inversion(2, 1)
    zero_face = p1sq.face(1, "0")
    inf_face = p1sq.face(1, "inf")
    chain = {s: 1 for s in list(zero_face.simplices)[:3]}
    img = act(inv1, chain, p1sq)
    assert all(s in inf_face.simplices for s in img)


def test_inversions_fix_fundamental_cycles(p1, p1sq):
    assert act(axis_inversion(1, 1), p1.fundamental, p1) == p1.fundamental
    fund = p1sq.fundamental
    for g in (axis_inversion(2, 1), axis_inversion(2, 2),
              CubeSymmetry((1, 1), (2, 1))):
        assert act(g, fund, p1sq) == fund


def test_action_preserves_admissibility(p1sq):
    cfg = configuration_of(p1sq)
    group = enumerate_group(2)
    rng = random.Random(9)
    for _, chain in random_admissible_chains(p1sq, 3, random.Random(4)):
        g = rng.choice(group)
        assert is_delta_admissible(act(g, chain, p1sq), cfg)


def test_action_axis_mismatch(p1sq):
    with pytest.raises(AxisMismatch):
        act(axis_inversion(1, 1), {((4, 4), (4, 2)): 1}, p1sq)
    with pytest.raises(AxisMismatch):
        act(axis_inversion(1, 1), {(4,): 1})


# ---------------------------------------------------------------------------
# the alternating projector
# ---------------------------------------------------------------------------


def test_alt_project_rank_one_formula(p1):
    inv = axis_inversion(1, 1)
    for _, chain in random_admissible_chains(p1, 5, random.Random(3)):
        image = act(inv, chain, p1)
        expected = {}
        for s in set(chain) | set(image):
            v = Fraction(chain.get(s, 0) - image.get(s, 0), 2)
            if v:
                expected[s] = v
        assert alt_project(chain, p1) == expected


@pytest.mark.parametrize("name", ["p1", "p1xp1"])
def test_alt_project_idempotent(name, p1, p1sq):
    model = p1 if name == "p1" else p1sq
    for _, chain in random_admissible_chains(model, 5, random.Random(8)):
        once = alt_project(chain, model)
        assert alt_project(once, model) == once


@pytest.mark.parametrize("name", ["p1", "p1xp1"])
def test_alt_project_is_chain_map(name, p1, p1sq):
    model = p1 if name == "p1" else p1sq
    cfg = configuration_of(model)
    for _, chain in random_admissible_chains(model, 5, random.Random(12)):
        boundary = cfg.reduce(model.complex.boundary(chain))
        assert alt_project(boundary, model) == \
            cfg.reduce(model.complex.boundary(alt_project(chain, model)))


def test_alt_commutes_with_cubical_boundary(p1, p1sq):
    """Brute force over the admissible bases in face-mapped degrees."""
    cfg = configuration_of(p1sq)
    for degree in (2, 3, 4):
        basis = admissible_chain_basis(cfg, degree)
        for j in range(len(basis)):
            chain = basis.chain(j)
            lhs = alt_project(cubical_boundary(chain, p1sq), p1)
            rhs = cubical_boundary(alt_project(chain, p1sq), p1sq)
            assert lhs == rhs


# ---------------------------------------------------------------------------
# the cubical differential
# ---------------------------------------------------------------------------


def test_cubical_boundary_rank_one_formula(p1):
    cfg = configuration_of(p1)
    basis = admissible_chain_basis(cfg, 2)
    point_d = set(get_point_model().D)
    for j in range(len(basis)):
        chain = basis.chain(j)
        parts = {}
        for value in ("0", "inf"):
            face = p1.face(1, value)
            img = thom_face_cache(p1, face).apply_via_matrix(chain, 2)
            parts[value] = {s: c for s, c in img.items() if s not in point_d}
        expected = dict(parts["0"])
        for s, c in parts["inf"].items():
            acc = expected.get(s, 0) - c
            if acc:
                expected[s] = acc
            elif s in expected:
                del expected[s]
        assert cubical_boundary(chain, p1) == expected


def test_cubical_boundary_rank_two_formula(p1sq):
    cfg = configuration_of(p1sq)
    basis = admissible_chain_basis(cfg, 3)
    p1_d = set(p1_model().D)
    for j in random.Random(14).sample(range(len(basis)), 6):
        chain = basis.chain(j)
        expected = {}
        for axis, axis_sign in ((1, 1), (2, -1)):
            for value, face_sign in (("0", 1), ("inf", -1)):
                face = p1sq.face(axis, value)
                img = thom_face_cache(p1sq, face).apply_via_matrix(chain, 3)
                for s, c in img.items():
                    if s in p1_d:
                        continue
                    acc = expected.get(s, 0) + axis_sign * face_sign * c
                    if acc:
                        expected[s] = acc
                    elif s in expected:
                        del expected[s]
        assert cubical_boundary(chain, p1sq) == expected


def test_cubical_boundary_squares_to_zero(p1, p1sq):
    cfg = configuration_of(p1sq)
    cfg1 = configuration_of(p1)
    basis = admissible_chain_basis(cfg, 4)
    fund = p1sq.fundamental
    assert cubical_boundary(fund, p1sq) == {}
    for j in range(len(basis)):
        once = cubical_boundary(basis.chain(j), p1sq)
        assert is_delta_admissible(once, cfg1)
        assert cubical_boundary(once, p1) == {}


def test_cubical_boundary_needs_admissible_chain(p1):
    with pytest.raises(NotAdmissible):
        cubical_boundary({(0, 4): 1}, p1)


def test_cubical_boundary_point_model():
    point = get_point_model()
    assert cubical_boundary({}, point) == {}


# ---------------------------------------------------------------------------
# alternating bases and the cubical complex
# ---------------------------------------------------------------------------


def test_alternating_dimensions(p1, p1sq):
    assert [len(alternating_chain_basis(p1, r)) for r in range(3)] == \
        [1, 2, 1]
    assert [len(alternating_chain_basis(p1sq, r)) for r in range(5)] == \
        [0, 7, 25, 18, 0]


def test_alternating_basis_chains_are_alternating(p1sq):
    basis = alternating_chain_basis(p1sq, 2)
    for chain in basis.chains():
        assert alt_project(chain, p1sq) == chain
    roundtrip = basis.coordinates(basis.chain(3))
    assert roundtrip == {3: Fraction(1)}


def test_cubical_complex_point():
    complex_ = build_cubical_ac_complex(get_point_model(), 0)
    assert complex_.dims == {0: 1}
    assert complex_.cohomology_ranks() == {0: 1}


def test_cubical_complex_rank_one():
    complex_ = build_cubical_ac_complex(get_point_model(), 1)
    assert complex_.dims == {0: 1, 1: 3, 2: 1}
    assert complex_.is_complex()
    assert complex_.cohomology_ranks() == {0: 0, 1: 1, 2: 0}


def test_cubical_complex_rank_two():
    complex_ = build_cubical_ac_complex(get_point_model(), 2)
    assert complex_.dims == {0: 0, 1: 19, 2: 28, 3: 8, 4: 0}
    assert complex_.is_complex()
    assert complex_.cohomology_ranks() == {0: 0, 1: 0, 2: 1, 3: 0, 4: 0}


def test_cubical_complex_unavailable_models(p1):
    with pytest.raises(NotGoodTriangulation):
        build_cubical_ac_complex(p1, 1)
    with pytest.raises(NotGoodTriangulation):
        build_cubical_ac_complex(get_point_model(), 3)


# ---------------------------------------------------------------------------
# the comparison map
# ---------------------------------------------------------------------------


def test_sigma_signs():
    assert sigma_sign(()) == 1
    assert sigma_sign((0, 2)) == 1
    assert sigma_sign((0, 1)) == -1


def test_sigma_map_collapses_nodes(p1sq):
    cfg = configuration_of(p1sq)
    chain = admissible_chain_basis(cfg, 3).chain(0)
    out = sigma_map({(): chain}, 2)
    assert set(out) <= {(0, 1)}
    expected = alt_project(chain, p1sq)
    assert out == ({(0, 1): expected} if expected else {})


@pytest.mark.parametrize("n", [1, 2])
def test_sigma_quasi_isomorphism(n):
    report = sigma_quasi_iso_report(n)
    assert report["cubical_square_zero"]
    assert report["chain_map"]
    assert report["cone_exact"]
    assert report["quasi_isomorphism"]
    assert report["face_ranks"] == report["cubical_ranks"]
    assert report["cubical_ranks"][n] == 1
    assert all(v == 0 for j, v in report["cubical_ranks"].items() if j != n)


# ---------------------------------------------------------------------------
# face indexing and sign conventions
# ---------------------------------------------------------------------------


def test_face_index_positions():
    layout = [((1, "0"), 0), ((1, "inf"), 1), ((2, "inf"), 2),
              ((2, "0"), 3), ((3, "0"), 4), ((3, "inf"), 5),
              ((4, "inf"), 6), ((4, "0"), 7), ((5, "0"), 8)]
    for (axis, value), position in layout:
        assert FaceIndex(axis, value).position == position
    with pytest.raises(AxisMismatch):
        FaceIndex(1, "one")


def test_sign_convention_values():
    assert SignConvention.epsilon_1(0, 0) % 2 == 0
    assert SignConvention.epsilon_1(1, 1) % 2 == 0
    assert SignConvention.epsilon_1(1, 0) % 2 == 1
    assert SignConvention.epsilon_2(1, 0) % 2 == 0
    assert SignConvention.epsilon_2(0, 1) % 2 == 1
    assert SignConvention.epsilon_2(1, 1) % 2 == 0
    assert SignConvention.epsilon_3(1, 0) % 2 == 1
    assert SignConvention.epsilon_3(1, 1) % 2 == 0
    assert SignConvention.epsilon(0, 0, 2) % 2 == 1
    assert SignConvention.epsilon(1, 0, 2) % 2 == 1
    assert SignConvention.epsilon(1, 1, 2) % 2 == 1
    assert SignConvention.epsilon(2, 1, 3) % 2 == 0
