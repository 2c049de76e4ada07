"""Tests for admissibility predicates and the face double complexes."""

import random
from fractions import Fraction

import pytest

from ajchains import admissible as A
from ajchains.errors import NotAdmissible, NotGoodTriangulation
from ajchains.homology import (
    betti_numbers,
    check_differential,
    complex_is_exact,
    mapping_cone,
)
from ajchains.models import p1_model, p1_squared_model
from ajchains.simplicial import Complex, barycentric_subdivision_mod


# -- predicates on the projective-line model -------------------------------


def test_two_chain_touching_face_vertex_is_admissible():
    m = p1_model()
    cfg = A.configuration_of(m)
    tri = next(s for s in m.complex.simplices(2) if 4 in s)
    assert A.is_admissible({tri}, cfg)


def test_one_chain_through_face_vertex_is_not_admissible():
    m = p1_model()
    cfg = A.configuration_of(m)
    edge = next(s for s in m.complex.simplices(1) if 4 in s)
    assert not A.is_admissible({edge}, cfg)


def test_support_missing_every_face_is_admissible():
    m = p1_model()
    cfg = A.configuration_of(m)
    edge = next(s for s in m.complex.simplices(1)
                if 4 not in s and 5 not in s)
    assert A.is_admissible({edge}, cfg)


def test_empty_support_and_zero_chain_are_admissible():
    cfg = A.configuration_of(p1_model())
    assert A.is_admissible(set(), cfg)
    assert A.is_delta_admissible({}, cfg)


def test_fundamental_cycles_are_boundary_admissible():
    for make in (p1_model, p1_squared_model):
        m = make()
        cfg = A.configuration_of(m)
        assert A.is_delta_admissible(m.fundamental, cfg)


def test_admissible_chain_with_bad_boundary_is_rejected():
    m = p1_model()
    cfg = A.configuration_of(m)
    tri = next(s for s in m.complex.simplices(2) if 4 in s)
    assert A.is_admissible({tri}, cfg)
    assert not A.is_delta_admissible({tri: 1}, cfg)


def test_predicate_ignores_degenerate_part_of_support():
    m = p1_model()
    cfg = A.configuration_of(m)
    edge = next(s for s in m.complex.simplices(1)
                if 4 not in s and 5 not in s)
    chain = {edge: 3, (2,): 7}     # the vertex lies in the degeneracy locus
    assert A.is_delta_admissible(chain, cfg) == \
        A.is_delta_admissible({edge: 3}, cfg)


def test_predicate_depends_only_on_support():
    m = p1_model()
    cfg = A.configuration_of(m)
    basis = A.admissible_chain_basis(cfg, 2)
    chain = basis.chain(0)
    scaled = {s: -5 * v for s, v in chain.items()}
    assert A.is_delta_admissible(chain, cfg)
    assert A.is_delta_admissible(scaled, cfg)


# -- goodness of face configurations ---------------------------------------


def test_degeneracy_locus_must_be_a_subcomplex():
    m = p1_model()
    edge = m.complex.simplices(1)[0]
    with pytest.raises(NotGoodTriangulation):
        A.FaceConfiguration(m.complex, list(m.faces), {edge})


def test_faces_must_be_full():
    K = Complex([(0, 1, 2)])
    with pytest.raises(NotGoodTriangulation):
        A.FaceConfiguration(K, [("f", {(0,), (1,)}, 1)], set())


def test_face_unions_must_be_full():
    K = Complex([(0, 1)])
    with pytest.raises(NotGoodTriangulation):
        A.FaceConfiguration(
            K, [("f0", {(0,)}, 1), ("f1", {(1,)}, 1)], set())


def test_lattice_drops_empty_intersections():
    cfg = A.configuration_of(p1_model())
    assert sorted(cfg.lattice) == [(0,), (1,)]
    cfg2 = A.configuration_of(p1_squared_model())
    assert sorted(cfg2.lattice) == [
        (0,), (0, 2), (0, 3), (1,), (1, 2), (1, 3), (2,), (3,)]


# -- chain group bases ------------------------------------------------------


def test_projective_line_admissible_dimensions():
    cfg = A.configuration_of(p1_model())
    assert [len(A.admissible_chain_basis(cfg, r)) for r in range(3)] == \
        [3, 4, 2]
    assert [len(A.full_chain_basis(cfg, r)) for r in range(3)] == [5, 12, 8]


def test_basis_chains_are_boundary_admissible():
    for make in (p1_model, p1_squared_model):
        cfg = A.configuration_of(make())
        for r in range(cfg.complex.dim() + 1):
            for chain in A.admissible_chain_basis(cfg, r).chains():
                assert A.is_delta_admissible(chain, cfg)


def test_coordinates_roundtrip_and_reject_outsiders():
    cfg = A.configuration_of(p1_model())
    basis = A.admissible_chain_basis(cfg, 1)
    chain = {}
    for j in range(len(basis)):
        for s, v in basis.chain(j).items():
            chain[s] = chain.get(s, 0) + (j + 1) * v
    coords = basis.coordinates(chain)
    assert coords == {j: j + 1 for j in range(len(basis))}
    edge = next(s for s in cfg.complex.simplices(1) if 4 in s)
    with pytest.raises(NotAdmissible):
        basis.coordinates({edge: 1})


def test_random_admissible_chains_are_admissible_and_integral():
    m = p1_squared_model()
    cfg = A.configuration_of(m)
    rng = random.Random(11)
    samples = A.random_admissible_chains(m, 10, rng)
    assert len(samples) == 10
    for r, chain in samples:
        assert chain
        assert all(len(s) - 1 == r for s in chain)
        assert all(isinstance(v, int) for v in chain.values())
        assert A.is_delta_admissible(chain, cfg)


# -- the chain projection ---------------------------------------------------


def _random_relative_chain(cfg, r, rng):
    chain = {}
    for s in cfg.complex.simplices(r):
        if s in cfg.D:
            continue
        c = rng.randrange(-2, 3)
        if c:
            chain[s] = c
    return chain


def test_projection_fixes_admissible_chains():
    for make in (p1_model, p1_squared_model):
        cfg = A.configuration_of(make())
        proj = A.ChainProjector(cfg)
        for r in range(cfg.complex.dim() + 1):
            for chain in A.admissible_chain_basis(cfg, r).chains():
                assert proj.apply(r, chain) == \
                    {s: Fraction(v) for s, v in chain.items()}


def test_projection_is_a_chain_map_with_admissible_image():
    for make in (p1_model, p1_squared_model):
        cfg = A.configuration_of(make())
        proj = A.ChainProjector(cfg)
        rng = random.Random(5)
        for r in range(1, cfg.complex.dim() + 1):
            for _ in range(3):
                chain = _random_relative_chain(cfg, r, rng)
                image = proj.apply(r, chain)
                # image lies in the admissible subgroup
                A.admissible_chain_basis(cfg, r).coordinates(image)
                # commutes with the relative boundary
                lhs = cfg.reduce(cfg.complex.boundary(image))
                rhs = proj.apply(
                    r - 1, cfg.reduce(cfg.complex.boundary(chain)))
                assert {s: Fraction(v) for s, v in lhs.items() if v} == rhs
                # idempotent
                assert proj.apply(r, image) == image


# -- the double complexes ---------------------------------------------------


def test_projective_line_double_complex_shape_and_cohomology():
    cfg = A.configuration_of(p1_model())
    ac = A.build_ac_double_complex(cfg)
    assert ac.dims == {0: 2, 1: 6, 2: 3}
    assert check_differential(ac.chain_dims, ac.diff)
    ranks = betti_numbers(ac.chain_dims, ac.diff)
    assert {n: ranks[-n] for n in ac.dims} == {0: 0, 1: 1, 2: 0}


def test_projective_plane_product_double_complex_cohomology():
    cfg = A.configuration_of(p1_squared_model())
    ac = A.build_ac_double_complex(cfg)
    assert ac.dims == {0: 4, 1: 152, 2: 224, 3: 84, 4: 9}
    assert check_differential(ac.chain_dims, ac.diff)
    ranks = betti_numbers(ac.chain_dims, ac.diff)
    assert {n: ranks[-n] for n in ac.dims} == \
        {0: 0, 1: 0, 2: 1, 3: 0, 4: 0}


def test_comparison_complex_and_inclusion_small_model():
    cfg = A.configuration_of(p1_model())
    ac = A.build_ac_double_complex(cfg)
    cc = A.comparison_complex(cfg)
    assert cc.dims == {0: 8, 1: 14, 2: 5}
    assert check_differential(cc.chain_dims, cc.diff)
    f = A.inclusion_rows(ac, cc)
    assert A.is_chain_map(ac, cc, f)
    dims, diff = mapping_cone(
        ac.chain_dims, ac.diff, cc.chain_dims, cc.diff, f)
    assert complex_is_exact(dims, diff)


def test_quasi_isomorphism_reports():
    for make in (p1_model, p1_squared_model):
        rep = A.quasi_isomorphism_report(make())
        assert rep["ac_square_zero"] and rep["c_square_zero"]
        assert rep["chain_map"] and rep["cone_exact"]
        assert rep["quasi_isomorphism"]
        assert rep["ac_ranks"] == rep["c_ranks"]


def test_cohomology_report_rows():
    rows = A.cohomology_report(p1_model())
    by_source = {}
    for row in rows:
        by_source.setdefault(row["source"], {})[row["degree"]] = row
    for source in ("AC", "C"):
        assert {d: r["rank"] for d, r in by_source[source].items()} == \
            {0: 0, 1: 1, 2: 0}
        assert all(r["torsion"] == [] for r in by_source[source].values())


def test_comparison_differential_is_integral():
    for make in (p1_model, p1_squared_model):
        cc = A.comparison_complex(A.configuration_of(make()))
        for rows in cc.diff.values():
            for row in rows:
                for v in row.values():
                    assert Fraction(v).denominator == 1


# -- face maps on the double complex ----------------------------------------


def test_face_maps_preserve_boundary_admissibility():
    m = p1_squared_model()
    nodes = A.lattice_nodes(m)
    root = nodes[()]
    rng = random.Random(3)
    for r, chain in A.random_admissible_chains(m, 6, rng):
        if r < 2:
            continue
        for g in sorted(root.available):
            child = nodes[(g,)]
            img = child.cfg.reduce(root.face_apply(g, chain, r))
            assert A.is_delta_admissible(img, child.cfg)


def test_face_map_variants_and_cocycles_agree_on_admissible_chains():
    m = p1_model()
    cfg = A.configuration_of(m)
    face = m.faces[0]
    for j, chain in enumerate(A.admissible_chain_basis(cfg, 2).chains()):
        images = [
            A.thom_face_cache(m, face, var, alt).apply_via_matrix(chain, 2)
            for var in (0, 1) for alt in (False, True)]
        assert all(img == images[0] for img in images[1:])


def test_face_map_commutation_on_random_chains():
    m = p1_squared_model()
    rng = random.Random(7)
    pairs = [(0, 2), (0, 3), (1, 2), (1, 3)]
    for r, chain in A.random_admissible_chains(m, 6, rng):
        for a, b in pairs:
            rep = A.face_map_commutation_check(m, a, b, chain)
            assert rep["equal"]


def test_face_map_commutation_rejects_same_axis_and_bad_chains():
    m = p1_squared_model()
    with pytest.raises(NotAdmissible):
        A.face_map_commutation_check(m, 0, 1, dict(m.fundamental))
    bad_simplex = next(iter(sorted(m.D)))
    tri = next(s for s in m.complex.simplices(1)
               if not A.is_admissible({s}, A.configuration_of(m)))
    with pytest.raises(NotAdmissible):
        A.face_map_commutation_check(m, 0, 2, {tri: 1})
    assert bad_simplex in m.D


# -- subdivision monotonicity -----------------------------------------------


def test_admissibility_survives_relative_subdivision():
    m = p1_model()
    cfg = A.configuration_of(m)
    kept = set(m.D)
    for face in m.faces:
        kept |= face.simplices
    sub = barycentric_subdivision_mod(m.complex, kept)
    faces2 = [(f.name, set(f.simplices), f.codim) for f in m.faces]
    cfg2 = A.FaceConfiguration(sub.complex, faces2, set(m.D))
    rng = random.Random(13)
    for r, chain in A.random_admissible_chains(m, 8, rng):
        assert A.is_delta_admissible(chain, cfg)
        assert A.is_delta_admissible(sub.lam_chain(chain), cfg2)
