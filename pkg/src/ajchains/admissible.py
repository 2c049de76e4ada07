"""Admissible chain groups and the face-indexed double complex.

A chain is admissible when its support meets every coordinate face with
the codimension-two dimension drop; it is boundary-admissible when its
topological boundary is admissible too.  Those chains form subgroups of
the relative chain groups which assemble, over the lattice of face
intersections, into a double complex: the first differential collects the
face maps with alternating signs, the second is the topological boundary.

The module builds that complex for a model, builds the comparison complex
on the full relative chain groups, and provides the inclusion between
them together with rank/torsion reports and a mapping-cone test that the
inclusion is invertible on cohomology.
"""

import itertools
import math
from fractions import Fraction

from . import config
from .errors import (
    NoSolution,
    NotAdmissible,
    NotGoodTriangulation,
)
from .homology import (
    betti_numbers,
    check_differential,
    complex_is_exact,
    invariant_factors,
    kernel_basis,
    mapping_cone,
)
from .models import face_position, p1_model
from .simplicial import full_subcomplex, is_subcomplex, vertices_of
from .thom import (
    FaceMapCache,
    independent_solution,
    solve_thom,
    transport_thom,
)

_NEG_INF = -(10 ** 9)


# ---------------------------------------------------------------------------
# face configurations and the admissibility predicates
# ---------------------------------------------------------------------------


class _ConfigFace:
    """One declared face of a configuration."""

    def __init__(self, name, position, simplices, codim):
        self.name = name
        self.position = position
        self.simplices = set(simplices)
        self.vertex_set = frozenset(vertices_of(self.simplices))
        self.codim = codim


class _LatticeEntry:
    """A nonempty intersection of declared faces."""

    def __init__(self, positions, simplices, codim):
        self.positions = positions
        self.simplices = set(simplices)
        self.vertex_set = frozenset(vertices_of(self.simplices))
        self.codim = codim


class FaceConfiguration:
    """An ambient complex with its coordinate faces and degeneracy locus.

    The constructor enforces the goodness conditions: the degeneracy locus
    is a subcomplex, and every intersection and every union of the
    declared faces is a full subcomplex.  The lattice of nonempty
    intersections is precomputed; admissibility questions are answered
    against it.
    """

    def __init__(self, complex_, faces, D, model=None):
        self.complex = complex_
        self.model = model
        self.D = set(D)
        self.faces = []
        for i, face in enumerate(faces):
            if isinstance(face, _ConfigFace):
                self.faces.append(face)
            elif hasattr(face, "simplices"):
                self.faces.append(_ConfigFace(
                    face.name, getattr(face, "position", i),
                    face.simplices, face.codim))
            else:
                name, simplices, codim = face
                self.faces.append(_ConfigFace(name, i, simplices, codim))
        self.faces.sort(key=lambda f: f.position)
        self._check_goodness()
        self.lattice = self._build_lattice()
        self._adm_cache = {}
        self._basis_cache = {}
        self._full_cache = {}

    def _check_goodness(self):
        K = self.complex
        for s in self.D:
            if s not in K.simplex_set:
                raise NotGoodTriangulation(
                    "degeneracy simplex %r is not in the complex" % (s,))
            for i in range(len(s)):
                if s[:i] + s[i + 1:] and \
                        K.canon(s[:i] + s[i + 1:])[0] not in self.D:
                    raise NotGoodTriangulation(
                        "degeneracy locus is not a subcomplex")
        for face in self.faces:
            if not is_subcomplex(K, face.simplices):
                raise NotGoodTriangulation(
                    "face %s is not a subcomplex" % face.name)
        for k in range(1, len(self.faces) + 1):
            for combo in itertools.combinations(self.faces, k):
                union = set()
                for f in combo:
                    union |= f.simplices
                if full_subcomplex(K, vertices_of(union)) != union:
                    raise NotGoodTriangulation(
                        "union of faces %s is not full"
                        % ", ".join(f.name for f in combo))
                inter = set(combo[0].simplices)
                for f in combo[1:]:
                    inter &= f.simplices
                if inter and \
                        full_subcomplex(K, vertices_of(inter)) != inter:
                    raise NotGoodTriangulation(
                        "intersection of faces %s is not full"
                        % ", ".join(f.name for f in combo))

    def _build_lattice(self):
        lattice = {}
        for k in range(1, len(self.faces) + 1):
            for combo in itertools.combinations(self.faces, k):
                inter = set(combo[0].simplices)
                for f in combo[1:]:
                    inter &= f.simplices
                if not inter:
                    continue
                key = tuple(sorted(f.position for f in combo))
                lattice[key] = _LatticeEntry(
                    key, inter, sum(f.codim for f in combo))
        return lattice

    def reduce(self, chain):
        """Representative of a chain modulo the degeneracy locus."""
        return {s: c for s, c in chain.items() if c and s not in self.D}

    def cut_dimension(self, simplexes, entry):
        """Simplicial dimension of the part of the support lying on the
        face intersection but off the degeneracy locus."""
        best = _NEG_INF
        for s in simplexes:
            tau = tuple(v for v in s if v in entry.vertex_set)
            if not tau or len(tau) - 1 <= best:
                continue
            canon, _ = self.complex.canon(tau)
            if canon in self.D:
                continue
            best = len(tau) - 1
        return best

    def admissible_at(self, simplex, degree):
        """Whether a simplex may appear in an admissible chain of the
        given degree."""
        key = (simplex, degree)
        hit = self._adm_cache.get(key)
        if hit is not None:
            return hit
        ok = True
        for entry in self.lattice.values():
            cut = self.cut_dimension((simplex,), entry)
            if cut > degree - 2 * entry.codim:
                ok = False
                break
        self._adm_cache[key] = ok
        return ok


def configuration_of(model):
    """The face configuration of a model, built once and shared."""
    if model.name not in _CFG_CACHE:
        _CFG_CACHE[model.name] = FaceConfiguration(
            model.complex, list(model.faces), model.D, model=model)
    return _CFG_CACHE[model.name]


_CFG_CACHE = {}


def is_admissible(S, cfg):
    """Whether a support set meets every face with the required drop.

    S is any iterable of simplexes of cfg's complex.  The empty support is
    admissible; a part of the support lying inside the degeneracy locus
    never counts against a face.
    """
    simplexes = [cfg.complex.canon(s)[0] for s in S]
    if not simplexes:
        return True
    dim_s = max(len(s) - 1 for s in simplexes)
    for entry in cfg.lattice.values():
        if cfg.cut_dimension(simplexes, entry) > dim_s - 2 * entry.codim:
            return False
    return True


def is_delta_admissible(chain, cfg):
    """Whether a chain and its boundary are both admissible modulo the
    degeneracy locus."""
    reduced = cfg.reduce(chain)
    if not is_admissible(reduced.keys(), cfg):
        return False
    boundary = cfg.reduce(cfg.complex.boundary(reduced))
    return is_admissible(boundary.keys(), cfg)


# ---------------------------------------------------------------------------
# bases of the admissible and full relative chain groups
# ---------------------------------------------------------------------------


class ChainBasis:
    """Basis of a chain group over a fixed list of simplex columns."""

    def __init__(self, columns, kernel=None):
        self.columns = list(columns)
        self.col_index = {s: i for i, s in enumerate(self.columns)}
        self.kernel = kernel

    def __len__(self):
        if self.kernel is None:
            return len(self.columns)
        return len(self.kernel)

    def chain(self, j):
        """The j-th basis chain as a simplex -> coefficient dict."""
        if self.kernel is None:
            return {self.columns[j]: 1}
        return {self.columns[c]: v
                for c, v in self.kernel.vectors[j].items()}

    def chains(self):
        return [self.chain(j) for j in range(len(self))]

    def coordinates(self, chain):
        """Sparse coordinates of a chain in this basis.

        Raises NotAdmissible when the chain does not lie in the spanned
        subgroup (a simplex outside the columns, or a vector outside the
        kernel).
        """
        vec = {}
        for s, c in chain.items():
            if not c:
                continue
            i = self.col_index.get(s)
            if i is None:
                raise NotAdmissible(
                    "simplex %r lies outside the chain group" % (s,))
            vec[i] = Fraction(c)
        if self.kernel is None:
            return vec
        try:
            coords = self.kernel.coordinates(vec)
        except ValueError:
            raise NotAdmissible(
                "chain lies outside the admissible subgroup")
        return {j: v for j, v in enumerate(coords) if v}


def admissible_chain_basis(cfg, degree):
    """Basis of the admissible chains of one degree, modulo degeneracy.

    Columns are the non-degenerate simplexes that can carry an admissible
    chain of this degree; the group is the kernel of the boundary followed
    by the projection onto the simplexes that may not appear in an
    admissible boundary.
    """
    hit = cfg._basis_cache.get(("AC", degree))
    if hit is not None:
        return hit
    K = cfg.complex
    if degree < 0 or degree > K.dim():
        basis = ChainBasis([], kernel_basis([], 0))
        cfg._basis_cache[("AC", degree)] = basis
        return basis
    cols = [s for s in K.simplices(degree)
            if s not in cfg.D and cfg.admissible_at(s, degree)]
    bad = []
    if degree > 0:
        bad = [t for t in K.simplices(degree - 1)
               if t not in cfg.D and not cfg.admissible_at(t, degree - 1)]
    bad_index = {t: i for i, t in enumerate(bad)}
    rows = [dict() for _ in bad]
    for j, s in enumerate(cols):
        for t, v in K.boundary({s: 1}).items():
            i = bad_index.get(t)
            if i is not None and v:
                rows[i][j] = rows[i].get(j, 0) + v
    basis = ChainBasis(cols, kernel_basis(rows, len(cols)))
    for chain in basis.chains():
        if not is_delta_admissible(chain, cfg):
            raise NotAdmissible(
                "computed basis chain of degree %d fails the support "
                "test" % degree)
    cfg._basis_cache[("AC", degree)] = basis
    return basis


def full_chain_basis(cfg, degree):
    """Basis of the full relative chain group of one degree."""
    hit = cfg._basis_cache.get(("C", degree))
    if hit is not None:
        return hit
    K = cfg.complex
    cols = []
    if 0 <= degree <= K.dim():
        cols = [s for s in K.simplices(degree) if s not in cfg.D]
    basis = ChainBasis(cols)
    cfg._basis_cache[("C", degree)] = basis
    return basis


# ---------------------------------------------------------------------------
# chain projection of the full complex onto the admissible subcomplex
# ---------------------------------------------------------------------------


def _batch_solve(rows, ncols, rhs_cols):
    """Solutions of A x = b_j for many right-hand columns at once.

    One elimination with pivots restricted to the unknown columns; each
    solution sets the free unknowns to zero.  Returns a list of solution
    dicts, or None in the slot of an inconsistent system.
    """
    aug = [{c: Fraction(v) for c, v in row.items() if v} for row in rows]
    for j, col in enumerate(rhs_cols):
        for i, v in col.items():
            if v:
                aug[i][("b", j)] = Fraction(v)
    reduced = []      # (pivot column, row dict)
    constraints = []  # rows with no unknown columns left
    # sparser rows first keeps the elimination light
    for r in sorted(aug, key=lambda row: sum(
            1 for c in row if isinstance(c, int))):
        for pc, prow in reduced:
            f = r.get(pc)
            if not f:
                continue
            for c, v in prow.items():
                nv = r.get(c, 0) - f * v
                if nv:
                    r[c] = nv
                elif c in r:
                    del r[c]
        real = [c for c in r if isinstance(c, int)]
        if not real:
            if r:
                constraints.append(r)
            continue
        pc = min(real)
        pval = r[pc]
        if pval != 1:
            for c in list(r):
                r[c] /= pval
        for _, prow in reduced:
            f = prow.get(pc)
            if not f:
                continue
            for c, v in r.items():
                nv = prow.get(c, 0) - f * v
                if nv:
                    prow[c] = nv
                elif c in prow:
                    del prow[c]
        reduced.append((pc, r))
    out = []
    for j in range(len(rhs_cols)):
        bad = any(row.get(("b", j)) for row in constraints)
        if bad:
            out.append(None)
            continue
        x = {}
        for pc, row in reduced:
            v = row.get(("b", j))
            if v:
                x[pc] = v
        out.append(x)
    return out


class ChainProjector:
    """Degreewise chain projection onto the admissible subcomplex.

    Built from a contraction of the quotient complex (full chains modulo
    admissible ones): the projection is the identity on admissible chains,
    commutes with the boundary, and exists exactly when the quotient is
    acyclic -- which is the computational content of the moving statement
    the comparison complex is meant to witness.
    """

    def __init__(self, cfg):
        self.cfg = cfg
        K = cfg.complex
        top = K.dim()
        self.degrees = range(0, top + 1)
        self.full = {r: full_chain_basis(cfg, r) for r in self.degrees}
        self.ac = {r: admissible_chain_basis(cfg, r) for r in self.degrees}
        # complement columns: unit simplexes spanning a complement of the
        # admissible subgroup inside the full group
        self.comp = {}
        self.comp_index = {}
        self._free_of = {}
        for r in self.degrees:
            ac = self.ac[r]
            full = self.full[r]
            free_full = set()
            for f in ac.kernel.free_cols:
                free_full.add(full.col_index[ac.columns[f]])
            self._free_of[r] = [full.col_index[ac.columns[f]]
                                for f in ac.kernel.free_cols]
            comp = [i for i in range(len(full.columns))
                    if i not in free_full]
            self.comp[r] = comp
            self.comp_index[r] = {i: t for t, i in enumerate(comp)}
        # ac basis vectors in full coordinates
        self._acvec = {}
        for r in self.degrees:
            full = self.full[r]
            vecs = []
            for chain in self.ac[r].chains():
                vecs.append({full.col_index[s]: Fraction(v)
                             for s, v in chain.items()})
            self._acvec[r] = vecs
        # quotient differential and the admissible part of each boundary
        self._dq = {}       # r -> list over comp cols of dicts (comp idx of r-1)
        self._acpart = {}   # r -> list over comp cols of full-coord dicts
        for r in self.degrees:
            cols_dq = []
            cols_ac = []
            for i in self.comp[r]:
                s = self.full[r].columns[i]
                if r == 0:
                    cols_dq.append({})
                    cols_ac.append({})
                    continue
                img = cfg.reduce(K.boundary({s: 1}))
                vec = {self.full[r - 1].col_index[t]: Fraction(v)
                       for t, v in img.items()}
                kpart, w = self._split(r - 1, vec)
                cols_dq.append(w)
                cols_ac.append(kpart)
            self._dq[r] = cols_dq
            self._acpart[r] = cols_ac
        # kernels of the quotient differential and the contraction columns,
        # both filled in lazily per degree
        self._zbasis = {}
        self._hcols = {}

    def _split(self, r, vec):
        """Full-coordinate vector -> (admissible part, quotient part).

        The admissible part is returned in full coordinates, the quotient
        part over the complement columns of degree r.
        """
        kcoords = [Fraction(vec.get(i, 0)) for i in self._free_of[r]]
        apart = {}
        rest = dict(vec)
        for coef, avec in zip(kcoords, self._acvec[r]):
            if not coef:
                continue
            for c, v in avec.items():
                nv = apart.get(c, 0) + coef * v
                if nv:
                    apart[c] = nv
                elif c in apart:
                    del apart[c]
                nv = rest.get(c, 0) - coef * v
                if nv:
                    rest[c] = nv
                elif c in rest:
                    del rest[c]
        cidx = self.comp_index[r]
        w = {}
        for c, v in rest.items():
            if c not in cidx:
                raise NoSolution(
                    "complement split failed on column %r" % (c,))
            w[cidx[c]] = v
        return apart, w

    def _kernel_at(self, r):
        if r not in self._zbasis:
            rows = []
            if r:
                rows = [dict() for _ in range(len(self.comp[r - 1]))]
                for j, col in enumerate(self._dq[r]):
                    for t, v in col.items():
                        rows[t][j] = v
            self._zbasis[r] = kernel_basis(rows, len(self.comp[r]))
        return self._zbasis[r]

    def _h_columns(self, r):
        """Contraction of the quotient on the complement units of degree r.

        Batched once per degree: the kernel basis vectors of the quotient
        differential are the right-hand sides of one elimination against
        the next differential restricted to its pivot columns.
        """
        hit = self._hcols.get(r)
        if hit is not None:
            return hit
        zb = self._kernel_at(r)
        table = {t: {} for t in range(len(self.comp[r]))}
        if zb.free_cols:
            if r + 1 not in self._dq:
                raise NoSolution(
                    "the full complex does not retract onto the "
                    "admissible one")
            zb_up = self._kernel_at(r + 1)
            wcols = [j for j in range(len(self.comp[r + 1]))
                     if j not in set(zb_up.free_cols)]
            amat = [dict() for _ in range(len(self.comp[r]))]
            for j_local, j in enumerate(wcols):
                for t, v in self._dq[r + 1][j].items():
                    amat[t][j_local] = v
            rhs = [dict(zb.vectors[pos])
                   for pos in range(len(zb.free_cols))]
            sols = _batch_solve(amat, len(wcols), rhs)
            for pos, t in enumerate(zb.free_cols):
                sol = sols[pos]
                if sol is None:
                    raise NoSolution(
                        "the full complex does not retract onto the "
                        "admissible one")
                table[t] = {wcols[j]: v for j, v in sol.items() if v}
        self._hcols[r] = table
        return table

    def apply(self, r, chain):
        """The projection of a degree-r chain onto the admissible group."""
        full = self.full[r]
        vec = {}
        for s, c in chain.items():
            if not c:
                continue
            i = full.col_index.get(s)
            if i is None:
                raise NotAdmissible(
                    "simplex %r lies outside the chain group" % (s,))
            vec[i] = Fraction(c)
        apart, w = self._split(r, vec)
        if w:
            hcols = self._h_columns(r)
            hw = {}
            for t, coef in w.items():
                if not coef:
                    continue
                for u, v in hcols[t].items():
                    nv = hw.get(u, 0) + coef * v
                    if nv:
                        hw[u] = nv
                    elif u in hw:
                        del hw[u]
            # admissible correction carried by the contraction image
            for u, coef in hw.items():
                if not coef:
                    continue
                for c, v in self._acpart[r + 1][u].items():
                    nv = apart.get(c, 0) - coef * v
                    if nv:
                        apart[c] = nv
                    elif c in apart:
                        del apart[c]
        return {full.columns[c]: v for c, v in apart.items() if v}


# ---------------------------------------------------------------------------
# face lattice nodes and the shared face-map solutions
# ---------------------------------------------------------------------------


_FACE_CACHE = {}
_LATTICE_CACHE = {}
_PROJECTOR_CACHE = {}


def _axis_value_of_position(position):
    axis = position // 2 + 1
    off = position % 2
    if axis % 2 == 1:
        value = "0" if off == 0 else "inf"
    else:
        value = "inf" if off == 0 else "0"
    return axis, value


def thom_face_cache(model, face, variant=0, alternate=False):
    """Shared face-map machinery for one face of one model.

    variant switches the vertex ordering used by the cap product;
    alternate asks for an independently solved intersection cocycle.
    Either choice must induce the same face maps on admissible chains,
    which the test suite asserts.
    """
    key = (model.name, face.name, variant, alternate)
    if key not in _FACE_CACHE:
        _FACE_CACHE[key] = FaceMapCache(
            _solve_face(model, face, variant, alternate))
    return _FACE_CACHE[key]


def _solve_face(model, face, variant, alternate):
    if model.name == "p1xp1":
        base_model = p1_model()
        base_face = base_model.face(1, face.value)
        base = thom_face_cache(base_model, base_face, 0, alternate).data
        return transport_thom(model, face, base, variant)
    data = solve_thom(model, face, variant)
    if alternate:
        data = independent_solution(data)
    return data


class _Node:
    """One face intersection of the lattice with its chain machinery."""

    def __init__(self, key, model):
        self.key = key
        self.model = model
        self.cfg = configuration_of(model)
        self.available = {}   # global face position -> local face object

    def projector(self):
        if self.model.name not in _PROJECTOR_CACHE:
            _PROJECTOR_CACHE[self.model.name] = ChainProjector(self.cfg)
        return _PROJECTOR_CACHE[self.model.name]

    def face_apply(self, position, chain, degree):
        cache = thom_face_cache(self.model, self.available[position])
        return cache.apply_via_matrix(chain, degree)


def lattice_nodes(model):
    """All nonempty face intersections of a model, keyed by the sorted
    tuple of global face positions, with submodels shared along the way."""
    if model.name in _LATTICE_CACHE:
        return _LATTICE_CACHE[model.name]
    root = _Node((), model)
    nodes = {(): root}
    frontier = [root]
    while frontier:
        node = frontier.pop()
        used = {_axis_value_of_position(g)[0] for g in node.key}
        remaining = [a for a in range(1, model.axes + 1) if a not in used]
        for local in node.model.faces:
            g_axis = remaining[local.axis - 1]
            g_pos = face_position(g_axis, local.value)
            node.available[g_pos] = local
            new_key = tuple(sorted(node.key + (g_pos,)))
            child = nodes.get(new_key)
            if child is None:
                child = _Node(new_key, local.submodel)
                nodes[new_key] = child
                frontier.append(child)
            elif child.model is not local.submodel:
                raise NotGoodTriangulation(
                    "face intersections disagree between paths")
    _LATTICE_CACHE[model.name] = nodes
    return nodes


# ---------------------------------------------------------------------------
# the double complex and its total complex
# ---------------------------------------------------------------------------


class FaceDoubleComplex:
    """Total complex of the face double complex of a model.

    flavor "AC" uses the admissible chain groups; flavor "C" uses the full
    relative chain groups, extending the face maps to inadmissible chains
    per face_rule ("projected" precomposes with the chain projection onto
    the admissible subcomplex, "direct" applies the cap formula verbatim).
    Degrees are cohomological: a chain of degree r on an intersection of p
    faces sits in degree 2m - p - r.  For the homology utilities the
    complex is exposed with chain-convention keys (the negated degree).
    """

    def __init__(self, cfg, flavor="AC", face_rule=None):
        if cfg.model is None:
            raise NotGoodTriangulation(
                "building the double complex requires a model-backed "
                "configuration")
        self.cfg = cfg
        self.flavor = flavor
        if face_rule is None:
            face_rule = (config.COMPARISON_FACE_RULE
                         if flavor == "C" else "direct")
        self.face_rule = face_rule
        self.model = cfg.model
        self.m = self.model.axes
        self.nodes = lattice_nodes(self.model)
        self._node_order = sorted(self.nodes, key=lambda t: (len(t), t))
        self.basis = {}
        for key in self._node_order:
            node = self.nodes[key]
            top = 2 * (self.m - len(key))
            for r in range(0, top + 1):
                if flavor == "AC":
                    self.basis[(key, r)] = admissible_chain_basis(
                        node.cfg, r)
                else:
                    self.basis[(key, r)] = full_chain_basis(node.cfg, r)
        self.dims = {}
        self.gens = {}
        self.offsets = {}
        for n in range(0, 2 * self.m + 1):
            gens = []
            for key in self._node_order:
                p = len(key)
                r = 2 * self.m - p - n
                if r < 0 or r > 2 * (self.m - p):
                    continue
                basis = self.basis[(key, r)]
                self.offsets[(key, r)] = len(gens)
                gens.extend((key, r, j) for j in range(len(basis)))
            self.dims[n] = len(gens)
            self.gens[n] = gens
        self.diff = {}
        for n in range(0, 2 * self.m):
            self.diff[-n] = self._assemble(n)
        self.chain_dims = {-n: d for n, d in self.dims.items()}

    def component_chain(self, key, r, j):
        return self.basis[(key, r)].chain(j)

    def _assemble(self, n):
        rows = [dict() for _ in range(self.dims.get(n + 1, 0))]
        for col, (key, r, j) in enumerate(self.gens[n]):
            node = self.nodes[key]
            chain = self.basis[(key, r)].chain(j)
            p = len(key)
            if r >= 1 and (key, r - 1) in self.offsets \
                    and len(self.basis[(key, r - 1)]):
                img = node.cfg.reduce(node.model.complex.boundary(chain))
                if img:
                    self._add(rows, (key, r - 1), img,
                              config.delta_column_sign(p), col)
            if r >= 2:
                source = chain
                if self.flavor == "C" and self.face_rule == "projected":
                    source = node.projector().apply(r, chain)
                for g in sorted(node.available):
                    new_key = tuple(sorted(key + (g,)))
                    tkey = (new_key, r - 2)
                    if tkey not in self.offsets or \
                            not len(self.basis[tkey]):
                        continue
                    img = node.face_apply(g, source, r)
                    img = self.nodes[new_key].cfg.reduce(img)
                    if not img:
                        continue
                    sgn = -1 if new_key.index(g) % 2 else 1
                    self._add(rows, tkey, img, sgn, col)
        return rows

    def _add(self, rows, tkey, img, sgn, col):
        base = self.offsets[tkey]
        coords = self.basis[tkey].coordinates(img)
        for j, v in coords.items():
            cur = rows[base + j].get(col, 0) + sgn * v
            if cur:
                rows[base + j][col] = cur
            elif col in rows[base + j]:
                del rows[base + j][col]


class TotalComplex:
    """A bounded cochain complex with named generators."""

    def __init__(self, dims, chain_dims, diff, gens):
        self.dims = dims
        self.chain_dims = chain_dims
        self.diff = diff
        self.gens = gens

    def cohomology_ranks(self):
        ranks = betti_numbers(self.chain_dims, self.diff)
        return {n: ranks[-n] for n in self.dims}

    def is_complex(self):
        return check_differential(self.chain_dims, self.diff)


def build_ac_double_complex(cfg):
    """The admissible face double complex of a configuration."""
    return FaceDoubleComplex(cfg, flavor="AC")


def comparison_complex(cfg):
    """The same double complex over the full relative chain groups."""
    return FaceDoubleComplex(cfg, flavor="C")


def total_complex(dc):
    """The total cochain complex of a built double complex."""
    return TotalComplex(dc.dims, dc.chain_dims, dc.diff, dc.gens)


def inclusion_rows(ac, cc):
    """Chain-convention matrices of the inclusion of the admissible
    complex into the comparison complex."""
    out = {}
    for n, gens in ac.gens.items():
        rows = [dict() for _ in range(cc.dims.get(n, 0))]
        for col, (key, r, j) in enumerate(gens):
            chain = ac.basis[(key, r)].chain(j)
            coords = cc.basis[(key, r)].coordinates(chain)
            base = cc.offsets[(key, r)]
            for jj, v in coords.items():
                rows[base + jj][col] = v
        out[-n] = rows
    return out


def _transpose(rows, ncols):
    """Row-indexed sparse matrix -> column-indexed."""
    cols = [dict() for _ in range(ncols)]
    for i, row in enumerate(rows):
        for c, v in row.items():
            if v:
                cols[c][i] = v
    return cols


def _compose_columns(first_cols, second_cols):
    """Columns of (second o first), both given column-indexed."""
    out = []
    for col in first_cols:
        acc = {}
        for mid, v in col.items():
            for i, u in second_cols[mid].items():
                cur = acc.get(i, 0) + v * u
                if cur:
                    acc[i] = cur
                elif i in acc:
                    del acc[i]
        out.append(acc)
    return out


def is_chain_map(ac, cc, f_rows):
    """Exact check that the inclusion commutes with the differentials."""
    for n in sorted(ac.dims):
        if n + 1 not in ac.dims:
            continue
        d_ac = _transpose(ac.diff.get(-n, []), ac.dims[n])
        d_cc = _transpose(cc.diff.get(-n, []), cc.dims[n])
        f_here = _transpose(f_rows.get(-n, []), ac.dims[n])
        f_next = _transpose(f_rows.get(-(n + 1), []), ac.dims[n + 1])
        if _compose_columns(d_ac, f_next) != _compose_columns(f_here, d_cc):
            return False
    return True


def quasi_isomorphism_report(model):
    """Build both complexes, check the inclusion, and compare cohomology.

    Returns a dict with the cohomology ranks of both complexes, whether
    both differentials square to zero, whether the inclusion is a chain
    map, and whether its mapping cone is exact (the inclusion then being
    invertible on cohomology).
    """
    cfg = configuration_of(model)
    ac = build_ac_double_complex(cfg)
    cc = comparison_complex(cfg)
    f = inclusion_rows(ac, cc)
    report = {
        "model": model.name,
        "ac_dims": dict(ac.dims),
        "c_dims": dict(cc.dims),
        "ac_square_zero": check_differential(ac.chain_dims, ac.diff),
        "c_square_zero": check_differential(cc.chain_dims, cc.diff),
        "chain_map": is_chain_map(ac, cc, f),
    }
    ranks_ac = betti_numbers(ac.chain_dims, ac.diff)
    ranks_c = betti_numbers(cc.chain_dims, cc.diff)
    report["ac_ranks"] = {n: ranks_ac[-n] for n in ac.dims}
    report["c_ranks"] = {n: ranks_c[-n] for n in cc.dims}
    dims, diff = mapping_cone(
        ac.chain_dims, ac.diff, cc.chain_dims, cc.diff, f)
    report["cone_exact"] = complex_is_exact(dims, diff)
    report["quasi_isomorphism"] = (
        report["ac_square_zero"] and report["c_square_zero"]
        and report["chain_map"] and report["cone_exact"])
    return report


def cohomology_report(model):
    """Rank/torsion rows for both complexes in the report shape."""
    cfg = configuration_of(model)
    out = []
    ac = build_ac_double_complex(cfg)
    ranks = betti_numbers(ac.chain_dims, ac.diff)
    for n in sorted(ac.dims):
        out.append({"degree": n, "rank": ranks[-n],
                    "torsion": [], "source": "AC"})
    cc = comparison_complex(cfg)
    cranks = betti_numbers(cc.chain_dims, cc.diff)
    for n in sorted(cc.dims):
        out.append({"degree": n, "rank": cranks[-n],
                    "torsion": _torsion_at(cc, n), "source": "C"})
    return out


def _torsion_at(cc, n):
    """Torsion of the comparison cohomology in one degree."""
    rows = cc.diff.get(-(n - 1))
    if not rows:
        return []
    int_rows = []
    for row in rows:
        out = {}
        for c, v in row.items():
            f = Fraction(v)
            if f.denominator != 1:
                raise NotAdmissible(
                    "comparison differential is not integral; torsion "
                    "is not defined")
            out[c] = int(f)
        int_rows.append(out)
    factors = invariant_factors(int_rows, cc.dims.get(n - 1, 0))
    return [f for f in factors if f not in (0, 1)]


def relative_cohomology_report(model, rel="H"):
    """Integer cohomology of the model relative to a face subcomplex.

    The quotient always removes the degenerate locus; rel names what
    else is removed: "H" for the whole face divisor, or one face by
    name.  Ranks come from the quotient chain complex over the
    integers; torsion in degree j is reported from the invariant
    factors one degree below, as the universal coefficients shift
    dictates.
    """
    K = model.complex
    removed = set(model.D)
    if rel == "H":
        faces = list(model.faces)
    else:
        faces = [model.face_by_name(rel)]
    for f in faces:
        removed |= f.simplices
    kept = {k: [s for s in K.simplices(k) if s not in removed]
            for k in range(K.dim() + 1)}
    index = {k: {s: i for i, s in enumerate(v)} for k, v in kept.items()}
    dims = {k: len(v) for k, v in kept.items()}
    diff = {}
    for k in range(1, K.dim() + 1):
        rows = [dict() for _ in range(dims.get(k - 1, 0))]
        for col, s in enumerate(kept[k]):
            for t, c in K.simplex_boundary(s).items():
                i = index[k - 1].get(t)
                if i is not None and c:
                    rows[i][col] = rows[i].get(col, 0) + c
        diff[k] = rows
    betti = betti_numbers(dims, diff)
    torsion = {k: [f for f in invariant_factors(diff.get(k + 1, []),
                                                dims.get(k + 1, 0))
                   if f not in (0, 1)]
               for k in dims}
    rows_out = []
    for k in sorted(dims):
        rows_out.append({"degree": k, "rank": betti[k],
                         "torsion": torsion.get(k - 1, [])})
    return {"model": model.name,
            "relative_to": [f.name for f in faces],
            "rows": rows_out}


# ---------------------------------------------------------------------------
# admissible test chains and the face-map commutation check
# ---------------------------------------------------------------------------


def random_admissible_chains(model, count, rng):
    """Random nonzero boundary-admissible chains of varied degrees.

    Integer combinations of the admissible basis chains with denominators
    cleared, so every sample is an honest integral chain of the group.
    """
    cfg = configuration_of(model)
    degrees = [r for r in range(0, model.complex.dim() + 1)
               if len(admissible_chain_basis(cfg, r))]
    out = []
    while len(out) < count:
        r = degrees[rng.randrange(len(degrees))]
        basis = admissible_chain_basis(cfg, r)
        chain = {}
        for j in range(len(basis)):
            c = rng.randrange(-2, 3)
            if not c:
                continue
            for s, v in basis.chain(j).items():
                nv = chain.get(s, 0) + c * v
                if nv:
                    chain[s] = nv
                elif s in chain:
                    del chain[s]
        if not chain:
            continue
        denom = math.lcm(*(Fraction(v).denominator
                           for v in chain.values()))
        chain = {s: int(Fraction(v) * denom) for s, v in chain.items()}
        out.append((r, chain))
    return out


def face_map_commutation_check(model, position_a, position_b, chain):
    """Both orders of two face maps applied to one admissible chain.

    Returns a report dict; raises NotAdmissible when the two faces lie on
    the same axis (their intersection is empty, so the composites do not
    exist) or when the chain is not boundary-admissible.
    """
    axis_a, _ = _axis_value_of_position(position_a)
    axis_b, _ = _axis_value_of_position(position_b)
    if axis_a == axis_b:
        raise NotAdmissible(
            "faces on one axis do not meet properly; the composite face "
            "maps are undefined")
    nodes = lattice_nodes(model)
    root = nodes[()]
    if not is_delta_admissible(chain, root.cfg):
        raise NotAdmissible("chain is not boundary-admissible")
    if not chain:
        return {"equal": True, "first": {}, "second": {}}
    degree = max(len(s) for s in chain) - 1
    if any(len(s) - 1 != degree for s in chain):
        raise NotAdmissible("commutation check expects a homogeneous chain")
    if degree < 4:
        # both composites land in negative degree
        return {"equal": True, "first": {}, "second": {}}

    def composite(first, second):
        mid = root.face_apply(first, chain, degree)
        mid = nodes[(first,)].cfg.reduce(mid)
        out = nodes[(first,)].face_apply(second, mid, degree - 2)
        target = tuple(sorted((first, second)))
        return nodes[target].cfg.reduce(out)

    one = composite(position_b, position_a)
    two = composite(position_a, position_b)
    equal = {s: v for s, v in one.items() if v} == \
        {s: v for s, v in two.items() if v}
    return {"equal": equal, "first": one, "second": two}
