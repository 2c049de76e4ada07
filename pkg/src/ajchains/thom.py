"""Intersection face maps via cap products with supported cocycles.

For a model X and a coordinate face L of complex codimension c, the face
map sends a k-chain on X to a (k-2c)-chain on L: subdivide X relative to L
and everything disjoint from L, cap with an integer cocycle T that is
closed, vanishes on simplexes disjoint from L, and caps the fundamental
cycle of X to the fundamental cycle of L up to a boundary supported near L.
With a vertex ordering that keeps L on top, the cap of any T-weighted front
face lands on simplexes of L itself, so the result restricts to the face's
canonical lower model.

Two constructions are provided: a direct integer solve of the defining
equations, and transport of an already-solved cocycle through the axis
projection of a product model (verified against the defining equations,
with the near-L correction chain recovered by a support-local solve).
"""

from .errors import NoSolution, NotChainMap, NotSubcomplex
from .homology import IntegerSystem
from .simplicial import (
    Subdivision,
    cap_product,
    chain_add,
    check_good_ordering,
    good_ordering,
    regular_neighborhood,
    simplicial_complement,
    support,
    vertices_of,
)


class ThomData:
    """A solved face-map kernel: subdivision, ordering, cocycle, correction."""

    def __init__(self, model, face, subdivision, ordering, T, s, eta, mu):
        self.model = model
        self.face = face
        self.codim = face.codim
        self.subdivision = subdivision
        self.ordering = ordering
        self.T = {k: v for k, v in T.items() if v}
        self.s = {k: v for k, v in s.items() if v}
        self.eta = eta
        self.mu = mu

    def verify(self):
        K2 = self.subdivision.complex
        p = 2 * self.codim
        Lverts = vertices_of(self.face.simplices)
        for simplex in self.T:
            if not Lverts.intersection(simplex):
                raise NotChainMap(
                    "cocycle has weight away from the face")
        if self.model.complex.dim() >= p + 1:
            if K2.coboundary(self.T, p):
                raise NotChainMap("cocycle is not closed")
        capped = cap_product(K2, self.T, p, self.eta, self.ordering)
        residual = chain_add(capped, self.mu, scale=-1)
        if residual != K2.boundary(self.s):
            raise NotChainMap(
                "cap against the fundamental cycle misses its target")
        N = regular_neighborhood(K2, self.face.simplices)
        for simplex in self.s:
            if simplex not in N:
                raise NotSubcomplex(
                    "correction chain leaves the face neighborhood")
        return True

    def face_map(self, chain):
        """k-chain on the model -> (k - 2 codim)-chain on the face submodel."""
        K2 = self.subdivision.complex
        lam = self.subdivision.lam_chain(chain)
        capped = cap_product(
            K2, self.T, 2 * self.codim, lam, self.ordering)
        for s in capped:
            if s not in self.face.simplices:
                raise NotChainMap(
                    "cap escaped the face on %r" % (s,))
        return self.face.restrict(capped)


def _prepare(model, face, variant):
    K = model.complex
    L = face.simplices
    M = set(L) | simplicial_complement(K, L)
    sd = Subdivision(K, M)
    K2 = sd.complex
    ordering = good_ordering(K2, L, variant)
    check_good_ordering(K2, L, ordering)
    eta = sd.lam_chain(model.fundamental)
    mu = face.embed(face.submodel.fundamental)
    return sd, K2, ordering, eta, mu


def solve_thom(model, face, variant=0):
    """Direct integer solve of the face-cocycle equations."""
    sd, K2, ordering, eta, mu = _prepare(model, face, variant)
    L = face.simplices
    Lverts = vertices_of(L)
    c = face.codim
    m = model.axes
    N = regular_neighborhood(K2, L)

    t_basis = [s for s in K2.simplices(2 * c)
               if Lverts.intersection(s)]
    s_dim = 2 * (m - c) + 1
    s_basis = [s for s in K2.simplices(s_dim) if s in N]
    col = {}
    for s in t_basis:
        col[("T", s)] = len(col)
    for s in s_basis:
        col[("s", s)] = len(col)

    rows = []
    rhs = []
    row_index = {}

    def row_for(key):
        if key not in row_index:
            row_index[key] = len(rows)
            rows.append({})
            rhs.append(0)
        return row_index[key]

    # Closedness on every (2c+1)-simplex that can see the face.
    for tau in K2.simplices(2 * c + 1):
        if not Lverts.intersection(tau):
            continue
        r = row_for(("d", tau))
        for i in range(len(tau)):
            f = tau[:i] + tau[i + 1:]
            key = ("T", f)
            if key in col:
                j = col[key]
                rows[r][j] = rows[r].get(j, 0) + (-1) ** i
    # Cap condition on every 2(m-c)-simplex of the neighborhood.
    for rho in K2.simplices(2 * (m - c)):
        if rho in N:
            r = row_for(("cap", rho))
            rhs[r] = mu.get(rho, 0)
    for sigma, e in eta.items():
        t, osgn = ordering.sort_simplex(sigma)
        front = t[: 2 * c + 1]
        back = t[2 * c:]
        fc, fs = K2.canon(front)
        key = ("T", fc)
        if key not in col:
            continue
        bc, bs = K2.canon(back)
        r = row_for(("cap", bc))
        j = col[key]
        rows[r][j] = rows[r].get(j, 0) + e * osgn * fs * bs
    for s_simplex in s_basis:
        j = col[("s", s_simplex)]
        for f, coef in K2.boundary({s_simplex: 1}).items():
            r = row_for(("cap", f))
            rows[r][j] = rows[r].get(j, 0) - coef

    system = IntegerSystem(rows, len(col), rhs)
    x = system.solve()
    T = {}
    s_chain = {}
    for key, j in col.items():
        v = x.get(j, 0)
        if not v:
            continue
        if key[0] == "T":
            T[key[1]] = v
        else:
            s_chain[key[1]] = v
    data = ThomData(model, face, sd, ordering, T, s_chain, eta, mu)
    data.verify()
    data._system = system
    data._columns = col
    return data


def independent_solution(data):
    """A second solution of the same system, differing in the cocycle."""
    system = getattr(data, "_system", None)
    if system is None:
        raise NoSolution("no solved system attached")
    col = data._columns
    kernels = system.kernel_elements()
    chosen = None
    t_cols = {j for key, j in col.items() if key[0] == "T"}
    for vec in kernels:
        if any(j in t_cols for j in vec):
            chosen = vec
            break
    if chosen is None:
        for vec in kernels:
            if vec:
                chosen = vec
                break
    if chosen is None:
        raise NoSolution("solution space is rigid; no second cocycle")
    T = dict(data.T)
    s_chain = dict(data.s)
    for key, j in col.items():
        v = chosen.get(j, 0)
        if not v:
            continue
        if key[0] == "T":
            T[key[1]] = T.get(key[1], 0) + v
        else:
            s_chain[key[1]] = s_chain.get(key[1], 0) + v
    out = ThomData(data.model, data.face, data.subdivision, data.ordering,
                   T, s_chain, data.eta, data.mu)
    out.verify()
    return out


def transport_thom(model, face, base_data, variant=0):
    """Pull the cocycle of the one-axis model back through the axis map.

    The subdivided product maps simplicially onto the subdivided line of
    the face's axis: original vertices go to their component on that axis,
    and the barycenter of a starred product simplex goes to the barycenter
    of its (always starred) component image. The pulled-back cochain is
    closed and supported near the face for free; the cap normalization is
    then verified by solving for the near-face correction chain.
    """
    sd, K2, ordering, eta, mu = _prepare(model, face, variant)
    comp = face.axis - 1
    base_sd = base_data.subdivision
    base_K2 = base_sd.complex

    def project_vertex(v):
        if isinstance(v, tuple) and len(v) == 2 and v[0] == "b":
            sigma = v[1]
            img = {u[comp] for u in sigma}
            canon, _ = base_data.model.complex.canon(img)
            return ("b", canon)
        return v[comp]

    p = 2 * face.codim
    Lverts = vertices_of(face.simplices)
    T = {}
    for simplex in K2.simplices(p):
        if not Lverts.intersection(simplex):
            continue
        images = [project_vertex(v) for v in simplex]
        if len(set(images)) != len(images):
            continue
        canon, sgn = base_K2.canon(images)
        val = base_data.T.get(canon, 0)
        if val:
            T[simplex] = sgn * val
    if K2.coboundary(T, p):
        raise NotChainMap("transported cochain failed to stay closed")
    capped = cap_product(K2, T, p, eta, ordering)
    residual = chain_add(capped, mu, scale=-1)
    s_chain = _local_boundary_solve(
        K2, residual, face.simplices, 2 * (model.axes - face.codim) + 1)
    data = ThomData(model, face, sd, ordering, T, s_chain, eta, mu)
    data.verify()
    return data


def _local_boundary_solve(K2, target, L, s_dim):
    """Chain s of the given dimension with boundary == target, support in N.

    Starts from the simplexes nearest the target's support and widens to
    the full face neighborhood before giving up.
    """
    if not target:
        return {}
    N = regular_neighborhood(K2, L)
    candidates = [s for s in K2.simplices(s_dim) if s in N]
    sup_verts = vertices_of(support(K2, target))
    region = {s for s in candidates if sup_verts.intersection(s)}
    for _ in range(4):
        s_chain = _try_boundary_solve(K2, target, sorted(region))
        if s_chain is not None:
            return s_chain
        verts = vertices_of(region) | sup_verts
        bigger = {s for s in candidates if verts.intersection(s)}
        if bigger == region:
            break
        region = bigger
    s_chain = _try_boundary_solve(K2, target, candidates)
    if s_chain is None:
        raise NoSolution("no integral correction chain in the neighborhood")
    return s_chain


def _try_boundary_solve(K2, target, basis):
    rows_keys = set(target)
    boundaries = {}
    for s in basis:
        boundaries[s] = K2.boundary({s: 1})
        rows_keys.update(boundaries[s])
    row_index = {key: i for i, key in enumerate(sorted(rows_keys))}
    rows = [{} for _ in row_index]
    rhs = [0] * len(row_index)
    for key, c in target.items():
        rhs[row_index[key]] = c
    for j, s in enumerate(basis):
        for f, coef in boundaries[s].items():
            r = row_index[f]
            rows[r][j] = rows[r].get(j, 0) + coef
    try:
        x = IntegerSystem(rows, len(basis), rhs).solve()
    except NoSolution:
        return None
    return {basis[j]: v for j, v in
            ((j, x.get(j, 0)) for j in range(len(basis))) if v}


class FaceMapCache:
    """Frozen matrices of a face map per chain degree."""

    def __init__(self, thom_data):
        self.data = thom_data
        self._matrices = {}

    def chain_map(self, chain):
        return self.data.face_map(chain)

    def matrix(self, k):
        """Rows of the map C_k(model) -> C_(k-2c)(submodel), cached."""
        if k in self._matrices:
            return self._matrices[k]
        model = self.data.model
        sub = self.data.face.submodel
        out_dim = k - 2 * self.data.codim
        domain = model.complex.simplices(k)
        codomain = sub.complex.simplices(out_dim)
        codomain_index = {s: i for i, s in enumerate(codomain)}
        columns = []
        for s in domain:
            img = self.data.face_map({s: 1})
            columns.append({codomain_index[t]: v for t, v in img.items()})
        self._matrices[k] = (domain, codomain, columns)
        return self._matrices[k]

    def apply_via_matrix(self, chain, k):
        domain, codomain, columns = self.matrix(k)
        dindex = {s: i for i, s in enumerate(domain)}
        out = {}
        for s, c in chain.items():
            if not c:
                continue
            for r, v in columns[dindex[s]].items():
                acc = out.get(r, 0) + c * v
                if acc:
                    out[r] = acc
                elif r in out:
                    del out[r]
        return {codomain[r]: v for r, v in out.items()}
