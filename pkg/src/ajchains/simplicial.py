"""Finite simplicial complexes with exact chain/cochain algebra.

Vertices are arbitrary hashable objects. Each complex fixes a canonical
vertex order (first appearance) and stores every simplex as a tuple sorted
by that order, so chains are plain dicts mapping simplex tuples to integer
or Fraction coefficients. All arithmetic is exact.

The module provides face closure, subcomplex predicates (fullness,
complements, regular neighborhoods), relative barycentric subdivision with
its subdivision chain operator, staircase product triangulations for
partially ordered vertex sets, orderings suitable for cap products, the cap
product itself, and fundamental cycles via orientation propagation.
"""

from fractions import Fraction

from .errors import (
    BadIntersection,
    NonClosedTag,
    NotAComplex,
    NotChainMap,
    NotGoodTriangulation,
    NotOrientable,
    NotPseudomanifold,
    NotSubcomplex,
)


def _parity_sort(verts, keyfun):
    """Sort verts by keyfun, returning (tuple, sign of the permutation).

    Raises NotAComplex on repeated keys (degenerate simplex).
    """
    items = list(verts)
    keys = [keyfun(v) for v in items]
    if len(set(keys)) != len(keys):
        raise NotAComplex("repeated vertex in simplex %r" % (items,))
    order = sorted(range(len(items)), key=lambda i: keys[i])
    sign = 1
    seen = [False] * len(order)
    for i in range(len(order)):
        if seen[i]:
            continue
        j = i
        clen = 0
        while not seen[j]:
            seen[j] = True
            j = order[j]
            clen += 1
        if clen % 2 == 0:
            sign = -sign
    return tuple(items[i] for i in order), sign


def face_closure(simplices):
    """All faces of the given vertex-tuples, as a set of frozensets."""
    out = set()
    stack = [frozenset(s) for s in simplices]
    while stack:
        s = stack.pop()
        if s in out or not s:
            continue
        out.add(s)
        if len(s) > 1:
            for v in s:
                stack.append(s - {v})
    return out


class Complex:
    """A finite simplicial complex given by its top simplexes.

    top_simplices: iterable of vertex iterables. coords: optional dict
    vertex -> tuple of numbers; when present, degenerate geometry raises
    BadIntersection.
    """

    def __init__(self, top_simplices, coords=None, vertex_order=None):
        tops = [tuple(s) for s in top_simplices]
        if not tops:
            raise NotAComplex("no simplexes given")
        self.vertices = []
        self.vkey = {}
        for v in vertex_order or ():
            if v not in self.vkey:
                self.vkey[v] = len(self.vertices)
                self.vertices.append(v)
        for s in tops:
            if len(set(s)) != len(s):
                raise NotAComplex("repeated vertex in simplex %r" % (s,))
            for v in s:
                if v not in self.vkey:
                    self.vkey[v] = len(self.vertices)
                    self.vertices.append(v)
        closed = face_closure(tops)
        by_dim = {}
        for fs in closed:
            t = tuple(sorted(fs, key=self.vkey.__getitem__))
            by_dim.setdefault(len(t) - 1, []).append(t)
        self.by_dim = {
            k: sorted(v, key=lambda s: tuple(self.vkey[x] for x in s))
            for k, v in by_dim.items()
        }
        self.simplex_set = set()
        self.index = {}
        for k, lst in self.by_dim.items():
            for i, s in enumerate(lst):
                self.simplex_set.add(s)
                self.index[s] = i
        self.coords = dict(coords) if coords else None
        if self.coords is not None:
            self._check_geometry()

    def _check_geometry(self):
        seen = {}
        for v in self.vertices:
            if v not in self.coords:
                raise BadIntersection("vertex %r has no coordinates" % (v,))
            c = tuple(self.coords[v])
            if c in seen:
                raise BadIntersection(
                    "vertices %r and %r share coordinates" % (seen[c], v))
            seen[c] = v
        for s in self.simplices(self.dim()):
            pts = [self.coords[v] for v in s]
            base = pts[0]
            rows = [[Fraction(x) - Fraction(b) for x, b in zip(p, base)]
                    for p in pts[1:]]
            if _rank_rows(rows) != len(rows):
                raise BadIntersection(
                    "simplex %r is affinely degenerate" % (s,))

    def dim(self):
        return max(self.by_dim)

    def simplices(self, k=None):
        if k is None:
            out = []
            for kk in sorted(self.by_dim):
                out.extend(self.by_dim[kk])
            return out
        return self.by_dim.get(k, [])

    def has(self, simplex):
        return tuple(simplex) in self.simplex_set

    def canon(self, verts):
        """Canonical tuple and permutation sign for a vertex collection."""
        return _parity_sort(verts, self.vkey.__getitem__)

    def size(self):
        return len(self.simplex_set)

    def euler_characteristic(self):
        return sum(
            (-1) ** k * len(v) for k, v in self.by_dim.items())

    def boundary(self, chain):
        """Boundary of a chain (dict simplex -> coefficient)."""
        out = {}
        for s, c in chain.items():
            if len(s) == 1:
                continue
            for i in range(len(s)):
                f = s[:i] + s[i + 1:]
                coef = out.get(f, 0) + (-1) ** i * c
                if coef:
                    out[f] = coef
                elif f in out:
                    del out[f]
        return out

    def simplex_boundary(self, s):
        return self.boundary({tuple(s): 1})

    def coboundary(self, u, k):
        """Coboundary of a cochain on k-simplexes, as a dict on (k+1)-simplexes."""
        out = {}
        for t in self.simplices(k + 1):
            acc = 0
            for i in range(len(t)):
                f = t[:i] + t[i + 1:]
                val = u.get(f)
                if val:
                    acc += (-1) ** i * val
            if acc:
                out[t] = acc
        return out

    def star(self, simplexes):
        """Closed star: all faces of simplexes meeting the given set."""
        targets = set(map(tuple, simplexes))
        verts = set()
        for s in targets:
            verts.update(s)
        meeting = [s for s in self.simplices() if verts.intersection(s)]
        return subcomplex_closure(meeting)


def _rank_rows(rows):
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    col = 0
    r = 0
    while r < len(rows) and col < ncols:
        piv = None
        for i in range(r, len(rows)):
            if rows[i][col] != 0:
                piv = i
                break
        if piv is None:
            col += 1
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(r + 1, len(rows)):
            if rows[i][col]:
                f = Fraction(rows[i][col], 1) / rows[r][col]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        r += 1
        rank += 1
        col += 1
    return rank


def subcomplex_closure(simplices):
    """Face closure returning a set of canonical-length tuples (any order)."""
    return {tuple(s) for s in _closure_tuples(simplices)}


def _closure_tuples(simplices):
    out = set()
    stack = [tuple(s) for s in simplices]
    while stack:
        s = stack.pop()
        if s in out or not s:
            continue
        out.add(s)
        if len(s) > 1:
            for i in range(len(s)):
                stack.append(s[:i] + s[i + 1:])
    return out


def is_subcomplex(K, L):
    """L: iterable of simplex tuples. True when face-closed and inside K."""
    Ls = set(map(tuple, L))
    for s in Ls:
        if s not in K.simplex_set:
            return False
        for i in range(len(s)):
            if len(s) > 1 and s[:i] + s[i + 1:] not in Ls:
                return False
    return True


def check_subcomplex(K, L, what="set"):
    if not is_subcomplex(K, L):
        raise NonClosedTag("%s is not a subcomplex" % what)
    return set(map(tuple, L))


def vertices_of(simplices):
    out = set()
    for s in simplices:
        out.update(s)
    return out


def full_subcomplex(K, vertex_set):
    """All simplexes of K whose vertices lie in vertex_set."""
    vs = set(vertex_set)
    return {s for s in K.simplex_set if vs.issuperset(s)}


def is_full(K, L):
    """True when L equals the full subcomplex on its vertex set."""
    Ls = set(map(tuple, L))
    if not is_subcomplex(K, Ls):
        raise NotSubcomplex("fullness asked of a non-subcomplex")
    return full_subcomplex(K, vertices_of(Ls)) == Ls


def require_full(K, L, what="subcomplex"):
    from .errors import NotFull

    if not is_full(K, L):
        raise NotFull("%s is not full" % what)
    return True


def simplicial_complement(K, L):
    """C(L, K): simplexes of K not meeting the vertex set of L."""
    vs = vertices_of(L)
    return {s for s in K.simplex_set if not vs.intersection(s)}


def regular_neighborhood(K, L):
    """N(L, K): faces of the simplexes of K that meet L."""
    vs = vertices_of(L)
    meeting = [s for s in K.simplex_set if vs.intersection(s)]
    return subcomplex_closure(meeting)


def neighborhood_boundary(K, L):
    """The part of N(L, K) not meeting L."""
    return regular_neighborhood(K, L) & simplicial_complement(K, L)


def support(K, chain):
    """Face closure of the simplexes carrying a nonzero coefficient."""
    return subcomplex_closure([s for s, c in chain.items() if c])


class Subdivision:
    """Derived subdivision of K relative to a kept subcomplex M.

    Every simplex of K outside M is starred at a fresh barycenter vertex
    ('b', simplex), in increasing dimension. Exposes the subdivided complex,
    the carrier map, and the subdivision chain operator lam (a chain map
    C(K) -> C(K') that is the identity on M).
    """

    def __init__(self, K, M=None):
        self.base = K
        keep = set(map(tuple, M)) if M is not None else set()
        if keep and not is_subcomplex(K, keep):
            raise NotSubcomplex("relative subdivision needs a subcomplex")
        self.kept = keep
        self._pieces = {}
        new_vertex_list = []
        for v in K.vertices:
            self._pieces[(v,)] = [((v,), 1)]
        for k in range(1, K.dim() + 1):
            for s in K.simplices(k):
                if s in keep:
                    self._pieces[s] = [(s, 1)]
                    continue
                b = ("b", s)
                new_vertex_list.append(b)
                pieces = []
                bchain = K.simplex_boundary(s)
                for f, c in bchain.items():
                    for piece, pc in self._pieces[f]:
                        pieces.append(((b,) + piece, c * pc))
                self._pieces[s] = pieces
        facelike = _faces_of_any(K)
        tops = []
        for k in range(K.dim() + 1):
            for s in K.simplices(k):
                if s in facelike:
                    continue
                tops.extend(p for p, _ in self._pieces[s])
        self.complex = Complex(
            tops, vertex_order=list(K.vertices) + new_vertex_list)
        self._lam_cache = {}

    def new_vertices(self):
        return [v for v in self.complex.vertices if v not in self.base.vkey]

    def carrier_vertex(self, v):
        if isinstance(v, tuple) and len(v) == 2 and v[0] == "b":
            return v[1]
        return (v,)

    def carrier(self, s):
        """Smallest simplex of the base complex containing new simplex s."""
        verts = set()
        for v in s:
            verts.update(self.carrier_vertex(v))
        cand, _ = self.base.canon(verts)
        if cand not in self.base.simplex_set:
            raise NotSubcomplex("carrier of %r is not a base simplex" % (s,))
        return cand

    def lam(self, s):
        """Subdivision chain of a base simplex, in K' canonical orientation."""
        s = tuple(s)
        if s in self._lam_cache:
            return self._lam_cache[s]
        if s not in self.base.simplex_set:
            raise NotSubcomplex("%r is not a simplex of the base" % (s,))
        out = {}
        for piece, c in self._pieces[s]:
            canon, sign = self.complex.canon(piece)
            out[canon] = out.get(canon, 0) + c * sign
        out = {k: v for k, v in out.items() if v}
        self._lam_cache[s] = out
        return out

    def lam_chain(self, chain):
        out = {}
        for s, c in chain.items():
            for t, d in self.lam(s).items():
                coef = out.get(t, 0) + c * d
                if coef:
                    out[t] = coef
                elif t in out:
                    del out[t]
        return out

    def check_chain_map(self, chain):
        """Verify boundary(lam(chain)) == lam(boundary(chain))."""
        lhs = self.complex.boundary(self.lam_chain(chain))
        rhs = self.lam_chain(self.base.boundary(chain))
        if lhs != rhs:
            raise NotChainMap("subdivision operator fails on %r" % (chain,))
        return True


def _faces_of_any(K):
    """Simplexes of K that are proper faces of a higher simplex."""
    out = set()
    for k in range(1, K.dim() + 1):
        for s in K.simplices(k):
            for i in range(len(s)):
                out.add(s[:i] + s[i + 1:])
    return out


def barycentric_subdivision(K):
    return Subdivision(K, set())


def barycentric_subdivision_mod(K, M):
    return Subdivision(K, M)


class Ordering:
    """A vertex ordering usable for cap products.

    rank: dict vertex -> comparable; vertices with equal rank are treated
    as incomparable (allowed only when they never share a simplex).
    tiebreak: dict vertex -> distinct comparable, used to sort within a
    simplex; must refine rank on each simplex.
    """

    def __init__(self, rank, tiebreak=None):
        self.rank = dict(rank)
        self.tiebreak = dict(tiebreak) if tiebreak else None

    def key(self, v):
        if self.tiebreak is not None:
            return (self.rank[v], self.tiebreak[v])
        return self.rank[v]

    def sort_simplex(self, s):
        """(sorted tuple, permutation sign); raises on incomparable pairs."""
        t, sign = _parity_sort(s, self.key)
        for a, b in zip(t, t[1:]):
            if self.rank[a] == self.rank[b] and self.tiebreak is None:
                raise NotAComplex(
                    "ordering not total on simplex %r" % (s,))
        return t, sign

    def leq(self, a, b):
        return a == b or self.rank[a] < self.rank[b]


def good_ordering(K, L, variant=0):
    """An ordering of K total on every simplex with the vertices of L on top.

    variant selects the tie-break enumeration so independent orderings can
    be produced for invariance tests.
    """
    Lverts = vertices_of(L)
    base = list(K.vertices)
    if variant % 2 == 1:
        base = base[::-1]
    rank = {}
    tiebreak = {}
    for i, v in enumerate(base):
        rank[v] = (1 if v in Lverts else 0, 0)
        tiebreak[v] = i
    return Ordering({v: rank[v] for v in rank}, tiebreak)


def check_good_ordering(K, L, ordering):
    """Total on each simplex and L upward closed along the order."""
    Lverts = vertices_of(L)
    for s in K.simplices():
        t, _ = ordering.sort_simplex(s)
        seen_l = False
        for v in t:
            if v in Lverts:
                seen_l = True
            elif seen_l:
                raise NotGoodTriangulation(
                    "ordering drops below the kept vertices on %r" % (s,))
    return True


def cap_product(K, u, p, chain, ordering):
    """Cap of a p-cochain with a chain, front/back split along ordering.

    u maps canonical simplex tuples of K to integers. For each k-simplex of
    the chain written in ordering order [v_0 .. v_k], the result accumulates
    u([v_0 .. v_p]) * [v_p .. v_k], everything re-expressed canonically.
    """
    out = {}
    for s, c in chain.items():
        k = len(s) - 1
        if k < p:
            continue
        t, osgn = ordering.sort_simplex(s)
        front = t[: p + 1]
        back = t[p:]
        fc, fs = K.canon(front)
        val = u.get(fc, 0)
        if not val:
            continue
        bc, bs = K.canon(back)
        coef = c * osgn * fs * bs * val
        acc = out.get(bc, 0) + coef
        if acc:
            out[bc] = acc
        elif bc in out:
            del out[bc]
    return out


def fundamental_cycle(K, relative=False, seed=None):
    """Orient the top simplexes coherently by propagation.

    Returns a chain on top simplexes with coefficients +-1 such that the
    boundary vanishes (or, when relative=True, is supported on facets
    belonging to only one top simplex). Raises NotPseudomanifold when a
    facet bounds more than two top simplexes or (non-relative) exactly one;
    NotOrientable when propagation is inconsistent.
    """
    d = K.dim()
    tops = K.simplices(d)
    by_facet = {}
    for s in tops:
        for i in range(len(s)):
            f = s[:i] + s[i + 1:]
            by_facet.setdefault(f, []).append((s, (-1) ** i))
    boundary_facets = set()
    for f, owners in by_facet.items():
        if len(owners) > 2:
            raise NotPseudomanifold(
                "facet %r lies in %d top simplexes" % (f, len(owners)))
        if len(owners) == 1:
            if not relative:
                raise NotPseudomanifold(
                    "facet %r lies in a single top simplex" % (f,))
            boundary_facets.add(f)
    sign = {}
    start = tuple(seed) if seed is not None else tops[0]
    sign[start] = 1
    queue = [start]
    while queue:
        s = queue.pop()
        for i in range(len(s)):
            f = s[:i] + s[i + 1:]
            owners = by_facet[f]
            if len(owners) != 2:
                continue
            (s1, c1), (s2, c2) = owners
            other, cs, co = (s2, c1, c2) if s1 == s else (s1, c2, c1)
            want = -sign[s] * cs * co
            if other in sign:
                if sign[other] != want:
                    raise NotOrientable("orientation conflict at %r" % (f,))
            else:
                sign[other] = want
                queue.append(other)
    if len(sign) != len(tops):
        raise NotPseudomanifold("top simplexes are not facet-connected")
    cycle = {s: sign[s] for s in tops}
    bnd = K.boundary(cycle)
    bad = [f for f in bnd if f not in boundary_facets]
    if bad:
        raise NotOrientable("boundary survives on interior facets %r" % bad)
    return cycle


def product_triangulation(K1, ord1, K2, ord2):
    """Staircase triangulation of |K1| x |K2|.

    ord1/ord2 are Ordering objects whose rank is total on each simplex of
    their complex. Vertices of the product are pairs (v, w); simplexes are
    the chains of the componentwise partial order inside a cell sigma x tau.
    Returns the product Complex; pair vertices keep their (v, w) form.
    """
    tops = []
    for s1 in K1.simplices(K1.dim()):
        t1, _ = ord1.sort_simplex(s1)
        for s2 in K2.simplices(K2.dim()):
            t2, _ = ord2.sort_simplex(s2)
            tops.extend(grid_paths(t1, t2))
    return Complex(tops)


def grid_paths(t1, t2):
    """Maximal monotone paths in the grid of two ordered simplexes."""
    n1, n2 = len(t1), len(t2)
    out = []
    stack = [((0, 0), [(t1[0], t2[0])])]
    while stack:
        (i, j), path = stack.pop()
        if i == n1 - 1 and j == n2 - 1:
            out.append(tuple(path))
            continue
        if i + 1 < n1:
            stack.append(((i + 1, j), path + [(t1[i + 1], t2[j])]))
        if j + 1 < n2:
            stack.append(((i, j + 1), path + [(t1[i], t2[j + 1])]))
    return out


def chain_add(a, b, scale=1):
    out = dict(a)
    for k, v in b.items():
        c = out.get(k, 0) + scale * v
        if c:
            out[k] = c
        elif k in out:
            del out[k]
    return out


def chain_scale(a, c):
    if not c:
        return {}
    return {k: c * v for k, v in a.items()}


def from_json_dict(data):
    """Build (Complex, tags) from the on-disk JSON description.

    Expected keys: "vertices" (list of {"id": ...}), "top_simplices"
    (list of {"verts": [...], "orient": +-1}), "tags" with optional "D"
    (list of vertex ids) and "H" (list of {"name", "codim", "simplices"}).
    Tag simplex lists may be vertex ids (taken as 0-simplexes of the full
    subcomplex on those vertices).
    """
    tops = [tuple(t["verts"]) for t in data.get("top_simplices", [])]
    if not tops:
        raise NotAComplex("no top_simplices in input")
    K = Complex(tops)
    orient = {}
    for t in data.get("top_simplices", []):
        canon, sgn = K.canon(t["verts"])
        orient[canon] = sgn * int(t.get("orient", 1))
    tags = {"orient": orient, "D": set(), "H": []}
    raw = data.get("tags", {})
    if "D" in raw:
        dverts = set(raw["D"])
        D = full_subcomplex(K, dverts)
        if vertices_of(D) != dverts:
            raise NonClosedTag("D tag names vertices outside the complex")
        tags["D"] = D
    for h in raw.get("H", []):
        hverts = set()
        for item in h["simplices"]:
            if isinstance(item, (list, tuple)):
                hverts.update(item)
            else:
                hverts.add(item)
        sub = full_subcomplex(K, hverts)
        if vertices_of(sub) != hverts:
            raise NonClosedTag("face %s is not a subcomplex" % h.get("name"))
        tags["H"].append({
            "name": h.get("name"),
            "codim": int(h.get("codim", 1)),
            "simplices": sub,
        })
    return K, tags
