"""Reference complexes: the projective line, its square, and their faces.

A Model packages a simplicial complex with the extra structure the face
calculus needs: a count of line factors ("axes"), a partial-order rank used
for staircase products, the degeneracy subcomplex D (the locus where a
coordinate equals one), the coordinate hyperplane faces (coordinate zero or
infinity on one axis), a fixed fundamental cycle, and for each face the
identification of that face with the canonical model one axis down.

The line itself is triangulated as the boundary of the octahedron: vertex
pairs (0,1), (2,3), (4,5) are antipodal, with 4 marking coordinate zero,
5 infinity, 2 the degenerate value one. This triangulation admits an
orientation-preserving simplicial involution swapping zero with infinity
(a half turn around the axis through the other two antipodal pairs), which
a minimal four-triangle sphere does not.
"""

from .errors import BadIndex
from .simplicial import Complex, Ordering, fundamental_cycle, grid_paths

P1_RANK = {0: 0, 1: 0, 2: 1, 3: 2, 4: 3, 5: 3}
ZERO_VERTEX = 4
INFINITY_VERTEX = 5
ONE_VERTEX = 2


def face_position(axis, value):
    """Global order of coordinate faces, alternating with axis parity.

    axis is 1-based; value is "0" or "inf". Odd axes list zero first, even
    axes list infinity first; the pattern repeats with period two.
    """
    base = 2 * (axis - 1)
    if axis % 2 == 1:
        return base + (0 if value == "0" else 1)
    return base + (0 if value == "inf" else 1)


class Face:
    """A coordinate hyperplane of a model, identified with a lower model."""

    def __init__(self, name, axis, value, parent, submodel,
                 drop, lift, simplices):
        self.name = name
        self.axis = axis
        self.value = value
        self.codim = 1
        self.parent = parent
        self.submodel = submodel
        self._drop = drop
        self._lift = lift
        self.simplices = set(simplices)
        self.position = face_position(axis, value)

    def restrict(self, chain):
        """Chain on the face's simplexes -> chain on the submodel."""
        out = {}
        sub = self.submodel.complex
        for s, c in chain.items():
            if s not in self.simplices:
                raise BadIndex(
                    "%r is not carried by face %s" % (s, self.name))
            canon, sgn = sub.canon([self._drop(v) for v in s])
            acc = out.get(canon, 0) + sgn * c
            if acc:
                out[canon] = acc
            elif canon in out:
                del out[canon]
        return out

    def embed(self, chain):
        """Chain on the submodel -> chain on the parent complex."""
        out = {}
        par = self.parent.complex
        for s, c in chain.items():
            canon, sgn = par.canon([self._lift(v) for v in s])
            acc = out.get(canon, 0) + sgn * c
            if acc:
                out[canon] = acc
            elif canon in out:
                del out[canon]
        return out


class Model:
    """A complex with axes, rank, degeneracy locus, faces, and orientation."""

    def __init__(self, complex_, axes, rank, D, name):
        self.complex = complex_
        self.axes = axes
        self.rank = dict(rank)
        self.D = set(D)
        self.name = name
        self.faces = []
        if complex_.dim() == 0:
            self.fundamental = {complex_.simplices(0)[0]: 1}
        else:
            self.fundamental = fundamental_cycle(complex_)

    def ordering(self):
        """Staircase ordering: the model's own rank with index tiebreaks."""
        return Ordering(self.rank, {v: i for i, v in
                                    enumerate(self.complex.vertices)})

    def face(self, axis, value):
        for f in self.faces:
            if f.axis == axis and f.value == value:
                return f
        raise BadIndex("no face for axis %d value %s" % (axis, value))

    def face_by_name(self, name):
        for f in self.faces:
            if f.name == name:
                return f
        raise BadIndex("no face named %s" % name)

    def d_quotient_basis(self, k):
        """k-simplexes of the complex that are not in D."""
        return [s for s in self.complex.simplices(k) if s not in self.D]

    def reduce_mod_d(self, chain):
        return {s: c for s, c in chain.items() if s not in self.D and c}


_POINT = None
_P1 = None
_P1SQ = None


def get_point_model():
    global _POINT
    if _POINT is None:
        K = Complex([("*",)])
        _POINT = Model(K, 0, {"*": 0}, set(), "point")
    return _POINT


def p1_model():
    global _P1
    if _P1 is not None:
        return _P1
    tops = [(a, b, c) for a in (4, 5) for b in (2, 3) for c in (0, 1)]
    K = Complex(tops)
    D = {(ONE_VERTEX,)}
    model = Model(K, 1, P1_RANK, D, "p1")
    pt = get_point_model()
    for value, vert in (("0", ZERO_VERTEX), ("inf", INFINITY_VERTEX)):
        model.faces.append(Face(
            name="z1=%s" % value,
            axis=1,
            value=value,
            parent=model,
            submodel=pt,
            drop=lambda v: "*",
            lift=(lambda vv: (lambda v: vv))(vert),
            simplices={(vert,)},
        ))
    model.faces.sort(key=lambda f: f.position)
    _P1 = model
    return model


def p1_squared_model():
    global _P1SQ
    if _P1SQ is not None:
        return _P1SQ
    base = p1_model()
    K1 = base.complex
    order = base.ordering()
    tops = []
    for s1 in K1.simplices(2):
        t1, _ = order.sort_simplex(s1)
        for s2 in K1.simplices(2):
            t2, _ = order.sort_simplex(s2)
            tops.extend(grid_paths(t1, t2))
    K = Complex(tops)
    rank = {(v, w): P1_RANK[v] + P1_RANK[w] for (v, w) in K.vertices}
    D = set()
    for s in K.simplex_set:
        if all(v == ONE_VERTEX for v, _ in s) or \
                all(w == ONE_VERTEX for _, w in s):
            D.add(s)
    model = Model(K, 2, rank, D, "p1xp1")
    for axis in (1, 2):
        comp = axis - 1
        for value, vert in (("0", ZERO_VERTEX), ("inf", INFINITY_VERTEX)):
            model.faces.append(Face(
                name="z%d=%s" % (axis, value),
                axis=axis,
                value=value,
                parent=model,
                submodel=base,
                drop=(lambda c: (lambda v: v[1 - c]))(comp),
                lift=(lambda c, vv: (
                    lambda v: (vv, v) if c == 0 else (v, vv)))(comp, vert),
                simplices={
                    s for s in K.simplex_set
                    if all(v[comp] == vert for v in s)
                },
            ))
    model.faces.sort(key=lambda f: f.position)
    _P1SQ = model
    return model


def model_registry():
    return {"p1": p1_model, "p1xp1": p1_squared_model}
