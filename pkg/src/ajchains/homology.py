"""Exact sparse linear algebra over Z and Q for chain complexes.

Matrices are kept as lists of sparse rows (dict column -> value). The
workhorses are a sparsity-guided elimination for ranks and reduced row
echelon forms over Q, a Smith normal form with transform matrices for
integer questions (torsion, integer solvability), and a hybrid solver that
clears unit pivots sparsely before handing the dense core to the Smith
form. Everything is exact; no floating point enters this module.
"""

import heapq
from fractions import Fraction

from .errors import NoSolution


def rows_from_map(domain, codomain_index, image_fun):
    """Matrix rows for a linear map given on basis elements.

    domain: list of basis keys (column order). codomain_index: dict basis
    key -> row number. image_fun(key) -> dict basis key -> coefficient.
    Returns (rows, nrows) with rows a list of sparse row dicts.
    """
    nrows = len(codomain_index)
    rows = [dict() for _ in range(nrows)]
    for j, key in enumerate(domain):
        for out_key, val in image_fun(key).items():
            if val:
                rows[codomain_index[out_key]][j] = val
    return rows, nrows


def _as_fraction_rows(rows):
    return [{c: Fraction(v) for c, v in r.items() if v} for r in rows]


def sparse_rank(rows):
    """Rank over Q of a matrix given as sparse rows."""
    work = [dict(r) for r in _as_fraction_rows(rows) if r]
    colmap = {}
    for i, r in enumerate(work):
        for c in r:
            colmap.setdefault(c, set()).add(i)
    alive = set(range(len(work)))
    heap = [(len(r), i) for i, r in enumerate(work)]
    heapq.heapify(heap)
    rank = 0
    while heap:
        ln, i = heapq.heappop(heap)
        if i not in alive or len(work[i]) != ln:
            if i in alive:
                heapq.heappush(heap, (len(work[i]), i))
            continue
        row = work[i]
        alive.discard(i)
        if not row:
            continue
        rank += 1
        pc = min(row, key=lambda c: len(colmap[c]))
        pval = row[pc]
        for c in row:
            colmap[c].discard(i)
        for j in list(colmap[pc]):
            other = work[j]
            f = other[pc] / pval
            for c, v in row.items():
                nv = other.get(c, 0) - f * v
                if nv:
                    if c not in other:
                        colmap.setdefault(c, set()).add(j)
                    other[c] = nv
                elif c in other:
                    del other[c]
                    colmap[c].discard(j)
            heapq.heappush(heap, (len(other), j))
    return rank


class KernelBasis:
    """Null space of a matrix over Q, in free-column completion form.

    Each basis vector has a 1 in its own free column and zeros in the other
    free columns, so coordinates of any kernel member can be read off its
    free-column entries; `coordinates` verifies the reconstruction exactly.
    """

    def __init__(self, vectors, free_cols, ncols):
        self.vectors = vectors
        self.free_cols = list(free_cols)
        self.ncols = ncols

    def __len__(self):
        return len(self.vectors)

    def coordinates(self, vec):
        """Coefficients of vec in this basis; raises ValueError if outside."""
        coords = [Fraction(vec.get(c, 0)) for c in self.free_cols]
        recon = {}
        for coef, basis_vec in zip(coords, self.vectors):
            if not coef:
                continue
            for c, v in basis_vec.items():
                nv = recon.get(c, 0) + coef * v
                if nv:
                    recon[c] = nv
                elif c in recon:
                    del recon[c]
        target = {c: Fraction(v) for c, v in vec.items() if v}
        if recon != target:
            raise ValueError("vector lies outside the kernel")
        return coords


def kernel_basis(rows, ncols):
    """KernelBasis of the matrix (rows over columns 0..ncols-1)."""
    work = [r for r in _as_fraction_rows(rows) if r]
    pivots = {}
    done, pivot_cols = _rref(work)
    for row, pc in zip(done, pivot_cols):
        if row:
            pivots[pc] = row
    free = [c for c in range(ncols) if c not in pivots]
    vectors = []
    for f in free:
        vec = {f: Fraction(1)}
        for pc, row in pivots.items():
            v = row.get(f)
            if v:
                vec[pc] = -v
        vectors.append(vec)
    return KernelBasis(vectors, free, ncols)


def _rref(work):
    """In-place reduced row echelon.

    Returns (rows, pivot_cols): the nonzero reduced rows together with the
    pivot column chosen for each.  Pivots are picked for sparsity, so a
    row's pivot need not be its smallest column.
    """
    colmap = {}
    for i, r in enumerate(work):
        for c in r:
            colmap.setdefault(c, set()).add(i)
    done = []
    pivot_cols = []
    alive = set(range(len(work)))
    heap = [(len(r), i) for i, r in enumerate(work)]
    heapq.heapify(heap)
    while heap:
        ln, i = heapq.heappop(heap)
        if i not in alive or len(work[i]) != ln:
            if i in alive:
                heapq.heappush(heap, (len(work[i]), i))
            continue
        row = work[i]
        alive.discard(i)
        if not row:
            continue
        pc = min(row, key=lambda c: (len(colmap[c]), c))
        pval = row[pc]
        if pval != 1:
            for c in list(row):
                row[c] /= pval
        for c in row:
            colmap[c].discard(i)
        for j in list(colmap[pc]):
            other = work[j]
            f = other[pc]
            for c, v in row.items():
                nv = other.get(c, 0) - f * v
                if nv:
                    if c not in other:
                        colmap.setdefault(c, set()).add(j)
                    other[c] = nv
                elif c in other:
                    del other[c]
                    colmap[c].discard(j)
            if j in alive:
                heapq.heappush(heap, (len(other), j))
        for other in done:
            f = other.get(pc)
            if not f:
                continue
            for c, v in row.items():
                nv = other.get(c, 0) - f * v
                if nv:
                    other[c] = nv
                elif c in other:
                    del other[c]
        done.append(row)
        pivot_cols.append(pc)
    return done, pivot_cols


def smith_normal_form(dense):
    """Smith form of a dense integer matrix.

    Returns (diag, U, V) with U * A * V diagonal = diag (as a full matrix),
    diag the list of diagonal entries (nonzero first, each dividing the
    next). U is nrows x nrows, V is ncols x ncols, both unimodular.
    """
    A = [list(map(int, r)) for r in dense]
    n = len(A)
    m = len(A[0]) if n else 0
    U = [[int(i == j) for j in range(n)] for i in range(n)]
    V = [[int(i == j) for j in range(m)] for i in range(m)]
    t = 0
    while t < min(n, m):
        piv = None
        best = None
        for i in range(t, n):
            for j in range(t, m):
                a = abs(A[i][j])
                if a and (best is None or a < best):
                    best = a
                    piv = (i, j)
        if piv is None:
            break
        i, j = piv
        if i != t:
            A[t], A[i] = A[i], A[t]
            U[t], U[i] = U[i], U[t]
        if j != t:
            for row in A:
                row[t], row[j] = row[j], row[t]
            for row in V:
                row[t], row[j] = row[j], row[t]
        dirty = False
        for i in range(t + 1, n):
            if A[i][t]:
                q = A[i][t] // A[t][t]
                if q:
                    for k in range(m):
                        A[i][k] -= q * A[t][k]
                    for k in range(n):
                        U[i][k] -= q * U[t][k]
                if A[i][t]:
                    dirty = True
        for j in range(t + 1, m):
            if A[t][j]:
                q = A[t][j] // A[t][t]
                if q:
                    for row in A:
                        row[j] -= q * row[t]
                    for row in V:
                        row[j] -= q * row[t]
                if A[t][j]:
                    dirty = True
        if dirty:
            continue
        rem = None
        for i in range(t + 1, n):
            for j in range(t + 1, m):
                if A[i][j] % A[t][t]:
                    rem = i
                    break
            if rem is not None:
                break
        if rem is not None:
            for k in range(m):
                A[t][k] += A[rem][k]
            for k in range(n):
                U[t][k] += U[rem][k]
            continue
        t += 1
    diag = []
    for k in range(min(n, m)):
        if A[k][k]:
            if A[k][k] < 0:
                for j in range(m):
                    A[k][j] = -A[k][j]
                for j in range(n):
                    U[k][j] = -U[k][j]
            diag.append(A[k][k])
    return diag, U, V


def invariant_factors(rows, ncols):
    """Nonzero invariant factors of a sparse integer matrix.

    Unit pivots are cleared sparsely (each contributes a factor 1); the
    remaining core goes through the dense Smith form.
    """
    work = [{c: int(v) for c, v in r.items() if v} for r in rows]
    work = [r for r in work if r]
    units = _clear_unit_pivots(work)
    core_rows = [r for r in work if r]
    factors = [1] * units
    if core_rows:
        cols = sorted({c for r in core_rows for c in r})
        cindex = {c: i for i, c in enumerate(cols)}
        dense = [[0] * len(cols) for _ in core_rows]
        for i, r in enumerate(core_rows):
            for c, v in r.items():
                dense[i][cindex[c]] = v
        diag, _, _ = smith_normal_form(dense)
        factors.extend(diag)
    return factors


def _clear_unit_pivots(work):
    """Eliminate rows with a +-1 entry in place; returns how many."""
    colmap = {}
    for i, r in enumerate(work):
        for c in r:
            colmap.setdefault(c, set()).add(i)
    heap = [(len(r), i) for i, r in enumerate(work)]
    heapq.heapify(heap)
    alive = set(range(len(work)))
    units = 0
    while heap:
        ln, i = heapq.heappop(heap)
        if i not in alive or len(work[i]) != ln:
            if i in alive:
                heapq.heappush(heap, (len(work[i]), i))
            continue
        row = work[i]
        if not row:
            alive.discard(i)
            continue
        unit_cols = [c for c, v in row.items() if v in (1, -1)]
        if not unit_cols:
            continue
        alive.discard(i)
        units += 1
        pc = min(unit_cols, key=lambda c: len(colmap[c]))
        pval = row[pc]
        for c in row:
            colmap[c].discard(i)
        for j in list(colmap[pc]):
            other = work[j]
            f = other[pc] * pval
            for c, v in row.items():
                nv = other.get(c, 0) - f * v
                if nv:
                    if c not in other:
                        colmap.setdefault(c, set()).add(j)
                    other[c] = nv
                elif c in other:
                    del other[c]
                    colmap[c].discard(j)
            if j in alive:
                heapq.heappush(heap, (len(other), j))
        row.clear()
    return units


class IntegerSystem:
    """Integer linear system A x = b with sparse unit-pivot preprocessing.

    Solves exactly over Z, raising NoSolution when none exists, and can
    produce independent solutions by adding integer kernel elements.
    """

    def __init__(self, rows, ncols, rhs):
        self.ncols = ncols
        self.rows = [{c: int(v) for c, v in r.items() if v} for r in rows]
        self.rhs = [int(b) for b in rhs]
        if len(self.rhs) != len(self.rows):
            raise ValueError("rhs length mismatch")

    def solve(self):
        work = [dict(r) for r in self.rows]
        b = list(self.rhs)
        subs = []
        colmap = {}
        for i, r in enumerate(work):
            for c in r:
                colmap.setdefault(c, set()).add(i)
        alive = set(range(len(work)))
        heap = [(len(r), i) for i, r in enumerate(work)]
        heapq.heapify(heap)
        while heap:
            ln, i = heapq.heappop(heap)
            if i not in alive or len(work[i]) != ln:
                if i in alive:
                    heapq.heappush(heap, (len(work[i]), i))
                continue
            row = work[i]
            if not row:
                if b[i] != 0:
                    raise NoSolution("inconsistent zero row")
                alive.discard(i)
                continue
            unit_cols = [c for c, v in row.items() if v in (1, -1)]
            if not unit_cols:
                continue
            pc = min(unit_cols, key=lambda c: len(colmap[c]))
            pval = row[pc]
            alive.discard(i)
            for c in row:
                colmap[c].discard(i)
            for j in list(colmap[pc]):
                other = work[j]
                f = other[pc] * pval
                for c, v in row.items():
                    nv = other.get(c, 0) - f * v
                    if nv:
                        if c not in other:
                            colmap.setdefault(c, set()).add(j)
                        other[c] = nv
                    elif c in other:
                        del other[c]
                        colmap[c].discard(j)
                b[j] -= f * b[i]
                if j in alive:
                    heapq.heappush(heap, (len(other), j))
            subs.append((pc, pval, dict(row), b[i]))
            row.clear()
        core = [(i, work[i]) for i in alive if work[i]]
        for i in alive:
            if not work[i] and b[i]:
                raise NoSolution("inconsistent zero row in core")
        x = {}
        self._core_cols = []
        self._core_kernel = []
        if core:
            cols = sorted({c for _, r in core for c in r})
            cindex = {c: k for k, c in enumerate(cols)}
            dense = [[0] * len(cols) for _ in core]
            bc = []
            for k, (i, r) in enumerate(core):
                for c, v in r.items():
                    dense[k][cindex[c]] = v
                bc.append(b[i])
            diag, U, V = smith_normal_form(dense)
            ub = [sum(U[i][k] * bc[k] for k in range(len(bc)))
                  for i in range(len(bc))]
            y = [0] * len(cols)
            for i in range(len(bc)):
                if i < len(diag):
                    if ub[i] % diag[i]:
                        raise NoSolution("no integral solution")
                    y[i] = ub[i] // diag[i]
                elif ub[i]:
                    raise NoSolution("inconsistent projected row")
            for j, c in enumerate(cols):
                val = sum(V[j][k] * y[k] for k in range(len(cols)))
                if val:
                    x[c] = val
            self._core_cols = cols
            kern = []
            for k in range(len(diag), len(cols)):
                vec = {}
                for j, c in enumerate(cols):
                    if V[j][k]:
                        vec[c] = V[j][k]
                kern.append(vec)
            self._core_kernel = kern
        self._subs = subs
        for pc, pval, row, bi in reversed(subs):
            acc = bi
            for c, v in row.items():
                if c != pc and c in x:
                    acc -= v * x[c]
            if acc:
                x[pc] = pval * acc
        self._check(x)
        return x

    def kernel_elements(self):
        """Integer kernel generators found during solve (call solve first).

        Includes core kernel vectors back-substituted through the unit
        pivots and unit vectors for columns no equation touches.
        """
        touched = set()
        for r in self.rows:
            touched.update(r)
        out = []
        for vec in self._core_kernel:
            full = dict(vec)
            for pc, pval, row, _ in reversed(self._subs):
                acc = 0
                for c, v in row.items():
                    if c != pc and c in full:
                        acc -= v * full[c]
                if acc:
                    full[pc] = pval * acc
            out.append(full)
        for c in range(self.ncols):
            if c not in touched:
                out.append({c: 1})
        seen_pivots = {pc for pc, _, _, _ in getattr(self, "_subs", [])}
        free_sub_cols = set()
        for pc, pval, row, _ in getattr(self, "_subs", []):
            for c in row:
                if (c != pc and c not in seen_pivots
                        and c not in self._core_cols and c in touched):
                    free_sub_cols.add(c)
        for c in sorted(free_sub_cols):
            full = {c: 1}
            for pc, pval, row, _ in reversed(self._subs):
                acc = 0
                for cc, v in row.items():
                    if cc != pc and cc in full:
                        acc -= v * full[cc]
                if acc:
                    full[pc] = pval * acc
            out.append(full)
        checked = []
        for vec in out:
            if self._is_kernel(vec):
                checked.append(vec)
        return checked

    def _is_kernel(self, vec):
        for r in self.rows:
            if sum(v * vec.get(c, 0) for c, v in r.items()):
                return False
        return True

    def _check(self, x):
        for r, bi in zip(self.rows, self.rhs):
            if sum(v * x.get(c, 0) for c, v in r.items()) != bi:
                raise NoSolution("verification failed after solve")


def betti_numbers(dims, diff_rows):
    """Betti numbers over Q of a chain complex.

    dims: dict degree -> dimension of the chain group. diff_rows: dict
    degree n -> sparse rows of d_n : C_n -> C_(n-1). Returns dict degree ->
    rank of homology.
    """
    ranks = {n: sparse_rank(rows) for n, rows in diff_rows.items()}
    out = {}
    for n, dim in dims.items():
        out[n] = dim - ranks.get(n, 0) - ranks.get(n + 1, 0)
    return out


def complex_is_exact(dims, diff_rows):
    """True when the chain complex has zero homology in every degree."""
    ranks = {n: sparse_rank(rows) for n, rows in diff_rows.items()}
    for n, dim in dims.items():
        if dim != ranks.get(n, 0) + ranks.get(n + 1, 0):
            return False
    return True


def mapping_cone(dims_a, diff_a, dims_b, diff_b, f_rows):
    """Mapping cone of a degree-zero chain map f : A -> B.

    All inputs are sparse-row dicts keyed by degree; diff_X[n] maps X_n to
    X_(n-1), f_rows[n] maps A_n to B_n. Cone_n = A_(n-1) (+) B_n with
    d(a, b) = (-d_A a, d_B b - f a). Returns (dims, diff_rows) in the same
    conventions, with A-columns first in each degree.
    """
    degrees = set(dims_b) | {n + 1 for n in dims_a}
    dims = {}
    for n in degrees:
        dims[n] = dims_a.get(n - 1, 0) + dims_b.get(n, 0)
    diff = {}
    for n in degrees:
        na = dims_a.get(n - 1, 0)
        nb_out = dims_b.get(n - 1, 0)
        na_out = dims_a.get(n - 2, 0)
        rows = [dict() for _ in range(na_out + nb_out)]
        for r_i, row in enumerate(diff_a.get(n - 1, [])):
            for c, v in row.items():
                if v:
                    rows[r_i][c] = -v
        for r_i, row in enumerate(diff_b.get(n, [])):
            for c, v in row.items():
                if v:
                    rows[na_out + r_i][na + c] = v
        for r_i, row in enumerate(f_rows.get(n - 1, [])):
            for c, v in row.items():
                if v:
                    cur = rows[na_out + r_i].get(c, 0) - v
                    if cur:
                        rows[na_out + r_i][c] = cur
                    elif c in rows[na_out + r_i]:
                        del rows[na_out + r_i][c]
        diff[n] = rows
    return dims, diff


def check_differential(dims, diff_rows):
    """Verify d o d = 0 by exact sparse multiplication."""
    for n, rows in diff_rows.items():
        prev = diff_rows.get(n - 1)
        if not prev:
            continue
        cols = {}
        for r_i, row in enumerate(rows):
            for c, v in row.items():
                cols.setdefault(c, []).append((r_i, v))
        prev_cols = {}
        for r_i, row in enumerate(prev):
            for c, v in row.items():
                prev_cols.setdefault(c, []).append((r_i, v))
        for j, entries in cols.items():
            out = {}
            for mid, v in entries:
                for r_i, w in prev_cols.get(mid, ()):
                    out[r_i] = out.get(r_i, 0) + v * w
            if any(out.values()):
                return False
    return True
