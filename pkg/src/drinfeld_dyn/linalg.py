"""Small exact linear algebra over F_q and F_q[T].

Matrices are lists of rows of field codes (see funcfield).  Sizes here are
tiny, so plain Gaussian elimination is enough.
"""

from __future__ import annotations

from .funcfield import PolyA


def rref(F, rows, ncols):
    """Row-reduce in place-free fashion; returns (reduced rows, pivot columns)."""
    M = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = None
        for i in range(r, len(M)):
            if M[i][c]:
                piv = i
                break
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = F.inv(M[r][c])
        M[r] = [F.mul(inv, x) for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                M[i] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M[:r], pivots


def kernel(F, rows, ncols):
    """Basis of {x in F^ncols : rows . x = 0}."""
    R, pivots = rref(F, rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        x = [0] * ncols
        x[fc] = 1
        for i, pc in enumerate(pivots):
            x[pc] = F.neg(R[i][fc])
        basis.append(x)
    return basis


def rank(F, rows, ncols):
    return len(rref(F, rows, ncols)[1])


def solve(F, rows, ncols, rhs):
    """One solution x of rows . x = rhs, or None."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    R, pivots = rref(F, aug, ncols + 1)
    if ncols in pivots:
        return None
    x = [0] * ncols
    for i, pc in enumerate(pivots):
        x[pc] = R[i][ncols]
    return x


def span(F, basis):
    """All F-linear combinations of the given vectors (as tuples)."""
    n = len(basis[0]) if basis else 0
    out = [tuple([0] * n)]
    for b in basis:
        new = []
        for c in F.elements():
            if c == 0:
                continue
            sb = [F.mul(c, x) for x in b]
            new.extend(tuple(F.add(x, y) for x, y in zip(v, sb)) for v in out)
        out = out + new
    return out


def coordinates(F, basis, vec):
    """Coordinates of vec in the given (independent) basis, or None."""
    if not basis:
        return [] if not any(vec) else None
    n = len(vec)
    rows = [[basis[j][i] for j in range(len(basis))] for i in range(n)]
    return solve(F, rows, len(basis), list(vec))


def invariant_factors(F, A):
    """Invariant factors (monic, degree >= 1, divisibility chain) of the
    F_q[T]-module F^n with T acting by the matrix A (acting on columns)."""
    n = len(A)
    if n == 0:
        return []
    T = PolyA(F, [0, 1])
    M = [[(T if i == j else PolyA(F, [])) - PolyA(F, [A[i][j]]) for j in range(n)]
         for i in range(n)]
    diag = _smith_diagonal(M)
    return [d for d in diag if d.deg >= 1]


def _smith_diagonal(M):
    n = len(M)
    m = len(M[0]) if n else 0
    M = [list(r) for r in M]
    diag = []
    for k in range(min(n, m)):
        while True:
            best = None
            for i in range(k, n):
                for j in range(k, m):
                    if not M[i][j].is_zero() and (best is None or M[i][j].deg < best[0]):
                        best = (M[i][j].deg, i, j)
            if best is None:
                return diag
            _, i, j = best
            M[k], M[i] = M[i], M[k]
            for row in M:
                row[k], row[j] = row[j], row[k]
            p = M[k][k]
            dirty = False
            for i in range(k + 1, n):
                if not M[i][k].is_zero():
                    qt, r = divmod(M[i][k], p)
                    M[i] = [a - qt * b for a, b in zip(M[i], M[k])]
                    dirty = dirty or not r.is_zero()
            for j in range(k + 1, m):
                if not M[k][j].is_zero():
                    qt, r = divmod(M[k][j], p)
                    for row in M:
                        row[j] = row[j] - qt * row[k]
                    dirty = dirty or not r.is_zero()
            if dirty:
                continue
            bad = None
            for i in range(k + 1, n):
                for j in range(k + 1, m):
                    if not (M[i][j] % p).is_zero():
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is not None:
                M[k] = [a + b for a, b in zip(M[k], M[bad])]
                continue
            break
        diag.append(M[k][k].monic())
    return diag


def orbit_matrix(F, basis, images):
    """Matrix (columns = coordinates of images) of a linear map on span(basis)."""
    cols = [coordinates(F, basis, im) for im in images]
    if any(c is None for c in cols):
        raise ValueError("images leave the span")
    n = len(basis)
    return [[cols[j][i] for j in range(n)] for i in range(n)]
