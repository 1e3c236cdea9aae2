"""Dense exact linear algebra over any field whose elements support + - * / and truthiness.

Used with ``fractions.Fraction`` and :class:`mahlerkit.numbers.CycloElem`.
"""

from fractions import Fraction


def rref(rows, ncols=None):
    """Reduced row echelon form.

    Returns ``(R, pivots)`` where ``R`` holds only the nonzero rows and
    ``pivots[i]`` is the pivot column of ``R[i]``.  The input is not modified.
    """
    M = [list(r) for r in rows]
    if ncols is None:
        ncols = len(M[0]) if M else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r == len(M):
            break
        p = next((i for i in range(r, len(M)) if M[i][c]), None)
        if p is None:
            continue
        M[r], M[p] = M[p], M[r]
        inv = 1 / M[r][c] if not isinstance(M[r][c], int) else Fraction(1, M[r][c])
        M[r] = [x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c]:
                f = M[i][c]
                Mi, Mr = M[i], M[r]
                M[i] = [Mi[j] - f * Mr[j] if Mr[j] else Mi[j] for j in range(ncols)]
        pivots.append(c)
        r += 1
    return M[:r], pivots


def nullspace(rows, ncols):
    """Basis of ``{x : rows @ x = 0}``; one vector per free column, that entry set to 1."""
    R, pivots = rref(rows, ncols)
    free = [c for c in range(ncols) if c not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for i, pc in enumerate(pivots):
            v[pc] = -R[i][f]
        basis.append(v)
    return basis


def rank(rows, ncols=None):
    return len(rref(rows, ncols)[1])


def solve(A, b):
    """One solution of ``A x = b`` or ``None`` when inconsistent."""
    n = len(A[0]) if A else 0
    aug = [list(row) + [bi] for row, bi in zip(A, b)]
    R, pivots = rref(aug, n + 1)
    if n in pivots:
        return None
    x = [Fraction(0)] * n
    for i, pc in enumerate(pivots):
        x[pc] = R[i][n]
    return x


def det(M):
    """Determinant by elimination; ``M`` square, entries from a field."""
    A = [list(r) for r in M]
    n = len(A)
    d = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if A[i][c]), None)
        if p is None:
            return Fraction(0)
        if p != c:
            A[c], A[p] = A[p], A[c]
            d = -d
        piv = A[c][c]
        d = d * piv
        for i in range(c + 1, n):
            if A[i][c]:
                f = A[i][c] / piv
                A[i] = [A[i][j] - f * A[c][j] for j in range(n)]
    return d


def integer_kernel(M):
    """Basis of the integer left kernel ``{k in Z^r : k M = 0}`` of an integer r x s matrix.

    Row-reduces ``[M | I_r]`` with unimodular integer row operations (Hermite
    style); rows whose ``M`` part vanishes carry the kernel basis.
    """
    r = len(M)
    s = len(M[0]) if r else 0
    A = [list(M[i]) + [int(i == j) for j in range(r)] for i in range(r)]
    row = 0
    for c in range(s):
        # gcd-combine all rows >= row on column c into a single pivot
        while True:
            nz = [i for i in range(row, r) if A[i][c]]
            if len(nz) <= 1:
                break
            i0 = min(nz, key=lambda i: abs(A[i][c]))
            for i in nz:
                if i != i0:
                    q = A[i][c] // A[i0][c]
                    A[i] = [x - q * y for x, y in zip(A[i], A[i0])]
        nz = [i for i in range(row, r) if A[i][c]]
        if nz:
            i0 = nz[0]
            A[row], A[i0] = A[i0], A[row]
            if A[row][c] < 0:
                A[row] = [-x for x in A[row]]
            row += 1
    kernel = [A[i][s:] for i in range(row, r)]
    return _lll_like_normalize(kernel)


def _lll_like_normalize(basis):
    # reduce to echelon form on the kernel coordinates, sign-normalized, so
    # the output does not depend on pivoting accidents
    if not basis:
        return []
    n = len(basis[0])
    B = [list(v) for v in basis]
    out = []
    col = 0
    while B and col < n:
        while True:
            nz = [v for v in B if v[col]]
            if len(nz) <= 1:
                break
            p = min(nz, key=lambda v: abs(v[col]))
            for v in nz:
                if v is not p:
                    q = v[col] // p[col]
                    v[:] = [x - q * y for x, y in zip(v, p)]
        nz = [v for v in B if v[col]]
        if nz:
            p = nz[0]
            B.remove(p)
            if p[col] < 0:
                p = [-x for x in p]
            out.append(p)
        col += 1
    # size-reduce earlier rows against later pivots
    for i in range(len(out)):
        for j in range(i + 1, len(out)):
            pc = next(c for c, x in enumerate(out[j]) if x)
            q = _round_div(out[i][pc], out[j][pc])
            if q:
                out[i] = [x - q * y for x, y in zip(out[i], out[j])]
    return out


def _round_div(a, b):
    q, r = divmod(a, b)
    if 2 * r > b:
        q += 1
    return q
