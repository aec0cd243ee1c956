"""Exact integer/rational linear algebra on small dense matrices.

Everything works on lists of lists of Python ints, so there is no
overflow and no floating point.  Kernels are computed by unimodular
column reduction, which yields the full integer kernel lattice (hence
already saturated); saturation of an arbitrary span uses the
double-orthogonal-complement trick.
"""

import math
from fractions import Fraction


def transpose(M):
    return [list(row) for row in zip(*M)] if M else []


def matmul(A, B):
    if not A or not B:
        return []
    n = len(B)
    cols = len(B[0])
    return [
        [sum(row[k] * B[k][j] for k in range(n)) for j in range(cols)]
        for row in A
    ]


def mat_vec(M, v):
    return [sum(row[k] * v[k] for k in range(len(v))) for row in M]


def identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _column_echelon(M):
    """Unimodular column reduction.

    Returns (pivots, cols) where cols are the transformed columns of the
    stacked matrix [[M], [I]]; the first len(pivots) columns have echelon
    M-part, the rest have zero M-part (their I-part is the kernel).
    """
    m = len(M)
    n = len(M[0]) if m else 0
    cols = [[M[i][j] for i in range(m)] + [1 if i == j else 0 for i in range(n)]
            for j in range(n)]
    ptr = 0
    pivots = []
    for r in range(m):
        # gcd-eliminate row r among columns ptr..n-1
        while True:
            live = [j for j in range(ptr, n) if cols[j][r] != 0]
            if not live:
                break
            jmin = min(live, key=lambda j: abs(cols[j][r]))
            done = True
            for j in live:
                if j == jmin:
                    continue
                q = cols[j][r] // cols[jmin][r]
                if q:
                    for i in range(len(cols[j])):
                        cols[j][i] -= q * cols[jmin][i]
                if cols[j][r] != 0:
                    done = False
            if done:
                cols[ptr], cols[jmin] = cols[jmin], cols[ptr]
                if cols[ptr][r] < 0:
                    cols[ptr] = [-x for x in cols[ptr]]
                pivots.append(r)
                ptr += 1
                break
    return pivots, cols, m, n


def kernel_basis(M):
    """Basis (list of length-n int vectors) of the full integer kernel."""
    if not M:
        return []
    pivots, cols, m, n = _column_echelon(M)
    return [col[m:] for col in cols[len(pivots):]]


def rank(M):
    if not M or not M[0]:
        return 0
    pivots, _, _, _ = _column_echelon(M)
    return len(pivots)


def column_span_basis(M):
    """Echelon basis of the lattice spanned by the columns of M."""
    if not M or not M[0]:
        return []
    pivots, cols, m, _ = _column_echelon(M)
    return [col[:m] for col in cols[: len(pivots)]]


def from_columns(cols, m=None):
    """Matrix whose columns are the given vectors."""
    if not cols:
        return [[] for _ in range(m)] if m else []
    return [[col[i] for col in cols] for i in range(len(cols[0]))]


def intersect_column_spans(A, B):
    """Basis of the intersection of two column-span lattices in Z^m."""
    if not A or not A[0] or not B or not B[0]:
        return []
    m = len(A)
    p = len(A[0])
    stacked = [[A[i][j] for j in range(p)] + [-B[i][j] for j in range(len(B[0]))]
               for i in range(m)]
    vectors = []
    for k in kernel_basis(stacked):
        u = k[:p]
        vectors.append(mat_vec(A, u))
    return column_span_basis(from_columns(vectors, m)) if vectors else []


def saturate_column_span(A):
    """Basis of the saturation (Q-span intersect Z^m) of the column span."""
    if not A or not A[0]:
        return []
    m = len(A)
    left = kernel_basis(transpose(A))  # vectors y with y^T A = 0
    if not left:
        return [[1 if i == j else 0 for i in range(m)] for j in range(m)]
    return kernel_basis(left)  # rows are the y vectors


def q_rank_with(A_cols, extra_cols):
    """Rank over Q of the columns of A together with extra column vectors."""
    m = len(A_cols) if A_cols else (len(extra_cols[0]) if extra_cols else 0)
    cols = []
    if A_cols and A_cols[0]:
        cols = [list(c) for c in zip(*A_cols)]
    cols += [list(v) for v in extra_cols]
    return rank(from_columns(cols, m)) if cols else 0


def qspan_contains(A, v):
    """Is v in the Q-span of the columns of A?"""
    if all(x == 0 for x in v):
        return True
    if not A or not A[0]:
        return False
    base = rank(A)
    aug = [row + [v[i]] for i, row in enumerate(A)]
    return rank(aug) == base


def saturated_spans_equal(A, B):
    """Equality of saturations of two column spans (as sublattices)."""
    ra = rank(A) if A and A[0] else 0
    rb = rank(B) if B and B[0] else 0
    if ra != rb:
        return False
    if ra == 0:
        return True
    joint = [row_a + row_b for row_a, row_b in zip(A, B)]
    return rank(joint) == ra


def row_zspan_contains(R, v):
    """Is v an integer combination of the rows of R?"""
    if all(x == 0 for x in v):
        return True
    if not R:
        return False
    Rt = transpose(R)  # columns are the rows of R
    pivots, cols, m, n = _column_echelon(Rt)
    w = list(v)
    for idx in range(len(pivots)):
        r = pivots[idx]
        piv = cols[idx][r]
        if w[r] % piv != 0:
            return False
        q = w[r] // piv
        for i in range(m):
            w[i] -= q * cols[idx][i]
    return all(x == 0 for x in w)


def smith_diagonal(M):
    """Invariant factors (plus trailing zeros) of an integer matrix."""
    A = [list(row) for row in M]
    m = len(A)
    n = len(A[0]) if m else 0
    diag = []
    top = 0
    while top < min(m, n):
        sub = [(abs(A[i][j]), i, j) for i in range(top, m) for j in range(top, n) if A[i][j] != 0]
        if not sub:
            break
        _, pi, pj = min(sub)
        A[top], A[pi] = A[pi], A[top]
        for row in A:
            row[top], row[pj] = row[pj], row[top]
        while True:
            reduced = False
            for i in range(top + 1, m):
                if A[i][top] % A[top][top] != 0:
                    q = A[i][top] // A[top][top]
                    A[i] = [a - q * b for a, b in zip(A[i], A[top])]
                    A[top], A[i] = A[i], A[top]
                    reduced = True
            for j in range(top + 1, n):
                if A[top][j] % A[top][top] != 0:
                    q = A[top][j] // A[top][top]
                    for row in A:
                        row[j] -= q * row[top]
                    for row in A:
                        row[top], row[j] = row[j], row[top]
                    reduced = True
            if not reduced:
                break
        for i in range(top + 1, m):
            q = A[i][top] // A[top][top]
            if q:
                A[i] = [a - q * b for a, b in zip(A[i], A[top])]
        for j in range(top + 1, n):
            q = A[top][j] // A[top][top]
            if q:
                for row in A:
                    row[j] -= q * row[top]
        diag.append(abs(A[top][top]))
        top += 1
    # enforce divisibility chain
    changed = True
    while changed:
        changed = False
        for k in range(len(diag) - 1):
            if diag[k + 1] % diag[k] != 0:
                g = math.gcd(diag[k], diag[k + 1])
                l = diag[k] * diag[k + 1] // g
                diag[k], diag[k + 1] = g, l
                changed = True
    return diag + [0] * (min(m, n) - len(diag))


def solve_rational(A, b):
    """One rational solution x of A x = b, or None if inconsistent."""
    m = len(A)
    n = len(A[0]) if m else 0
    M = [[Fraction(A[i][j]) for j in range(n)] + [Fraction(b[i])] for i in range(m)]
    piv_cols = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, m) if M[i][c] != 0), None)
        if pr is None:
            continue
        M[r], M[pr] = M[pr], M[r]
        M[r] = [x / M[r][c] for x in M[r]]
        for i in range(m):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [a - f * b2 for a, b2 in zip(M[i], M[r])]
        piv_cols.append(c)
        r += 1
        if r == m:
            break
    for i in range(r, m):
        if M[i][n] != 0:
            return None
    x = [Fraction(0)] * n
    for k, c in enumerate(piv_cols):
        x[c] = M[k][n]
    return x
