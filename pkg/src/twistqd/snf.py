"""Integer Smith normal form with unimodular transforms, and linear solving
over the divisible group Q/Z.

For an integer matrix A the factorization is S = U @ A @ V with U, V
unimodular and S diagonal, s_1 | s_2 | ... .  Because Q/Z is divisible,
A x = b has a solution x in (Q/Z)^n iff (U b)_i is an integer for every
zero row s_i = 0; nonzero diagonal entries can always be divided out.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence


def smith_normal_form(A: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[list[int]], list[list[int]]]:
    """Return (U, S, V) with S = U*A*V in Smith normal form.

    Pure-integer row/column reduction; fine for the small systems that arise
    from coboundary equations on subgroups (at most a few hundred rows).
    """
    S = [list(map(int, row)) for row in A]
    m = len(S)
    n = len(S[0]) if m else 0
    U = [[int(i == j) for j in range(m)] for i in range(m)]
    V = [[int(i == j) for j in range(n)] for i in range(n)]

    def row_op(i, j, q):  # row_i -= q * row_j
        S[i] = [a - q * b for a, b in zip(S[i], S[j])]
        U[i] = [a - q * b for a, b in zip(U[i], U[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for row in S:
            row[i] -= q * row[j]
        for row in V:
            row[i] -= q * row[j]

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def negate_row(i):
        S[i] = [-a for a in S[i]]
        U[i] = [-a for a in U[i]]

    t = 0
    while t < min(m, n):
        # pivot: smallest nonzero |entry| in the remaining block
        piv = None
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if S[i][j] != 0 and (best is None or abs(S[i][j]) < best):
                    best = abs(S[i][j])
                    piv = (i, j)
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        if S[t][t] < 0:
            negate_row(t)
        dirty = False
        for i in range(t + 1, m):
            if S[i][t] % S[t][t] != 0:
                dirty = True
            q = S[i][t] // S[t][t]
            if q:
                row_op(i, t, q)
        for j in range(t + 1, n):
            if S[t][j] % S[t][t] != 0:
                dirty = True
            q = S[t][j] // S[t][t]
            if q:
                col_op(j, t, q)
        if dirty or any(S[i][t] for i in range(t + 1, m)) or any(S[t][j] for j in range(t + 1, n)):
            continue  # remainders created new smaller entries; redo this pivot
        # enforce divisibility s_t | everything below-right
        offender = None
        for i in range(t + 1, m):
            for j in range(t + 1, n):
                if S[i][j] % S[t][t] != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            # add offending row to row t and restart the pivot
            S[t] = [a + b for a, b in zip(S[t], S[offender])]
            U[t] = [a + b for a, b in zip(U[t], U[offender])]
            continue
        t += 1
    return U, S, V


def solve_mod1(A: Sequence[Sequence[int]], b: Sequence[Fraction]) -> list[Fraction] | None:
    """Solve A x = b over Q/Z; returns x as fractions in [0,1) or None.

    Solvability only obstructs on zero rows of the Smith form since every
    multiplication-by-nonzero-integer map on Q/Z is surjective.
    """
    m = len(A)
    n = len(A[0]) if m else 0
    U, S, V = smith_normal_form(A)
    c = [sum(Fraction(U[i][j]) * b[j] for j in range(m)) for i in range(m)]
    y = [Fraction(0)] * n
    for i in range(m):
        s = S[i][i] if i < n else 0
        if s == 0:
            if c[i].denominator != 1:
                return None
        elif i < n:
            y[i] = c[i] / s
    x = [sum(Fraction(V[i][j]) * y[j] for j in range(n)) % 1 for i in range(n)]
    return x
