"""Exact linear algebra over the rationals: reduced echelon form,
nullspaces, and congruence diagonalisation of symmetric matrices.

Everything works on lists of Fractions; nothing here touches floating
point, so results feed directly into certificates.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


class IndefiniteError(ValueError):
    """A symmetric matrix turned out not to be positive semidefinite."""


def rref(rows: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form and pivot column indices."""
    mat = [[Fraction(x) for x in row] for row in rows]
    pivots = []
    r = 0
    cols = len(mat[0]) if mat else 0
    for c in range(cols):
        pivot = next((i for i in range(r, len(mat)) if mat[i][c] != 0), None)
        if pivot is None:
            continue
        mat[r], mat[pivot] = mat[pivot], mat[r]
        inv = 1 / mat[r][c]
        mat[r] = [x * inv for x in mat[r]]
        for i in range(len(mat)):
            if i != r and mat[i][c] != 0:
                factor = mat[i][c]
                mat[i] = [a - factor * b for a, b in zip(mat[i], mat[r])]
        pivots.append(c)
        r += 1
        if r == len(mat):
            break
    return mat[:r], pivots


def primitive(vector: list[Fraction]) -> tuple[Fraction, ...]:
    """Scale a rational vector to coprime integers (first nonzero positive)."""
    denoms = [x.denominator for x in vector]
    scale = 1
    for d in denoms:
        scale = scale * d // gcd(scale, d)
    ints = [int(x * scale) for x in vector]
    g = 0
    for v in ints:
        g = gcd(g, abs(v))
    if g:
        ints = [v // g for v in ints]
    lead = next((v for v in ints if v), 0)
    if lead < 0:
        ints = [-v for v in ints]
    return tuple(Fraction(v) for v in ints)


def nullspace(rows: list[list[Fraction]]) -> list[tuple[Fraction, ...]]:
    """Basis of {x : Vx = 0}, as primitive integer vectors."""
    if not rows:
        return []
    cols = len(rows[0])
    red, pivots = rref(rows)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * cols
        vec[f] = Fraction(1)
        for i, p in enumerate(pivots):
            vec[p] = -red[i][f]
        basis.append(primitive(vec))
    return basis


def mat_mul(a, b):
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    return [
        [sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)]
        for i in range(rows)
    ]


def transpose(a):
    return [list(row) for row in zip(*a)] if a else []


def ldl_congruence(a: list[list[Fraction]]) -> tuple[list[list[Fraction]], list[Fraction]]:
    """Factor a symmetric rational matrix as A = B diag(D) B^T with B square
    and invertible, by symmetric-pivoted elimination.

    D may contain negative entries for indefinite input.  Raises
    IndefiniteError when a zero pivot has a nonzero residual row: such a
    matrix is certainly not positive semidefinite and needs 2x2 pivots,
    which certificates never require.
    """
    z = len(a)
    m = [[Fraction(x) for x in row] for row in a]
    for i in range(z):
        if any(m[i][j] != m[j][i] for j in range(z)):
            raise ValueError("matrix is not symmetric")
    perm = list(range(z))
    lower = [[Fraction(1) if i == j else Fraction(0) for j in range(z)] for i in range(z)]
    d = [Fraction(0)] * z
    for k in range(z):
        pivot = max(range(k, z), key=lambda i: abs(m[i][i]))
        if m[pivot][pivot] == 0:
            if any(m[i][j] != 0 for i in range(k, z) for j in range(k, z)):
                raise IndefiniteError(
                    "zero pivot with nonzero residual: matrix is not PSD"
                )
            break
        if pivot != k:
            perm[k], perm[pivot] = perm[pivot], perm[k]
            m[k], m[pivot] = m[pivot], m[k]
            for row in m:
                row[k], row[pivot] = row[pivot], row[k]
            # swap only the columns built so far; unit diagonal is positional
            for j in range(k):
                lower[k][j], lower[pivot][j] = lower[pivot][j], lower[k][j]
        d[k] = m[k][k]
        col = [m[i][k] / d[k] for i in range(k + 1, z)]
        for i in range(k + 1, z):
            lower[i][k] = col[i - k - 1]
            for j in range(k + 1, z):
                m[i][j] -= col[i - k - 1] * m[k][j]
        for i in range(k + 1, z):
            m[i][k] = Fraction(0)
            m[k][i] = Fraction(0)
    # undo the permutation: rows of `lower` currently follow pivot order
    b = [[Fraction(0)] * z for _ in range(z)]
    for i in range(z):
        b[perm[i]] = lower[i]
    return b, d


def is_psd(a: list[list[Fraction]]) -> bool:
    try:
        _, d = ldl_congruence(a)
    except IndefiniteError:
        return False
    return all(x >= 0 for x in d)
