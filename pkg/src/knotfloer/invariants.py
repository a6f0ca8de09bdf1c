"""Seifert form, signature and determinant of a braid closure.

The Seifert surface is the usual one for a closed braid: one disk per strand,
one half-twisted band per letter.  For each column (the gap between strands
``c`` and ``c+1``) consecutive bands bound a loop; these loops form a basis of
first homology, so a knot braid with ``L`` letters on ``n`` strands gives a
``(L - n + 1)``-square form.

Everything here is exact integer / rational arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .braid import BraidError, BraidWord, closure_info


@dataclass(frozen=True)
class SeifertMatrix:
    entries: tuple[tuple[int, ...], ...]
    loops: tuple[tuple[int, int, int], ...]  # (column, first band, second band)

    @property
    def size(self) -> int:
        return len(self.entries)

    def symmetrized(self) -> list[list[int]]:
        g = self.size
        return [[self.entries[i][j] + self.entries[j][i] for j in range(g)] for i in range(g)]


def _loops(b: BraidWord) -> list[tuple[int, int, int]]:
    out = []
    for c in range(1, b.strands):
        bands = [p for p, e in enumerate(b.letters) if abs(e) == c]
        out.extend((c, bands[k], bands[k + 1]) for k in range(len(bands) - 1))
    return out


def seifert_matrix(b: BraidWord) -> SeifertMatrix:
    info = closure_info(b)
    if not info.is_knot:
        raise BraidError(f"closure has {info.components} components, expected a knot")
    # A knot closure forces a transitive permutation, so every column carries a
    # letter and the band graph is connected.
    loops = _loops(b)
    g = len(loops)
    sign = [1 if e > 0 else -1 for e in b.letters]
    V = [[0] * g for _ in range(g)]
    for i, (c, a, bb) in enumerate(loops):
        V[i][i] = -(sign[a] + sign[bb]) // 2
        for j, (c2, a2, b2) in enumerate(loops):
            if c2 == c and a2 == bb:
                # neighbours sharing band bb; the twist of bb decides the side
                if sign[bb] > 0:
                    V[i][j] = 1
                else:
                    V[j][i] = -1
            elif c2 == c + 1:
                if a < a2 < bb < b2:
                    V[i][j] = 1
                elif a2 < a < b2 < bb:
                    V[i][j] = -1
    return SeifertMatrix(tuple(tuple(r) for r in V), tuple(loops))


def congruence_inertia(M: list[list[int]]) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric rational matrix.

    Symmetric Gaussian elimination: row and column operations applied in
    pairs, so the result is congruent to the input and Sylvester's law applies.
    """
    A = [[Fraction(x) for x in row] for row in M]
    n = len(A)
    pos = neg = 0
    for i in range(n):
        if A[i][i] == 0:
            j = next((j for j in range(i + 1, n) if A[j][j] != 0), None)
            if j is not None:
                A[i], A[j] = A[j], A[i]
                for row in A:
                    row[i], row[j] = row[j], row[i]
            else:
                j = next((j for j in range(i + 1, n) if A[i][j] != 0), None)
                if j is None:
                    continue
                # diagonal of i becomes 2*A[i][j] != 0
                for k in range(n):
                    A[i][k] += A[j][k]
                for k in range(n):
                    A[k][i] += A[k][j]
        p = A[i][i]
        for r in range(i + 1, n):
            f = A[r][i] / p
            if f:
                # the trailing block stays symmetric, so the matching column
                # operation only clears A[i][r]
                for k in range(i, n):
                    A[r][k] -= f * A[i][k]
        for r in range(i + 1, n):
            A[i][r] = Fraction(0)
        if p > 0:
            pos += 1
        else:
            neg += 1
    return pos, neg, n - pos - neg


def integer_det(M: list[list[int]]) -> int:
    """Bareiss fraction-free determinant."""
    A = [list(map(int, row)) for row in M]
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            swap = next((r for r in range(k + 1, n) if A[r][k] != 0), None)
            if swap is None:
                return 0
            A[k], A[swap] = A[swap], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def signature(b: BraidWord) -> int:
    pos, neg, _ = congruence_inertia(seifert_matrix(b).symmetrized())
    return pos - neg


def determinant(b: BraidWord) -> int:
    return abs(integer_det(seifert_matrix(b).symmetrized()))
