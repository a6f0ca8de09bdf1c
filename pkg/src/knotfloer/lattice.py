"""Exact integer linear algebra on small dense matrices.

Matrices are lists of rows of Python ints.  Column vectors are plain lists.
Nothing here uses floating point.
"""

from __future__ import annotations

from dataclasses import dataclass

Matrix = list[list[int]]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(A: Matrix, cols: int | None = None) -> Matrix:
    if not A:
        return [[] for _ in range(cols or 0)]
    return [list(c) for c in zip(*A)]


def matmul(A: Matrix, B: Matrix, inner: int | None = None, cols: int | None = None) -> Matrix:
    """A @ B; ``inner``/``cols`` disambiguate shapes when a factor is empty."""
    n = len(A)
    k = len(B) if B else (inner or 0)
    m = len(B[0]) if B else (cols or 0)
    if B and cols is not None and m != cols:
        raise ValueError("column count mismatch")
    out = zeros(n, m)
    for i in range(n):
        Ai = A[i]
        row = out[i]
        for t in range(k):
            a = Ai[t]
            if a:
                Bt = B[t]
                for j in range(m):
                    if Bt[j]:
                        row[j] += a * Bt[j]
    return out


def matvec(A: Matrix, v: list[int]) -> list[int]:
    return [sum(a * x for a, x in zip(row, v) if a and x) for row in A]


def is_zero(A: Matrix) -> bool:
    return all(x == 0 for row in A for x in row)


@dataclass
class SmithForm:
    """``U @ A @ V == D`` with ``U``, ``V`` unimodular and ``D`` diagonal.

    ``Uinv`` is kept alongside ``U`` because quotient bases need it.
    The nonzero diagonal entries are positive and each divides the next.
    """

    U: Matrix
    Uinv: Matrix
    V: Matrix
    diagonal: list[int]  # the first ``rank`` nonzero entries of D
    rows: int
    cols: int

    @property
    def rank(self) -> int:
        return len(self.diagonal)


def smith_normal_form(A: Matrix, rows: int | None = None, cols: int | None = None) -> SmithForm:
    m = len(A) if rows is None else rows
    n = (len(A[0]) if A else 0) if cols is None else cols
    D = [list(map(int, r)) for r in A] if m and n else zeros(m, n)
    U, Uinv, V = identity(m), identity(m), identity(n)

    def swap_rows(i, j):
        D[i], D[j] = D[j], D[i]
        U[i], U[j] = U[j], U[i]
        for row in Uinv:
            row[i], row[j] = row[j], row[i]

    def swap_cols(i, j):
        for row in D:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(src, dst, f):
        # row_dst += f * row_src
        if f == 0:
            return
        D[dst] = [a + f * b for a, b in zip(D[dst], D[src])]
        U[dst] = [a + f * b for a, b in zip(U[dst], U[src])]
        for row in Uinv:
            row[src] -= f * row[dst]

    def add_col(src, dst, f):
        if f == 0:
            return
        for row in D:
            row[dst] += f * row[src]
        for row in V:
            row[dst] += f * row[src]

    diag = []
    t = 0
    while t < min(m, n):
        nz = [(abs(D[i][j]), i, j) for i in range(t, m) for j in range(t, n) if D[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        swap_rows(t, pi)
        swap_cols(t, pj)
        while True:
            changed = False
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // D[t][t]
                    add_row(t, i, -q)
                    if D[i][t]:
                        swap_rows(t, i)
                        changed = True
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // D[t][t]
                    add_col(t, j, -q)
                    if D[t][j]:
                        swap_cols(t, j)
                        changed = True
            if changed:
                continue
            # pivot must divide the whole trailing block
            bad = next(
                ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if D[i][j] % D[t][t]),
                None,
            )
            if bad is None:
                break
            add_row(bad[0], t, 1)
        if D[t][t] < 0:
            D[t] = [-x for x in D[t]]
            U[t] = [-x for x in U[t]]
            for row in Uinv:
                row[t] = -row[t]
        diag.append(D[t][t])
        t += 1
    return SmithForm(U, Uinv, V, diag, m, n)


def rank(A: Matrix, rows: int | None = None, cols: int | None = None) -> int:
    return smith_normal_form(A, rows, cols).rank


def kernel_basis(A: Matrix, cols: int) -> Matrix:
    """Saturated basis of ``{x in Z^cols : A x = 0}``, one vector per column."""
    snf = smith_normal_form(A, len(A), cols)
    keep = list(range(snf.rank, cols))
    return [[snf.V[i][j] for j in keep] for i in range(cols)]


def columns(B: Matrix) -> list[list[int]]:
    return [list(c) for c in zip(*B)] if B and B[0] else []


def from_columns(vecs: list[list[int]], dim: int) -> Matrix:
    if not vecs:
        return [[] for _ in range(dim)]
    return [list(r) for r in zip(*vecs)]


class NotInLattice(ArithmeticError):
    pass


def lattice_coordinates(basis: Matrix, dim: int, vectors: list[list[int]]) -> list[list[int]]:
    """Integer coordinates of each vector in the lattice spanned by ``basis`` columns.

    ``basis`` must have independent columns.  Raises :class:`NotInLattice`
    when a vector lies outside the lattice.
    """
    k = len(basis[0]) if basis and basis[0] else 0
    if k == 0:
        for v in vectors:
            if any(v):
                raise NotInLattice("nonzero vector, empty lattice")
        return [[] for _ in vectors]
    snf = smith_normal_form(basis, dim, k)
    if snf.rank != k:
        raise ValueError("basis columns are dependent")
    out = []
    for v in vectors:
        w = matvec(snf.U, v)
        z = []
        for i, d in enumerate(snf.diagonal):
            if w[i] % d:
                raise NotInLattice("vector outside lattice")
            z.append(w[i] // d)
        if any(w[k:]):
            raise NotInLattice("vector outside lattice span")
        out.append(matvec(snf.V, z))
    return out


@dataclass
class Quotient:
    """``M / S`` for a sublattice ``S`` of ``Z^dim`` given by generators.

    ``free_lifts`` are vectors of ``Z^dim`` whose classes form a basis of the
    free part; ``free_coords`` maps a vector to its free coordinates (the
    torsion component is dropped).
    """

    dim: int
    free_rank: int
    torsion: list[int]
    _U: Matrix
    _offset: int
    free_lifts: list[list[int]]

    def free_coords(self, v: list[int]) -> list[int]:
        return [sum(a * x for a, x in zip(self._U[i], v)) for i in range(self._offset, self.dim)]


def quotient(dim: int, sub_generators: list[list[int]]) -> Quotient:
    S = from_columns(sub_generators, dim)
    snf = smith_normal_form(S, dim, len(sub_generators))
    r = snf.rank
    torsion = [d for d in snf.diagonal if d > 1]
    lifts = [[snf.Uinv[i][j] for i in range(dim)] for j in range(r, dim)]
    return Quotient(dim, dim - r, torsion, snf.U, r, lifts)
