"""Exact Gaussian elimination over a coefficient field."""

from __future__ import annotations

from typing import Sequence

from .poly import Field


def rref(rows: Sequence[Sequence], ncols: int, field: Field) -> tuple[list[list], list[int]]:
    """Reduced row echelon form and pivot columns."""
    M = [[field(a) for a in row] for row in rows]
    mod = field.modulus
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(M)) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        inv = field.inv(M[r][c])
        M[r] = [x * inv % mod if mod else x * inv for x in M[r]]
        for i in range(len(M)):
            if i != r and M[i][c] != 0:
                f = M[i][c]
                M[i] = [(x - f * y) % mod if mod else x - f * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
        if r == len(M):
            break
    return M, pivots


def rank(rows: Sequence[Sequence], field: Field) -> int:
    if not rows:
        return 0
    return len(rref(rows, len(rows[0]), field)[1])


def kernel_basis(rows: Sequence[Sequence], ncols: int, field: Field) -> list[list]:
    """Basis of {v : rows * v = 0}, one vector per free column."""
    M, pivots = rref(rows, ncols, field) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    mod = field.modulus
    basis = []
    for fc in free:
        v = [field(0)] * ncols
        v[fc] = field(1)
        for r, pc in enumerate(pivots):
            val = -M[r][fc]
            v[pc] = val % mod if mod else val
        basis.append(v)
    return basis
