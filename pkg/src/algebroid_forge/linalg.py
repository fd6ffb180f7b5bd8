"""Small linear-algebra helpers.

Floating-point subspace work (rank, null space, containment) is SVD-based
with a tolerance relative to the largest singular value. Exact work over the
rationals (kernels, span intersections, reduced row echelon form) backs the
Lie-algebra quotient machinery.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

import numpy as np

__all__ = [
    "numerical_rank", "nullspace", "subspace_contains", "subspaces_equal",
    "rref", "rational_nullspace", "rational_span_intersection",
    "in_rational_span",
]


def numerical_rank(m: np.ndarray, tol: float) -> int:
    """Rank with singular values below tol * (largest sv) counted as zero."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0:
        return 0
    sv = np.linalg.svd(m, compute_uv=False)
    top = sv[0] if len(sv) else 0.0
    if top <= tol:
        return 0
    return int(np.sum(sv > tol * top))


def nullspace(m: np.ndarray, tol: float) -> np.ndarray:
    """Orthonormal basis (columns) of the right null space of ``m``."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0:
        return np.eye(m.shape[1] if m.ndim == 2 else 0)
    u, sv, vh = np.linalg.svd(m)
    top = sv[0] if len(sv) else 0.0
    if top <= tol:
        rank = 0
    else:
        rank = int(np.sum(sv > tol * top))
    return vh[rank:].T


def subspace_contains(basis: np.ndarray, vectors: np.ndarray, tol: float) -> bool:
    """True when every column of ``vectors`` lies in the span of ``basis``."""
    basis = np.atleast_2d(np.asarray(basis, dtype=float))
    vectors = np.atleast_2d(np.asarray(vectors, dtype=float))
    if vectors.size == 0 or numerical_rank(vectors, tol) == 0:
        return True
    joint = np.hstack([basis, vectors])
    return numerical_rank(joint, tol) == numerical_rank(basis, tol)


def subspaces_equal(a: np.ndarray, b: np.ndarray, tol: float) -> bool:
    ra = numerical_rank(a, tol)
    rb = numerical_rank(b, tol)
    if ra != rb:
        return False
    return numerical_rank(np.hstack([a, b]), tol) == ra


# ---------------------------------------------------------------------------
# Exact rational linear algebra (small dimensions only)


def rref(rows: Sequence[Sequence[Fraction]]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (rows, pivot column indices)."""
    m = [list(map(Fraction, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    row = 0
    for col in range(ncols):
        pivot = None
        for r in range(row, len(m)):
            if m[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        m[row], m[pivot] = m[pivot], m[row]
        inv = Fraction(1) / m[row][col]
        m[row] = [v * inv for v in m[row]]
        for r in range(len(m)):
            if r != row and m[r][col] != 0:
                f = m[r][col]
                m[r] = [a - f * b for a, b in zip(m[r], m[row])]
        pivots.append(col)
        row += 1
        if row == len(m):
            break
    return [r for r in m if any(v != 0 for v in r)], pivots


def rational_nullspace(rows: Sequence[Sequence[Fraction]], ncols: int) -> list[list[Fraction]]:
    """Basis of {x : rows @ x = 0}, in RREF-normalized form."""
    reduced, pivots = rref(rows)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        vec = [Fraction(0)] * ncols
        vec[f] = Fraction(1)
        for r, p in zip(reduced, pivots):
            vec[p] = -r[f]
        basis.append(vec)
    return basis


def in_rational_span(basis: Sequence[Sequence[Fraction]], vec: Sequence[Fraction]) -> bool:
    if all(v == 0 for v in vec):
        return True
    if not basis:
        return False
    reduced, pivots = rref(basis)
    residual = list(map(Fraction, vec))
    for r, p in zip(reduced, pivots):
        if residual[p] != 0:
            f = residual[p]
            residual = [a - f * b for a, b in zip(residual, r)]
    return all(v == 0 for v in residual)


def rational_span_intersection(a: Sequence[Sequence[Fraction]],
                               b: Sequence[Sequence[Fraction]]) -> list[list[Fraction]]:
    """Basis of span(a) n span(b); inputs are lists of row vectors."""
    if not a or not b:
        return []
    dim = len(a[0])
    # x in both spans iff x = sum s_i a_i = sum t_j b_j; solve [A^T | -B^T] z = 0.
    rows = []
    for d in range(dim):
        rows.append([Fraction(v[d]) for v in a] + [-Fraction(v[d]) for v in b])
    sols = rational_nullspace(rows, len(a) + len(b))
    vectors = []
    for z in sols:
        vec = [Fraction(0)] * dim
        for i, s in enumerate(z[:len(a)]):
            for d in range(dim):
                vec[d] += s * Fraction(a[i][d])
        if any(v != 0 for v in vec):
            vectors.append(vec)
    reduced, _ = rref(vectors) if vectors else ([], [])
    return reduced
