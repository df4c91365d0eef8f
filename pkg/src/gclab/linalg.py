"""Complex subspace tools: rank decisions, intersections, memberships, frames.

Rank thresholding follows a fixed policy: singular values below
RANK_RTOL * s_max count as zero, and values landing inside the decade above
the threshold raise ToleranceAmbiguity instead of silently guessing.
"""

from __future__ import annotations

import numpy as np

from .errors import ToleranceAmbiguity
from .jets import Jet, jstack

RANK_RTOL = 1e-9
STRADDLE_FACTOR = 10.0


def rank_by_svd(cols: np.ndarray, rtol: float = RANK_RTOL):
    """(rank, svals) with the straddle-band guard."""
    if cols.size == 0:
        return 0, np.array([])
    s = np.linalg.svd(cols, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0, s
    thr = rtol * s[0]
    inside = [v for v in s if thr <= v < STRADDLE_FACTOR * thr]
    if inside:
        raise ToleranceAmbiguity(
            f"singular values {inside} straddle the rank threshold {thr:.3e}")
    return int(np.sum(s >= STRADDLE_FACTOR * thr)), s


def orth_basis(cols: np.ndarray, rtol: float = RANK_RTOL) -> np.ndarray:
    """Orthonormal basis (Hermitian inner product) of the column span."""
    if cols.size == 0:
        return cols.reshape(cols.shape[0], 0)
    U, s, _ = np.linalg.svd(cols, full_matrices=False)
    r, _ = rank_by_svd(cols, rtol)
    return U[:, :r]


def membership_residual(v: np.ndarray, cols: np.ndarray) -> float:
    """Norm of the component of v orthogonal to span(cols)."""
    Q = orth_basis(cols)
    if Q.shape[1] == 0:
        return float(np.linalg.norm(v))
    res = v - Q @ (Q.conj().T @ v)
    return float(np.linalg.norm(res))


def subspace_intersection(A: np.ndarray, B: np.ndarray,
                          rtol: float = RANK_RTOL) -> np.ndarray:
    """Basis of span(A) & span(B) via the nullspace of [Q_A, -Q_B]."""
    QA, QB = orth_basis(A, rtol), orth_basis(B, rtol)
    if QA.shape[1] == 0 or QB.shape[1] == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    M = np.hstack([QA, -QB])
    U, s, Vh = np.linalg.svd(M)
    thr = rtol * max(s[0], 1.0)
    null_dim = int(np.sum(s < STRADDLE_FACTOR * thr)) + (Vh.shape[0] - s.size)
    inside = [v for v in s if thr <= v < STRADDLE_FACTOR * thr]
    if inside:
        raise ToleranceAmbiguity(
            f"intersection singular values {inside} straddle threshold")
    if null_dim == 0:
        return np.zeros((A.shape[0], 0), dtype=complex)
    null_vecs = Vh.conj().T[:, -null_dim:]
    inter = QA @ null_vecs[:QA.shape[1], :]
    return orth_basis(inter, rtol)


def subspace_dim(A: np.ndarray, rtol: float = RANK_RTOL) -> int:
    r, _ = rank_by_svd(A, rtol)
    return r


def spans_equal(A: np.ndarray, B: np.ndarray, tol: float = 1e-8) -> bool:
    if subspace_dim(A) != subspace_dim(B):
        return False
    QB = orth_basis(B)
    return all(membership_residual(A[:, i], QB) <= tol * max(1.0, np.linalg.norm(A[:, i]))
               for i in range(A.shape[1]))


# --- jet-level frame machinery ---------------------------------------------------

def select_pivot_columns(values: np.ndarray, rank: int, min_pivot: float = 1e-6):
    """Greedy RRQR column selection on a value matrix; deterministic ties.

    Returns the chosen column indices; used to pick a well-conditioned frame
    among projector-transported candidates.
    """
    work = values.astype(complex).copy()
    chosen = []
    for _ in range(rank):
        norms = np.linalg.norm(work, axis=0)
        j = int(np.argmax(norms))
        if norms[j] < min_pivot:
            break
        chosen.append(j)
        q = work[:, j] / norms[j]
        work = work - np.outer(q, q.conj() @ work)
        work[:, j] = 0.0
    return chosen


def jet_gram_schmidt(columns: list, renormalize: bool = True) -> list:
    """Hermitian Gram-Schmidt on jet-vectors; keeps spans and smoothness.

    Divisions are by norm jets whose values stay away from zero because the
    caller pre-selects well-conditioned columns.
    """
    out = []
    for col in columns:
        w = col
        for q in out:
            coef = _jherm(q, w)
            w = w - q * coef
        if renormalize:
            n2 = _jherm(w, w).real_part()
            w = w * n2.powr(-0.5)
        out.append(w)
    return out


def _jherm(u: Jet, v: Jet) -> Jet:
    acc = None
    for i in range(u.shape[0]):
        term = u[i].conj() * v[i]
        acc = term if acc is None else acc + term
    return acc


def jet_solve_in_span(frame_cols: list, w: Jet, rtol: float = RANK_RTOL):
    """Expand jet-vector w in the span of jet frame columns.

    Solves the square system picked from the best-conditioned rows (value
    level), with jet arithmetic so coefficients keep derivatives.  Returns
    (coeff jets list, value-level residual of the remaining rows).
    """
    m = frame_cols[0].shape[0]
    r = len(frame_cols)
    V = np.stack([c.value for c in frame_cols], axis=1)
    # choose r independent rows by RRQR on V^T
    rows = select_pivot_columns(V.T.conj(), r, min_pivot=0.0)
    if len(rows) < r:
        raise ToleranceAmbiguity("frame rows could not be selected")
    A = [[frame_cols[j][i] for j in range(r)] for i in rows]
    # Gauss with jets on the r x r system
    coeffs = _jet_solve_square(A, [w[i] for i in rows])
    # residual on all rows at value level
    approx = np.zeros(m, dtype=complex)
    for j, c in enumerate(coeffs):
        approx += frame_cols[j].value * complex(c.value)
    resid = float(np.linalg.norm(w.value - approx))
    return coeffs, resid


def _jet_solve_square(A, b):
    n = len(b)
    M = [row[:] for row in A]
    rhs = b[:]
    for col in range(n):
        piv = max(range(col, n), key=lambda rr: abs(M[rr][col].value))
        if piv != col:
            M[col], M[piv] = M[piv], M[col]
            rhs[col], rhs[piv] = rhs[piv], rhs[col]
        inv = M[col][col].reciprocal()
        M[col] = [inv * x for x in M[col]]
        rhs[col] = inv * rhs[col]
        for rr in range(n):
            if rr == col:
                continue
            f = M[rr][col]
            if f.max_abs() == 0.0:
                continue
            M[rr] = [M[rr][j] - f * M[col][j] for j in range(n)]
            rhs[rr] = rhs[rr] - f * rhs[col]
    return rhs
