"""Almost-symplectic frames for the skew forms B_lambda(V, V') = lambda([V, V']).

For a nondegenerate lambda the frame is an orthonormal basis
X_1, Y_1, ..., X_n, Y_n of v with

    lambda([X_i, Y_j]) = delta_ij d_j,   lambda([X_i, X_j]) = lambda([Y_i, Y_j]) = 0,

and d_1 >= ... >= d_n > 0.  In matrix terms ``X.T @ B @ Y = diag(d)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULTS
from .errors import DimensionError, NondegeneracyError
from .nilgroup import TwoStepAlgebra

# relative gap below which two singular values share an eigenspace
_CLUSTER_RTOL = 1e-9
# relative slack when breaking ties between basis directions
_TIE_RTOL = 1e-8


@dataclass(frozen=True)
class CentralFunctional:
    """lambda = sum_l lambda_l T_l^* as a k-vector."""

    lam: np.ndarray

    def __post_init__(self):
        lam = np.atleast_1d(np.asarray(self.lam, dtype=float))
        if lam.ndim != 1 or not np.all(np.isfinite(lam)):
            raise ValueError("central functional must be a finite 1-D vector")
        object.__setattr__(self, "lam", lam)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.lam))


def as_functional(lam) -> np.ndarray:
    if isinstance(lam, CentralFunctional):
        return lam.lam
    return CentralFunctional(lam).lam


@dataclass(frozen=True, eq=False)
class SymplecticFrame:
    """Frame {X_j, Y_j} with weights d_j for one functional.

    ``K`` is empty for nondegenerate lambda; degenerate frames (built with
    ``allow_degenerate=True``) carry an orthonormal basis of the radical there.
    """

    X: np.ndarray
    Y: np.ndarray
    d: np.ndarray
    lam: np.ndarray
    K: np.ndarray = field(default=None)

    def __post_init__(self):
        if self.K is None:
            object.__setattr__(self, "K", np.zeros((self.X.shape[0], 0)))

    @property
    def m(self) -> int:
        return self.X.shape[0]

    @property
    def n(self) -> int:
        return self.X.shape[1]

    @property
    def Dmat(self) -> np.ndarray:
        """Orthogonal matrix with columns X_1, Y_1, ..., X_n, Y_n (then radical)."""
        cols = np.empty((self.m, 2 * self.n))
        cols[:, 0::2] = self.X
        cols[:, 1::2] = self.Y
        return np.hstack([cols, self.K])

    @property
    def degenerate(self) -> bool:
        return self.K.shape[1] > 0


def b_matrix(a: TwoStepAlgebra, lam) -> np.ndarray:
    """Matrix of B_lambda in the {V_i} basis; exactly skew."""
    lam = as_functional(lam)
    if lam.shape != (a.k,):
        raise DimensionError(f"functional has length {lam.shape[0]}, expected k={a.k}")
    return np.einsum("ijl,l->ij", np.asarray(a.c, dtype=float), lam)


def _spectral_clusters(B, tol):
    """Split v into B-invariant eigenspaces of -B^2 and the numerical radical.

    Returns (clusters, kernel) with clusters a list of (sigma, basis) in
    descending sigma; each basis has an even number of orthonormal columns.
    """
    _, s, vh = np.linalg.svd(B)
    scale = s[0] if s.size and s[0] > 0 else 0.0
    live = s > tol * scale if scale > 0 else np.zeros_like(s, dtype=bool)
    kernel = vh[~live].T
    clusters = []
    idx = np.flatnonzero(live)
    start = 0
    while start < idx.size:
        stop = start + 1
        while stop < idx.size and s[idx[stop - 1]] - s[idx[stop]] <= _CLUSTER_RTOL * scale:
            stop += 1
        block = idx[start:stop]
        clusters.append((float(s[block].mean()), vh[block].T))
        start = stop
    return clusters, kernel


def _remove(basis, *vectors):
    """Orthonormal basis of span(basis) minus the given orthonormal vectors."""
    keep = basis.shape[1] - len(vectors)
    if keep <= 0:
        return basis[:, :0]
    rest = basis.copy()
    for u in vectors:
        rest -= np.outer(u, u @ rest)
    q, _, _ = np.linalg.svd(rest, full_matrices=False)
    return q[:, :keep]


def _sign_fix(x, y):
    mag = np.abs(x)
    pivot = int(np.flatnonzero(mag >= mag.max() * (1 - _TIE_RTOL))[0])
    if x[pivot] < 0:
        return -x, -y
    return x, y


def _pair_from(B, x):
    x = x / np.linalg.norm(x)
    y = B.T @ x
    d = np.linalg.norm(y)
    return x, y / d, d


def _canonical_pairs(B, basis):
    """Deterministic symplectic pairs inside one B-invariant eigenspace."""
    pairs = []
    remaining = basis
    while remaining.shape[1] >= 2:
        weights = np.linalg.norm(remaining, axis=1)
        pivot = int(np.flatnonzero(weights >= weights.max() * (1 - _TIE_RTOL))[0])
        x, y, d = _pair_from(B, remaining @ remaining[pivot])
        x, y = _sign_fix(x, y)
        pairs.append((x, y, d))
        remaining = _remove(remaining, x, y)
    return pairs


def _assemble(pairs, lam, kernel):
    m = kernel.shape[0]
    X = np.array([p[0] for p in pairs]).T.reshape(m, len(pairs))
    Y = np.array([p[1] for p in pairs]).T.reshape(m, len(pairs))
    d = np.array([p[2] for p in pairs], dtype=float)
    return SymplecticFrame(X, Y, d, np.array(lam, dtype=float), kernel)


def _degeneracy_message(a, lam, B, tol):
    s = np.linalg.svd(B, compute_uv=False)
    smin = s[-1] if s.size else 0.0
    return (f"B_lambda is degenerate for {a!r} at lambda={np.round(lam, 12).tolist()}: "
            f"smallest singular value {smin:.3e} <= {tol:.1e} * ||B|| = {tol * (s[0] if s.size else 0):.3e}")


def frame(a: TwoStepAlgebra, lam, tol: float = DEFAULTS.nondegeneracy_tol,
          allow_degenerate: bool = False) -> SymplecticFrame:
    """Almost-symplectic frame at lambda.

    Within each eigenspace of -B^2 the X vectors are projections of the
    standard basis vectors carrying the most weight, and Y = B^T X / d, so the
    result is deterministic and invariant under lambda -> r lambda.
    """
    lam = as_functional(lam)
    B = b_matrix(a, lam)
    if a.m % 2 and not allow_degenerate:
        raise NondegeneracyError(f"{a!r} has odd dim v = {a.m}; every B_lambda is degenerate")
    clusters, kernel = _spectral_clusters(B, tol)
    if kernel.shape[1] and not allow_degenerate:
        raise NondegeneracyError(_degeneracy_message(a, lam, B, tol))
    pairs = []
    for _, basis in clusters:
        pairs.extend(_canonical_pairs(B, basis))
    return _assemble(pairs, lam, kernel)


def frame_aligned(a: TwoStepAlgebra, lam_path, tol: float = DEFAULTS.nondegeneracy_tol,
                  allow_degenerate: bool = False) -> list[SymplecticFrame]:
    """Frames along a path of functionals, each aligned with its predecessor.

    Every previous X_j is projected into the eigenspace of the new -B^2 that
    captures it best; this keeps both signs and bases inside repeated
    eigenspaces continuous along finely sampled paths.
    """
    lam_path = [as_functional(lam) for lam in lam_path]
    if not lam_path:
        return []
    frames = [frame(a, lam_path[0], tol, allow_degenerate)]
    for lam in lam_path[1:]:
        prev = frames[-1]
        B = b_matrix(a, lam)
        clusters, kernel = _spectral_clusters(B, tol)
        if kernel.shape[1] != prev.K.shape[1] or (kernel.shape[1] and not allow_degenerate):
            raise NondegeneracyError(_degeneracy_message(a, lam, B, tol))
        remaining = [basis for _, basis in clusters]
        assigned = [[] for _ in clusters]
        for j in range(prev.n):
            xp = prev.X[:, j]
            weights = [np.linalg.norm(r.T @ xp) if r.shape[1] >= 2 else -1.0 for r in remaining]
            c = int(np.argmax(weights))
            r = remaining[c]
            proj = r @ (r.T @ xp)
            if np.linalg.norm(proj) < 1e-3:
                # no memory of the previous direction: fall back to a canonical pick
                proj = _canonical_pairs(B, r)[0][0]
            x, y, d = _pair_from(B, proj)
            assigned[c].append((x, y, d))
            remaining[c] = _remove(r, x, y)
        pairs = [p for group in assigned for p in group]
        frames.append(_assemble(pairs, lam, kernel))
    return frames


def frame_residuals(a: TwoStepAlgebra, fr: SymplecticFrame) -> dict:
    """Max-norm residuals of the frame identities and the scale 1 + ||B||."""
    B = b_matrix(a, fr.lam)
    D = fr.Dmat
    return {
        "orthonormality": float(np.abs(D.T @ D - np.eye(D.shape[1])).max()),
        "pairing": float(np.abs(fr.X.T @ B @ fr.Y - np.diag(fr.d)).max()) if fr.n else 0.0,
        "xx": float(np.abs(fr.X.T @ B @ fr.X).max()) if fr.n else 0.0,
        "yy": float(np.abs(fr.Y.T @ B @ fr.Y).max()) if fr.n else 0.0,
        "scale": 1.0 + float(np.linalg.norm(B, 2)),
    }


def homogeneity_check(a: TwoStepAlgebra, lam, r: float, tol: float = DEFAULTS.nondegeneracy_tol) -> float:
    """max_j |d_j(r lambda) - r d_j(lambda)|."""
    if r <= 0:
        raise ValueError("scale factor must be positive")
    lam = as_functional(lam)
    d1 = frame(a, lam, tol).d
    d2 = frame(a, r * lam, tol).d
    return float(np.abs(d2 - r * d1).max())
