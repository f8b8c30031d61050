"""Dense complex matrix kernels: Jacobi eigensolver, ranks, psd projection.

The eigensolver is a cyclic complex Jacobi iteration: each rotation
unitarily annihilates one off-diagonal pair, sweeping until the
off-diagonal Frobenius mass drops below tolerance.  Singular values are
obtained from the eigenvalues of A*A, reusing the one kernel.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, SymmetryViolation, ZeroTensor

EIG_TOL = 1e-10
RANK_REL_TOL = 1e-8
MAX_SWEEPS = 64


@dataclass(frozen=True)
class SpectralDecomp:
    """Eigenvalues ascending; eigenvectors as the matching unitary columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.conj().T


def _check_hermitian(a, tol_scale: float = 1e-8) -> np.ndarray:
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise SymmetryViolation(f"expected a square matrix, got shape {a.shape}")
    scale = float(np.abs(a).max()) if a.size else 0.0
    dev = float(np.abs(a - a.conj().T).max()) if a.size else 0.0
    if dev > tol_scale * max(1.0, scale):
        raise SymmetryViolation(f"matrix is not Hermitian: deviation {dev:.3e}")
    return (a + a.conj().T) / 2.0


def herm_eig(a, eig_tol: float = EIG_TOL, max_sweeps: int = MAX_SWEEPS) -> SpectralDecomp:
    """Full spectral decomposition of a Hermitian matrix.

    Cyclic Jacobi: for each pivot (p, q) the 2x2 principal block is
    diagonalized by a unitary rotation; sweeps repeat until
    off(A) <= eig_tol * ||A||_F.  Real symmetric input stays exactly real.
    """
    a = _check_hermitian(a)
    n = a.shape[0]
    if n == 1:
        return SpectralDecomp(a.real.reshape(1).copy(), np.ones((1, 1), dtype=np.complex128))
    fro = float(np.linalg.norm(a))
    v = np.eye(n, dtype=np.complex128)
    if fro == 0.0:
        return SpectralDecomp(np.zeros(n), v)
    target = eig_tol * fro
    skip = 0.05 * target / n
    converged = False
    for _ in range(max_sweeps):
        offmass = float(np.linalg.norm(a - np.diag(np.diagonal(a))))
        if offmass <= target:
            converged = True
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                h = a[p, q]
                ah = abs(h)
                if ah <= skip:
                    continue
                phase = h / ah
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * ah)
                if tau >= 0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                u = np.array(
                    [[c, s], [-s * np.conj(phase), c * np.conj(phase)]],
                    dtype=np.complex128,
                )
                cols = a[:, (p, q)] @ u
                a[:, p] = cols[:, 0]
                a[:, q] = cols[:, 1]
                rows = u.conj().T @ a[(p, q), :]
                a[p, :] = rows[0]
                a[q, :] = rows[1]
                a[p, q] = 0.0
                a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                vc = v[:, (p, q)] @ u
                v[:, p] = vc[:, 0]
                v[:, q] = vc[:, 1]
    if not converged:
        offmass = float(np.linalg.norm(a - np.diag(np.diagonal(a))))
        if offmass > target:
            raise NoConvergence(
                f"Jacobi sweeps exhausted: off-diagonal mass {offmass:.3e} > {target:.3e}"
            )
    w = np.diagonal(a).real.copy()
    order = np.argsort(w, kind="stable")
    return SpectralDecomp(w[order], np.ascontiguousarray(v[:, order]))


def singular_values(a) -> np.ndarray:
    """Singular values, descending, via the eigenvalues of A*A (or AA*)."""
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        a = a.reshape(a.shape[0], -1)
    if a.size == 0:
        return np.zeros(0)
    g = a @ a.conj().T if a.shape[0] <= a.shape[1] else a.conj().T @ a
    w = herm_eig(g).eigenvalues
    return np.sqrt(np.clip(w, 0.0, None))[::-1].copy()


def matrix_rank(a, rel_tol: float = RANK_REL_TOL) -> int:
    """Count of singular values above rel_tol * (largest singular value).

    The Gram route computes tiny singular values with absolute noise near
    sqrt(eps) * s_max, right at the default threshold, so directions well
    above each pass's own noise floor are peeled off and the residual is
    re-measured at its own scale until it drops below the cut.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2:
        a = a.reshape(a.shape[0], -1)
    if a.size == 0:
        return 0
    wide = a.shape[0] > a.shape[1]
    b = a.conj().T if wide else a
    s = singular_values(b)
    s_max = float(s[0])
    if s_max <= 0.0:
        return 0
    rank = 0
    limit = min(b.shape)
    for _ in range(limit):
        g = b @ b.conj().T
        sd = herm_eig(g)
        sig = np.sqrt(np.clip(sd.eigenvalues, 0.0, None))[::-1]
        if sig[0] <= rel_tol * s_max:
            break
        floor = max(rel_tol * s_max, 1e-7 * float(sig[0]))
        k = max(1, int(np.count_nonzero(sig > floor)))
        vecs = sd.eigenvectors[:, ::-1][:, :k]
        rank += k
        if rank >= limit:
            break
        b = b - vecs @ (vecs.conj().T @ b)
    return min(rank, limit)


def psd_project(a, eig_tol: float = EIG_TOL) -> np.ndarray:
    """Frobenius-nearest positive semidefinite matrix (eigenvalues clipped at 0)."""
    sd = herm_eig(_check_hermitian(a))
    w = np.clip(sd.eigenvalues, 0.0, None)
    v = sd.eigenvectors
    out = (v * w) @ v.conj().T
    return (out + out.conj().T) / 2.0


def dominant_eigvec(a, largest: bool = True) -> tuple[float, np.ndarray]:
    """Extreme eigenpair of a Hermitian matrix (largest or smallest eigenvalue)."""
    sd = herm_eig(a)
    idx = -1 if largest else 0
    return float(sd.eigenvalues[idx]), sd.eigenvectors[:, idx].copy()


def phase_normalize(v: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Rotate a vector so its first significant entry is real positive."""
    v = np.asarray(v, dtype=np.complex128)
    nz = np.nonzero(np.abs(v) > tol * max(1.0, float(np.abs(v).max(initial=0.0))))[0]
    if nz.size == 0:
        return v.copy()
    pivot = v[nz[0]]
    return v * (np.conj(pivot) / abs(pivot))


def rank1_factor(t) -> tuple[list[np.ndarray], float]:
    """Best-effort rank-1 approximation of a dense tensor.

    Sequentially peels the dominant left singular vector of each mode
    unfolding; the last factor carries the scale.  Returns the factors and
    the relative residual ||t - u1 x ... x um|| / ||t||.
    """
    t = np.asarray(t, dtype=np.complex128)
    tnorm = float(np.linalg.norm(t))
    if tnorm == 0.0:
        raise ZeroTensor("rank-1 factorization of the zero tensor is undefined")
    cur = t
    factors: list[np.ndarray] = []
    for _ in range(t.ndim - 1):
        x = cur.reshape(cur.shape[0], -1)
        _, u = dominant_eigvec(x @ x.conj().T, largest=True)
        u = phase_normalize(u)
        u = u / np.linalg.norm(u)
        factors.append(u)
        cur = np.tensordot(u.conj(), cur, axes=(0, 0))
    factors.append(np.asarray(cur, dtype=np.complex128).reshape(-1))
    approx = factors[0]
    for f in factors[1:]:
        approx = np.multiply.outer(approx, f)
    residual = float(np.linalg.norm(t - approx)) / tnorm
    return factors, residual
