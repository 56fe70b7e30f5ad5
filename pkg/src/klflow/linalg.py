"""Minimal dense linear algebra: validated vectors, symmetric matrices, a
cyclic-Jacobi eigensolver, and Gershgorin eigenvalue brackets.

The Jacobi solver is deliberately self-contained so it can serve as the
oracle for every spectral claim elsewhere in the package (Rayleigh ranges,
PSD checks, certified Gershgorin brackets).  Cyclic Jacobi is preferred
over QR iteration here: there is no shifting heuristic to tune, rotations
preserve symmetry exactly, and the off-diagonal Frobenius norm gives a
direct, checkable convergence certificate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Vec = np.ndarray

_SYM_RTOL = 1e-12
_JACOBI_OFF_RTOL = 1e-14
_JACOBI_MAX_SWEEPS = 100


def vec(entries) -> Vec:
    """Validated 1-d float64 vector: finite entries only."""
    v = np.asarray(entries, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"vec expects a 1-d sequence, got shape {v.shape}")
    if v.size == 0:
        raise ValueError("vec expects at least one entry")
    if not np.all(np.isfinite(v)):
        raise ValueError("vec entries must be finite (no NaN/Inf)")
    return v


class SymMat:
    """Symmetric matrix with construction-time validation.

    Input must be square, finite, and symmetric up to 1e-12 relative to its
    largest entry; the stored array is the exact symmetrization (A + A^T)/2.
    """

    def __init__(self, entries):
        a = np.asarray(entries, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"SymMat expects a square matrix, got shape {a.shape}")
        if a.shape[0] == 0:
            raise ValueError("SymMat expects n >= 1")
        if not np.all(np.isfinite(a)):
            raise ValueError("SymMat entries must be finite")
        scale = max(1.0, float(np.max(np.abs(a))))
        asym = float(np.max(np.abs(a - a.T)))
        if asym > _SYM_RTOL * scale:
            raise ValueError(
                f"matrix is not symmetric: max |A - A^T| = {asym:.3e} "
                f"exceeds {_SYM_RTOL:.0e} * {scale:.3e}"
            )
        self.a = 0.5 * (a + a.T)
        self.n = a.shape[0]

    def __repr__(self) -> str:
        return f"SymMat(n={self.n})"


@dataclass
class EigenResult:
    """Eigenvalues ascending; vectors[:, i] is the unit eigenvector of values[i]."""

    values: np.ndarray
    vectors: np.ndarray


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.linalg.norm(off))


def sym_eigen(m: SymMat | np.ndarray) -> EigenResult:
    """Full eigendecomposition by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius norm falls below
    1e-14 * ||M||_F (at most 100 sweeps, else RuntimeError).
    """
    if not isinstance(m, SymMat):
        m = SymMat(m)
    a = m.a.copy()
    n = m.n
    v = np.eye(n)
    norm_f = float(np.linalg.norm(a))
    target = _JACOBI_OFF_RTOL * norm_f
    if _off_norm(a) > target:
        converged = False
        for _ in range(_JACOBI_MAX_SWEEPS):
            for p in range(n - 1):
                for q in range(p + 1, n):
                    apq = a[p, q]
                    if apq == 0.0:
                        continue
                    tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                    if abs(tau) > 1e12:
                        t = 1.0 / (2.0 * tau)
                    else:
                        t = np.sign(tau) / (abs(tau) + np.hypot(tau, 1.0))
                        if tau == 0.0:
                            t = 1.0
                    c = 1.0 / np.sqrt(t * t + 1.0)
                    s = t * c
                    rp = c * a[p, :] - s * a[q, :]
                    rq = s * a[p, :] + c * a[q, :]
                    a[p, :], a[q, :] = rp, rq
                    cp = c * a[:, p] - s * a[:, q]
                    cq = s * a[:, p] + c * a[:, q]
                    a[:, p], a[:, q] = cp, cq
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    vp = c * v[:, p] - s * v[:, q]
                    vq = s * v[:, p] + c * v[:, q]
                    v[:, p], v[:, q] = vp, vq
            if _off_norm(a) <= target:
                converged = True
                break
        if not converged:
            raise RuntimeError(
                f"Jacobi sweeps did not converge in {_JACOBI_MAX_SWEEPS} sweeps "
                f"(off-diagonal norm {_off_norm(a):.3e}, target {target:.3e})"
            )
    vals = np.diag(a).copy()
    order = np.argsort(vals, kind="stable")
    return EigenResult(values=vals[order], vectors=v[:, order])


def lambda_min_plus(m: SymMat | np.ndarray, rel_tol: float = 1e-10) -> float:
    """Smallest strictly positive eigenvalue; 0.0 for the zero matrix.

    "Strictly positive" means > rel_tol * lambda_max.  Raises if the matrix
    is indefinite beyond -rel_tol * lambda_max.
    """
    vals = sym_eigen(m).values
    lam_max = float(vals[-1])
    scale = float(np.max(np.abs(vals)))
    if scale == 0.0:
        return 0.0
    if vals[0] < -rel_tol * scale:
        raise ValueError(
            f"matrix is indefinite beyond tolerance: lambda_min = {vals[0]:.3e}, "
            f"lambda_max = {lam_max:.3e}"
        )
    positive = vals[vals > rel_tol * max(lam_max, 0.0)]
    return float(positive[0]) if positive.size else 0.0


def _gershgorin_radii(m: np.ndarray) -> np.ndarray:
    abs_m = np.abs(m)
    half = 0.5 * (abs_m + abs_m.T)
    return np.sum(half, axis=1) - np.diag(half)


def gershgorin_min(m) -> float:
    """Lower Gershgorin bracket min_i (M_ii - r_i), r_i = 1/2 sum_{j!=i} (|M_ij| + |M_ji|).

    Brackets every eigenvalue of the symmetric part (M + M^T)/2; the matrix
    itself need not be symmetric.
    """
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("gershgorin_min expects a square matrix")
    return float(np.min(np.diag(a) - _gershgorin_radii(a)))


def gershgorin_max(m) -> float:
    """Upper Gershgorin bracket max_i (M_ii + r_i); see gershgorin_min."""
    a = np.asarray(m, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("gershgorin_max expects a square matrix")
    return float(np.max(np.diag(a) + _gershgorin_radii(a)))
