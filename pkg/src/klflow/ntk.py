"""Neural tangent kernels, Rayleigh quotients, and lower-bound machinery.

The kernel form K(g,h) = E_{x,x'}[g(x) K_theta(x,x') h(x')] is always
evaluated through the tangent contraction

    J_g = E_x[grad_theta F(x) g(x)],     K(g,h) = <J_g, J_h>_Theta,

an O(n m) computation that never materializes the n x n kernel matrix (the
quadrature verifications run at n = 512).  `ntk_matrix` builds the dense
matrix only as an oracle for small n.

Three lower-bound tools on the Rayleigh quotient R(K; h, h):

    variational_check      equality sup_nu R(dF; nu, h)^2 at nu* = J_h
    cosine_singular_bound  R >= mu^2 lambda on a chosen parameter subspace
    shattering_bound       the matrix quotient over shattered pairs (a_i, g_i)

Each verifier re-checks its own inequality against the exact quotient and
raises ArithmeticError if violated, so a passing run is a proof at tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence, Union

import numpy as np

from .domain import DataDist, Finite, eval_on, inner_d, seminorm_d
from .linalg import EigenResult, SymMat, sym_eigen
from .model import NetworkMap
from .rng import SplitMix64

FuncOrValues = Union[Callable, np.ndarray]


def _values(g: FuncOrValues, d: DataDist) -> np.ndarray:
    if isinstance(g, np.ndarray):
        return g
    return eval_on(g, d)


def _tangent_grads(model: NetworkMap, theta: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Parameter gradients at every sample, shaped (n, c, m)."""
    grads = model.grad_many(theta, xs)
    if grads.ndim == 2:
        grads = grads[:, None, :]
    return grads


def tangent_contraction(
    model: NetworkMap, theta: np.ndarray, g: FuncOrValues, d: DataDist
) -> np.ndarray:
    """J_g = E_x[grad_theta F(x) g(x)], a vector in parameter space."""
    xs, ws = d.points()
    gvals = _values(g, d)
    if gvals.ndim == 1:
        gvals = gvals[:, None]
    grads = _tangent_grads(model, theta, xs)
    if gvals.shape != grads.shape[:2]:
        raise ValueError(f"g values {gvals.shape} do not match model outputs {grads.shape[:2]}")
    return np.einsum("n,nc,ncm->m", ws, gvals, grads)


def tangent_apply(
    model: NetworkMap, theta: np.ndarray, nu: np.ndarray, d: DataDist
) -> np.ndarray:
    """(dF_theta . nu) evaluated on the samples of d."""
    xs, _ = d.points()
    grads = _tangent_grads(model, theta, xs)
    out = np.einsum("ncm,m->nc", grads, np.asarray(nu, dtype=float))
    return out[:, 0] if out.shape[1] == 1 else out


def ntk_form(
    model: NetworkMap, theta: np.ndarray, g: FuncOrValues, h: FuncOrValues, d: DataDist
) -> float:
    """K_theta(g, h) via the tangent contraction."""
    jg = tangent_contraction(model, theta, g, d)
    jh = jg if h is g else tangent_contraction(model, theta, h, d)
    return float(np.dot(jg, jh))


def ntk_quotient(model: NetworkMap, theta: np.ndarray, h: FuncOrValues, d: DataDist) -> float:
    """R(K_theta; h, h) = K(h,h) / ||h||^2_D; errors when ||h||_D = 0."""
    hvals = _values(h, d)
    hn = seminorm_d(hvals, d)
    if hn == 0.0:
        raise ValueError("Rayleigh quotient undefined at ||h||_D = 0")
    jh = tangent_contraction(model, theta, hvals, d)
    return float(np.dot(jh, jh)) / hn ** 2


def rayleigh(a: Callable[..., float], x, y, norm_x: float, norm_y: float) -> float:
    """R(A; x, y) = A(x, y) / (||x|| ||y||) for a bilinear evaluator A."""
    if not (norm_x > 0.0 and norm_y > 0.0):
        raise ValueError("Rayleigh quotient needs strictly positive norms")
    return float(a(x, y)) / (norm_x * norm_y)


@dataclass(frozen=True)
class NtkMatrix:
    """Dense kernel matrix K_ij = <grad F(x_i), grad F(x_j)>_Theta with spectrum."""

    mat: SymMat
    eigen: EigenResult


def ntk_matrix(model: NetworkMap, theta: np.ndarray, d: Finite) -> NtkMatrix:
    """Materialize the kernel on a finite distribution (oracle path, n <= 512)."""
    if model.output_dim != 1:
        raise ValueError("ntk_matrix is defined for scalar-output models")
    xs, _ = d.points()
    n = xs.shape[0]
    if n > 512:
        raise ValueError(f"ntk_matrix limited to n <= 512 samples, got {n}")
    grads = model.grad_many(theta, xs)
    k = grads @ grads.T
    mat = SymMat(k)
    eig = sym_eigen(mat)
    lam_max = float(eig.values[-1])
    if eig.values[0] < -1e-10 * max(lam_max, 1e-300):
        raise ArithmeticError("kernel matrix is not positive semi-definite")
    m = model.param_dim
    if n > m and eig.values[n - m - 1] > 1e-8 * lam_max:
        raise ArithmeticError(f"kernel rank exceeds parameter count {m}")
    return NtkMatrix(mat=mat, eigen=eig)


@dataclass(frozen=True)
class VariationalReport:
    """Outcome of checking sup_nu R(dF; nu, h)^2 = R(K; h, h)."""

    exact: float
    at_maximizer: float
    trial_max: float
    trials: int


def variational_check(
    model: NetworkMap,
    theta: np.ndarray,
    h: FuncOrValues,
    d: DataDist,
    trials: int = 100,
    rng: SplitMix64 | None = None,
) -> VariationalReport:
    """Verify the dual characterization of R(K; h, h).

    Random unit directions nu must never beat the quotient, and the explicit
    maximizer nu* = J_h must attain it.  When J_h = 0 the supremum is 0.
    """
    rng = SplitMix64(0x5EED) if rng is None else rng
    hvals = _values(h, d)
    hn = seminorm_d(hvals, d)
    if hn == 0.0:
        raise ValueError("variational_check needs ||h||_D > 0")
    jh = tangent_contraction(model, theta, hvals, d)
    exact = float(np.dot(jh, jh)) / hn ** 2

    # <dF.nu, h>_D = nu . J_h, so every trial quotient is a dot product.
    def quot_sq(nu: np.ndarray) -> float:
        nn = float(np.linalg.norm(nu))
        return (float(np.dot(nu, jh)) / (nn * hn)) ** 2

    jn = float(np.linalg.norm(jh))
    at_max = 0.0 if jn == 0.0 else quot_sq(jh)
    trial_max = 0.0
    for _ in range(trials):
        nu = rng.normals(model.param_dim)
        nrm = float(np.linalg.norm(nu))
        if nrm == 0.0:
            continue
        trial_max = max(trial_max, quot_sq(nu))
    if trial_max > exact + 1e-10:
        raise ArithmeticError(f"trial direction beat the quotient: {trial_max} > {exact}")
    if abs(at_max - exact) > 1e-9 * max(exact, 1e-300):
        raise ArithmeticError(f"maximizer fails to attain the quotient: {at_max} vs {exact}")
    return VariationalReport(exact=exact, at_maximizer=at_max, trial_max=trial_max, trials=trials)


def _eigen_of(mat: np.ndarray) -> EigenResult:
    return sym_eigen(SymMat(mat))


def _whiten(gram: np.ndarray, what: str) -> np.ndarray:
    """G^{-1/2} for a PSD Gram matrix; errors when condition exceeds 1e12."""
    eig = _eigen_of(gram)
    lo, hi = float(eig.values[0]), float(eig.values[-1])
    if lo <= 0.0 or hi / lo > 1e12:
        raise ValueError(f"degenerate {what}: Gram condition exceeds 1e12")
    return eig.vectors @ np.diag(1.0 / np.sqrt(eig.values)) @ eig.vectors.T


def _pinv_apply(mat: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Pseudo-inverse solve for symmetric PSD mat, cutting eigenvalues
    below 1e-12 of the largest."""
    eig = _eigen_of(mat)
    hi = float(eig.values[-1])
    if hi <= 0.0:
        return np.zeros_like(v)
    inv = np.where(eig.values > 1e-12 * hi, 1.0 / np.maximum(eig.values, 1e-300), 0.0)
    return eig.vectors @ (inv * (eig.vectors.T @ v))


def cosine_singular_bound(
    model: NetworkMap,
    theta: np.ndarray,
    h: FuncOrValues,
    subspace_basis: Sequence[np.ndarray],
    d: DataDist,
) -> tuple[float, float, float]:
    """Cosine-times-singular-value lower bound on R(K; h, h).

    Over the span of the basis: mu is the best achievable cosine between
    dF.nu and h, lambda the smallest restricted singular-value square
    ||dF.nu||^2_D / ||nu||^2_Theta.  Returns (mu, lambda, mu^2 lambda) after
    re-checking the bound against the exact quotient.
    """
    b = np.column_stack([np.asarray(v, dtype=float) for v in subspace_basis])
    if b.ndim != 2 or b.shape[0] != model.param_dim:
        raise ValueError("basis vectors must live in parameter space")
    hvals = _values(h, d)
    hn = seminorm_d(hvals, d)
    if hn == 0.0:
        raise ValueError("cosine_singular_bound needs ||h||_D > 0")
    xs, ws = d.points()
    grads = _tangent_grads(model, theta, xs)
    s = np.einsum("n,ncm,nck->mk", ws, grads, grads)
    m_g = b.T @ s @ b  # <dF.nu_i, dF.nu_j>_D on the basis
    g_t = b.T @ b
    w = _whiten(g_t, "subspace basis")

    m_w = w @ m_g @ w
    eig = _eigen_of(m_w)
    lam = max(float(eig.values[0]), 0.0)

    jh = tangent_contraction(model, theta, hvals, d)
    bvec = w @ (b.T @ jh)
    mu_sq = float(np.dot(bvec, _pinv_apply(m_w, bvec))) / hn ** 2
    mu = min(math.sqrt(max(mu_sq, 0.0)), 1.0)

    bound = mu * mu * lam
    exact = float(np.dot(jh, jh)) / hn ** 2
    if exact < bound - 1e-10:
        raise ArithmeticError(f"cosine-singular bound {bound} exceeds quotient {exact}")
    return mu, lam, bound


def shattering_bound(
    model: NetworkMap,
    theta: np.ndarray,
    h: FuncOrValues,
    a_vecs: Sequence[np.ndarray],
    g_funcs: Sequence[FuncOrValues],
    d: DataDist,
) -> float:
    """Shattering lower bound on max_{nu in Span(a)} R(dF; nu, h).

    With N_ij = R(<.,.>_D; dF.a_i, g_j), A'_ij = R(<.,.>_Theta; a_i, a_j),
    G'_ij = R(<.,.>_D; g_i, g_j):

        bound = lambda_min(N) min_i(||dF.a_i||_D / ||a_i||_Theta)
                / sqrt(lambda_max(A') lambda_max(G'))

    where lambda_min uses the symmetric part (it is a min of u'Nu/u'u).
    Requires h in Span(g); a zero singular factor returns 0.
    """
    k = len(a_vecs)
    if k == 0 or len(g_funcs) != k:
        raise ValueError("need equally many parameter directions and span functions")
    a_mat = np.column_stack([np.asarray(a, dtype=float) for a in a_vecs])
    a_norms = np.linalg.norm(a_mat, axis=0)
    if np.any(a_norms == 0.0):
        raise ValueError("zero parameter direction in shattering basis")
    g_vals = [_values(g, d) for g in g_funcs]
    g_norms = np.array([seminorm_d(gv, d) for gv in g_vals])
    if np.any(g_norms == 0.0):
        raise ValueError("zero span function in shattering basis")
    hvals = _values(h, d)
    hn = seminorm_d(hvals, d)
    if hn == 0.0:
        raise ValueError("shattering_bound needs ||h||_D > 0")

    # h must be representable in Span(g): least-squares in the D-product.
    gram_g = np.array([[inner_d(gi, gj, d) for gj in g_vals] for gi in g_vals])
    rhs = np.array([inner_d(gi, hvals, d) for gi in g_vals])
    coef = _pinv_apply(gram_g, rhs)
    # residual on values, not via the quadratic form (which cancels badly)
    combo = sum(c * gv for c, gv in zip(coef, g_vals))
    if seminorm_d(hvals - combo, d) > 1e-8 * hn:
        raise ValueError("h is not in the span of the supplied functions")

    dfa = [tangent_apply(model, theta, a_mat[:, i], d) for i in range(k)]
    s_norms = np.array([seminorm_d(v, d) for v in dfa])
    rho = float(np.min(s_norms / a_norms))
    if rho == 0.0:
        return 0.0

    n_mat = np.array(
        [
            [inner_d(dfa[i], g_vals[j], d) / (s_norms[i] * g_norms[j]) for j in range(k)]
            for i in range(k)
        ]
    )
    a_quot = (a_mat.T @ a_mat) / np.outer(a_norms, a_norms)
    g_quot = gram_g / np.outer(g_norms, g_norms)

    lam_min_n = float(_eigen_of(0.5 * (n_mat + n_mat.T)).values[0])
    lam_max_a = float(_eigen_of(a_quot).values[-1])
    lam_max_g = float(_eigen_of(g_quot).values[-1])
    bound = lam_min_n * rho / math.sqrt(lam_max_a * lam_max_g)

    # The exact restricted maximum over Span(a) certifies the bound.
    jh = tangent_contraction(model, theta, hvals, d)
    v = a_mat.T @ jh
    gram_a = a_mat.T @ a_mat
    restricted = math.sqrt(max(float(np.dot(v, _pinv_apply(gram_a, v))), 0.0)) / hn
    if restricted < bound - 1e-9:
        raise ArithmeticError(f"shattering bound {bound} exceeds restricted maximum {restricted}")
    return bound
