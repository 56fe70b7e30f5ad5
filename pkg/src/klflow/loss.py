"""Functional losses, desingularizers, and the parametric KL residual.

Quadratic losses ship in both normalizations under distinct names, because a
silent factor of two here corrupts every downstream certificate:

    QuadraticLoss      value ||f - f*||^2_D,      gradient 2 (f - f*)
    HalfQuadraticLoss  value ||f - f*||^2_D / 2,  gradient (f - f*)

The unhalved form satisfies the Polyak-Lojasiewicz identity
||grad ell_f||^2_D = 4 ell(f) exactly.

A desingularizer is a strictly increasing phi with derivative dphi and
inverse phi_inv; the KL residual dphi(L(theta)) * ||grad L(theta)||^2 is the
quantity whose lower bound mu turns into the convergence certificate
L(theta_t) <= phi_inv(phi(L(theta_0)) - mu t).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .domain import DataDist, eval_on
from .model import NetworkMap, softargmax
from .specfun import lambert_w0_of_exp


@dataclass(frozen=True)
class Desingularizer:
    name: str
    phi: Callable[[float], float]
    dphi: Callable[[float], float]
    phi_inv: Callable[[float], float]


def log_desingularizer() -> Desingularizer:
    """phi = log on (0, inf); turns a PL bound into a plain exponential rate."""
    return Desingularizer(name="log", phi=math.log, dphi=lambda u: 1.0 / u, phi_inv=math.exp)


def logistic_desingularizer() -> Desingularizer:
    """The pair adapted to cross-entropy decay:

        phi(z)     = log(e^z - 1) - 1/(e^z - 1)
        dphi(z)    = (1 - e^-z)^-2
        phi_inv(u) = log(1 + 1/W0(e^-u))

    phi_inv is evaluated through the overflow-safe W0(e^a), so the inverse is
    usable for arbitrarily negative u (equivalently: bounds evaluable at
    arbitrarily large times).
    """

    def phi(z: float) -> float:
        if not (z > 0.0):
            raise ValueError("logistic phi expects z > 0")
        # log(e^z - 1) = z + log(1 - e^-z), stable for every z > 0.
        return z + math.log1p(-math.exp(-z)) - 1.0 / math.expm1(z)

    def dphi(z: float) -> float:
        if not (z > 0.0):
            raise ValueError("logistic dphi expects z > 0")
        return 1.0 / (-math.expm1(-z)) ** 2

    def phi_inv(u: float) -> float:
        return math.log1p(1.0 / lambert_w0_of_exp(-u))

    return Desingularizer(name="logistic", phi=phi, dphi=dphi, phi_inv=phi_inv)


def power_desingularizer(p: int = 3) -> Desingularizer:
    """phi(u) = -u^-p; the cube version drives the two-layer certificate."""
    if p < 1:
        raise ValueError("power_desingularizer expects p >= 1")

    def phi(u: float) -> float:
        if not (u > 0.0):
            raise ValueError("power phi expects u > 0")
        return -(u ** -p)

    def dphi(u: float) -> float:
        if not (u > 0.0):
            raise ValueError("power dphi expects u > 0")
        return p * u ** -(p + 1)

    def phi_inv(v: float) -> float:
        if not (v < 0.0):
            raise ValueError("power phi_inv expects v < 0")
        return (-1.0 / v) ** (1.0 / p)

    return Desingularizer(name=f"power{p}", phi=phi, dphi=dphi, phi_inv=phi_inv)


class FunctionalLoss:
    """Loss on function space, bound to a data distribution.

    `value` and `grad` run on function handles; `value_at` / `grad_values`
    are the array fast paths on values pre-evaluated at d.points().
    """

    d: DataDist

    def value(self, f) -> float:
        return self.value_at(f if isinstance(f, np.ndarray) else eval_on(f, self.d))

    def grad(self, f) -> Callable:
        raise NotImplementedError

    def value_at(self, fvals: np.ndarray) -> float:
        raise NotImplementedError

    def grad_values(self, fvals: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class QuadraticLoss(FunctionalLoss):
    """ell(f) = ||f - f*||^2_D with gradient 2 (f - f*)."""

    scale = 1.0

    def __init__(self, f_star, d: DataDist):
        self.d = d
        self.fstar_vals = f_star if isinstance(f_star, np.ndarray) else eval_on(f_star, d)
        self._f_star = None if isinstance(f_star, np.ndarray) else f_star

    def value_at(self, fvals: np.ndarray) -> float:
        _, ws = self.d.points()
        diff = fvals - self.fstar_vals
        sq = diff * diff
        if sq.ndim > 1:
            sq = sq.reshape(sq.shape[0], -1).sum(axis=1)
        return self.scale * float(np.dot(ws, sq))

    def grad_values(self, fvals: np.ndarray) -> np.ndarray:
        return 2.0 * self.scale * (fvals - self.fstar_vals)

    def grad(self, f) -> Callable:
        if self._f_star is None:
            raise ValueError("grad(f) as a handle needs f* given as a callable")
        fs = self._f_star
        s = 2.0 * self.scale
        return lambda x: s * (np.asarray(f(x), dtype=float) - np.asarray(fs(x), dtype=float))


class HalfQuadraticLoss(QuadraticLoss):
    """ell(f) = ||f - f*||^2_D / 2 with gradient (f - f*)."""

    scale = 0.5


class CrossEntropyLoss(FunctionalLoss):
    """Cross entropy of softargmax'd logits against fixed targets.

    Targets are either integer labels (dirac rows) or soft rows on the
    simplex; the bound evaluators require dirac targets.  The gradient in
    logit space is E(u) - y.
    """

    def __init__(self, targets, d: DataDist):
        self.d = d
        targets = np.asarray(targets)
        xs, _ = d.points()
        n = xs.shape[0]
        if targets.ndim == 1:
            if targets.shape != (n,):
                raise ValueError(f"labels must have shape ({n},)")
            self.labels = targets.astype(int)
            self.y = None  # materialized lazily once c is known
        elif targets.ndim == 2:
            if targets.shape[0] != n:
                raise ValueError(f"soft targets must have {n} rows")
            if np.any(targets < 0) or not np.allclose(targets.sum(axis=1), 1.0, atol=1e-9):
                raise ValueError("soft targets must be rows on the simplex")
            self.labels = None
            self.y = targets.astype(float)
        else:
            raise ValueError("targets must be labels (n,) or soft rows (n, c)")

    def _targets(self, c: int) -> np.ndarray:
        if self.y is not None:
            if self.y.shape[1] != c:
                raise ValueError(f"targets have {self.y.shape[1]} classes, logits {c}")
            return self.y
        if np.any(self.labels < 0) or np.any(self.labels >= c):
            raise ValueError("labels out of range for the given logits")
        return np.eye(c)[self.labels]

    def value_at(self, logits: np.ndarray) -> float:
        logits = np.asarray(logits, dtype=float)
        if logits.ndim != 2:
            raise ValueError("cross entropy expects logits with shape (n, c)")
        _, ws = self.d.points()
        y = self._targets(logits.shape[1])
        z = logits - np.max(logits, axis=1, keepdims=True)
        log_p = z - np.log(np.sum(np.exp(z), axis=1, keepdims=True))
        return float(np.dot(ws, -np.sum(y * log_p, axis=1)))

    def grad_values(self, logits: np.ndarray) -> np.ndarray:
        return softargmax(logits) - self._targets(np.asarray(logits).shape[1])

    def grad(self, f) -> Callable:
        if self.labels is None:
            raise ValueError("grad(f) as a handle needs dirac labels")
        xs, _ = self.d.points()
        key = {self._key(x): i for i, x in enumerate(xs)}

        def g(x):
            i = key[self._key(x)]
            u = np.asarray(f(x), dtype=float)
            y = np.zeros_like(u)
            y[self.labels[i]] = 1.0
            return softargmax(u) - y

        return g

    @staticmethod
    def _key(x):
        return tuple(np.atleast_1d(np.asarray(x, dtype=float)).tolist())


def functional_values(model: NetworkMap, theta: np.ndarray, d: DataDist) -> np.ndarray:
    xs, _ = d.points()
    return model.eval_many(theta, xs)


def gradient_state(
    model: NetworkMap, lossfn: FunctionalLoss, theta: np.ndarray, d: DataDist | None = None
) -> tuple[float, np.ndarray, np.ndarray]:
    """One-pass (L(theta), grad L(theta), grad ell values at the samples).

    grad L = E_x[ grad_theta F(x) . grad ell(x) ], output coordinates summed;
    the functional gradient values are returned for instrumentation.
    """
    d = lossfn.d if d is None else d
    if d is not lossfn.d:
        raise ValueError("distribution mismatch: loss is bound to a different DataDist")
    xs, ws = d.points()
    fvals = model.eval_many(theta, xs)
    lval = lossfn.value_at(fvals)
    gvals = lossfn.grad_values(fvals)
    grads = model.grad_many(theta, xs)
    if gvals.ndim == 1:
        grad = np.einsum("n,nm->m", ws * gvals, grads)
    else:
        grad = np.einsum("n,nc,ncm->m", ws, gvals, grads)
    return lval, grad, gvals


def parametric_gradient(
    model: NetworkMap, lossfn: FunctionalLoss, theta: np.ndarray, d: DataDist | None = None
) -> tuple[float, np.ndarray]:
    """Loss value and gradient of L(theta) = ell(F(theta)) in parameter space."""
    lval, grad, _ = gradient_state(model, lossfn, theta, d)
    return lval, grad


def kl_residual(
    model: NetworkMap,
    lossfn: FunctionalLoss,
    desing: Desingularizer,
    theta: np.ndarray,
    d: DataDist | None = None,
) -> float:
    """dphi(L(theta)) * ||grad L(theta)||^2_Theta; errors on L(theta) = 0."""
    lval, grad = parametric_gradient(model, lossfn, theta, d)
    if lval == 0.0:
        raise ValueError("kl_residual is undefined at zero loss")
    return desing.dphi(lval) * float(np.dot(grad, grad))
