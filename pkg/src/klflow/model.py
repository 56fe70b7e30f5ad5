"""Network maps: the five parametric families exercised by the case studies.

Every map implements the same contract: `eval(theta, x)` gives the output at
one input, `grad(theta, x)` the parameter gradient at that input, and the
`_many` variants their vectorizations over a batch of inputs.  Gradients are
exact closed forms; the test suite checks each against central finite
differences.

Multi-output maps (the softargmax classifier) return `(c,)` outputs and
`(c, param_dim)` gradients; everything downstream contracts output
coordinates by summation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import SincTriple, sinc_triple


class NetworkMap:
    """Differentiable parametric family theta -> (x -> F_theta(x))."""

    param_dim: int
    output_dim: int = 1

    def eval(self, theta: np.ndarray, x):
        raise NotImplementedError

    def grad(self, theta: np.ndarray, x) -> np.ndarray:
        raise NotImplementedError

    def eval_many(self, theta: np.ndarray, xs: np.ndarray) -> np.ndarray:
        return np.asarray([self.eval(theta, x) for x in xs], dtype=float)

    def grad_many(self, theta: np.ndarray, xs: np.ndarray) -> np.ndarray:
        return np.asarray([self.grad(theta, x) for x in xs], dtype=float)


class LinearModel(NetworkMap):
    """F_theta(x) = <x, theta> on R^d."""

    def __init__(self, d: int):
        if d < 1:
            raise ValueError("LinearModel expects d >= 1")
        self.param_dim = d

    def eval(self, theta, x):
        return float(np.dot(x, theta))

    def grad(self, theta, x):
        return np.asarray(x, dtype=float)

    def eval_many(self, theta, xs):
        return np.asarray(xs, dtype=float) @ theta

    def grad_many(self, theta, xs):
        return np.asarray(xs, dtype=float)


# ---------------------------------------------------------------------------
# Lemniscate of Bernoulli, two parameterizations of the same curve.

_SPHERE = "sphere"
_LINE = "line"


def _check_variant(variant: str) -> str:
    if variant not in (_SPHERE, _LINE):
        raise ValueError(f"variant must be 'sphere' or 'line', got {variant!r}")
    return variant


def lemniscate_eval(variant: str, theta: float) -> np.ndarray:
    """Point (a, b) of the lemniscate (a^2+b^2)^2 = a^2-b^2 at parameter theta.

    sphere: (cos t / (1 + sin^2 t), sin t cos t / (1 + sin^2 t)), 2pi-periodic.
    line:   ((1 - t^4) / (1 + 6 t^2 + t^4), 2 t (1 - t^2) / (1 + 6 t^2 + t^4)).
    """
    _check_variant(variant)
    t = float(theta)
    if variant == _SPHERE:
        s, c = math.sin(t), math.cos(t)
        den = 1.0 + s * s
        return np.array([c / den, s * c / den])
    t2 = t * t
    t4 = t2 * t2
    den = 1.0 + 6.0 * t2 + t4
    return np.array([(1.0 - t4) / den, 2.0 * t * (1.0 - t2) / den])


def lemniscate_grad(variant: str, theta: float) -> np.ndarray:
    """Closed-form derivative of lemniscate_eval with respect to theta."""
    _check_variant(variant)
    t = float(theta)
    if variant == _SPHERE:
        s, c = math.sin(t), math.cos(t)
        s2 = s * s
        den2 = (1.0 + s2) ** 2
        da = -s * ((1.0 + s2) + 2.0 * c * c) / den2
        db = (-(s2 * s2) - s2 + (1.0 - s2) * c * c) / den2
        return np.array([da, db])
    t2 = t * t
    t4 = t2 * t2
    t6 = t4 * t2
    den2 = (t4 + 6.0 * t2 + 1.0) ** 2
    da = -4.0 * t * (3.0 * t4 + 2.0 * t2 + 3.0) / den2
    db = 2.0 * (t6 - 9.0 * t4 - 9.0 * t2 + 1.0) / den2
    return np.array([da, db])


def lambda_sv(variant: str, theta: float) -> float:
    """Singular-value factor lambda(theta) = ||d/dtheta F(theta)||_2^2."""
    g = lemniscate_grad(variant, theta)
    return float(np.dot(g, g))


def mu_s(variant: str, theta: float, loss_grad) -> float:
    """Cosine between the curve tangent and the descent direction -loss_grad."""
    g = lemniscate_grad(variant, theta)
    lg = np.asarray(loss_grad, dtype=float)
    ng = float(np.linalg.norm(g))
    nl = float(np.linalg.norm(lg))
    if ng == 0.0 or nl == 0.0:
        raise ValueError("mu_s needs non-zero tangent and loss gradient")
    return float(np.dot(g, -lg) / (ng * nl))


class LemniscateMap(NetworkMap):
    """Lemniscate point as a linear function: F_theta(x) = a(theta) x0 + b(theta) x1.

    The single parameter traces the curve; inputs live in R^2.  With a
    one-point distribution at (u, v) and target y this reproduces the planar
    loss (a u + b v - y)^2.
    """

    param_dim = 1

    def __init__(self, variant: str):
        self.variant = _check_variant(variant)

    def point(self, theta) -> np.ndarray:
        return lemniscate_eval(self.variant, float(np.asarray(theta).reshape(())))

    def eval(self, theta, x):
        ab = self.point(theta)
        return float(np.dot(np.asarray(x, dtype=float), ab))

    def grad(self, theta, x):
        d_ab = lemniscate_grad(self.variant, float(np.asarray(theta).reshape(())))
        return np.array([float(np.dot(np.asarray(x, dtype=float), d_ab))])

    def eval_many(self, theta, xs):
        return np.asarray(xs, dtype=float) @ self.point(theta)

    def grad_many(self, theta, xs):
        d_ab = lemniscate_grad(self.variant, float(np.asarray(theta).reshape(())))
        return (np.asarray(xs, dtype=float) @ d_ab)[:, None]


# ---------------------------------------------------------------------------
# Softargmax linear classifier.


def softargmax(u: np.ndarray) -> np.ndarray:
    """Numerically stable softargmax along the last axis."""
    u = np.asarray(u, dtype=float)
    z = u - np.max(u, axis=-1, keepdims=True)
    e = np.exp(z)
    return e / np.sum(e, axis=-1, keepdims=True)


class SoftargmaxLinear(NetworkMap):
    """Multi-class logit map u_theta(x) = Z x with Z = theta reshaped to (c, d).

    The map itself stays in logit space; composing with the cross-entropy
    loss puts the softargmax inside the loss gradient E(u) - y.
    """

    def __init__(self, c: int, d: int):
        if c < 2 or d < 1:
            raise ValueError("SoftargmaxLinear expects c >= 2, d >= 1")
        self.c = c
        self.d = d
        self.param_dim = c * d
        self.output_dim = c

    def _z(self, theta) -> np.ndarray:
        return np.asarray(theta, dtype=float).reshape(self.c, self.d)

    def eval(self, theta, x):
        return self._z(theta) @ np.asarray(x, dtype=float)

    def grad(self, theta, x):
        # d u_k / d Z_ij = delta_{ki} x_j
        x = np.asarray(x, dtype=float)
        out = np.zeros((self.c, self.c, self.d))
        for k in range(self.c):
            out[k, k, :] = x
        return out.reshape(self.c, self.param_dim)

    def eval_many(self, theta, xs):
        return np.asarray(xs, dtype=float) @ self._z(theta).T

    def grad_many(self, theta, xs):
        xs = np.asarray(xs, dtype=float)
        n = xs.shape[0]
        eye = np.eye(self.c)
        out = np.einsum("ki,nj->nkij", eye, xs)
        return out.reshape(n, self.c, self.param_dim)


def separation_margin(zeta: np.ndarray, d, labels) -> float:
    """Normalized multi-class margin of direction zeta on a labeled sample set.

    epsilon = min_i ( <zeta_{y_i}, x_i> - max_{j != y_i} <zeta_j, x_i> ) / ||zeta||_2
    with ||zeta||_2 the Euclidean norm of zeta flattened.  Positive iff zeta
    separates every sample with its given label.
    """
    z = np.asarray(zeta, dtype=float)
    if z.ndim != 2:
        raise ValueError("separation_margin expects zeta with shape (c, d)")
    nz = float(np.linalg.norm(z))
    if nz == 0.0:
        raise ValueError("separation_margin expects a non-zero zeta")
    xs, _ = d.points()
    xs = xs if xs.ndim == 2 else xs[:, None]
    labels = np.asarray(labels)
    scores = xs @ z.T  # (n, c)
    n = xs.shape[0]
    margins = np.empty(n)
    for i in range(n):
        y = int(labels[i])
        others = np.delete(scores[i], y)
        margins[i] = scores[i, y] - np.max(others)
    return float(np.min(margins) / nz)


# ---------------------------------------------------------------------------
# Two-layer tanh network.


class TwoLayerNet(NetworkMap):
    """F_theta(x) = sum_k a_k tanh(w_k . x); theta = (w flattened, a).

    tanh has sigma(0) = 0 and Lipschitz constant 1, the two constants that
    enter the initialization-scale bound.
    """

    sigma0 = 0.0
    lip_sigma = 1.0

    def __init__(self, m: int, d: int):
        if m < 1 or d < 1:
            raise ValueError("TwoLayerNet expects m >= 1, d >= 1")
        self.m = m
        self.d = d
        self.param_dim = m * d + m

    def split(self, theta) -> tuple[np.ndarray, np.ndarray]:
        theta = np.asarray(theta, dtype=float)
        return theta[: self.m * self.d].reshape(self.m, self.d), theta[self.m * self.d :]

    def join(self, w: np.ndarray, a: np.ndarray) -> np.ndarray:
        return np.concatenate([np.asarray(w, dtype=float).ravel(), np.asarray(a, dtype=float)])

    def eval(self, theta, x):
        w, a = self.split(theta)
        return float(np.dot(a, np.tanh(w @ np.asarray(x, dtype=float))))

    def grad(self, theta, x):
        w, a = self.split(theta)
        x = np.asarray(x, dtype=float)
        pre = np.tanh(w @ x)
        gw = ((a * (1.0 - pre * pre))[:, None] * x[None, :]).ravel()
        return np.concatenate([gw, pre])

    def eval_many(self, theta, xs):
        w, a = self.split(theta)
        return np.tanh(np.asarray(xs, dtype=float) @ w.T) @ a

    def grad_many(self, theta, xs):
        w, a = self.split(theta)
        xs = np.asarray(xs, dtype=float)
        s = np.tanh(xs @ w.T)  # (n, m)
        gw = ((a * (1.0 - s * s))[:, :, None] * xs[:, None, :]).reshape(xs.shape[0], -1)
        return np.concatenate([gw, s], axis=1)


def two_layer_nu0(model: TwoLayerNet, theta, theta_star_w, theta_star_a) -> np.ndarray:
    """Teacher-matching tangent direction nu0 = (0_w, -a + scatter(a*)).

    Each teacher neuron i is routed to its nearest student neuron
    j_i = argmin_k ||w*_i - w_k||_2 (smallest index on ties), so that
    F(theta) + dF_theta . nu0 = sum_i a*_i tanh(w_{j_i} . x).
    """
    w, a = model.split(theta)
    w_star = np.asarray(theta_star_w, dtype=float).reshape(-1, model.d)
    a_star = np.asarray(theta_star_a, dtype=float)
    nu_a = -a.copy()
    for i in range(w_star.shape[0]):
        dists = np.linalg.norm(w - w_star[i][None, :], axis=1)
        j = int(np.argmin(dists))  # argmin takes the smallest index on ties
        nu_a[j] += a_star[i]
    return np.concatenate([np.zeros(model.m * model.d), nu_a])


# ---------------------------------------------------------------------------
# Sum of sines.


class SumOfSines(NetworkMap):
    """F_theta(x) = sum_k a_k sin(omega_k x) on scalar inputs; theta = (a, omega)."""

    def __init__(self, m: int):
        if m < 1:
            raise ValueError("SumOfSines expects m >= 1")
        self.m = m
        self.param_dim = 2 * m

    def split(self, theta) -> tuple[np.ndarray, np.ndarray]:
        theta = np.asarray(theta, dtype=float)
        return theta[: self.m], theta[self.m :]

    def join(self, a, omega) -> np.ndarray:
        return np.concatenate([np.asarray(a, dtype=float), np.asarray(omega, dtype=float)])

    def eval(self, theta, x):
        a, om = self.split(theta)
        return float(np.dot(a, np.sin(om * float(x))))

    def grad(self, theta, x):
        a, om = self.split(theta)
        x = float(x)
        return np.concatenate([np.sin(om * x), a * x * np.cos(om * x)])

    def eval_many(self, theta, xs):
        a, om = self.split(theta)
        xs = np.asarray(xs, dtype=float)
        return np.sin(np.outer(xs, om)) @ a

    def grad_many(self, theta, xs):
        a, om = self.split(theta)
        xs = np.asarray(xs, dtype=float)
        arg = np.outer(xs, om)
        return np.concatenate([np.sin(arg), a[None, :] * xs[:, None] * np.cos(arg)], axis=1)


@dataclass(frozen=True)
class SineGram:
    """Exact L2(U(-R,R)) inner products among e_u = sin(u x) and e'_u = x cos(u x)."""

    ee: float  # <e_u, e_v>
    de: float  # <e'_u, e_v>
    dd: float  # <e'_u, e'_v>


def sine_gram(u: float, v: float, radius: float) -> SineGram:
    """Closed forms for the sine/derivative Gram under U(-R, R):

        <e_u, e_v>   = (sinc(R(u-v)) - sinc(R(u+v))) / 2
        <e'_u, e_v>  = R (sinc'(R(u-v)) - sinc'(R(u+v))) / 2
        <e'_u, e'_v> = R^2 (-sinc''(R(u-v)) - sinc''(R(u+v))) / 2

    using sinc' = -psi and sinc'' = -phi from sinc_triple.
    """
    if not (radius > 0.0):
        raise ValueError("sine_gram expects radius > 0")
    p: SincTriple = sinc_triple(radius * (u - v))
    q: SincTriple = sinc_triple(radius * (u + v))
    ee = 0.5 * (p.s - q.s)
    de = 0.5 * radius * (-p.psi + q.psi)
    dd = 0.5 * radius * radius * (p.phi + q.phi)
    return SineGram(ee=ee, de=de, dd=dd)
