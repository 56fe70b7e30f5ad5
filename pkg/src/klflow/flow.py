"""Gradient-flow simulation: explicit time stepping of d theta/dt = -grad L.

Plain Euler is the default (the experiments are ordinary gradient descent);
classical RK4 is available for tight continuous-time comparisons.  The
integrator enforces monotone loss decrease up to 1e-6 relative slack: an
increase signals a step size too large for the local curvature and raises
instead of silently recording garbage.

A flow is trivial when the initial loss is already at the stopping target;
it records a single instant and keeps theta constant.

Trajectories serialize to CSV with `#`-prefixed `key=value` certificate
lines before the header, columns t, loss, then the optional instrumentation
channels (rayleigh, kl_residual, bound), then theta coordinates, then any
extra channels.  Floats print with 17 significant digits so round trips are
exact.
"""

from __future__ import annotations

import dataclasses
import math
import re
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .domain import DataDist, seminorm_d
from .loss import Desingularizer, FunctionalLoss, gradient_state, parametric_gradient
from .model import NetworkMap

_INTEGRATORS = ("euler", "rk4")
_FIXED_COLS = ("t", "loss", "rayleigh", "kl_residual", "bound")
_META_KEYS = ("halt", "grad_norm_final", "stop_loss")
_THETA_RE = re.compile(r"^theta(\d+)$")


def _fmt(x: float) -> str:
    return f"{x:.17g}"


@dataclass(frozen=True)
class FlowConfig:
    """Time-stepping parameters; validated on construction."""

    step: float
    max_time: float
    stop_loss: float = 0.0
    record_every: int = 1
    integrator: str = "euler"

    def __post_init__(self):
        if not (math.isfinite(self.step) and self.step > 0.0):
            raise ValueError("step must be positive and finite")
        if not (math.isfinite(self.max_time) and self.max_time > 0.0):
            raise ValueError("max_time must be positive and finite")
        if not (math.isfinite(self.stop_loss) and self.stop_loss >= 0.0):
            raise ValueError("stop_loss must be non-negative")
        if not (isinstance(self.record_every, int) and self.record_every >= 1):
            raise ValueError("record_every must be an integer >= 1")
        if self.integrator not in _INTEGRATORS:
            raise ValueError(f"integrator must be one of {_INTEGRATORS}")


@dataclass(frozen=True)
class Trajectory:
    """Recorded flow: times, parameters, losses, optional channels.

    `halt` is one of "stop_loss", "max_time", "trivial"; `certificates`
    carries named constants into the CSV header.
    """

    times: np.ndarray
    params: np.ndarray
    losses: np.ndarray
    rayleigh: np.ndarray | None = None
    kl_residual: np.ndarray | None = None
    bound: np.ndarray | None = None
    extras: dict[str, np.ndarray] = field(default_factory=dict)
    halt: str = "max_time"
    grad_norm_final: float = math.nan
    stop_loss: float = 0.0
    certificates: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        k = self.times.shape[0]
        if self.times.ndim != 1 or k < 1:
            raise ValueError("times must be a non-empty 1-d array")
        if k > 1 and not np.all(np.diff(self.times) > 0.0):
            raise ValueError("times must be strictly increasing")
        if self.params.ndim != 2 or self.params.shape[0] != k:
            raise ValueError("params must have one row per record")
        if self.losses.shape != (k,) or not np.all(np.isfinite(self.losses)):
            raise ValueError("losses must be finite, one per record")
        for chan in (self.rayleigh, self.kl_residual, self.bound):
            if chan is not None and chan.shape != (k,):
                raise ValueError("instrumentation channels must match record count")
        for name, vals in self.extras.items():
            if name in _FIXED_COLS or name in _META_KEYS or _THETA_RE.match(name):
                raise ValueError(f"extra channel name {name!r} is reserved")
            if vals.shape != (k,):
                raise ValueError(f"extra channel {name!r} must match record count")

    def __len__(self) -> int:
        return self.times.shape[0]

    def attach_bound(self, curve) -> "Trajectory":
        """Evaluate a bound curve at the record times and enforce domination."""
        vals = np.array([float(curve(t)) for t in self.times])
        bad = self.losses > vals * (1.0 + 1e-6)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise ArithmeticError(
                f"bound violated at t={self.times[i]}: loss {self.losses[i]} > {vals[i]}"
            )
        return dataclasses.replace(self, bound=vals)

    def to_csv(self, path: str) -> None:
        cols = ["t", "loss"]
        chans = {"rayleigh": self.rayleigh, "kl_residual": self.kl_residual, "bound": self.bound}
        cols += [name for name in ("rayleigh", "kl_residual", "bound") if chans[name] is not None]
        m = self.params.shape[1]
        cols += [f"theta{i}" for i in range(m)]
        cols += list(self.extras)
        lines = [
            f"# halt={self.halt}",
            f"# grad_norm_final={_fmt(self.grad_norm_final)}",
            f"# stop_loss={_fmt(self.stop_loss)}",
        ]
        lines += [f"# {key}={_fmt(self.certificates[key])}" for key in sorted(self.certificates)]
        lines.append(",".join(cols))
        for k in range(len(self)):
            row = [_fmt(self.times[k]), _fmt(self.losses[k])]
            row += [_fmt(chans[name][k]) for name in ("rayleigh", "kl_residual", "bound") if chans[name] is not None]
            row += [_fmt(v) for v in self.params[k]]
            row += [_fmt(self.extras[name][k]) for name in self.extras]
            lines.append(",".join(row))
        with open(path, "w") as fh:
            fh.write("\n".join(lines) + "\n")

    @classmethod
    def from_csv(cls, path: str) -> "Trajectory":
        meta: dict[str, str] = {}
        header: list[str] | None = None
        rows: list[list[float]] = []
        with open(path) as fh:
            for raw in fh:
                line = raw.strip()
                if not line:
                    continue
                if line.startswith("#"):
                    key, _, val = line[1:].strip().partition("=")
                    meta[key.strip()] = val.strip()
                    continue
                if header is None:
                    header = [c.strip() for c in line.split(",")]
                    continue
                rows.append([float(v) for v in line.split(",")])
        if header is None or not rows:
            raise ValueError(f"no trajectory data in {path}")
        data = {name: np.array([r[i] for r in rows]) for i, name in enumerate(header)}
        theta_cols = sorted(
            (int(_THETA_RE.match(n).group(1)), n) for n in header if _THETA_RE.match(n)
        )
        if not theta_cols or "t" not in data or "loss" not in data:
            raise ValueError(f"{path} lacks t/loss/theta columns")
        params = np.column_stack([data[n] for _, n in theta_cols])
        extras = {
            n: data[n]
            for n in header
            if n not in _FIXED_COLS and not _THETA_RE.match(n)
        }
        certs = {
            k: float(v) for k, v in meta.items() if k not in _META_KEYS
        }
        return cls(
            times=data["t"],
            params=params,
            losses=data["loss"],
            rayleigh=data.get("rayleigh"),
            kl_residual=data.get("kl_residual"),
            bound=data.get("bound"),
            extras=extras,
            halt=meta.get("halt", "max_time"),
            grad_norm_final=float(meta.get("grad_norm_final", "nan")),
            stop_loss=float(meta.get("stop_loss", "0")),
            certificates=certs,
        )


def integrate(
    model: NetworkMap,
    lossfn: FunctionalLoss,
    theta0: np.ndarray,
    d: DataDist,
    cfg: FlowConfig,
    *,
    rayleigh: bool = False,
    kl_desing: Desingularizer | None = None,
    extras: dict[str, Callable[[np.ndarray], float]] | None = None,
) -> Trajectory:
    """Run the flow from theta0 and record every record_every-th step.

    Optional channels, computed at records only: the Rayleigh quotient of the
    functional gradient R(K; grad ell, grad ell) (its tangent contraction is
    the parameter gradient, so it costs one extra seminorm), and the KL
    residual dphi(L) ||grad L||^2 for a chosen desingularizer.  `extras` maps
    column names to per-theta scalar functions.
    """
    extras = {} if extras is None else extras
    theta = np.array(theta0, dtype=float)
    lval, grad, gvals = gradient_state(model, lossfn, theta, d)
    if not math.isfinite(lval):
        raise ValueError("initial loss is not finite")

    times: list[float] = []
    params: list[np.ndarray] = []
    losses: list[float] = []
    ray: list[float] = []
    klr: list[float] = []
    extra_vals: dict[str, list[float]] = {name: [] for name in extras}

    def record(t: float) -> None:
        times.append(t)
        params.append(theta.copy())
        losses.append(lval)
        if rayleigh:
            hn = seminorm_d(gvals, d)
            ray.append(float(np.dot(grad, grad)) / hn ** 2 if hn > 0.0 else math.nan)
        if kl_desing is not None:
            klr.append(
                kl_desing.dphi(lval) * float(np.dot(grad, grad)) if lval > 0.0 else math.nan
            )
        for name, fn in extras.items():
            extra_vals[name].append(float(fn(theta)))

    halt = "max_time"
    if lval <= cfg.stop_loss:
        halt = "trivial" if lval == 0.0 else "stop_loss"
        record(0.0)
    else:
        record(0.0)
        h = cfg.step
        n_steps = max(1, int(math.ceil(cfg.max_time / h - 1e-9)))
        for k in range(1, n_steps + 1):
            if cfg.integrator == "euler":
                theta = theta - h * grad
            else:
                k1 = -grad
                _, g2 = parametric_gradient(model, lossfn, theta + 0.5 * h * k1, d)
                _, g3 = parametric_gradient(model, lossfn, theta + 0.5 * h * (-g2), d)
                _, g4 = parametric_gradient(model, lossfn, theta + h * (-g3), d)
                theta = theta + (h / 6.0) * (k1 + 2.0 * (-g2) + 2.0 * (-g3) + (-g4))
            new_lval, new_grad, new_gvals = gradient_state(model, lossfn, theta, d)
            if not (math.isfinite(new_lval) and np.all(np.isfinite(new_grad))):
                raise ArithmeticError(f"non-finite loss or gradient at step {k}")
            if new_lval - lval > 1e-6 * max(abs(lval), 1e-300):
                raise ArithmeticError(
                    f"loss increased at step {k} ({lval} -> {new_lval}): step size too large"
                )
            lval, grad, gvals = new_lval, new_grad, new_gvals
            t = k * h
            if lval <= cfg.stop_loss:
                halt = "stop_loss"
                record(t)
                break
            if k % cfg.record_every == 0 or k == n_steps:
                record(t)

    return Trajectory(
        times=np.array(times),
        params=np.array(params),
        losses=np.array(losses),
        rayleigh=np.array(ray) if rayleigh else None,
        kl_residual=np.array(klr) if kl_desing is not None else None,
        extras={name: np.array(vals) for name, vals in extra_vals.items()},
        halt=halt,
        grad_norm_final=float(np.linalg.norm(grad)),
        stop_loss=cfg.stop_loss,
    )


def limit_param(traj: Trajectory) -> np.ndarray:
    """Final parameters of a flow that provably stopped, as the limit proxy.

    Certification: the flow halted by reaching stop_loss (or was trivial),
    and the final gradient norm is at most 10 sqrt(stop_loss), the natural
    gradient scale of a quadratic-type loss at that level.
    """
    if traj.halt not in ("stop_loss", "trivial"):
        raise ValueError("limit not certified: flow halted by max_time before stop_loss")
    threshold = 10.0 * math.sqrt(traj.stop_loss)
    if not (traj.grad_norm_final <= threshold):
        raise ValueError(
            f"limit not certified: final gradient norm {traj.grad_norm_final} "
            f"exceeds {threshold}"
        )
    return traj.params[-1].copy()
