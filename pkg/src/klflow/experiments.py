"""Case-study experiment runners behind the command line.

Each `run_*` function takes a typed config, simulates its gradient flow,
attaches the matching convergence bound (domination is enforced at
attachment), and writes CSV artifacts.  All randomness flows from one
SplitMix64 seed per run, so identical configs produce byte-identical files.

Config files are flat `key=value` lines (`#` comments); unknown keys are
rejected against the case's dataclass fields.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bounds import (
    BoundCurve,
    SineConfig,
    bassin_probability,
    bassin_radius,
    in_bassin,
    initial_loss_bound_check,
    lemniscate_bound,
    linear_exp_bound,
    logistic_bound,
    logistic_tail_scan,
    radius_loss_check,
    sine_constants,
    sine_kappa_rho,
    sine_mu0,
    sine_rayleigh_verify,
    two_layer_bound,
    two_layer_kl_verify,
)
from .domain import Finite, UniformInterval, finite_to_csv
from .flow import FlowConfig, Trajectory, integrate, limit_param
from .linalg import SymMat, lambda_min_plus
from .loss import (
    CrossEntropyLoss,
    HalfQuadraticLoss,
    QuadraticLoss,
    log_desingularizer,
    logistic_desingularizer,
)
from .model import (
    LemniscateMap,
    LinearModel,
    SoftargmaxLinear,
    SumOfSines,
    TwoLayerNet,
    lambda_sv,
    lemniscate_eval,
    mu_s,
    separation_margin,
)
from .rng import SplitMix64
from .specfun import first_zero_of_phi


def parse_config_file(path: str) -> dict[str, str]:
    """Flat key=value config: one pair per line, `#` comments, no duplicates."""
    out: dict[str, str] = {}
    with open(path) as fh:
        for ln, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{ln}: expected key=value, got {line!r}")
            key, val = (s.strip() for s in line.split("=", 1))
            if not key:
                raise ValueError(f"{path}:{ln}: empty key")
            if key in out:
                raise ValueError(f"{path}:{ln}: duplicate key {key!r}")
            out[key] = val
    return out


def _coerce(val: str, like) -> object:
    if isinstance(like, bool):
        if val.lower() in ("true", "1", "yes"):
            return True
        if val.lower() in ("false", "0", "no"):
            return False
        raise ValueError(f"expected a boolean, got {val!r}")
    if isinstance(like, int):
        return int(val)
    if isinstance(like, float):
        return float(val)
    return val


def make_case(cls, overrides: dict[str, str]):
    """Instantiate a case config from string overrides, rejecting unknown keys."""
    defaults = cls()
    names = {f.name for f in dataclasses.fields(cls)}
    kwargs = {}
    for key, val in overrides.items():
        if key not in names:
            raise ValueError(f"unknown config key {key!r} for {cls.__name__}")
        try:
            kwargs[key] = _coerce(val, getattr(defaults, key))
        except ValueError as exc:
            raise ValueError(f"config key {key!r}: {exc}") from None
    return dataclasses.replace(defaults, **kwargs)


def _write(traj: Trajectory, out_dir: str, name: str, extra_certs: dict[str, float]) -> str:
    traj = dataclasses.replace(traj, certificates={**traj.certificates, **extra_certs})
    path = os.path.join(out_dir, name)
    traj.to_csv(path)
    return path


# ---------------------------------------------------------------------------
# Linear regression (exponential rate, equality at A = I)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearCase:
    d: int = 5
    n_samples: int = 40
    step: float = 1e-3
    max_time: float = 2.0
    record_every: int = 10
    integrator: str = "rk4"
    theta_scale: float = 1.0
    seed: int = 1

    def __post_init__(self):
        if self.d < 1 or self.n_samples < 1:
            raise ValueError("d and n_samples must be positive")
        if self.theta_scale <= 0.0:
            raise ValueError("theta_scale must be positive")


def _run_quadratic_flow(
    model, d, f_star_vals, theta0, flow_cfg
) -> tuple[Trajectory, BoundCurve]:
    lossfn = QuadraticLoss(f_star_vals, d)
    traj = integrate(
        model, lossfn, theta0, d, flow_cfg, rayleigh=True, kl_desing=log_desingularizer()
    )
    xs, ws = d.points()
    pts = xs if xs.ndim == 2 else xs[:, None]
    a_mat = np.einsum("n,ni,nj->ij", ws, pts, pts)
    lam = lambda_min_plus(SymMat(a_mat))
    curve = linear_exp_bound(float(traj.losses[0]), lam, t_max=flow_cfg.max_time)
    return traj.attach_bound(curve), curve


def run_linear(cfg: LinearCase, out_dir: str, jobs: int = 1) -> list[str]:
    """Identity-covariance and random-PSD-covariance linear flows."""
    rng = SplitMix64(cfg.seed)
    theta_star = rng.normals(cfg.d) * cfg.theta_scale
    theta0 = rng.normals(cfg.d) * cfg.theta_scale
    flow_cfg = FlowConfig(
        step=cfg.step,
        max_time=cfg.max_time,
        record_every=cfg.record_every,
        integrator=cfg.integrator,
    )

    # Second moment exactly I_d: points sqrt(d) e_i with weights 1/d.
    ident = Finite(math.sqrt(cfg.d) * np.eye(cfg.d), np.full(cfg.d, 1.0 / cfg.d))
    paths = []
    for name, dist in (
        ("linear_identity.csv", ident),
        ("linear_random.csv", Finite(rng.normals(cfg.n_samples, cfg.d))),
    ):
        xs, _ = dist.points()
        traj, curve = _run_quadratic_flow(
            LinearModel(cfg.d), dist, xs @ theta_star, theta0, flow_cfg
        )
        paths.append(_write(traj, out_dir, name, curve.certificate))
    return paths


# ---------------------------------------------------------------------------
# Lemniscate parameterizations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LemniscateCase:
    u: float = 4.0
    v: float = -1.0
    y: float = -3.0
    step: float = 1e-3
    max_time: float = 120.0
    stop_loss: float = 1e-10
    record_every: int = 100
    sweep_points: int = 512
    seed: int = 2

    def __post_init__(self):
        if self.sweep_points < 2:
            raise ValueError("sweep_points must be at least 2")


def _planar_loss_grad(cfg: LemniscateCase, ab: np.ndarray) -> np.ndarray:
    r = cfg.u * ab[0] + cfg.v * ab[1] - cfg.y
    return 2.0 * r * np.array([cfg.u, cfg.v])


def _lemniscate_extras(cfg: LemniscateCase, variant: str):
    def mu(theta: np.ndarray) -> float:
        t = float(theta[0])
        try:
            return mu_s(variant, t, _planar_loss_grad(cfg, lemniscate_eval(variant, t)))
        except ValueError:
            return math.nan

    def lam(theta: np.ndarray) -> float:
        return lambda_sv(variant, float(theta[0]))

    return {"mu": mu, "lam": lam}


def _run_one_lemniscate(cfg: LemniscateCase, variant: str) -> tuple[Trajectory, float]:
    model = LemniscateMap(variant)
    dist = Finite(np.array([[cfg.u, cfg.v]]), np.array([1.0]))
    lossfn = QuadraticLoss(np.array([cfg.y]), dist)
    flow_cfg = FlowConfig(
        step=cfg.step,
        max_time=cfg.max_time,
        stop_loss=cfg.stop_loss,
        record_every=cfg.record_every,
        integrator="euler",
    )
    traj = integrate(
        model,
        lossfn,
        np.array([0.0]),
        dist,
        flow_cfg,
        rayleigh=True,
        kl_desing=log_desingularizer(),
        extras=_lemniscate_extras(cfg, variant),
    )
    theta_star = float(limit_param(traj)[0])
    return traj, theta_star


def run_lemniscate(cfg: LemniscateCase, out_dir: str, jobs: int = 1) -> list[str]:
    """Both lemniscate flows with measured mu0/lambda certificates and the
    mu/lambda sweep tables over theta in [0, theta*]."""
    variants = ("sphere", "line")
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=2) as pool:
            results = list(pool.map(lambda v: _run_one_lemniscate(cfg, v), variants))
    else:
        results = [_run_one_lemniscate(cfg, v) for v in variants]

    paths = []
    for variant, (traj, theta_star) in zip(variants, results):
        mu_vals = traj.extras["mu"]
        lam_vals = traj.extras["lam"]
        finite = np.isfinite(mu_vals)
        mu0 = float(np.min(np.abs(mu_vals[finite])))
        lam_path = float(np.min(lam_vals))
        lam_limit = lambda_sv(variant, theta_star)
        curve = lemniscate_bound(
            float(traj.losses[0]), mu0, lam_path, t_max=max(float(traj.times[-1]), cfg.step)
        )
        traj = traj.attach_bound(curve)
        limit_pt = lemniscate_eval(variant, theta_star)
        certs = {
            **curve.certificate,
            "lam_limit": lam_limit,
            "theta_star": theta_star,
            "limit_a": float(limit_pt[0]),
            "limit_b": float(limit_pt[1]),
        }
        paths.append(_write(traj, out_dir, f"lemniscate_{variant}.csv", certs))

        grid = np.linspace(0.0, theta_star, cfg.sweep_points)
        extras = _lemniscate_extras(cfg, variant)
        sweep = Finite(grid.copy())
        table = {
            "mu": np.array([extras["mu"](np.array([t])) for t in grid]),
            "lam": np.array([extras["lam"](np.array([t])) for t in grid]),
        }
        sweep_path = os.path.join(out_dir, f"lemniscate_sweep_{variant}.csv")
        finite_to_csv(sweep, sweep_path, table)
        paths.append(sweep_path)
    return paths


# ---------------------------------------------------------------------------
# Softargmax cross-entropy presets
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogisticCase:
    preset: str = "tight"
    step: float = 0.1
    max_time: float = 3000.0
    record_every: int = 100
    tail_horizon: float = 1e12
    seed: int = 3

    def __post_init__(self):
        if self.preset not in ("tight", "random"):
            raise ValueError("preset must be 'tight' or 'random'")


def _tight_dataset(rng: SplitMix64) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # c=3 well-separated clusters on scaled axes of R^4; margin is large.
    c, d, scale = 3, 4, 3.0
    zeta = scale * np.eye(c, d)
    labels = np.arange(c)
    xs = scale * np.eye(c, d) + 0.1 * rng.normals(c, d)
    return xs, labels, zeta


def _random_dataset(rng: SplitMix64) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    # Gaussian cloud relabeled by a random ray: separable by construction.
    n, d, c = 100, 5, 4
    xs = rng.normals(n, d)
    zeta = rng.normals(c, d)
    labels = np.argmax(xs @ zeta.T, axis=1)
    return xs, labels, zeta


def run_logistic(cfg: LogisticCase, out_dir: str, jobs: int = 1) -> list[str]:
    """Cross-entropy gradient descent with the Lambert-W bound overlay."""
    rng = SplitMix64(cfg.seed)
    xs, labels, zeta = _tight_dataset(rng) if cfg.preset == "tight" else _random_dataset(rng)
    n = xs.shape[0]
    c, dim = zeta.shape
    dist = Finite(xs)
    lossfn = CrossEntropyLoss(labels, dist)
    model = SoftargmaxLinear(c, dim)
    flow_cfg = FlowConfig(
        step=cfg.step,
        max_time=cfg.max_time,
        record_every=cfg.record_every,
        integrator="euler",
    )
    traj = integrate(
        model,
        lossfn,
        np.zeros(model.param_dim),
        dist,
        flow_cfg,
        rayleigh=True,
        kl_desing=logistic_desingularizer(),
    )

    # The best available separating ray: the construction ray or the
    # late-time normalized parameter, whichever has the larger margin.
    eps_zeta = separation_margin(zeta, dist, labels)
    if eps_zeta <= 0.0:
        raise AssertionError("construction ray fails to separate its own labels")
    theta_T = traj.params[-1].reshape(c, dim)
    eps = eps_zeta
    if float(np.linalg.norm(theta_T)) > 0.0:
        eps = max(eps, separation_margin(theta_T, dist, labels))
    kappa = 1.0 / n
    l0 = float(traj.losses[0])
    curve = logistic_bound(eps, kappa, l0, t_max=max(cfg.max_time, 1.0))
    traj = traj.attach_bound(curve)
    knee = logistic_tail_scan(eps, kappa, l0, t_max=cfg.tail_horizon)
    certs = {
        **curve.certificate,
        "tail_knee": knee,
        "tau": 1.0 / (eps * eps * kappa * kappa),
    }
    return [_write(traj, out_dir, f"logistic_{cfg.preset}.csv", certs)]


# ---------------------------------------------------------------------------
# Periodic signal recovery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SinesCase:
    m: int = 2
    radius: float = 10.0
    mu: float = 40.0
    eta: float = 0.05
    alpha: float = 1.0
    trials: int = 100
    nodes: int = 512
    step: float = 1e-3
    max_time: float = 2.0
    stop_loss: float = 1e-12
    record_every: int = 10
    grid_mu: str = "20,30,40,60,100"
    grid_eta: str = "0.01,0.02,0.05,0.1,0.2,0.5,1.0,2.0"
    seed: int = 4

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be positive")


def _draw_sine_setup(cfg: SinesCase, rng: SplitMix64) -> tuple[SineConfig, np.ndarray, np.ndarray]:
    """Admissible targets and a paired starting point for the default window."""
    delta = cfg.mu / cfg.radius
    offsets = np.sort(np.array([rng.uniform(0.0, delta) for _ in range(cfg.m)]))
    omega_star = delta * (np.arange(cfg.m) + 1.0) + offsets
    root = math.sqrt(cfg.alpha)
    a_star = np.array(
        [rng.uniform(root, 2.0 * max(root, 1.0)) * (1.0 if k % 2 == 0 else -1.0) for k in range(cfg.m)]
    )
    eps = cfg.eta / cfg.radius
    omega = omega_star + np.array([rng.uniform(-eps, eps) for _ in range(cfg.m)])
    sine_cfg = SineConfig(
        m=cfg.m,
        radius=cfg.radius,
        eta=cfg.eta,
        mu=cfg.mu,
        alpha=cfg.alpha,
        omega=omega,
        omega_star=omega_star,
    )
    return sine_cfg, a_star, omega


def _certificate_table(cfg: SinesCase, out_dir: str) -> str:
    mu0 = sine_mu0(cfg.m)
    mus = [float(s) for s in cfg.grid_mu.split(",")] + [2.0 * mu0]
    etas = [float(s) for s in cfg.grid_eta.split(",")]
    x0 = first_zero_of_phi()
    rows = []
    for mu in mus:
        for eta in etas:
            if not (0.0 < eta < 0.5 * mu) or eta > x0:
                continue
            kappa0, rho0, base = sine_kappa_rho(mu, eta, cfg.m)
            gap = kappa0 - rho0
            vac = 1.0 if (base <= 0.0 or gap <= 0.0) else 0.0
            bound = 0.0 if vac else cfg.alpha * base * gap * gap / (1.0 + rho0)
            rows.append((mu, eta, kappa0, rho0, bound, vac))
    data = np.array(rows)
    table = Finite(data[:, :2])
    path = os.path.join(out_dir, "sines_certificates.csv")
    finite_to_csv(
        table,
        path,
        {
            "kappa0": data[:, 2],
            "rho0": data[:, 3],
            "bound": data[:, 4],
            "vacuous": data[:, 5],
        },
    )
    return path


def run_sines(cfg: SinesCase, out_dir: str, jobs: int = 1) -> list[str]:
    """Certificate grid, Rayleigh verification draws, and one recovery flow."""
    rng = SplitMix64(cfg.seed)
    sine_cfg, a_star, omega = _draw_sine_setup(cfg, rng)
    cert = sine_constants(sine_cfg)
    if cert.vacuous:
        raise ValueError("default sine configuration must have a non-vacuous certificate")

    # Rayleigh verification draws, partitioned into fixed chunks so the
    # result is identical whatever the worker count.
    chunks = min(8, cfg.trials)
    sizes = [cfg.trials // chunks + (1 if i < cfg.trials % chunks else 0) for i in range(chunks)]

    def run_chunk(i: int):
        return sine_rayleigh_verify(
            sine_cfg, a_star, a_star, trials=sizes[i], rng=rng.spawn(i), nodes=cfg.nodes
        )

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(run_chunk, range(chunks)))
    else:
        reports = [run_chunk(i) for i in range(chunks)]
    min_quotient = min(r.min_quotient for r in reports)

    model = SumOfSines(cfg.m)
    dist = UniformInterval(cfg.radius, nodes=cfg.nodes)
    xs, _ = dist.points()
    f_star = model.eval_many(model.join(a_star, sine_cfg.omega_star), xs)
    lossfn = HalfQuadraticLoss(f_star, dist)
    eps_pair = cfg.eta / cfg.radius

    def paired(theta: np.ndarray) -> float:
        _, om = model.split(theta)
        return 1.0 if float(np.max(np.abs(om - sine_cfg.omega_star))) <= eps_pair else 0.0

    flow_cfg = FlowConfig(
        step=cfg.step,
        max_time=cfg.max_time,
        stop_loss=cfg.stop_loss,
        record_every=cfg.record_every,
        integrator="euler",
    )
    traj = integrate(
        model,
        lossfn,
        model.join(a_star, omega),
        dist,
        flow_cfg,
        rayleigh=True,
        kl_desing=log_desingularizer(),
        extras={"paired": paired},
    )
    certs = {
        "kappa0": cert.kappa0,
        "rho0": cert.rho0,
        "bound": cert.bound,
        "mu0": sine_mu0(cfg.m),
        "verify_min_quotient": min_quotient,
        "verify_trials": float(cfg.trials),
    }
    return [
        _write(traj, out_dir, "sines_flow.csv", certs),
        _certificate_table(cfg, out_dir),
    ]


# ---------------------------------------------------------------------------
# Two-layer network
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TwoLayerCase:
    m: int = 64
    m_star: int = 4
    d: int = 2
    n_data: int = 32
    d_rad: float = 1.0
    eps: float = 0.04
    c: float = 4.0
    kl_samples: int = 50
    step: float = 0.01
    max_time: float = 200.0
    record_every: int = 50
    init_trials: int = 200
    bassin_trials: int = 400
    seed: int = 5

    def __post_init__(self):
        if self.m < self.m_star or self.m_star < 1:
            raise ValueError("need m >= m_star >= 1")
        if not (0.0 < self.eps and 0.0 < self.c):
            raise ValueError("eps and c must be positive")


def _ball_samples(rng: SplitMix64, n: int, d: int, radius: float) -> np.ndarray:
    g = rng.normals(n, d)
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    radii = np.array([radius * rng.uniform() ** (1.0 / d) for _ in range(n)])
    return g * radii[:, None]


def run_twolayer(cfg: TwoLayerCase, out_dir: str, jobs: int = 1) -> list[str]:
    """Teacher-student flow with KL-region verification artifacts."""
    rng = SplitMix64(cfg.seed)
    xs = _ball_samples(rng, cfg.n_data, cfg.d, cfg.d_rad)
    dist = Finite(xs)
    w_star = rng.normals(cfg.m_star, cfg.d)
    w_star *= 0.8 / np.maximum(np.linalg.norm(w_star, axis=1, keepdims=True), 1e-12)
    a_star = np.array([0.5 * (1.0 if i % 2 == 0 else -1.0) for i in range(cfg.m_star)])

    model = TwoLayerNet(cfg.m, cfg.d)
    teacher = TwoLayerNet(cfg.m_star, cfg.d)
    f_star = teacher.eval_many(teacher.join(w_star, a_star), xs)
    lossfn = QuadraticLoss(f_star, dist)

    eta = bassin_radius(cfg.eps, a_star, model.lip_sigma, cfg.d_rad)
    r_ball = 0.5 * eta
    # Seed the bassin deterministically: one student per teacher neuron,
    # the rest at standard normal init.
    w0 = rng.normals(cfg.m, cfg.d)
    w0[: cfg.m_star] = w_star
    a0 = rng.normals(cfg.m) / math.sqrt(cfg.m)
    theta0 = model.join(w0, a0)
    if not in_bassin(w0, w_star, eta):
        raise AssertionError("constructed initialization must satisfy the bassin condition")

    kl_report = two_layer_kl_verify(
        model,
        dist,
        w_star,
        a_star,
        cfg.eps,
        theta0,
        r_ball,
        cfg.c,
        cfg.kl_samples,
        rng=rng.spawn(1),
    )

    flow_cfg = FlowConfig(
        step=cfg.step,
        max_time=cfg.max_time,
        record_every=cfg.record_every,
        integrator="euler",
    )
    traj = integrate(model, lossfn, theta0, dist, flow_cfg, rayleigh=True)
    l0 = float(traj.losses[0])
    if l0 <= cfg.eps:
        raise ValueError("initial loss below eps: nothing to certify")
    kappa = 3.0 / (cfg.c * (l0 - cfg.eps)) ** 2
    curve = two_layer_bound(l0, cfg.eps, kappa, t_max=cfg.max_time)
    traj = traj.attach_bound(curve)
    radius_report = radius_loss_check(traj, cfg.c, cfg.eps)

    certs = {
        **curve.certificate,
        "c": cfg.c,
        "eta_bassin": eta,
        "kl_min_margin": kl_report.min_margin,
        "nu0_max_residual": kl_report.max_residual,
        "radius_checked": float(radius_report.checked),
        "radius_violations": float(radius_report.violations),
        "radius_worst_ratio": radius_report.worst_ratio,
    }
    paths = [_write(traj, out_dir, "twolayer_flow.csv", certs)]

    # Per-draw KL margins as their own table.
    kl_table = Finite(np.arange(cfg.kl_samples, dtype=float))
    kl_path = os.path.join(out_dir, "twolayer_kl.csv")
    finite_to_csv(
        kl_table, kl_path, {"margin": kl_report.margins, "residual": kl_report.residuals}
    )
    paths.append(kl_path)

    init_report = initial_loss_bound_check(
        [4, 64, 1024], cfg.d, cfg.d_rad, cfg.init_trials, rng=rng.spawn(2)
    )
    ms = sorted(init_report.means)
    init_path = os.path.join(out_dir, "twolayer_init.csv")
    finite_to_csv(
        Finite(np.array(ms, dtype=float)),
        init_path,
        {
            "mean": np.array([init_report.means[m] for m in ms]),
            "limit": np.full(len(ms), init_report.limit),
        },
    )
    paths.append(init_path)

    m_grid = [2 ** k for k in range(4, 11)]
    probs = [
        bassin_probability(w_star, m, eta=1.0, k=1, trials=cfg.bassin_trials, seed=cfg.seed + m)
        for m in m_grid
    ]
    bassin_path = os.path.join(out_dir, "twolayer_bassin.csv")
    finite_to_csv(
        Finite(np.array(m_grid, dtype=float)), bassin_path, {"prob": np.array(probs)}
    )
    paths.append(bassin_path)
    return paths


CASES = {
    "linear": (LinearCase, run_linear),
    "lemniscate": (LemniscateCase, run_lemniscate),
    "logistic": (LogisticCase, run_logistic),
    "sines": (SinesCase, run_sines),
    "twolayer": (TwoLayerCase, run_twolayer),
}
