"""Property suites behind `klflow verify`.

One suite per module, each returning PropertyResult rows with a worst
margin: the smallest slack observed across all checks of that property,
negative meaning a violation.  Suites call into the public API only, and
the mutation-sensitive ones resolve functions through their module at call
time so that an injected defect is actually exercised.
"""

from __future__ import annotations

import math
import os
import tempfile
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import specfun
from .bounds import (
    SineConfig,
    lemniscate_bound,
    linear_exp_bound,
    logistic_bound,
    sine_constants,
    sine_gershgorin_check,
    sine_gram_check,
    sine_kappa_rho,
    sine_mu0,
    two_layer_bound,
)
from .domain import Finite, UniformInterval, inner_d, seminorm_d
from .flow import FlowConfig, Trajectory, integrate
from .linalg import SymMat, gershgorin_max, gershgorin_min, sym_eigen
from .loss import (
    CrossEntropyLoss,
    HalfQuadraticLoss,
    QuadraticLoss,
    log_desingularizer,
    logistic_desingularizer,
    gradient_state,
)
from .model import (
    LemniscateMap,
    LinearModel,
    SoftargmaxLinear,
    SumOfSines,
    TwoLayerNet,
    lemniscate_eval,
    lemniscate_grad,
    sine_gram,
    softargmax,
)
from .ntk import (
    cosine_singular_bound,
    ntk_matrix,
    ntk_quotient,
    shattering_bound,
    variational_check,
)
from .rng import SplitMix64


@dataclass(frozen=True)
class PropertyResult:
    suite: str
    name: str
    ok: bool
    worst: float
    detail: str = ""


def _result(suite: str, name: str, margins, detail: str = "") -> PropertyResult:
    worst = float(np.min(margins)) if len(np.atleast_1d(margins)) else math.inf
    return PropertyResult(suite=suite, name=name, ok=worst >= 0.0, worst=worst, detail=detail)


def _guarded(suite: str, name: str, fn: Callable[[], PropertyResult]) -> PropertyResult:
    try:
        return fn()
    except Exception as exc:  # a raising property is a failing property
        return PropertyResult(
            suite=suite, name=name, ok=False, worst=-math.inf, detail=f"{type(exc).__name__}: {exc}"
        )


# ---------------------------------------------------------------------------
# linalg
# ---------------------------------------------------------------------------


def suite_linalg() -> list[PropertyResult]:
    rng = SplitMix64(101)
    bracket, recon, ortho = [], [], []
    for trial in range(1000):
        n = rng.integer(1, 8)
        raw = rng.uniforms(n * n, -1.0, 1.0).reshape(n, n)
        m = SymMat(0.5 * (raw + raw.T))
        eig = sym_eigen(m)
        bracket.append(eig.values[0] - gershgorin_min(m.a))
        bracket.append(gershgorin_max(m.a) - eig.values[-1])
        if trial < 200:
            v, lam = eig.vectors, eig.values
            scale = max(float(np.linalg.norm(m.a)), 1e-300)
            recon.append(1e-9 - np.linalg.norm(m.a - v @ np.diag(lam) @ v.T) / scale)
            ortho.append(1e-9 - np.linalg.norm(v.T @ v - np.eye(n)))
    return [
        _result("linalg", "gershgorin_brackets_contain_spectrum", bracket),
        _result("linalg", "jacobi_reconstruction", recon),
        _result("linalg", "eigenvector_orthonormality", ortho),
    ]


# ---------------------------------------------------------------------------
# specfun
# ---------------------------------------------------------------------------


def suite_specfun() -> list[PropertyResult]:
    out = []

    def roundtrip() -> PropertyResult:
        margins = []
        for k in range(-3, 4):
            x = 10.0 ** k
            # x*e^x overflows float64 for x = 1000; route through the
            # log-argument entry point there.
            if x + math.log(x) <= 700.0:
                w = specfun.lambert_w0(x * math.exp(x))
            else:
                w = specfun.lambert_w0_of_exp(x + math.log(x))
            margins.append(1e-10 - abs(w - x) / x)
        return _result("specfun", "w0_roundtrip", margins)

    def increasing() -> PropertyResult:
        xs = np.linspace(0.0, 1e6, 1000)
        ws = np.array([specfun.lambert_w0(x) for x in xs])
        return _result("specfun", "w0_strictly_increasing", np.diff(ws))

    def hoorfar() -> PropertyResult:
        margins = []
        for a in np.linspace(1.0, 300.0 * math.log(10.0), 60):
            w = specfun.lambert_w0_of_exp(a)
            # equality holds at x = e exactly; allow float noise there
            margins.append(w - (a - math.log(a)) + 1e-12)
        return _result("specfun", "hoorfar_lower_bound", margins)

    def envelopes() -> PropertyResult:
        xs = np.linspace(-100.0, 100.0, 4001)
        xs = xs[np.abs(xs) > 1e-9]
        margins = []
        for x in xs:
            t = specfun.sinc_triple(float(x))
            cap = 2.0 / abs(x)
            margins.append(min(1.0, cap) - abs(t.s))
            margins.append(min(0.5, cap) - abs(t.psi))
            margins.append(cap - abs(t.phi))
        return _result("specfun", "sinc_family_envelopes", margins)

    def monotone() -> PropertyResult:
        x0 = specfun.first_zero_of_phi()
        xs = np.linspace(0.0, x0, 10_000)
        phis = np.array([specfun.sinc_triple(float(x)).phi for x in xs])
        psis = np.array([specfun.sinc_triple(float(x)).psi for x in xs])
        # 1e-12 absorbs round-off: phi(x0) = 0 by definition of x0, and the
        # series/direct evaluation seam can wiggle adjacent grid values.
        margins = [float(np.min(phis)) + 1e-12, float(np.min(psis)) + 1e-12]
        margins.append(float(np.min(-np.diff(phis))) + 1e-12)
        margins.append(float(np.min(np.diff(psis))) + 1e-12)
        return _result("specfun", "phi_decreasing_psi_increasing_on_0_x0", margins)

    def finite_diff() -> PropertyResult:
        h = 1e-5
        margins = []
        rng = SplitMix64(102)
        sinc = lambda x: math.sin(x) / x
        for _ in range(50):
            x = rng.uniform(0.1, 20.0) * (1.0 if rng.uniform() < 0.5 else -1.0)
            t = specfun.sinc_triple(x)
            d1 = (sinc(x + h) - sinc(x - h)) / (2.0 * h)
            d2 = (sinc(x + h) - 2.0 * sinc(x) + sinc(x - h)) / (h * h)
            margins.append(1e-6 - abs(-t.psi - d1))
            margins.append(1e-4 - abs(-t.phi - d2))
        return _result("specfun", "sinc_triple_matches_finite_differences", margins)

    for name, fn in (
        ("w0_roundtrip", roundtrip),
        ("w0_strictly_increasing", increasing),
        ("hoorfar_lower_bound", hoorfar),
        ("sinc_family_envelopes", envelopes),
        ("phi_psi_monotone", monotone),
        ("sinc_fd", finite_diff),
    ):
        out.append(_guarded("specfun", name, fn))
    return out


# ---------------------------------------------------------------------------
# domain
# ---------------------------------------------------------------------------


def _random_poly(rng: SplitMix64, deg: int = 4) -> np.ndarray:
    return rng.normals(deg + 1)


def suite_domain() -> list[PropertyResult]:
    rng = SplitMix64(103)
    cs, bil = [], []
    for _ in range(100):
        n = 3 + rng.integer(0, 12)
        d = Finite(rng.normals(n), rng.uniforms(n, 0.1, 1.0))
        xs, _ = d.points()
        cg = np.polyval(_random_poly(rng), xs)
        ch = np.polyval(_random_poly(rng), xs)
        cs.append(
            seminorm_d(cg, d) * seminorm_d(ch, d) + 1e-12 - abs(inner_d(cg, ch, d))
        )
        a, b = rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)
        c2 = np.polyval(_random_poly(rng), xs)
        lhs = inner_d(a * cg + b * c2, ch, d)
        rhs = a * inner_d(cg, ch, d) + b * inner_d(c2, ch, d)
        bil.append(1e-12 - abs(lhs - rhs))

    # A polynomial vanishing exactly on the support has seminorm exactly 0.
    supp = Finite(np.array([1.0, 2.0, 3.0]))
    gone = lambda x: (x - 1.0) * (x - 2.0) * (x - 3.0)
    degeneracy = [0.0 if seminorm_d(gone, supp) == 0.0 else -1.0]

    conv = []
    for _ in range(20):
        r = rng.uniform(0.5, 10.0)
        u = rng.uniform(0.0, 50.0 / r)
        v = rng.uniform(0.0, 50.0 / r)
        vals = []
        for nodes in (256, 512):
            dom = UniformInterval(r, nodes=nodes)
            xs, _ = dom.points()
            vals.append(inner_d(np.sin(u * xs), np.sin(v * xs), dom))
        conv.append(1e-10 - abs(vals[0] - vals[1]))

    return [
        _result("domain", "cauchy_schwarz", cs),
        _result("domain", "inner_product_bilinearity", bil),
        _result("domain", "seminorm_degeneracy_off_support", degeneracy),
        _result("domain", "quadrature_node_doubling_stability", conv),
    ]


# ---------------------------------------------------------------------------
# model
# ---------------------------------------------------------------------------


def _fd_gradient(model, theta: np.ndarray, x, h: float = 1e-6) -> np.ndarray:
    cols = []
    for i in range(model.param_dim):
        dp = theta.copy()
        dm = theta.copy()
        dp[i] += h
        dm[i] -= h
        cols.append((np.asarray(model.eval(dp, x)) - np.asarray(model.eval(dm, x))) / (2.0 * h))
    g = np.stack(cols, axis=-1)
    return g


def _model_zoo(rng: SplitMix64):
    zoo = [
        (LinearModel(3), lambda: rng.normals(3)),
        (LemniscateMap("sphere"), lambda: rng.normals(2)),
        (LemniscateMap("line"), lambda: rng.normals(2)),
        (SoftargmaxLinear(3, 4), lambda: rng.normals(4)),
        (TwoLayerNet(5, 2), lambda: rng.normals(2)),
        (SumOfSines(3), lambda: float(rng.uniform(-2.0, 2.0))),
    ]
    return [(mdl, lambda m=mdl: rng.normals(m.param_dim), dx) for mdl, dx in zoo]


def suite_model() -> list[PropertyResult]:
    rng = SplitMix64(104)
    grads = []
    for model, draw_theta, draw_x in _model_zoo(rng):
        for _ in range(50):
            theta = draw_theta()
            x = draw_x()
            g = np.asarray(model.grad(theta, x), dtype=float)
            fd = _fd_gradient(model, theta, x)
            scale = max(float(np.max(np.abs(fd))), 1.0)
            grads.append(1e-5 - float(np.max(np.abs(g - fd))) / scale)

    member = []
    for variant, grid in (
        ("sphere", np.linspace(0.0, 2.0 * math.pi, 10_000)),
        ("line", np.linspace(-10.0, 10.0, 10_000)),
    ):
        for t in grid:
            a, b = lemniscate_eval(variant, float(t))
            q = a * a + b * b
            member.append(1e-10 - abs(q * q - (a * a - b * b)))

    period = []
    for t in np.linspace(-math.pi, math.pi, 200):
        delta = lemniscate_eval("sphere", float(t) + 2.0 * math.pi) - lemniscate_eval(
            "sphere", float(t)
        )
        period.append(1e-12 - float(np.max(np.abs(delta))))

    # Matched points between the two parameterizations: nu = tan(theta/2)
    # solves F_L(nu) = F_S(theta); tangents must align after normalization.
    rays = []
    for _ in range(100):
        t = rng.uniform(-math.pi + 0.2, math.pi - 0.2)
        nu = math.tan(0.5 * t)
        gap = lemniscate_eval("line", nu) - lemniscate_eval("sphere", t)
        rays.append(1e-10 - float(np.max(np.abs(gap))))
        gs = lemniscate_grad("sphere", t)
        gl = lemniscate_grad("line", nu)
        ns, nl = np.linalg.norm(gs), np.linalg.norm(gl)
        if ns > 1e-12 and nl > 1e-12:
            rays.append(1e-6 - float(np.linalg.norm(gs / ns - gl / nl)))

    softj = []
    for _ in range(50):
        u = rng.normals(4)
        e = softargmax(u)
        jac = np.diag(e) - np.outer(e, e)
        h = 1e-6
        for j in range(4):
            up, um = u.copy(), u.copy()
            up[j] += h
            um[j] -= h
            fd = (softargmax(up) - softargmax(um)) / (2.0 * h)
            softj.append(1e-6 - float(np.max(np.abs(jac[:, j] - fd))))

    grams, antisym = [], []
    for _ in range(100):
        r = rng.uniform(0.5, 10.0)
        u = rng.uniform(0.0, 50.0 / r)
        v = rng.uniform(0.0, 50.0 / r)
        dom = UniformInterval(r, nodes=512)
        xs, _ = dom.points()
        g = sine_gram(u, v, r)
        eu, ev = np.sin(u * xs), np.sin(v * xs)
        du, dv = xs * np.cos(u * xs), xs * np.cos(v * xs)
        grams.append(1e-8 - abs(g.ee - inner_d(eu, ev, dom)))
        grams.append(1e-8 - abs(g.de - inner_d(du, ev, dom)) / max(r, 1.0))
        grams.append(1e-8 - abs(g.dd - inner_d(du, dv, dom)) / max(r * r, 1.0))
    sines = SumOfSines(2)
    for _ in range(20):
        theta = rng.normals(4)
        x = rng.uniform(0.1, 3.0)
        antisym.append(1e-12 - abs(sines.eval(theta, x) + sines.eval(theta, -x)))

    return [
        _result("model", "gradients_match_finite_differences", grads),
        _result("model", "lemniscate_membership", member),
        _result("model", "sphere_parameterization_periodicity", period),
        _result("model", "tangent_rays_positively_proportional", rays),
        _result("model", "softargmax_jacobian_structure", softj),
        _result("model", "sine_gram_closed_forms_vs_quadrature", grams),
        _result("model", "sum_of_sines_antisymmetry", antisym),
    ]


# ---------------------------------------------------------------------------
# loss
# ---------------------------------------------------------------------------


def _loss_zoo(rng: SplitMix64):
    n = 8
    d1 = Finite(rng.normals(n), rng.uniforms(n, 0.1, 1.0))
    fstar = rng.normals(n)
    labels = np.array([int(rng.integer(0, 2)) for _ in range(n)])
    cases = [
        (QuadraticLoss(fstar, d1), (n,)),
        (HalfQuadraticLoss(fstar, d1), (n,)),
        (CrossEntropyLoss(labels, d1), (n, 3)),
    ]
    return cases


def suite_loss() -> list[PropertyResult]:
    rng = SplitMix64(105)
    contract = []
    for lossfn, shape in _loss_zoo(rng):
        for _ in range(20):
            f = rng.normals(*shape)
            g = rng.normals(*shape)
            eps = 1e-6
            num = (lossfn.value(f + eps * g) - lossfn.value(f - eps * g)) / (2.0 * eps)
            ana = inner_d(lossfn.grad_values(f), g, lossfn.d)
            contract.append(1e-5 - abs(num - ana))

    # Prop 3.1 on a measured trajectory: with mu = min kl_residual, the
    # integrated bound phi_inv(phi(L0) - mu t) dominates the recorded losses.
    rng2 = SplitMix64(106)
    d = Finite(rng2.normals(20, 3))
    xs, _ = d.points()
    theta_star = rng2.normals(3)
    lossfn = QuadraticLoss(xs @ theta_star, d)
    traj = integrate(
        LinearModel(3),
        lossfn,
        rng2.normals(3),
        d,
        FlowConfig(step=1e-3, max_time=1.0, record_every=10),
        kl_desing=log_desingularizer(),
    )
    desing = log_desingularizer()
    mu = float(np.nanmin(traj.kl_residual))
    integ = []
    phi_l0 = desing.phi(float(traj.losses[0]))
    for t, l in zip(traj.times, traj.losses):
        cap = desing.phi_inv(phi_l0 - mu * float(t))
        integ.append(cap * (1.0 + 1e-9) - float(l))

    sink = []
    for desing in (log_desingularizer(), logistic_desingularizer()):
        vals = [desing.phi(10.0 ** -k) for k in range(1, 13)]
        sink.extend(-np.diff(vals))
        sink.append(1.0 if vals[-1] < -10.0 else -1.0)

    return [
        _result("loss", "gradient_contract_finite_difference", contract),
        _result("loss", "kl_integration_bound_on_trajectory", integ),
        _result("loss", "desingularizers_diverge_at_zero", sink),
    ]


# ---------------------------------------------------------------------------
# ntk
# ---------------------------------------------------------------------------


def _ntk_zoo(rng: SplitMix64):
    """(model, lossfn, theta, d) quadruples covering all five model families."""
    n = 12
    d_lin = Finite(rng.normals(n, 3))
    xs_lin, _ = d_lin.points()
    d_lem = Finite(np.array([[4.0, -1.0]]), np.array([1.0]))
    d_cls = Finite(rng.normals(n, 4))
    labels = np.array([int(rng.integer(0, 2)) for _ in range(n)])
    d_two = Finite(rng.normals(n, 2))
    two = TwoLayerNet(4, 2)
    xs_two, _ = d_two.points()
    d_sin = UniformInterval(3.0, nodes=128)
    sines = SumOfSines(2)
    xs_sin, _ = d_sin.points()
    return [
        (LinearModel(3), QuadraticLoss(xs_lin @ rng.normals(3), d_lin), rng.normals(3), d_lin),
        (LemniscateMap("sphere"), QuadraticLoss(np.array([-3.0]), d_lem), rng.normals(1), d_lem),
        (SoftargmaxLinear(3, 4), CrossEntropyLoss(labels, d_cls), rng.normals(12), d_cls),
        (
            two,
            QuadraticLoss(two.eval_many(rng.normals(two.param_dim), xs_two), d_two),
            rng.normals(two.param_dim),
            d_two,
        ),
        (
            sines,
            HalfQuadraticLoss(sines.eval_many(rng.normals(4), xs_sin), d_sin),
            rng.normals(4),
            d_sin,
        ),
    ]


def suite_ntk() -> list[PropertyResult]:
    rng = SplitMix64(107)
    comp, vareq = [], []
    for model, lossfn, theta, d in _ntk_zoo(rng):
        lval, grad, gvals = gradient_state(model, lossfn, theta, d)
        hn = seminorm_d(gvals, d)
        if hn == 0.0:
            continue
        quot = ntk_quotient(model, theta, gvals, d)
        lhs = float(np.dot(grad, grad))
        rhs = quot * hn * hn
        comp.append(1e-9 - abs(lhs - rhs) / max(abs(lhs), 1e-300))
        rep = variational_check(model, theta, gvals, d, trials=100, rng=rng.spawn(1))
        vareq.append(1e-9 - abs(rep.exact - rep.at_maximizer) / max(rep.exact, 1e-300))
        vareq.append(rep.exact + 1e-10 - rep.trial_max)

    rrange = []
    for trial in range(5):
        model = TwoLayerNet(3, 2)
        d = Finite(rng.normals(10, 2))
        theta = rng.normals(model.param_dim)
        kern = ntk_matrix(model, theta, d)
        _, ws = d.points()
        wh = np.sqrt(ws)
        weighted = SymMat(wh[:, None] * kern.mat.a * wh[None, :])
        eig = sym_eigen(weighted)
        for _ in range(10):
            h = rng.normals(10)
            q = ntk_quotient(model, theta, h, d)
            rrange.append(q - float(eig.values[0]) + 1e-9)
            rrange.append(float(eig.values[-1]) - q + 1e-9)

    p35 = []
    for trial in range(100):
        model = TwoLayerNet(3, 2)
        n = 10
        d = Finite(rng.normals(n, 2))
        theta = rng.normals(model.param_dim)
        k = 1 + rng.integer(0, 3)
        basis = [rng.normals(model.param_dim) for _ in range(k)]
        h = rng.normals(n)
        exact = ntk_quotient(model, theta, h, d)
        _, _, bound = cosine_singular_bound(model, theta, h, basis, d)
        p35.append(exact - bound + 1e-10)

    p36 = []
    for trial in range(100):
        model = SumOfSines(2) if trial % 2 == 0 else TwoLayerNet(3, 2)
        dim_x = 1 if trial % 2 == 0 else 2
        n = 10
        d = Finite(rng.normals(n) if dim_x == 1 else rng.normals(n, dim_x))
        theta = rng.normals(model.param_dim)
        k = 1 + rng.integer(0, 3)
        g_vals = [rng.normals(n) for _ in range(k)]
        coefs = rng.normals(k)
        h = sum(c * g for c, g in zip(coefs, g_vals))
        if seminorm_d(h, d) < 1e-9:
            continue
        a_vecs = [rng.normals(model.param_dim) for _ in range(k)]
        bound = shattering_bound(model, theta, h, a_vecs, g_vals, d)
        p36.append(math.sqrt(max(ntk_quotient(model, theta, h, d), 0.0)) - bound + 1e-9)

    return [
        _result("ntk", "composition_identity", comp),
        _result("ntk", "variational_equality_at_maximizer", vareq),
        _result("ntk", "rayleigh_quotient_within_kernel_spectrum", rrange),
        _result("ntk", "cosine_singular_lower_bound", p35),
        _result("ntk", "shattering_lower_bound", p36),
    ]


# ---------------------------------------------------------------------------
# flow
# ---------------------------------------------------------------------------


def _identity_setup(d: int, rng: SplitMix64):
    dist = Finite(math.sqrt(d) * np.eye(d), np.full(d, 1.0 / d))
    xs, _ = dist.points()
    theta_star = rng.normals(d)
    lossfn = QuadraticLoss(xs @ theta_star, dist)
    return dist, lossfn, theta_star


def suite_flow() -> list[PropertyResult]:
    rng = SplitMix64(108)
    dist, lossfn, _ = _identity_setup(3, rng)
    theta0 = rng.normals(3)

    mono = []
    for integ in ("euler", "rk4"):
        traj = integrate(
            LinearModel(3),
            lossfn,
            theta0,
            dist,
            FlowConfig(step=1e-2, max_time=1.0, integrator=integ),
        )
        diffs = np.diff(traj.losses)
        mono.append(float(np.min(1e-6 * np.abs(traj.losses[:-1]) - diffs)))

    # First-order convergence: halving the Euler step halves the deviation
    # from the exact exponential solution.
    def deviation(step: float, thin: int) -> float:
        traj = integrate(
            LinearModel(3),
            lossfn,
            theta0,
            dist,
            FlowConfig(step=step, max_time=1.0, record_every=thin),
        )
        exact = traj.losses[0] * np.exp(-4.0 * traj.times)
        return float(np.max(np.abs(traj.losses - exact)))

    ratio = deviation(0.02, 1) / deviation(0.01, 2)
    order = [0.4 - abs(ratio - 2.0)]

    traj = integrate(
        LinearModel(3),
        lossfn,
        theta0,
        dist,
        FlowConfig(step=1e-3, max_time=1.0, record_every=10, integrator="rk4"),
    )
    curve = linear_exp_bound(float(traj.losses[0]), 1.0, t_max=1.0)
    traj = traj.attach_bound(curve)
    dom = list(traj.bound * (1.0 + 1e-6) - traj.losses)

    def roundtrip() -> PropertyResult:
        margins = []
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "traj.csv")
            traj.to_csv(path)
            back = Trajectory.from_csv(path)
            margins.append(0.0 if np.array_equal(back.times, traj.times) else -1.0)
            margins.append(0.0 if np.array_equal(back.losses, traj.losses) else -1.0)
            margins.append(0.0 if np.array_equal(back.params, traj.params) else -1.0)
            margins.append(0.0 if back.halt == traj.halt else -1.0)
            back.to_csv(os.path.join(tmp, "again.csv"))
            with open(path, "rb") as fh1, open(os.path.join(tmp, "again.csv"), "rb") as fh2:
                margins.append(0.0 if fh1.read() == fh2.read() else -1.0)
        return _result("flow", "csv_roundtrip_exact", margins)

    return [
        _result("flow", "monotone_loss_decrease", mono),
        _result("flow", "euler_first_order_step_halving", order),
        _result("flow", "bound_domination_on_records", dom),
        _guarded("flow", "csv_roundtrip_exact", roundtrip),
    ]


# ---------------------------------------------------------------------------
# bounds
# ---------------------------------------------------------------------------


def _random_sine_config(rng: SplitMix64) -> SineConfig:
    m = 1 + rng.integer(0, 3)
    radius = rng.uniform(1.6, 20.0)
    x0 = specfun.first_zero_of_phi()
    mu = rng.uniform(6.0, 60.0)
    eta = rng.uniform(0.01, min(x0, 0.45 * mu))
    delta = mu / radius
    eps = eta / radius
    offsets = np.sort(np.array([rng.uniform(0.0, delta) for _ in range(m)]))
    omega_star = delta * (np.arange(m) + 1.0) + offsets
    omega = omega_star + np.array([rng.uniform(-eps, eps) for _ in range(m)])
    return SineConfig(
        m=m,
        radius=radius,
        eta=eta,
        mu=mu,
        alpha=rng.uniform(0.3, 1.0),
        omega=omega,
        omega_star=omega_star,
    )


def suite_bounds() -> list[PropertyResult]:
    rng = SplitMix64(109)
    noninc, t0 = [], []
    curves = [
        (linear_exp_bound(2.0, 1.0), 2.0),
        (lemniscate_bound(3.0, 0.25, 0.5), 3.0),
        (logistic_bound(0.5, 1.0 / 3.0, math.log(2.0)), math.log(2.0)),
        (two_layer_bound(1.5, 0.04, 2.0), 1.5 + 0.04),
    ]
    for curve, start in curves:
        ts = np.linspace(0.0, curve.t_max, 500)
        vals = np.array([curve(t) for t in ts])
        noninc.extend(1e-12 * np.maximum(np.abs(vals[:-1]), 1.0) - np.diff(vals))
        t0.append(1e-9 * max(start, 1.0) - abs(curve(0.0) - start))

    limits = []
    eta, m = 0.5, 2
    trip = specfun.sinc_triple(eta)
    k_lim = trip.phi / (1.0 / 3.0)
    r_lim = trip.psi / trip.phi
    prev_k = prev_r = math.inf
    for mu in (1e2, 1e3, 1e4, 1e5, 1e6):
        kappa0, rho0, _ = sine_kappa_rho(mu, eta, m)
        dk, dr = abs(kappa0 - k_lim), abs(rho0 - r_lim)
        limits.append(prev_k - dk)
        limits.append(prev_r - dr)
        prev_k, prev_r = dk, dr
    limits.append(1e-4 - prev_k)
    limits.append(1e-4 - prev_r)

    def gersh() -> PropertyResult:
        margins = []
        for _ in range(100):
            cfg = _random_sine_config(rng)
            a = np.array(
                [
                    rng.uniform(math.sqrt(cfg.alpha), 2.0 * math.sqrt(cfg.alpha))
                    * (1.0 if rng.uniform() < 0.5 else -1.0)
                    for _ in range(cfg.m)
                ]
            )
            rep = sine_gershgorin_check(cfg, a, a, nodes=256)
            margins.append(rep.lam_min_n - rep.lam_min_n_certified)
            margins.append(rep.lam_max_g_certified - rep.lam_max_g)
            margins.append(1e-10 - abs(rep.lam_max_a - 1.0))
            margins.append(rep.sing_min_sq - rep.sing_min_sq_certified)
        return _result("bounds", "gershgorin_chain_brackets", margins)

    def gram_lemma() -> PropertyResult:
        margins = []
        for _ in range(100):
            cfg = _random_sine_config(rng)
            rep = sine_gram_check(cfg)
            margins.append(rep.worst_margin)
            margins.append(-float(rep.violations))
        return _result("bounds", "gram_lemma_inequalities", margins)

    def mu0_scan() -> PropertyResult:
        margins = []
        x0 = specfun.first_zero_of_phi()
        for m_ in (1, 2, 3, 4):
            mu0 = sine_mu0(m_)  # raises if the just-above scan fails
            margins.append(mu0)
            mu = 2.0 * mu0
            best = -math.inf
            for eta_ in np.logspace(-6, math.log10(0.999 * min(x0, 0.5 * mu)), 200):
                kappa0, rho0, _ = sine_kappa_rho(mu, float(eta_), m_)
                best = max(best, kappa0 - rho0)
            margins.append(best)
            kz, rz, _ = sine_kappa_rho(0.99 * mu0, 1e-9, m_)
            margins.append(rz - kz)
        return _result("bounds", "mu0_threshold_semantics", margins)

    return [
        _result("bounds", "bound_curves_non_increasing", noninc),
        _result("bounds", "bound_curves_start_at_initial_loss", t0),
        _result("bounds", "certificate_limits_at_large_separation", limits),
        _guarded("bounds", "gershgorin_chain_brackets", gersh),
        _guarded("bounds", "gram_lemma_inequalities", gram_lemma),
        _guarded("bounds", "mu0_threshold_semantics", mu0_scan),
    ]


# ---------------------------------------------------------------------------
# cli
# ---------------------------------------------------------------------------


def suite_cli() -> list[PropertyResult]:
    from .experiments import LinearCase, run_linear

    def determinism() -> PropertyResult:
        cfg = LinearCase(d=3, n_samples=10, step=1e-2, max_time=0.5, record_every=5)
        margins = []
        with tempfile.TemporaryDirectory() as tmp:
            d1, d2 = os.path.join(tmp, "a"), os.path.join(tmp, "b")
            os.makedirs(d1)
            os.makedirs(d2)
            paths1 = run_linear(cfg, d1)
            paths2 = run_linear(cfg, d2)
            for p1, p2 in zip(paths1, paths2):
                with open(p1, "rb") as f1, open(p2, "rb") as f2:
                    margins.append(0.0 if f1.read() == f2.read() else -1.0)
                back = Trajectory.from_csv(p1)
                margins.append(0.0 if back.times.size > 1 else -1.0)
        return _result("cli", "reruns_byte_identical_and_parseable", margins)

    return [_guarded("cli", "reruns_byte_identical_and_parseable", determinism)]


SUITES: dict[str, Callable[[], list[PropertyResult]]] = {
    "linalg": suite_linalg,
    "specfun": suite_specfun,
    "domain": suite_domain,
    "model": suite_model,
    "loss": suite_loss,
    "ntk": suite_ntk,
    "flow": suite_flow,
    "bounds": suite_bounds,
    "cli": suite_cli,
}


def run_suites(names: list[str] | None = None) -> list[PropertyResult]:
    """Run the requested suites (all by default) and collect their rows."""
    chosen = list(SUITES) if not names else names
    results: list[PropertyResult] = []
    for name in chosen:
        if name not in SUITES:
            raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
        results.extend(SUITES[name]())
    return results
