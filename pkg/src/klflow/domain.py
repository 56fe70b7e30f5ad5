"""Data distributions and the L2(D) geometry used by every functional norm.

Two distribution kinds cover all case studies: a weighted finite sample set
and the uniform distribution on a symmetric interval [-R, R], the latter
integrated by Gauss-Legendre quadrature.  Expectations of vector-valued
functions use the coordinate-sum convention: <g, h>_D = E_x[ g(x) . h(x) ]
with a Euclidean dot over output coordinates.
"""

from __future__ import annotations

import csv
from typing import Callable, Union

import numpy as np

FuncHandle = Callable[[np.ndarray | float], "np.ndarray | float"]

_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def gauss_legendre_nodes(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights of n-point Gauss-Legendre quadrature on [-1, 1].

    Nodes are the roots of the Legendre polynomial P_n, found by Newton
    iteration from the Chebyshev-angle initial guesses; weights are
    2 / ((1 - x^2) P_n'(x)^2).  Exact for polynomials of degree 2n - 1;
    weights sum to 2 within 1e-12.
    """
    if not isinstance(n, int) or not (2 <= n <= 4096):
        raise ValueError(f"gauss_legendre_nodes expects 2 <= n <= 4096, got {n!r}")
    if n in _GL_CACHE:
        x, w = _GL_CACHE[n]
        return x.copy(), w.copy()
    # Initial guesses, one per root, well separated for all n in range.
    k = np.arange(n)
    x = np.cos(np.pi * (k + 0.75) / (n + 0.5))
    for _ in range(100):
        # Recurrence (j+1) P_{j+1} = (2j+1) x P_j - j P_{j-1}.
        p_prev = np.ones_like(x)
        p = x.copy()
        for j in range(1, n):
            p_prev, p = p, ((2 * j + 1) * x * p - j * p_prev) / (j + 1)
        dp = n * (x * p - p_prev) / (x * x - 1.0)
        dx = p / dp
        x -= dx
        if np.max(np.abs(dx)) < 1e-15:
            break
    p_prev = np.ones_like(x)
    p = x.copy()
    for j in range(1, n):
        p_prev, p = p, ((2 * j + 1) * x * p - j * p_prev) / (j + 1)
    dp = n * (x * p - p_prev) / (x * x - 1.0)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    order = np.argsort(x)
    x, w = x[order], w[order]
    _GL_CACHE[n] = (x, w)
    return x.copy(), w.copy()


class Finite:
    """Finitely supported distribution: points x_i with probability weights.

    Weights are validated non-negative and normalized to sum to one on
    construction, so downstream code never re-checks normalization.
    """

    def __init__(self, samples, weights=None):
        xs = np.asarray(samples, dtype=float)
        if xs.ndim not in (1, 2) or xs.shape[0] == 0:
            raise ValueError(f"Finite expects (n,) or (n, d) samples, got shape {xs.shape}")
        if not np.all(np.isfinite(xs)):
            raise ValueError("Finite samples must be finite")
        n = xs.shape[0]
        if weights is None:
            ws = np.full(n, 1.0 / n)
        else:
            ws = np.asarray(weights, dtype=float)
            if ws.shape != (n,):
                raise ValueError(f"weights must have shape ({n},), got {ws.shape}")
            if not np.all(np.isfinite(ws)) or np.any(ws < 0.0):
                raise ValueError("weights must be finite and non-negative")
            total = float(np.sum(ws))
            if total <= 0.0:
                raise ValueError("weights must have positive total mass")
            ws = ws / total
        self.xs = xs
        self.ws = ws
        self.n = n

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        return self.xs, self.ws


class UniformInterval:
    """Uniform distribution on [-R, R], integrated by Gauss-Legendre.

    E[g] = 1/(2R) * integral over [-R, R], discretized on `nodes` points.
    512 nodes resolve every oscillatory integrand used in the case studies
    (frequencies with R*omega up to a few hundred).
    """

    def __init__(self, radius: float, nodes: int = 512):
        if not (radius > 0.0) or not np.isfinite(radius):
            raise ValueError(f"UniformInterval expects radius > 0, got {radius}")
        self.radius = float(radius)
        t, w = gauss_legendre_nodes(nodes)
        self.nodes = nodes
        self.xs = self.radius * t
        self.ws = 0.5 * w  # sum to 1: the 1/(2R) density against dx = R dt
        self.n = nodes

    def points(self) -> tuple[np.ndarray, np.ndarray]:
        return self.xs, self.ws


DataDist = Union[Finite, UniformInterval]


def eval_on(g: FuncHandle, d: DataDist) -> np.ndarray:
    """Evaluate a function handle at every support point, one call per point."""
    xs, _ = d.points()
    return np.asarray([np.asarray(g(x), dtype=float) for x in xs], dtype=float)


def inner_d(g, h, d: DataDist) -> float:
    """<g, h>_D = E_x[g(x) . h(x)], coordinate-summed for vector outputs.

    g and h may be callables or pre-evaluated value arrays aligned with
    d.points().
    """
    _, ws = d.points()
    gv = g if isinstance(g, np.ndarray) else eval_on(g, d)
    hv = h if isinstance(h, np.ndarray) else eval_on(h, d)
    if gv.shape != hv.shape:
        raise ValueError(f"value shapes differ: {gv.shape} vs {hv.shape}")
    prod = gv * hv
    if prod.ndim > 1:
        prod = prod.reshape(prod.shape[0], -1).sum(axis=1)
    return float(np.dot(ws, prod))


def seminorm_d(g, d: DataDist) -> float:
    """||g||_D = sqrt(<g, g>_D), clamping quadrature round-off above -1e-14."""
    q = inner_d(g, g, d)
    if q < -1e-14:
        raise ValueError(f"negative squared seminorm {q:.3e} beyond round-off")
    return float(np.sqrt(max(q, 0.0)))


def finite_from_csv(path) -> tuple[Finite, dict[str, np.ndarray]]:
    """Load a Finite distribution from CSV.

    Input coordinate columns are named x0, x1, ...; a `weight` column is
    optional (uniform weights otherwise).  Any other columns are returned
    in the extras dict, parsed as floats.  Lines starting with `#` are
    certificate comments and are skipped.
    """
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
    if len(rows) < 2:
        raise ValueError(f"{path}: expected a header row and at least one sample")
    header = [c.strip() for c in rows[0]]
    coord_names = sorted(
        (c for c in header if c.startswith("x") and c[1:].isdigit()),
        key=lambda c: int(c[1:]),
    )
    if not coord_names:
        raise ValueError(f"{path}: no coordinate columns (x0, x1, ...) found")
    idx = {c: header.index(c) for c in header}
    data = np.array([[float(v) for v in r] for r in rows[1:]], dtype=float)
    xs = data[:, [idx[c] for c in coord_names]]
    if xs.shape[1] == 1:
        xs = xs[:, 0]
    ws = data[:, idx["weight"]] if "weight" in idx else None
    extras = {
        c: data[:, idx[c]]
        for c in header
        if c not in coord_names and c != "weight"
    }
    return Finite(xs, ws), extras


def finite_to_csv(d: Finite, path, extras: dict[str, np.ndarray] | None = None) -> None:
    """Write a Finite distribution (and optional extra columns) as CSV."""
    xs = d.xs if d.xs.ndim == 2 else d.xs[:, None]
    names = [f"x{i}" for i in range(xs.shape[1])] + ["weight"]
    cols = [xs[:, i] for i in range(xs.shape[1])] + [d.ws]
    for name, col in (extras or {}).items():
        names.append(name)
        cols.append(np.asarray(col, dtype=float))
    with open(path, "w", newline="") as fh:
        fh.write(",".join(names) + "\n")
        for i in range(d.n):
            fh.write(",".join(f"{c[i]:.17g}" for c in cols) + "\n")
