"""Sampled functions on (0, inf) and finite intervals, plus their calculus.

Log-uniform grids are the default on the half line: the inverse-power
weights and the Mellin transform are both natural in u = ln x.  Plain
integration is composite trapezoid in u (spectrally accurate for smooth
integrands that decay at the window ends) plus an explicit power-law model
for the unresolved (0, x_min) stub.  Cumulative integration, which feeds
the averaging operators, instead uses per-panel power-law fits with a
log-curvature correction: that rule integrates monomials exactly and is
fourth-order on smooth-in-log data, which plain trapezoid panels cannot
match at realistic grid sizes.
"""

from __future__ import annotations

import cmath
import csv
import math
import warnings
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import InvalidDataError, SingularityError

__all__ = [
    "LogGrid",
    "LinearGrid",
    "GridFunction",
    "QuadratureResult",
    "integrate",
    "norm_sq",
    "cumulative_integral",
    "differentiate",
    "write_csv",
    "read_csv",
]

DEFAULT_WINDOW = (1e-6, 1e6)
DEFAULT_POINTS = 4096


class LogGrid:
    """Log-uniform sampling of (x_min, x_max): x_i = exp(u_i), u_i uniform."""

    def __init__(self, x_min: float, x_max: float, count: int):
        if not (0 < x_min < x_max):
            raise ValueError(f"need 0 < x_min < x_max, got ({x_min}, {x_max})")
        if count < 8:
            raise ValueError(f"need at least 8 nodes, got {count}")
        self.x_min = float(x_min)
        self.x_max = float(x_max)
        self.count = int(count)
        self.u = np.linspace(math.log(x_min), math.log(x_max), count)
        self.h = self.u[1] - self.u[0]
        self.x = np.exp(self.u)
        self.u.flags.writeable = False
        self.x.flags.writeable = False

    @classmethod
    def default(cls, count: int = DEFAULT_POINTS) -> "LogGrid":
        return cls(*DEFAULT_WINDOW, count)

    def __len__(self):
        return self.count

    def __repr__(self):
        return f"LogGrid({self.x_min:g}, {self.x_max:g}, {self.count})"


class LinearGrid:
    """Uniform sampling of [a, b], endpoints included."""

    def __init__(self, a: float, b: float, count: int):
        if not (0 <= a < b):
            raise ValueError(f"need 0 <= a < b, got ({a}, {b})")
        if count < 8:
            raise ValueError(f"need at least 8 nodes, got {count}")
        self.a = float(a)
        self.b = float(b)
        self.count = int(count)
        self.x = np.linspace(a, b, count)
        self.h = self.x[1] - self.x[0]
        self.x.flags.writeable = False

    def __len__(self):
        return self.count

    def __repr__(self):
        return f"LinearGrid({self.a:g}, {self.b:g}, {self.count})"


Grid = Union[LogGrid, LinearGrid]


class GridFunction:
    """Complex samples on a grid; vector mode stores one length-m row per node.

    Values are frozen after construction, so instances are freely shareable.
    """

    def __init__(self, grid: Grid, values):
        values = np.asarray(values)
        if values.ndim not in (1, 2) or values.shape[0] != len(grid):
            raise InvalidDataError(
                f"values shape {values.shape} does not match grid of {len(grid)} nodes")
        if not np.iscomplexobj(values):
            values = values.astype(float)
        self.grid = grid
        self.values = values.copy()
        self.values.flags.writeable = False

    @classmethod
    def from_callable(cls, grid: Grid, fn: Callable) -> "GridFunction":
        return cls(grid, np.asarray(fn(grid.x)))

    @property
    def is_vector(self) -> bool:
        return self.values.ndim == 2

    @property
    def m(self) -> int:
        return self.values.shape[1] if self.is_vector else 1

    def map(self, fn: Callable) -> "GridFunction":
        return GridFunction(self.grid, fn(self.values))

    def __add__(self, other):
        if isinstance(other, GridFunction) and other.grid is self.grid:
            return GridFunction(self.grid, self.values + other.values)
        return NotImplemented

    def __rmul__(self, scalar):
        return GridFunction(self.grid, scalar * self.values)


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    error_estimate: float


def _require_finite(values) -> None:
    if not np.all(np.isfinite(values)):
        raise InvalidDataError("grid samples contain non-finite values")


def _fit_exponent(xa: float, xb: float, wa, wb):
    """Complex power-law exponent through two samples, or None if invalid."""
    if wa == 0 or wb == 0:
        return None
    ratio = complex(wb) / complex(wa)
    if (abs(ratio.imag) <= 1e-300 and ratio.real < 0) \
            or abs(cmath.phase(ratio)) >= 0.5 * math.pi:
        return None
    return cmath.log(ratio) / math.log(xb / xa)


def _power_stub(x, w, strict: bool) -> complex:
    """Mass of the local power-law model c x^gamma on (0, x[0]).

    gamma is fitted from the first two samples of the integrand; the fit is
    credible when the second and third samples agree on the exponent, which
    screens out boundary noise on negligible values.  The model integrates
    to w0 * x0 / (1 + gamma); a credible exponent <= -1 means the integral
    diverges, which raises under ``strict`` and degrades to the flat model
    otherwise.
    """
    x0, w0 = float(x[0]), w[0]
    if w0 == 0:
        return 0.0
    gamma = _fit_exponent(x0, float(x[1]), w0, w[1])
    if gamma is None:
        return w0 * x0  # flat fallback model
    gamma_next = _fit_exponent(float(x[1]), float(x[2]), w[1], w[2])
    credible = gamma_next is not None and \
        abs(gamma - gamma_next) <= 0.1 * (1.0 + abs(gamma))
    if not credible:
        return w0 * x0
    if abs(complex(w0).imag) == 0 and abs(gamma.imag) < 1e-12:
        gamma = gamma.real
    re_gamma = complex(gamma).real
    if re_gamma <= -1.0:
        if strict:
            raise SingularityError(
                f"integrand behaves like x^{re_gamma:.3f} near 0: not integrable")
        warnings.warn("stub model diverges; using flat fallback", stacklevel=3)
        return w0 * x0
    if re_gamma > 400.0:
        return 0.0
    return w0 * x0 / (1.0 + gamma)


def _decay_warning(weighted) -> None:
    # the left end is stub-corrected, so only gross non-decay matters there;
    # the right end has no tail model at all
    peak = np.max(np.abs(weighted))
    if peak > 0 and (abs(weighted[-1]) > 1e-8 * peak or abs(weighted[0]) > 1e-3 * peak):
        warnings.warn(
            "integrand does not decay at the window ends; "
            "truncation error may dominate", stacklevel=3)


def _halved(nodes, g):
    idx = np.arange(0, len(g), 2)
    if idx[-1] != len(g) - 1:
        idx = np.append(idx, len(g) - 1)
    return np.trapezoid(g[idx], nodes[idx])


def integrate(f: GridFunction, weight_power: float = 0.0) -> QuadratureResult:
    """Integral of f(x) x^p over the grid's window plus the (0, x_min) stub.

    On a LogGrid the rule is composite trapezoid in u = ln x with a
    Richardson error estimate from the half-resolution subgrid; the stub is
    the fitted power-law model.  The integrand must decay toward both window
    ends (checked heuristically, warned).  Linearity in f holds to rounding
    for such integrands.
    """
    if f.is_vector:
        raise InvalidDataError("integrate expects scalar values; use norm_sq for vectors")
    _require_finite(f.values)
    x = f.grid.x
    p = float(weight_power)
    if isinstance(f.grid, LogGrid):
        with np.errstate(over="ignore"):
            weighted = f.values * x**p          # integrand in the x measure
            g = weighted * x                    # du measure: f(e^u) e^{u(p+1)}
        _require_finite(g)
        _decay_warning(g)
        full = np.trapezoid(g, f.grid.u)
        half = _halved(f.grid.u, g)
        stub = _power_stub(x, weighted, strict=False)
        value = full + stub
    else:
        if x[0] == 0.0 and p != 0.0:
            if p > 0 or f.values[0] == 0:
                w0 = 0.0
            else:
                raise SingularityError("negative weight power at a grid node x = 0")
            weighted = np.concatenate(([w0], f.values[1:] * x[1:] ** p))
        else:
            weighted = f.values * x**p
        _require_finite(weighted)
        full = np.trapezoid(weighted, x)
        half = _halved(x, weighted)
        value = full
    err = abs(full - half) / 3.0
    if not np.iscomplexobj(f.values):
        value = float(np.real(value))
    return QuadratureResult(value=value, error_estimate=float(err))


def norm_sq(f: GridFunction, weight_power: float = 0.0) -> float:
    """Weighted squared norm: integral of ||f(x)||^2 x^p dx.

    Vector values contribute their pointwise squared Euclidean norm.
    """
    _require_finite(f.values)
    sq = np.abs(f.values) ** 2
    if f.is_vector:
        sq = sq.sum(axis=1)
    res = integrate(GridFunction(f.grid, sq), weight_power)
    return float(np.real(res.value))


def _exp_panel_phi(z):
    """(e^z - 1)/z, stable near z = 0, elementwise for complex z."""
    small = np.abs(z) < 1e-4
    zs = np.where(small, 0.0, z)
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        direct = (np.exp(zs) - 1.0) / np.where(small, 1.0, zs)
    series = 1.0 + z / 2.0 + z**2 / 6.0 + z**3 / 24.0
    return np.where(small, series, direct)


def _panel_masses(x, u, v):
    """Per-panel integrals of v dx by power-law fit with curvature correction.

    Exact for v = c x^gamma (any gamma, including complex exponents with a
    slowly varying phase); falls back to plain trapezoid wherever the fit is
    invalid (zeros, sign flips, wild exponents).  The correction term kills
    the leading O(h^3)-per-panel error proportional to the curvature of
    ln(v x) in u, making the rule fourth-order on smooth-in-log data.
    """
    dx = np.diff(x)
    du = np.diff(u)
    trap = 0.5 * dx * (v[:-1] + v[1:])

    w = v * x  # integrand in the u measure
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(w[:-1] != 0, w[1:] / np.where(w[:-1] != 0, w[:-1], 1.0), 0.0)
    ok = (w[:-1] != 0) & (w[1:] != 0) & np.isfinite(ratio)
    if np.iscomplexobj(v):
        ok &= np.abs(np.angle(np.where(ok, ratio, 1.0))) < 0.5 * np.pi
    else:
        ok &= np.where(ok, ratio, 1.0) > 0
    z = np.log(np.where(ok, ratio, 1.0))  # slope of ln w times du, per panel
    ok &= np.abs(z) < 50.0

    with np.errstate(over="ignore", invalid="ignore"):
        power = w[:-1] * du * _exp_panel_phi(z)
    ok &= np.isfinite(power)

    # curvature of ln w in u from neighbouring panel slopes
    npanels = len(du)
    slope = z / du
    corr = np.zeros(npanels, dtype=slope.dtype)
    if npanels >= 2:
        node_curv = (slope[1:] - slope[:-1]) / (0.5 * (du[1:] + du[:-1]))
        node_ok = ok[1:] & ok[:-1]
        left_k = np.zeros(npanels, dtype=slope.dtype)
        left_n = np.zeros(npanels)
        right_k = np.zeros(npanels, dtype=slope.dtype)
        right_n = np.zeros(npanels)
        left_k[1:] = np.where(node_ok, node_curv, 0.0)
        left_n[1:] = node_ok
        right_k[:-1] = np.where(node_ok, node_curv, 0.0)
        right_n[:-1] = node_ok
        counts = np.maximum(left_n + right_n, 1.0)
        corr = (left_k + right_k) / counts * du**2 / 12.0
        corr = np.where(np.abs(corr) < 0.5, corr, 0.0)
    fitted = power * (1.0 - corr)

    return np.where(ok, fitted, trap)


def cumulative_integral(f: GridFunction) -> GridFunction:
    """F(x_i) ~ integral of f from 0 (or the left endpoint) to x_i.

    On a LogGrid the unresolved (0, x_min) piece is the fitted power-law
    model; a fitted local exponent <= -1 raises SingularityError.  On a
    LinearGrid integration starts at the left endpoint.
    """
    if f.is_vector:
        raise InvalidDataError("cumulative_integral expects scalar values")
    _require_finite(f.values)
    x = f.grid.x
    v = f.values
    if isinstance(f.grid, LogGrid):
        stub = _power_stub(x, v, strict=True)
        panels = _panel_masses(x, f.grid.u, v)
    elif x[0] > 0:
        stub = 0.0
        panels = _panel_masses(x, np.log(x), v)
    else:
        stub = 0.0
        dx = np.diff(x)
        panels = 0.5 * dx * (v[:-1] + v[1:])
    dtype = complex if (np.iscomplexobj(panels) or np.iscomplexobj(v)) else float
    out = np.empty(len(x), dtype=dtype)
    out[0] = stub
    out[1:] = stub + np.cumsum(panels)
    return GridFunction(f.grid, out)


def differentiate(f: GridFunction, order: int = 1) -> GridFunction:
    """Finite-difference derivative of the stated order (fallback path only).

    On a LogGrid each pass differentiates centrally in u and applies the
    chain rule d/dx = e^{-u} d/du; ends are one-sided.  Second-order
    accurate in the grid spacing per pass; analytic closures should be
    preferred for anything acceptance-critical.
    """
    if order < 1:
        raise ValueError("order must be >= 1")
    if len(f.grid) < 2 * order + 2:
        raise ValueError(f"grid too small for order {order} differentiation")
    if f.is_vector:
        raise InvalidDataError("differentiate expects scalar values")
    _require_finite(f.values)
    vals = f.values
    for _ in range(order):
        if isinstance(f.grid, LogGrid):
            vals = np.gradient(vals, f.grid.u, edge_order=2) / f.grid.x
        else:
            vals = np.gradient(vals, f.grid.x, edge_order=2)
    return GridFunction(f.grid, vals)


def write_csv(f: GridFunction, path) -> None:
    """Serialize as CSV: columns x, re, im (or x, re_1, im_1, ..., re_m, im_m)."""
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        if f.is_vector:
            header = ["x"]
            for k in range(1, f.m + 1):
                header += [f"re_{k}", f"im_{k}"]
            writer.writerow(header)
            for xi, row in zip(f.grid.x, f.values):
                out = [repr(float(xi))]
                for val in row:
                    out += [repr(float(np.real(val))), repr(float(np.imag(val)))]
                writer.writerow(out)
        else:
            writer.writerow(["x", "re", "im"])
            for xi, val in zip(f.grid.x, f.values):
                writer.writerow([repr(float(xi)),
                                 repr(float(np.real(val))),
                                 repr(float(np.imag(val)))])


def read_csv(path) -> GridFunction:
    """Load a GridFunction written by write_csv, re-deriving the grid kind."""
    with open(path, newline="") as handle:
        rows = list(csv.reader(handle))
    header, data = rows[0], rows[1:]
    x = np.array([float(r[0]) for r in data])
    if len(x) < 8:
        raise InvalidDataError("CSV needs at least 8 samples")
    raw = np.array([[float(c) for c in r[1:]] for r in data])
    values = raw[:, 0::2] + 1j * raw[:, 1::2]
    if values.shape[1] == 1:
        values = values[:, 0]
    if x[0] > 0:
        du = np.diff(np.log(x))
        if np.allclose(du, du[0], rtol=1e-8, atol=0):
            return GridFunction(LogGrid(x[0], x[-1], len(x)), values)
    dx = np.diff(x)
    if np.allclose(dx, dx[0], rtol=1e-8, atol=0):
        return GridFunction(LinearGrid(x[0], x[-1], len(x)), values)
    raise InvalidDataError("CSV nodes are neither log-uniform nor uniform")
