"""Parameter sweeps of Gamma^2 and the flip probability with lambda-derivatives.

Sweeps the closed-form probability over 1-D / 2-D grids in (lambda, delta,
gamma), differentiates columns along a uniform lambda axis with 2nd-order
finite differences, and locates critical signatures: the peak of
|dP/dlambda| near lambda = 1 and the XX-chain staircase discontinuity.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .chain import ChainSpec, GroundMoments, ground_moments, spectrum
from .lz import LZParams, gamma_squared, lz_probability

AXIS_NAMES = ("lambda", "delta", "gamma")

# jump heuristic: max adjacent difference of dP/dlambda vs median adjacent difference
JUMP_FACTOR = 10.0

_DERIVATIVE_NAMES = {"p_flip": "dP_dlambda", "gamma2": "dGamma2_dlambda"}


@dataclass(frozen=True)
class Axis:
    name: str
    start: float
    stop: float
    points: int

    def __post_init__(self):
        if self.name not in AXIS_NAMES:
            raise ValueError(f"axis name must be one of {AXIS_NAMES}, got {self.name!r}")
        if self.points < 2:
            raise ValueError(f"axis needs >= 2 points, got {self.points}")
        if not self.start < self.stop:
            raise ValueError(f"axis needs start < stop, got [{self.start}, {self.stop}]")

    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.points)


@dataclass(frozen=True)
class GridSpec:
    axis1: Axis
    axis2: Optional[Axis] = None
    chain: ChainSpec = ChainSpec(kind="ising", n=201, lam=0.0)
    params: LZParams = LZParams(delta=5.0, v=50.0, g=0.1)

    def __post_init__(self):
        if self.axis2 is not None and self.axis2.name == self.axis1.name:
            raise ValueError(f"axis names must be distinct, both are {self.axis1.name!r}")
        for ax in self.axes:
            if ax.name == "gamma" and self.chain.kind == "ising":
                raise ValueError("a gamma axis requires kind='xy'")
            if ax.name == "lambda" and ax.start < 0:
                raise ValueError("lambda axis must stay >= 0")
            if ax.name == "gamma" and (ax.start < 0 or ax.stop > 1):
                raise ValueError("gamma axis must stay within [0, 1]")
            if ax.name == "delta" and ax.start < 0:
                raise ValueError("delta axis must stay >= 0")

    @property
    def axes(self) -> tuple[Axis, ...]:
        return (self.axis1,) if self.axis2 is None else (self.axis1, self.axis2)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.points for ax in self.axes)


@dataclass(frozen=True)
class SweepTable:
    """Row-major table over the grid; columns keyed by name."""

    grid: GridSpec
    columns: dict

    @property
    def n_rows(self) -> int:
        return int(np.prod(self.grid.shape))

    def column_names(self) -> list:
        return list(self.columns)

    def reshaped(self, name: str) -> np.ndarray:
        return self.columns[name].reshape(self.grid.shape)


@dataclass(frozen=True)
class CriticalReport:
    lambda_star: float
    peak_value: float
    jump_detected: bool
    jump_location: Optional[float] = None


def _point_values(grid: GridSpec):
    """Row-major (lambda, delta, gamma) arrays over the grid."""
    shape = grid.shape
    base = {
        "lambda": grid.chain.lam,
        "delta": grid.params.delta,
        "gamma": grid.chain.gamma,
    }
    cols = {}
    for name in AXIS_NAMES:
        cols[name] = np.full(shape, base[name])
    for dim, ax in enumerate(grid.axes):
        vals = ax.values()
        if len(shape) == 2:
            vals = vals[:, None] if dim == 0 else vals[None, :]
        cols[ax.name] = np.broadcast_to(vals, shape).copy()
    return {k: v.ravel() for k, v in cols.items()}


def run_sweep(grid: GridSpec, strict: bool = False) -> SweepTable:
    """Evaluate moments, Gamma^2 and P over every grid point (row-major)."""
    pts = _point_values(grid)
    n_rows = pts["lambda"].size
    m = np.empty(n_rows)
    s2 = np.empty(n_rows)
    cache: dict = {}
    for i in range(n_rows):
        key = (pts["lambda"][i], pts["gamma"][i])
        if key not in cache:
            spec_i = replace(grid.chain, lam=key[0], gamma=key[1])
            cache[key] = ground_moments(spectrum(spec_i, strict=strict))
        m[i], s2[i] = cache[key].m, cache[key].s2

    gamma2 = np.empty(n_rows)
    p_flip = np.empty(n_rows)
    for i in range(n_rows):
        par = replace(grid.params, delta=pts["delta"][i])
        g2 = gamma_squared(GroundMoments(m=m[i], s2=s2[i]), par)
        gamma2[i] = g2
        p_flip[i] = lz_probability(g2, par).p_flip

    columns = {ax.name: pts[ax.name] for ax in grid.axes}
    columns.update({"m": m, "s2": s2, "gamma2": gamma2, "p_flip": p_flip})
    return SweepTable(grid=grid, columns=columns)


def _lambda_axis_index(grid: GridSpec) -> int:
    for i, ax in enumerate(grid.axes):
        if ax.name == "lambda":
            return i
    raise ValueError("table has no lambda axis to differentiate along")


def derivative_name(column: str) -> str:
    return _DERIVATIVE_NAMES.get(column, f"d{column}_dlambda")


def central_derivative(table: SweepTable, column: str) -> SweepTable:
    """Add d<column>/dlambda via central differences on the uniform lambda axis.

    Interior points use (f[i+1] - f[i-1]) / 2h, endpoints one-sided 2nd-order
    stencils.  Rejects non-uniform axes and grids with < 3 lambda points.
    """
    if column not in table.columns:
        raise KeyError(f"no column {column!r} in table")
    grid = table.grid
    dim = _lambda_axis_index(grid)
    ax = grid.axes[dim]
    vals = ax.values()
    if ax.points < 3:
        raise ValueError("lambda axis needs >= 3 points for central differences")
    steps = np.diff(vals)
    h = (vals[-1] - vals[0]) / (ax.points - 1)
    if not np.allclose(steps, h, rtol=1e-9, atol=0.0):
        raise ValueError("lambda axis is not uniform")

    f = table.reshaped(column)
    if dim != 0:
        f = np.moveaxis(f, dim, 0)
    df = np.empty_like(f)
    df[1:-1] = (f[2:] - f[:-2]) / (2.0 * h)
    df[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h)
    df[-1] = (3.0 * f[-1] - 4.0 * f[-2] + f[-3]) / (2.0 * h)
    if dim != 0:
        df = np.moveaxis(df, 0, dim)

    columns = dict(table.columns)
    columns[derivative_name(column)] = df.reshape(-1)
    return SweepTable(grid=grid, columns=columns)


def locate_critical(table: SweepTable) -> CriticalReport:
    """Find the |dP/dlambda| peak and flag staircase discontinuities.

    Jump heuristic: the largest adjacent difference of dP/dlambda exceeds
    JUMP_FACTOR times the median adjacent difference.
    """
    if "dP_dlambda" not in table.columns:
        raise ValueError("run central_derivative(table, 'p_flip') first")
    if table.grid.axis2 is not None:
        raise ValueError("locate_critical expects a 1-D lambda sweep")
    lam = table.columns["lambda"]
    dp = table.columns["dP_dlambda"]
    peak_idx = int(np.argmax(np.abs(dp)))
    lambda_star = float(lam[peak_idx])
    peak_value = float(abs(dp[peak_idx]))

    diffs = np.abs(np.diff(dp))
    max_diff = float(np.max(diffs))
    median_diff = float(np.median(diffs))
    jump_detected = max_diff > JUMP_FACTOR * median_diff and max_diff > 0.0
    jump_location = None
    if jump_detected:
        j = int(np.argmax(diffs))
        jump_location = float(0.5 * (lam[j] + lam[j + 1]))
    return CriticalReport(lambda_star=lambda_star, peak_value=peak_value,
                          jump_detected=jump_detected, jump_location=jump_location)


def sharpness_scaling(n_list, grid: GridSpec) -> list:
    """Peak |dP/dlambda| for each chain size N (same sweep otherwise)."""
    if grid.axis1.name != "lambda" or grid.axis2 is not None:
        raise ValueError("sharpness_scaling expects a 1-D lambda grid")
    out = []
    for n in n_list:
        g = GridSpec(axis1=grid.axis1, axis2=None,
                     chain=replace(grid.chain, n=int(n)), params=grid.params)
        table = central_derivative(run_sweep(g), "p_flip")
        out.append((int(n), float(np.max(np.abs(table.columns["dP_dlambda"])))))
    return out
