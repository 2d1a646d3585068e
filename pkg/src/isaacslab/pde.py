"""Monotone explicit finite differences for the priority-weighted Isaacs equation.

The terminal-value problem  -v_t - H(t, x, v_x, v_xx) = 0,  v(T, .) = g
is marched backward in time on a uniform interval grid.  H is one of

    lower:  max_u min_v L,   upper:  min_v max_u L,
    mixed:  p(t, x) * lower + (1 - p(t, x)) * upper,

with L(t,x,u,v; q, M) = b q + 0.5 (sigma sigma^T) M evaluated per action
pair.  First derivatives are upwinded against the sign of b inside the
action-pair enumeration, second derivatives are central, and the boundary
uses zero-slope ghost copies.  Under the step bound from
:func:`cfl_max_dt` every update is a convex combination of neighboring
values, so the scheme is monotone and bounded by the terminal data; that
is the property that makes the discrete values converge to the viscosity
solution as the grid refines.

State dimension is one; higher-dimensional problems are accepted by the
algebraic modules but not by this solver.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import ProblemError, ProblemSpec

__all__ = [
    "PdeError",
    "CflError",
    "BlowupError",
    "SpatialGrid",
    "ValueField",
    "cfl_max_dt",
    "solve",
    "isaacs_gap",
]

CFL_SAFETY = 1.0 - 1e-6


class PdeError(ValueError):
    """Invalid grid or solver input."""


class CflError(PdeError):
    """Requested time step exceeds the stability bound."""


class BlowupError(RuntimeError):
    """Marching produced values outside the payoff bounds or non-finite."""


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform 1-D grid of ``nodes`` points spanning [lower, upper]."""

    lower: float
    upper: float
    nodes: int

    def __post_init__(self) -> None:
        if not (np.isfinite(self.lower) and np.isfinite(self.upper)):
            raise PdeError("grid bounds must be finite")
        if not self.upper > self.lower:
            raise PdeError("grid needs upper > lower")
        if int(self.nodes) < 3:
            raise PdeError("grid needs at least three nodes")
        object.__setattr__(self, "lower", float(self.lower))
        object.__setattr__(self, "upper", float(self.upper))
        object.__setattr__(self, "nodes", int(self.nodes))

    @property
    def dx(self) -> float:
        return (self.upper - self.lower) / (self.nodes - 1)

    @property
    def xs(self) -> np.ndarray:
        return np.linspace(self.lower, self.upper, self.nodes)

    def clamp(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, self.lower, self.upper)

    def nearest_index(self, x: np.ndarray) -> np.ndarray:
        """Index of the closest node, clamped to the grid."""
        idx = np.rint((np.asarray(x, dtype=float) - self.lower) / self.dx)
        return np.clip(idx, 0, self.nodes - 1).astype(int)


@dataclass(frozen=True)
class ValueField:
    """Values W[k, j] ~ v(times[k], xs[j]) on a time-space product grid."""

    grid: SpatialGrid
    times: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if times.ndim != 1 or not np.all(np.diff(times) > 0.0):
            raise PdeError("times must be strictly increasing")
        if values.shape != (times.size, self.grid.nodes):
            raise PdeError(
                f"values must have shape {(times.size, self.grid.nodes)}, got {values.shape}"
            )
        if not np.all(np.isfinite(values)):
            raise PdeError("value field entries must be finite")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "values", values)

    @property
    def initial_slice(self) -> np.ndarray:
        return self.values[0]

    @property
    def final_slice(self) -> np.ndarray:
        return self.values[-1]

    def slice_at(self, t: float, atol: float = 1e-9) -> np.ndarray:
        k = int(np.argmin(np.abs(self.times - t)))
        if abs(float(self.times[k]) - t) > atol:
            raise PdeError(f"no time slice at {t}")
        return self.values[k]

    def value_at(self, t: float, x: float) -> float:
        """Bilinear interpolation in (t, x), clamped to the grid in x."""
        times = self.times
        if not times[0] - 1e-12 <= t <= times[-1] + 1e-12:
            raise PdeError(f"time {t} outside [{times[0]}, {times[-1]}]")
        t = min(max(t, float(times[0])), float(times[-1]))
        k = int(np.searchsorted(times, t, side="right") - 1)
        k = min(max(k, 0), times.size - 2) if times.size > 1 else 0
        xq = float(self.grid.clamp(np.asarray(x, dtype=float)))
        lo = float(np.interp(xq, self.grid.xs, self.values[k]))
        if times.size == 1:
            return lo
        hi = float(np.interp(xq, self.grid.xs, self.values[k + 1]))
        w = (t - float(times[k])) / float(times[k + 1] - times[k])
        return (1.0 - w) * lo + w * hi

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values)))


def _scan_coefficient_extremes(
    spec: ProblemSpec, grid: SpatialGrid, time_samples: int = 5
) -> tuple[float, float]:
    """Max |b| and max sigma sigma^T over nodes, action pairs, sampled times."""
    if spec.dim != 1:
        raise ProblemError("the finite-difference solver handles state dimension 1")
    X = grid.xs[:, None]
    n = X.shape[0]
    ts = np.linspace(spec.start_time, spec.horizon, time_samples)
    max_b = 0.0
    max_s2 = 0.0
    for t in ts:
        for a in range(spec.actions_u.size):
            U = np.broadcast_to(spec.actions_u.array[a], (n, spec.actions_u.dim))
            for bidx in range(spec.actions_v.size):
                V = np.broadcast_to(spec.actions_v.array[bidx], (n, spec.actions_v.dim))
                b = spec.drift(float(t), X, U, V)[:, 0]
                sig = spec.diffusion(float(t), X, U, V)[:, 0, :]
                s2 = np.sum(sig * sig, axis=1)
                max_b = max(max_b, float(np.max(np.abs(b))))
                max_s2 = max(max_s2, float(np.max(s2)))
    return max_b, max_s2


def cfl_max_dt(spec: ProblemSpec, grid: SpatialGrid) -> float:
    """Largest stable explicit step: (1 - 1e-6) / (max|b|/dx + max(sigma^2)/dx^2).

    The extremes are scanned over all grid nodes, all action pairs, and a
    sample of times in [s, T] (the registered coefficient families are
    time-independent, so the sample is exact for them).  A zero
    denominator (no drift, no noise) returns the horizon length.
    """
    max_b, max_s2 = _scan_coefficient_extremes(spec, grid)
    dx = grid.dx
    denom = max_b / dx + max_s2 / dx**2
    if denom == 0.0:
        return spec.horizon - spec.start_time
    return CFL_SAFETY / denom


def _hamiltonian_slice(
    spec: ProblemSpec, t: float, grid: SpatialGrid, W: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Upwind lower/upper Hamiltonian arrays computed from slice W."""
    dx = grid.dx
    We = np.pad(W, 1, mode="edge")
    forward = (We[2:] - We[1:-1]) / dx
    backward = (We[1:-1] - We[:-2]) / dx
    second = (We[2:] - 2.0 * We[1:-1] + We[:-2]) / dx**2
    X = grid.xs[:, None]
    n = X.shape[0]
    ku, kv = spec.actions_u.size, spec.actions_v.size
    gen = np.empty((n, ku, kv))
    for a in range(ku):
        U = np.broadcast_to(spec.actions_u.array[a], (n, spec.actions_u.dim))
        for bidx in range(kv):
            V = np.broadcast_to(spec.actions_v.array[bidx], (n, spec.actions_v.dim))
            b = spec.drift(t, X, U, V)[:, 0]
            sig = spec.diffusion(t, X, U, V)[:, 0, :]
            s2 = np.sum(sig * sig, axis=1)
            gen[:, a, bidx] = (
                np.where(b >= 0.0, b * forward, b * backward) + 0.5 * s2 * second
            )
    lower = gen.min(axis=2).max(axis=1)
    upper = gen.max(axis=1).min(axis=1)
    return lower, upper


def solve(
    spec: ProblemSpec,
    grid: SpatialGrid,
    dt: float,
    hamiltonian: str = "mixed",
) -> ValueField:
    """March the chosen Hamiltonian backward from g over [start_time, T].

    ``dt`` is an upper bound on the actual uniform step: the number of
    steps is rounded up so the march lands exactly on the start time.
    Raises :class:`CflError` if dt exceeds :func:`cfl_max_dt` and
    :class:`BlowupError` if any slice leaves the terminal bounds (the
    monotone scheme never does unless the stability bound was violated).
    The update is v(t - dt, x) = v(t, x) + dt * H(t, x, Dv(t), D2v(t)):
    coefficients, priority and differences all read the known slice.
    """
    if hamiltonian not in ("lower", "upper", "mixed"):
        raise PdeError(f"unknown hamiltonian mode {hamiltonian!r}")
    if dt <= 0.0:
        raise PdeError("dt must be positive")
    span = spec.horizon - spec.start_time
    if span == 0.0:
        # zero horizon: the value is the terminal condition itself and no
        # step is ever taken, so dt needs no stability check
        terminal = spec.payoff_values(grid.xs[:, None]).astype(float)
        return ValueField(
            grid=grid, times=np.array([spec.horizon]), values=terminal[None, :]
        )
    limit = cfl_max_dt(spec, grid)
    if dt > limit * (1.0 + 1e-12):
        raise CflError(f"dt={dt} exceeds stability bound {limit}")
    m = max(1, int(np.ceil(span / dt - 1e-12)))
    dt_eff = span / m
    times = spec.start_time + np.arange(m + 1) * dt_eff
    xs = grid.xs
    W = spec.payoff_values(xs[:, None]).astype(float)
    lo_bound = float(W.min()) - 1e-9
    hi_bound = float(W.max()) + 1e-9
    out = np.empty((m + 1, grid.nodes))
    out[m] = W
    X = xs[:, None]
    for k in range(m, 0, -1):
        t_known = float(times[k])
        low, up = _hamiltonian_slice(spec, t_known, grid, W)
        if hamiltonian == "lower":
            H = low
        elif hamiltonian == "upper":
            H = up
        else:
            p = spec.priority_values(t_known, X)
            blend = p * low + (1.0 - p) * up
            H = np.where(p == 1.0, low, np.where(p == 0.0, up, blend))
        W = W + dt_eff * H
        if not np.all(np.isfinite(W)) or W.min() < lo_bound or W.max() > hi_bound:
            raise BlowupError(
                f"slice at t={float(times[k - 1])} left the terminal bounds; "
                "the explicit march is unstable at this step size"
            )
        out[k - 1] = W
    return ValueField(grid=grid, times=times, values=out)


def isaacs_gap(spec: ProblemSpec, grid: SpatialGrid, dt: float) -> ValueField:
    """Field of upper minus lower solution values: where information matters.

    Both one-sided equations are solved on the same grid and steps; the
    difference is non-negative up to rounding, and strictly positive
    wherever the order of moves changes the local game.
    """
    low = solve(spec, grid, dt, hamiltonian="lower")
    up = solve(spec, grid, dt, hamiltonian="upper")
    return ValueField(grid=grid, times=low.times, values=up.values - low.values)
