"""Entropy solutions of ``u_t + f(u)_x = 0`` by the first-order Godunov scheme.

Periodic grids only. The scheme is conservative and monotone under
``dt * Lip(f) <= dx``, which gives mass conservation, L1 contraction and
order preservation at the discrete level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .function_space import Grid, GridFunction, Norm, require_finite
from .semigroup import ErrorBudget, SemigroupOperator

DEFAULT_CFL = 0.9
FLUX_SAMPLES = 129


class CFLError(ValueError):
    pass


@dataclass(frozen=True)
class FluxFunction:
    """Flux ``f`` of a scalar conservation law.

    ``minimizer`` marks a convex flux with known global minimiser, which
    enables the closed-form Godunov flux. ``derivative`` (if given) is used
    for Lipschitz bounds; otherwise sampled secant slopes are used.
    """

    f: Callable[[np.ndarray], np.ndarray]
    name: str = "custom"
    derivative: Optional[Callable[[np.ndarray], np.ndarray]] = None
    minimizer: Optional[float] = None

    def __call__(self, u):
        return self.f(u)

    def lipschitz_bound_on(self, lo: float, hi: float, samples: int = FLUX_SAMPLES) -> float:
        if hi < lo:
            lo, hi = hi, lo
        if hi == lo:
            pts = np.array([lo])
        else:
            pts = np.linspace(lo, hi, samples)
        if self.derivative is not None:
            return float(np.max(np.abs(self.derivative(pts))))
        if pts.size == 1:
            h = 1e-6 * max(1.0, abs(lo))
            pts = np.array([lo - h, lo + h])
        slopes = np.abs(np.diff(self.f(pts)) / np.diff(pts))
        # secants underestimate the sup of |f'|; pad by 5 %
        return float(1.05 * np.max(slopes))


def burgers_flux() -> FluxFunction:
    return FluxFunction(lambda u: 0.5 * np.asarray(u) ** 2, "burgers", lambda u: np.asarray(u, dtype=float), 0.0)


def linear_flux(speed: float) -> FluxFunction:
    return FluxFunction(
        lambda u: speed * np.asarray(u), f"linear({speed!r})", lambda u: np.full(np.shape(u), abs(speed)), None
    )


def riemann_flux(flux: FluxFunction, uL, uR):
    """Godunov flux: min of f on [uL, uR] if uL <= uR, else max on [uR, uL]."""
    uL = np.asarray(uL, dtype=float)
    uR = np.asarray(uR, dtype=float)
    if flux.minimizer is not None:
        m = flux.minimizer
        # convex flux: F = max(f(max(uL, m)), f(min(uR, m)))
        return np.maximum(flux.f(np.maximum(uL, m)), flux.f(np.minimum(uR, m)))
    s = np.linspace(0.0, 1.0, FLUX_SAMPLES)
    lo = np.minimum(uL, uR)[..., None]
    hi = np.maximum(uL, uR)[..., None]
    vals = flux.f(lo + (hi - lo) * s)
    return np.where(uL <= uR, vals.min(axis=-1), vals.max(axis=-1))


def _check_periodic(u: GridFunction) -> Grid:
    if not isinstance(u.grid, Grid) or not u.grid.periodic:
        raise ValueError("the Godunov solver supports periodic 1-D grids only")
    return u.grid


def godunov_step(flux: FluxFunction, u: GridFunction, dt: float, lip: float | None = None) -> GridFunction:
    grid = _check_periodic(u)
    require_finite(u, "Godunov input")
    v = u.values
    if lip is None:
        lip = flux.lipschitz_bound_on(float(v.min()), float(v.max()))
    if dt * lip > grid.dx * (1 + 1e-12):
        raise CFLError(f"CFL violated: dt*Lip = {dt * lip!r} > dx = {grid.dx!r}")
    F = riemann_flux(flux, v, np.roll(v, -1))  # F[i] at interface i+1/2
    return u.with_values(v - (dt / grid.dx) * (F - np.roll(F, 1)))


def cfl_substeps(flux: FluxFunction, grid: Grid, t: float, u_range: tuple[float, float], cfl: float = DEFAULT_CFL):
    """Number of substeps and step size for evolving to ``t``."""
    lip = flux.lipschitz_bound_on(*u_range)
    if lip == 0.0:
        return 1, t, lip
    nsteps = max(1, math.ceil(t * lip / (cfl * grid.dx) - 1e-12))
    return nsteps, t / nsteps, lip


def evolve_cl(
    flux: FluxFunction,
    h: GridFunction,
    t: float,
    cfl: float = DEFAULT_CFL,
    u_range: tuple[float, float] | None = None,
    trajectory: list | None = None,
    record_every: int = 1,
) -> GridFunction:
    """Approximate ``T(t)h`` by Godunov substepping.

    The step size depends only on ``t``, the grid and ``u_range`` (default:
    the range of ``h``); operators built by :func:`make_godunov` fix the range
    so that all inputs are advanced with identical steps. If ``trajectory`` is
    a list, ``(time, GridFunction)`` snapshots are appended to it.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if h.is_bottom:
        return h
    grid = _check_periodic(h)
    require_finite(h, "initial data")
    if trajectory is not None:
        trajectory.append((0.0, h))
    if t == 0:
        return h
    lo, hi = float(h.values.min()), float(h.values.max())
    if u_range is None:
        u_range = (lo, hi)
    elif lo < u_range[0] or hi > u_range[1]:
        raise ValueError(f"initial data range [{lo}, {hi}] exceeds the operator's state range {u_range}")
    nsteps, dt, lip = cfl_substeps(flux, grid, t, u_range, cfl)
    u = h
    for k in range(nsteps):
        u = godunov_step(flux, u, dt, lip)
        if trajectory is not None and ((k + 1) % record_every == 0 or k + 1 == nsteps):
            trajectory.append(((k + 1) * dt, u))
    return u


def make_godunov(
    flux: FluxFunction,
    u_range: tuple[float, float] | None = None,
    cfl: float = DEFAULT_CFL,
    budget: ErrorBudget = ErrorBudget(),
) -> SemigroupOperator:
    """Godunov semigroup with native norm L1.

    With ``u_range`` fixed, the time step is independent of the input, so
    order comparisons between different inputs are exact. By the maximum
    principle the state never leaves the range of the data.
    """
    return SemigroupOperator(
        lambda t, h: evolve_cl(flux, h, t, cfl, u_range), f"godunov-{flux.name}", Norm.L1, budget
    )


def mass_integral(u: GridFunction) -> float:
    require_finite(u)
    return float(u.grid.cell_volume * np.sum(u.values))


# -- Kruzkov entropy residual ----------------------------------------------------


def bump_test_function(
    times: np.ndarray, grid: Grid, t_window: tuple[float, float], x_window: tuple[float, float]
) -> np.ndarray:
    """Nonnegative C^1 product bump ``sin^2`` in t and x, zero outside the windows."""

    def profile(s, a, b):
        z = (s - a) / (b - a)
        out = np.where((z > 0) & (z < 1), np.sin(np.pi * z) ** 2, 0.0)
        return out

    return profile(np.asarray(times)[:, None], *t_window) * profile(grid.x[None, :], *x_window)


def kruzkov_residual(
    flux: FluxFunction,
    trajectory,
    k: float,
    psi: np.ndarray,
) -> float:
    """Discrete ``int int |v-k| psi_t + (f(v)-f(k)) sgn(v-k) psi_x dx dt``.

    ``trajectory`` is a sequence of ``(time, GridFunction)`` on a uniform time
    grid; ``psi[j, i]`` is the test function at time ``j`` and cell ``i``. The
    time derivative is a forward difference paired with ``v`` at the left
    time level; the space derivative is the periodic central difference. With
    ``psi`` vanishing at both time ends, both sums telescope to zero for
    constant ``v``.
    """
    times = np.array([float(t) for t, _ in trajectory])
    V = np.array([f.values for _, f in trajectory])
    grid = trajectory[0][1].grid
    psi = np.asarray(psi, dtype=float)
    if psi.shape != V.shape:
        raise ValueError(f"psi shape {psi.shape} does not match trajectory shape {V.shape}")
    if np.any(psi < 0):
        raise ValueError("test function must be nonnegative")
    if np.any(psi[0] != 0) or np.any(psi[-1] != 0):
        raise ValueError("test function must vanish at the first and last time levels (support in t > 0)")
    if len(times) < 3:
        raise ValueError("need at least three time levels")
    dts = np.diff(times)
    if not np.allclose(dts, dts[0], rtol=1e-9, atol=0):
        raise ValueError("trajectory must be sampled on a uniform time grid")
    dt, dx = dts[0], grid.dx
    eta = np.abs(V - k)
    q = (flux.f(V) - flux.f(np.full_like(V, k))) * np.sign(V - k)
    psi_t = (psi[1:] - psi[:-1]) / dt
    psi_x = (np.roll(psi, -1, axis=1) - np.roll(psi, 1, axis=1)) / (2 * dx)
    return float(dx * dt * (np.sum(eta[:-1] * psi_t) + np.sum(q[:-1] * psi_x[:-1])))
