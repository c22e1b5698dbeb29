"""Finite-horizon optimal control value functions by max-plus dynamic programming.

    v(x, t) = sup  int_0^t l(x(s), u(s)) ds + phi(x(t)),   x' = f(x, u)

One explicit Euler step of the Bellman recursion is

    v'(x) = max_u [ dt l(x, u) + v(x + dt f(x, u)) ]

with ``v`` linearly interpolated between nodes and positions clamped to the
state box. The control set is a finite sample, so the sup in the Hamiltonian
becomes a finite max.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .function_space import Grid, GridFunction, Norm, lerp
from .hj_solver import Lagrangian, hopf_lax_evolve, legendre_transform
from .semigroup import ErrorBudget, SemigroupOperator

DEFAULT_CONTROL_SAMPLES = 33
DEFAULT_CFL = 0.5


class HorizonError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ControlProblem:
    """State interval, sampled controls, dynamics, running and terminal reward.

    ``state_independent`` marks problems whose ``dynamics`` and
    ``running_reward`` ignore ``x``; only those admit the Hopf-Lax cross-check.
    """

    grid: Grid
    controls: np.ndarray
    dynamics: Callable[[np.ndarray, np.ndarray], np.ndarray]
    running_reward: Callable[[np.ndarray, np.ndarray], np.ndarray]
    terminal_reward: GridFunction
    horizon: float
    state_independent: bool = False
    name: str = "custom"

    def __post_init__(self):
        u = np.atleast_1d(np.asarray(self.controls, dtype=float))
        if u.size == 0:
            raise ValueError("control set is empty")
        object.__setattr__(self, "controls", u)
        if self.terminal_reward.grid != self.grid:
            raise ValueError("terminal reward lives on a different grid")
        if not self.horizon > 0:
            raise ValueError("horizon must be positive")
        X, U = self._mesh()
        lvals = self.running_reward(X, U)
        if not np.all(np.isfinite(lvals)):
            raise ValueError("running reward must be bounded on state box x controls")
        if not np.all(np.isfinite(self.dynamics(X, U))):
            raise ValueError("dynamics must be finite on state box x controls")

    @property
    def state_box(self) -> tuple[float, float]:
        return self.grid.xmin, self.grid.xmax

    def _mesh(self):
        return np.meshgrid(self.grid.x, self.controls, indexing="ij")

    def max_speed(self) -> float:
        X, U = self._mesh()
        return float(np.max(np.abs(self.dynamics(X, U))))

    def reward_bound(self) -> float:
        X, U = self._mesh()
        return float(np.max(np.abs(self.running_reward(X, U))))

    def with_terminal(self, phi: GridFunction) -> "ControlProblem":
        return ControlProblem(
            self.grid, self.controls, self.dynamics, self.running_reward, phi, self.horizon,
            self.state_independent, self.name,
        )


def integrator_problem(
    grid: Grid, phi: GridFunction | None = None, u_max: float = 1.0, samples: int = DEFAULT_CONTROL_SAMPLES,
    horizon: float = 2.0,
) -> ControlProblem:
    """``x' = u``, ``|u| <= u_max``, no running reward."""
    phi = phi if phi is not None else GridFunction.theta(grid)
    return ControlProblem(
        grid, np.linspace(-u_max, u_max, samples), lambda x, u: u + 0.0 * x, lambda x, u: 0.0 * (x + u),
        phi, horizon, True, "integrator",
    )


def double_integrator_problem(
    grid: Grid, phi: GridFunction | None = None, u_max: float = 1.0, samples: int = DEFAULT_CONTROL_SAMPLES,
    horizon: float = 2.0, friction: float = 1.0,
) -> ControlProblem:
    """Scalar reduction of the damped double integrator: ``x' = -friction x + u``
    with running cost ``-u^2/2``. State-dependent, so only the DP path applies."""
    phi = phi if phi is not None else GridFunction.theta(grid)
    return ControlProblem(
        grid, np.linspace(-u_max, u_max, samples), lambda x, u: -friction * x + u,
        lambda x, u: -0.5 * u * u + 0.0 * x, phi, horizon, False, "double-integrator",
    )


def hamiltonian_eval(problem: ControlProblem, x, p):
    """``H(x, p) = max_u [ l(x, u) + p f(x, u) ]`` over the control sample."""
    x = np.asarray(x, dtype=float)
    p = np.asarray(p, dtype=float)
    xb, pb = np.broadcast_arrays(x, p)
    u = problem.controls
    X = xb[..., None]
    P = pb[..., None]
    U = np.broadcast_to(u, xb.shape + u.shape)
    return np.max(problem.running_reward(X, U) + P * problem.dynamics(X, U), axis=-1)


def _interp(v: np.ndarray, grid: Grid, y: np.ndarray) -> np.ndarray:
    """Linear interpolation of nodal values at positions ``y`` (clamped)."""
    s = (y - grid.xmin) / grid.dx - 0.5
    s = np.clip(s, 0.0, grid.n - 1.0)
    k = np.minimum(np.floor(s).astype(np.int64), grid.n - 2)
    theta = s - k
    return lerp(v[k], v[k + 1], theta)


def dp_step(problem: ControlProblem, v: GridFunction, dt: float) -> GridFunction:
    if not dt > 0:
        raise ValueError("dt must be positive")
    grid = problem.grid
    if v.grid != grid:
        raise ValueError("value function lives on a different grid")
    X, U = problem._mesh()
    y = X + dt * problem.dynamics(X, U)
    cand = dt * problem.running_reward(X, U) + _interp(v.values, grid, y)
    return v.with_values(np.max(cand, axis=1))


def default_dt(problem: ControlProblem, cfl: float = DEFAULT_CFL) -> float:
    speed = problem.max_speed()
    return cfl * problem.grid.dx / speed if speed > 0 else problem.grid.dx


def evolve_hjb(
    problem: ControlProblem, phi: GridFunction, t: float, dt: float | None = None, trajectory: list | None = None
) -> GridFunction:
    """Value function ``v(., t)`` by ``ceil(t / dt)`` equal DP steps."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t > problem.horizon * (1 + 1e-12):
        raise HorizonError(f"t = {t!r} exceeds the horizon {problem.horizon!r}")
    if trajectory is not None:
        trajectory.append((0.0, phi))
    if t == 0 or phi.is_bottom:
        return phi
    dt = default_dt(problem) if dt is None else dt
    nsteps = max(1, math.ceil(t / dt - 1e-9))
    step = t / nsteps
    v = phi
    for k in range(nsteps):
        v = dp_step(problem, v, step)
        if trajectory is not None:
            trajectory.append(((k + 1) * step, v))
    return v


def make_hjb(problem: ControlProblem, dt: float | None = None, budget: ErrorBudget = ErrorBudget()) -> SemigroupOperator:
    return SemigroupOperator(lambda t, phi: evolve_hjb(problem, phi, t, dt), f"hjb-dp-{problem.name}", Norm.SUP, budget)


def induced_lagrangian(problem: ControlProblem, p_range: float | None = None, resolution: int = 4001) -> Lagrangian:
    """Conjugate of the state-independent Hamiltonian induced by the problem."""
    if not problem.state_independent:
        raise ValueError(f"problem {problem.name!r} depends on x; no Hopf-Lax representation")
    x0 = problem.grid.x[:1]
    if p_range is None:
        # all secant slopes (= dynamics values) are resolved once |p| exceeds
        # the reward spread divided by the smallest velocity gap
        fv = np.unique(problem.dynamics(x0[:, None], problem.controls[None, :]).ravel())
        gap = float(np.min(np.diff(fv))) if fv.size > 1 else 1.0
        spread = 2 * problem.reward_bound() + 1.0
        p_range = 4.0 * spread / gap
    return legendre_transform(lambda p: hamiltonian_eval(problem, np.full_like(p, x0[0]), p), (-p_range, p_range), resolution)


def hj_consistency_check(problem: ControlProblem, phi: GridFunction, t: float, dt: float | None = None) -> float:
    """Sup distance between the DP value function and the Hopf-Lax solution
    driven by the conjugate of the problem's Hamiltonian.

    Cells where only the DP value is finite are skipped: there every optimal
    path leaves the box and the DP clamp, not the dynamics, supplies the
    value. A Hopf-Lax value that DP misses makes the distance infinite.
    """
    if t == 0:
        return 0.0
    lag = induced_lagrangian(problem)
    a = evolve_hjb(problem, phi, t, dt).values
    b = hopf_lax_evolve(lag, phi, t).values
    if np.any(np.isfinite(b) & ~np.isfinite(a)):
        return math.inf
    both = np.isfinite(a) & np.isfinite(b)
    return float(np.max(np.abs(a[both] - b[both]))) if both.any() else 0.0
