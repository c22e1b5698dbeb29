"""Viscosity solutions of Hamilton-Jacobi equations in sup-form.

Sign convention (used everywhere in this package)::

    v_t = H(x, v_x),          v(0, .) = h

which is the HJB form ``-v_t + H(x, grad v) = 0``. The classical form
``u_t + F(grad u) = 0`` is the same equation with ``F = -H``. For a convex,
state-independent ``H`` with Lagrangian ``L = H*`` the solution is the
Hopf-Lax / Lax-Oleinik formula

    v(t, x) = sup_y [ h(y) - t L((y - x) / t) ],

and the generator is ``A h = H(h')``. With this orientation a velocity
``q = (y - x)/t`` points from the evaluation point to the point whose value
is collected, matching the control dynamics ``x' = u`` of the HJB solver.

Two solvers are provided: the exact discrete Hopf-Lax formula (sup over grid
nodes, exactly max-plus linear) and a monotone Lax-Friedrichs scheme for
general ``H(x, p)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional

import numpy as np

from .function_space import Grid, GridFunction, Norm, require_finite
from .semigroup import ErrorBudget, SemigroupOperator


class ConvexityError(ValueError):
    pass


class MonotonicityBoundError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Lagrangian:
    """Convex ``L(q)`` with values ``+inf`` outside ``effective_domain``."""

    L: Callable[[np.ndarray], np.ndarray]
    effective_domain: tuple[float, float] = (-math.inf, math.inf)
    name: str = "custom"
    domain_tol: float = 1e-9

    def __call__(self, q):
        q = np.asarray(q, dtype=float)
        lo, hi = self.effective_domain
        inside = (q >= lo - self.domain_tol) & (q <= hi + self.domain_tol)
        with np.errstate(invalid="ignore", over="ignore"):
            vals = self.L(np.clip(q, lo, hi))
        return np.where(inside, vals, np.inf)


def quadratic_lagrangian(c: float = 1.0) -> Lagrangian:
    """``L(q) = q^2 / (2c)``, conjugate of ``H(p) = c p^2 / 2``."""
    return Lagrangian(lambda q: q * q / (2.0 * c), name=f"quadratic({c!r})")


def indicator_lagrangian(lo: float = -1.0, hi: float = 1.0) -> Lagrangian:
    """Indicator of ``[lo, hi]``, conjugate of ``H(p) = max(lo p, hi p)``."""
    return Lagrangian(lambda q: np.zeros_like(q), (lo, hi), name=f"indicator[{lo!r},{hi!r}]")


def legendre_transform(
    H_of_p: Callable[[np.ndarray], np.ndarray],
    p_range: tuple[float, float] = (-10.0, 10.0),
    resolution: int = 2001,
    cap: float = math.inf,
    convexity_tol: float = 1e-9,
) -> Lagrangian:
    """``L(q) = max_k (p_k q - H(p_k))`` over a uniform p-grid.

    The sampled conjugate is piecewise linear with breakpoints at the secant
    slopes of ``H``; it is evaluated exactly by locating ``q`` among them.
    Outside ``[first slope, last slope]`` the maximiser would sit at the end of
    the p-grid and the value is not trustworthy, so ``L = +inf`` there; values
    above ``cap`` are also reported as ``+inf``.
    """
    p = np.linspace(p_range[0], p_range[1], resolution)
    Hp = np.asarray(H_of_p(p), dtype=float)
    slopes = np.diff(Hp) / np.diff(p)
    scale = max(1.0, float(np.max(np.abs(slopes))))
    if np.any(np.diff(slopes) < -convexity_tol * scale):
        k = int(np.argmax(np.diff(slopes) < -convexity_tol * scale))
        raise ConvexityError(f"H is not convex on the sampled grid (midpoint test fails near p={p[k + 1]!r})")
    slopes = np.maximum.accumulate(slopes)  # clear roundoff-level dips

    def L(q):
        q = np.asarray(q, dtype=float)
        k = np.searchsorted(slopes, q, side="left")  # maximiser p_k
        k = np.clip(k, 0, p.size - 1)
        val = p[k] * q - Hp[k]
        return np.where(val > cap, np.inf, val)

    return Lagrangian(L, (float(slopes[0]), float(slopes[-1])), name="legendre")


@dataclass(frozen=True, eq=False)
class Hamiltonian:
    """``H(x, p)`` with a bound on ``|dH/dp|`` valid for ``|p| <= p_max``.

    ``lagrangian`` is set for convex state-independent Hamiltonians; such
    problems are dispatched to the Hopf-Lax formula.
    """

    H: Callable[[np.ndarray, np.ndarray], np.ndarray]
    p_lipschitz_bound: float
    p_max: float = math.inf
    name: str = "custom"
    lagrangian: Optional[Lagrangian] = None

    def __call__(self, x, p):
        return self.H(x, p)


def quadratic_hamiltonian(p_max: float = 10.0, c: float = 1.0) -> Hamiltonian:
    return Hamiltonian(lambda x, p: 0.5 * c * p * p, c * p_max, p_max, "quadratic", quadratic_lagrangian(c))


def abs_hamiltonian(speed: float = 1.0) -> Hamiltonian:
    return Hamiltonian(lambda x, p: speed * np.abs(p), speed, math.inf, "abs", indicator_lagrangian(-speed, speed))


def modulated_hamiltonian(amplitude: float = 0.5) -> Hamiltonian:
    """State-dependent ``H(x, p) = (1 + a sin x)(sqrt(1 + p^2) - 1)``, globally Lipschitz in p."""
    if not 0 <= amplitude < 1:
        raise ValueError("amplitude must lie in [0, 1)")
    return Hamiltonian(
        lambda x, p: (1.0 + amplitude * np.sin(x)) * (np.sqrt(1.0 + p * p) - 1.0),
        1.0 + amplitude, math.inf, f"modulated({amplitude!r})",
    )


def table_hamiltonian(p_samples, H_samples, p_range_for_legendre=None) -> Hamiltonian:
    """State-independent ``H`` from sampled ``(p, H(p))`` pairs (linear interpolation)."""
    ps = np.asarray(p_samples, dtype=float)
    hs = np.asarray(H_samples, dtype=float)
    order = np.argsort(ps)
    ps, hs = ps[order], hs[order]
    lip = float(np.max(np.abs(np.diff(hs) / np.diff(ps))))

    def H(x, p):
        return np.interp(p, ps, hs)

    try:
        lag = legendre_transform(lambda p: np.interp(p, ps, hs), (ps[0], ps[-1]), max(ps.size, 2001))
    except ConvexityError:
        lag = None
    return Hamiltonian(H, lip, float(max(abs(ps[0]), abs(ps[-1]))), "custom-table", lag)


# -- Hopf-Lax ------------------------------------------------------------------


@lru_cache(maxsize=32)
def _kernel(grid: Grid, lag: Lagrangian, t: float) -> np.ndarray:
    x = grid.x
    q = (x[None, :] - x[:, None]) / t  # q[i, j] = (y_j - x_i) / t
    K = -t * lag(q)
    K.flags.writeable = False
    return K


def hopf_lax_evolve(lag: Lagrangian, h: GridFunction, t: float) -> GridFunction:
    """``v_i = max_j [h_j - t L((x_j - x_i)/t)]`` over grid nodes.

    Bottom entries of ``h`` and nodes with ``L = +inf`` drop out of the max;
    a point that sees no finite term gets -inf.
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return h
    if not isinstance(h.grid, Grid):
        raise TypeError("Hopf-Lax solver is 1-D")
    K = _kernel(h.grid, lag, float(t))
    return h.with_values(np.max(h.values[None, :] + K, axis=1))


def make_hopf_lax(lag: Lagrangian, budget: ErrorBudget = ErrorBudget()) -> SemigroupOperator:
    return SemigroupOperator(lambda t, h: hopf_lax_evolve(lag, h, t), f"hopf-lax-{lag.name}", Norm.SUP, budget)


# -- Lax-Friedrichs --------------------------------------------------------------


def _padded(v: np.ndarray, periodic: bool) -> tuple[np.ndarray, np.ndarray]:
    if periodic:
        return np.roll(v, 1), np.roll(v, -1)
    left = np.concatenate(([v[0]], v[:-1]))
    right = np.concatenate((v[1:], [v[-1]]))
    return left, right


def lax_friedrichs_step(
    H: Hamiltonian, u: GridFunction, dt: float, artificial_viscosity: float | None = None, enforce: bool = True
) -> GridFunction:
    """One monotone Lax-Friedrichs step for ``v_t = H(x, v_x)``::

        v_i' = v_i + dt [ H(x_i, (v_{i+1} - v_{i-1}) / 2dx)
                          + a (v_{i+1} - 2 v_i + v_{i-1}) / 2dx ]

    Monotone when ``a >= max |dH/dp|`` and ``dt a / dx <= 1``. Boundaries use
    constant extrapolation unless the grid is periodic.
    """
    grid = u.grid
    require_finite(u, "Lax-Friedrichs input")
    a = H.p_lipschitz_bound if artificial_viscosity is None else artificial_viscosity
    v = u.values
    vl, vr = _padded(v, grid.periodic)
    p = (vr - vl) / (2 * grid.dx)
    if enforce:
        if a < H.p_lipschitz_bound:
            raise MonotonicityBoundError(f"artificial viscosity {a!r} below |dH/dp| bound {H.p_lipschitz_bound!r}")
        if dt * a / grid.dx > 1 + 1e-12:
            raise MonotonicityBoundError(f"CFL violated: dt*a/dx = {dt * a / grid.dx!r} > 1")
        pm = float(np.max(np.abs(p)))
        if pm > H.p_max * (1 + 1e-12):
            raise MonotonicityBoundError(f"gradient {pm!r} leaves the range |p| <= {H.p_max!r} of the bound")
    # only differences of v enter the increment
    inc = H(grid.x, p) + a * ((vr - v) - (v - vl)) / (2 * grid.dx)
    return u.with_values(v + dt * inc)


def evolve_lax_friedrichs(
    H: Hamiltonian, h: GridFunction, t: float, cfl: float = 0.5, enforce: bool = True
) -> GridFunction:
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return h
    a = H.p_lipschitz_bound
    dx = h.grid.dx
    nsteps = 1 if a == 0 else max(1, math.ceil(t * a / (cfl * dx) - 1e-12))
    dt = t / nsteps
    u = h
    for _ in range(nsteps):
        u = lax_friedrichs_step(H, u, dt, a, enforce)
    return u


def make_lax_friedrichs(
    H: Hamiltonian, cfl: float = 0.5, enforce: bool = True, budget: ErrorBudget = ErrorBudget()
) -> SemigroupOperator:
    return SemigroupOperator(
        lambda t, h: evolve_lax_friedrichs(H, h, t, cfl, enforce), f"lax-friedrichs-{H.name}", Norm.SUP, budget
    )


def evolve_hj(H: Hamiltonian, h: GridFunction, t: float, force_scheme: bool = False) -> GridFunction:
    """``T(t)h`` for ``v_t = H(x, v_x)``: Hopf-Lax when ``H`` carries a
    Lagrangian, Lax-Friedrichs otherwise (or when ``force_scheme``)."""
    if t == 0:
        return h
    if H.lagrangian is not None and not force_scheme:
        return hopf_lax_evolve(H.lagrangian, h, t)
    return evolve_lax_friedrichs(H, h, t)


def make_hj(H: Hamiltonian, force_scheme: bool = False) -> SemigroupOperator:
    if H.lagrangian is not None and not force_scheme:
        return make_hopf_lax(H.lagrangian)
    return make_lax_friedrichs(H)
