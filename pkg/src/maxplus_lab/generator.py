"""Finite-difference estimates of the infinitesimal generator ``A f = lim (T(t)f - f)/t``.

Sign conventions checked by the tests:

=====================  ==========================  =====================
semigroup              evolution                   generator
=====================  ==========================  =====================
left translation       T(t)f(x) = f(x + t)         A f = f'
Hopf-Lax / LF / DP     v_t = H(x, v_x) (sup-form)  A f = H(x, f')
=====================  ==========================  =====================
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .function_space import Grid, GridFunction, Norm, require_finite, scale_of
from .semigroup import Property, PropertyReport, SemigroupOperator, Verdict, make_translation

CAUCHY_RTOL = 1e-3


@dataclass
class GeneratorEstimate:
    Af: GridFunction
    t_used: float
    richardson_order: int
    domain_mask: np.ndarray  # True where the quotient sequence passed the Cauchy test

    @property
    def mask_fraction(self) -> float:
        """Fraction of cells masked out (not in the numerical domain)."""
        return float(1.0 - np.mean(self.domain_mask))


def _richardson(ts: np.ndarray, Q: np.ndarray, order: int) -> list[np.ndarray]:
    """Extrapolants to t = 0 using the last ``k + 1`` quotients, k = 0..order.

    Polynomial (in t) extrapolation by Neville's scheme on the tail of the
    sequence, so ``out[-1]`` uses the smallest times.
    """
    out = []
    for k in range(order + 1):
        tt = ts[-(k + 1):]
        P = [q.copy() for q in Q[-(k + 1):]]
        for m in range(1, k + 1):
            for i in range(k + 1 - m):
                P[i] = (tt[i + m] * P[i] - tt[i] * P[i + 1]) / (tt[i + m] - tt[i])
        out.append(P[0])
    return out


def generator_estimate(
    T: SemigroupOperator, f: GridFunction, t_seq: Sequence[float], richardson_order: int = 1
) -> GeneratorEstimate:
    """Richardson-extrapolated limit of ``(T(t)f - f)/t`` along decreasing ``t_seq``.

    Cells whose last two extrapolants (orders ``richardson_order - 1`` and
    ``richardson_order``) differ by more than ``1e-3 * max(1, |value|)`` are
    masked as outside the numerical domain of ``A``.
    """
    require_finite(f)
    ts = np.asarray(t_seq, dtype=float)
    if ts.size == 0 or np.any(ts <= 0) or np.any(np.diff(ts) >= 0):
        raise ValueError("t_seq must be positive and strictly decreasing")
    order = min(richardson_order, ts.size - 1)
    Q = np.array([(T.evolve(t, f).values - f.values) / t for t in ts])
    ext = _richardson(ts, Q, order)
    best = ext[-1]
    if order >= 1:
        prev = ext[-2]
        mask = np.abs(best - prev) <= CAUCHY_RTOL * np.maximum(1.0, np.abs(best))
    else:
        mask = np.isfinite(best)
    mask &= np.isfinite(best)
    vals = np.where(np.isfinite(best), best, -np.inf)
    return GeneratorEstimate(f.with_values(vals), float(ts[-1]), order, mask)


def check_translation_invariance(
    T: SemigroupOperator, f: GridFunction, a: float, t_seq: Sequence[float], richardson_order: int = 1
) -> float:
    """Sup distance between the generator estimates at ``a (x) f`` and ``f``."""
    if a == 0:
        return 0.0
    e1 = generator_estimate(T, f.with_values(a + f.values), t_seq, richardson_order)
    e0 = generator_estimate(T, f, t_seq, richardson_order)
    both = e1.domain_mask & e0.domain_mask
    if not both.any():
        return 0.0
    return float(np.max(np.abs(e1.Af.values - e0.Af.values)[both]))


@dataclass
class CounterexampleReport:
    witness_x: float
    witness_gap: float
    analytic_gap: float
    ordered_everywhere: bool
    max_gap: float
    max_gap_x: float
    grid: Grid

    @property
    def violates_max_additivity(self) -> bool:
        return self.ordered_everywhere and self.witness_gap > 0


def _counterexample_pair(grid: Grid):
    f = GridFunction.from_callable(grid, lambda x: np.exp(-2 * x * x))
    g = GridFunction.from_callable(grid, lambda x: np.exp(-x * x))
    return f, g


def generator_max_additivity_counterexample(
    n: int = 2049, L: float = 5.0, t_seq: Sequence[float] = (4e-3, 2e-3, 1e-3), x_target: float = -0.25
) -> CounterexampleReport:
    """``f = exp(-2x^2) <= g = exp(-x^2)`` under left translation: ``A(f (+) g) = Ag``
    but ``(Af (+) Ag)(x) > Ag(x)`` where ``f' > g'``."""
    grid = Grid(-L, L, n, periodic=True)
    T = make_translation("LEFT")
    f, g = _counterexample_pair(grid)
    Af = generator_estimate(T, f, t_seq).Af.values
    Ag = generator_estimate(T, g, t_seq).Af.values
    gap = np.maximum(Af, Ag) - Ag
    i = int(np.argmin(np.abs(grid.x - x_target)))
    x = grid.x[i]
    analytic = max(-4 * x * math.exp(-2 * x * x) - (-2 * x * math.exp(-x * x)), 0.0)
    j = int(np.argmax(gap))
    return CounterexampleReport(
        float(x), float(gap[i]), analytic, bool(np.all(f.values <= g.values)), float(gap[j]), float(grid.x[j]), grid
    )


# -- dissipativity -----------------------------------------------------------------


class SchemeGenerator:
    """Discrete generator ``G(u) = (T(h)u - u) / h`` of one step of size ``h``."""

    def __init__(self, T: SemigroupOperator, step: float):
        if not step > 0:
            raise ValueError("step must be positive")
        self.T = T
        self.step = float(step)

    def __call__(self, u: GridFunction) -> np.ndarray:
        return (self.T.evolve(self.step, u).values - u.values) / self.step


def solve_resolvent(
    G: Callable[[GridFunction], np.ndarray],
    g: GridFunction,
    alpha: float,
    omega: float | None = None,
    tol: float = 1e-13,
    max_iter: int = 20_000,
) -> tuple[GridFunction | None, int]:
    """Solve ``u - alpha G(u) = g`` by ``u <- (1-omega) u + omega (g + alpha G(u))``.

    For ``G = (T(h) - I)/h`` the default damping ``omega = h/(h+alpha)`` turns
    the iteration into ``u <- (h g + alpha T(h)u)/(h + alpha)``, a contraction
    with factor ``alpha/(h+alpha)`` when ``T(h)`` is sup-nonexpansive.
    Returns ``(None, iterations)`` on non-convergence.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    if omega is None:
        h = getattr(G, "step", None)
        omega = h / (h + alpha) if h else 0.5
    u = g
    s = scale_of([g])
    for it in range(1, max_iter + 1):
        nxt = (1 - omega) * u.values + omega * (g.values + alpha * G(u))
        if not np.all(np.isfinite(nxt)):
            return None, it
        delta = float(np.max(np.abs(nxt - u.values)))
        u = u.with_values(nxt)
        if delta <= tol * s:
            return u, it
    return None, max_iter


def dissipativity_probe(
    T: SemigroupOperator,
    scheme_generator: Callable[[GridFunction], np.ndarray],
    alpha: float,
    pairs,
    tol: float = 1e-8,
    omega: float | None = None,
    max_iter: int = 20_000,
) -> PropertyReport:
    """Sampled Lipschitz seminorm (sup norm) of the resolvent ``g -> (I - alpha G)^-1 g``.

    EXACT when every ratio is <= 1 + tol, VIOLATED when one exceeds it,
    UNKNOWN when a fixed-point solve does not converge.
    """
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    worst = 0.0
    ratios = []
    for g1, g2 in pairs:
        u1, _ = solve_resolvent(scheme_generator, g1, alpha, omega, max_iter=max_iter)
        u2, _ = solve_resolvent(scheme_generator, g2, alpha, omega, max_iter=max_iter)
        if u1 is None or u2 is None:
            return PropertyReport(Property.DISSIPATIVITY, T.label, alpha, Norm.SUP, math.nan, len(ratios),
                                  Verdict.UNKNOWN, "fixed-point iteration did not converge")
        den = float(np.max(np.abs(g1.values - g2.values)))
        if den == 0:
            continue
        r = float(np.max(np.abs(u1.values - u2.values))) / den
        ratios.append(r)
        worst = max(worst, r)
    verdict = Verdict.EXACT if worst <= 1 + tol else Verdict.VIOLATED
    return PropertyReport(Property.DISSIPATIVITY, T.label, alpha, Norm.SUP, max(worst - 1.0, 0.0), len(ratios),
                          verdict, f"max_ratio={worst!r}", 1.0, ratios)


GENERATOR_CSV_FIELDS = ("operator", "f_label", "t_min", "order", "sup_error", "domain_mask_fraction")


def generator_rows_to_csv(rows, header_comment: str | None = None) -> str:
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(GENERATOR_CSV_FIELDS)
    for r in rows:
        w.writerow([r[0], r[1], repr(float(r[2])), str(int(r[3])), repr(float(r[4])), repr(float(r[5]))])
    return buf.getvalue()
