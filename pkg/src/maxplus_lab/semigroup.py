"""Semigroup operators and the property harness.

Every defect is measured in the operator's native norm and turned into a
three-tier verdict:

* ``EXACT``: defect <= ``exact_rtol * scale`` (roundoff only),
* ``WITHIN_SCHEME_ERROR``: above roundoff but within ``C * dx * scale``,
* ``VIOLATED``: above the scheme-error budget.

With several refinement levels a defect that is not exact must also shrink
under n -> 2n, otherwise the property is reported VIOLATED.
"""

from __future__ import annotations

import csv
import enum
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .function_space import (
    Grid,
    GridFunction,
    Norm,
    _norm_of_array,
    dist,
    lerp,
    lip_seminorm_estimate,
    positive_part_norm,
    pw_oplus,
    pw_otimes,
    require_finite,
    scale_of,
)

EXACT_RTOL = 1e-12


class Property(str, enum.Enum):
    MAX_ADDITIVITY = "MAX_ADDITIVITY"
    PLUS_HOMOGENEITY = "PLUS_HOMOGENEITY"
    MONOTONICITY = "MONOTONICITY"
    SEMIGROUP_LAW = "SEMIGROUP_LAW"
    STRONG_CONTINUITY = "STRONG_CONTINUITY"
    CONTRACTION = "CONTRACTION"
    ISOMETRY_L1 = "ISOMETRY_L1"
    DISSIPATIVITY = "DISSIPATIVITY"


class Verdict(str, enum.Enum):
    EXACT = "EXACT"
    WITHIN_SCHEME_ERROR = "WITHIN_SCHEME_ERROR"
    VIOLATED = "VIOLATED"
    UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class ErrorBudget:
    """Tolerances for verdicts: roundoff ``exact_rtol * scale`` and scheme ``C * dx * scale``."""

    C: float = 1.0
    exact_rtol: float = EXACT_RTOL
    shrink_factor: float = 0.75

    def exact_tol(self, scale: float) -> float:
        return self.exact_rtol * scale

    def scheme_tol(self, dx: float, scale: float) -> float:
        return max(self.C * dx * scale, self.exact_tol(scale))

    def classify(self, defect: float, dx: float, scale: float) -> Verdict:
        if not math.isfinite(defect):
            return Verdict.VIOLATED
        if defect <= self.exact_tol(scale):
            return Verdict.EXACT
        if defect <= self.scheme_tol(dx, scale):
            return Verdict.WITHIN_SCHEME_ERROR
        return Verdict.VIOLATED


DEFAULT_BUDGET = ErrorBudget()


class SemigroupOperator:
    """A family ``T(t)``, t >= 0, acting on grid functions.

    ``evolve(0, f)`` returns ``f`` itself, and the all-bottom function is a
    fixed point (``T(t)(-inf) = -inf``), without calling the scheme.
    """

    def __init__(
        self,
        evolve: Callable[[float, GridFunction], GridFunction],
        label: str,
        native_norm: Norm = Norm.SUP,
        budget: ErrorBudget = DEFAULT_BUDGET,
    ):
        self._evolve = evolve
        self.label = label
        self.native_norm = Norm(native_norm)
        self.budget = budget

    def evolve(self, t: float, f: GridFunction) -> GridFunction:
        if t < 0:
            raise ValueError(f"{self.label}: negative time {t}")
        if t == 0:
            return f
        if f.is_bottom:
            return f
        out = self._evolve(float(t), f)
        if out.grid != f.grid:
            raise RuntimeError(f"{self.label}: evolve changed the grid")
        return out

    __call__ = evolve

    def __repr__(self) -> str:
        return f"SemigroupOperator({self.label!r}, norm={self.native_norm.value})"


def identity_semigroup(native_norm: Norm = Norm.SUP) -> SemigroupOperator:
    return SemigroupOperator(lambda t, f: f, "identity", native_norm)


def shift_values(values: np.ndarray, shift_cells: float) -> np.ndarray:
    """``out[i] = values[i + shift_cells]`` on a periodic index set.

    Integer shifts are an exact permutation; fractional shifts interpolate
    linearly between the two neighbouring integer shifts.
    """
    k = math.floor(shift_cells)
    theta = shift_cells - k
    if theta < 1e-9:
        return np.roll(values, -k)
    if theta > 1 - 1e-9:
        return np.roll(values, -(k + 1))
    return lerp(np.roll(values, -k), np.roll(values, -(k + 1)), theta)


def make_translation(direction: str = "LEFT", native_norm: Norm = Norm.SUP) -> SemigroupOperator:
    """Left translation ``T(t)f(x) = f(x + t)`` (or right, ``f(x - t)``) on periodic grids."""
    direction = direction.upper()
    if direction not in ("LEFT", "RIGHT"):
        raise ValueError(f"direction must be LEFT or RIGHT, got {direction!r}")
    sign = 1.0 if direction == "LEFT" else -1.0

    def evolve(t, f):
        if not isinstance(f.grid, Grid) or not f.grid.periodic:
            raise ValueError("translation semigroup needs a periodic 1-D grid")
        s = sign * t / f.grid.dx
        r = round(s)
        if abs(s - r) < 1e-9:
            s = float(r)
        return f.with_values(shift_values(f.values, s))

    return SemigroupOperator(evolve, f"translation-{direction.lower()}", native_norm)


# -- sample generators ------------------------------------------------------

SAMPLE_KINDS = ("bumps", "piecewise_constant", "piecewise_linear")


def _bumps(grid: Grid, rng: np.random.Generator) -> np.ndarray:
    x = grid.x
    out = np.zeros(grid.n)
    width = grid.length
    for _ in range(rng.integers(1, 4)):
        c = rng.uniform(grid.xmin, grid.xmax)
        s = rng.uniform(0.05, 0.25) * width
        out += rng.uniform(-1.0, 1.0) * np.exp(-(((x - c) / s) ** 2))
    return out + rng.uniform(-0.5, 0.5)


def _piecewise_constant(grid: Grid, rng: np.random.Generator) -> np.ndarray:
    k = int(rng.integers(2, 7))
    cuts = np.sort(rng.uniform(grid.xmin, grid.xmax, k - 1))
    levels = rng.uniform(-1.0, 1.0, k)
    return levels[np.searchsorted(cuts, grid.x)]


def _piecewise_linear(grid: Grid, rng: np.random.Generator) -> np.ndarray:
    k = int(rng.integers(3, 9))
    nodes = np.linspace(grid.xmin, grid.xmax, k)
    vals = rng.uniform(-1.0, 1.0, k)
    if grid.periodic:
        vals[-1] = vals[0]
    return np.interp(grid.x, nodes, vals)


_GENERATORS = {
    "bumps": _bumps,
    "piecewise_constant": _piecewise_constant,
    "piecewise_linear": _piecewise_linear,
}


def sample_functions(
    grid: Grid, count: int, seed: int = 0, kinds: Sequence[str] = SAMPLE_KINDS, amplitude: float = 1.0
) -> list[GridFunction]:
    """Deterministic seeded family cycling through ``kinds``."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(count):
        kind = kinds[i % len(kinds)]
        out.append(GridFunction(grid, amplitude * _GENERATORS[kind](grid, rng)))
    return out


def sample_pairs(
    grid: Grid, count: int, seed: int = 0, kinds: Sequence[str] = SAMPLE_KINDS, amplitude: float = 1.0
) -> list[tuple[GridFunction, GridFunction]]:
    """Generic (typically crossing) pairs; never equal."""
    fs = sample_functions(grid, 2 * count, seed, kinds, amplitude)
    return [(fs[2 * i], fs[2 * i + 1]) for i in range(count)]


def ordered_pairs(
    grid: Grid, count: int, seed: int = 0, kinds: Sequence[str] = SAMPLE_KINDS, amplitude: float = 1.0
) -> list[tuple[GridFunction, GridFunction]]:
    """Pairs ``(f, g)`` with ``f <= g``: ``g = f (+) (f + nonnegative perturbation)``."""
    rng = np.random.default_rng(seed + 7919)
    fs = sample_functions(grid, count, seed, kinds, amplitude)
    out = []
    for f in fs:
        bump = np.abs(_GENERATORS[kinds[int(rng.integers(len(kinds)))]](grid, rng)) * amplitude
        if not np.any(bump > 0):
            bump = np.full(grid.n, 0.1 * amplitude)
        g = np.maximum(f.values, f.values + bump)
        out.append((f, f.with_values(g)))
    return out


# -- reports ------------------------------------------------------------------

CSV_FIELDS = ("property", "operator", "t", "norm", "defect", "samples", "verdict")


@dataclass
class PropertyReport:
    property: Property
    operator: str
    t: float
    norm: Norm
    defect: float
    samples: int
    verdict: Verdict
    details: str = ""
    scale: float = 1.0
    values: list = field(default_factory=list, repr=False)

    @property
    def holds(self) -> bool:
        return self.verdict in (Verdict.EXACT, Verdict.WITHIN_SCHEME_ERROR)

    def csv_row(self) -> list[str]:
        return [
            Property(self.property).value,
            self.operator,
            repr(float(self.t)),
            Norm(self.norm).value,
            repr(float(self.defect)),
            str(self.samples),
            Verdict(self.verdict).value,
        ]


def reports_to_csv(reports: Iterable[PropertyReport], header_comment: str | None = None) -> str:
    buf = io.StringIO()
    if header_comment:
        buf.write(f"# {header_comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in reports:
        w.writerow(r.csv_row())
    return buf.getvalue()


def _dx_of(f: GridFunction) -> float:
    g = f.grid
    return g.dx if isinstance(g, Grid) else max(a.dx for a in g.axes)


def _report(prop, T, t, defect, n, scale, dx, budget, details="", values=None) -> PropertyReport:
    budget = budget or T.budget
    return PropertyReport(
        property=prop,
        operator=T.label,
        t=t,
        norm=T.native_norm,
        defect=float(defect),
        samples=n,
        verdict=budget.classify(defect, dx, scale),
        details=details,
        scale=scale,
        values=list(values or []),
    )


def _native_norm(T, a: np.ndarray, grid) -> float:
    return _norm_of_array(a, grid, T.native_norm)


# -- defects --------------------------------------------------------------------


def defect_max_additivity(T: SemigroupOperator, t: float, pairs, budget: ErrorBudget | None = None) -> PropertyReport:
    if t < 0:
        raise ValueError("t must be nonnegative")
    pairs = list(pairs)
    worst, per, scale = 0.0, [], scale_of([h for p in pairs for h in p])
    for f, g in pairs:
        lhs = T.evolve(t, pw_oplus(f, g))
        rhs = pw_oplus(T.evolve(t, f), T.evolve(t, g))
        d = _native_norm(T, lhs.values - rhs.values, f.grid)
        per.append(d)
        worst = max(worst, d)
    dx = _dx_of(pairs[0][0]) if pairs else 0.0
    return _report(Property.MAX_ADDITIVITY, T, t, worst, len(pairs), scale, dx, budget, values=per)


def defect_plus_homogeneity(
    T: SemigroupOperator, t: float, a: float, samples, budget: ErrorBudget | None = None
) -> PropertyReport:
    if t < 0:
        raise ValueError("t must be nonnegative")
    if not math.isfinite(float(a)):
        raise ValueError("plus-homogeneity probe needs a finite scalar")
    samples = list(samples)
    worst, per = 0.0, []
    for f in samples:
        lhs = T.evolve(t, pw_otimes(a, f))
        rhs = pw_otimes(a, T.evolve(t, f))
        d = _native_norm(T, lhs.values - rhs.values, f.grid)
        per.append(d)
        worst = max(worst, d)
    scale = abs(float(a)) + scale_of(samples)
    dx = _dx_of(samples[0]) if samples else 0.0
    return _report(Property.PLUS_HOMOGENEITY, T, t, worst, len(samples), scale, dx, budget, f"a={a!r}", per)


def defect_monotonicity(T: SemigroupOperator, t: float, pairs, budget: ErrorBudget | None = None) -> PropertyReport:
    pairs = list(pairs)
    worst, per = 0.0, []
    for f, g in pairs:
        if np.any(f.values > g.values):
            raise ValueError("monotonicity probe needs ordered pairs f <= g")
        diff = T.evolve(t, f).values - T.evolve(t, g).values
        d = positive_part_norm(diff, f.grid, T.native_norm)
        per.append(d)
        worst = max(worst, d)
    scale = scale_of([h for p in pairs for h in p])
    dx = _dx_of(pairs[0][0]) if pairs else 0.0
    return _report(Property.MONOTONICITY, T, t, worst, len(pairs), scale, dx, budget, values=per)


def defect_semigroup_law(
    T: SemigroupOperator, t: float, s: float, samples, budget: ErrorBudget | None = None
) -> PropertyReport:
    if t < 0 or s < 0:
        raise ValueError("t and s must be nonnegative")
    samples = list(samples)
    worst, per = 0.0, []
    for f in samples:
        d = _native_norm(T, T.evolve(t + s, f).values - T.evolve(t, T.evolve(s, f)).values, f.grid)
        per.append(d)
        worst = max(worst, d)
    dx = _dx_of(samples[0]) if samples else 0.0
    return _report(
        Property.SEMIGROUP_LAW, T, t + s, worst, len(samples), scale_of(samples), dx, budget, f"t={t!r} s={s!r}", per
    )


def continuity_modulus(T: SemigroupOperator, f: GridFunction, t_list: Sequence[float]) -> list[tuple[float, float]]:
    """``[(t, ||T(t)f - f||)]`` in the native norm."""
    require_finite(f)
    out = []
    prev = math.inf
    for t in t_list:
        if t < 0 or t > prev:
            raise ValueError("t_list must be nonnegative and decreasing")
        prev = t
        out.append((float(t), _native_norm(T, T.evolve(t, f).values - f.values, f.grid)))
    return out


def check_strong_continuity(
    T: SemigroupOperator, f: GridFunction, t_list: Sequence[float], budget: ErrorBudget | None = None
) -> PropertyReport:
    """Report the modulus at the smallest time.

    EXACT when the modulus is at roundoff throughout, WITHIN_SCHEME_ERROR when
    it decreases along ``t_list`` and ends strictly below its first value,
    VIOLATED otherwise.
    """
    mod = continuity_modulus(T, f, t_list)
    last = mod[-1][1]
    scale = scale_of([f])
    budget = budget or T.budget
    decays = all(b[1] <= a[1] * (1 + 1e-9) + 1e-15 for a, b in zip(mod, mod[1:]))
    if all(d <= budget.exact_tol(scale) for _, d in mod):
        verdict = Verdict.EXACT
    elif decays and last < mod[0][1]:
        verdict = Verdict.WITHIN_SCHEME_ERROR
    else:
        verdict = Verdict.VIOLATED
    return PropertyReport(
        Property.STRONG_CONTINUITY, T.label, mod[-1][0], T.native_norm, last, len(mod), verdict,
        "modulus=" + ";".join(f"{t!r}:{d!r}" for t, d in mod), scale, [d for _, d in mod],
    )


def check_contraction(
    T: SemigroupOperator, t_list: Sequence[float], pairs, omega: float = 0.0, tol: float = 1e-10,
    norm: Norm | None = None,
) -> PropertyReport:
    """``||T(t)||_Lip <= exp(omega t) + tol`` on sampled pairs for each t.

    The defect is ``max(0, estimate - exp(omega t))``; the verdict is EXACT
    when it is within ``tol``, VIOLATED otherwise.
    """
    pairs = list(pairs)
    worst, ests = 0.0, []
    for t in t_list:
        est = lip_seminorm_estimate(T, t, pairs, norm)
        ests.append(est)
        worst = max(worst, est - math.exp(omega * t))
    verdict = Verdict.EXACT if worst <= tol else Verdict.VIOLATED
    return PropertyReport(
        Property.CONTRACTION, T.label, float(max(t_list)), Norm(norm or T.native_norm), max(worst, 0.0),
        len(pairs) * len(t_list), verdict, "lip=" + ";".join(repr(e) for e in ests), 1.0, ests,
    )


def check_isometry_l1(T: SemigroupOperator, t: float, pairs, budget: ErrorBudget | None = None) -> PropertyReport:
    pairs = list(pairs)
    worst, per = 0.0, []
    for f, g in pairs:
        d = abs(dist(T.evolve(t, f), T.evolve(t, g), Norm.L1) - dist(f, g, Norm.L1))
        per.append(d)
        worst = max(worst, d)
    scale = scale_of([h for p in pairs for h in p])
    dx = _dx_of(pairs[0][0]) if pairs else 0.0
    rep = _report(Property.ISOMETRY_L1, T, t, worst, len(pairs), scale, dx, budget, values=per)
    rep.norm = Norm.L1
    return rep


# -- refinement -------------------------------------------------------------------


@dataclass
class RefinementStudy:
    property: Property
    operator: str
    t: float
    norm: Norm
    levels: list[int]
    defects: list[float]
    verdict: Verdict
    details: str = ""

    @property
    def ratios(self) -> list[float]:
        return [b / a if a > 0 else math.nan for a, b in zip(self.defects, self.defects[1:])]


def refinement_verdict(
    defects: Sequence[float], dxs: Sequence[float], scale: float = 1.0, budget: ErrorBudget = DEFAULT_BUDGET
) -> Verdict:
    """EXACT if every level is at roundoff; WITHIN_SCHEME_ERROR if the finest
    level is inside its budget and the defect shrinks by ``shrink_factor`` per
    refinement; VIOLATED otherwise."""
    if all(d <= budget.exact_tol(scale) for d in defects):
        return Verdict.EXACT
    if len(defects) == 1:
        return budget.classify(defects[0], dxs[0], scale)
    shrinking = all(
        b <= budget.shrink_factor * a or b <= budget.exact_tol(scale) for a, b in zip(defects, defects[1:])
    )
    if shrinking and defects[-1] <= budget.scheme_tol(dxs[-1], scale):
        return Verdict.WITHIN_SCHEME_ERROR
    return Verdict.VIOLATED


def refinement_study(
    measure: Callable[[Grid], PropertyReport], grids: Sequence[Grid], budget: ErrorBudget = DEFAULT_BUDGET
) -> RefinementStudy:
    """Run ``measure`` on each grid and classify the defect curve."""
    reps = [measure(g) for g in grids]
    defects = [r.defect for r in reps]
    scale = max(r.scale for r in reps)
    verdict = refinement_verdict(defects, [g.dx for g in grids], scale, budget)
    r0 = reps[0]
    return RefinementStudy(r0.property, r0.operator, r0.t, r0.norm, [g.n for g in grids], defects, verdict)
