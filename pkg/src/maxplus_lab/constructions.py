"""New semigroups from old: rescaling, products, restrictions, similarity, quotients.

Every construction checks its hypotheses on samples (commutation,
invariance, mutual inverses) and refuses to build the operator when the
measured defect exceeds the budget.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .function_space import GridFunction, Norm, _norm_of_array, scale_of
from .semigroup import EXACT_RTOL, SemigroupOperator

NEG_INF = -np.inf


class ConstructionError(ValueError):
    """A sampled precondition of a construction failed."""


class RescaleVariant(str, enum.Enum):
    ADDITIVE = "ADDITIVE"
    MULTIPLICATIVE = "MULTIPLICATIVE"


def rescale(
    T: SemigroupOperator, alpha: float, beta: float, variant: RescaleVariant | str = RescaleVariant.ADDITIVE
) -> SemigroupOperator:
    """``S(t) = (beta t) (x) T(alpha t)`` (ADDITIVE, pointwise shift by ``beta t``)
    or ``S(t) = exp(beta t) * T(alpha t)`` (MULTIPLICATIVE, real scaling).

    The multiplicative reading keeps the semigroup law but not
    plus-homogeneity; the additive one keeps both.
    """
    if not alpha > 0:
        raise ValueError(f"alpha must be positive, got {alpha!r}")
    variant = RescaleVariant(variant)

    if variant is RescaleVariant.ADDITIVE:
        def evolve(t, f):
            return _shift(T.evolve(alpha * t, f), beta * t)
    else:
        def evolve(t, f):
            out = T.evolve(alpha * t, f)
            with np.errstate(invalid="ignore"):
                return out.with_values(math.exp(beta * t) * out.values)

    label = f"rescale[{variant.value.lower()},a={alpha!r},b={beta!r}]({T.label})"
    return SemigroupOperator(evolve, label, T.native_norm, T.budget)


def _shift(f: GridFunction, c: float) -> GridFunction:
    return f if c == 0 else f.with_values(c + f.values)


def _defect(T: SemigroupOperator, a: GridFunction, b: GridFunction) -> float:
    return _norm_of_array(a.values - b.values, a.grid, T.native_norm)


def commutation_defect(T: SemigroupOperator, U: SemigroupOperator, t_list: Sequence[float], samples) -> float:
    worst = 0.0
    for t in t_list:
        for f in samples:
            worst = max(worst, _defect(T, T.evolve(t, U.evolve(t, f)), U.evolve(t, T.evolve(t, f))))
    return worst


def product(
    T: SemigroupOperator,
    U: SemigroupOperator,
    samples: Sequence[GridFunction],
    t_list: Sequence[float] = (0.1, 0.5),
    tol: float | None = None,
) -> SemigroupOperator:
    """``S(t) = T(t) U(t)``, refused unless ``T(t)U(t) = U(t)T(t)`` on samples."""
    samples = list(samples)
    tol = EXACT_RTOL * scale_of(samples) if tol is None else tol
    d = commutation_defect(T, U, t_list, samples)
    if d > tol:
        raise ConstructionError(
            f"{T.label} and {U.label} do not commute: defect {d!r} > {tol!r} on {len(samples)} samples"
        )
    return SemigroupOperator(lambda t, f: T.evolve(t, U.evolve(t, f)), f"({T.label})*({U.label})", T.native_norm, T.budget)


def restrict(
    T: SemigroupOperator,
    predicate: Callable[[GridFunction], bool],
    samples: Sequence[GridFunction],
    t_list: Sequence[float] = (0.1, 0.5, 1.0),
    name: str = "subclass",
) -> SemigroupOperator:
    """``T`` restricted to ``{f : predicate(f)}``; refused if a sampled member
    leaves the class, and the result rejects non-members."""
    members = [f for f in samples if predicate(f)]
    if not members:
        raise ConstructionError("no sample satisfies the predicate")
    for t in t_list:
        for i, f in enumerate(members):
            if not predicate(T.evolve(t, f)):
                raise ConstructionError(f"{T.label} maps member {i} out of {name} at t={t!r}")

    def evolve(t, f):
        if not predicate(f):
            raise ValueError(f"input is not in {name}")
        return T.evolve(t, f)

    return SemigroupOperator(evolve, f"{T.label}|{name}", T.native_norm, T.budget)


def conjugate(
    T: SemigroupOperator,
    V: Callable[[GridFunction], GridFunction],
    Vinv: Callable[[GridFunction], GridFunction],
    samples: Sequence[GridFunction],
    name: str = "V",
) -> SemigroupOperator:
    """``S(t) = Vinv T(t) V`` after checking ``V Vinv = Vinv V = Id`` and that
    ``V`` maps finite functions to finite functions on the samples."""
    for i, f in enumerate(samples):
        g = V(f)
        if f.is_finite and not g.is_finite:
            raise ConstructionError(f"{name} maps finite sample {i} to a function with bottom entries")
        if Vinv(g) != f or V(Vinv(f)) != f:
            raise ConstructionError(f"{name} and its inverse are not mutually inverse on sample {i}")
    return SemigroupOperator(lambda t, f: Vinv(T.evolve(t, V(f))), f"{name}^-1 {T.label} {name}", T.native_norm, T.budget)


def reflection(f: GridFunction) -> GridFunction:
    """``x -> -x`` on a grid symmetric about 0 (reverses the cells)."""
    g = f.grid
    if not math.isclose(g.xmin, -g.xmax):
        raise ValueError("reflection needs a grid symmetric about 0")
    return f.with_values(f.values[::-1])


def plus_shift(c: float) -> Callable[[GridFunction], GridFunction]:
    return lambda f: _shift(f, c)


# -- predicates --------------------------------------------------------------------


def is_concave(f: GridFunction, rtol: float = 1e-12) -> bool:
    v = f.values
    if not f.is_finite:
        return False
    return bool(np.all(v[2:] - 2 * v[1:-1] + v[:-2] <= rtol * scale_of([f])))


def is_nonpositive(f: GridFunction) -> bool:
    return bool(np.all(f.values <= 0))


def is_nonnegative(f: GridFunction) -> bool:
    return bool(np.all(f.values >= 0))


# -- finite-dimensional max-plus quotient --------------------------------------------


def mp_matvec(A: np.ndarray, x: np.ndarray) -> np.ndarray:
    """``(A (x) x)_i = max_j (A_ij + x_j)``."""
    A = np.asarray(A, dtype=float)
    x = np.asarray(x, dtype=float)
    return np.max(A + x[None, :], axis=1)


def mp_residual(A: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Greatest ``x`` with ``A (x) x <= w``: ``x_j = min_i (w_i - A_ij)`` over finite ``A_ij``.

    Columns with no finite entry are unconstrained (``+inf``).
    """
    A = np.asarray(A, dtype=float)
    w = np.asarray(w, dtype=float)
    finite = np.isfinite(A)
    with np.errstate(invalid="ignore"):
        diff = np.where(finite, w[:, None] - np.where(finite, A, 0.0), np.inf)
    return np.min(diff, axis=0)


class QuotientVerdict(str, enum.Enum):
    EQUIVALENT = "EQUIVALENT"
    NOT_EQUIVALENT = "NOT_EQUIVALENT"
    UNKNOWN = "UNKNOWN"


@dataclass
class QuotientResult:
    verdict: QuotientVerdict
    a: np.ndarray | None = None
    b: np.ndarray | None = None
    g1: np.ndarray | None = None
    g2: np.ndarray | None = None
    iterations: int = 0
    details: str = ""


def _as_generators(D) -> np.ndarray:
    gens = [np.asarray(d, dtype=float) for d in D]
    if not gens:
        raise ValueError("subspace needs at least one generator")
    if len({g.size for g in gens}) != 1:
        raise ValueError("generators have different lengths")
    M = np.stack(gens, axis=1)
    if np.isnan(M).any() or np.isposinf(M).any():
        raise ValueError("generators must have entries in R_max")
    return M


def quotient_equivalent(f1, f2, D, max_iter: int = 10_000) -> QuotientResult:
    """Decide ``f1 ~ f2``: is there ``g1, g2`` in span(D) with ``f1 (+) g1 = f2 (+) g2``?

    Solves the two-sided system ``[f1 | D] (x) (0, a) = [f2 | D] (x) (0, b)``
    by the alternating residuation method started from an upper bound ``M``
    on the coefficients. The iterates decrease and stay above every solution
    below the start, so a pinned coordinate dropping below 0 proves there is
    no solution with coefficients <= M. Since valid ``g`` are upward closed in
    span(D), ``M`` = (max entry of f1, f2) - (min finite entry of D) + 1 loses
    nothing.
    """
    f1 = np.asarray(f1, dtype=float)
    f2 = np.asarray(f2, dtype=float)
    Dm = _as_generators(D)
    if f1.shape != f2.shape or f1.ndim != 1 or Dm.shape[0] != f1.size:
        raise ValueError(f"dimension mismatch: f1 {f1.shape}, f2 {f2.shape}, D {Dm.shape}")
    if np.array_equal(f1, f2):
        a = np.full(Dm.shape[1], NEG_INF)
        return QuotientResult(QuotientVerdict.EQUIVALENT, a, a.copy(), mp_matvec(Dm, a), mp_matvec(Dm, a), 0, "identical")
    A = np.column_stack([f1, Dm])
    B = np.column_stack([f2, Dm])
    fin_f = np.concatenate([f1[np.isfinite(f1)], f2[np.isfinite(f2)], [0.0]])
    fin_D = Dm[np.isfinite(Dm)]
    top = float(np.max(fin_f)) - (float(np.min(fin_D)) if fin_D.size else 0.0) + 1.0
    ux = np.concatenate([[0.0], np.full(Dm.shape[1], top)])
    x = ux.copy()
    y = ux.copy()
    for it in range(1, max_iter + 1):
        y = np.minimum(y, mp_residual(B, mp_matvec(A, x)))
        x = np.minimum(x, mp_residual(A, mp_matvec(B, y)))
        if x[0] < 0 or y[0] < 0:
            return QuotientResult(QuotientVerdict.NOT_EQUIVALENT, iterations=it,
                                  details="pinned coefficient forced below 0")
        lhs, rhs = mp_matvec(A, x), mp_matvec(B, y)
        if np.array_equal(lhs, rhs):
            a, b = x[1:], y[1:]
            g1, g2 = mp_matvec(Dm, a), mp_matvec(Dm, b)
            if not np.array_equal(np.maximum(f1, g1), np.maximum(f2, g2)):
                raise AssertionError("witness failed verification")
            return QuotientResult(QuotientVerdict.EQUIVALENT, a, b, g1, g2, it)
    return QuotientResult(QuotientVerdict.UNKNOWN, iterations=max_iter, details="iteration cap reached")


def project_onto_span(D, w) -> np.ndarray:
    """Greatest element of span(D) below ``w``."""
    Dm = _as_generators(D)
    coeff = mp_residual(Dm, np.asarray(w, dtype=float))
    coeff = np.where(np.isposinf(coeff), NEG_INF, coeff)
    return mp_matvec(Dm, coeff)


def quotient_apply(T_matrix, class_rep, D, max_iter: int = 10_000) -> np.ndarray:
    """Representative ``T (x) rep`` of the image class ``[T rep]_D``.

    Refused unless every ``T (x) d`` is equivalent to its projection onto span(D)
    (invariance of D under T, decided by :func:`quotient_equivalent`).
    """
    T_matrix = np.asarray(T_matrix, dtype=float)
    Dm = _as_generators(D)
    rep = np.asarray(class_rep, dtype=float)
    if T_matrix.shape != (rep.size, rep.size) or Dm.shape[0] != rep.size:
        raise ValueError("dimension mismatch")
    for j in range(Dm.shape[1]):
        Td = mp_matvec(T_matrix, Dm[:, j])
        res = quotient_equivalent(Td, project_onto_span(Dm.T, Td), Dm.T, max_iter)
        if res.verdict is not QuotientVerdict.EQUIVALENT:
            raise ConstructionError(f"subspace is not invariant: T (x) generator {j} gives {res.verdict.value}")
    return mp_matvec(T_matrix, rep)


def mp_identity(n: int) -> np.ndarray:
    M = np.full((n, n), NEG_INF)
    np.fill_diagonal(M, 0.0)
    return M
