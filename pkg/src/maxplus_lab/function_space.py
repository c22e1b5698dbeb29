"""Grid functions as a max-plus vector space.

A :class:`GridFunction` holds cell-centred samples on a uniform grid. Values
are float64 with ``-inf`` standing for the bottom element; IEEE arithmetic
treats ``-inf`` exactly under ``max`` and ``+`` (``-inf + a == -inf``), so the
pointwise operations need no special casing as long as ``+inf``/``NaN`` never
enter, which the constructor enforces.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterable, Sequence, Union

import numpy as np

from .core import MaxScalar


class Norm(str, enum.Enum):
    L1 = "L1"
    SUP = "SUP"


class GridMismatchError(ValueError):
    pass


class BottomValueError(ValueError):
    """Raised where a finite function (no -inf entries) is required."""


@dataclass(frozen=True)
class Grid:
    """Uniform cell-centred 1-D grid on ``[xmin, xmax]`` with ``n`` cells."""

    xmin: float
    xmax: float
    n: int
    periodic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "xmin", float(self.xmin))
        object.__setattr__(self, "xmax", float(self.xmax))
        if not self.xmin < self.xmax:
            raise ValueError(f"need xmin < xmax, got [{self.xmin}, {self.xmax}]")
        if int(self.n) != self.n or self.n < 2:
            raise ValueError(f"need an integer cell count n >= 2, got {self.n}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "periodic", bool(self.periodic))

    @property
    def dx(self) -> float:
        return (self.xmax - self.xmin) / self.n

    @property
    def length(self) -> float:
        return self.xmax - self.xmin

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.n,)

    @property
    def cell_volume(self) -> float:
        return self.dx

    @property
    def x(self) -> np.ndarray:
        return self.xmin + (np.arange(self.n) + 0.5) * self.dx

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.xmin, self.xmax, self.n * factor, self.periodic)


@dataclass(frozen=True)
class TensorGrid:
    """Tensor product of two 1-D grids (2-D boxes).

    Supported by the pointwise algebra and the norms; the solvers are 1-D.
    """

    axes: tuple[Grid, Grid]

    def __post_init__(self):
        if len(self.axes) != 2:
            raise ValueError("TensorGrid supports exactly two axes")
        object.__setattr__(self, "axes", tuple(self.axes))

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(g.n for g in self.axes)

    @property
    def cell_volume(self) -> float:
        return self.axes[0].dx * self.axes[1].dx

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        return np.meshgrid(self.axes[0].x, self.axes[1].x, indexing="ij")


AnyGrid = Union[Grid, TensorGrid]


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Immutable sampled element of the function space on ``grid``."""

    grid: AnyGrid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.shape != self.grid.shape:
            raise ValueError(f"values shape {v.shape} does not match grid shape {self.grid.shape}")
        if np.isnan(v).any():
            raise ValueError("NaN is not an element of R_max")
        if np.isposinf(v).any():
            raise ValueError("+inf is not an element of R_max")
        v.flags.writeable = False
        object.__setattr__(self, "values", v)

    @classmethod
    def from_callable(cls, grid: Grid, fn) -> "GridFunction":
        if isinstance(grid, TensorGrid):
            return cls(grid, fn(*grid.mesh()))
        return cls(grid, fn(grid.x))

    @classmethod
    def constant(cls, grid: AnyGrid, c: float) -> "GridFunction":
        return cls(grid, np.full(grid.shape, float(c)))

    @classmethod
    def bottom(cls, grid: AnyGrid) -> "GridFunction":
        """The zero element 0_X (identically -inf)."""
        return cls.constant(grid, -np.inf)

    @classmethod
    def theta(cls, grid: AnyGrid) -> "GridFunction":
        """The function identically 0 (the (x)-unit pointwise)."""
        return cls.constant(grid, 0.0)

    @property
    def is_finite(self) -> bool:
        return bool(np.isfinite(self.values).all())

    @property
    def is_bottom(self) -> bool:
        return bool(np.isneginf(self.values).all())

    def with_values(self, values) -> "GridFunction":
        return GridFunction(self.grid, values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GridFunction):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.values, other.values)

    def __hash__(self):
        return hash((self.grid, self.values.tobytes()))

    def __len__(self) -> int:
        return self.values.size


def _same_grid(f: GridFunction, g: GridFunction) -> None:
    if f.grid != g.grid:
        raise GridMismatchError(f"grid mismatch: {f.grid} vs {g.grid}")


def require_finite(f: GridFunction, what: str = "function") -> None:
    if not f.is_finite:
        idx = np.argwhere(~np.isfinite(f.values))[0]
        raise BottomValueError(f"{what} has a bottom (-inf) entry at index {tuple(int(i) for i in idx)}")


def pw_oplus(f: GridFunction, g: GridFunction) -> GridFunction:
    _same_grid(f, g)
    return GridFunction(f.grid, np.maximum(f.values, g.values))


def pw_otimes(a, f: GridFunction) -> GridFunction:
    a = float(MaxScalar.of(a))
    if a == -np.inf:
        return GridFunction.bottom(f.grid)
    return GridFunction(f.grid, a + f.values)


def leq(f: GridFunction, g: GridFunction) -> bool:
    """Standard order f <= g, i.e. ``f (+) g == g``."""
    return pw_oplus(f, g) == g


def lattice_decompose(f: GridFunction) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Positive part, negative part and absolute value of a finite ``f``.

    Returned as plain arrays: the parts live in the ambient real function
    space, not necessarily in the max-plus subspace ``f`` came from.
    """
    require_finite(f)
    pos = np.maximum(f.values, 0.0)
    neg = np.maximum(-f.values, 0.0)
    return pos, neg, pos + neg


def norm_l1(f: GridFunction) -> float:
    require_finite(f)
    return float(f.grid.cell_volume * np.sum(np.abs(f.values)))


def norm_sup(f: GridFunction) -> float:
    require_finite(f)
    return float(np.max(np.abs(f.values)))


def _norm_of_array(a: np.ndarray, grid: AnyGrid, norm: Norm) -> float:
    if Norm(norm) is Norm.L1:
        return float(grid.cell_volume * np.sum(np.abs(a)))
    return float(np.max(np.abs(a)))


def abs_diff_direct(f: GridFunction, g: GridFunction) -> np.ndarray:
    _same_grid(f, g)
    require_finite(f)
    require_finite(g)
    return np.abs(f.values - g.values)


def abs_diff_via_max(f: GridFunction, g: GridFunction) -> np.ndarray:
    """``|f - g|`` through ``2 (f (+) g) - f - g``.

    Evaluated as ``(m - f) + (m - g)`` with ``m = f (+) g``: one bracket is an
    exact zero, so the result is bit-identical to the direct difference.
    """
    _same_grid(f, g)
    require_finite(f)
    require_finite(g)
    m = np.maximum(f.values, g.values)
    return (m - f.values) + (m - g.values)


def dist(f: GridFunction, g: GridFunction, norm: Norm = Norm.SUP, via_max: bool = False) -> float:
    d = abs_diff_via_max(f, g) if via_max else abs_diff_direct(f, g)
    return _norm_of_array(d, f.grid, norm)


def positive_part_norm(a: np.ndarray, grid: AnyGrid, norm: Norm) -> float:
    return _norm_of_array(np.maximum(a, 0.0), grid, norm)


def lip_seminorm_estimate(
    T,
    t: float,
    samples: Iterable[tuple[GridFunction, GridFunction]],
    norm: Norm | None = None,
) -> float:
    """Sampled lower bound of the Lipschitz seminorm of ``T(t)``.

    ``T`` is anything with ``evolve(t, f)`` (and optionally ``native_norm``).
    """
    if t < 0:
        raise ValueError("t must be nonnegative")
    norm = Norm(norm if norm is not None else getattr(T, "native_norm", Norm.SUP))
    best = None
    for f, g in samples:
        require_finite(f)
        require_finite(g)
        den = dist(f, g, norm)
        if den == 0.0:
            raise ValueError("sample pair with f == g has no Lipschitz quotient")
        num = dist(T.evolve(t, f), T.evolve(t, g), norm)
        ratio = num / den
        best = ratio if best is None else max(best, ratio)
    if best is None:
        raise ValueError("empty sample set")
    return best


def scale_of(functions: Sequence[GridFunction]) -> float:
    """``max(1, sup-norm of the finite parts)`` used to scale roundoff tolerances."""
    m = 1.0
    for f in functions:
        v = f.values[np.isfinite(f.values)]
        if v.size:
            m = max(m, float(np.max(np.abs(v))))
    return m


def lerp(a: np.ndarray, b: np.ndarray, theta) -> np.ndarray:
    """``(1 - theta) a + theta b`` that keeps -inf exact at theta in {0, 1}.

    Inside (0, 1) a bottom endpoint yields bottom.
    """
    theta = np.broadcast_to(np.asarray(theta, dtype=np.float64), np.broadcast(a, b).shape)
    with np.errstate(invalid="ignore"):
        mid = (1.0 - theta) * a + theta * b
    out = np.where(theta == 0.0, a, np.where(theta == 1.0, b, mid))
    return out
