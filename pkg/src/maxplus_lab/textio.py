"""Text formats for grid functions, trajectories and finite max-plus vectors.

Grid function::

    grid <xmin> <xmax> <n> <periodic>
    v0 v1 ... v{n-1}

Floats are written with ``repr`` so finite doubles round-trip bit-exactly;
bottom is the token ``-inf``. A trajectory is a sequence of such records,
each preceded by a ``t <time>`` line.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np

from .core import BOTTOM_TOKEN, format_scalar, parse_scalar
from .function_space import Grid, GridFunction


class FormatError(ValueError):
    pass


def _fmt(v: float) -> str:
    return BOTTOM_TOKEN if v == -np.inf else repr(float(v))


def _parse_value(token: str, lineno: int) -> float:
    try:
        return float(parse_scalar(token))
    except ValueError as exc:
        raise FormatError(f"line {lineno}: {exc}") from None


def _parse_bool(token: str, lineno: int) -> bool:
    low = token.lower()
    if low in ("1", "true", "yes"):
        return True
    if low in ("0", "false", "no"):
        return False
    raise FormatError(f"line {lineno}: periodic flag must be true/false, got {token!r}")


def format_grid_function(f: GridFunction) -> str:
    g = f.grid
    if not isinstance(g, Grid):
        raise TypeError("the text format covers 1-D grids only")
    head = f"grid {_fmt(g.xmin)} {_fmt(g.xmax)} {g.n} {'true' if g.periodic else 'false'}"
    return head + "\n" + " ".join(_fmt(v) for v in f.values) + "\n"


def _parse_header(line: str, lineno: int) -> Grid:
    parts = line.split()
    if len(parts) != 5 or parts[0] != "grid":
        raise FormatError(f"line {lineno}: malformed header {line.strip()!r}, expected 'grid xmin xmax n periodic'")
    try:
        n = int(parts[3])
    except ValueError:
        raise FormatError(f"line {lineno}: cell count {parts[3]!r} is not an integer") from None
    try:
        return Grid(float(parts[1]), float(parts[2]), n, _parse_bool(parts[4], lineno))
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"line {lineno}: {exc}") from None


def _read_records(lines: list[str], with_time: bool) -> list:
    out = []
    i = 0
    # skip blanks and '#' comments
    rows = [(k + 1, ln) for k, ln in enumerate(lines) if ln.strip() and not ln.lstrip().startswith("#")]
    while i < len(rows):
        t = None
        if with_time:
            lineno, ln = rows[i]
            parts = ln.split()
            if len(parts) != 2 or parts[0] != "t":
                raise FormatError(f"line {lineno}: expected 't <time>', got {ln.strip()!r}")
            t = _parse_value(parts[1], lineno)
            i += 1
            if i >= len(rows):
                raise FormatError(f"line {lineno}: time record without grid function")
        lineno, ln = rows[i]
        grid = _parse_header(ln, lineno)
        i += 1
        vals: list[float] = []
        last = lineno
        while len(vals) < grid.n and i < len(rows):
            ln_no, ln = rows[i]
            if ln.split()[0] in ("t", "grid"):
                break
            vals.extend(_parse_value(tok, ln_no) for tok in ln.split())
            last = ln_no
            i += 1
        if len(vals) != grid.n:
            raise FormatError(f"line {last}: header at line {lineno} declares n={grid.n} but {len(vals)} values follow")
        f = GridFunction(grid, np.array(vals))
        out.append((t, f) if with_time else f)
    return out


def parse_grid_function(text: str) -> GridFunction:
    recs = _read_records(text.splitlines(), with_time=False)
    if len(recs) != 1:
        raise FormatError(f"expected exactly one grid function, found {len(recs)}")
    return recs[0]


def read_grid_function(path: str | os.PathLike) -> GridFunction:
    return parse_grid_function(Path(path).read_text())


def write_grid_function(path: str | os.PathLike, f: GridFunction) -> None:
    Path(path).write_text(format_grid_function(f))


def format_trajectory(trajectory) -> str:
    return "".join(f"t {_fmt(t)}\n" + format_grid_function(f) for t, f in trajectory)


def write_trajectory(path: str | os.PathLike, trajectory) -> None:
    Path(path).write_text(format_trajectory(trajectory))


def read_trajectory(path: str | os.PathLike) -> list[tuple[float, GridFunction]]:
    return _read_records(Path(path).read_text().splitlines(), with_time=True)


def format_vector(entries) -> str:
    return " ".join(format_scalar(float(v)) for v in np.asarray(entries, dtype=float))


def parse_vector(line: str) -> np.ndarray:
    toks = line.split()
    if not toks:
        raise FormatError("empty vector")
    return np.array([float(parse_scalar(tok)) for tok in toks])


def parse_subspace(text: str) -> list[np.ndarray]:
    """One generator per non-blank line."""
    gens = [parse_vector(ln) for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    if not gens:
        raise FormatError("subspace needs at least one generator")
    if len({g.size for g in gens}) != 1:
        raise FormatError("generators have different lengths")
    return gens


def format_subspace(generators) -> str:
    return "".join(format_vector(g) + "\n" for g in generators)
