import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from maxplus_lab.function_space import Grid, GridFunction
from maxplus_lab.textio import (
    FormatError,
    format_grid_function,
    format_subspace,
    format_trajectory,
    parse_grid_function,
    parse_subspace,
    parse_vector,
    format_vector,
    read_grid_function,
    read_trajectory,
    write_grid_function,
    write_trajectory,
)

finite_or_bottom = st.one_of(
    st.floats(allow_nan=False, allow_infinity=False, width=64), st.just(-np.inf)
)


class TestGridFunctionText:
    @settings(max_examples=50)
    @given(arrays(np.float64, 17, elements=finite_or_bottom))
    def test_round_trip_bit_exact(self, values):
        f = GridFunction(Grid(-1.5, 2.0, 17, periodic=True), values)
        back = parse_grid_function(format_grid_function(f))
        assert back.grid == f.grid
        assert back.values.tobytes() == f.values.tobytes()

    def test_file_round_trip(self, tmp_path, rng):
        g = Grid(0.0, 1.0, 33)
        v = rng.normal(size=33)
        v[4] = -np.inf
        f = GridFunction(g, v)
        path = tmp_path / "f.txt"
        write_grid_function(path, f)
        assert read_grid_function(path) == f

    def test_header(self):
        f = GridFunction.theta(Grid(0.0, 1.0, 2))
        assert format_grid_function(f).splitlines()[0] == "grid 0.0 1.0 2 false"

    def test_count_mismatch_names_line(self):
        text = "grid 0 1 10 false\n" + " ".join(["0.5"] * 9) + "\n"
        with pytest.raises(FormatError, match="line 1"):
            parse_grid_function(text)

    @pytest.mark.parametrize(
        "text",
        [
            "grid 0 1 2\n0 0\n",
            "grid 0 1 two false\n0 0\n",
            "grid 0 1 2 maybe\n0 0\n",
            "grid 0 1 2 false\n0 nope\n",
            "grid 0 1 2 false\n0 inf\n",
            "",
        ],
    )
    def test_malformed(self, text):
        with pytest.raises(FormatError):
            parse_grid_function(text)


class TestTrajectory:
    def test_round_trip(self, tmp_path, rng):
        g = Grid(-1.0, 1.0, 8, periodic=True)
        traj = [(0.1 * k, GridFunction(g, rng.normal(size=8))) for k in range(4)]
        path = tmp_path / "traj.txt"
        write_trajectory(path, traj)
        back = read_trajectory(path)
        assert [t for t, _ in back] == [t for t, _ in traj]
        assert all(a == b for (_, a), (_, b) in zip(back, traj))

    def test_time_lines(self):
        g = Grid(0.0, 1.0, 2)
        text = format_trajectory([(0.5, GridFunction.theta(g))])
        assert text.splitlines()[0] == "t 0.5"


class TestVectors:
    def test_vector(self):
        v = parse_vector("0 -inf 1.5")
        assert np.isneginf(v[1]) and v[2] == 1.5
        assert format_vector(v) == "0.0 -inf 1.5"

    def test_subspace(self):
        D = parse_subspace("0 0\n-inf 1\n")
        assert len(D) == 2
        assert parse_subspace(format_subspace(D))[1].tolist() == D[1].tolist()

    def test_subspace_lengths_must_agree(self):
        with pytest.raises(FormatError):
            parse_subspace("0 0\n1\n")
