import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robustlex.contingency import ContingencyTable, NormalizedTable, normalize
from robustlex.errors import ConfigError
from robustlex.korresp import (
    FIRST_J,
    LAST_I,
    Codebook,
    MapGeometry,
    TrainConfig,
    _streams,
    assign_all,
    associate_col,
    associate_row,
    epsilon_schedule,
    extend_col,
    extend_row,
    init_codebook,
    layout_of,
    neighborhood_sigma,
    train,
    update_step,
    winner,
)
from robustlex.stability import ensemble_units
from robustlex.synthetic import random_table, two_block_table


def raw(values):
    values = np.asarray(values, dtype=float)
    rows = tuple(f"r{i}" for i in range(values.shape[0]))
    cols = tuple(f"c{j}" for j in range(values.shape[1]))
    return NormalizedTable(rows, cols, values)


def codebook(vectors, n_cols, width=None, height=1):
    vectors = np.asarray(vectors, dtype=float)
    g = MapGeometry(width or len(vectors), height)
    return Codebook(g, vectors, n_cols)


class TestGeometry:
    def test_units_and_coords(self):
        g = MapGeometry(4, 3)
        assert g.units == 12
        assert g.coords(5) == (1, 1)
        assert g.unit(3, 2) == 11

    def test_parse(self):
        assert MapGeometry.parse("10x10") == MapGeometry(10, 10)
        with pytest.raises(ConfigError):
            MapGeometry.parse("10by10")
        with pytest.raises(ConfigError):
            MapGeometry.parse("0x3")


class TestAssociation:
    def test_row(self):
        n = raw([[0.1, 0.7, 0.2], [0.4, 0.4, 0.1], [0, 0, 0.3]])
        assert [associate_row(n, i) for i in range(3)] == [1, 0, 2]

    def test_col(self):
        assert associate_col(raw([[0.2], [0.9]]), 0) == 1
        assert associate_col(raw([[0.3], [0.3], [0.3]]), 0) == 0
        assert associate_col(raw([[0], [0], [0], [0], [0.5]]), 0) == 4

    def test_extend_identity(self):
        n = normalize(ContingencyTable(("a", "b"), ("x", "y"), np.eye(2, dtype=int)))
        assert extend_row(n, 0).tolist() == [1, 0, 1, 0]

    def test_extend_uniform(self):
        n = raw(np.full((2, 2), 0.5))
        assert extend_row(n, 1).tolist() == [0.5, 0.5, 0.5, 0.5]

    def test_extend_assembly(self):
        n = raw([[0.5, 0.2], [0.3, 0.3], [0.1, 0.6]])
        assert extend_row(n, 2).tolist() == [0.1, 0.6, 0.2, 0.3, 0.6]
        # column 0 is most probable under row 0
        assert extend_col(n, 0).tolist() == [0.5, 0.2, 0.5, 0.3, 0.1]


class TestWinner:
    def test_exact_match(self):
        cb = codebook([[0, 0, 9], [1, 2, 9], [3, 3, 9]], n_cols=2)
        assert winner(cb, [1, 2, 0], FIRST_J) == 1

    def test_tie_goes_to_smaller_index(self):
        cb = codebook([[1, 1, 0, 0], [1, 1, 5, 5]], n_cols=2)
        assert winner(cb, [1, 1, 5, 5], FIRST_J) == 0

    def test_hand_distances(self):
        # distances on the first part: 0.25 and 0.16
        cb = codebook([[0.5, 0.0, 0.0], [0.0, 0.4, 1.0]], n_cols=2)
        assert winner(cb, [0.0, 0.0, 0.0], FIRST_J) == 1

    def test_last_part(self):
        cb = codebook([[0, 0, 1], [5, 5, 0]], n_cols=2)
        assert winner(cb, [0, 0, 0], LAST_I) == 1

    def test_bad_part(self):
        with pytest.raises(ValueError):
            winner(codebook([[0, 0]], 1), [0, 0], "middle")

    @settings(max_examples=40, deadline=None)
    @given(st.integers(0, 10**6))
    def test_first_part_ignores_the_rest(self, seed):
        rng = np.random.default_rng(seed)
        cb = codebook(rng.random((6, 5)), n_cols=3, width=3, height=2)
        v = rng.random(5)
        w = v.copy()
        w[3:] = rng.normal(size=2) * 100
        assert winner(cb, v, FIRST_J) == winner(cb, w, FIRST_J)


class TestNeighborhood:
    def test_values(self):
        g = MapGeometry(10, 10)
        assert neighborhood_sigma(g, 0, 0) == 1
        assert neighborhood_sigma(g, g.unit(0, 0), g.unit(1, 1)) == 1
        assert neighborhood_sigma(g, g.unit(0, 0), g.unit(0, 2)) == 0

    def test_edge_units_have_fewer_neighbors(self):
        sizes = [len(nb) for nb in MapGeometry(4, 4).neighbor_lists()]
        assert sizes[0] == 4 and sizes[1] == 6 and sizes[5] == 9


class TestUpdate:
    def test_eps_one_copies_input(self):
        cb = codebook(np.zeros((3, 4)), n_cols=2)
        out = update_step(cb, [1, 2, 3, 4], 1, eps=1.0)
        assert np.array_equal(out.vectors, np.tile([1, 2, 3, 4], (3, 1)))

    def test_outside_untouched(self):
        cb = codebook(np.zeros((4, 2)), n_cols=1)
        out = update_step(cb, [1, 1], 0, eps=0.5)
        assert out.vectors[2:].tolist() == [[0, 0], [0, 0]]

    def test_midpoint(self):
        cb = codebook(np.zeros((3, 4)), n_cols=2)
        out = update_step(cb, [1, 1, 1, 1], 0, eps=0.5)
        assert out.vectors[1].tolist() == [0.5, 0.5, 0.5, 0.5]

    @pytest.mark.parametrize("eps", [0.0, -0.1, 1.5])
    def test_eps_range(self, eps):
        with pytest.raises(ValueError):
            update_step(codebook(np.zeros((1, 2)), 1), [1, 1], 0, eps=eps)


class TestConfig:
    def test_epsilon_order(self):
        with pytest.raises(ConfigError):
            TrainConfig(epsilon_start=0.1, epsilon_end=0.5)
        with pytest.raises(ConfigError):
            TrainConfig(epsilon_start=1.5)
        with pytest.raises(ConfigError):
            TrainConfig(iterations=-1)

    def test_default_iterations(self):
        n = normalize(random_table(7, 3))
        assert TrainConfig().iterations_for(n) == 500

    def test_schedule(self):
        cfg = TrainConfig(epsilon_start=0.5, epsilon_end=0.01)
        eps = epsilon_schedule(cfg, 11)
        assert eps[0] == pytest.approx(0.5) and eps[-1] == pytest.approx(0.01)
        assert np.allclose(eps[1:] / eps[:-1], (0.01 / 0.5) ** 0.1)


class TestInit:
    def test_deterministic(self):
        n = normalize(random_table(8, 3))
        cfg = TrainConfig(seed=5, geometry=MapGeometry(3, 3))
        assert np.array_equal(init_codebook(n, cfg).vectors, init_codebook(n, cfg).vectors)

    def test_constant_table(self):
        n = raw(np.full((4, 3), 0.25))
        cb = init_codebook(n, TrainConfig(geometry=MapGeometry(3, 2)))
        assert np.allclose(cb.vectors, 0.25, atol=1e-15)

    def test_seeds_differ(self):
        n = normalize(random_table(8, 3))
        a = init_codebook(n, TrainConfig(seed=1, geometry=MapGeometry(3, 3)))
        b = init_codebook(n, TrainConfig(seed=2, geometry=MapGeometry(3, 3)))
        assert not np.array_equal(a.vectors, b.vectors)

    def test_inside_data_range(self):
        n = normalize(random_table(8, 3, seed=4))
        cb = init_codebook(n, TrainConfig(geometry=MapGeometry(4, 4)))
        s = n.values
        assert np.all(cb.row_part() >= s.min(axis=0) - 1e-15)
        assert np.all(cb.row_part() <= s.max(axis=0) + 1e-15)
        assert np.all(cb.col_part() >= s.min(axis=1) - 1e-15)
        assert np.all(cb.col_part() <= s.max(axis=1) + 1e-15)


class TestTrain:
    def test_zero_iterations(self):
        n = normalize(random_table(6, 3))
        cfg = TrainConfig(iterations=0, seed=3, geometry=MapGeometry(3, 3))
        assert np.array_equal(train(n, cfg).vectors, init_codebook(n, cfg).vectors)

    def test_single_step_replay(self):
        n = normalize(random_table(6, 3, seed=1))
        cfg = TrainConfig(iterations=1, seed=11, geometry=MapGeometry(3, 3))
        cb = init_codebook(n, cfg)
        _, draws = _streams(cfg.seed)
        i = int(draws.integers(6, size=1)[0])
        x = extend_row(n, i)
        expected = update_step(cb, x, winner(cb, x, FIRST_J), cfg.epsilon_start)
        assert np.allclose(train(n, cfg).vectors, expected.vectors, atol=1e-15)

    def test_two_step_replay(self):
        n = normalize(random_table(5, 4, seed=2))
        cfg = TrainConfig(iterations=2, epsilon_start=0.4, epsilon_end=0.1, seed=2,
                          geometry=MapGeometry(2, 3))
        cb = init_codebook(n, cfg)
        _, draws = _streams(cfg.seed)
        i = int(draws.integers(5, size=1)[0])
        j = int(draws.integers(4, size=1)[0])
        x = extend_row(n, i)
        cb = update_step(cb, x, winner(cb, x, FIRST_J), 0.4)
        y = extend_col(n, j)
        cb = update_step(cb, y, winner(cb, y, LAST_I), 0.1)
        assert np.allclose(train(n, cfg).vectors, cb.vectors, atol=1e-15)

    def test_deterministic(self):
        n = normalize(random_table(10, 4, seed=6))
        cfg = TrainConfig(seed=8, geometry=MapGeometry(4, 4))
        assert train(n, cfg).vectors.tobytes() == train(n, cfg).vectors.tobytes()

    def test_single_unit_stays_in_hull(self):
        n = normalize(random_table(6, 3, seed=7))
        cb = train(n, TrainConfig(iterations=400, geometry=MapGeometry(1, 1)))
        x = np.vstack([extend_row(n, i) for i in range(6)] + [extend_col(n, j) for j in range(3)])
        assert np.all(cb.vectors[0] >= x.min(axis=0) - 1e-12)
        assert np.all(cb.vectors[0] <= x.max(axis=0) + 1e-12)

    @settings(max_examples=15, deadline=None)
    @given(st.integers(0, 2**63))
    def test_convex_updates_stay_in_range(self, seed):
        n = normalize(random_table(7, 3, seed=seed % 1000))
        cfg = TrainConfig(iterations=200, seed=seed, geometry=MapGeometry(3, 3))
        start = init_codebook(n, cfg).vectors
        x = np.vstack([extend_row(n, i) for i in range(7)] + [extend_col(n, j) for j in range(3)])
        lo = np.minimum(x.min(axis=0), start.min(axis=0))
        hi = np.maximum(x.max(axis=0), start.max(axis=0))
        v = train(n, cfg).vectors
        assert np.all(v >= lo - 1e-12) and np.all(v <= hi + 1e-12)


class TestAssign:
    def test_exact_row_match(self):
        n = raw([[0.6, 0.2], [0.1, 0.7]])
        cb = codebook([[0.0, 0.0, 0.0, 0.0], [0.1, 0.7, 0.0, 0.0]], n_cols=2)
        assert assign_all(cb, n).row_units[1] == 1

    def test_identical_rows(self):
        n = raw([[0.3, 0.4], [0.3, 0.4], [0.9, 0.1]])
        cb = init_codebook(n, TrainConfig(geometry=MapGeometry(3, 3)))
        a = assign_all(cb, n)
        assert a.row_units[0] == a.row_units[1]

    def test_hand_codebook(self):
        n = normalize(ContingencyTable(("a", "b"), ("x", "y"), np.array([[3, 1], [1, 3]])))
        # normalized: [[0.75, 0.25], [0.25, 0.75]]
        cb = codebook([[0.7, 0.3, 0.2, 0.8], [0.3, 0.7, 0.8, 0.2]], n_cols=2)
        a = assign_all(cb, n)
        assert a.row_units.tolist() == [0, 1]
        # column x is (0.75, 0.25) on rows: last part closest to unit 1
        assert a.col_units.tolist() == [1, 0]

    def test_layout(self):
        n = raw([[0.6, 0.2], [0.1, 0.7]])
        cb = codebook([[0.6, 0.2, 0.6, 0.1], [0.1, 0.7, 0.2, 0.7]], n_cols=2)
        assert layout_of(assign_all(cb, n)) == [["r0", "c0"], ["r1", "c1"]]


def test_self_organization_on_two_blocks():
    """Same-block rows of a 20x4 two-block table end up in neighboring
    units in at least 80% of (pair, run) cases over 40 runs on a 5x5 map."""
    n = normalize(two_block_table())
    g = MapGeometry(5, 5)
    units = ensemble_units(n, TrainConfig(iterations=5000, seed=0, geometry=g), 40)
    xy = g.coords_array()
    close = []
    for u in units:
        for block in (range(0, 10), range(10, 20)):
            for a in block:
                for b in block:
                    if a < b:
                        close.append(np.abs(xy[u[a]] - xy[u[b]]).max() <= 1)
    assert np.mean(close) >= 0.80, f"only {np.mean(close):.1%} of same-block pairs were neighbors"
