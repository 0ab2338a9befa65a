"""KORRESP: a Kohonen map that classifies the rows and the columns of a
normalized contingency table on the same rectangular grid.

Code-vectors have ``J + I`` components. The first ``J`` live in row space
(profiles of words over documents), the last ``I`` in column space. A drawn
row ``i`` is extended with its most probable column ``j(i)`` and matched on
the first ``J`` components; a drawn column ``j`` is extended with its most
probable row ``i(j)`` and matched on the last ``I`` components. Either way
the whole ``J + I`` vector is pulled toward the input.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contingency import NormalizedTable
from .errors import ConfigError

FIRST_J = "first_J"
LAST_I = "last_I"

_SEED_MASK = (1 << 64) - 1


@dataclass(frozen=True)
class MapGeometry:
    """Rectangular grid; unit ``u`` sits at ``(u % width, u // width)``."""

    width: int = 10
    height: int = 10

    def __post_init__(self):
        if int(self.width) < 1 or int(self.height) < 1:
            raise ConfigError(f"grid must be at least 1x1, got {self.width}x{self.height}")

    @property
    def units(self) -> int:
        return self.width * self.height

    def coords(self, u: int) -> tuple[int, int]:
        return u % self.width, u // self.width

    def unit(self, x: int, y: int) -> int:
        return y * self.width + x

    def coords_array(self) -> np.ndarray:
        u = np.arange(self.units)
        return np.stack([u % self.width, u // self.width], axis=1)

    def chebyshev(self, u: int, v: int) -> int:
        (x0, y0), (x1, y1) = self.coords(u), self.coords(v)
        return max(abs(x0 - x1), abs(y0 - y1))

    def neighbor_lists(self) -> list[np.ndarray]:
        xy = self.coords_array()
        d = np.abs(xy[:, None, :] - xy[None, :, :]).max(axis=2)
        return [np.flatnonzero(row <= 1) for row in d]

    @classmethod
    def parse(cls, text: str) -> "MapGeometry":
        try:
            w, h = text.lower().split("x")
            return cls(int(w), int(h))
        except ValueError:
            raise ConfigError(f"grid must look like WxH, got {text!r}") from None


@dataclass(frozen=True)
class TrainConfig:
    """Online training parameters.

    ``iterations=None`` means ``50 * (I + J)`` for the table being trained.
    """

    iterations: int | None = None
    epsilon_start: float = 0.5
    epsilon_end: float = 0.01
    seed: int = 0
    geometry: MapGeometry = field(default_factory=MapGeometry)

    def __post_init__(self):
        if self.iterations is not None and int(self.iterations) < 0:
            raise ConfigError("iterations must be nonnegative")
        if not 0 < self.epsilon_end <= self.epsilon_start <= 1:
            raise ConfigError(
                "need 0 < epsilon_end <= epsilon_start <= 1, got "
                f"{self.epsilon_start}, {self.epsilon_end}"
            )

    def iterations_for(self, n: NormalizedTable) -> int:
        if self.iterations is not None:
            return int(self.iterations)
        return 50 * (n.shape[0] + n.shape[1])

    def with_seed(self, seed: int) -> "TrainConfig":
        return TrainConfig(self.iterations, self.epsilon_start, self.epsilon_end, seed, self.geometry)


@dataclass(frozen=True, eq=False)
class Codebook:
    geometry: MapGeometry
    vectors: np.ndarray
    n_cols: int

    def __post_init__(self):
        v = np.array(self.vectors, dtype=np.float64, copy=True)
        if v.ndim != 2 or v.shape[0] != self.geometry.units:
            raise ValueError(f"expected {self.geometry.units} code-vectors, got shape {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("code-vectors must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    def row_part(self) -> np.ndarray:
        return self.vectors[:, : self.n_cols]

    def col_part(self) -> np.ndarray:
        return self.vectors[:, self.n_cols :]


@dataclass(frozen=True, eq=False)
class Assignment:
    geometry: MapGeometry
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    row_units: np.ndarray
    col_units: np.ndarray

    @property
    def labels(self) -> tuple[str, ...]:
        return self.row_labels + self.col_labels

    @property
    def units(self) -> np.ndarray:
        return np.concatenate([self.row_units, self.col_units]).astype(np.int64)

    def is_column(self, index: int) -> bool:
        return index >= len(self.row_labels)


# -- row / column association ------------------------------------------------

def associate_row(n: NormalizedTable, i: int) -> int:
    """Most probable column of row ``i`` (first one on ties)."""
    return int(np.argmax(n.values[i, :]))


def associate_col(n: NormalizedTable, j: int) -> int:
    return int(np.argmax(n.values[:, j]))


def extend_row(n: NormalizedTable, i: int) -> np.ndarray:
    return np.concatenate([n.values[i, :], n.values[:, associate_row(n, i)]])


def extend_col(n: NormalizedTable, j: int) -> np.ndarray:
    return np.concatenate([n.values[associate_col(n, j), :], n.values[:, j]])


def extended_tables(n: NormalizedTable) -> tuple[np.ndarray, np.ndarray]:
    """All extended row vectors ``X`` (I rows) and column vectors ``Y`` (J rows)."""
    s = n.values
    j_of_i = np.argmax(s, axis=1)
    i_of_j = np.argmax(s, axis=0)
    x = np.hstack([s, s[:, j_of_i].T])
    y = np.hstack([s[i_of_j, :], s.T])
    return x, y


# -- map mechanics -----------------------------------------------------------

def _slice(part: str, n_cols: int) -> slice:
    if part == FIRST_J:
        return slice(0, n_cols)
    if part == LAST_I:
        return slice(n_cols, None)
    raise ValueError(f"part must be {FIRST_J!r} or {LAST_I!r}, not {part!r}")


def winner(cb: Codebook, v, part: str = FIRST_J) -> int:
    sl = _slice(part, cb.n_cols)
    diff = cb.vectors[:, sl] - np.asarray(v, dtype=np.float64)[sl]
    return int(np.argmin(np.einsum("ij,ij->i", diff, diff)))


def neighborhood_sigma(g: MapGeometry, u: int, u0: int) -> int:
    return int(g.chebyshev(u, u0) <= 1)


def update_step(cb: Codebook, v, u0: int, eps: float) -> Codebook:
    if not 0 < eps <= 1:
        raise ValueError(f"eps must be in (0, 1], got {eps}")
    v = np.asarray(v, dtype=np.float64)
    vectors = np.array(cb.vectors)
    for u in range(cb.geometry.units):
        if neighborhood_sigma(cb.geometry, u, u0):
            vectors[u] += eps * (v - vectors[u])
    return Codebook(cb.geometry, vectors, cb.n_cols)


def _streams(seed: int) -> tuple[np.random.Generator, np.random.Generator]:
    entropy = int(seed) & _SEED_MASK
    init = np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=(0,)))
    draws = np.random.default_rng(np.random.SeedSequence(entropy, spawn_key=(1,)))
    return init, draws


def init_codebook(n: NormalizedTable, cfg: TrainConfig) -> Codebook:
    """Each code-vector starts as a random convex combination of two rows
    (first ``J`` part) and of two columns (last ``I`` part)."""
    s = n.values
    n_rows, n_cols = s.shape
    units = cfg.geometry.units
    rng, _ = _streams(cfg.seed)
    ra = rng.integers(n_rows, size=units)
    rb = rng.integers(n_rows, size=units)
    wr = rng.random(units)[:, None]
    ca = rng.integers(n_cols, size=units)
    cb_ = rng.integers(n_cols, size=units)
    wc = rng.random(units)[:, None]
    first = wr * s[ra, :] + (1.0 - wr) * s[rb, :]
    last = wc * s[:, ca].T + (1.0 - wc) * s[:, cb_].T
    return Codebook(cfg.geometry, np.hstack([first, last]), n_cols)


def epsilon_schedule(cfg: TrainConfig, iterations: int) -> np.ndarray:
    if iterations == 0:
        return np.zeros(0)
    if iterations == 1:
        return np.array([cfg.epsilon_start])
    t = np.arange(iterations) / (iterations - 1)
    return cfg.epsilon_start * (cfg.epsilon_end / cfg.epsilon_start) ** t


def train(n: NormalizedTable, cfg: TrainConfig) -> Codebook:
    """Online KORRESP training.

    Even iterations present a uniformly drawn row, odd iterations a
    uniformly drawn column. The neighborhood is the fixed 3x3 block around
    the winner and the learning rate decays geometrically from
    ``epsilon_start`` to ``epsilon_end``. Initialization and draws use two
    independent streams derived from ``cfg.seed``.
    """
    cb = init_codebook(n, cfg)
    iterations = cfg.iterations_for(n)
    if iterations == 0:
        return cb
    n_rows, n_cols = n.shape
    x_all, y_all = extended_tables(n)
    _, rng = _streams(cfg.seed)
    row_draws = rng.integers(n_rows, size=(iterations + 1) // 2)
    col_draws = rng.integers(n_cols, size=iterations // 2)
    eps = epsilon_schedule(cfg, iterations)
    neighbors = cfg.geometry.neighbor_lists()

    w = np.array(cb.vectors)
    w_rows = w[:, :n_cols]
    w_cols = w[:, n_cols:]
    for t in range(iterations):
        if t % 2 == 0:
            v = x_all[row_draws[t // 2]]
            d = w_rows - v[:n_cols]
        else:
            v = y_all[col_draws[t // 2]]
            d = w_cols - v[n_cols:]
        u0 = int(np.argmin(np.einsum("ij,ij->i", d, d)))
        nb = neighbors[u0]
        w[nb] += eps[t] * (v - w[nb])
    return Codebook(cfg.geometry, w, n_cols)


def assign_all(cb: Codebook, n: NormalizedTable) -> Assignment:
    x_all, y_all = extended_tables(n)
    n_cols = cb.n_cols

    def nearest(inputs, sl):
        d = inputs[:, None, sl] - cb.vectors[None, :, sl]
        return np.argmin(np.einsum("kuj,kuj->ku", d, d), axis=1)

    return Assignment(
        geometry=cb.geometry,
        row_labels=n.row_labels,
        col_labels=n.col_labels,
        row_units=nearest(x_all, slice(0, n_cols)),
        col_units=nearest(y_all, slice(n_cols, None)),
    )


def layout_of(a: Assignment) -> list[list[str]]:
    """Labels held by each unit, rows before columns, in table order."""
    cells: list[list[str]] = [[] for _ in range(a.geometry.units)]
    for label, u in zip(a.labels, a.units):
        cells[int(u)].append(label)
    return cells
