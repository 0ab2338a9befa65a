"""Neighbor stability across an ensemble of KORRESP runs.

Two items are neighbors in a run when their units are at Chebyshev distance
at most one. Averaging that indicator over ``L`` independently seeded runs
gives the stability index of each pair, which is then tested against the
chance level ``9/U`` of a 3x3 neighborhood on a ``U``-unit map.
"""

from __future__ import annotations

import enum
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .contingency import NormalizedTable
from .errors import ItemSetMismatch, UnitCountTooSmall
from .korresp import Assignment, MapGeometry, TrainConfig, assign_all, train

DEFAULT_Z = 1.96


@dataclass(frozen=True, eq=False)
class StabilityMatrix:
    """``values[p, q]`` is the fraction of runs in which items p and q were
    neighbors. Items are the table rows followed by the table columns."""

    items: tuple[str, ...]
    values: np.ndarray
    runs: int
    geometry: MapGeometry
    n_rows: int

    def __post_init__(self):
        v = np.array(self.values, dtype=np.float64, copy=True)
        if v.shape != (len(self.items), len(self.items)):
            raise ValueError(f"matrix shape {v.shape} does not match {len(self.items)} items")
        v.setflags(write=False)
        object.__setattr__(self, "items", tuple(self.items))
        object.__setattr__(self, "values", v)

    def index(self, label: str) -> int:
        return self.items.index(label)


@dataclass(frozen=True)
class CriticalBounds:
    a: float
    b: float
    lower: float
    upper: float
    units: int
    runs: int
    z: float = DEFAULT_Z


class PairClass(enum.Enum):
    ATTRACT = "attract"
    FICKLE = "fickle"
    REPULSE = "repulse"


@dataclass(frozen=True, eq=False)
class FicklenessCounts:
    items: tuple[str, ...]
    counts: np.ndarray
    n_rows: int

    def as_dict(self) -> dict[str, int]:
        return {lab: int(c) for lab, c in zip(self.items, self.counts)}


@dataclass(frozen=True)
class FickleReport:
    theta: int
    counts: dict
    fickle_items: frozenset
    top_k: int | None = None
    ordered: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "theta": self.theta,
            "top_k": self.top_k,
            "counts": dict(self.counts),
            "fickle": list(self.ordered),
        }


@dataclass(frozen=True)
class MapEntry:
    label: str
    is_column: bool
    fickle: bool


@dataclass(frozen=True)
class RobustLayout:
    geometry: MapGeometry
    cells: tuple[tuple[MapEntry, ...], ...]

    def entries(self):
        for u, cell in enumerate(self.cells):
            for e in cell:
                yield u, e


# -- indicators and the ensemble ---------------------------------------------

def neighbor_indicator(a: Assignment, g: MapGeometry, p: int, q: int) -> int:
    units = a.units
    return int(g.chebyshev(int(units[p]), int(units[q])) <= 1)


def indicator_matrix(a: Assignment) -> np.ndarray:
    xy = a.geometry.coords_array()[a.units]
    d = np.abs(xy[:, None, :] - xy[None, :, :]).max(axis=2)
    return (d <= 1).astype(np.int64)


def _single_run(args) -> np.ndarray:
    n, cfg = args
    return assign_all(train(n, cfg), n).units


def ensemble_units(
    n: NormalizedTable, base_cfg: TrainConfig, runs: int, jobs: int = 1
) -> list[np.ndarray]:
    """Unit of every item (rows then columns) in each of ``runs`` maps
    trained with seeds ``base_cfg.seed + l``. ``jobs > 1`` trains in worker
    processes; the result does not depend on it."""
    if runs < 1:
        raise ValueError("runs must be >= 1")
    tasks = [(n, base_cfg.with_seed(base_cfg.seed + l)) for l in range(runs)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_single_run, tasks))
    return [_single_run(t) for t in tasks]


def stability_from_units(
    unit_sets, items, geometry: MapGeometry, n_rows: int
) -> StabilityMatrix:
    xy_all = geometry.coords_array()
    total = np.zeros((len(items), len(items)), dtype=np.int64)
    for units in unit_sets:
        xy = xy_all[units]
        total += np.abs(xy[:, None, :] - xy[None, :, :]).max(axis=2) <= 1
    return StabilityMatrix(
        items=tuple(items), values=total / len(unit_sets), runs=len(unit_sets),
        geometry=geometry, n_rows=n_rows,
    )


def run_ensemble(
    n: NormalizedTable, base_cfg: TrainConfig, runs: int, jobs: int = 1
) -> StabilityMatrix:
    """Average the neighbor indicators of :func:`ensemble_units`."""
    unit_sets = ensemble_units(n, base_cfg, runs, jobs)
    return stability_from_units(
        unit_sets, n.row_labels + n.col_labels, base_cfg.geometry, len(n.row_labels)
    )


# -- significance test -------------------------------------------------------

def critical_bounds(units: int, runs: int, z: float = DEFAULT_Z) -> CriticalBounds:
    """Non-rejection band of the binomial test for chance neighborhood.

    ``A = 9/U`` and ``B = z * sqrt(A (1 - A) / L)``; ``lower`` is floored at 0.
    """
    if units < 9:
        raise UnitCountTooSmall(f"map has {units} units; the 3x3 null model needs at least 9")
    if runs < 1:
        raise ValueError("runs must be >= 1")
    a = 9.0 / units
    b = z * math.sqrt(a * (1.0 - a) / runs)
    return CriticalBounds(a=a, b=b, lower=max(0.0, a - b), upper=a + b, units=units, runs=runs, z=z)


def classify_pair(m_ij: float, b: CriticalBounds) -> PairClass:
    if m_ij > b.upper:
        return PairClass.ATTRACT
    if m_ij < b.lower:
        return PairClass.REPULSE
    return PairClass.FICKLE


def classify_matrix(values: np.ndarray, b: CriticalBounds) -> np.ndarray:
    """Vectorized :func:`classify_pair`: +1 attract, 0 fickle, -1 repulse."""
    values = np.asarray(values)
    out = np.zeros(values.shape, dtype=np.int8)
    out[values > b.upper] = 1
    out[values < b.lower] = -1
    return out


def fickleness_counts(m: StabilityMatrix, b: CriticalBounds) -> FicklenessCounts:
    fickle = classify_matrix(m.values, b) == 0
    np.fill_diagonal(fickle, False)
    return FicklenessCounts(m.items, fickle.sum(axis=1).astype(np.int64), m.n_rows)


def fickle_words(
    counts: FicklenessCounts,
    theta: int | None = None,
    word_items_only: bool = True,
    top_k: int | None = None,
) -> FickleReport:
    """Select fickle items by threshold (``count >= theta``) or as the
    ``top_k`` largest counts, ties broken by label.

    In top-k mode the reported ``theta`` is the smallest selected count.
    """
    if (theta is None) == (top_k is None):
        raise ValueError("give exactly one of theta or top_k")
    eligible = range(counts.n_rows) if word_items_only else range(len(counts.items))
    eligible = list(eligible)
    ranked = sorted(eligible, key=lambda p: (-int(counts.counts[p]), counts.items[p]))
    if top_k is not None:
        if top_k < 0:
            raise ValueError("top_k must be >= 0")
        chosen = ranked[:top_k]
        eff_theta = int(counts.counts[chosen[-1]]) if chosen else int(counts.counts.max(initial=0)) + 1
    else:
        if theta < 0:
            raise ValueError("theta must be >= 0")
        chosen = [p for p in ranked if counts.counts[p] >= theta]
        eff_theta = int(theta)
    ordered = tuple(counts.items[p] for p in chosen)
    return FickleReport(
        theta=eff_theta,
        counts={counts.items[p]: int(counts.counts[p]) for p in eligible},
        fickle_items=frozenset(ordered),
        top_k=top_k,
        ordered=ordered,
    )


def robust_map(a: Assignment, report: FickleReport) -> RobustLayout:
    labels = a.labels
    unknown = report.fickle_items - set(labels)
    if unknown:
        raise ItemSetMismatch(f"fickle items not on the map: {sorted(unknown)}")
    cells: list[list[MapEntry]] = [[] for _ in range(a.geometry.units)]
    for p, (label, u) in enumerate(zip(labels, a.units)):
        cells[int(u)].append(MapEntry(label, a.is_column(p), label in report.fickle_items))
    return RobustLayout(a.geometry, tuple(tuple(c) for c in cells))
