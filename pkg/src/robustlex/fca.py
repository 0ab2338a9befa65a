"""Factorial correspondence analysis of a normalized contingency table."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .contingency import NormalizedTable
from .errors import AxisOutOfRange
from .jacobi import jacobi_eigh

ZERO_EIGENVALUE = 1e-12


@dataclass(frozen=True, eq=False)
class FactorModel:
    """Non-trivial CA factors with principal coordinates for rows and columns.

    ``eigenvalues``, ``row_coords``, ``col_coords`` and ``inertia_shares`` are
    the reported quantities (eigenvalues below ``1e-12`` are zeroed). The
    singular triples and masses are kept so the normalized matrix can be
    rebuilt exactly by :meth:`reconstruct`.
    """

    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    eigenvalues: np.ndarray
    row_coords: np.ndarray
    col_coords: np.ndarray
    inertia_shares: np.ndarray
    total_inertia: float
    singular_values: np.ndarray
    row_vectors: np.ndarray
    col_vectors: np.ndarray
    row_mass: np.ndarray
    col_mass: np.ndarray

    @property
    def rank(self) -> int:
        return len(self.eigenvalues)

    def reconstruct(self) -> np.ndarray:
        """Rebuild the normalized table from trivial and non-trivial triples."""
        trivial = np.outer(np.sqrt(self.row_mass), np.sqrt(self.col_mass))
        return trivial + (self.row_vectors * self.singular_values) @ self.col_vectors.T


def _masses(n: NormalizedTable) -> tuple[np.ndarray, np.ndarray]:
    if n.row_totals is not None:
        r = np.asarray(n.row_totals, dtype=np.float64)
        c = np.asarray(n.col_totals, dtype=np.float64)
        return r / r.sum(), c / c.sum()
    # Without stored totals the margins are read off the dominant singular
    # pair, which is exact unless the table is block-diagonal.
    s = n.values
    vals, vecs = jacobi_eigh(s.T @ s)
    w = np.abs(vecs[:, int(np.argmax(vals))])
    c = w * w
    r = (s @ w) ** 2
    return r / r.sum(), c / c.sum()


def _complement_basis(w: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the hyperplane orthogonal to unit vector ``w``."""
    m = len(w)
    u = w.copy()
    u[0] += 1.0 if w[0] >= 0 else -1.0
    h = np.eye(m) - 2.0 * np.outer(u, u) / (u @ u)
    return h[:, 1:]


def _column_side(s: np.ndarray, r: np.ndarray, c: np.ndarray):
    """Solve on the column cross-product; assumes s has no more columns than rows."""
    q = _complement_basis(np.sqrt(c))
    sq = s @ q
    vals, w = jacobi_eigh(sq.T @ sq)
    order = np.argsort(-vals, kind="stable")
    vals = np.clip(vals[order], 0.0, None)
    v = q @ w[:, order]
    sigma = np.sqrt(vals)
    sv = s @ v  # equals Z v since v is orthogonal to sqrt(c)
    u = np.zeros_like(sv)
    nz = sigma > 0
    u[:, nz] = sv[:, nz] / sigma[nz]
    return vals, sigma, u, v, sv


def decompose(n: NormalizedTable) -> FactorModel:
    s = n.values
    n_rows, n_cols = s.shape
    r, c = _masses(n)
    if n_cols <= n_rows:
        vals, sigma, u, v, sv = _column_side(s, r, c)
        row_std_scaled = sv
        col_std_scaled = v * sigma
    else:
        vals, sigma, v, u, su = _column_side(s.T, c, r)
        row_std_scaled = u * sigma
        col_std_scaled = su

    reported = np.where(vals < ZERO_EIGENVALUE, 0.0, vals)
    live = reported > 0
    row_coords = np.where(live, row_std_scaled / np.sqrt(r)[:, None], 0.0)
    col_coords = np.where(live, col_std_scaled / np.sqrt(c)[:, None], 0.0)

    # sign: the largest-magnitude coordinate of each factor is positive
    for k in range(len(vals)):
        joint = np.concatenate([row_coords[:, k], col_coords[:, k]])
        if not joint.size:
            continue
        pivot = joint[int(np.argmax(np.abs(joint)))]
        if pivot < 0:
            row_coords[:, k] *= -1
            col_coords[:, k] *= -1
            u[:, k] *= -1
            v[:, k] *= -1

    total = float(reported.sum())
    shares = reported / total if total > 0 else np.zeros_like(reported)
    return FactorModel(
        row_labels=n.row_labels,
        col_labels=n.col_labels,
        eigenvalues=reported,
        row_coords=row_coords,
        col_coords=col_coords,
        inertia_shares=shares,
        total_inertia=total,
        singular_values=sigma,
        row_vectors=u,
        col_vectors=v,
        row_mass=r,
        col_mass=c,
    )


def center_distances(m: FactorModel, axis: str = "rows") -> np.ndarray:
    """Squared distance to the origin over all retained factors."""
    if axis in ("rows", "row"):
        coords = m.row_coords
    elif axis in ("cols", "col", "columns"):
        coords = m.col_coords
    else:
        raise ValueError(f"axis must be 'rows' or 'cols', not {axis!r}")
    return np.sum(coords * coords, axis=1)


@dataclass(frozen=True)
class PlanarProjection:
    axes: tuple[int, int]
    row_labels: tuple[str, ...]
    col_labels: tuple[str, ...]
    rows: np.ndarray
    cols: np.ndarray
    shares: tuple[float, float]


def project(m: FactorModel, axes=(0, 1)) -> PlanarProjection:
    a, b = (int(x) for x in axes)
    for k in (a, b):
        if not 0 <= k < m.rank:
            raise AxisOutOfRange(f"factor {k} out of range (model has {m.rank} factors)")
    return PlanarProjection(
        axes=(a, b),
        row_labels=m.row_labels,
        col_labels=m.col_labels,
        rows=m.row_coords[:, [a, b]],
        cols=m.col_coords[:, [a, b]],
        shares=(float(m.inertia_shares[a]), float(m.inertia_shares[b])),
    )
