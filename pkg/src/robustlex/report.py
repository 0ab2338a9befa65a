"""File exports: delimited tables, JSON, DOT and hand-written SVG."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable
from xml.sax.saxutils import escape, quoteattr

import numpy as np

from .cliquegraph import NeighborGraph, QuasiCliquePartition
from .contingency import CorpusStats
from .errors import ItemSetMismatch
from .fca import FactorModel, center_distances, project
from .korresp import Assignment, MapGeometry
from .stability import (
    CriticalBounds,
    FicklenessCounts,
    FickleReport,
    StabilityMatrix,
    classify_matrix,
)

_CLASS_NAMES = {1: "attract", 0: "fickle", -1: "repulse"}


def _write(path, text: str) -> Path:
    path = Path(path)
    path.write_text(text, encoding="utf-8", newline="\n")
    return path


def _fmt(x: float, digits: int = 6) -> str:
    s = f"{x:.{digits}f}"
    return "0." + "0" * digits if s == "-0." + "0" * digits else s


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False, sort_keys=False) + "\n"


# -- tables ------------------------------------------------------------------

def corpus_stats_csv(stats: CorpusStats) -> str:
    lines = ["document,occurrences,distinct_words,hapax"]
    for d in stats.documents:
        lines.append(f"{d.label},{d.occurrences},{d.distinct_words},{d.hapax}")
    return "\n".join(lines) + "\n"


def factors_csv(model: FactorModel) -> str:
    header = ["label"] + [f"factor_{k + 1}" for k in range(model.rank)]
    lines = [",".join(header)]
    for lab, row in zip(model.row_labels + model.col_labels,
                        np.vstack([model.row_coords, model.col_coords])):
        lines.append(",".join([lab] + [_fmt(v, 10) for v in row]))
    return "\n".join(lines) + "\n"


def eigenvalues_csv(model: FactorModel) -> str:
    lines = ["factor,eigenvalue,share"]
    for k, (lam, share) in enumerate(zip(model.eigenvalues, model.inertia_shares)):
        lines.append(f"{k + 1},{_fmt(lam, 12)},{_fmt(share, 8)}")
    return "\n".join(lines) + "\n"


def stability_csv(m: StabilityMatrix) -> str:
    lines = ["item," + ",".join(m.items)]
    for lab, row in zip(m.items, m.values):
        lines.append(lab + "," + ",".join(_fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def read_stability_csv(path, runs: int, geometry: MapGeometry, n_rows: int | None = None) -> StabilityMatrix:
    """Load a matrix written by :func:`stability_csv` (or transcribed by hand)."""
    lines = [ln for ln in Path(path).read_text(encoding="utf-8-sig").splitlines() if ln.strip()]
    items = [f.strip() for f in lines[0].split(",")[1:]]
    values = []
    for ln in lines[1:]:
        fields = [f.strip() for f in ln.split(",")]
        values.append([float(f) for f in fields[1:]])
    if [ln.split(",")[0].strip() for ln in lines[1:]] != items:
        raise ItemSetMismatch("row labels must repeat the header labels in order")
    return StabilityMatrix(tuple(items), np.array(values), runs, geometry,
                           len(items) if n_rows is None else n_rows)


def pairs_csv(m: StabilityMatrix, b: CriticalBounds) -> str:
    classes = classify_matrix(m.values, b)
    lines = ["item_a,item_b,M,class"]
    k = len(m.items)
    for p in range(k):
        for q in range(p + 1, k):
            lines.append(f"{m.items[p]},{m.items[q]},{_fmt(m.values[p, q])},"
                         f"{_CLASS_NAMES[int(classes[p, q])]}")
    return "\n".join(lines) + "\n"


def fickle_json(report: FickleReport) -> str:
    return dump_json(report.to_json())


# -- map layout --------------------------------------------------------------

def _cell_token(label: str, is_column: bool, fickle: bool) -> str:
    tok = label.upper() if is_column else label
    if is_column:
        tok = f"*{tok}*"
    return f"[{tok}]" if fickle else tok


def export_map_text(a: Assignment, fickle: Iterable[str] = ()) -> tuple[str, dict]:
    """Grid rendering of a map plus its JSON twin.

    Texts (columns) are upper-cased and starred, fickle items bracketed.
    Grid rows are map rows ``y = 0 .. height-1``; cells are ``|``-separated.
    """
    fickle = set(fickle)
    g = a.geometry
    cells: list[list[str]] = [[] for _ in range(g.units)]
    units_json = [{"unit": u, "x": g.coords(u)[0], "y": g.coords(u)[1], "items": []}
                  for u in range(g.units)]
    for p, (label, u) in enumerate(zip(a.labels, a.units)):
        col = a.is_column(p)
        cells[int(u)].append(_cell_token(label, col, label in fickle))
        units_json[int(u)]["items"].append(
            {"label": label, "kind": "text" if col else "word", "fickle": label in fickle}
        )
    text_cells = [", ".join(c) for c in cells]
    widths = [max(len(text_cells[g.unit(x, y)]) for y in range(g.height)) for x in range(g.width)]
    lines = []
    for y in range(g.height):
        row = [text_cells[g.unit(x, y)].ljust(widths[x]) for x in range(g.width)]
        lines.append(("| " + " | ".join(row) + " |").rstrip())
    doc = {"width": g.width, "height": g.height, "units": units_json}
    return "\n".join(lines) + "\n", doc


# -- graphs ------------------------------------------------------------------

def _dot_id(label: str) -> str:
    return '"' + label.replace("\\", "\\\\").replace('"', '\\"') + '"'


def export_dot(g: NeighborGraph, fickle: Iterable[str] = (), name: str = "neighborhood") -> str:
    fickle = set(fickle)
    lines = [f"graph {name} {{", "  node [shape=ellipse];"]
    for lab in g.vertices:
        flag = "true" if lab in fickle else "false"
        lines.append(f"  {_dot_id(lab)} [fickle={flag}];")
    for u, v in g.edges():
        attr = "" if g.weights is None else f" [weight={_fmt(g.weights[u, v])}]"
        lines.append(f"  {_dot_id(g.vertices[u])} -- {_dot_id(g.vertices[v])}{attr};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def partition_json(p: QuasiCliquePartition, g: NeighborGraph) -> str:
    return dump_json(p.labeled(g))


# -- SVG ---------------------------------------------------------------------

@dataclass(frozen=True)
class PlotFrame:
    """Affine map from data to SVG user units: ``X = tx + scale * x``,
    ``Y = ty - scale_y * y``."""

    scale: float
    scale_y: float
    tx: float
    ty: float

    def to_svg(self, x: float, y: float) -> tuple[float, float]:
        return self.tx + self.scale * x, self.ty - self.scale_y * y

    @classmethod
    def fit(cls, xs, ys, size=(640.0, 640.0), margin=48.0, equal=True) -> "PlotFrame":
        xs = np.asarray(list(xs), dtype=float)
        ys = np.asarray(list(ys), dtype=float)
        x0, x1 = (float(xs.min()), float(xs.max())) if xs.size else (0.0, 1.0)
        y0, y1 = (float(ys.min()), float(ys.max())) if ys.size else (0.0, 1.0)
        dx = (x1 - x0) or 1.0
        dy = (y1 - y0) or 1.0
        sx = (size[0] - 2 * margin) / dx
        sy = (size[1] - 2 * margin) / dy
        if equal:
            sx = sy = min(sx, sy)
        tx = margin - sx * x0 + ((size[0] - 2 * margin) - sx * dx) / 2
        ty = margin + sy * y1 + ((size[1] - 2 * margin) - sy * dy) / 2
        return cls(sx, sy, tx, ty)


def _svg_open(width: float, height: float, frame: PlotFrame, title: str) -> list[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}" font-family="sans-serif" font-size="10">',
        f"<title>{escape(title)}</title>",
        f'<g id="plot" data-scale="{frame.scale:.10g}" data-scale-y="{frame.scale_y:.10g}" '
        f'data-tx="{frame.tx:.10g}" data-ty="{frame.ty:.10g}">',
    ]


def export_factors_svg(model: FactorModel, axes=(0, 1), fickle: Iterable[str] = (),
                       size: float = 640.0) -> str:
    """Factor plane with words as dots (filled when fickle, hollow
    otherwise) and texts as framed labels."""
    plane = project(model, axes)
    fickle = set(fickle)
    pts = np.vstack([plane.rows, plane.cols, [[0.0, 0.0]]])
    frame = PlotFrame.fit(pts[:, 0], pts[:, 1], (size, size))
    a, b = plane.axes
    title = (f"Factor {a + 1} ({100 * plane.shares[0]:.2f}%) x "
             f"Factor {b + 1} ({100 * plane.shares[1]:.2f}%)")
    out = _svg_open(size, size, frame, title)
    ox, oy = frame.to_svg(0.0, 0.0)
    out.append(f'<line x1="0" y1="{oy:.4f}" x2="{size:g}" y2="{oy:.4f}" stroke="gray" stroke-dasharray="3,3"/>')
    out.append(f'<line x1="{ox:.4f}" y1="0" x2="{ox:.4f}" y2="{size:g}" stroke="gray" stroke-dasharray="3,3"/>')
    for lab, (x, y) in zip(plane.row_labels, plane.rows):
        sx, sy = frame.to_svg(x, y)
        is_fickle = lab in fickle
        fill = "black" if is_fickle else "none"
        out.append(
            f'<circle class="word{" fickle" if is_fickle else ""}" cx="{sx:.4f}" cy="{sy:.4f}" r="3" '
            f'fill="{fill}" stroke="black" data-label={quoteattr(lab)}/>'
        )
        if is_fickle:
            out.append(f'<text x="{sx + 4:.4f}" y="{sy - 4:.4f}">{escape(lab)}</text>')
    for lab, (x, y) in zip(plane.col_labels, plane.cols):
        sx, sy = frame.to_svg(x, y)
        w = 6.5 * len(lab) + 6
        out.append(
            f'<g class="text" data-label={quoteattr(lab)} data-x="{sx:.4f}" data-y="{sy:.4f}">'
            f'<rect x="{sx - w / 2:.4f}" y="{sy - 8:.4f}" width="{w:.4f}" height="14" '
            f'fill="white" stroke="black"/>'
            f'<text x="{sx:.4f}" y="{sy + 3:.4f}" text-anchor="middle" font-weight="bold">'
            f"{escape(lab)}</text></g>"
        )
    out.append("</g>")
    out.append(f'<text x="{size / 2:g}" y="{size - 8:g}" text-anchor="middle">'
               f"Factor {a + 1} ({100 * plane.shares[0]:.2f}%)</text>")
    out.append(f'<text x="12" y="{size / 2:g}" transform="rotate(-90 12 {size / 2:g})" '
               f'text-anchor="middle">Factor {b + 1} ({100 * plane.shares[1]:.2f}%)</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- fickleness versus distance to the center --------------------------------

@dataclass(frozen=True)
class FicklenessDistance:
    labels: tuple[str, ...]
    fickle_pairs: np.ndarray
    sq_distance: np.ndarray
    correlation: float
    note: str


def pearson(x, y) -> float:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.size < 2:
        return math.nan
    dx, dy = x - x.mean(), y - y.mean()
    sxx, syy = float(dx @ dx), float(dy @ dy)
    if sxx <= 0 or syy <= 1e-24:
        return math.nan
    return float(dx @ dy) / math.sqrt(sxx * syy)


def fickleness_distance_report(model: FactorModel, counts: FicklenessCounts) -> FicklenessDistance:
    """Pair each word's fickle-pair count with its squared distance to the
    FCA origin, and correlate the two."""
    words = counts.items[: counts.n_rows]
    if tuple(words) != tuple(model.row_labels):
        raise ItemSetMismatch("fickleness counts and factor model cover different words")
    fp = np.asarray(counts.counts[: counts.n_rows])
    dist = center_distances(model, "rows")
    r = pearson(fp, dist)
    if math.isnan(r):
        note = "correlation undefined: one of the columns has zero variance"
    else:
        note = ""
    return FicklenessDistance(tuple(words), fp, dist, r, note)


def fickleness_distance_csv(rep: FicklenessDistance) -> str:
    lines = ["label,fickle_pairs,sq_distance"]
    for lab, c, d in zip(rep.labels, rep.fickle_pairs, rep.sq_distance):
        lines.append(f"{lab},{int(c)},{_fmt(d, 10)}")
    return "\n".join(lines) + "\n"


def fickleness_distance_svg(rep: FicklenessDistance, size=(640.0, 480.0)) -> str:
    frame = PlotFrame.fit(np.append(rep.fickle_pairs, 0), np.append(rep.sq_distance, 0.0),
                          size, equal=False)
    r = "NaN" if math.isnan(rep.correlation) else f"{rep.correlation:.4f}"
    out = _svg_open(size[0], size[1], frame, f"fickle pairs vs squared distance to origin (r = {r})")
    for lab, c, d in zip(rep.labels, rep.fickle_pairs, rep.sq_distance):
        sx, sy = frame.to_svg(float(c), float(d))
        out.append(f'<circle cx="{sx:.4f}" cy="{sy:.4f}" r="2.5" fill="black" '
                   f"data-label={quoteattr(lab)}/>")
    out.append("</g>")
    out.append(f'<text x="{size[0] / 2:g}" y="{size[1] - 8:g}" text-anchor="middle">'
               f"number of fickle pairs</text>")
    out.append(f'<text x="12" y="{size[1] / 2:g}" transform="rotate(-90 12 {size[1] / 2:g})" '
               f'text-anchor="middle">squared distance to origin</text>')
    out.append(f'<text x="{size[0] - 10:g}" y="16" text-anchor="end">r = {r}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def seriation_csv(values: np.ndarray, labels, order) -> str:
    """The matrix with rows and columns permuted by ``order``."""
    ordered = [labels[k] for k in order]
    lines = ["item," + ",".join(ordered)]
    for k in order:
        lines.append(labels[k] + "," + ",".join(_fmt(values[k, q]) for q in order))
    return "\n".join(lines) + "\n"
