"""End-to-end pipeline: configuration, stages, exports and the manifest."""

from __future__ import annotations

import contextlib
import dataclasses
import hashlib
import math
from dataclasses import dataclass, fields
from pathlib import Path

from . import report
from .cliquegraph import bertin_seriation, build_graph, glutton_decomposition
from .contingency import (
    ContingencyTable,
    corpus_stats,
    load_long_csv,
    load_matrix_csv,
    normalize,
    top_k_filter,
    validate,
    write_matrix_csv,
)
from .errors import ConfigError, RobustLexError
from .fca import decompose
from .korresp import Assignment, MapGeometry, TrainConfig
from .stability import (
    DEFAULT_Z,
    critical_bounds,
    ensemble_units,
    fickle_words,
    fickleness_counts,
    stability_from_units,
)

FORMATS = ("matrix", "long")
MANIFEST = "manifest.json"


@dataclass
class PipelineConfig:
    """Every knob of a run. Unset optional fields take the consuming
    module's default (e.g. ``iterations=None`` is ``50 * (I + J)``)."""

    input: str = ""
    format: str = "matrix"
    top_k: int | None = None
    grid: str = "10x10"
    iterations: int | None = None
    epsilon_start: float = 0.5
    epsilon_end: float = 0.01
    runs: int = 40
    seed: int = 0
    theta: int | None = None
    top_fickle: int | None = 30
    z: float = DEFAULT_Z
    out: str = "out"
    jobs: int = 1
    figures: bool = True

    def validate(self) -> "PipelineConfig":
        if not self.input:
            raise ConfigError("no input file given")
        if self.format not in FORMATS:
            raise ConfigError(f"format must be one of {FORMATS}, got {self.format!r}")
        if self.top_k is not None and self.top_k < 1:
            raise ConfigError("top_k must be >= 1")
        if self.runs < 1:
            raise ConfigError("runs must be >= 1")
        if self.jobs < 1:
            raise ConfigError("jobs must be >= 1")
        if not self.z > 0:
            raise ConfigError("z must be positive")
        if self.theta is not None and self.theta < 0:
            raise ConfigError("theta must be >= 0")
        if self.theta is None and (self.top_fickle is None or self.top_fickle < 0):
            raise ConfigError("need theta >= 0 or top_fickle >= 0")
        self.geometry()
        self.train_config()
        return self

    def geometry(self) -> MapGeometry:
        return MapGeometry.parse(self.grid)

    def train_config(self) -> TrainConfig:
        return TrainConfig(self.iterations, self.epsilon_start, self.epsilon_end,
                           self.seed, self.geometry())

    def fickle_selection(self) -> dict:
        if self.theta is not None:
            return {"theta": self.theta}
        return {"top_k": self.top_fickle}

    def echo(self) -> dict:
        return dataclasses.asdict(self)

    def updated(self, **overrides) -> "PipelineConfig":
        """Copy with the non-None ``overrides`` applied. Giving ``theta``
        clears ``top_fickle`` and vice versa."""
        overrides = {k: v for k, v in overrides.items() if v is not None}
        if "theta" in overrides:
            overrides.setdefault("top_fickle", None)
        elif "top_fickle" in overrides:
            overrides["theta"] = None
        return dataclasses.replace(self, **overrides)


def _coerce(name: str, raw: str, kind) -> object:
    text = raw.strip()
    kind = str(kind)
    if text.lower() in ("none", "") and "None" in kind:
        return None
    try:
        if kind.startswith("bool"):
            if text.lower() in ("1", "true", "yes", "on"):
                return True
            if text.lower() in ("0", "false", "no", "off"):
                return False
            raise ValueError(text)
        if kind.startswith("int"):
            return int(text)
        if kind.startswith("float"):
            return float(text)
    except ValueError:
        raise ConfigError(f"config key {name!r}: cannot read {raw!r} as {kind}") from None
    return text


def load_config(path, base: PipelineConfig | None = None) -> PipelineConfig:
    """Read flat ``key = value`` lines; ``#`` starts a comment. Keys are the
    :class:`PipelineConfig` field names (dashes allowed)."""
    types = {f.name: f.type for f in fields(PipelineConfig)}
    values = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value")
        key, raw = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in types:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        values[key] = _coerce(key, raw, types[key])
    cfg = base or PipelineConfig()
    theta_given = "theta" in values
    cfg = dataclasses.replace(cfg, **values)
    if theta_given and values["theta"] is not None and "top_fickle" not in values:
        cfg.top_fickle = None
    return cfg


# -- stages ------------------------------------------------------------------

@contextlib.contextmanager
def stage(name: str):
    """Tag any library error raised inside with the stage it came from."""
    try:
        yield
    except RobustLexError as exc:
        if getattr(exc, "stage", None) is None:
            exc.stage = name
        raise


def load_table(path, fmt: str = "matrix", top_k: int | None = None) -> ContingencyTable:
    if fmt not in FORMATS:
        raise ConfigError(f"format must be one of {FORMATS}, got {fmt!r}")
    try:
        t = load_matrix_csv(path) if fmt == "matrix" else load_long_csv(path)
    except OSError as exc:
        raise ConfigError(f"cannot read input {path}: {exc}") from None
    return top_k_filter(t, top_k) if top_k else t


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _num(x: float):
    x = float(x)
    return None if math.isnan(x) else round(x, 12)


class _Outputs:
    def __init__(self, root: Path):
        self.root = root
        self.names: list[str] = []

    def text(self, name: str, content: str) -> Path:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        report._write(path, content)
        self.names.append(name)
        return path

    def figure(self, name: str, draw, *args, **kwargs) -> Path:
        path = self.root / name
        path.parent.mkdir(parents=True, exist_ok=True)
        draw(*args, path=path, **kwargs)
        self.names.append(name)
        return path


def run_pipeline(cfg: PipelineConfig) -> dict:
    """Run every stage and write the artifacts plus ``manifest.json`` into
    ``cfg.out``. Returns the manifest."""
    with stage("config"):
        cfg.validate()
    root = Path(cfg.out)
    root.mkdir(parents=True, exist_ok=True)
    out = _Outputs(root)
    summary: dict = {}

    with stage("ingest"):
        table = load_table(cfg.input, cfg.format, cfg.top_k)
    with stage("validate"):
        validate(table)
        stats = corpus_stats(table)
        write_matrix_csv(table, root / "table.csv")
        out.names.append("table.csv")
        out.text("corpus_stats.csv", report.corpus_stats_csv(stats))
    summary["rows"], summary["cols"] = table.shape
    with stage("normalize"):
        n = normalize(table)
    with stage("fca"):
        model = decompose(n)
    summary["total_inertia"] = _num(model.total_inertia)
    summary["eigenvalues"] = [_num(v) for v in model.eigenvalues]

    geometry = cfg.geometry()
    with stage("ensemble"):
        units = ensemble_units(n, cfg.train_config(), cfg.runs, cfg.jobs)
        m = stability_from_units(units, n.row_labels + n.col_labels, geometry, len(n.row_labels))
    with stage("bounds"):
        b = critical_bounds(geometry.units, cfg.runs, cfg.z)
    summary["bounds"] = {"a": _num(b.a), "b": _num(b.b), "lower": _num(b.lower), "upper": _num(b.upper)}
    with stage("classification"):
        counts = fickleness_counts(m, b)
    with stage("fickle"):
        fickle = fickle_words(counts, **cfg.fickle_selection())
    summary["theta"] = fickle.theta
    summary["fickle"] = len(fickle.ordered)
    with stage("map"):
        I = len(n.row_labels)
        first = Assignment(geometry, n.row_labels, n.col_labels, units[0][:I], units[0][I:])
        grid_text, grid_json = report.export_map_text(first, fickle.fickle_items)
    with stage("graph"):
        g = build_graph(m, b, fickle.ordered)
        summary["graph"] = {"vertices": g.order, "edges": len(g.edges())}
    with stage("partition"):
        partition = glutton_decomposition(g)
        order = bertin_seriation(g.weights, g.vertices) if g.order else []
        summary["parts"] = [len(p) for p in partition.parts]
        summary["remainder"] = len(partition.remainder)

    with stage("export"):
        out.text("factors.csv", report.factors_csv(model))
        out.text("eigenvalues.csv", report.eigenvalues_csv(model))
        planes = [(0, 1)] + ([(2, 3)] if model.rank >= 4 else [])
        if model.rank >= 2:
            for a, c in planes:
                out.text(f"factors_{a + 1}_{c + 1}.svg",
                         report.export_factors_svg(model, (a, c), fickle.fickle_items))
        out.text("stability.csv", report.stability_csv(m))
        out.text("pairs.csv", report.pairs_csv(m, b))
        out.text("fickle.json", report.fickle_json(fickle))
        out.text("map.txt", grid_text)
        out.text("map.json", report.dump_json(grid_json))
        out.text("graph.dot", report.export_dot(g, fickle.fickle_items))
        out.text("partition.json", report.partition_json(partition, g))
        out.text("seriation.csv", report.seriation_csv(g.weights, g.vertices, order)
                 if g.order else "item\n")
        fd = report.fickleness_distance_report(model, counts)
        out.text("fickleness_distance.csv", report.fickleness_distance_csv(fd))
        out.text("fickleness_distance.svg", report.fickleness_distance_svg(fd))
        summary["fickleness_distance_r"] = _num(fd.correlation)
        if fd.note:
            summary["fickleness_distance_note"] = fd.note

    if cfg.figures:
        with stage("figures"):
            from . import plotting

            if model.rank >= 2:
                for a, c in planes:
                    out.figure(f"figures/factors_{a + 1}_{c + 1}.png", plotting.factor_plane,
                               model, axes=(a, c), fickle=fickle.fickle_items)
            out.figure("figures/fickleness_distance.png", plotting.fickleness_scatter,
                       fd.fickle_pairs, fd.sq_distance, fd.correlation)
            if g.order:
                out.figure("figures/stability_seriated.png", plotting.seriated_heatmap,
                           g.weights, g.vertices, order, upper=b.upper)

    manifest = {
        "config": cfg.echo(),
        "files": [{"name": name, "sha256": _sha256(root / name), "bytes": (root / name).stat().st_size}
                  for name in out.names],
        "summary": summary,
    }
    report._write(root / MANIFEST, report.dump_json(manifest))
    return manifest


def stability_values_for(table: ContingencyTable, cfg: PipelineConfig):
    """Stability matrix and bounds for ``table`` under ``cfg`` (no exports)."""
    n = normalize(table)
    geometry = cfg.geometry()
    units = ensemble_units(n, cfg.train_config(), cfg.runs, cfg.jobs)
    m = stability_from_units(units, n.row_labels + n.col_labels, geometry, len(n.row_labels))
    return m, critical_bounds(geometry.units, cfg.runs, cfg.z), units
