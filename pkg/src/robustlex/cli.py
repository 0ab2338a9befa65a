"""Command-line interface: ``robustlex <command> [options]``.

Exit codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import report
from .cliquegraph import bertin_seriation, build_graph, glutton_decomposition
from .contingency import corpus_stats, normalize, validate, write_matrix_csv
from .errors import ConfigError, RobustLexError
from .fca import decompose
from .korresp import assign_all, train
from .pipeline import PipelineConfig, load_config, load_table, run_pipeline, stage
from .stability import (
    critical_bounds,
    fickle_words,
    fickleness_counts,
    run_ensemble,
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("input", nargs="?", help="count table (CSV)")
    p.add_argument("--config", help="flat key=value config file; flags override it")
    p.add_argument("--format", choices=("matrix", "long"))
    p.add_argument("--top-k", type=int, help="keep the k most frequent words")
    p.add_argument("--out", help="output directory")
    p.add_argument("--seed", type=int)
    p.add_argument("--runs", type=int, help="number of maps in the ensemble (L)")
    p.add_argument("--grid", help="map size WxH, e.g. 10x10")
    p.add_argument("--iterations", type=int, help="training steps per map")
    p.add_argument("--eps-start", type=float)
    p.add_argument("--eps-end", type=float)
    p.add_argument("--z", type=float, help="normal quantile of the neighborhood test")
    p.add_argument("--jobs", type=int, help="worker processes for the ensemble")
    sel = p.add_mutually_exclusive_group()
    sel.add_argument("--theta", type=int, help="fickle words need at least this many fickle pairs")
    sel.add_argument("--top-fickle", type=int, help="report the k most fickle words")
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robustlex", description="Robust lexicometric analysis of word-by-document count tables.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = _common()
    sub.add_parser("ingest", parents=[common], help="validate a table, write it back with corpus statistics")
    fca = sub.add_parser("fca", parents=[common], help="correspondence analysis")
    fca.add_argument("--axes", default="1,2", help="factor plane for the SVG, 1-based (default 1,2)")
    sub.add_parser("train", parents=[common], help="train one KORRESP map")
    sub.add_parser("stability", parents=[common], help="ensemble stability matrix and fickle words")
    graph = sub.add_parser("graph", parents=[common], help="neighbor graph, glutton partition, seriation")
    graph.add_argument("--matrix", help="stability CSV to use instead of training from INPUT")
    run = sub.add_parser("run", parents=[common], help="full pipeline with manifest")
    run.add_argument("--no-figures", action="store_true", help="skip the matplotlib PNG figures")
    return parser


def _config(args) -> PipelineConfig:
    cfg = load_config(args.config) if args.config else PipelineConfig()
    cfg = cfg.updated(
        input=args.input, format=args.format, top_k=args.top_k, out=args.out,
        seed=args.seed, runs=args.runs, grid=args.grid, iterations=args.iterations,
        epsilon_start=args.eps_start, epsilon_end=args.eps_end, z=args.z, jobs=args.jobs,
        theta=args.theta, top_fickle=args.top_fickle,
    )
    if getattr(args, "no_figures", False):
        cfg.figures = False
    return cfg


def _table(cfg: PipelineConfig):
    if not cfg.input:
        raise ConfigError("no input file given")
    with stage("ingest"):
        table = load_table(cfg.input, cfg.format, cfg.top_k)
    with stage("validate"):
        validate(table)
    return table


def _outdir(cfg: PipelineConfig) -> Path:
    root = Path(cfg.out)
    root.mkdir(parents=True, exist_ok=True)
    return root


def _cmd_ingest(cfg, args) -> None:
    table = _table(cfg)
    root = _outdir(cfg)
    write_matrix_csv(table, root / "table.csv")
    report._write(root / "corpus_stats.csv", report.corpus_stats_csv(corpus_stats(table)))
    print(f"{table.shape[0]} words x {table.shape[1]} documents, "
          f"{int(table.counts.sum())} occurrences")


def _cmd_fca(cfg, args) -> None:
    table = _table(cfg)
    try:
        axes = tuple(int(a) - 1 for a in args.axes.split(","))
    except ValueError:
        raise ConfigError(f"--axes wants two factor numbers like 1,2, not {args.axes!r}") from None
    if len(axes) != 2:
        raise ConfigError("--axes wants exactly two factors")
    with stage("fca"):
        model = decompose(normalize(table))
    root = _outdir(cfg)
    report._write(root / "factors.csv", report.factors_csv(model))
    report._write(root / "eigenvalues.csv", report.eigenvalues_csv(model))
    with stage("export"):
        svg = report.export_factors_svg(model, axes)
    report._write(root / f"factors_{axes[0] + 1}_{axes[1] + 1}.svg", svg)
    for k, (lam, share) in enumerate(zip(model.eigenvalues, model.inertia_shares)):
        print(f"factor {k + 1}: eigenvalue {lam:.6f} ({100 * share:.2f}%)")


def _cmd_train(cfg, args) -> None:
    table = _table(cfg)
    n = normalize(table)
    with stage("train"):
        a = assign_all(train(n, cfg.train_config()), n)
    text, doc = report.export_map_text(a)
    root = _outdir(cfg)
    report._write(root / "map.txt", text)
    report._write(root / "map.json", report.dump_json(doc))
    sys.stdout.write(text)


def _cmd_stability(cfg, args) -> None:
    table = _table(cfg)
    with stage("ensemble"):
        m = run_ensemble(normalize(table), cfg.train_config(), cfg.runs, cfg.jobs)
    with stage("bounds"):
        b = critical_bounds(cfg.geometry().units, cfg.runs, cfg.z)
    rep = fickle_words(fickleness_counts(m, b), **cfg.fickle_selection())
    root = _outdir(cfg)
    report._write(root / "stability.csv", report.stability_csv(m))
    report._write(root / "pairs.csv", report.pairs_csv(m, b))
    report._write(root / "fickle.json", report.fickle_json(rep))
    print(f"bounds [{b.lower:.4f}, {b.upper:.4f}]; theta {rep.theta}; "
          f"{len(rep.ordered)} fickle words")


def _cmd_graph(cfg, args) -> None:
    geometry = cfg.geometry()
    with stage("bounds"):
        b = critical_bounds(geometry.units, cfg.runs, cfg.z)
    explicit = args.theta is not None or args.top_fickle is not None
    if args.matrix:
        with stage("ingest"):
            m = report.read_stability_csv(args.matrix, cfg.runs, geometry)
    else:
        table = _table(cfg)
        with stage("ensemble"):
            m = run_ensemble(normalize(table), cfg.train_config(), cfg.runs, cfg.jobs)
    subset = None
    fickle = ()
    if explicit or not args.matrix:
        rep = fickle_words(fickleness_counts(m, b), **cfg.fickle_selection())
        subset, fickle = rep.ordered, rep.fickle_items
    with stage("graph"):
        g = build_graph(m, b, subset)
        part = glutton_decomposition(g)
        order = bertin_seriation(g.weights, g.vertices) if g.order else []
    root = _outdir(cfg)
    report._write(root / "graph.dot", report.export_dot(g, fickle))
    report._write(root / "partition.json", report.partition_json(part, g))
    report._write(root / "seriation.csv", report.seriation_csv(g.weights, g.vertices, order))
    print(f"{g.order} vertices, {len(g.edges())} edges, threshold {b.upper:.4f}")
    for k, p in enumerate(part.parts, 1):
        print(f"part {k}: {', '.join(g.labels_of(p))}")
    if part.remainder:
        print(f"remainder: {', '.join(g.labels_of(part.remainder))}")


def _cmd_run(cfg, args) -> None:
    manifest = run_pipeline(cfg)
    print(f"{len(manifest['files'])} files written to {cfg.out}")


COMMANDS = {
    "ingest": _cmd_ingest,
    "fca": _cmd_fca,
    "train": _cmd_train,
    "stability": _cmd_stability,
    "graph": _cmd_graph,
    "run": _cmd_run,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _config(args)
        COMMANDS[args.command](cfg, args)
    except RobustLexError as exc:
        where = getattr(exc, "stage", None)
        prefix = f"[{where}] " if where else ""
        print(f"robustlex: {type(exc).__name__}: {prefix}{exc}", file=sys.stderr)
        return exc.exit_code
    return 0


if __name__ == "__main__":
    sys.exit(main())
