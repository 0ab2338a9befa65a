"""Robust lexicometric analysis of word-by-document contingency tables.

Correspondence analysis, KORRESP self-organizing maps, ensemble neighbor
stability (fickle pairs and words) and quasi-clique decomposition of the
significant-neighborhood graph.
"""

from .cliquegraph import (
    NeighborGraph,
    QuasiCliquePartition,
    bertin_seriation,
    build_graph,
    glutton_decomposition,
    is_quasi_clique,
    max_clique,
    max_quasi_clique,
)
from .contingency import (
    ContingencyTable,
    CorpusStats,
    NormalizedTable,
    corpus_stats,
    load_long_csv,
    load_matrix_csv,
    normalize,
    top_k_filter,
    validate,
    write_matrix_csv,
)
from .errors import ConfigError, DataError, NumericError, RobustLexError
from .fca import FactorModel, center_distances, decompose, project
from .korresp import Assignment, Codebook, MapGeometry, TrainConfig, assign_all, train
from .pipeline import PipelineConfig, load_config, run_pipeline
from .stability import (
    CriticalBounds,
    FickleReport,
    PairClass,
    StabilityMatrix,
    classify_pair,
    critical_bounds,
    fickle_words,
    fickleness_counts,
    robust_map,
    run_ensemble,
)

__version__ = "0.1.0"
