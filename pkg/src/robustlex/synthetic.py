"""Synthetic block-structured corpora for demos and tests."""

from __future__ import annotations

from importlib import resources
from pathlib import Path

import numpy as np

from .contingency import ContingencyTable


def two_block_table(
    n_words: int = 20,
    n_docs: int = 4,
    within: float = 20.0,
    cross: float = 1.0,
    seed: int = 0,
) -> ContingencyTable:
    """Poisson counts where the first half of the words favor the first half
    of the documents and the second half the rest.

    Zero rows or columns are bumped to a single count so the table validates.
    """
    rng = np.random.default_rng(seed)
    word_block = np.arange(n_words) >= n_words // 2
    doc_block = np.arange(n_docs) >= n_docs // 2
    means = np.where(word_block[:, None] == doc_block[None, :], within, cross)
    counts = rng.poisson(means).astype(np.int64)
    for i in np.flatnonzero(counts.sum(axis=1) == 0):
        counts[i, int(doc_block[0] != word_block[i])] = 1
    for j in np.flatnonzero(counts.sum(axis=0) == 0):
        counts[0, j] = 1
    rows = tuple(f"w{i:02d}" for i in range(n_words))
    cols = tuple(f"D{j}" for j in range(n_docs))
    return ContingencyTable(rows, cols, counts)


def random_table(n_words: int, n_docs: int, seed: int = 0, high: int = 60) -> ContingencyTable:
    rng = np.random.default_rng(seed)
    counts = rng.integers(1, high, size=(n_words, n_docs))
    rows = tuple(f"w{i:03d}" for i in range(n_words))
    cols = tuple(f"D{j}" for j in range(n_docs))
    return ContingencyTable(rows, cols, counts)


def demo_corpus(
    n_block: int = 20,
    n_shared: int = 10,
    n_docs: int = 8,
    within: float = 20.0,
    cross: float = 1.0,
    shared: float = 8.0,
    seed: int = 7,
) -> ContingencyTable:
    """Two blocks of ``n_block`` words each plus ``n_shared`` words spread
    evenly over all documents.

    The shared words have near-average profiles, so they sit close to the
    FCA origin and wander between the two blocks on the maps.
    """
    rng = np.random.default_rng(seed)
    half = n_docs // 2
    doc_block = np.arange(n_docs) >= half
    means = np.empty((2 * n_block + n_shared, n_docs))
    means[:n_block] = np.where(doc_block, cross, within)
    means[n_block : 2 * n_block] = np.where(doc_block, within, cross)
    means[2 * n_block :] = shared
    counts = rng.poisson(means).astype(np.int64)
    counts[counts.sum(axis=1) == 0, 0] = 1
    rows = (
        tuple(f"a{i:02d}" for i in range(n_block))
        + tuple(f"b{i:02d}" for i in range(n_block))
        + tuple(f"s{i:02d}" for i in range(n_shared))
    )
    cols = tuple(f"T{j}" for j in range(n_docs))
    return ContingencyTable(rows, cols, counts)


BUNDLED_CORPUS = "two_block_corpus.csv"


def bundled_corpus_path() -> Path:
    """The shipped :func:`demo_corpus` table as a matrix CSV."""
    return Path(str(resources.files("robustlex") / "data" / BUNDLED_CORPUS))
