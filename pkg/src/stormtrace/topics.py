"""Per-window LDA fitted by collapsed Gibbs sampling."""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from numba import njit

from stormtrace.errors import (
    CountConservationError,
    DegenerateKWarning,
    EmptyWindow,
    TopicOutOfRange,
)
from stormtrace.textprep import TokenizedPost

logger = logging.getLogger(__name__)

SweepHook = Callable[[int, np.ndarray, np.ndarray, np.ndarray], None]


@dataclass(frozen=True)
class LdaParams:
    k: int = 10
    alpha: float | None = None  # None -> 50 / k
    beta: float = 0.01
    iterations: int = 500
    burn_in: int = 100
    seed: int = 42

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if self.alpha is None:
            object.__setattr__(self, "alpha", 50.0 / self.k)
        if self.alpha <= 0 or self.beta <= 0:
            raise ValueError("alpha and beta must be positive")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if not 0 <= self.burn_in < self.iterations:
            raise ValueError("burn_in must satisfy 0 <= burn_in < iterations")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")


@dataclass
class TopicModel:
    """Fitted window model.

    Rows of ``doc_topic`` follow ``doc_ids``; columns of ``topic_word``
    follow ``vocab``. ``assignment`` maps each post id to its argmax topic.
    """

    window_index: int
    k: int
    doc_ids: list[str]
    vocab: list[str]
    doc_topic: np.ndarray
    topic_word: np.ndarray
    assignment: dict[str, int] = field(default_factory=dict)

    @classmethod
    def from_assignment(
        cls, assignment: Mapping[str, int], k: int, window_index: int = 0
    ) -> TopicModel:
        """Build a model with fixed crisp assignments and no vocabulary."""
        doc_ids = sorted(assignment)
        doc_topic = np.zeros((len(doc_ids), k))
        for row, pid in enumerate(doc_ids):
            t = assignment[pid]
            if not 0 <= t < k:
                raise TopicOutOfRange(f"topic {t} outside [0, {k})")
            doc_topic[row, t] = 1.0
        return cls(
            window_index=window_index,
            k=k,
            doc_ids=doc_ids,
            vocab=[],
            doc_topic=doc_topic,
            topic_word=np.zeros((k, 0)),
            assignment=dict(assignment),
        )

    def top_words(self, t: int, n: int = 10) -> list[str]:
        if not 0 <= t < self.k:
            raise TopicOutOfRange(f"topic {t} outside [0, {self.k})")
        order = np.argsort(-self.topic_word[t], kind="stable")[:n]
        return [self.vocab[i] for i in order]


@njit(cache=True)
def _sweep(doc_of, word_of, z, n_dk, n_kw, n_k, alpha, beta, vbeta, uniforms):
    k = n_k.shape[0]
    p = np.empty(k)
    for i in range(z.shape[0]):
        d = doc_of[i]
        w = word_of[i]
        old = z[i]
        n_dk[d, old] -= 1
        n_kw[old, w] -= 1
        n_k[old] -= 1
        total = 0.0
        for t in range(k):
            total += (n_dk[d, t] + alpha) * (n_kw[t, w] + beta) / (n_k[t] + vbeta)
            p[t] = total
        u = uniforms[i] * total
        new = k - 1
        for t in range(k):
            if u < p[t]:
                new = t
                break
        z[i] = new
        n_dk[d, new] += 1
        n_kw[new, w] += 1
        n_k[new] += 1


def _check_counts(sweep: int, n_tokens: int, n_dk, n_kw, n_k) -> None:
    if not (n_kw.sum() == n_tokens == n_dk.sum() and np.array_equal(n_kw.sum(axis=1), n_k)):
        raise CountConservationError(f"count tables lost tokens at sweep {sweep}")


def fit_lda(
    docs: Sequence[TokenizedPost],
    params: LdaParams,
    *,
    window_index: int = 0,
    debug: bool = False,
    on_sweep: SweepHook | None = None,
) -> TopicModel:
    """Fit LDA over the documents that have at least one token.

    Estimates average the count tables over the sweeps after burn-in and
    then apply the usual Dirichlet smoothing. ``debug`` verifies token
    conservation after every sweep; ``on_sweep(sweep, n_dk, n_kw, n_k)``
    sees the live tables (do not mutate them).
    """
    docs = [d for d in docs if d.tokens]
    if not docs:
        raise EmptyWindow(f"window {window_index} has no tokenized documents")
    k = params.k
    if k > len(docs):
        warnings.warn(
            f"window {window_index}: k={k} exceeds {len(docs)} documents",
            DegenerateKWarning,
            stacklevel=2,
        )

    vocab = sorted({tok for d in docs for tok in d.tokens})
    word_index = {w: i for i, w in enumerate(vocab)}
    doc_of = np.concatenate(
        [np.full(len(d.tokens), j, dtype=np.int64) for j, d in enumerate(docs)]
    )
    word_of = np.fromiter(
        (word_index[t] for d in docs for t in d.tokens), dtype=np.int64, count=len(doc_of)
    )
    n_tokens = len(doc_of)
    n_docs, n_vocab = len(docs), len(vocab)

    rng = np.random.Generator(np.random.PCG64(params.seed))
    z = rng.integers(0, k, size=n_tokens).astype(np.int64)
    n_dk = np.zeros((n_docs, k), dtype=np.int64)
    n_kw = np.zeros((k, n_vocab), dtype=np.int64)
    np.add.at(n_dk, (doc_of, z), 1)
    np.add.at(n_kw, (z, word_of), 1)
    n_k = n_kw.sum(axis=1)

    alpha, beta = float(params.alpha), float(params.beta)
    sum_dk = np.zeros((n_docs, k))
    sum_kw = np.zeros((k, n_vocab))
    for sweep in range(params.iterations):
        _sweep(doc_of, word_of, z, n_dk, n_kw, n_k, alpha, beta, n_vocab * beta, rng.random(n_tokens))
        if debug:
            _check_counts(sweep, n_tokens, n_dk, n_kw, n_k)
        if on_sweep is not None:
            on_sweep(sweep, n_dk, n_kw, n_k)
        if sweep >= params.burn_in:
            sum_dk += n_dk
            sum_kw += n_kw

    samples = params.iterations - params.burn_in
    avg_dk = sum_dk / samples
    avg_kw = sum_kw / samples
    doc_topic = (avg_dk + alpha) / (avg_dk.sum(axis=1, keepdims=True) + k * alpha)
    topic_word = (avg_kw + beta) / (avg_kw.sum(axis=1, keepdims=True) + n_vocab * beta)

    doc_ids = [d.post_id for d in docs]
    winners = np.argmax(doc_topic, axis=1)
    assignment = {pid: int(t) for pid, t in zip(doc_ids, winners)}
    logger.debug("window %d: fitted %d docs, %d tokens, V=%d", window_index, n_docs, n_tokens, n_vocab)
    return TopicModel(
        window_index=window_index,
        k=k,
        doc_ids=doc_ids,
        vocab=vocab,
        doc_topic=doc_topic,
        topic_word=topic_word,
        assignment=assignment,
    )


def topic_members(model: TopicModel, t: int) -> set[str]:
    if not 0 <= t < model.k:
        raise TopicOutOfRange(f"topic {t} outside [0, {model.k})")
    return {pid for pid, topic in model.assignment.items() if topic == t}
