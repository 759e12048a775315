from __future__ import annotations

import numpy as np
import pytest

from conftest import best_permutation_purity, planted_docs
from stormtrace.errors import DegenerateKWarning, EmptyWindow, TopicOutOfRange
from stormtrace.textprep import TokenizedPost
from stormtrace.topics import LdaParams, TopicModel, fit_lda, topic_members

FAST = dict(iterations=120, burn_in=20)


@pytest.fixture(scope="module")
def planted():
    docs, labels = planted_docs()
    model = fit_lda(docs, LdaParams(k=2, seed=42), debug=True)
    return docs, labels, model


def test_planted_recovery(planted):
    docs, labels, model = planted
    labels_by_id = {d.post_id: lab for d, lab in zip(docs, labels)}
    assert best_permutation_purity(model.assignment, labels_by_id, 2) >= 0.95


def test_rows_normalized(planted):
    _, _, model = planted
    np.testing.assert_allclose(model.doc_topic.sum(axis=1), 1.0, atol=1e-9)
    np.testing.assert_allclose(model.topic_word.sum(axis=1), 1.0, atol=1e-9)
    assert model.doc_topic.shape == (200, 2)
    assert model.topic_word.shape == (2, len(model.vocab))


def test_assignment_is_argmax(planted):
    _, _, model = planted
    for row, pid in enumerate(model.doc_ids):
        assert model.assignment[pid] == int(np.argmax(model.doc_topic[row]))


def test_token_conservation_every_sweep():
    docs, _ = planted_docs(n_docs=30)
    n_tokens = sum(d.token_count for d in docs)
    seen = []

    def check(sweep, n_dk, n_kw, n_k):
        assert n_kw.sum() == n_tokens
        assert n_dk.sum() == n_tokens
        assert (n_kw.sum(axis=1) == n_k).all()
        assert (n_dk >= 0).all() and (n_kw >= 0).all()
        seen.append(sweep)

    fit_lda(docs, LdaParams(k=3, seed=1, **FAST), on_sweep=check)
    assert seen == list(range(FAST["iterations"]))


def test_single_document_single_topic():
    model = fit_lda([TokenizedPost("http://d.org/1", ("alpha", "beta"))], LdaParams(k=1, iterations=5, burn_in=0))
    np.testing.assert_array_equal(model.doc_topic, [[1.0]])
    assert model.assignment == {"http://d.org/1": 0}


def test_seeded_determinism():
    docs, _ = planted_docs(n_docs=40)
    a = fit_lda(docs, LdaParams(k=3, seed=7, **FAST))
    b = fit_lda(docs, LdaParams(k=3, seed=7, **FAST))
    assert a.assignment == b.assignment
    np.testing.assert_array_equal(a.doc_topic, b.doc_topic)
    np.testing.assert_array_equal(a.topic_word, b.topic_word)


def test_zero_token_docs_dropped():
    docs = [TokenizedPost("http://d.org/1", ("x", "y")), TokenizedPost("http://d.org/2", ())]
    model = fit_lda(docs, LdaParams(k=1, iterations=3, burn_in=0))
    assert set(model.assignment) == {"http://d.org/1"}


def test_empty_window():
    with pytest.raises(EmptyWindow):
        fit_lda([TokenizedPost("http://d.org/1", ())], LdaParams(k=2))


def test_degenerate_k_warns():
    docs = [TokenizedPost("http://d.org/1", ("x",)), TokenizedPost("http://d.org/2", ("y",))]
    with pytest.warns(DegenerateKWarning):
        model = fit_lda(docs, LdaParams(k=5, iterations=3, burn_in=0))
    assert all(0 <= t < 5 for t in model.assignment.values())


@pytest.mark.parametrize(
    "kwargs",
    [dict(k=0), dict(beta=0), dict(alpha=-1.0), dict(iterations=0), dict(iterations=10, burn_in=10), dict(seed=-1)],
)
def test_bad_params(kwargs):
    with pytest.raises(ValueError):
        LdaParams(**kwargs)


def test_default_alpha():
    assert LdaParams(k=10).alpha == 5.0
    p = LdaParams()
    assert (p.beta, p.iterations, p.burn_in, p.seed) == (0.01, 500, 100, 42)


class TestTopicMembers:
    model = TopicModel.from_assignment({"a": 0, "b": 1, "c": 0}, k=3)

    def test_definition(self):
        assert topic_members(self.model, 0) == {"a", "c"}
        assert topic_members(self.model, 1) == {"b"}

    def test_empty_topic(self):
        assert topic_members(self.model, 2) == set()

    def test_partition(self):
        parts = [topic_members(self.model, t) for t in range(3)]
        assert set().union(*parts) == {"a", "b", "c"}
        assert sum(len(p) for p in parts) == 3

    def test_out_of_range(self):
        with pytest.raises(TopicOutOfRange):
            topic_members(self.model, 3)
        with pytest.raises(TopicOutOfRange):
            topic_members(self.model, -1)
