from __future__ import annotations

import json
from datetime import datetime, timedelta, timezone

import pytest

from stormtrace.corpus import Corpus, Post

T0 = datetime(2015, 3, 1, tzinfo=timezone.utc)


def make_post(pid, *, refs=(), author="a", day=0.0, content="word"):
    return Post(
        id=pid,
        content=content,
        author=author,
        published_at=T0 + timedelta(days=day),
        refs=frozenset(refs),
    )


def make_corpus(*posts):
    return Corpus.from_posts(posts)


@pytest.fixture
def write_jsonl(tmp_path):
    def _write(records, name="posts.jsonl"):
        path = tmp_path / name
        with open(path, "w", encoding="utf-8") as fh:
            for rec in records:
                fh.write((rec if isinstance(rec, str) else json.dumps(rec)) + "\n")
        return path

    return _write


def planted_docs(n_docs=200, vocab_size=50, doc_len=40, seed=0):
    """Documents drawn from two topics with disjoint vocabularies; returns (docs, labels)."""
    import numpy as np

    from stormtrace.textprep import TokenizedPost

    rng = np.random.default_rng(seed)
    docs, labels = [], []
    for i in range(n_docs):
        label = int(rng.integers(2))
        words = rng.integers(0, vocab_size, size=doc_len)
        docs.append(TokenizedPost(f"http://d.org/{i}", tuple(f"t{label}w{w}" for w in words)))
        labels.append(label)
    return docs, labels


def best_permutation_purity(assignment, labels_by_id, k):
    """Fraction of documents whose topic maps to their planted label under the best relabelling."""
    from itertools import permutations

    ids = list(labels_by_id)
    best = 0
    for perm in permutations(range(k)):
        hits = sum(1 for pid in ids if perm[assignment[pid]] == labels_by_id[pid])
        best = max(best, hits)
    return best / len(ids)


def random_affinity_fixture(rng, max_posts=20, max_topics=4, n_urls=6):
    """Posts with random refs and a fixed random topic assignment (some posts unassigned)."""
    k = rng.randint(1, max_topics)
    n = rng.randint(1, max_posts)
    urls = [f"http://u.org/{j}" for j in range(n_urls)]
    posts, assignment = [], {}
    for i in range(n):
        pid = f"http://p.org/{i}"
        refs = set(rng.sample(urls + [f"http://p.org/{j}" for j in range(n) if j != i], rng.randint(0, 4)))
        posts.append(make_post(pid, refs=refs, day=rng.random()))
        if rng.random() < 0.9:
            assignment[pid] = rng.randrange(k)
    return posts, assignment, k


def brute_force_affinities(posts, assignment, k):
    """{(url, topic): (tf, idf, repr)} by exhaustive nested loops."""
    import math

    all_urls = sorted({u for p in posts for u in p.refs})
    out = {}
    for url in all_urls:
        citing_topics = 0
        for t in range(k):
            if any(assignment.get(p.id) == t and url in p.refs for p in posts):
                citing_topics += 1
        for t in range(k):
            tf = 0
            for p in posts:
                if assignment.get(p.id) == t and url in p.refs:
                    tf += 1
            if tf > 0:
                idf = math.log(k / citing_topics)
                out[(url, t)] = (tf, idf, tf * idf)
    return out


def union_find_components(nodes, edges):
    """Weak components via union-find, as sorted tuples of sorted members."""
    parent = {n: n for n in nodes}

    def find(n):
        while parent[n] != n:
            parent[n] = parent[parent[n]]
            n = parent[n]
        return n

    for a, b in edges:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    groups = {}
    for n in nodes:
        groups.setdefault(find(n), set()).add(n)
    return sorted(tuple(sorted(g)) for g in groups.values())


def random_boost_fixture(rng, max_posts=20, span_days=5, n_authors=4):
    """Up to ``max_posts`` posts over ``span_days`` days citing a small URL pool."""
    n = rng.randint(1, max_posts)
    ids = [f"http://p.org/{i}" for i in range(n)]
    pool = [f"http://u.org/{j}" for j in range(3)] + ids
    posts = []
    for i, pid in enumerate(ids):
        refs = {u for u in rng.sample(pool, rng.randint(0, 3)) if u != pid}
        posts.append(
            make_post(pid, refs=refs, author=f"au{rng.randrange(n_authors)}", day=rng.uniform(0, span_days))
        )
    return make_corpus(*posts)


def brute_force_boost(corpus, windows):
    """{author: (total, events)} recomputed from scratch by exhaustive loops."""
    def slot(post):
        return min(w.index for w in windows if w.start <= post.published_at <= w.end)

    totals = {}
    for p in corpus.posts:
        for url in p.refs:
            s = slot(p)

            def accum(i):
                return len({q.author for q in corpus.posts if url in q.refs and slot(q) <= i})

            score = 0.0
            for i in range(s + 1, len(windows)):
                score += (accum(i) - accum(s)) / (i - s) ** 2
            total, events = totals.get(p.author, (0.0, 0))
            totals[p.author] = (total + score, events + 1)
    return totals


# -- acceptance summary: one PASS/FAIL line per criterion ------------------

_ACCEPTANCE: dict[int, tuple[str, str, float]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    if report.failed or report.when == "call":
        prev = _ACCEPTANCE.get(number)
        status = "FAIL" if report.failed or (prev and prev[1] == "FAIL") else "PASS"
        elapsed = (prev[2] if prev else 0.0) + report.duration
        _ACCEPTANCE[number] = (title, status, elapsed)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status, elapsed = _ACCEPTANCE[number]
        terminalreporter.write_line(f"AC{number:<2} {status}  {title}  ({elapsed:.2f}s)")
