from __future__ import annotations

import json
import random

import pytest

from conftest import make_corpus, make_post, union_find_components
from stormtrace.affinity import KeyPost
from stormtrace.corpus import RedirectMap
from stormtrace.graph import (
    KeyPostGraph,
    build_graph,
    connected_components,
    export_graph,
    from_json,
    to_dot,
)


def kp(url, score=1.0, window=0, topic=0, in_corpus=True):
    return KeyPost(url, window, topic, score, in_corpus)


@pytest.fixture
def chains():
    # a <- b, c <- d ; e is an out-of-corpus key post cited by d
    corpus = make_corpus(
        make_post("http://k.org/a"),
        make_post("http://k.org/b", refs={"http://k.org/a", "http://other.org/x"}),
        make_post("http://k.org/c"),
        make_post("http://k.org/d", refs={"http://k.org/c"}),
    )
    kps = [kp("http://k.org/a", 4.0), kp("http://k.org/b", 2.0), kp("http://k.org/c", 1.0), kp("http://k.org/d", 1.0)]
    return corpus, kps


def test_single_edge():
    corpus = make_corpus(make_post("http://k.org/a"), make_post("http://k.org/b", refs={"http://k.org/a"}))
    g = build_graph([kp("http://k.org/a"), kp("http://k.org/b")], corpus)
    assert g.edges == {("http://k.org/b", "http://k.org/a")}


def test_out_of_corpus_is_sink():
    corpus = make_corpus(make_post("http://k.org/a", refs={"http://ext.org/c"}))
    g = build_graph([kp("http://k.org/a"), kp("http://ext.org/c", in_corpus=False)], corpus)
    assert g.out_degree("http://ext.org/c") == 0
    assert g.edges == {("http://k.org/a", "http://ext.org/c")}


def test_two_chains(chains):
    corpus, kps = chains
    g = build_graph(kps, corpus)
    comps = connected_components(g)
    assert comps == [{"http://k.org/a", "http://k.org/b"}, {"http://k.org/c", "http://k.org/d"}]


def test_empty_and_isolated():
    assert connected_components(KeyPostGraph()) == []
    corpus = make_corpus(*(make_post(f"http://k.org/{i}") for i in range(4)))
    g = build_graph([kp(f"http://k.org/{i}") for i in range(4)], corpus)
    assert connected_components(g) == [{f"http://k.org/{i}"} for i in range(4)]


def test_duplicates_merged_across_windows():
    corpus = make_corpus(make_post("http://k.org/a"))
    g = build_graph([kp("http://k.org/a", 1.0, 0, 2), kp("http://k.org/a", 3.0, 4, 1), kp("http://k.org/a", 2.0, 1, 0)], corpus)
    node = g.nodes["http://k.org/a"]
    assert node.repr == 3.0
    assert node.memberships == ((0, 2), (1, 0), (4, 1))
    assert g.node_size == {"http://k.org/a": 3.0}


def test_redirects_applied_to_refs():
    corpus = make_corpus(make_post("http://k.org/b", refs={"http://bit.ly/a"}), make_post("http://k.org/a"))
    rmap = RedirectMap.from_pairs([("http://bit.ly/a", "http://k.org/a")])
    g = build_graph([kp("http://k.org/a"), kp("http://k.org/b")], corpus, rmap)
    assert g.edges == {("http://k.org/b", "http://k.org/a")}


@pytest.mark.parametrize("seed", range(100))
def test_components_match_union_find(seed):
    rng = random.Random(seed)
    n = rng.randint(0, 50)
    urls = [f"http://k.org/{i}" for i in range(n)]
    in_corpus = {u for u in urls if rng.random() < 0.7}
    posts = []
    for u in sorted(in_corpus):
        refs = {v for v in urls if v != u and rng.random() < 2.0 / max(n, 1)}
        refs |= {f"http://noise.org/{rng.randrange(5)}"}
        posts.append(make_post(u, refs=refs))
    corpus = make_corpus(*posts)
    elected = [kp(u, rng.choice([0.5, 1.0, 2.0]), rng.randrange(3), rng.randrange(2), u in in_corpus) for u in urls]
    g = build_graph(elected, corpus)

    assert set(g.nodes) == set(urls)
    assert all(src in in_corpus for src, _ in g.edges)
    assert all(src != dst for src, dst in g.edges)
    comps = connected_components(g)
    assert sum(len(c) for c in comps) == len(g.nodes)
    assert sorted(tuple(sorted(c)) for c in comps) == union_find_components(urls, g.edges)
    keys = [(-len(c), min(c)) for c in comps]
    assert keys == sorted(keys)


class TestExport:
    def test_single_node_dot(self, tmp_path):
        corpus = make_corpus(make_post("http://k.org/a"))
        path = export_graph(build_graph([kp("http://k.org/a", 2.5)], corpus), tmp_path / "g.dot")
        text = path.read_text()
        assert text.startswith("digraph")
        assert text.count(" [label=") == 1
        assert "->" not in text
        assert "width=2.000000" in text

    def test_edge_line_and_widths(self, chains):
        corpus, kps = chains
        dot = to_dot(build_graph(kps, corpus))
        assert '  "http://k.org/b" -> "http://k.org/a";' in dot.splitlines()
        assert '"http://k.org/b" [label="http://k.org/b", width=1.000000];' in dot

    def test_byte_identical(self, chains, tmp_path):
        corpus, kps = chains
        for fmt in ("dot", "json"):
            a = export_graph(build_graph(kps, corpus), tmp_path / f"a.{fmt}", fmt).read_bytes()
            b = export_graph(build_graph(list(reversed(kps)), corpus), tmp_path / f"b.{fmt}", fmt).read_bytes()
            assert a == b

    def test_json_round_trip(self, chains, tmp_path):
        corpus, kps = chains
        g = build_graph(kps + [kp("http://ext.org/z", 0.25, 3, 1, in_corpus=False)], corpus)
        path = export_graph(g, tmp_path / "g.json", "json")
        data = json.loads(path.read_text())
        assert set(data) == {"nodes", "edges"}
        assert set(data["nodes"][0]) == {"url", "repr", "windows", "topics", "in_corpus"}
        back = from_json(path.read_text())
        assert set(back.nodes) == set(g.nodes)
        assert back.edges == g.edges
        assert back.nodes["http://ext.org/z"].memberships == ((3, 1),)

    def test_quotes_escaped(self):
        g = KeyPostGraph(nodes=build_graph([kp('http://k.org/"q"')], make_corpus()).nodes)
        assert r'"http://k.org/\"q\""' in to_dot(g)

    def test_bad_format(self, tmp_path):
        with pytest.raises(ValueError):
            export_graph(KeyPostGraph(), tmp_path / "g.x", "graphml")
