"""Citation graph over elected key posts, its components, and file export."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Literal

import networkx as nx

from stormtrace.affinity import KeyPost
from stormtrace.corpus import Corpus, RedirectMap, resolve_redirects

DOT_MAX_WIDTH = 2.0


@dataclass(frozen=True)
class GraphNode:
    url: str
    repr: float
    in_corpus: bool
    memberships: tuple[tuple[int, int], ...]  # sorted (window_index, topic)


@dataclass(frozen=True)
class KeyPostGraph:
    nodes: dict[str, GraphNode] = field(default_factory=dict)
    edges: frozenset[tuple[str, str]] = frozenset()  # (citing, cited)

    @property
    def node_size(self) -> dict[str, float]:
        return {url: node.repr for url, node in self.nodes.items()}

    def out_degree(self, url: str) -> int:
        return sum(1 for src, _ in self.edges if src == url)

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(sorted(self.nodes))
        g.add_edges_from(sorted(self.edges))
        return g


def merge_key_posts(key_posts: Iterable[KeyPost]) -> dict[str, GraphNode]:
    """Deduplicate elections by URL, keeping the best score and every membership."""
    best: dict[str, float] = {}
    in_corpus: dict[str, bool] = {}
    members: dict[str, set[tuple[int, int]]] = {}
    for kp in key_posts:
        best[kp.url] = max(best.get(kp.url, kp.repr), kp.repr)
        in_corpus[kp.url] = in_corpus.get(kp.url, False) or kp.in_corpus
        members.setdefault(kp.url, set()).add((kp.window_index, kp.topic))
    return {
        url: GraphNode(url, best[url], in_corpus[url], tuple(sorted(members[url])))
        for url in sorted(best)
    }


def build_graph(
    key_posts: Iterable[KeyPost], corpus: Corpus, redirects: RedirectMap | None = None
) -> KeyPostGraph:
    """Edge ``b -> a`` whenever key post ``b`` is a corpus post citing key post ``a``.

    Key posts outside the corpus have no known content, so they only ever
    receive edges.
    """
    nodes = merge_key_posts(key_posts)
    edges = set()
    for url in nodes:
        post = corpus.by_id.get(url)
        if post is None:
            continue
        for ref in post.refs:
            target = resolve_redirects(ref, redirects) if redirects else ref
            if target != url and target in nodes:
                edges.add((url, target))
    return KeyPostGraph(nodes, frozenset(edges))


def connected_components(graph: KeyPostGraph) -> list[set[str]]:
    """Weak components, largest first, ties broken by smallest URL."""
    comps = [set(c) for c in nx.weakly_connected_components(graph.to_networkx())]
    comps.sort(key=lambda c: (-len(c), min(c)))
    return comps


def _dot_quote(text: str) -> str:
    return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'


def to_dot(graph: KeyPostGraph) -> str:
    top = max((n.repr for n in graph.nodes.values()), default=0.0)
    lines = ["digraph keyposts {"]
    for url in sorted(graph.nodes):
        width = DOT_MAX_WIDTH * graph.nodes[url].repr / top if top > 0 else DOT_MAX_WIDTH
        lines.append(f"  {_dot_quote(url)} [label={_dot_quote(url)}, width={width:.6f}];")
    for src, dst in sorted(graph.edges):
        lines.append(f"  {_dot_quote(src)} -> {_dot_quote(dst)};")
    lines.append("}")
    return "\n".join(lines) + "\n"


def to_json(graph: KeyPostGraph) -> str:
    """``windows[i]`` and ``topics[i]`` together name one election of the node."""
    payload = {
        "nodes": [
            {
                "url": n.url,
                "repr": round(n.repr, 6),
                "windows": [w for w, _ in n.memberships],
                "topics": [t for _, t in n.memberships],
                "in_corpus": n.in_corpus,
            }
            for n in (graph.nodes[u] for u in sorted(graph.nodes))
        ],
        "edges": [{"from": s, "to": d} for s, d in sorted(graph.edges)],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def from_json(text: str) -> KeyPostGraph:
    data = json.loads(text)
    nodes = {
        n["url"]: GraphNode(
            n["url"], float(n["repr"]), bool(n["in_corpus"]), tuple(zip(n["windows"], n["topics"]))
        )
        for n in data["nodes"]
    }
    edges = frozenset((e["from"], e["to"]) for e in data["edges"])
    return KeyPostGraph(nodes, edges)


def export_graph(graph: KeyPostGraph, path: str | Path, fmt: Literal["dot", "json"] = "dot") -> Path:
    if fmt == "dot":
        text = to_dot(graph)
    elif fmt in ("json", "edge-json"):
        text = to_json(graph)
    else:
        raise ValueError(f"unknown graph format {fmt!r}")
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path
