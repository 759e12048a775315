"""End-to-end batch run: ingest, window, fit topics, elect, analyse authors, export."""

from __future__ import annotations

import csv
import io
import json
import logging
import time
import warnings
from collections import defaultdict
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Iterable, Iterator, Literal, Sequence

import numpy as np

from stormtrace.affinity import AffinityRecord, KeyPost, compute_affinities, elect_key_posts
from stormtrace.authors import (
    aggregated_influence,
    author_boost_scores,
    elect_boost_authors,
)
from stormtrace.corpus import Corpus, RedirectMap, format_timestamp, load_corpus
from stormtrace.errors import DegenerateKWarning, EmptyWindow, StormtraceError
from stormtrace.graph import build_graph, connected_components, export_graph
from stormtrace.textprep import StopwordList, TokenizedPost, tokenize_post
from stormtrace.topics import LdaParams, fit_lda
from stormtrace.windowing import TimeWindow, WindowSpec, make_windows, posts_in_window

logger = logging.getLogger(__name__)

OUTPUT_FILES = (
    "key_posts.json",
    "key_authors.json",
    "boost_authors.json",
    "graph.dot",
    "graph.json",
    "timeline.csv",
    "report.json",
)


class StageError(StormtraceError):
    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r} failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class PipelineConfig:
    input_path: Path
    redirect_map_path: Path | None = None
    stopwords_path: Path | None = None
    gamma_days: int = 7
    delta_days: int = 1
    k: int = 10
    seed: int = 42
    lda_iters: int = 500
    lda_burnin: int = 100
    top_x: int = 1
    elect_mode: Literal["top", "percent"] = "top"
    percent_theta: float = 0.8
    boost_theta: float = 0.8
    out_dir: Path = Path("out")

    def __post_init__(self):
        self.window_spec()
        self.lda_params()
        if self.top_x < 1:
            raise ValueError("top_x must be >= 1")
        if self.elect_mode not in ("top", "percent"):
            raise ValueError(f"elect_mode must be 'top' or 'percent', not {self.elect_mode!r}")
        for name in ("percent_theta", "boost_theta"):
            if not 0 < getattr(self, name) <= 1:
                raise ValueError(f"{name} must lie in (0, 1]")

    def window_spec(self) -> WindowSpec:
        return WindowSpec(self.gamma_days, self.delta_days)

    def lda_params(self, window_index: int | None = None) -> LdaParams:
        seed = self.seed
        if window_index is not None:
            seed = int(np.random.SeedSequence([self.seed, window_index]).generate_state(1, np.uint64)[0])
        return LdaParams(
            k=self.k, iterations=self.lda_iters, burn_in=self.lda_burnin, seed=seed
        )

    def describe(self) -> dict:
        """Run parameters as written to report.json (no filesystem paths)."""
        return {
            "input": self.input_path.name,
            "redirect_map": self.redirect_map_path.name if self.redirect_map_path else None,
            "stopwords": self.stopwords_path.name if self.stopwords_path else None,
            "gamma_days": self.gamma_days,
            "delta_days": self.delta_days,
            "k": self.k,
            "seed": self.seed,
            "lda_iters": self.lda_iters,
            "lda_burnin": self.lda_burnin,
            "top_x": self.top_x,
            "elect_mode": self.elect_mode,
            "percent_theta": self.percent_theta,
            "boost_theta": self.boost_theta,
        }


@dataclass
class WindowResult:
    """Everything later stages need from one window, serializable at full precision."""

    window: TimeWindow
    post_ids: list[str]
    assignment: dict[str, int] = field(default_factory=dict)
    top_words: list[list[str]] = field(default_factory=list)
    records: list[AffinityRecord] = field(default_factory=list)
    key_posts: list[KeyPost] = field(default_factory=list)

    @property
    def fitted(self) -> bool:
        return bool(self.assignment)

    def to_dict(self) -> dict:
        return {
            "window": {
                "index": self.window.index,
                "start": self.window.start.isoformat(),
                "end": self.window.end.isoformat(),
            },
            "post_ids": self.post_ids,
            "assignment": self.assignment,
            "top_words": self.top_words,
            "records": [r.to_dict() for r in self.records],
            "key_posts": [kp.to_dict() for kp in self.key_posts],
        }

    @classmethod
    def from_dict(cls, data: dict) -> WindowResult:
        w = data["window"]
        return cls(
            window=TimeWindow(
                w["index"], datetime.fromisoformat(w["start"]), datetime.fromisoformat(w["end"])
            ),
            post_ids=list(data["post_ids"]),
            assignment={k: int(v) for k, v in data["assignment"].items()},
            top_words=[list(ws) for ws in data["top_words"]],
            records=[AffinityRecord(**r) for r in data["records"]],
            key_posts=[KeyPost.from_dict(kp) for kp in data["key_posts"]],
        )


def save_window_results(results: Sequence[WindowResult], path: str | Path) -> None:
    Path(path).write_text(json.dumps([r.to_dict() for r in results]), encoding="utf-8")


def load_window_results(path: str | Path) -> list[WindowResult]:
    return [WindowResult.from_dict(d) for d in json.loads(Path(path).read_text(encoding="utf-8"))]


@dataclass
class RunReport:
    corpus: dict
    windows: list[dict]
    key_authors: list[dict]
    boost_authors: list[dict]
    graph: dict
    config: dict
    timings: dict[str, float] = field(default_factory=dict)

    def to_dict(self) -> dict:
        # timings are left out so that reruns stay byte-identical
        data = asdict(self)
        del data["timings"]
        return data


class _Timer:
    def __init__(self):
        self.timings: dict[str, float] = {}

    @contextmanager
    def stage(self, name: str) -> Iterator[None]:
        t0 = time.perf_counter()
        try:
            yield
        except StageError:
            raise
        except (StormtraceError, OSError, ValueError) as exc:
            raise StageError(name, exc) from exc
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - t0


def analyze_window(
    cfg: PipelineConfig,
    corpus: Corpus,
    window: TimeWindow,
    tokens: dict[str, TokenizedPost],
) -> WindowResult:
    posts = posts_in_window(corpus, window)
    result = WindowResult(window, [p.id for p in posts])
    docs = [tokens[p.id] for p in posts]
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always", DegenerateKWarning)
            model = fit_lda(docs, cfg.lda_params(window.index), window_index=window.index)
    except EmptyWindow:
        logger.info("window %d: no tokenized posts, skipped", window.index)
        return result
    for w in caught:
        logger.info("%s", w.message)
    result.assignment = dict(sorted(model.assignment.items()))
    result.top_words = [model.top_words(t, 5) for t in range(model.k)]
    result.records = compute_affinities(model, posts, corpus.ids)
    for t in range(model.k):
        result.key_posts.extend(
            elect_key_posts(
                result.records,
                t,
                x=cfg.top_x,
                mode=cfg.elect_mode,
                theta=cfg.percent_theta,
                corpus=corpus,
            )
        )
    return result


def timeline_rows(records: Iterable[AffinityRecord]) -> list[tuple[int, int, str, float, float]]:
    """(window, topic, url, repr, share%) for every positive-scoring record."""
    groups: dict[tuple[int, int], list[AffinityRecord]] = defaultdict(list)
    for r in records:
        if r.repr > 0:
            groups[(r.window_index, r.topic)].append(r)
    rows = []
    for key in sorted(groups):
        group = sorted(groups[key], key=lambda r: (-r.repr, r.url))
        total = sum(r.repr for r in group)
        rows.extend((key[0], key[1], r.url, r.repr, 100.0 * r.repr / total) for r in group)
    return rows


def emit_timeline(records: Iterable[AffinityRecord], path: str | Path) -> Path:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["window_index", "topic", "url", "repr", "share"])
    for w, t, url, score, share in timeline_rows(records):
        writer.writerow([w, t, url, f"{score:.6f}", f"{share:.6f}"])
    path = Path(path)
    path.write_text(buf.getvalue(), encoding="utf-8", newline="\n")
    return path


def _dump_json(data, path: Path) -> None:
    path.write_text(
        json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n",
        encoding="utf-8",
        newline="\n",
    )


def _key_post_dict(kp: KeyPost) -> dict:
    d = kp.to_dict()
    d["repr"] = round(d["repr"], 6)
    return d


def finalize(
    cfg: PipelineConfig,
    corpus: Corpus,
    windows: Sequence[TimeWindow],
    results: Sequence[WindowResult],
    redirects: RedirectMap | None = None,
    timer: _Timer | None = None,
) -> RunReport:
    """Cross-window stages: graph, author metrics, and every output file."""
    timer = timer or _Timer()
    out = Path(cfg.out_dir)
    key_posts = [kp for r in results for kp in r.key_posts]

    with timer.stage("graph"):
        graph = build_graph(key_posts, corpus, redirects)
        components = connected_components(graph)
    with timer.stage("authors"):
        key_authors = aggregated_influence(key_posts, corpus)
        boosts = author_boost_scores(corpus, windows)
        elected = {b.author for b in elect_boost_authors(boosts, cfg.boost_theta)}

    boost_rows = [dict(b.to_dict(), elected=b.author in elected) for b in boosts]
    covered = set()
    window_rows = []
    for r in results:
        covered.update(r.post_ids)
        sizes = defaultdict(int)
        for t in r.assignment.values():
            sizes[t] += 1
        window_rows.append(
            {
                "index": r.window.index,
                "label": f"W{r.window.index + 1}",
                "start": format_timestamp(r.window.start),
                "end": format_timestamp(r.window.end),
                "post_count": len(r.post_ids),
                "tokenized_count": len(r.assignment),
                "topic_count": cfg.k if r.fitted else 0,
                "topics": [
                    {
                        "topic": t,
                        "size": sizes[t],
                        "top_words": r.top_words[t],
                        "key_posts": [
                            {"url": kp.url, "repr": round(kp.repr, 6)}
                            for kp in r.key_posts
                            if kp.topic == t
                        ],
                    }
                    for t in range(cfg.k)
                ]
                if r.fitted
                else [],
            }
        )
    report = RunReport(
        corpus={
            "posts": len(corpus),
            "first_at": format_timestamp(corpus.first_at),
            "last_at": format_timestamp(corpus.last_at),
            "span_days": round(corpus.span_days, 6),
            "windows": len(windows),
            "window_post_total": sum(len(r.post_ids) for r in results),
            "posts_in_no_window": len(corpus.ids - covered),
        },
        windows=window_rows,
        key_authors=[a.to_dict() for a in key_authors],
        boost_authors=boost_rows,
        graph={
            "nodes": len(graph.nodes),
            "edges": len(graph.edges),
            "components": len(components),
            "component_sizes": [len(c) for c in components],
        },
        config=cfg.describe(),
        timings=timer.timings,
    )

    with timer.stage("export"):
        out.mkdir(parents=True, exist_ok=True)
        ordered = sorted(key_posts, key=lambda kp: (kp.window_index, kp.topic, -kp.repr, kp.url))
        _dump_json([_key_post_dict(kp) for kp in ordered], out / "key_posts.json")
        _dump_json(report.key_authors, out / "key_authors.json")
        _dump_json(boost_rows, out / "boost_authors.json")
        export_graph(graph, out / "graph.dot", "dot")
        export_graph(graph, out / "graph.json", "json")
        emit_timeline([rec for r in results for rec in r.records], out / "timeline.csv")
        _dump_json(report.to_dict(), out / "report.json")
    return report


def run_pipeline(cfg: PipelineConfig) -> RunReport:
    timer = _Timer()
    with timer.stage("ingest"):
        redirects = RedirectMap.load(cfg.redirect_map_path) if cfg.redirect_map_path else None
        corpus = load_corpus(cfg.input_path, redirects)
        stops = (
            StopwordList.load(cfg.stopwords_path) if cfg.stopwords_path else StopwordList.default()
        )
    logger.info("ingested %d posts spanning %.2f days", len(corpus), corpus.span_days)

    with timer.stage("windowing"):
        windows = make_windows(corpus, cfg.window_spec())
    logger.info("%d windows (gamma=%dd, delta=%dd)", len(windows), cfg.gamma_days, cfg.delta_days)

    with timer.stage("textprep"):
        tokens = {p.id: tokenize_post(p, stops) for p in corpus.posts}

    with timer.stage("topics"):
        results = [analyze_window(cfg, corpus, w, tokens) for w in windows]

    report = finalize(cfg, corpus, windows, results, redirects, timer)
    for stage, secs in report.timings.items():
        logger.info("stage %-9s %.3fs", stage, secs)
    return report
