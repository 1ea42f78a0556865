"""Duplicate detection: TF-IDF vectors, cosine scoring, duplicate clusters.

The pipeline is deliberately plain: lowercase, split on non-alphanumeric
runs, drop short tokens and stopwords, no stemming. Weights use raw term
frequency with smoothed idf, L2-normalized so cosine similarity is a dot
product in [0, 1].

Candidate generation uses inverted-index blocking: only pairs sharing at
least one vocabulary token are scored, which is lossless because disjoint
vectors have cosine 0.
"""
from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .graph import IssueGraph
from .model import (
    DependencyStatus,
    DependencyType,
    Issue,
    UnknownIssueError,
    ValidationError,
)

# Fixed English stopword list; the pipeline must stay deterministic and
# language-tool-free, so this ships with the package instead of depending
# on an NLP library's mutable list.
STOPWORDS = frozenset(
    """
    a about above after again against all am an and any are as at be because
    been before being below between both but by can cannot could did do does
    doing down during each few for from further had has have having he her
    here hers herself him himself his how i if in into is it its itself just
    me more most my myself no nor not now of off on once only or other our
    ours ourselves out over own same she should so some such than that the
    their theirs them themselves then there these they this those through to
    too under until up very was we were what when where which while who whom
    why will with would you your yours yourself yourselves
    """.split()
)

MIN_TOKEN_LENGTH = 2


@dataclass
class TokenBag:
    issue: str
    counts: dict[str, int]


def text_preprocess(issue: Issue) -> TokenBag:
    """Token bag over title + description (comments stay out of the model)."""
    text = f"{issue.title} {issue.description}".lower()
    counts: Counter[str] = Counter()
    token: list[str] = []
    for ch in text + " ":
        if ch.isalnum():
            token.append(ch)
            continue
        if token:
            word = "".join(token)
            if len(word) >= MIN_TOKEN_LENGTH and word not in STOPWORDS:
                counts[word] += 1
            token = []
    return TokenBag(issue=issue.key, counts=dict(counts))


@dataclass
class TfidfModel:
    vocabulary: dict[str, int]
    doc_freq: dict[str, int]
    n_docs: int
    vectors: dict[str, dict[int, float]]
    # token index -> issue keys containing it, for blocking
    postings: dict[int, list[str]] = field(default_factory=dict)

    def idf(self, token: str) -> float:
        df = self.doc_freq.get(token, 0)
        return math.log((1 + self.n_docs) / (1 + df)) + 1.0

    def _weigh(self, counts: dict[str, int]) -> dict[int, float]:
        weights = {}
        for token, tf in counts.items():
            idx = self.vocabulary.get(token)
            if idx is None:
                continue  # frozen model; unseen tokens are dropped
            weights[idx] = tf * self.idf(token)
        norm = math.sqrt(sum(w * w for w in weights.values()))
        if norm > 0:
            weights = {i: w / norm for i, w in weights.items()}
        return weights

    def with_updates(self, bags: Iterable[TokenBag]) -> "TfidfModel":
        """Re-vectorize changed issues against the frozen idf table.

        Incremental updates do not re-fit document frequencies; a full
        rebuild is the periodic batch job.
        """
        vectors = dict(self.vectors)
        changed = []
        for bag in bags:
            vectors[bag.issue] = self._weigh(bag.counts)
            changed.append(bag.issue)
        model = TfidfModel(
            vocabulary=self.vocabulary,
            doc_freq=self.doc_freq,
            n_docs=self.n_docs,
            vectors=vectors,
        )
        model.postings = _rebuild_postings(self.postings, vectors, changed)
        return model


def _rebuild_postings(
    old: dict[int, list[str]],
    vectors: dict[str, dict[int, float]],
    changed: list[str],
) -> dict[int, list[str]]:
    changed_set = set(changed)
    postings: dict[int, list[str]] = {
        idx: [k for k in keys if k not in changed_set] for idx, keys in old.items()
    }
    for key in changed:
        for idx in vectors[key]:
            postings.setdefault(idx, []).append(key)
    return {idx: keys for idx, keys in postings.items() if keys}


def build_model(bags: Iterable[TokenBag]) -> TfidfModel:
    bag_list = list(bags)
    doc_freq: dict[str, int] = defaultdict(int)
    for bag in bag_list:
        for token in bag.counts:
            doc_freq[token] += 1
    vocabulary = {token: i for i, token in enumerate(sorted(doc_freq))}
    model = TfidfModel(
        vocabulary=vocabulary,
        doc_freq=dict(doc_freq),
        n_docs=len(bag_list),
        vectors={},
    )
    postings: dict[int, list[str]] = defaultdict(list)
    for bag in bag_list:
        vector = model._weigh(bag.counts)
        model.vectors[bag.issue] = vector
        for idx in vector:
            postings[idx].append(bag.issue)
    model.postings = dict(postings)
    return model


def build_model_for(issues: Iterable[Issue]) -> TfidfModel:
    return build_model(text_preprocess(issue) for issue in issues)


def cosine_sim(model: TfidfModel, a: str, b: str) -> float:
    """Dot product of the L2-normalized vectors; 0 when either is empty."""
    try:
        va = model.vectors[a]
        vb = model.vectors[b]
    except KeyError as exc:
        raise UnknownIssueError(exc.args[0]) from None
    if len(vb) < len(va):
        va, vb = vb, va
    total = 0.0
    for idx, w in va.items():
        other = vb.get(idx)
        if other is not None:
            total += w * other
    return min(total, 1.0)


def candidate_pairs(
    model: TfidfModel, involving: set[str] | None = None
) -> Iterator[tuple[str, str]]:
    """Unordered pairs sharing at least one vocabulary token.

    Superset-correct: every pair with nonzero cosine shares a token and is
    yielded exactly once. With `involving`, only pairs touching those issues
    are yielded (the incremental-update path).
    """
    seen: set[tuple[str, str]] = set()
    if involving is None:
        for keys in model.postings.values():
            for i in range(len(keys)):
                for j in range(i + 1, len(keys)):
                    a, b = keys[i], keys[j]
                    pair = (a, b) if a <= b else (b, a)
                    if pair not in seen:
                        seen.add(pair)
                        yield pair
        return
    for key in involving:
        vector = model.vectors.get(key)
        if not vector:
            continue
        for idx in vector:
            for other in model.postings.get(idx, ()):
                if other == key:
                    continue
                pair = (key, other) if key <= other else (other, key)
                if pair not in seen:
                    seen.add(pair)
                    yield pair


@dataclass(frozen=True)
class DuplicateProposal:
    a: str
    b: str
    score: float

    @property
    def pair(self) -> tuple[str, str]:
        return (self.a, self.b) if self.a <= self.b else (self.b, self.a)


@dataclass
class Cluster:
    members: list[str]
    reported_edges: list[tuple[str, str, float]]


def detect_duplicates(
    g: IssueGraph,
    thr: float,
    model: TfidfModel | None = None,
    exhaustive: bool = False,
    involving: set[str] | None = None,
) -> tuple[list[DuplicateProposal], list[Cluster]]:
    """Score candidate pairs and compress duplicates into clusters.

    Pairs already connected by ANY dependency are never proposed. Clusters
    are connected components over existing duplicate edges plus the new
    proposals; inside each cluster only a maximum-similarity spanning tree
    (m - 1 edges) is reported, with existing duplicate edges weighted 1.0.
    """
    if not 0.0 < thr <= 1.0:
        raise ValidationError(f"threshold must be in (0, 1], got {thr}")
    if model is None:
        model = build_model_for(g.issues.values())
    existing_pairs = {
        ((k, e.neighbor) if k <= e.neighbor else (e.neighbor, k))
        for k, entries in g.adjacency.items()
        for e in entries
    }
    if exhaustive:
        keys = sorted(k for k in g.issues if k in model.vectors)
        pairs: Iterable[tuple[str, str]] = (
            (keys[i], keys[j])
            for i in range(len(keys))
            for j in range(i + 1, len(keys))
        )
    else:
        pairs = candidate_pairs(model, involving)
    proposals = []
    for a, b in pairs:
        if (a, b) in existing_pairs:
            continue
        score = cosine_sim(model, a, b)
        if score >= thr:
            proposals.append(DuplicateProposal(a=a, b=b, score=score))
    proposals.sort(key=lambda p: (p.a, p.b))
    clusters = compute_clusters(g, proposals)
    return proposals, clusters


def compute_clusters(
    g: IssueGraph, proposals: list[DuplicateProposal]
) -> list[Cluster]:
    """Transitive closure over duplicate edges, reported as spanning trees."""
    edges: dict[tuple[str, str], float] = {}
    for key, entry in g.edges():
        if entry.dep_type != DependencyType.DUPLICATES:
            continue
        if entry.status == DependencyStatus.REJECTED:
            continue
        pair = (key, entry.neighbor) if key <= entry.neighbor else (entry.neighbor, key)
        edges[pair] = 1.0  # existing duplicate links outrank any proposal
    for prop in proposals:
        edges.setdefault(prop.pair, prop.score)

    parent: dict[str, str] = {}

    def find(x: str) -> str:
        root = x
        while parent.setdefault(root, root) != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    # Kruskal on descending similarity gives the maximum spanning tree of
    # each component; ties break on the key pair for determinism.
    ordered = sorted(edges.items(), key=lambda kv: (-kv[1], kv[0]))
    tree: list[tuple[str, str, float]] = []
    for (a, b), weight in ordered:
        ra, rb = find(a), find(b)
        if ra == rb:
            continue
        parent[ra] = rb
        tree.append((a, b, weight))

    groups: dict[str, list[str]] = defaultdict(list)
    for node in parent:
        groups[find(node)].append(node)
    edges_by_root: dict[str, list[tuple[str, str, float]]] = defaultdict(list)
    for a, b, weight in tree:
        edges_by_root[find(a)].append((a, b, weight))
    clusters = []
    for root, members in groups.items():
        if len(members) < 2:
            continue
        chosen = sorted(edges_by_root[root], key=lambda e: (e[0], e[1]))
        clusters.append(Cluster(members=sorted(members), reported_edges=chosen))
    clusters.sort(key=lambda c: c.members[0])
    return clusters
