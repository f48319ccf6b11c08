"""Hierarchical topic map over ontology classes.

Each class becomes one templated document; documents are embedded and
grouped by deterministic average-linkage agglomerative clustering under
cosine distance. Leaf clusters get c-TF-IDF keywords
(tf(t,c) · ln(1 + A/f(t)) with A = mean token count per leaf and f = term
count across all leaves) and every topic gets a textual label from a
provider, falling back to the top keyword terms offline.

The whole pipeline is byte-deterministic: merge ties are broken by the
lexicographically smallest pair of member-IRI sets, and keyword ties by
ascending term.
"""

from __future__ import annotations

import json
import math
import re
from collections import Counter
from dataclasses import dataclass, replace
from typing import Mapping, Protocol, Sequence

import numpy as np
import requests

from .embed import cosine, l2_normalize
from .errors import ProviderError, RequestTimeout, TransportError, UnknownTopic
from .ontology import OntologyClass, OntologyModel
from .terms import Iri

# Fixed 50-word stopword list; includes the template words ("class",
# "parents", "properties", "none", "any") so they never dominate keywords.
STOPWORDS = frozenset(
    """a about all an and any are as at be but by class for from has have in
    into is it its no none not of on or other parents properties such that
    the their then these they this to was were what when where which who
    will with within""".split()
)

_TOKEN = re.compile(r"[a-z0-9]+")


@dataclass(frozen=True)
class ClassDocument:
    class_iri: Iri
    text: str


@dataclass(frozen=True)
class Topic:
    id: int
    label: str
    keywords: tuple[tuple[str, float], ...]
    member_classes: frozenset[Iri]
    parent_topic_id: int | None
    centroid: np.ndarray

    def sorted_members(self) -> list[Iri]:
        return sorted(self.member_classes, key=lambda i: i.value)


@dataclass(frozen=True)
class TopicTree:
    topics: dict[int, Topic]
    roots: frozenset[int]

    def leaves(self) -> list[Topic]:
        parents = {t.parent_topic_id for t in self.topics.values() if t.parent_topic_id is not None}
        internal = set(parents)
        return [t for tid, t in sorted(self.topics.items()) if tid not in internal]

    def get(self, topic_id: int) -> Topic:
        topic = self.topics.get(topic_id)
        if topic is None:
            raise UnknownTopic(f"no topic {topic_id}", topicId=topic_id)
        return topic


def default_leaf_count(class_count: int) -> int:
    return max(2, math.ceil(math.sqrt(class_count)))


def class_document(cls: OntologyClass, ontology: OntologyModel) -> ClassDocument:
    """Template: class label, parent labels, and the labels/ranges of all
    properties whose domain is the class or one of its ancestors."""
    parent_iris = sorted(cls.parents, key=lambda i: i.value)
    parents = ", ".join(ontology.class_label(p) for p in parent_iris) or "none"
    admissible = {cls.iri} | ontology.ancestors(cls.iri)
    props = []
    for iri in sorted(ontology.properties, key=lambda i: i.value):
        prop = ontology.properties[iri]
        if prop.domain is not None and prop.domain in admissible:
            if prop.range is not None:
                range_label = ontology.class_label(prop.range) if ontology.has_class(
                    prop.range
                ) else prop.range.local_name()
            else:
                range_label = "any"
            props.append(f"{prop.label} ({range_label})")
    properties = ", ".join(props) or "none"
    text = f"Class: {cls.label}. Parents: {parents}. Properties: {properties}."
    return ClassDocument(class_iri=cls.iri, text=text)


def _cluster_key(members: frozenset[Iri]) -> tuple[str, ...]:
    return tuple(sorted(iri.value for iri in members))


def cluster_classes(
    vectors: Mapping[Iri, np.ndarray], target_leaf_count: int
) -> TopicTree:
    """Average-linkage agglomerative clustering under cosine distance.

    Returns a skeleton tree (members, hierarchy, centroids; labels and
    keywords empty). The K clusters alive when merging reaches K become
    leaves; later merges become internal topics up to a single root.
    """
    if not vectors:
        raise ValueError("cluster_classes requires at least one class vector")
    if target_leaf_count < 1:
        raise ValueError(f"target_leaf_count must be >= 1, got {target_leaf_count}")

    iris = sorted(vectors, key=lambda i: i.value)
    dist: dict[tuple[Iri, Iri], float] = {}
    for i, a in enumerate(iris):
        for b in iris[i + 1 :]:
            d = 1.0 - cosine(vectors[a], vectors[b])
            dist[(a, b)] = d
            dist[(b, a)] = d

    def average_distance(c1: frozenset[Iri], c2: frozenset[Iri]) -> float:
        total = 0.0
        for a in c1:
            for b in c2:
                total += dist[(a, b)]
        return total / (len(c1) * len(c2))

    active: list[frozenset[Iri]] = [frozenset({iri}) for iri in iris]
    merges: list[tuple[frozenset[Iri], frozenset[Iri], frozenset[Iri]]] = []
    while len(active) > 1:
        best: tuple[float, tuple[tuple[str, ...], tuple[str, ...]]] | None = None
        best_pair: tuple[int, int] | None = None
        for i in range(len(active)):
            for j in range(i + 1, len(active)):
                d = average_distance(active[i], active[j])
                keys = tuple(sorted((_cluster_key(active[i]), _cluster_key(active[j]))))
                candidate = (d, keys)
                if best is None or candidate < best:
                    best = candidate
                    best_pair = (i, j)
        assert best_pair is not None
        i, j = best_pair
        merged = active[i] | active[j]
        merges.append((active[i], active[j], merged))
        active = [c for idx, c in enumerate(active) if idx not in (i, j)] + [merged]

    n = len(iris)
    leaf_point = max(0, n - min(target_leaf_count, n))  # merges inside leaves
    leaf_state: list[frozenset[Iri]] = [frozenset({iri}) for iri in iris]
    for left, right, merged in merges[:leaf_point]:
        leaf_state = [c for c in leaf_state if c not in (left, right)] + [merged]

    def centroid_of(members: frozenset[Iri]) -> np.ndarray:
        stacked = np.array([vectors[m] for m in sorted(members, key=lambda i: i.value)])
        return l2_normalize(stacked.mean(axis=0))

    topics: dict[int, Topic] = {}
    cluster_topic: dict[tuple[str, ...], int] = {}
    for tid, members in enumerate(sorted(leaf_state, key=_cluster_key)):
        topics[tid] = Topic(
            id=tid,
            label="",
            keywords=(),
            member_classes=members,
            parent_topic_id=None,
            centroid=centroid_of(members),
        )
        cluster_topic[_cluster_key(members)] = tid

    next_id = len(topics)
    for left, right, merged in merges[leaf_point:]:
        tid = next_id
        next_id += 1
        topics[tid] = Topic(
            id=tid,
            label="",
            keywords=(),
            member_classes=merged,
            parent_topic_id=None,
            centroid=centroid_of(merged),
        )
        for child in (left, right):
            child_tid = cluster_topic[_cluster_key(child)]
            topics[child_tid] = replace(topics[child_tid], parent_topic_id=tid)
        cluster_topic[_cluster_key(merged)] = tid

    roots = frozenset(t.id for t in topics.values() if t.parent_topic_id is None)
    return TopicTree(topics=topics, roots=roots)


def tokenize(text: str) -> list[str]:
    """Lowercased maximal alphanumeric runs, length >= 2, minus stopwords."""
    return [t for t in _TOKEN.findall(text.lower()) if len(t) >= 2 and t not in STOPWORDS]


def ctfidf_keywords(
    tree: TopicTree,
    documents: Mapping[Iri, ClassDocument],
    top_n: int = 10,
) -> TopicTree:
    """Attach c-TF-IDF keywords to every topic.

    The corpus statistics (term totals f and mean-tokens-per-leaf A) come
    from the leaf partition; internal topics reuse them with their own tf.
    """
    leaves = tree.leaves()
    leaf_tokens: dict[int, list[str]] = {}
    for leaf in leaves:
        tokens: list[str] = []
        for iri in leaf.sorted_members():
            doc = documents.get(iri)
            if doc is not None:
                tokens.extend(tokenize(doc.text))
        leaf_tokens[leaf.id] = tokens

    term_totals: Counter[str] = Counter()
    total_tokens = 0
    for tokens in leaf_tokens.values():
        term_totals.update(tokens)
        total_tokens += len(tokens)
    mean_per_leaf = total_tokens / len(leaves) if leaves else 0.0

    def weights_for(members: frozenset[Iri]) -> tuple[tuple[str, float], ...]:
        tf: Counter[str] = Counter()
        for iri in sorted(members, key=lambda i: i.value):
            doc = documents.get(iri)
            if doc is not None:
                tf.update(tokenize(doc.text))
        scored = [
            (term, count * math.log(1.0 + mean_per_leaf / term_totals[term]))
            for term, count in tf.items()
            if term_totals[term] > 0
        ]
        scored.sort(key=lambda pair: (-pair[1], pair[0]))
        return tuple(scored[:top_n])

    topics = {
        tid: replace(topic, keywords=weights_for(topic.member_classes))
        for tid, topic in tree.topics.items()
    }
    return TopicTree(topics=topics, roots=tree.roots)


class LabelProvider(Protocol):
    mode: str

    def label(self, keywords: Sequence[str], examples: Sequence[str]) -> str: ...


class OfflineLabeler:
    """Top-3 keyword terms joined with ', ', first letter capitalized."""

    mode = "offline"

    def label(self, keywords: Sequence[str], examples: Sequence[str]) -> str:
        terms = list(keywords[:3]) or list(examples[:3]) or ["topic"]
        joined = ", ".join(terms)
        return joined[0].upper() + joined[1:]


class RemoteLabeler:
    """Labeling service client.

    Wire format: POST {"keywords": [...], "examples": [...]} ->
    {"label": "..."}. Labels longer than 60 characters are truncated; empty
    labels are a provider error.
    """

    mode = "remote"
    max_label_length = 60

    def __init__(self, endpoint_url: str, timeout: float = 30.0,
                 session: requests.Session | None = None):
        self.endpoint_url = endpoint_url
        self.timeout = timeout
        self._session = session or requests.Session()

    def label(self, keywords: Sequence[str], examples: Sequence[str]) -> str:
        payload = {"keywords": list(keywords), "examples": list(examples)}
        try:
            response = self._session.post(self.endpoint_url, json=payload, timeout=self.timeout)
        except requests.Timeout as exc:
            raise RequestTimeout(
                f"labeling service timed out after {self.timeout}s", url=self.endpoint_url
            ) from exc
        except requests.RequestException as exc:
            raise TransportError(
                f"labeling service unreachable: {exc}", url=self.endpoint_url
            ) from exc
        if response.status_code != 200:
            raise ProviderError(
                f"labeling service returned {response.status_code}",
                url=self.endpoint_url,
                status=response.status_code,
            )
        try:
            label = response.json()["label"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise ProviderError(f"malformed labeling response: {exc!r}") from exc
        if not isinstance(label, str) or not label.strip():
            raise ProviderError("labeling service returned an empty label")
        return label.strip()[: self.max_label_length]


@dataclass(frozen=True)
class LabelingResult:
    tree: TopicTree
    fallback_topic_ids: tuple[int, ...]  # topics whose provider call failed


def label_topics(
    tree: TopicTree,
    provider: LabelProvider,
    ontology: OntologyModel,
) -> LabelingResult:
    """Label every topic. Provider failures fall back to the offline label
    for that topic and are reported in ``fallback_topic_ids``."""
    offline = OfflineLabeler()
    fallbacks: list[int] = []
    labeled: dict[int, Topic] = {}
    for tid in sorted(tree.topics):
        topic = tree.topics[tid]
        keywords = [term for term, _ in topic.keywords[:10]]
        examples = [ontology.class_label(iri) for iri in topic.sorted_members()[:3]]
        try:
            label = provider.label(keywords, examples)
        except (ProviderError, TransportError, RequestTimeout):
            if isinstance(provider, OfflineLabeler):
                raise
            label = offline.label(keywords, examples)
            fallbacks.append(tid)
        if not label:
            label = offline.label(keywords, examples)
            if tid not in fallbacks:
                fallbacks.append(tid)
        labeled[tid] = replace(topic, label=label)
    return LabelingResult(
        tree=TopicTree(topics=labeled, roots=tree.roots),
        fallback_topic_ids=tuple(fallbacks),
    )
