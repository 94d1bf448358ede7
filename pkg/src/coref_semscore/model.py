"""Core data model: documents, mentions, clusters, and semantic spans.

Token indexing is 0-based and spans are half-open [start, end) over the
document's flat token sequence.  Sentence boundaries are optional metadata
only; all scoring happens over document-level token indices.  Category
labels are plain uppercase strings validated against a CategoryInventory
(see inventory.py).

Everything here is frozen after construction, so documents can be shared
across workers without locking; pipeline stages return new objects.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Mapping, Sequence

_LABEL_RE = re.compile(r"[A-Z]+\Z")

SIDES = ("gold", "predicted")


class LabelSource(Enum):
    """How a mention obtained its semantic label."""

    NONE = "none"
    DIRECT = "direct"
    PROPAGATED = "propagated"


def normalize_label(raw: str) -> str:
    """Trim and upper-case a raw category string.

    Raises ValueError when the result is not made of letters only.
    """
    label = raw.strip().upper()
    if not _LABEL_RE.fullmatch(label):
        raise ValueError(f"bad category label {raw!r}: expected letters only")
    return label


@dataclass(frozen=True, order=True)
class Span:
    start: int
    end: int

    def __post_init__(self) -> None:
        if not isinstance(self.start, int) or not isinstance(self.end, int):
            raise ValueError(f"span bounds must be integers, got [{self.start}, {self.end})")
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid span [{self.start}, {self.end}): need 0 <= start < end")

    def __len__(self) -> int:
        return self.end - self.start


def token_set(span: Span) -> set[int]:
    """Indices covered by a span: {start, ..., end - 1}."""
    return set(range(span.start, span.end))


@dataclass(frozen=True)
class Mention:
    """A token span, optionally carrying a semantic label.

    `assignment_overlap` is only present for directly assigned labels and
    records the winning Jaccard score at assignment time.
    """

    span: Span
    assigned_label: str | None = None
    label_source: LabelSource = LabelSource.NONE
    assignment_overlap: float | None = None

    def __post_init__(self) -> None:
        if (self.assigned_label is None) != (self.label_source is LabelSource.NONE):
            raise ValueError("assigned_label must be present iff label_source != none")
        if (self.assignment_overlap is not None) != (self.label_source is LabelSource.DIRECT):
            raise ValueError("assignment_overlap must be present iff label_source = direct")


@dataclass(frozen=True)
class Cluster:
    """A non-empty set of coreferential mentions, optionally labeled."""

    mentions: tuple[Mention, ...]
    cluster_label: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "mentions", tuple(self.mentions))
        if not self.mentions:
            raise ValueError("cluster must contain at least one mention")
        spans = [m.span for m in self.mentions]
        if len(set(spans)) != len(spans):
            raise ValueError("duplicate mention span within cluster")

    def spans(self) -> list[Span]:
        return [m.span for m in self.mentions]


@dataclass(frozen=True)
class SemanticSpan:
    """A tagger-produced span with a category label."""

    span: Span
    label: str


@dataclass(frozen=True)
class Document:
    doc_id: str
    tokens: tuple[str, ...]
    gold_clusters: tuple[Cluster, ...] = ()
    predicted_clusters: tuple[Cluster, ...] = ()
    semantic_spans: tuple[SemanticSpan, ...] = ()
    sentence_boundaries: tuple[int, ...] | None = None
    extras: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "gold_clusters", tuple(self.gold_clusters))
        object.__setattr__(self, "predicted_clusters", tuple(self.predicted_clusters))
        object.__setattr__(self, "semantic_spans", tuple(self.semantic_spans))
        if self.sentence_boundaries is not None:
            object.__setattr__(self, "sentence_boundaries", tuple(self.sentence_boundaries))

    def clusters(self, side: str) -> tuple[Cluster, ...]:
        if side == "gold":
            return self.gold_clusters
        if side == "predicted":
            return self.predicted_clusters
        raise ValueError(f"unknown side {side!r}, expected one of {SIDES}")

    def with_clusters(self, side: str, clusters: Sequence[Cluster]) -> "Document":
        if side == "gold":
            return replace(self, gold_clusters=tuple(clusters))
        if side == "predicted":
            return replace(self, predicted_clusters=tuple(clusters))
        raise ValueError(f"unknown side {side!r}, expected one of {SIDES}")

    def mention_text(self, mention: Mention) -> str:
        return " ".join(self.tokens[mention.span.start:mention.span.end])


def _span_str(span: Span) -> str:
    return f"[{span.start}, {span.end})"


def validate_document(doc: Document) -> list[str]:
    """Check Document invariants, returning one description per violation.

    Never raises and never mutates the document; an empty list means the
    document is well formed.
    """
    violations: list[str] = []
    n = len(doc.tokens)
    if not doc.doc_id:
        violations.append("doc_id: must be non-empty")
    for side in SIDES:
        seen: dict[Span, int] = {}
        for ci, cluster in enumerate(doc.clusters(side)):
            for mi, mention in enumerate(cluster.mentions):
                if mention.span.end > n:
                    violations.append(
                        f"{side}_clusters[{ci}].mentions[{mi}]: span "
                        f"{_span_str(mention.span)} out of range ({n} tokens)"
                    )
                if mention.span in seen and seen[mention.span] != ci:
                    violations.append(
                        f"{side}_clusters: span {_span_str(mention.span)} appears "
                        f"in clusters {seen[mention.span]} and {ci}"
                    )
                else:
                    seen.setdefault(mention.span, ci)
    for si, sem in enumerate(doc.semantic_spans):
        if sem.span.end > n:
            violations.append(
                f"semantic_spans[{si}]: span {_span_str(sem.span)} out of range ({n} tokens)"
            )
    return violations


class DocumentPairingError(ValueError):
    """Gold and predicted corpora do not cover the same doc_ids."""


def pair_by_doc_id(
    gold_docs: Iterable[Document], pred_docs: Iterable[Document]
) -> list[tuple[Document, Document]]:
    """Pair two corpora by doc_id, preserving gold order.

    Raises DocumentPairingError listing the ids missing from either side.
    """
    gold = list(gold_docs)
    pred_by_id = {d.doc_id: d for d in pred_docs}
    gold_ids = {d.doc_id for d in gold}
    missing = sorted(gold_ids - set(pred_by_id))
    extra = sorted(set(pred_by_id) - gold_ids)
    if missing or extra:
        parts = []
        if missing:
            parts.append(f"missing from predicted corpus: {', '.join(missing)}")
        if extra:
            parts.append(f"missing from gold corpus: {', '.join(extra)}")
        raise DocumentPairingError("; ".join(parts))
    return [(d, pred_by_id[d.doc_id]) for d in gold]
