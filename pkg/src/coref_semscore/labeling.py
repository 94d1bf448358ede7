"""Two-step semantic labeling of coreference clusters, plus diagnostics.

Step one (mention assignment) aligns each mention to the best-overlapping
semantic span by token-level Jaccard similarity and keeps that span's
label when the score beats the threshold.  Step two (propagation) votes a
label per cluster over its directly labeled mentions and writes it onto
every member, pronouns included; clusters with no directly labeled
mention stay unlabeled.

Coverage, label-distribution, and reference-agreement reports live here
too, since they are all statements about labeled corpora.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, replace
from math import fsum
from pathlib import Path
from typing import IO, Iterable, Mapping, Sequence, Union

from .inventory import CategoryInventory
from .model import Cluster, Document, LabelSource, Mention, Span

# Closed-class English pronouns: personal, possessive, reflexive,
# demonstrative.  Matched case-insensitively on single-token mentions.
DEFAULT_PRONOUNS = frozenset(
    """
    i me you he him she her it we us they them
    my mine your yours his hers its our ours their theirs
    myself yourself himself herself itself ourselves yourselves themselves
    this that these those
    """.split()
)

TIE_BREAK_AVG_OVERLAP = "avg_overlap_then_lexicographic"


@dataclass(frozen=True)
class LabelingConfig:
    """Knobs for assignment and propagation.

    tau is compared strictly (score > tau) unless tau_inclusive is set.
    force_cluster_label overwrites directly assigned labels that disagree
    with the voted cluster label, for pure cluster-level typing.
    """

    tau: float = 0.5
    tau_inclusive: bool = False
    force_cluster_label: bool = False
    pronoun_lexicon: frozenset[str] = DEFAULT_PRONOUNS
    tie_break: str = TIE_BREAK_AVG_OVERLAP

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must be in [0, 1], got {self.tau}")
        if self.tie_break != TIE_BREAK_AVG_OVERLAP:
            raise ValueError(f"unsupported tie_break {self.tie_break!r}")


def overlap(a: Span, b: Span) -> float:
    """Token-level Jaccard similarity of two spans."""
    inter = min(a.end, b.end) - max(a.start, b.start)
    if inter <= 0:
        return 0.0
    union = (a.end - a.start) + (b.end - b.start) - inter
    return inter / union


def load_pronoun_lexicon(source: Union[str, Path, IO[str]]) -> frozenset[str]:
    """One token per line; blank lines and # comments are skipped."""
    if hasattr(source, "read"):
        lines = source.read().splitlines()
    else:
        lines = Path(source).read_text(encoding="utf-8").splitlines()
    entries = set()
    for line in lines:
        word = line.strip().lower()
        if word and not word.startswith("#"):
            entries.add(word)
    return frozenset(entries)


def _best_alignment(mention_span: Span, semantic_spans) -> tuple[float, str] | None:
    """Highest-Jaccard semantic span for a mention.

    Ties on the score prefer the span with the smaller start, then the
    smaller end, then the lexicographically smaller label, so assignment
    is deterministic.
    """
    best_score = 0.0
    best_key: tuple[int, int, str] | None = None
    best_label: str | None = None
    for sem in semantic_spans:
        score = overlap(mention_span, sem.span)
        if score <= 0.0:
            continue
        key = (sem.span.start, sem.span.end, sem.label)
        if best_label is None or score > best_score or (score == best_score and key < best_key):
            best_score, best_key, best_label = score, key, sem.label
    if best_label is None:
        return None
    return best_score, best_label


def assign_mentions(doc: Document, cfg: LabelingConfig, side: str) -> Document:
    """Directly label mentions whose best span overlap beats the threshold.

    Replaces any previous labels on the chosen side; mentions without a
    sufficiently overlapping semantic span are left unlabeled.
    """
    new_clusters = []
    for cluster in doc.clusters(side):
        mentions = []
        for mention in cluster.mentions:
            best = _best_alignment(mention.span, doc.semantic_spans)
            passed = best is not None and (
                best[0] >= cfg.tau if cfg.tau_inclusive else best[0] > cfg.tau
            )
            if passed:
                mentions.append(
                    Mention(
                        span=mention.span,
                        assigned_label=best[1],
                        label_source=LabelSource.DIRECT,
                        assignment_overlap=best[0],
                    )
                )
            else:
                mentions.append(Mention(span=mention.span))
        new_clusters.append(Cluster(tuple(mentions)))
    return doc.with_clusters(side, new_clusters)


def _vote(direct: Sequence[Mention]) -> str:
    """Majority label over directly labeled mentions; each mention votes once.

    Frequency ties fall back to the highest mean assignment overlap among
    each tied label's supporting mentions, then to the lexicographically
    smallest label name.
    """
    overlaps_by_label: dict[str, list[float]] = defaultdict(list)
    for mention in direct:
        overlaps_by_label[mention.assigned_label].append(mention.assignment_overlap)
    ranked = min(
        (-len(scores), -(fsum(scores) / len(scores)), label)
        for label, scores in overlaps_by_label.items()
    )
    return ranked[2]


def propagate(doc: Document, cfg: LabelingConfig, side: str) -> Document:
    """Vote a label per cluster and write it onto every member mention.

    Directly labeled mentions keep their own label and source even when it
    disagrees with the cluster label (unless cfg.force_cluster_label);
    clusters with no directly labeled mention stay unlabeled.  Applying
    this twice changes nothing.
    """
    new_clusters = []
    for cluster in doc.clusters(side):
        direct = [m for m in cluster.mentions if m.label_source is LabelSource.DIRECT]
        if not direct:
            new_clusters.append(replace(cluster, cluster_label=None))
            continue
        label = _vote(direct)
        mentions = []
        for mention in cluster.mentions:
            if mention.label_source is LabelSource.DIRECT:
                if cfg.force_cluster_label and mention.assigned_label != label:
                    mention = replace(mention, assigned_label=label)
                mentions.append(mention)
            else:
                mentions.append(
                    Mention(span=mention.span, assigned_label=label,
                            label_source=LabelSource.PROPAGATED)
                )
        new_clusters.append(Cluster(tuple(mentions), cluster_label=label))
    return doc.with_clusters(side, new_clusters)


def label_document(doc: Document, cfg: LabelingConfig, sides: Sequence[str] = ("gold", "predicted")) -> Document:
    for side in sides:
        if doc.clusters(side):
            doc = propagate(assign_mentions(doc, cfg, side), cfg, side)
    return doc


def label_documents(
    docs: Iterable[Document],
    cfg: LabelingConfig | None = None,
    sides: Sequence[str] = ("gold", "predicted"),
) -> list[Document]:
    """Run assignment and propagation over a corpus, on both sides by default."""
    cfg = cfg or LabelingConfig()
    return [label_document(doc, cfg, sides) for doc in docs]


@dataclass(frozen=True)
class CoverageCounts:
    total: int
    direct: int
    propagated: int

    @property
    def unlabeled(self) -> int:
        return self.total - self.direct - self.propagated

    @property
    def direct_pct(self) -> float:
        return 100.0 * self.direct / self.total if self.total else 0.0

    @property
    def propagated_pct(self) -> float:
        return 100.0 * self.propagated / self.total if self.total else 0.0

    @property
    def any_pct(self) -> float:
        # The sum of the two bucket percentages, exactly: every mention is
        # counted in at most one bucket.
        return self.direct_pct + self.propagated_pct


@dataclass(frozen=True)
class CoverageReport:
    overall: CoverageCounts
    pronoun: CoverageCounts


def _is_pronoun(doc: Document, mention: Mention, lexicon: frozenset[str]) -> bool:
    span = mention.span
    return len(span) == 1 and doc.tokens[span.start].lower() in lexicon


def coverage(docs: Iterable[Document], cfg: LabelingConfig, side: str) -> CoverageReport:
    """Fraction of mentions labeled directly vs. by propagation.

    The pronoun block restricts to single-token mentions whose lowercased
    text is in the configured pronoun lexicon.
    """
    total = direct = propagated = 0
    p_total = p_direct = p_propagated = 0
    for doc in docs:
        for cluster in doc.clusters(side):
            for mention in cluster.mentions:
                is_direct = mention.label_source is LabelSource.DIRECT
                is_prop = mention.label_source is LabelSource.PROPAGATED
                total += 1
                direct += is_direct
                propagated += is_prop
                if _is_pronoun(doc, mention, cfg.pronoun_lexicon):
                    p_total += 1
                    p_direct += is_direct
                    p_propagated += is_prop
    return CoverageReport(
        overall=CoverageCounts(total, direct, propagated),
        pronoun=CoverageCounts(p_total, p_direct, p_propagated),
    )


@dataclass(frozen=True)
class DistributionReport:
    """Counts and shares of mention labels over a corpus side."""

    counts: Mapping[str, int]
    total_labeled: int
    unlabeled: int
    absent_labels: tuple[str, ...]

    @property
    def shares(self) -> dict[str, float]:
        if not self.total_labeled:
            return {label: 0.0 for label in self.counts}
        return {label: count / self.total_labeled for label, count in self.counts.items()}


def distribution(
    docs: Iterable[Document],
    inventory: CategoryInventory | None = None,
    side: str = "gold",
) -> DistributionReport:
    """Label distribution over labeled mentions, plus absent inventory labels."""
    inventory = inventory or CategoryInventory.default()
    counter: Counter[str] = Counter()
    unlabeled = 0
    for doc in docs:
        for cluster in doc.clusters(side):
            for mention in cluster.mentions:
                if mention.assigned_label is None:
                    unlabeled += 1
                else:
                    counter[mention.assigned_label] += 1
    ordered = dict(sorted(counter.items(), key=lambda item: (-item[1], item[0])))
    absent = tuple(sorted(label for label in inventory.labels if label not in counter))
    return DistributionReport(
        counts=ordered,
        total_labeled=sum(counter.values()),
        unlabeled=unlabeled,
        absent_labels=absent,
    )


@dataclass(frozen=True)
class AgreementReport:
    true_positives: int
    system_labeled: int
    reference_total: int

    @property
    def precision(self) -> float:
        return self.true_positives / self.system_labeled if self.system_labeled else 0.0

    @property
    def recall(self) -> float:
        return self.true_positives / self.reference_total if self.reference_total else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


def label_agreement(
    reference: Mapping[tuple[str, int], str], docs: Sequence[Document]
) -> AgreementReport:
    """Score system cluster labels against reference labels.

    Reference keys are (doc_id, gold cluster index).  Precision is over
    system-labeled clusters that have a reference entry; recall over all
    reference entries.
    """
    by_id = {doc.doc_id: doc for doc in docs}
    tp = 0
    system_labeled = 0
    for (doc_id, cluster_index), ref_label in reference.items():
        doc = by_id.get(doc_id)
        if doc is None:
            raise KeyError(f"reference key ({doc_id!r}, {cluster_index}) matches no document")
        if not 0 <= cluster_index < len(doc.gold_clusters):
            raise KeyError(
                f"reference key ({doc_id!r}, {cluster_index}) is out of range: "
                f"document has {len(doc.gold_clusters)} gold clusters"
            )
        system_label = doc.gold_clusters[cluster_index].cluster_label
        if system_label is not None:
            system_labeled += 1
            tp += system_label == ref_label
    return AgreementReport(
        true_positives=tp,
        system_labeled=system_labeled,
        reference_total=len(reference),
    )
