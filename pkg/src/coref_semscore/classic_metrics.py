"""Aggregate coreference metrics: MUC, B-cubed, CEAF (phi4), CoNLL mean.

Statistics are pooled over documents the way the reference CoNLL-2012
scorer pools them, with twinless mentions counting only against their own
side's denominator.  All accumulation is done in exact rational
arithmetic and converted to float once at the end, so results are
reproducible bit-for-bit and the optimal-assignment step can be checked
against exhaustive search exactly.  Degenerate 0/0 ratios are defined as
0 (MUC on all-singleton corpora included).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.optimize import linear_sum_assignment

from .model import Cluster, Document, Span, pair_by_doc_id


@dataclass(frozen=True)
class MetricTriple:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ClassicReport:
    muc: MetricTriple
    b_cubed: MetricTriple
    ceaf_phi4: MetricTriple

    @property
    def conll_f1(self) -> float:
        return (self.muc.f1 + self.b_cubed.f1 + self.ceaf_phi4.f1) / 3


def _ratio(num: Fraction | int, den: Fraction | int) -> Fraction:
    return Fraction(num) / den if den else Fraction(0)


def _triple(p_num, p_den, r_num, r_den) -> MetricTriple:
    p = _ratio(p_num, p_den)
    r = _ratio(r_num, r_den)
    f1 = 2 * p * r / (p + r) if p + r else Fraction(0)
    return MetricTriple(float(p), float(r), float(f1))


def _span_sets(clusters: Sequence[Cluster]) -> list[set[Span]]:
    return [{m.span for m in c.mentions} for c in clusters]


def _index_by_span(cluster_sets: Sequence[set[Span]]) -> dict[Span, int]:
    return {span: i for i, spans in enumerate(cluster_sets) for span in spans}


def _muc_side(own: Sequence[set[Span]], other_index: dict[Span, int]) -> tuple[int, int]:
    """MUC numerator/denominator for one side.

    Each cluster contributes |C| minus the number of cells in the
    partition induced by the other side; mentions absent from the other
    side form singleton cells.
    """
    num = den = 0
    for spans in own:
        cells = {other_index[s] for s in spans if s in other_index}
        unmatched = sum(s not in other_index for s in spans)
        num += len(spans) - (len(cells) + unmatched)
        den += len(spans) - 1
    return num, den


def muc(gold_docs: Sequence[Document], pred_docs: Sequence[Document]) -> MetricTriple:
    """Link-based metric over cluster partitions."""
    r_num = r_den = p_num = p_den = 0
    for gold_doc, pred_doc in pair_by_doc_id(gold_docs, pred_docs):
        gold_sets = _span_sets(gold_doc.gold_clusters)
        pred_sets = _span_sets(pred_doc.predicted_clusters)
        gold_index = _index_by_span(gold_sets)
        pred_index = _index_by_span(pred_sets)
        num, den = _muc_side(gold_sets, pred_index)
        r_num, r_den = r_num + num, r_den + den
        num, den = _muc_side(pred_sets, gold_index)
        p_num, p_den = p_num + num, p_den + den
    return _triple(p_num, p_den, r_num, r_den)


def _b_cubed_side(own: Sequence[set[Span]], other: Sequence[set[Span]]) -> tuple[Fraction, int]:
    """Sum over this side's mentions of |own ∩ other| / |own|.

    Mentions missing from the other side contribute 0.
    """
    other_index = _index_by_span(other)
    total = Fraction(0)
    count = 0
    for spans in own:
        size = len(spans)
        for span in spans:
            count += 1
            j = other_index.get(span)
            if j is not None:
                total += Fraction(len(spans & other[j]), size)
    return total, count


def b_cubed(gold_docs: Sequence[Document], pred_docs: Sequence[Document]) -> MetricTriple:
    """Mention-weighted metric averaging per-mention cluster overlap."""
    p_num = Fraction(0)
    r_num = Fraction(0)
    p_den = r_den = 0
    for gold_doc, pred_doc in pair_by_doc_id(gold_docs, pred_docs):
        gold_sets = _span_sets(gold_doc.gold_clusters)
        pred_sets = _span_sets(pred_doc.predicted_clusters)
        num, den = _b_cubed_side(pred_sets, gold_sets)
        p_num, p_den = p_num + num, p_den + den
        num, den = _b_cubed_side(gold_sets, pred_sets)
        r_num, r_den = r_num + num, r_den + den
    return _triple(p_num, p_den, r_num, r_den)


def phi4(gold: set[Span], pred: set[Span]) -> Fraction:
    """Cluster similarity 2|G ∩ P| / (|G| + |P|)."""
    return Fraction(2 * len(gold & pred), len(gold) + len(pred))


def best_alignment_total(gold_sets: Sequence[set[Span]], pred_sets: Sequence[set[Span]]) -> Fraction:
    """Maximum total phi4 over one-to-one cluster alignments.

    The optimum is found on the rectangular similarity matrix with the
    Hungarian solver; the total of the chosen pairs is recomputed exactly.
    """
    if not gold_sets or not pred_sets:
        return Fraction(0)
    sims = [[phi4(g, p) for p in pred_sets] for g in gold_sets]
    matrix = np.array([[float(v) for v in row] for row in sims], dtype=float)
    rows, cols = linear_sum_assignment(matrix, maximize=True)
    return sum((sims[i][j] for i, j in zip(rows, cols)), Fraction(0))


def ceaf_phi4(gold_docs: Sequence[Document], pred_docs: Sequence[Document]) -> MetricTriple:
    """Alignment-based metric using the phi4 cluster similarity."""
    total = Fraction(0)
    n_gold = n_pred = 0
    for gold_doc, pred_doc in pair_by_doc_id(gold_docs, pred_docs):
        gold_sets = _span_sets(gold_doc.gold_clusters)
        pred_sets = _span_sets(pred_doc.predicted_clusters)
        total += best_alignment_total(gold_sets, pred_sets)
        n_gold += len(gold_sets)
        n_pred += len(pred_sets)
    return _triple(total, n_pred, total, n_gold)


def conll(gold_docs: Sequence[Document], pred_docs: Sequence[Document]) -> ClassicReport:
    """All three metrics; conll_f1 is the mean of their F1s."""
    return ClassicReport(
        muc=muc(gold_docs, pred_docs),
        b_cubed=b_cubed(gold_docs, pred_docs),
        ceaf_phi4=ceaf_phi4(gold_docs, pred_docs),
    )


def drop_singleton_clusters(
    docs: Sequence[Document], sides: Sequence[str] = ("gold", "predicted")
) -> list[Document]:
    """Remove size-1 clusters, reproducing OntoNotes-style scoring inputs."""
    out = []
    for doc in docs:
        for side in sides:
            doc = doc.with_clusters(
                side, [c for c in doc.clusters(side) if len(c.mentions) > 1]
            )
        out.append(doc)
    return out
