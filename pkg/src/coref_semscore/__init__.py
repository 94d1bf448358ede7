"""Semantically typed coreference evaluation toolkit."""

from .classic_metrics import (
    ClassicReport,
    MetricTriple,
    b_cubed,
    ceaf_phi4,
    conll,
    drop_singleton_clusters,
    muc,
)
from .ingest import (
    CorpusFormatError,
    merge_predictions,
    read_conll2012,
    read_jsonl_corpus,
    write_labeled_jsonl,
)
from .inventory import Category, CategoryInventory, UnknownLabelError
from .labeling import (
    AgreementReport,
    CoverageReport,
    DistributionReport,
    LabelingConfig,
    assign_mentions,
    coverage,
    distribution,
    label_agreement,
    label_documents,
    overlap,
    propagate,
)
from .model import (
    Cluster,
    Document,
    DocumentPairingError,
    LabelSource,
    Mention,
    SemanticSpan,
    Span,
    token_set,
    validate_document,
)
from .typed_metrics import (
    ClassScore,
    TypedScoreReport,
    links_of,
    macro_f1,
    micro_score,
    typed_link_scores,
    typed_mention_scores,
)

__version__ = "0.1.0"

__all__ = [
    "AgreementReport",
    "Category",
    "CategoryInventory",
    "ClassicReport",
    "ClassScore",
    "Cluster",
    "CorpusFormatError",
    "CoverageReport",
    "DistributionReport",
    "Document",
    "DocumentPairingError",
    "LabelSource",
    "LabelingConfig",
    "Mention",
    "MetricTriple",
    "SemanticSpan",
    "Span",
    "TypedScoreReport",
    "UnknownLabelError",
    "assign_mentions",
    "b_cubed",
    "ceaf_phi4",
    "conll",
    "coverage",
    "distribution",
    "drop_singleton_clusters",
    "label_agreement",
    "label_documents",
    "links_of",
    "macro_f1",
    "merge_predictions",
    "micro_score",
    "muc",
    "overlap",
    "propagate",
    "read_conll2012",
    "read_jsonl_corpus",
    "token_set",
    "typed_link_scores",
    "typed_mention_scores",
    "validate_document",
    "write_labeled_jsonl",
]
