"""Corpus readers and writers.

The canonical interchange format is line-delimited JSON, one document per
line:

    doc_id              unique document identifier (string)
    tokens              list of token strings
    gold_clusters       list of clusters; a cluster is a list of [start, end]
                        half-open token spans
    predicted_clusters  optional, same shape as gold_clusters
    cner                list of [start, end, label] semantic span triples
    sentence_boundaries optional list of sentence-start token indices

Labeled corpora additionally carry (written by write_labeled_jsonl, read
back transparently):

    cluster_labels          {"gold": [...], "predicted": [...]}, parallel to
                            the cluster lists, null for unlabeled clusters
    mention_label_sources   per-mention "none" / "direct" / "propagated",
                            nested like the cluster lists
    mention_labels          per-mention label or null (kept separately from
                            cluster_labels because a directly labeled mention
                            may disagree with its cluster's label)
    mention_overlaps        per-mention assignment score, null unless direct

Unknown fields are preserved on round-trip.  A CoNLL-2012-style reader is
provided for gold clusters only; there is no CoNLL writer.
"""

from __future__ import annotations

import json
import re
from dataclasses import replace
from pathlib import Path
from typing import IO, Iterable, Sequence, Union

from .inventory import CategoryInventory
from .model import (
    Cluster,
    Document,
    DocumentPairingError,
    LabelSource,
    Mention,
    SemanticSpan,
    Span,
    validate_document,
)

Source = Union[str, Path, IO[str]]

_MODEL_FIELDS = (
    "doc_id",
    "tokens",
    "sentence_boundaries",
    "gold_clusters",
    "predicted_clusters",
    "cner",
    "cluster_labels",
    "mention_labels",
    "mention_label_sources",
    "mention_overlaps",
)

_SIDES = ("gold", "predicted")


class CorpusFormatError(Exception):
    """A corpus file that cannot be parsed or fails validation."""


def _open_read(source: Source):
    if hasattr(source, "read"):
        return source, False
    return open(source, encoding="utf-8"), True


def _open_write(dest: Source):
    if hasattr(dest, "write"):
        return dest, False
    return open(dest, "w", encoding="utf-8"), True


def _span(pair: Sequence[int], where: str) -> Span:
    if not isinstance(pair, (list, tuple)) or len(pair) != 2:
        raise CorpusFormatError(f"{where}: expected a [start, end] pair, got {pair!r}")
    try:
        return Span(int(pair[0]), int(pair[1]))
    except (TypeError, ValueError) as exc:
        raise CorpusFormatError(f"{where}: {exc}") from exc


def _nested(record: dict, key: str, side: str, default=None):
    block = record.get(key)
    if block is None:
        return default
    if not isinstance(block, dict):
        raise CorpusFormatError(f"{key}: expected an object keyed by cluster side")
    return block.get(side, default)


def _clusters_from_record(
    record: dict, side: str, inventory: CategoryInventory
) -> tuple[Cluster, ...]:
    key = f"{side}_clusters"
    raw = record.get(key)
    if raw is None:
        return ()
    if not isinstance(raw, list):
        raise CorpusFormatError(f"{key}: expected a list of clusters")
    cluster_labels = _nested(record, "cluster_labels", side)
    mention_labels = _nested(record, "mention_labels", side)
    sources = _nested(record, "mention_label_sources", side)
    overlaps = _nested(record, "mention_overlaps", side)
    for name, parallel in (
        ("cluster_labels", cluster_labels),
        ("mention_labels", mention_labels),
        ("mention_label_sources", sources),
        ("mention_overlaps", overlaps),
    ):
        if parallel is not None and len(parallel) != len(raw):
            raise CorpusFormatError(f"{name}[{side}]: length does not match {key}")
    clusters = []
    for ci, raw_cluster in enumerate(raw):
        mentions = []
        for mi, pair in enumerate(raw_cluster):
            span = _span(pair, f"{key}[{ci}][{mi}]")
            label = mention_labels[ci][mi] if mention_labels is not None else None
            source = sources[ci][mi] if sources is not None else "none"
            overlap = overlaps[ci][mi] if overlaps is not None else None
            try:
                mentions.append(
                    Mention(
                        span=span,
                        assigned_label=inventory.resolve(label) if label is not None else None,
                        label_source=LabelSource(source),
                        assignment_overlap=float(overlap) if overlap is not None else None,
                    )
                )
            except ValueError as exc:
                raise CorpusFormatError(f"{key}[{ci}][{mi}]: {exc}") from exc
        label = cluster_labels[ci] if cluster_labels is not None else None
        try:
            clusters.append(
                Cluster(
                    mentions=tuple(mentions),
                    cluster_label=inventory.resolve(label) if label is not None else None,
                )
            )
        except ValueError as exc:
            raise CorpusFormatError(f"{key}[{ci}]: {exc}") from exc
    return tuple(clusters)


def document_from_record(record: dict, inventory: CategoryInventory) -> Document:
    """Build and validate a Document from a parsed JSONL record."""
    if not isinstance(record, dict):
        raise CorpusFormatError("expected a JSON object")
    for required in ("doc_id", "tokens"):
        if required not in record:
            raise CorpusFormatError(f"missing required field {required!r}")
    semantic_spans = []
    raw_cner = record.get("cner", [])
    if not isinstance(raw_cner, list):
        raise CorpusFormatError("cner: expected a list of [start, end, label] triples")
    for si, triple in enumerate(raw_cner):
        if not isinstance(triple, (list, tuple)) or len(triple) != 3:
            raise CorpusFormatError(f"cner[{si}]: expected a [start, end, label] triple")
        span = _span(triple[:2], f"cner[{si}]")
        try:
            label = inventory.resolve(str(triple[2]))
        except ValueError as exc:
            raise CorpusFormatError(f"cner[{si}]: {exc}") from exc
        semantic_spans.append(SemanticSpan(span, label))
    boundaries = record.get("sentence_boundaries")
    doc = Document(
        doc_id=str(record["doc_id"]),
        tokens=tuple(str(t) for t in record["tokens"]),
        gold_clusters=_clusters_from_record(record, "gold", inventory),
        predicted_clusters=_clusters_from_record(record, "predicted", inventory),
        semantic_spans=tuple(semantic_spans),
        sentence_boundaries=tuple(int(b) for b in boundaries) if boundaries is not None else None,
        extras={k: v for k, v in record.items() if k not in _MODEL_FIELDS},
    )
    violations = validate_document(doc)
    if violations:
        raise CorpusFormatError(f"doc {doc.doc_id!r}: {violations[0]}")
    return doc


def read_jsonl_corpus(
    source: Source, inventory: CategoryInventory | None = None
) -> list[Document]:
    """Read a JSONL corpus, in file order.

    Fails with a line-numbered CorpusFormatError on malformed JSON, span or
    label problems, and duplicate doc_ids.
    """
    inventory = inventory or CategoryInventory.default()
    handle, owned = _open_read(source)
    docs: list[Document] = []
    seen_ids: set[str] = set()
    try:
        for lineno, line in enumerate(handle, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"line {lineno}: invalid JSON: {exc}") from exc
            try:
                doc = document_from_record(record, inventory)
            except CorpusFormatError as exc:
                raise CorpusFormatError(f"line {lineno}: {exc}") from exc
            if doc.doc_id in seen_ids:
                raise CorpusFormatError(f"line {lineno}: duplicate doc_id {doc.doc_id!r}")
            seen_ids.add(doc.doc_id)
            docs.append(doc)
    finally:
        if owned:
            handle.close()
    return docs


def _labels_block(clusters: Sequence[Cluster]):
    cluster_labels = [c.cluster_label for c in clusters]
    mention_labels = [[m.assigned_label for m in c.mentions] for c in clusters]
    sources = [[m.label_source.value for m in c.mentions] for c in clusters]
    overlaps = [[m.assignment_overlap for m in c.mentions] for c in clusters]
    return cluster_labels, mention_labels, sources, overlaps


def document_to_record(doc: Document) -> dict:
    """Serialize a Document to the JSONL record schema (canonical key order)."""
    record: dict = {"doc_id": doc.doc_id, "tokens": list(doc.tokens)}
    if doc.sentence_boundaries is not None:
        record["sentence_boundaries"] = list(doc.sentence_boundaries)
    record["gold_clusters"] = [
        [[m.span.start, m.span.end] for m in c.mentions] for c in doc.gold_clusters
    ]
    record["predicted_clusters"] = [
        [[m.span.start, m.span.end] for m in c.mentions] for c in doc.predicted_clusters
    ]
    record["cner"] = [[s.span.start, s.span.end, s.label] for s in doc.semantic_spans]
    blocks = {side: _labels_block(doc.clusters(side)) for side in _SIDES}
    record["cluster_labels"] = {side: blocks[side][0] for side in _SIDES}
    record["mention_labels"] = {side: blocks[side][1] for side in _SIDES}
    record["mention_label_sources"] = {side: blocks[side][2] for side in _SIDES}
    record["mention_overlaps"] = {side: blocks[side][3] for side in _SIDES}
    for key in sorted(doc.extras):
        record[key] = doc.extras[key]
    return record


def write_labeled_jsonl(docs: Iterable[Document], dest: Source) -> None:
    """Write one record per document, including labels and label sources."""
    handle, owned = _open_write(dest)
    try:
        for doc in docs:
            handle.write(json.dumps(document_to_record(doc), ensure_ascii=False))
            handle.write("\n")
    finally:
        if owned:
            handle.close()


_BEGIN_RE = re.compile(r"#begin document \((?P<name>[^)]*)\)(?:; part (?P<part>\S+))?\s*$")
_COREF_PART_RE = re.compile(r"(\()?(\d+)(\))?\Z")


def read_conll2012(source: Source) -> list[Document]:
    """Read gold clusters from a CoNLL-2012-style column file.

    Word forms come from the fourth column and the coreference annotation
    from the last; sentence offsets accumulate into document-level token
    indices.  Predicted clusters and semantic spans are left empty.
    """
    handle, owned = _open_read(source)
    docs: list[Document] = []
    seen_ids: set[str] = set()

    doc_id: str | None = None
    tokens: list[str] = []
    boundaries: list[int] = []
    in_sentence = False
    open_stacks: dict[int, list[int]] = {}
    cluster_spans: dict[int, list[Span]] = {}

    def finish_document(lineno: int) -> None:
        nonlocal doc_id, tokens, boundaries, in_sentence, open_stacks, cluster_spans
        unclosed = sorted(cid for cid, stack in open_stacks.items() if stack)
        if unclosed:
            raise CorpusFormatError(
                f"line {lineno}: unbalanced coreference parentheses in {doc_id!r} "
                f"(unclosed cluster ids: {', '.join(map(str, unclosed))})"
            )
        clusters = []
        for cid in sorted(cluster_spans):
            spans = sorted(cluster_spans[cid], key=lambda s: (s.start, s.end))
            try:
                clusters.append(Cluster(tuple(Mention(span=s) for s in spans)))
            except ValueError as exc:
                raise CorpusFormatError(f"line {lineno}: cluster {cid} in {doc_id!r}: {exc}") from exc
        doc = Document(
            doc_id=doc_id or "",
            tokens=tuple(tokens),
            gold_clusters=tuple(clusters),
            sentence_boundaries=tuple(boundaries) if boundaries else None,
        )
        violations = validate_document(doc)
        if violations:
            raise CorpusFormatError(f"line {lineno}: doc {doc.doc_id!r}: {violations[0]}")
        if doc.doc_id in seen_ids:
            raise CorpusFormatError(f"line {lineno}: duplicate doc_id {doc.doc_id!r}")
        seen_ids.add(doc.doc_id)
        docs.append(doc)
        doc_id = None
        tokens = []
        boundaries = []
        in_sentence = False
        open_stacks = {}
        cluster_spans = {}

    try:
        lineno = 0
        for lineno, line in enumerate(handle, start=1):
            line = line.rstrip("\n")
            if line.startswith("#begin document"):
                if doc_id is not None:
                    raise CorpusFormatError(
                        f"line {lineno}: new document begins before #end document"
                    )
                match = _BEGIN_RE.match(line)
                if not match:
                    raise CorpusFormatError(f"line {lineno}: malformed #begin document header")
                name = match.group("name")
                part = match.group("part")
                doc_id = f"{name}_part_{part}" if part is not None else name
                continue
            if line.startswith("#end document"):
                if doc_id is None:
                    raise CorpusFormatError(f"line {lineno}: #end document without a begin")
                finish_document(lineno)
                continue
            if line.startswith("#"):
                continue
            if not line.strip():
                in_sentence = False
                continue
            if doc_id is None:
                raise CorpusFormatError(f"line {lineno}: token line outside any document")
            parts = line.split()
            if len(parts) < 5:
                raise CorpusFormatError(
                    f"line {lineno}: expected at least 5 columns, got {len(parts)}"
                )
            if not in_sentence:
                boundaries.append(len(tokens))
                in_sentence = True
            index = len(tokens)
            tokens.append(parts[3])
            coref = parts[-1]
            if coref in ("-", "_"):
                continue
            for piece in coref.split("|"):
                match = _COREF_PART_RE.fullmatch(piece)
                if not match or (match.group(1) is None and match.group(3) is None):
                    raise CorpusFormatError(
                        f"line {lineno}: unparseable coreference field {piece!r}"
                    )
                cid = int(match.group(2))
                if match.group(1):
                    open_stacks.setdefault(cid, []).append(index)
                if match.group(3):
                    stack = open_stacks.get(cid)
                    if not stack:
                        raise CorpusFormatError(
                            f"line {lineno}: closing bracket for cluster {cid} "
                            "with no matching open"
                        )
                    start = stack.pop()
                    cluster_spans.setdefault(cid, []).append(Span(start, index + 1))
        if doc_id is not None:
            raise CorpusFormatError(
                f"line {lineno}: missing #end document marker for {doc_id!r}"
            )
    finally:
        if owned:
            handle.close()
    return docs


def merge_predictions(
    gold_docs: Sequence[Document], pred_docs: Sequence[Document]
) -> list[Document]:
    """Attach predicted clusters from a separate corpus, keyed by doc_id."""
    pairs = pair_by_doc_id_checked(gold_docs, pred_docs)
    merged = []
    for gold, pred in pairs:
        if gold.tokens != pred.tokens:
            raise CorpusFormatError(f"doc {gold.doc_id!r}: token sequences differ between files")
        merged.append(replace(gold, predicted_clusters=pred.predicted_clusters))
    return merged


def pair_by_doc_id_checked(gold_docs, pred_docs):
    from .model import pair_by_doc_id

    try:
        return pair_by_doc_id(gold_docs, pred_docs)
    except DocumentPairingError as exc:
        raise CorpusFormatError(str(exc)) from exc


def attach_semantic_spans(
    docs: Sequence[Document], cner_docs: Sequence[Document]
) -> list[Document]:
    """Replace semantic spans with those from a separate cner corpus.

    Every doc_id in the cner corpus must exist in the target corpus;
    documents without a cner record keep their inline spans.
    """
    by_id = {d.doc_id: d for d in docs}
    unknown = sorted(d.doc_id for d in cner_docs if d.doc_id not in by_id)
    if unknown:
        raise CorpusFormatError(f"cner corpus has unknown doc_ids: {', '.join(unknown)}")
    spans_by_id = {d.doc_id: d.semantic_spans for d in cner_docs}
    out = []
    for doc in docs:
        if doc.doc_id in spans_by_id:
            doc = replace(doc, semantic_spans=spans_by_id[doc.doc_id])
            violations = validate_document(doc)
            if violations:
                raise CorpusFormatError(f"doc {doc.doc_id!r}: {violations[0]}")
        out.append(doc)
    return out
