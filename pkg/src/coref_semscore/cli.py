"""Command-line front end.

Subcommands: label, eval, coverage, distribution, compare, diagnose,
validate-labels.  Exit codes: 0 success, 2 input error (parse/validation
failures, mismatched inputs), 3 when a requested mode lacks its required
inputs (e.g. typed scoring without semantic spans).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .classic_metrics import conll, drop_singleton_clusters
from .ingest import (
    CorpusFormatError,
    attach_semantic_spans,
    merge_predictions,
    read_conll2012,
    read_jsonl_corpus,
    write_labeled_jsonl,
)
from .inventory import CategoryInventory, UnknownLabelError
from .labeling import (
    LabelingConfig,
    coverage,
    distribution,
    label_agreement,
    label_documents,
    load_pronoun_lexicon,
)
from .model import DocumentPairingError, SIDES
from .reporting import (
    ReportModeError,
    classic_report_dict,
    compare_csv,
    compare_eval_reports,
    coverage_report_dict,
    diagnose_report,
    distribution_report_dict,
    json_text,
    render_classic_table,
    render_compare_table,
    render_coverage_table,
    render_diagnose_table,
    render_distribution_table,
    render_typed_table,
    typed_report_dict,
    write_json,
)
from .typed_metrics import typed_link_scores, typed_mention_scores

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_MODE = 3


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code
        self.message = message


def _add_io_args(parser: argparse.ArgumentParser, pred: bool = True) -> None:
    parser.add_argument("--gold", required=True, help="gold corpus file")
    if pred:
        parser.add_argument("--pred", help="predicted corpus file, keyed by doc_id")
    parser.add_argument("--cner", help="JSONL file of {doc_id, cner} semantic spans")
    parser.add_argument(
        "--format", choices=("jsonl", "conll"), default="jsonl", help="gold/pred file format"
    )
    parser.add_argument("--out", help="output directory")


def _add_labeling_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--tau", type=float, default=0.5, help="overlap threshold (default 0.5)")
    parser.add_argument(
        "--tau-inclusive", action="store_true",
        help="accept assignments at exactly tau (default: strictly above)"
    )
    parser.add_argument(
        "--force-cluster-label", action="store_true",
        help="overwrite direct mention labels that disagree with the cluster label"
    )
    parser.add_argument("--pronouns", help="pronoun lexicon file, one token per line")


def _labeling_config(args) -> LabelingConfig:
    kwargs = {
        "tau": args.tau,
        "tau_inclusive": args.tau_inclusive,
        "force_cluster_label": getattr(args, "force_cluster_label", False),
    }
    if args.pronouns:
        kwargs["pronoun_lexicon"] = load_pronoun_lexicon(args.pronouns)
    try:
        return LabelingConfig(**kwargs)
    except ValueError as exc:
        raise CliError(EXIT_INPUT, str(exc)) from exc


def _read_corpus(path: str, fmt: str, inventory: CategoryInventory, as_predictions: bool):
    if fmt == "conll":
        docs = read_conll2012(path)
        if as_predictions:
            docs = [
                doc.with_clusters("predicted", doc.gold_clusters).with_clusters("gold", ())
                for doc in docs
            ]
        return docs
    return read_jsonl_corpus(path, inventory)


def _load_corpus(args, inventory: CategoryInventory):
    docs = _read_corpus(args.gold, args.format, inventory, as_predictions=False)
    pred_path = getattr(args, "pred", None)
    if pred_path:
        pred_docs = _read_corpus(pred_path, args.format, inventory, as_predictions=True)
        if not any(d.predicted_clusters for d in pred_docs):
            raise CliError(EXIT_INPUT, f"{pred_path}: no predicted_clusters in prediction file")
        docs = merge_predictions(docs, pred_docs)
    if args.cner:
        cner_docs = read_jsonl_corpus(args.cner, inventory)
        docs = attach_semantic_spans(docs, cner_docs)
    return docs


def _is_labeled(docs) -> bool:
    return any(
        cluster.cluster_label is not None
        for doc in docs
        for side in SIDES
        for cluster in doc.clusters(side)
    )


def _ensure_labeled(docs, cfg: LabelingConfig, require: bool):
    """Label the corpus unless it already carries labels.

    With require=True, a corpus that can be neither reused nor labeled
    (no labels, no semantic spans) is a mode-requirement error.
    """
    if _is_labeled(docs):
        return docs
    if any(doc.semantic_spans for doc in docs):
        return label_documents(docs, cfg)
    if require:
        raise CliError(
            EXIT_MODE,
            "typed scoring requires semantic spans (--cner or a cner field) "
            "or an already-labeled corpus",
        )
    return docs


def _out_dir(args) -> Path | None:
    if not args.out:
        return None
    path = Path(args.out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _emit(out: Path | None, name: str, text: str) -> None:
    if out is not None:
        (out / name).write_text(text, encoding="utf-8")


def _coverage_blocks(docs, cfg) -> dict:
    blocks = {"gold": coverage(docs, cfg, "gold")}
    if any(doc.predicted_clusters for doc in docs):
        blocks["predicted"] = coverage(docs, cfg, "predicted")
    return blocks


def cmd_label(args) -> int:
    inventory = CategoryInventory.from_env()
    cfg = _labeling_config(args)
    docs = _load_corpus(args, inventory)
    if not any(doc.semantic_spans for doc in docs) and docs:
        raise CliError(EXIT_MODE, "labeling requires semantic spans (--cner or a cner field)")
    labeled = label_documents(docs, cfg)
    out = _out_dir(args)
    if out is None:
        raise CliError(EXIT_INPUT, "label requires --out")
    write_labeled_jsonl(labeled, out / "labeled.jsonl")
    blocks = _coverage_blocks(labeled, cfg)
    write_json(out / "coverage.json", {side: coverage_report_dict(r) for side, r in blocks.items()})
    table = render_coverage_table(blocks)
    _emit(out, "coverage.txt", table)
    sys.stdout.write(table)
    return EXIT_OK


def cmd_eval(args) -> int:
    modes = [m for m, on in (
        ("typed-mention", args.typed_mention),
        ("typed-link", args.typed_link),
        ("classic", args.classic),
    ) if on]
    if not modes:
        raise CliError(EXIT_INPUT, "eval requires at least one of --typed-mention, "
                                   "--typed-link, --classic")
    inventory = CategoryInventory.from_env()
    cfg = _labeling_config(args)
    docs = _load_corpus(args, inventory)
    if docs and not any(doc.predicted_clusters for doc in docs):
        raise CliError(EXIT_MODE, "evaluation requires predicted clusters "
                                  "(--pred or a predicted_clusters field)")
    need_typed = args.typed_mention or args.typed_link
    if need_typed:
        docs = _ensure_labeled(docs, cfg, require=True)

    report: dict = {
        "config": {
            "gold": os.path.basename(args.gold),
            "pred": os.path.basename(args.pred) if args.pred else None,
            "cner": os.path.basename(args.cner) if args.cner else None,
            "format": args.format,
            "tau": cfg.tau,
            "tau_inclusive": cfg.tau_inclusive,
            "force_cluster_label": cfg.force_cluster_label,
            "link_mention_source": args.link_mention_source,
            "drop_singletons": args.drop_singletons,
        },
        "typed_mention": None,
        "typed_link": None,
        "classic": None,
    }
    tables = []
    if args.typed_mention:
        mention_report = typed_mention_scores(docs, docs)
        report["typed_mention"] = typed_report_dict(mention_report)
        tables.append(render_typed_table(mention_report))
    if args.typed_link:
        link_report = typed_link_scores(docs, docs, args.link_mention_source)
        report["typed_link"] = typed_report_dict(link_report)
        tables.append(render_typed_table(link_report))
    if args.classic:
        classic_docs = drop_singleton_clusters(docs) if args.drop_singletons else docs
        classic = conll(classic_docs, classic_docs)
        report["classic"] = classic_report_dict(classic)
        tables.append(render_classic_table(classic))

    out = _out_dir(args)
    if out is not None:
        write_json(out / "eval_report.json", report)
    text = "\n".join(tables)
    _emit(out, "eval_report.txt", text)
    sys.stdout.write(text)
    return EXIT_OK


def cmd_coverage(args) -> int:
    inventory = CategoryInventory.from_env()
    cfg = _labeling_config(args)
    docs = _ensure_labeled(_load_corpus(args, inventory), cfg, require=True)
    blocks = _coverage_blocks(docs, cfg)
    out = _out_dir(args)
    if out is not None:
        write_json(out / "coverage.json",
                   {side: coverage_report_dict(r) for side, r in blocks.items()})
    table = render_coverage_table(blocks)
    _emit(out, "coverage.txt", table)
    sys.stdout.write(table)
    return EXIT_OK


def cmd_distribution(args) -> int:
    inventory = CategoryInventory.from_env()
    cfg = _labeling_config(args)
    docs = _ensure_labeled(_load_corpus(args, inventory), cfg, require=True)
    report = distribution(docs, inventory, side="gold")
    out = _out_dir(args)
    if out is not None:
        write_json(out / "distribution.json", distribution_report_dict(report))
    table = render_distribution_table(report)
    _emit(out, "distribution.txt", table)
    sys.stdout.write(table)
    return EXIT_OK


def _load_report(path: str) -> tuple[dict, str]:
    with open(path, encoding="utf-8") as handle:
        report = json.load(handle)
    if not isinstance(report, dict):
        raise CliError(EXIT_INPUT, f"{path}: expected a JSON object")
    corpus = (report.get("config") or {}).get("gold") or os.path.basename(path)
    return report, corpus


def cmd_compare(args) -> int:
    reports_a, corpora_a = zip(*(_load_report(p) for p in args.report_a))
    reports_b, corpora_b = zip(*(_load_report(p) for p in args.report_b))
    result = compare_eval_reports(
        reports_a, reports_b, corpora_a, corpora_b, pool_counts=args.pool_counts
    )
    out = _out_dir(args)
    if out is not None:
        write_json(out / "compare.json", result)
        for mode in ("mention", "link"):
            if result.get(mode) is not None:
                (out / f"compare_{mode}.csv").write_text(
                    compare_csv(result, mode), encoding="utf-8"
                )
    table = render_compare_table(result)
    _emit(out, "compare.txt", table)
    sys.stdout.write(table)
    return EXIT_OK


def cmd_diagnose(args) -> int:
    eval_report, _ = _load_report(args.eval_report)
    with open(args.distribution_report, encoding="utf-8") as handle:
        dist = json.load(handle)
    result = diagnose_report(
        eval_report, dist,
        w_mention=args.w_mention, w_link=args.w_link, rarity_cap=args.rarity_cap,
    )
    out = _out_dir(args)
    if out is not None:
        write_json(out / "diagnose.json", result)
    table = render_diagnose_table(result)
    _emit(out, "diagnose.txt", table)
    sys.stdout.write(table)
    return EXIT_OK


def cmd_validate_labels(args) -> int:
    inventory = CategoryInventory.from_env()
    cfg = _labeling_config(args)
    docs = _ensure_labeled(_load_corpus(args, inventory), cfg, require=True)
    with open(args.reference, encoding="utf-8") as handle:
        raw = json.load(handle)
    reference = {}
    for doc_id, clusters in raw.items():
        for index, label in clusters.items():
            reference[(doc_id, int(index))] = inventory.resolve(label)
    try:
        agreement = label_agreement(reference, docs)
    except KeyError as exc:
        raise CliError(EXIT_INPUT, str(exc.args[0])) from exc
    result = {
        "precision": agreement.precision,
        "recall": agreement.recall,
        "f1": agreement.f1,
        "true_positives": agreement.true_positives,
        "system_labeled": agreement.system_labeled,
        "reference_entries": agreement.reference_total,
    }
    out = _out_dir(args)
    if out is not None:
        write_json(out / "agreement.json", result)
    sys.stdout.write(json_text(result))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coref-semscore",
        description="Semantically typed coreference evaluation toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("label", help="label a corpus and report coverage")
    _add_io_args(p)
    _add_labeling_args(p)
    p.set_defaults(func=cmd_label)

    p = sub.add_parser("eval", help="typed and classic evaluation")
    _add_io_args(p)
    _add_labeling_args(p)
    p.add_argument("--typed-mention", action="store_true", help="per-class mention scores")
    p.add_argument("--typed-link", action="store_true", help="per-class link scores")
    p.add_argument("--classic", action="store_true", help="MUC, B-cubed, CEAF, CoNLL mean")
    p.add_argument(
        "--link-mention-source", choices=("predicted", "gold"), default="predicted",
        help="provenance of predicted mentions for link scoring"
    )
    p.add_argument("--drop-singletons", action="store_true",
                   help="drop size-1 clusters before classic scoring")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("coverage", help="labeling coverage report")
    _add_io_args(p)
    _add_labeling_args(p)
    p.set_defaults(func=cmd_coverage)

    p = sub.add_parser("distribution", help="label distribution over gold mentions")
    _add_io_args(p)
    _add_labeling_args(p)
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("compare", help="per-class deltas between two eval reports")
    p.add_argument("-a", "--report-a", action="append", required=True,
                   help="eval report JSON for system A (repeatable)")
    p.add_argument("-b", "--report-b", action="append", required=True,
                   help="eval report JSON for system B (repeatable)")
    p.add_argument("--pool-counts", action="store_true",
                   help="pool tp/fp/fn across corpora instead of averaging F1s")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("diagnose", help="rank classes by deficiency")
    p.add_argument("--eval-report", required=True, help="eval report JSON")
    p.add_argument("--distribution-report", required=True, help="distribution report JSON")
    p.add_argument("--w-mention", type=float, default=0.5, help="mention term weight")
    p.add_argument("--w-link", type=float, default=0.5, help="link term weight")
    p.add_argument("--rarity-cap", type=float, default=0.2, help="cap on the rarity term")
    p.add_argument("--out", help="output directory")
    p.set_defaults(func=cmd_diagnose)

    p = sub.add_parser("validate-labels", help="score cluster labels against a reference")
    _add_io_args(p, pred=False)
    _add_labeling_args(p)
    p.add_argument("--reference", required=True,
                   help="JSON file {doc_id: {cluster_index: label}}")
    p.set_defaults(func=cmd_validate_labels)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc.message}", file=sys.stderr)
        return exc.code
    except (
        CorpusFormatError,
        DocumentPairingError,
        ReportModeError,
        UnknownLabelError,
        json.JSONDecodeError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
