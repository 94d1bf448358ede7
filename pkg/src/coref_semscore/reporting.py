"""Report assembly: JSON-ready dicts, aligned text tables, comparisons.

JSON dicts keep full float precision and a fixed key order; text tables
format floats at 4 decimals and sort class rows by descending gold
support, then name.  Identical inputs therefore produce byte-identical
outputs.
"""

from __future__ import annotations

import csv
import io
import json
from math import fsum
from typing import Mapping, Sequence

from .classic_metrics import ClassicReport, MetricTriple
from .labeling import CoverageCounts, CoverageReport, DistributionReport
from .typed_metrics import TypedScoreReport


class ReportModeError(ValueError):
    """Reports being combined do not expose the same scoring modes."""


def json_text(obj) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def write_json(path, obj) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(json_text(obj))


# ---------------------------------------------------------------------------
# JSON shapes


def _class_row(label: str, score) -> dict:
    return {
        "tp": score.tp,
        "fp": score.fp,
        "fn": score.fn,
        "precision": score.precision,
        "recall": score.recall,
        "f1": score.f1,
        "support": score.support,
    }


def typed_report_dict(report: TypedScoreReport) -> dict:
    micro = report.micro
    out: dict = {
        "mode": report.mode,
        "link_mention_source": report.link_mention_source,
        "per_class": {label: _class_row(label, s) for label, s in report.per_class.items()},
        "micro": {
            "tp": micro.tp,
            "fp": micro.fp,
            "fn": micro.fn,
            "precision": micro.precision,
            "recall": micro.recall,
            "f1": micro.f1,
        },
        "macro_f1": report.macro_f1,
        "macro_classes": report.macro_classes,
        "predicted_only_classes": report.predicted_only_classes,
        "unlabeled_gold": report.unlabeled_gold,
        "unlabeled_predicted": report.unlabeled_predicted,
    }
    if report.containment_violations is not None:
        out["containment_violations"] = report.containment_violations
    return out


def _metric_triple_dict(triple: MetricTriple) -> dict:
    return {"precision": triple.precision, "recall": triple.recall, "f1": triple.f1}


def classic_report_dict(report: ClassicReport) -> dict:
    return {
        "muc": _metric_triple_dict(report.muc),
        "b_cubed": _metric_triple_dict(report.b_cubed),
        "ceaf_phi4": _metric_triple_dict(report.ceaf_phi4),
        "conll_f1": report.conll_f1,
    }


def _coverage_counts_dict(counts: CoverageCounts) -> dict:
    return {
        "total": counts.total,
        "direct": counts.direct,
        "propagated": counts.propagated,
        "unlabeled": counts.unlabeled,
        "direct_pct": counts.direct_pct,
        "propagated_pct": counts.propagated_pct,
        "any_pct": counts.any_pct,
    }


def coverage_report_dict(report: CoverageReport) -> dict:
    return {
        "overall": _coverage_counts_dict(report.overall),
        "pronoun": _coverage_counts_dict(report.pronoun),
    }


def distribution_report_dict(report: DistributionReport) -> dict:
    return {
        "total_labeled": report.total_labeled,
        "unlabeled": report.unlabeled,
        "counts": dict(report.counts),
        "shares": report.shares,
        "absent_labels": list(report.absent_labels),
    }


# ---------------------------------------------------------------------------
# Text tables


def _table(rows: Sequence[Sequence[str]], right_align_from: int = 1) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    lines = []
    for row in rows:
        cells = []
        for i, cell in enumerate(row):
            cells.append(cell.ljust(widths[i]) if i < right_align_from else cell.rjust(widths[i]))
        lines.append("  ".join(cells).rstrip())
    return "\n".join(lines) + "\n"


def _f(value: float) -> str:
    return f"{value:.4f}"


def render_typed_table(report: TypedScoreReport) -> str:
    title = f"typed {report.mode} scores"
    if report.link_mention_source is not None:
        title += f" (link mentions: {report.link_mention_source})"
    rows = [["class", "tp", "fp", "fn", "precision", "recall", "f1", "support"]]
    for label, score in report.per_class.items():
        rows.append(
            [label, str(score.tp), str(score.fp), str(score.fn),
             _f(score.precision), _f(score.recall), _f(score.f1), str(score.support)]
        )
    micro = report.micro
    rows.append(
        ["micro", str(micro.tp), str(micro.fp), str(micro.fn),
         _f(micro.precision), _f(micro.recall), _f(micro.f1), str(micro.support)]
    )
    lines = [title, _table(rows).rstrip("\n"), f"macro_f1 {_f(report.macro_f1)}"]
    if report.predicted_only_classes:
        lines.append("predicted-only classes: " + ", ".join(report.predicted_only_classes))
    lines.append(
        f"unlabeled {report.mode}s: gold {report.unlabeled_gold}, "
        f"predicted {report.unlabeled_predicted}"
    )
    if report.containment_violations is not None:
        lines.append(f"gold-mention containment violations: {report.containment_violations}")
    return "\n".join(lines) + "\n"


def render_classic_table(report: ClassicReport) -> str:
    rows = [["metric", "precision", "recall", "f1"]]
    for name, triple in (
        ("muc", report.muc),
        ("b_cubed", report.b_cubed),
        ("ceaf_phi4", report.ceaf_phi4),
    ):
        rows.append([name, _f(triple.precision), _f(triple.recall), _f(triple.f1)])
    return "classic scores\n" + _table(rows) + f"conll_f1 {_f(report.conll_f1)}\n"


def render_coverage_table(reports: Mapping[str, CoverageReport]) -> str:
    rows = [["side", "mentions", "total", "direct", "propagated", "unlabeled",
             "direct_pct", "propagated_pct", "any_pct"]]
    for side, report in reports.items():
        for scope, counts in (("overall", report.overall), ("pronoun", report.pronoun)):
            rows.append(
                [side, scope, str(counts.total), str(counts.direct), str(counts.propagated),
                 str(counts.unlabeled), _f(counts.direct_pct), _f(counts.propagated_pct),
                 _f(counts.any_pct)]
            )
    return "labeling coverage\n" + _table(rows, right_align_from=2)


def render_distribution_table(report: DistributionReport) -> str:
    rows = [["class", "count", "share"]]
    shares = report.shares
    for label, count in report.counts.items():
        rows.append([label, str(count), _f(shares[label])])
    lines = ["label distribution", _table(rows).rstrip("\n")]
    lines.append(f"labeled mentions: {report.total_labeled}, unlabeled: {report.unlabeled}")
    absent = ", ".join(report.absent_labels) if report.absent_labels else "(none)"
    lines.append(f"absent classes: {absent}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# System comparison


def _pooled_class_stats(mode_reports: Sequence[dict]) -> dict[str, dict]:
    stats: dict[str, dict] = {}
    for report in mode_reports:
        for label, row in report["per_class"].items():
            agg = stats.setdefault(label, {"tp": 0, "fp": 0, "fn": 0})
            agg["tp"] += row["tp"]
            agg["fp"] += row["fp"]
            agg["fn"] += row["fn"]
    out = {}
    for label, agg in stats.items():
        denom = 2 * agg["tp"] + agg["fp"] + agg["fn"]
        out[label] = {
            "f1": 2 * agg["tp"] / denom if denom else 0.0,
            "support": agg["tp"] + agg["fn"],
        }
    return out


def _averaged_class_stats(mode_reports: Sequence[dict]) -> dict[str, dict]:
    f1s: dict[str, list[float]] = {}
    supports: dict[str, int] = {}
    for report in mode_reports:
        for label, row in report["per_class"].items():
            f1s.setdefault(label, []).append(row["f1"])
            supports[label] = supports.get(label, 0) + row["support"]
    return {
        label: {"f1": fsum(values) / len(values), "support": supports[label]}
        for label, values in f1s.items()
    }


def _aggregate_mode(mode_reports: Sequence[dict], pool_counts: bool) -> tuple[dict, float]:
    if pool_counts:
        stats = _pooled_class_stats(mode_reports)
        macro_values = [row["f1"] for _, row in sorted(stats.items()) if row["support"] > 0]
        macro = fsum(macro_values) / len(macro_values) if macro_values else 0.0
    else:
        stats = _averaged_class_stats(mode_reports)
        macro = fsum(r["macro_f1"] for r in mode_reports) / len(mode_reports)
    return stats, macro


def compare_eval_reports(
    reports_a: Sequence[dict],
    reports_b: Sequence[dict],
    corpora_a: Sequence[str],
    corpora_b: Sequence[str],
    pool_counts: bool = False,
) -> dict:
    """Per-class F1 deltas (system B minus system A) per scoring mode.

    Multi-corpus inputs are averaged per system before subtraction
    (mean of per-corpus F1 values, or pooled counts with pool_counts).
    """
    out: dict = {
        "corpora_a": list(corpora_a),
        "corpora_b": list(corpora_b),
        "averaging": "pooled_counts" if pool_counts else "mean_f1",
    }
    for mode_key, out_key in (("typed_mention", "mention"), ("typed_link", "link")):
        in_a = [r.get(mode_key) for r in reports_a]
        in_b = [r.get(mode_key) for r in reports_b]
        for name, present in (("A", in_a), ("B", in_b)):
            if any(x is None for x in present) and any(x is not None for x in present):
                raise ReportModeError(
                    f"system {name}: mode {mode_key} present in some reports but not all"
                )
        has_a = all(x is not None for x in in_a)
        has_b = all(x is not None for x in in_b)
        if has_a != has_b:
            raise ReportModeError(f"mode mismatch: {mode_key} present in only one system")
        if not has_a:
            out[out_key] = None
            continue
        stats_a, macro_a = _aggregate_mode(in_a, pool_counts)
        stats_b, macro_b = _aggregate_mode(in_b, pool_counts)
        labels = set(stats_a) | set(stats_b)

        def sort_key(label: str):
            support = max(
                stats_a.get(label, {}).get("support", 0),
                stats_b.get(label, {}).get("support", 0),
            )
            return (-support, label)

        per_class = {}
        for label in sorted(labels, key=sort_key):
            f1_a = stats_a.get(label, {}).get("f1", 0.0)
            f1_b = stats_b.get(label, {}).get("f1", 0.0)
            per_class[label] = {
                "f1_a": f1_a,
                "f1_b": f1_b,
                "delta": f1_b - f1_a,
                "support_a": stats_a.get(label, {}).get("support", 0),
                "support_b": stats_b.get(label, {}).get("support", 0),
            }
        out[out_key] = {
            "per_class": per_class,
            "macro_f1_a": macro_a,
            "macro_f1_b": macro_b,
            "macro_delta": macro_b - macro_a,
        }
    if out.get("mention") is None and out.get("link") is None:
        raise ReportModeError("no typed scoring mode shared by the two reports")
    return out


def compare_csv(compare: dict, mode: str) -> str:
    """Plot-ready (class, delta) rows for one mode."""
    block = compare.get(mode)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["class", "delta"])
    if block is not None:
        for label, row in block["per_class"].items():
            writer.writerow([label, repr(row["delta"])])
    return buffer.getvalue()


def render_compare_table(compare: dict) -> str:
    lines = [
        "system comparison (B - A)",
        f"corpora A: {', '.join(compare['corpora_a'])}",
        f"corpora B: {', '.join(compare['corpora_b'])}",
        f"averaging: {compare['averaging']}",
    ]
    for mode in ("mention", "link"):
        block = compare.get(mode)
        if block is None:
            continue
        rows = [["class", "f1_a", "f1_b", "delta", "support_a", "support_b"]]
        for label, row in block["per_class"].items():
            rows.append(
                [label, _f(row["f1_a"]), _f(row["f1_b"]), f"{row['delta']:+.4f}",
                 str(row["support_a"]), str(row["support_b"])]
            )
        lines.append(f"{mode} mode")
        lines.append(_table(rows).rstrip("\n"))
        lines.append(
            f"macro_f1 A {_f(block['macro_f1_a'])}  B {_f(block['macro_f1_b'])}"
            f"  delta {block['macro_delta']:+.4f}"
        )
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Deficiency diagnosis


def diagnose_report(
    eval_report: dict,
    distribution: dict,
    w_mention: float = 0.5,
    w_link: float = 0.5,
    rarity_cap: float = 0.2,
) -> dict:
    """Rank classes by a composite deficiency score.

    composite = w_mention*(1 - mention F1) + w_link*(1 - link F1) + rarity,
    where rarity = min(rarity_cap, 1/support) and support-0 classes take
    the full cap.  A term is dropped when its mode is absent from the eval
    report; a class missing from a present mode scores 0 F1 there.  The
    ranked list is ascending by composite, then support, then name;
    inventory classes with zero gold support are listed separately.
    """
    mention = eval_report.get("typed_mention")
    link = eval_report.get("typed_link")
    if mention is None and link is None:
        raise ReportModeError("diagnosis needs at least one typed mode in the eval report")
    labels: set[str] = set()
    for block in (mention, link):
        if block is not None:
            labels.update(block["per_class"])
    rows = []
    for label in labels:
        mention_row = mention["per_class"].get(label) if mention is not None else None
        link_row = link["per_class"].get(label) if link is not None else None
        if mention is not None:
            support = mention_row["support"] if mention_row else 0
        else:
            support = link_row["support"] if link_row else 0
        composite = 0.0
        f1_mention = f1_link = None
        if mention is not None:
            f1_mention = mention_row["f1"] if mention_row else 0.0
            composite += w_mention * (1.0 - f1_mention)
        if link is not None:
            f1_link = link_row["f1"] if link_row else 0.0
            composite += w_link * (1.0 - f1_link)
        composite += rarity_cap if support <= 0 else min(rarity_cap, 1.0 / support)
        rows.append(
            {
                "label": label,
                "support": support,
                "mention_f1": f1_mention,
                "link_f1": f1_link,
                "composite": composite,
            }
        )
    rows.sort(key=lambda row: (row["composite"], row["support"], row["label"]))
    return {
        "weights": {"mention": w_mention, "link": w_link, "rarity_cap": rarity_cap},
        "absent_classes": list(distribution.get("absent_labels", [])),
        "ranked": rows,
    }


def render_diagnose_table(report: dict) -> str:
    lines = ["class deficiency diagnosis"]
    absent = report["absent_classes"]
    lines.append("absent classes (support 0): " + (", ".join(absent) if absent else "(none)"))
    rows = [["class", "support", "mention_f1", "link_f1", "composite"]]
    for row in report["ranked"]:
        rows.append(
            [row["label"], str(row["support"]),
             _f(row["mention_f1"]) if row["mention_f1"] is not None else "-",
             _f(row["link_f1"]) if row["link_f1"] is not None else "-",
             _f(row["composite"])]
        )
    lines.append(_table(rows).rstrip("\n"))
    weights = report["weights"]
    lines.append(
        f"weights: mention {_f(weights['mention'])}, link {_f(weights['link'])}, "
        f"rarity cap {_f(weights['rarity_cap'])}"
    )
    return "\n".join(lines) + "\n"
