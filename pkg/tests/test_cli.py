import json
import random

import pytest

from coref_semscore.cli import main
from conftest import COMPOSITE_RECORD, NEWS_RECORD
from corpusgen import random_corpus


def write_jsonl(path, records):
    path.write_text("".join(json.dumps(r) + "\n" for r in records), encoding="utf-8")
    return str(path)


@pytest.fixture
def news_path(tmp_path):
    record = dict(NEWS_RECORD)
    record["predicted_clusters"] = record["gold_clusters"]
    return write_jsonl(tmp_path / "news.jsonl", [record])


@pytest.fixture
def corpus_path(tmp_path):
    rng = random.Random(99)
    records = random_corpus(rng, 12, ensure_links=True, ensure_direct=True)
    return write_jsonl(tmp_path / "corpus.jsonl", records)


class TestLabelCommand:
    def test_labels_and_reports_coverage(self, tmp_path, news_path, capsys):
        out = tmp_path / "out"
        code = main(["label", "--gold", news_path, "--out", str(out)])
        assert code == 0
        lines = (out / "labeled.jsonl").read_text().splitlines()
        record = json.loads(lines[0])
        assert record["cluster_labels"]["gold"] == ["PER", "LOC"]
        assert record["mention_label_sources"]["gold"][0] == [
            "direct", "direct", "propagated", "propagated", "direct",
        ]
        coverage = json.loads((out / "coverage.json").read_text())
        assert coverage["gold"]["overall"]["any_pct"] == 100.0
        assert coverage["gold"]["pronoun"]["direct_pct"] == 0.0
        assert "labeling coverage" in capsys.readouterr().out

    def test_composite_fixture_propagates_to_plural(self, tmp_path):
        path = write_jsonl(tmp_path / "summit.jsonl", [COMPOSITE_RECORD])
        out = tmp_path / "out"
        assert main(["label", "--gold", path, "--out", str(out)]) == 0
        record = json.loads((out / "labeled.jsonl").read_text())
        assert record["cluster_labels"]["gold"] == ["PER", "PER", "PER"]
        assert record["mention_labels"]["gold"][2] == ["PER", "PER"]
        assert record["mention_label_sources"]["gold"][2] == ["direct", "propagated"]

    def test_empty_corpus(self, tmp_path):
        path = write_jsonl(tmp_path / "empty.jsonl", [])
        out = tmp_path / "out"
        assert main(["label", "--gold", path, "--out", str(out)]) == 0
        assert (out / "labeled.jsonl").read_text() == ""
        coverage = json.loads((out / "coverage.json").read_text())
        assert coverage["gold"]["overall"]["total"] == 0

    def test_pronoun_only_cluster_unlabeled(self, tmp_path):
        record = {
            "doc_id": "p0", "tokens": ["he", "him"],
            "gold_clusters": [[[0, 1], [1, 2]]], "cner": [],
        }
        extra = {
            "doc_id": "p1", "tokens": ["Rome", "falls"],
            "gold_clusters": [[[0, 1]]], "cner": [[0, 1, "LOC"]],
        }
        path = write_jsonl(tmp_path / "pron.jsonl", [record, extra])
        out = tmp_path / "out"
        assert main(["label", "--gold", path, "--out", str(out)]) == 0
        first = json.loads((out / "labeled.jsonl").read_text().splitlines()[0])
        assert first["cluster_labels"]["gold"] == [None]
        coverage = json.loads((out / "coverage.json").read_text())
        assert coverage["gold"]["overall"]["unlabeled"] == 2

    def test_tau_flag_changes_assignment(self, tmp_path):
        record = {
            "doc_id": "t0", "tokens": ["Mr.", "Stone", "waved"],
            "gold_clusters": [[[0, 2]]], "cner": [[1, 2, "PER"]],
        }
        path = write_jsonl(tmp_path / "tau.jsonl", [record])
        out_strict = tmp_path / "strict"
        assert main(["label", "--gold", path, "--out", str(out_strict)]) == 0
        strict = json.loads((out_strict / "labeled.jsonl").read_text())
        assert strict["cluster_labels"]["gold"] == [None]
        out_incl = tmp_path / "inclusive"
        assert main(["label", "--gold", path, "--tau-inclusive",
                     "--out", str(out_incl)]) == 0
        inclusive = json.loads((out_incl / "labeled.jsonl").read_text())
        assert inclusive["cluster_labels"]["gold"] == ["PER"]
        assert inclusive["mention_overlaps"]["gold"][0] == [0.5]

    def test_custom_pronoun_lexicon(self, tmp_path):
        record = {
            "doc_id": "x0", "tokens": ["thingy", "Rome"],
            "gold_clusters": [[[0, 1], [1, 2]]], "cner": [[1, 2, "LOC"]],
        }
        path = write_jsonl(tmp_path / "x.jsonl", [record])
        lex = tmp_path / "lex.txt"
        lex.write_text("thingy\n", encoding="utf-8")
        out = tmp_path / "out"
        assert main(["label", "--gold", path, "--pronouns", str(lex),
                     "--out", str(out)]) == 0
        coverage = json.loads((out / "coverage.json").read_text())
        assert coverage["gold"]["pronoun"]["total"] == 1
        assert coverage["gold"]["pronoun"]["propagated"] == 1


class TestEvalCommand:
    def test_identity_full_report(self, tmp_path, news_path):
        out = tmp_path / "out"
        code = main(["eval", "--gold", news_path, "--typed-mention", "--typed-link",
                     "--classic", "--out", str(out)])
        assert code == 0
        report = json.loads((out / "eval_report.json").read_text())
        for mode in ("typed_mention", "typed_link"):
            per_class = report[mode]["per_class"]
            assert per_class
            assert all(row["f1"] == 1.0 for row in per_class.values())
            assert report[mode]["macro_f1"] == 1.0
        assert report["classic"]["conll_f1"] == 1.0

    def test_determinism_byte_identical(self, tmp_path, corpus_path):
        out_a, out_b = tmp_path / "a", tmp_path / "b"
        args = ["eval", "--gold", corpus_path, "--typed-mention", "--typed-link",
                "--classic"]
        assert main(args + ["--out", str(out_a)]) == 0
        assert main(args + ["--out", str(out_b)]) == 0
        assert (out_a / "eval_report.json").read_bytes() == \
            (out_b / "eval_report.json").read_bytes()
        assert (out_a / "eval_report.txt").read_bytes() == \
            (out_b / "eval_report.txt").read_bytes()

    def test_requires_a_mode_flag(self, news_path, capsys):
        assert main(["eval", "--gold", news_path]) == 2
        assert "requires at least one" in capsys.readouterr().err

    def test_typed_without_cner_exits_3(self, tmp_path, capsys):
        record = {"doc_id": "d0", "tokens": ["a", "b"],
                  "gold_clusters": [[[0, 1]]], "predicted_clusters": [[[0, 1]]]}
        path = write_jsonl(tmp_path / "bare.jsonl", [record])
        assert main(["eval", "--gold", path, "--typed-mention"]) == 3
        assert "semantic spans" in capsys.readouterr().err

    def test_classic_without_cner_succeeds(self, tmp_path):
        record = {"doc_id": "d0", "tokens": ["a", "b"],
                  "gold_clusters": [[[0, 1], [1, 2]]],
                  "predicted_clusters": [[[0, 1], [1, 2]]]}
        path = write_jsonl(tmp_path / "bare.jsonl", [record])
        out = tmp_path / "out"
        assert main(["eval", "--gold", path, "--classic", "--out", str(out)]) == 0
        report = json.loads((out / "eval_report.json").read_text())
        assert report["classic"]["muc"]["f1"] == 1.0
        assert report["typed_mention"] is None

    def test_missing_predictions_exit_3(self, tmp_path, capsys):
        record = {"doc_id": "d0", "tokens": ["a"], "gold_clusters": [[[0, 1]]],
                  "cner": [[0, 1, "PER"]]}
        path = write_jsonl(tmp_path / "nopred.jsonl", [record])
        assert main(["eval", "--gold", path, "--classic"]) == 3
        assert "predicted clusters" in capsys.readouterr().err

    def test_parse_error_exits_2(self, tmp_path, capsys):
        path = tmp_path / "broken.jsonl"
        path.write_text('{"doc_id": "d0", "tokens": ["a"]}\n{oops\n', encoding="utf-8")
        assert main(["eval", "--gold", str(path), "--classic"]) == 2
        assert "line 2" in capsys.readouterr().err

    def test_validation_error_exits_2(self, tmp_path, capsys):
        record = {"doc_id": "d0", "tokens": ["a"], "gold_clusters": [[[0, 9]]]}
        path = write_jsonl(tmp_path / "invalid.jsonl", [record])
        assert main(["eval", "--gold", str(path), "--classic"]) == 2
        assert "[0, 9)" in capsys.readouterr().err

    def test_separate_pred_file(self, tmp_path):
        gold = {"doc_id": "d0", "tokens": ["Rome", "is", "Rome"],
                "gold_clusters": [[[0, 1], [2, 3]]],
                "cner": [[0, 1, "LOC"], [2, 3, "LOC"]]}
        pred = {"doc_id": "d0", "tokens": ["Rome", "is", "Rome"],
                "predicted_clusters": [[[0, 1], [2, 3]]]}
        gold_path = write_jsonl(tmp_path / "gold.jsonl", [gold])
        pred_path = write_jsonl(tmp_path / "pred.jsonl", [pred])
        out = tmp_path / "out"
        assert main(["eval", "--gold", gold_path, "--pred", pred_path,
                     "--typed-link", "--link-mention-source", "gold",
                     "--out", str(out)]) == 0
        report = json.loads((out / "eval_report.json").read_text())
        assert report["typed_link"]["per_class"]["LOC"]["f1"] == 1.0
        assert report["typed_link"]["containment_violations"] == 0
        assert report["config"]["link_mention_source"] == "gold"

    def test_doc_id_mismatch_exits_2(self, tmp_path, capsys):
        gold = {"doc_id": "d0", "tokens": ["a"], "gold_clusters": [[[0, 1]]]}
        pred = {"doc_id": "d1", "tokens": ["a"], "predicted_clusters": [[[0, 1]]]}
        gold_path = write_jsonl(tmp_path / "gold.jsonl", [gold])
        pred_path = write_jsonl(tmp_path / "pred.jsonl", [pred])
        assert main(["eval", "--gold", gold_path, "--pred", pred_path,
                     "--classic"]) == 2
        err = capsys.readouterr().err
        assert "d0" in err and "d1" in err

    def test_drop_singletons_changes_classic(self, tmp_path):
        record = {"doc_id": "d0", "tokens": ["a", "b", "c", "d"],
                  "gold_clusters": [[[0, 1], [1, 2]], [[2, 3]]],
                  "predicted_clusters": [[[0, 1], [1, 2]], [[3, 4]]]}
        path = write_jsonl(tmp_path / "s.jsonl", [record])
        out_keep, out_drop = tmp_path / "keep", tmp_path / "drop"
        assert main(["eval", "--gold", path, "--classic", "--out", str(out_keep)]) == 0
        assert main(["eval", "--gold", path, "--classic", "--drop-singletons",
                     "--out", str(out_drop)]) == 0
        keep = json.loads((out_keep / "eval_report.json").read_text())
        drop = json.loads((out_drop / "eval_report.json").read_text())
        assert drop["classic"]["b_cubed"]["f1"] == 1.0
        assert keep["classic"]["b_cubed"]["f1"] < 1.0
        assert drop["config"]["drop_singletons"] is True

    def test_conll_format_input(self, tmp_path):
        gold_text = (
            "#begin document (demo); part 000\n"
            "demo 0 0 Rome NNP (0)\n"
            "demo 0 1 is VBZ -\n"
            "demo 0 2 Rome NNP (0)\n"
            "#end document\n"
        )
        gold_path = tmp_path / "gold.conll"
        gold_path.write_text(gold_text, encoding="utf-8")
        pred_path = tmp_path / "pred.conll"
        pred_path.write_text(gold_text, encoding="utf-8")
        out = tmp_path / "out"
        assert main(["eval", "--gold", str(gold_path), "--pred", str(pred_path),
                     "--format", "conll", "--classic", "--out", str(out)]) == 0
        report = json.loads((out / "eval_report.json").read_text())
        assert report["classic"]["conll_f1"] == 1.0

    def test_prelabeled_corpus_reused_without_cner(self, tmp_path, news_path):
        out_label = tmp_path / "labeled"
        assert main(["label", "--gold", news_path, "--out", str(out_label)]) == 0
        labeled_path = out_label / "labeled.jsonl"
        record = json.loads(labeled_path.read_text())
        record["cner"] = []
        bare = write_jsonl(tmp_path / "prelabeled.jsonl", [record])
        out = tmp_path / "out"
        assert main(["eval", "--gold", bare, "--typed-mention",
                     "--out", str(out)]) == 0
        report = json.loads((out / "eval_report.json").read_text())
        assert report["typed_mention"]["macro_f1"] == 1.0


class TestCoverageAndDistributionCommands:
    def test_coverage_command(self, tmp_path, news_path):
        out = tmp_path / "out"
        assert main(["coverage", "--gold", news_path, "--out", str(out)]) == 0
        data = json.loads((out / "coverage.json").read_text())
        assert data["gold"]["overall"]["direct"] == 5
        assert data["predicted"]["overall"]["total"] == 7

    def test_distribution_command(self, tmp_path, news_path):
        out = tmp_path / "out"
        assert main(["distribution", "--gold", news_path, "--out", str(out)]) == 0
        data = json.loads((out / "distribution.json").read_text())
        assert data["counts"] == {"PER": 5, "LOC": 2}
        assert "MONEY" in data["absent_labels"]
        assert abs(sum(data["shares"].values()) - 1.0) < 1e-9


class TestCompareCommand:
    def _eval(self, tmp_path, name, records):
        path = write_jsonl(tmp_path / f"{name}.jsonl", records)
        out = tmp_path / name
        assert main(["eval", "--gold", path, "--typed-mention", "--typed-link",
                     "--out", str(out)]) == 0
        return str(out / "eval_report.json")

    def test_compare_identity_and_csv(self, tmp_path):
        rng = random.Random(5)
        records = random_corpus(rng, 6, ensure_links=True, ensure_direct=True)
        report = self._eval(tmp_path, "a", records)
        out = tmp_path / "cmp"
        assert main(["compare", "-a", report, "-b", report, "--out", str(out)]) == 0
        data = json.loads((out / "compare.json").read_text())
        assert all(row["delta"] == 0.0 for row in data["mention"]["per_class"].values())
        csv_lines = (out / "compare_mention.csv").read_text().splitlines()
        assert csv_lines[0] == "class,delta"
        assert len(csv_lines) == len(data["mention"]["per_class"]) + 1

    def test_compare_mode_mismatch_exits_2(self, tmp_path, news_path, capsys):
        out_full = tmp_path / "full"
        assert main(["eval", "--gold", news_path, "--typed-mention", "--typed-link",
                     "--out", str(out_full)]) == 0
        out_mention = tmp_path / "mention"
        assert main(["eval", "--gold", news_path, "--typed-mention",
                     "--out", str(out_mention)]) == 0
        assert main(["compare", "-a", str(out_full / "eval_report.json"),
                     "-b", str(out_mention / "eval_report.json")]) == 2
        assert "mode mismatch" in capsys.readouterr().err


class TestDiagnoseCommand:
    def test_diagnose_outputs(self, tmp_path, news_path):
        out_eval = tmp_path / "eval"
        assert main(["eval", "--gold", news_path, "--typed-mention", "--typed-link",
                     "--out", str(out_eval)]) == 0
        out_dist = tmp_path / "dist"
        assert main(["distribution", "--gold", news_path, "--out", str(out_dist)]) == 0
        out = tmp_path / "diag"
        assert main(["diagnose", "--eval-report", str(out_eval / "eval_report.json"),
                     "--distribution-report", str(out_dist / "distribution.json"),
                     "--out", str(out)]) == 0
        data = json.loads((out / "diagnose.json").read_text())
        assert "MONEY" in data["absent_classes"]
        composites = [row["composite"] for row in data["ranked"]]
        assert composites == sorted(composites)
        assert data["weights"] == {"mention": 0.5, "link": 0.5, "rarity_cap": 0.2}


class TestValidateLabelsCommand:
    def test_agreement_flow(self, tmp_path, news_path, capsys):
        reference = {"news0": {"0": "PER", "1": "LOC"}}
        ref_path = tmp_path / "ref.json"
        ref_path.write_text(json.dumps(reference), encoding="utf-8")
        out = tmp_path / "out"
        assert main(["validate-labels", "--gold", news_path, "--reference",
                     str(ref_path), "--out", str(out)]) == 0
        data = json.loads((out / "agreement.json").read_text())
        assert data["precision"] == data["recall"] == data["f1"] == 1.0
        assert data["reference_entries"] == 2

    def test_partial_agreement(self, tmp_path, news_path):
        reference = {"news0": {"0": "PER", "1": "ORG"}}
        ref_path = tmp_path / "ref.json"
        ref_path.write_text(json.dumps(reference), encoding="utf-8")
        out = tmp_path / "out"
        assert main(["validate-labels", "--gold", news_path, "--reference",
                     str(ref_path), "--out", str(out)]) == 0
        data = json.loads((out / "agreement.json").read_text())
        assert data["precision"] == 0.5
        assert data["true_positives"] == 1

    def test_bad_reference_key_exits_2(self, tmp_path, news_path, capsys):
        ref_path = tmp_path / "ref.json"
        ref_path.write_text(json.dumps({"nope": {"0": "PER"}}), encoding="utf-8")
        assert main(["validate-labels", "--gold", news_path,
                     "--reference", str(ref_path)]) == 2
        assert "nope" in capsys.readouterr().err


class TestInventoryEnvVar:
    def test_alternate_inventory(self, tmp_path, monkeypatch):
        inventory = [
            {"label": "FOO", "description": "demo", "aliases": ["FOOBAR"]},
            {"label": "BAR"},
        ]
        inv_path = tmp_path / "inv.json"
        inv_path.write_text(json.dumps(inventory), encoding="utf-8")
        monkeypatch.setenv("COREF_SEMSCORE_INVENTORY", str(inv_path))
        record = {"doc_id": "d0", "tokens": ["x", "y"],
                  "gold_clusters": [[[0, 1], [1, 2]]],
                  "cner": [[0, 1, "FOOBAR"]]}
        path = write_jsonl(tmp_path / "c.jsonl", [record])
        out = tmp_path / "out"
        assert main(["label", "--gold", path, "--out", str(out)]) == 0
        data = json.loads((out / "labeled.jsonl").read_text())
        assert data["cluster_labels"]["gold"] == ["FOO"]

    def test_default_labels_rejected_under_alternate_inventory(
        self, tmp_path, monkeypatch, capsys
    ):
        inv_path = tmp_path / "inv.json"
        inv_path.write_text(json.dumps([{"label": "FOO"}]), encoding="utf-8")
        monkeypatch.setenv("COREF_SEMSCORE_INVENTORY", str(inv_path))
        record = {"doc_id": "d0", "tokens": ["x"], "cner": [[0, 1, "PER"]]}
        path = write_jsonl(tmp_path / "c.jsonl", [record])
        assert main(["label", "--gold", path, "--out", str(tmp_path / "o")]) == 2
        assert "PER" in capsys.readouterr().err


class TestForceClusterLabel:
    def test_direct_disagreement_overwritten(self, tmp_path):
        record = {
            "doc_id": "f0", "tokens": ["a", "b", "c", "d", "e", "f"],
            "gold_clusters": [[[0, 1], [2, 3], [4, 5]]],
            "cner": [[0, 1, "PER"], [2, 3, "PER"], [4, 5, "LOC"]],
        }
        path = write_jsonl(tmp_path / "f.jsonl", [record])
        out_soft, out_hard = tmp_path / "soft", tmp_path / "hard"
        assert main(["label", "--gold", path, "--out", str(out_soft)]) == 0
        soft = json.loads((out_soft / "labeled.jsonl").read_text())
        assert soft["mention_labels"]["gold"][0] == ["PER", "PER", "LOC"]
        assert main(["label", "--gold", path, "--force-cluster-label",
                     "--out", str(out_hard)]) == 0
        hard = json.loads((out_hard / "labeled.jsonl").read_text())
        assert hard["mention_labels"]["gold"][0] == ["PER", "PER", "PER"]
        assert hard["mention_label_sources"]["gold"][0] == ["direct", "direct", "direct"]
