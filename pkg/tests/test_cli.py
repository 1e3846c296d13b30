import json
from pathlib import Path

import pytest

from fillergap.cli import main

from conftest import FIXTURES

GOLD_CORPUS = str(FIXTURES / "gold_corpus.jsonl")


def run(capsys, *argv):
    status = main(list(argv))
    out = capsys.readouterr()
    summary = json.loads(out.out.strip().splitlines()[-1])
    return status, summary, out.err


def small_corpus(tmp_path, n=3):
    lines = Path(GOLD_CORPUS).read_text().strip().splitlines()
    path = tmp_path / "corpus.jsonl"
    path.write_text("\n".join(lines[:n]) + "\n")
    return path


class TestDetect:
    def test_three_utterances_three_lines(self, tmp_path, capsys):
        corpus = small_corpus(tmp_path, 3)
        out = tmp_path / "det.jsonl"
        status, summary, _ = run(capsys, "detect", "--in", str(corpus),
                                 "--out", str(out))
        assert status == 0
        assert summary["counts"]["utterances"] == 3
        assert len(out.read_text().strip().splitlines()) == 3

    def test_worker_count_does_not_change_output(self, tmp_path, capsys):
        out1 = tmp_path / "det1.jsonl"
        out2 = tmp_path / "det2.jsonl"
        assert run(capsys, "detect", "--in", GOLD_CORPUS, "--out", str(out1),
                   "--workers", "1")[0] == 0
        assert run(capsys, "detect", "--in", GOLD_CORPUS, "--out", str(out2),
                   "--workers", "3")[0] == 0
        assert out1.read_bytes() == out2.read_bytes()

    def test_lenient_skips_bad_lines(self, tmp_path, capsys):
        corpus = small_corpus(tmp_path, 2)
        with open(corpus, "a") as handle:
            handle.write("{broken\n")
        out = tmp_path / "det.jsonl"
        status, summary, err = run(capsys, "detect", "--in", str(corpus),
                                   "--out", str(out))
        assert status == 0
        assert summary["counts"]["skipped"] == 1
        assert "skipping" in err

    def test_strict_fails_on_bad_line(self, tmp_path, capsys):
        corpus = small_corpus(tmp_path, 2)
        with open(corpus, "a") as handle:
            handle.write("{broken\n")
        out = tmp_path / "det.jsonl"
        status, _, _ = run(capsys, "detect", "--in", str(corpus),
                           "--out", str(out), "--strict")
        assert status == 1
        assert not out.exists()


class TestGold:
    def test_tree_file_to_labels(self, tmp_path, capsys):
        trees = tmp_path / "trees.txt"
        trees.write_text(
            "q1\t(ROOT (SBARQ (WHNP-1 (WP what)) (SQ (VP (MD should) "
            "(NP (DT the) (NN birdie)) (VP (VB say) (NP (-NONE-ABAR-WH- *T*-1))))) (. ?)))\n"
            "d1\t(S (NP (NN dog)) (VP (VBD ran)))\n")
        out = tmp_path / "gold.jsonl"
        status, summary, _ = run(capsys, "gold", "--in", str(trees), "--out", str(out))
        assert status == 0
        records = {json.loads(l)["utterance_id"]: json.loads(l)["labels"]
                   for l in out.read_text().strip().splitlines()}
        assert records == {"q1": ["OMQ"], "d1": []}
        assert summary["counts"]["labeled"] == 1

    def test_rc_traces_flag_and_diagnostics(self, tmp_path, capsys):
        trees = tmp_path / "trees.txt"
        trees.write_text(
            "r1\t(TOP (S (NP (NP (DT The) (NN professor)) (SBAR (WHNP-1 (WP who)) "
            "(S (NP (-NONE-REL-SBJ- *T*-1)) (VP (VBD smiled))))) (VP (VBD left)) (. .)))\n"
            "bad\t(S (NP\n")
        out = tmp_path / "gold.jsonl"
        diag = tmp_path / "diag.txt"
        status, summary, _ = run(capsys, "gold", "--in", str(trees),
                                 "--out", str(out), "--diagnostics", str(diag))
        assert status == 0
        records = {json.loads(l)["utterance_id"]: json.loads(l)["labels"]
                   for l in out.read_text().strip().splitlines()}
        assert records["r1"] == []  # rc-trace mode off
        assert "bad" in diag.read_text()

        status, summary, _ = run(capsys, "gold", "--in", str(trees),
                                 "--out", str(out), "--diagnostics", str(diag),
                                 "--rc-traces")
        records = {json.loads(l)["utterance_id"]: json.loads(l)["labels"]
                   for l in out.read_text().strip().splitlines()}
        assert records["r1"] == ["SRC"]


class TestEvaluate:
    def write_labels(self, path, mapping):
        with open(path, "w") as handle:
            for utt_id, labels in mapping.items():
                handle.write(json.dumps({"utterance_id": utt_id,
                                         "labels": labels}) + "\n")

    def test_identical_pred_gold_all_ones(self, tmp_path, capsys):
        mapping = {"u1": ["SRC"], "u2": ["OMQ"], "u3": ["SEQ", "ARC"]}
        pred = tmp_path / "pred.jsonl"
        gold = tmp_path / "gold.jsonl"
        self.write_labels(pred, mapping)
        self.write_labels(gold, mapping)
        out = tmp_path / "report.csv"
        status, _, _ = run(capsys, "evaluate", "--pred", str(pred),
                           "--gold", str(gold), "--out", str(out))
        assert status == 0
        rows = [line.split(",") for line in out.read_text().splitlines()
                if not line.startswith("#")]
        header, data = rows[0], rows[1:]
        f1_col = header.index("f1")
        assert data
        assert all(row[f1_col] == "1.000000" for row in data)

    def test_merge_policy_applied(self, tmp_path, capsys):
        pred = tmp_path / "pred.jsonl"
        gold = tmp_path / "gold.jsonl"
        self.write_labels(pred, {"u1": ["CC_OMQ"]})
        self.write_labels(gold, {"u1": ["OMQ"]})
        out = tmp_path / "report.csv"
        run(capsys, "evaluate", "--pred", str(pred), "--gold", str(gold),
            "--out", str(out))
        text = out.read_text()
        assert "OMQ,1.000000" in text
        assert "CC_OMQ" not in text

    def test_overrides_file(self, tmp_path, capsys):
        pred = tmp_path / "pred.jsonl"
        gold = tmp_path / "gold.jsonl"
        self.write_labels(pred, {})
        self.write_labels(gold, {"u1": ["SEQ"]})
        overrides = tmp_path / "overrides.jsonl"
        overrides.write_text(json.dumps(
            {"utterance_id": "u1", "label": "SEQ", "forced_tp": True}) + "\n")
        out = tmp_path / "report.csv"
        run(capsys, "evaluate", "--pred", str(pred), "--gold", str(gold),
            "--out", str(out), "--overrides", str(overrides))
        assert "SEQ,1.000000,1.000000,1.000000,1,0,0,1,1" in out.read_text()

    def test_custom_excluded_set(self, tmp_path, capsys):
        pred = tmp_path / "pred.jsonl"
        gold = tmp_path / "gold.jsonl"
        self.write_labels(pred, {"u1": ["PMQ"]})
        self.write_labels(gold, {"u1": ["PMQ"]})
        out = tmp_path / "report.csv"
        run(capsys, "evaluate", "--pred", str(pred), "--gold", str(gold),
            "--out", str(out), "--excluded", "none")
        assert "PMQ,1.000000" in out.read_text()


class TestStatsAndDeterminism:
    def prepare(self, tmp_path, capsys):
        det = tmp_path / "det.jsonl"
        run(capsys, "detect", "--in", GOLD_CORPUS, "--out", str(det))
        return det

    def test_outputs_and_reproducibility(self, tmp_path, capsys):
        det = self.prepare(tmp_path, capsys)
        outs = []
        for tag in ("a", "b"):
            out_dir = tmp_path / tag
            status, summary, _ = run(
                capsys, "stats", "--in", GOLD_CORPUS, "--detections", str(det),
                "--out-dir", str(out_dir), "--seed", "11")
            assert status == 0
            outs.append(out_dir)
        names = ["rates.csv", "log_ratios.csv", "subject_share.csv", "delta_subj.csv"]
        for name in names:
            a, b = (out / name for out in outs)
            assert a.exists()
            assert a.read_bytes() == b.read_bytes()

    def test_seed_required(self, tmp_path, capsys):
        det = self.prepare(tmp_path, capsys)
        status, _, err = run(capsys, "stats", "--in", GOLD_CORPUS,
                             "--detections", str(det),
                             "--out-dir", str(tmp_path / "x"))
        assert status == 1
        assert "--seed" in err

    def test_longitudinal_outputs(self, tmp_path, capsys):
        det = self.prepare(tmp_path, capsys)
        out_dir = tmp_path / "stats"
        status, summary, _ = run(
            capsys, "stats", "--in", GOLD_CORPUS, "--detections", str(det),
            "--out-dir", str(out_dir), "--seed", "1",
            "--longitudinal-corpus", "fixtures")
        assert status == 0
        assert (out_dir / "longitudinal.csv").exists()
        assert (out_dir / "label_totals.csv").exists()
        assert summary["counts"]["longitudinal_months"] >= 1


class TestFilter:
    def test_end_to_end(self, tmp_path, capsys):
        det = tmp_path / "det.jsonl"
        run(capsys, "detect", "--in", GOLD_CORPUS, "--out", str(det))
        out_dir = tmp_path / "filtered"
        status, summary, _ = run(
            capsys, "filter", "--in", GOLD_CORPUS, "--detections", str(det),
            "--target", "RC", "--out-dir", str(out_dir), "--seed", "4",
            "--tolerance", "0.2")
        assert status == 0
        counts = summary["counts"]
        assert counts["targeted_removed_sentences"] == \
            counts["control_removed_sentences"]
        kept = (out_dir / "kept_targeted.jsonl").read_text().strip().splitlines()
        removed = (out_dir / "removed_targeted.jsonl").read_text().strip().splitlines()
        assert len(kept) + len(removed) == counts["sentences"]
        for line in removed:
            assert json.loads(line)["labels"]
        train = (out_dir / "train_targeted.txt").read_text().strip().splitlines()
        assert len(train) == len(kept)
        plan = json.loads((out_dir / "plan_targeted.json").read_text())
        assert plan["mode"] == "targeted"
        assert plan["token_unit"] == "tokens_field"

    def test_exclude_target_from_control(self, tmp_path, capsys):
        det = tmp_path / "det.jsonl"
        run(capsys, "detect", "--in", GOLD_CORPUS, "--out", str(det))
        out_dir = tmp_path / "filtered"
        status, _, _ = run(
            capsys, "filter", "--in", GOLD_CORPUS, "--detections", str(det),
            "--target", "RC", "--out-dir", str(out_dir), "--seed", "4",
            "--tolerance", "0.5", "--exclude-target-from-control")
        assert status == 0
        targeted = json.loads((out_dir / "plan_targeted.json").read_text())
        control = json.loads((out_dir / "plan_control.json").read_text())
        assert not set(targeted["removed_ids"]) & set(control["removed_ids"])


class TestMinpairs:
    def test_generate_and_score_round_trip(self, tmp_path, capsys):
        items = tmp_path / "items.jsonl"
        requests = tmp_path / "requests.jsonl"
        status, summary, _ = run(capsys, "minpairs-gen", "--out", str(items),
                                 "--requests", str(requests), "--seed", "0")
        assert status == 0
        assert summary["counts"]["requests"] == summary["counts"]["items"] * 4

        scores = tmp_path / "scores.jsonl"
        with open(requests) as src, open(scores, "w") as dst:
            for line in src:
                request = json.loads(line)
                lp = -1.0 if request["request_id"].endswith("#gram") else -2.0
                dst.write(json.dumps({"request_id": request["request_id"],
                                      "logprob": lp}) + "\n")
        results = tmp_path / "results.csv"
        status, summary, _ = run(capsys, "minpairs-score", "--items", str(items),
                                 "--scores", str(scores), "--out", str(results))
        assert status == 0
        assert summary["counts"]["overall_accuracy"] == 1.0
        text = results.read_text()
        assert "overall" in text

    def test_limit_is_applied(self, tmp_path, capsys):
        items = tmp_path / "items.jsonl"
        requests = tmp_path / "requests.jsonl"
        status, summary, _ = run(capsys, "minpairs-gen", "--out", str(items),
                                 "--requests", str(requests), "--limit", "2",
                                 "--seed", "9")
        assert status == 0
        assert summary["counts"]["items"] == 10  # 2 per template, 5 templates

    def test_custom_template_and_lexicon_files(self, tmp_path, capsys):
        templates = tmp_path / "templates.json"
        templates.write_text(json.dumps({"templates": [{
            "template_id": "toy", "construction": "matrixQ", "site": "object",
            "skeletons": {
                "gap_grammatical": "What will {subject} find | there",
                "gap_ungrammatical": "{Subject} will find | there",
                "filled_grammatical": "{Subject} will find | it",
                "filled_ungrammatical": "What will {subject} find | it"},
            "slots": {"subject": "subj"}}]}))
        lexicon = tmp_path / "lexicon.json"
        lexicon.write_text(json.dumps({"subj": ["you", "they"]}))
        items = tmp_path / "items.jsonl"
        requests = tmp_path / "requests.jsonl"
        status, summary, _ = run(capsys, "minpairs-gen",
                                 "--templates", str(templates),
                                 "--lexicon", str(lexicon),
                                 "--out", str(items), "--requests", str(requests),
                                 "--seed", "0")
        assert status == 0
        assert summary["counts"]["items"] == 2
        first = json.loads(items.read_text().splitlines()[0])
        assert first["pairs"][0]["grammatical"]["context"] == "What will you find"


class TestValidate:
    def test_valid_corpus(self, capsys):
        status, summary, _ = run(capsys, "validate", "--in", GOLD_CORPUS)
        assert status == 0
        assert summary["counts"]["invalid"] == 0

    def test_invalid_corpus_nonzero_exit(self, tmp_path, capsys):
        path = tmp_path / "bad.jsonl"
        path.write_text("{\"nope\": 1}\n")
        status, summary, err = run(capsys, "validate", "--in", str(path))
        assert status == 1
        assert summary["counts"]["invalid"] == 1
        assert "line 1" in err


class TestConfigMerge:
    def test_cli_overrides_config(self, tmp_path, capsys):
        det = tmp_path / "det.jsonl"
        run(capsys, "detect", "--in", GOLD_CORPUS, "--out", str(det))
        config = tmp_path / "config.json"
        config.write_text(json.dumps({
            "in": GOLD_CORPUS, "detections": str(det),
            "out-dir": str(tmp_path / "from_config"), "seed": 5, "bin-width": 12}))
        status, summary, _ = run(capsys, "stats", "--config", str(config),
                                 "--seed", "6")
        assert status == 0
        assert summary["config"]["seed"] == 6       # flag wins
        assert summary["config"]["bin_width"] == 12  # config fills the rest
        assert (tmp_path / "from_config" / "rates.csv").exists()

    def test_unknown_subcommand_exits_2(self):
        with pytest.raises(SystemExit) as err:
            main(["frobnicate"])
        assert err.value.code == 2

    def test_missing_required_flag(self, capsys):
        status, _, err = run(capsys, "detect", "--in", GOLD_CORPUS)
        assert status == 1
        assert "--out" in err
