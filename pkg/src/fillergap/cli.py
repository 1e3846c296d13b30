"""Command-line entry point.

Subcommands: detect, gold, evaluate, stats, filter, minpairs-gen,
minpairs-score, validate. Every run writes its outputs atomically
(temp file + rename), prints a machine-readable JSON summary to stdout,
and is byte-reproducible for fixed inputs and seeds.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import multiprocessing
import os
import sys
from importlib import resources
from pathlib import Path

from . import __version__
from .detectors import (DEFAULT_EMBEDDING_VERBS, DEFAULT_FREE_RELATIVE_WORDS,
                        EmbeddingVerbLexicon, FreeRelativeExclusions,
                        detect_all, detection_record)
from .evaluation import DEFAULT_EXCLUDED, score
from .filtering import (DEFAULT_TOLERANCE, FilterError, FilterPlan, SentenceInfo,
                        apply_filter, detokenize, plan_control_filter,
                        plan_targeted_filter, resolve_target)
from .goldtraces import gold_label_corpus, read_tree_file
from .labels import Label, parse_label
from .minpairs import (MinimalPair, MinimalPairItem, emit_scoring_requests,
                       expand_templates, load_lexicon, load_templates,
                       score_accuracy)
from .stats import (BinSpec, DEFAULT_EPSILON, DEFAULT_MIN_COUNT,
                    DEFAULT_RESAMPLES, DEFAULT_Z, GROUPS, CONSTRUCTIONS,
                    LabeledUtterance, bin_utterances,
                    child_longitudinal_summary, delta_subj, log_ratio_series,
                    rate_table, subject_share_table)
from .trees import CorpusError, CorpusReport, ParseError, parse_bracketed, read_corpus


class CliError(Exception):
    pass


@contextlib.contextmanager
def atomic_output(path):
    """Write to <path>.tmp, rename into place on success."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    try:
        with open(tmp, "w", encoding="utf-8", newline="") as handle:
            yield handle
        os.replace(tmp, path)
    finally:
        if tmp.exists():
            tmp.unlink()


def _fmt(value) -> str:
    if value is None:
        return "n/a"
    if isinstance(value, float):
        return format(value, ".12g")
    return str(value)


def write_csv(path, rows, comment: str | None = None) -> None:
    with atomic_output(path) as handle:
        if comment:
            handle.write(f"# {comment}\n")
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerows(rows)


def _load_labels_map(path) -> dict[str, set[Label]]:
    out: dict[str, set[Label]] = {}
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                out[str(obj["utterance_id"])] = {parse_label(v) for v in obj["labels"]}
            except (ValueError, KeyError) as exc:
                raise CliError(f"{path}: line {line_no}: {exc}") from exc
    return out


def _load_word_file(path, default: frozenset[str]) -> frozenset[str]:
    if path is None:
        return default
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    if isinstance(data, dict):
        data = data.get("lemmas") or data.get("words") or []
    return frozenset(str(w).lower() for w in data)


def _packaged(name: str) -> Path:
    return Path(resources.files("fillergap.data") / name)


# ---------------------------------------------------------------------------
# detect


def _detect_payload(payload):
    line_no, line, lexicon_words, exclusion_words = payload
    from .trees import utterance_from_record
    try:
        obj = json.loads(line)
        if not isinstance(obj, dict):
            raise ValueError("record is not a JSON object")
        utt = utterance_from_record(obj)
    except (ValueError, json.JSONDecodeError) as exc:
        return None, None, f"line {line_no}: {exc}"
    detections = detect_all(utt, EmbeddingVerbLexicon(lexicon_words),
                            FreeRelativeExclusions(exclusion_words))
    return utt.meta.utterance_id, json.dumps(detection_record(utt, detections)), None


def cmd_detect(cfg) -> dict:
    lexicon = _load_word_file(cfg["lexicon"], DEFAULT_EMBEDDING_VERBS)
    exclusions = _load_word_file(cfg["exclusions"], DEFAULT_FREE_RELATIVE_WORDS)
    workers = int(cfg["workers"])
    strict = bool(cfg["strict"])
    counts = {"utterances": 0, "skipped": 0, "detections": 0}
    seen: set[str] = set()

    def payloads():
        with open(cfg["in"], encoding="utf-8") as handle:
            for line_no, line in enumerate(handle, start=1):
                if line.strip():
                    yield line_no, line, lexicon, exclusions

    def results():
        if workers <= 1:
            yield from map(_detect_payload, payloads())
        else:
            with multiprocessing.Pool(workers) as pool:
                yield from pool.imap(_detect_payload, payloads(), chunksize=64)

    with atomic_output(cfg["out"]) as out:
        for utt_id, out_line, error in results():
            if error is not None:
                if strict:
                    raise CliError(error)
                counts["skipped"] += 1
                print(f"skipping {error}", file=sys.stderr)
                continue
            if utt_id in seen:
                message = f"duplicate utterance_id {utt_id!r}"
                if strict:
                    raise CliError(message)
                counts["skipped"] += 1
                print(f"skipping {message}", file=sys.stderr)
                continue
            seen.add(utt_id)
            counts["utterances"] += 1
            counts["detections"] += len(json.loads(out_line)["detections"])
            out.write(out_line + "\n")
    return counts


# ---------------------------------------------------------------------------
# gold


def cmd_gold(cfg) -> dict:
    parse_failures: list[str] = []

    def tree_stream():
        with open(cfg["in"], encoding="utf-8") as handle:
            for utt_id, text in read_tree_file(handle):
                try:
                    yield utt_id, parse_bracketed(text)
                except ParseError as exc:
                    parse_failures.append(f"{utt_id}: {exc}")

    result = gold_label_corpus(tree_stream(),
                               include_rc_traces=bool(cfg["rc_traces"]),
                               rc_trace_pattern=cfg["rc_pattern"])
    with atomic_output(cfg["out"]) as out:
        for utt_id, labels in result.labels.items():
            names = sorted(label.value for label in labels)
            out.write(json.dumps({"utterance_id": utt_id, "labels": names}) + "\n")
    diagnostics = parse_failures + result.diagnostics
    diag_path = cfg["diagnostics"] or str(cfg["out"]) + ".diagnostics.txt"
    with atomic_output(diag_path) as out:
        for line in diagnostics:
            out.write(line + "\n")
    labeled = sum(1 for labels in result.labels.values() if labels)
    return {"trees": len(result.labels), "labeled": labeled,
            "diagnostics": len(diagnostics)}


# ---------------------------------------------------------------------------
# evaluate


def cmd_evaluate(cfg) -> dict:
    predictions = _load_labels_map(cfg["pred"])
    gold = _load_labels_map(cfg["gold"])
    overrides: list[tuple[str, Label]] = []
    if cfg["overrides"]:
        with open(cfg["overrides"], encoding="utf-8") as handle:
            for line in handle:
                if not line.strip():
                    continue
                obj = json.loads(line)
                if obj.get("forced_tp"):
                    overrides.append((str(obj["utterance_id"]),
                                      parse_label(obj["label"])))
    excluded = DEFAULT_EXCLUDED
    if cfg["excluded"] is not None:
        names = [n for n in str(cfg["excluded"]).split(",") if n and n != "none"]
        excluded = frozenset(parse_label(n) for n in names)
    report = score(predictions, gold, excluded=excluded, overrides=overrides)
    write_csv(cfg["out"], report.csv_rows(),
              comment=f"merge_policy={report.merge_policy} "
                      f"excluded={','.join(sorted(l.value for l in excluded)) or 'none'}")
    return {"ids": len(set(predictions) | set(gold)),
            "labels_scored": len(report.per_label)}


# ---------------------------------------------------------------------------
# stats


def _labeled_stream(corpus_path, detections_path, report: CorpusReport):
    labels_map = _load_labels_map(detections_path)
    for utt in read_corpus(corpus_path, strict=False, report=report):
        labels = frozenset(labels_map.get(utt.meta.utterance_id, set()))
        yield utt.meta, LabeledUtterance(
            child_age_months=utt.meta.child_age_months,
            speaker_group=utt.meta.speaker_group,
            labels=labels)


def cmd_stats(cfg) -> dict:
    spec = BinSpec(width_months=int(cfg["bin_width"]),
                   min_age=float(cfg["min_age"]), max_age=float(cfg["max_age"]))
    z = float(cfg["z"])
    epsilon = float(cfg["epsilon"])
    min_count = int(cfg["min_count"])
    resamples = int(cfg["resamples"])
    seed = int(cfg["seed"])
    include_other = bool(cfg["include_other_child"])
    out_dir = Path(cfg["out_dir"])
    comment = (f"bin_width={spec.width_months} min_age={_fmt(spec.min_age)} "
               f"max_age={_fmt(spec.max_age)} z={_fmt(z)} epsilon={_fmt(epsilon)} "
               f"min_count={min_count} resamples={resamples} seed={seed} "
               f"log=natural include_other_child={include_other}")

    report = CorpusReport()
    longitudinal_rows = []
    corpus_filter = cfg["longitudinal_corpus"]

    def utterances():
        for meta, labeled in _labeled_stream(cfg["in"], cfg["detections"], report):
            if corpus_filter and meta.corpus_id == corpus_filter:
                longitudinal_rows.append(labeled)
            yield labeled

    table = bin_utterances(utterances(), spec, include_other_child=include_other)

    rate_rows = [["label", "bin_index", "bin_start", "group", "count", "n",
                  "rate_per_1000", "wilson_low", "wilson_high"]]
    for r in rate_table(table, z=z):
        rate_rows.append([r.label.value, r.bin_index, _fmt(r.bin_start), r.group,
                          r.count, r.n, _fmt(r.rate_per_1000),
                          _fmt(r.wilson_low), _fmt(r.wilson_high)])
    write_csv(out_dir / "rates.csv", rate_rows, comment)

    ratio_rows = [["construction", "bin_index", "bin_start", "group",
                   "subj_rate", "obj_rate", "epsilon", "value"]]
    for construction in CONSTRUCTIONS:
        for p in log_ratio_series(table, construction, epsilon):
            ratio_rows.append([p.construction, p.bin_index, _fmt(p.bin_start),
                               p.group, _fmt(p.subj_rate), _fmt(p.obj_rate),
                               _fmt(p.epsilon), _fmt(p.value)])
    write_csv(out_dir / "log_ratios.csv", ratio_rows, comment)

    share_rows = [["construction", "bin_index", "bin_start", "group",
                   "count_subj", "count_obj", "p_subj"]]
    for s in subject_share_table(table):
        share_rows.append([s.construction, s.bin_index, _fmt(s.bin_start), s.group,
                           s.count_subj, s.count_obj, _fmt(s.p_subj)])
    write_csv(out_dir / "subject_share.csv", share_rows, comment)

    delta_rows = [["construction_1", "construction_2", "group", "n_bins",
                   "mean", "ci_low", "ci_high"]]
    pairs = [(CONSTRUCTIONS[0], CONSTRUCTIONS[1]),
             (CONSTRUCTIONS[0], CONSTRUCTIONS[2]),
             (CONSTRUCTIONS[1], CONSTRUCTIONS[2])]
    for pair in pairs:
        for group in GROUPS:
            d = delta_subj(table, pair, group, min_count=min_count,
                           n_resamples=resamples, seed=seed)
            delta_rows.append([d.pair[0], d.pair[1], d.group, d.n_bins,
                               _fmt(d.mean), _fmt(d.ci_low), _fmt(d.ci_high)])
    write_csv(out_dir / "delta_subj.csv", delta_rows, comment)

    counts = {"utterances": report.accepted, "skipped": report.skipped,
              "cells": len(table.cells),
              "dropped_no_age": table.dropped_no_age,
              "dropped_out_of_range": table.dropped_out_of_range,
              "dropped_other_group": table.dropped_other_group}

    if corpus_filter:
        longi = child_longitudinal_summary(longitudinal_rows,
                                           include_other_child=include_other)
        month_rows = [["month", "n_adult", "n_child", "fgd_adult", "fgd_child",
                       "rate_adult_per_1000", "rate_child_per_1000",
                       "adult_child_ratio"]]
        for row in longi.months:
            month_rows.append([row.month, row.n_adult, row.n_child,
                               row.fgd_adult, row.fgd_child,
                               _fmt(row.rate_adult), _fmt(row.rate_child),
                               _fmt(row.adult_child_ratio)])
        write_csv(out_dir / "longitudinal.csv", month_rows,
                  comment + f" corpus={corpus_filter}")
        totals_rows = [["label", "group", "count"]]
        for (label, group), count in sorted(longi.label_totals.items(),
                                            key=lambda kv: (kv[0][0].value, kv[0][1])):
            totals_rows.append([label.value, group, count])
        write_csv(out_dir / "label_totals.csv", totals_rows,
                  comment + f" corpus={corpus_filter}")
        counts["longitudinal_months"] = len(longi.months)
    return counts


# ---------------------------------------------------------------------------
# filter


def cmd_filter(cfg) -> dict:
    labels_map = _load_labels_map(cfg["detections"])
    target = resolve_target([n for n in str(cfg["target"]).split(",") if n])
    seed = int(cfg["seed"])
    tolerance = float(cfg["tolerance"])
    out_dir = Path(cfg["out_dir"])

    sentences: list[SentenceInfo] = []
    report = CorpusReport()
    for utt in read_corpus(cfg["in"], strict=bool(cfg["strict"]), report=report):
        sentences.append(SentenceInfo(
            utterance_id=utt.meta.utterance_id, n_tokens=len(utt.tokens),
            labels=frozenset(labels_map.get(utt.meta.utterance_id, set()))))
    targeted = plan_targeted_filter(sentences, target)
    control = plan_control_filter(sentences, targeted, seed=seed,
                                  tolerance=tolerance,
                                  exclude_target=bool(cfg["exclude_target_from_control"]))
    for plan, name in ((targeted, "plan_targeted.json"), (control, "plan_control.json")):
        with atomic_output(out_dir / name) as handle:
            json.dump(plan.to_json(), handle, indent=2)
            handle.write("\n")

    for plan, tag in ((targeted, "targeted"), (control, "control")):
        _apply_plan_files(cfg["in"], plan, labels_map, out_dir, tag)
    return {"sentences": len(sentences),
            "skipped": report.skipped,
            "targeted_removed_sentences": targeted.removed_sentences,
            "targeted_removed_tokens": targeted.removed_tokens,
            "control_removed_sentences": control.removed_sentences,
            "control_removed_tokens": control.removed_tokens}


def _apply_plan_files(corpus_path, plan: FilterPlan, labels_map, out_dir: Path,
                      tag: str) -> None:
    def lines():
        with open(corpus_path, encoding="utf-8") as handle:
            for line in handle:
                if line.strip():
                    try:
                        yield json.loads(line)
                    except json.JSONDecodeError:
                        continue

    with atomic_output(out_dir / f"kept_{tag}.jsonl") as kept, \
            atomic_output(out_dir / f"removed_{tag}.jsonl") as removed, \
            atomic_output(out_dir / f"train_{tag}.txt") as train:
        for obj, was_removed in apply_filter(lines(), plan,
                                             id_of=lambda o: str(o.get("utterance_id"))):
            if was_removed:
                sidecar = dict(obj)
                sidecar["labels"] = sorted(
                    l.value for l in labels_map.get(str(obj.get("utterance_id")), set()))
                removed.write(json.dumps(sidecar) + "\n")
            else:
                kept.write(json.dumps(obj) + "\n")
                words = [t["text"] for t in obj.get("tokens", [])]
                train.write(detokenize(words) + "\n")


# ---------------------------------------------------------------------------
# minimal pairs


def cmd_minpairs_gen(cfg) -> dict:
    templates = load_templates(cfg["templates"] or _packaged("minpair_templates.json"))
    lexicon = load_lexicon(cfg["lexicon"] or _packaged("minpair_lexicon.json"))
    limit = int(cfg["limit"]) if cfg["limit"] is not None else None
    items = expand_templates(templates, lexicon, limit=limit, seed=int(cfg["seed"]))
    with atomic_output(cfg["out"]) as out:
        for item in items:
            out.write(json.dumps({
                "item_id": item.item_id,
                "template_id": item.template_id,
                "construction": item.construction,
                "site": item.site,
                "bindings": dict(item.bindings),
                "pairs": [{"grammatical": {"context": p.grammatical[0],
                                           "continuation": p.grammatical[1]},
                           "ungrammatical": {"context": p.ungrammatical[0],
                                             "continuation": p.ungrammatical[1]}}
                          for p in item.pairs],
            }) + "\n")
    requests = emit_scoring_requests(items)
    with atomic_output(cfg["requests"]) as out:
        for request in requests:
            out.write(json.dumps(request) + "\n")
    return {"templates": len(templates), "items": len(items),
            "requests": len(requests)}


def _load_items(path) -> list[MinimalPairItem]:
    items = []
    with open(path, encoding="utf-8") as handle:
        for line in handle:
            if not line.strip():
                continue
            obj = json.loads(line)
            pairs = tuple(MinimalPair(
                grammatical=(p["grammatical"]["context"],
                             p["grammatical"]["continuation"]),
                ungrammatical=(p["ungrammatical"]["context"],
                               p["ungrammatical"]["continuation"]))
                for p in obj["pairs"])
            items.append(MinimalPairItem(
                item_id=obj["item_id"], template_id=obj["template_id"],
                construction=obj["construction"], site=obj["site"],
                bindings=tuple(sorted(obj["bindings"].items())), pairs=pairs))
    return items


def cmd_minpairs_score(cfg) -> dict:
    items = _load_items(cfg["items"])
    logprobs: dict[str, float] = {}
    with open(cfg["scores"], encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            logprobs[str(obj["request_id"])] = float(obj["logprob"])
    report = score_accuracy(items, logprobs)
    write_csv(cfg["out"], report.csv_rows())
    if report.missing:
        print(f"{len(report.missing)} pairs missing scores", file=sys.stderr)
    return {"items": len(items), "pairs_scored": report.overall_pairs,
            "pairs_missing": len(report.missing),
            "overall_accuracy": report.overall_accuracy}


# ---------------------------------------------------------------------------
# validate


def cmd_validate(cfg) -> dict:
    report = CorpusReport()
    for _ in read_corpus(cfg["in"], strict=bool(cfg["strict"]), report=report):
        pass
    for line_no, message in report.errors:
        print(f"line {line_no}: {message}", file=sys.stderr)
    counts = {"records": report.total, "accepted": report.accepted,
              "invalid": report.skipped}
    if report.skipped:
        raise CliError(f"{report.skipped} invalid records", counts)
    return counts


# ---------------------------------------------------------------------------
# wiring


_DEFAULTS = {
    "detect": {"in": None, "out": None, "lexicon": None, "exclusions": None,
               "workers": 1, "strict": False},
    "gold": {"in": None, "out": None, "diagnostics": None, "rc_traces": False,
             "rc_pattern": "REL"},
    "evaluate": {"pred": None, "gold": None, "out": None, "overrides": None,
                 "excluded": None},
    "stats": {"in": None, "detections": None, "out_dir": None, "bin_width": 6,
              "min_age": 3.0, "max_age": 80.0, "z": DEFAULT_Z,
              "epsilon": DEFAULT_EPSILON, "min_count": DEFAULT_MIN_COUNT,
              "resamples": DEFAULT_RESAMPLES, "seed": None,
              "include_other_child": False, "longitudinal_corpus": None},
    "filter": {"in": None, "detections": None, "target": None, "out_dir": None,
               "seed": None, "tolerance": DEFAULT_TOLERANCE,
               "exclude_target_from_control": False, "strict": False},
    "minpairs-gen": {"templates": None, "lexicon": None, "out": None,
                     "requests": None, "limit": None, "seed": 0},
    "minpairs-score": {"items": None, "scores": None, "out": None},
    "validate": {"in": None, "strict": False},
}

_REQUIRED = {
    "detect": ("in", "out"),
    "gold": ("in", "out"),
    "evaluate": ("pred", "gold", "out"),
    "stats": ("in", "detections", "out_dir", "seed"),
    "filter": ("in", "detections", "target", "out_dir", "seed"),
    "minpairs-gen": ("out", "requests"),
    "minpairs-score": ("items", "scores", "out"),
    "validate": ("in",),
}

_HANDLERS = {
    "detect": cmd_detect,
    "gold": cmd_gold,
    "evaluate": cmd_evaluate,
    "stats": cmd_stats,
    "filter": cmd_filter,
    "minpairs-gen": cmd_minpairs_gen,
    "minpairs-score": cmd_minpairs_score,
    "validate": cmd_validate,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fillergap",
        description="Filler-gap construction detection and corpus analysis")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add(name, help_text, flags):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config file; command-line flags win")
        for flag, kwargs in flags:
            p.add_argument(flag, **kwargs)
        return p

    add("detect", "label a corpus with detected constructions", [
        ("--in", dict(dest="in_", metavar="CORPUS_JSONL")),
        ("--out", dict(metavar="DETECTIONS_JSONL")),
        ("--lexicon", dict(metavar="JSON", help="embedding-verb lemmas")),
        ("--exclusions", dict(metavar="JSON", help="free-relative words")),
        ("--workers", dict(type=int)),
        ("--strict", dict(action="store_const", const=True, default=None)),
    ])
    add("gold", "infer gold labels from trace-annotated trees", [
        ("--in", dict(dest="in_", metavar="TREES_TXT")),
        ("--out", dict(metavar="GOLD_JSONL")),
        ("--diagnostics", dict(metavar="TXT")),
        ("--rc-traces", dict(dest="rc_traces", action="store_const", const=True,
                             default=None)),
        ("--rc-pattern", dict(dest="rc_pattern")),
    ])
    add("evaluate", "precision/recall/F1 against gold labels", [
        ("--pred", dict(metavar="DETECTIONS_JSONL")),
        ("--gold", dict(metavar="GOLD_JSONL")),
        ("--out", dict(metavar="REPORT_CSV")),
        ("--overrides", dict(metavar="JSONL", help="forced-tp records")),
        ("--excluded", dict(metavar="LABELS", help="comma list or 'none'")),
    ])
    add("stats", "developmental distribution statistics", [
        ("--in", dict(dest="in_", metavar="CORPUS_JSONL")),
        ("--detections", dict(metavar="DETECTIONS_JSONL")),
        ("--out-dir", dict(dest="out_dir", metavar="DIR")),
        ("--bin-width", dict(dest="bin_width", type=int)),
        ("--min-age", dict(dest="min_age", type=float)),
        ("--max-age", dict(dest="max_age", type=float)),
        ("--z", dict(type=float)),
        ("--epsilon", dict(type=float)),
        ("--min-count", dict(dest="min_count", type=int)),
        ("--resamples", dict(type=int)),
        ("--seed", dict(type=int)),
        ("--include-other-child", dict(dest="include_other_child",
                                       action="store_const", const=True, default=None)),
        ("--longitudinal-corpus", dict(dest="longitudinal_corpus", metavar="CORPUS_ID")),
    ])
    add("filter", "targeted corpus ablation with a matched control", [
        ("--in", dict(dest="in_", metavar="CORPUS_JSONL")),
        ("--detections", dict(metavar="DETECTIONS_JSONL")),
        ("--target", dict(metavar="FAMILY_OR_LABELS")),
        ("--out-dir", dict(dest="out_dir", metavar="DIR")),
        ("--seed", dict(type=int)),
        ("--tolerance", dict(type=float)),
        ("--exclude-target-from-control", dict(dest="exclude_target_from_control",
                                               action="store_const", const=True,
                                               default=None)),
        ("--strict", dict(action="store_const", const=True, default=None)),
    ])
    add("minpairs-gen", "expand minimal-pair templates", [
        ("--templates", dict(metavar="JSON")),
        ("--lexicon", dict(metavar="JSON")),
        ("--out", dict(metavar="ITEMS_JSONL")),
        ("--requests", dict(metavar="REQUESTS_JSONL")),
        ("--limit", dict(type=int)),
        ("--seed", dict(type=int)),
    ])
    add("minpairs-score", "aggregate external continuation scores", [
        ("--items", dict(metavar="ITEMS_JSONL")),
        ("--scores", dict(metavar="SCORES_JSONL")),
        ("--out", dict(metavar="RESULTS_CSV")),
    ])
    add("validate", "check a corpus file against the schema", [
        ("--in", dict(dest="in_", metavar="CORPUS_JSONL")),
        ("--strict", dict(action="store_const", const=True, default=None)),
    ])
    return parser


def effective_config(args: argparse.Namespace) -> dict:
    name = args.subcommand
    cfg = dict(_DEFAULTS[name])
    if args.config:
        with open(args.config, encoding="utf-8") as handle:
            file_cfg = json.load(handle)
        for key, value in file_cfg.items():
            key = key.replace("-", "_")
            if key in cfg:
                cfg[key] = value
    for key, value in vars(args).items():
        if key in ("subcommand", "config"):
            continue
        key = "in" if key == "in_" else key
        key = key.replace("-", "_")
        lookup = key if key in cfg else key.replace("_", "-")
        if lookup in cfg and value is not None:
            cfg[lookup] = value
    for key in _REQUIRED[name]:
        if cfg[key] is None:
            raise CliError(f"{name}: --{key.replace('_', '-')} is required")
    return cfg


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    name = args.subcommand
    cfg: dict = {}
    try:
        cfg = effective_config(args)
        counts = _HANDLERS[name](cfg)
        status = 0
    except (CliError, CorpusError, FilterError, OSError, ValueError) as exc:
        counts = exc.args[1] if len(exc.args) > 1 and isinstance(exc.args[1], dict) else {}
        print(f"error: {exc.args[0] if exc.args else exc}", file=sys.stderr)
        status = 1
    summary = {"subcommand": name, "version": __version__,
               "config": dict(sorted(cfg.items())),
               "counts": counts, "status": status}
    print(json.dumps(summary, sort_keys=True))
    return status


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
