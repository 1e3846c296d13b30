"""Adapter command line: parse raw utterances or convert a treebank."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .adapter import (AdapterError, ConversionReport, convert_treebank,
                      parse_utterances, read_raw_jsonl)
from .brackets import read_tree_lines
from .rulebackend import RuleBackend


def make_backend(name: str):
    if name == "rule":
        return RuleBackend()
    if name == "spacy":
        from .spacybackend import SpacyBeneparBackend
        return SpacyBeneparBackend()
    raise AdapterError(f"unknown backend {name!r}")


def _write_provenance(out_path: Path, backend, report: ConversionReport) -> None:
    sidecar = out_path.with_name(out_path.name + ".provenance.json")
    payload = {"adapter_version": __version__, **backend.provenance(),
               "utterances_in": report.total, "records_out": report.emitted,
               "skipped": len(report.skipped)}
    sidecar.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")


def cmd_parse(args) -> int:
    backend = make_backend(args.backend)
    report = ConversionReport()
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    with open(args.in_, encoding="utf-8") as src, \
            open(out_path, "w", encoding="utf-8") as out:
        for record in parse_utterances(read_raw_jsonl(src), backend, report):
            out.write(json.dumps(record) + "\n")
    _write_provenance(out_path, backend, report)
    print(json.dumps({"subcommand": "parse", "version": __version__,
                      "backend": backend.name,
                      "counts": {"in": report.total, "out": report.emitted,
                                 "skipped": len(report.skipped)}}))
    return 0


def cmd_convert_treebank(args) -> int:
    backend = make_backend(args.backend)
    report = ConversionReport()
    corpus_path = Path(args.out_corpus)
    gold_path = Path(args.out_gold)
    corpus_path.parent.mkdir(parents=True, exist_ok=True)
    gold_path.parent.mkdir(parents=True, exist_ok=True)
    with open(args.in_, encoding="utf-8") as src, \
            open(corpus_path, "w", encoding="utf-8") as corpus_out, \
            open(gold_path, "w", encoding="utf-8") as gold_out:
        for record, gold_line in convert_treebank(read_tree_lines(src), backend,
                                                  report=report):
            corpus_out.write(json.dumps(record) + "\n")
            gold_out.write(gold_line + "\n")
    _write_provenance(corpus_path, backend, report)
    print(json.dumps({"subcommand": "convert-treebank", "version": __version__,
                      "backend": backend.name,
                      "counts": {"in": report.total, "out": report.emitted,
                                 "skipped": len(report.skipped)}}))
    return 0


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, stream=sys.stderr,
                        format="%(name)s: %(message)s")
    parser = argparse.ArgumentParser(
        prog="fillergap-adapter",
        description="Produce the parsed-utterance JSONL corpus format")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("parse", help="parse raw utterances")
    p.add_argument("--in", dest="in_", required=True, metavar="RAW_JSONL")
    p.add_argument("--out", required=True, metavar="CORPUS_JSONL")
    p.add_argument("--backend", default="rule", choices=("rule", "spacy"))
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("convert-treebank",
                       help="split a trace-annotated treebank into detector "
                            "input and a gold file")
    p.add_argument("--in", dest="in_", required=True, metavar="TREES_TXT")
    p.add_argument("--out-corpus", dest="out_corpus", required=True)
    p.add_argument("--out-gold", dest="out_gold", required=True)
    p.add_argument("--backend", default="rule", choices=("rule", "spacy"))
    p.set_defaults(func=cmd_convert_treebank)

    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (AdapterError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # model-load and other fatal backend failures
        print(f"fatal: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
