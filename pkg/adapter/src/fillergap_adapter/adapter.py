"""Assemble parsed-utterance corpus records from raw text or treebanks.

Consumes a backend's two parse views over one shared tokenization and
emits the JSONL corpus format expected by the detection toolkit. Records
that fail to parse or align are logged and skipped; counts are reported.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from . import brackets
from .lexicon import VERB_FORMS, noun_lemma
from .rulebackend import RuleParseFailure

log = logging.getLogger("fillergap_adapter")

SPEAKER_GROUPS = ("adult", "target_child", "other_child")


class AdapterError(ValueError):
    pass


@dataclass(frozen=True)
class RawUtterance:
    utterance_id: str
    corpus_id: str
    transcript_id: str
    speaker_group: str
    child_age_months: float | None
    text: str

    @classmethod
    def from_record(cls, obj: dict) -> "RawUtterance":
        for name in ("utterance_id", "corpus_id", "transcript_id",
                     "speaker_group", "text"):
            if name not in obj:
                raise AdapterError(f"missing field {name!r}")
        if obj["speaker_group"] not in SPEAKER_GROUPS:
            raise AdapterError(f"unknown speaker_group {obj['speaker_group']!r}")
        age = obj.get("child_age_months")
        return cls(utterance_id=str(obj["utterance_id"]),
                   corpus_id=str(obj["corpus_id"]),
                   transcript_id=str(obj["transcript_id"]),
                   speaker_group=obj["speaker_group"],
                   child_age_months=float(age) if age is not None else None,
                   text=str(obj["text"]))


@dataclass
class ConversionReport:
    total: int = 0
    emitted: int = 0
    skipped: list[tuple[str, str]] = field(default_factory=list)

    def skip(self, utt_id: str, reason: str) -> None:
        self.skipped.append((utt_id, reason))
        log.warning("skipping %s: %s", utt_id, reason)


def _record(meta: RawUtterance, view) -> dict:
    return {
        "utterance_id": meta.utterance_id,
        "corpus_id": meta.corpus_id,
        "transcript_id": meta.transcript_id,
        "speaker_group": meta.speaker_group,
        "child_age_months": meta.child_age_months,
        "tokens": [{"i": i + 1, "text": text, "lemma": lemma, "pos": pos}
                   for i, (text, lemma, pos) in enumerate(view.tokens)],
        "deps": [{"d": d, "h": h, "rel": rel} for d, h, rel in view.deps],
        "tree": view.tree,
    }


def parse_utterances(utterances: Iterable[RawUtterance], backend,
                     report: ConversionReport | None = None) -> Iterator[dict]:
    """Parse each raw utterance with the backend and yield corpus records.

    Both parse views come from one call over one tokenization, so the
    token/leaf alignment holds by construction; utterances the backend
    cannot handle are skipped and logged.
    """
    if report is None:
        report = ConversionReport()
    for raw in utterances:
        report.total += 1
        text = raw.text.strip()
        if not text:
            report.skip(raw.utterance_id, "empty text")
            continue
        try:
            view = backend.parse_text(text)
        except RuleParseFailure as exc:
            report.skip(raw.utterance_id, f"parse failure: {exc}")
            continue
        except Exception as exc:  # backend-specific per-utterance errors
            report.skip(raw.utterance_id, f"backend error: {exc}")
            continue
        report.emitted += 1
        yield _record(raw, view)


@dataclass
class _TreeView:
    tokens: list[tuple[str, str, str]]
    tree: str
    deps: list[tuple[int, int, str]]


def _lemma_for(word: str) -> str:
    lower = word.lower()
    if lower in VERB_FORMS:
        return VERB_FORMS[lower][1]
    noun = noun_lemma(lower)
    return noun if noun is not None else lower


def convert_treebank(trees: Iterable[tuple[str, str]], backend,
                     corpus_meta: str = "treebank",
                     report: ConversionReport | None = None
                     ) -> Iterator[tuple[dict, str]]:
    """Yield (corpus record, gold tree line) pairs sharing utterance ids.

    The detector-input record keeps the gold constituency with empty
    categories pruned and takes POS tags from the gold preterminals; the
    dependency view comes from the backend run on the pronounced tokens.
    The gold line preserves the original annotation (traces included).
    """
    if report is None:
        report = ConversionReport()
    for utt_id, text in trees:
        report.total += 1
        try:
            tree = brackets.parse(text)
        except brackets.BracketError as exc:
            report.skip(utt_id, f"malformed tree: {exc}")
            continue
        stripped = brackets.strip_empty_categories(tree)
        if stripped is None:
            report.skip(utt_id, "tree has no pronounced leaves")
            continue
        leaves = list(stripped.leaves())
        words = [leaf.word for leaf in leaves]
        try:
            parsed = backend.parse_pretokenized(words)
            deps = parsed.deps
        except Exception as exc:
            report.skip(utt_id, f"dependency parse failure: {exc}")
            continue
        tokens = [(leaf.word, _lemma_for(leaf.word), leaf.label)
                  for leaf in leaves]
        view = _TreeView(tokens=tokens, tree=brackets.serialize(stripped),
                         deps=deps)
        meta = RawUtterance(utterance_id=utt_id, corpus_id=corpus_meta,
                            transcript_id=corpus_meta, speaker_group="adult",
                            child_age_months=None, text=" ".join(words))
        report.emitted += 1
        yield _record(meta, view), f"{utt_id}\t{text}"


def read_raw_jsonl(handle) -> Iterator[RawUtterance]:
    for line_no, line in enumerate(handle, start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            yield RawUtterance.from_record(obj)
        except (json.JSONDecodeError, AdapterError) as exc:
            raise AdapterError(f"line {line_no}: {exc}") from exc
