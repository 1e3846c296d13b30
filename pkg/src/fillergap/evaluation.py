"""Precision/recall/F1 against gold labels, with label merging and the
majority-vote accuracy arithmetic for manual evaluation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .labels import LABEL_ORDER, Label

# Cross-clausal subtypes fold into their main categories for scoring.
DEFAULT_MERGE_POLICY: dict[Label, Label] = {
    Label.CC_SMQ: Label.SMQ,
    Label.CC_OMQ: Label.OMQ,
    Label.CC_AMQ: Label.AMQ,
}
DEFAULT_MERGE_POLICY_NAME = "cc_to_main"

# Categories without usable trace annotations are scored on neither side.
DEFAULT_EXCLUDED: frozenset[Label] = frozenset({
    Label.PMQ, Label.PlainMQ, Label.PRC, Label.SRC_reduced, Label.ORC_reduced,
})


def merge_labels(labels: Iterable[Label],
                 policy: Mapping[Label, Label] | None = None) -> set[Label]:
    """Image of the label set under the merge map, deduplicated."""
    if policy is None:
        policy = DEFAULT_MERGE_POLICY
    return {policy.get(label, label) for label in labels}


@dataclass(frozen=True)
class LabelScore:
    tp: int
    fp: int
    fn: int

    @property
    def n_predicted(self) -> int:
        return self.tp + self.fp

    @property
    def n_gold(self) -> int:
        return self.tp + self.fn

    @property
    def precision(self) -> float | None:
        return self.tp / self.n_predicted if self.n_predicted else None

    @property
    def recall(self) -> float | None:
        return self.tp / self.n_gold if self.n_gold else None

    @property
    def f1(self) -> float | None:
        p, r = self.precision, self.recall
        if p is None or r is None or p + r == 0:
            return None
        return 2 * p * r / (p + r)


@dataclass
class EvalReport:
    per_label: dict[Label, LabelScore]
    merge_policy: str = DEFAULT_MERGE_POLICY_NAME

    def csv_rows(self) -> list[list[str]]:
        def fmt(x):
            return "n/a" if x is None else f"{x:.6f}"

        rows = [["label", "precision", "recall", "f1", "tp", "fp", "fn",
                 "n_predicted", "n_gold"]]
        for label in sorted(self.per_label, key=lambda l: LABEL_ORDER[l]):
            s = self.per_label[label]
            rows.append([label.value, fmt(s.precision), fmt(s.recall), fmt(s.f1),
                         str(s.tp), str(s.fp), str(s.fn),
                         str(s.n_predicted), str(s.n_gold)])
        return rows


def score(predictions: Mapping[str, set[Label]],
          gold: Mapping[str, set[Label]],
          policy: Mapping[Label, Label] | None = None,
          excluded: frozenset[Label] = DEFAULT_EXCLUDED,
          overrides: Iterable[tuple[str, Label]] = ()) -> EvalReport:
    """Per-label tp/fp/fn at (utterance, label) granularity.

    Ids missing from either map count as empty sets. Excluded labels are
    removed from both sides before counting. `overrides` lists (id, label)
    pairs confirmed by hand as correct despite not being predicted (e.g.
    constructions omitted by design); they are treated as predicted.
    """
    forced: dict[str, set[Label]] = {}
    for utt_id, label in overrides:
        forced.setdefault(utt_id, set()).add(label)
    counts: dict[Label, list[int]] = {}

    def tally(label: Label, slot: int) -> None:
        counts.setdefault(label, [0, 0, 0])[slot] += 1

    for utt_id in set(predictions) | set(gold) | set(forced):
        pred = merge_labels(predictions.get(utt_id, set()), policy) - excluded
        pred |= merge_labels(forced.get(utt_id, set()), policy) - excluded
        want = merge_labels(gold.get(utt_id, set()), policy) - excluded
        for label in pred & want:
            tally(label, 0)
        for label in pred - want:
            tally(label, 1)
        for label in want - pred:
            tally(label, 2)
    per_label = {label: LabelScore(tp, fp, fn)
                 for label, (tp, fp, fn) in counts.items()}
    policy_name = DEFAULT_MERGE_POLICY_NAME if policy is None else "custom"
    return EvalReport(per_label=per_label, merge_policy=policy_name)


def majority_accuracy(judgments: Sequence[Sequence[bool]]) -> float:
    """Fraction of sentences whose positive votes exceed half the votes."""
    if not judgments:
        raise ValueError("no sentences to score")
    correct = 0
    for votes in judgments:
        if not votes:
            raise ValueError("a sentence has no votes")
        if sum(bool(v) for v in votes) * 2 > len(votes):
            correct += 1
    return correct / len(judgments)
