"""Construction-targeted corpus ablation with length-matched random controls.

A targeted plan removes every sentence carrying a target label; a control
plan removes the same number of sentences, chosen at random but matched to
the targeted plan's token-length histogram, with a repair pass that swaps
sentences until the removed-token totals agree within tolerance.
"""

from __future__ import annotations

import bisect
import json
import random
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence, TypeVar

from .labels import FAMILIES, Label, parse_label

DEFAULT_TOLERANCE = 0.005  # fraction of the targeted plan's token total
TOKEN_UNIT = "tokens_field"  # whitespace-level entries of the tokens list

MODE_TARGETED = "targeted"
MODE_CONTROL = "control"


class FilterError(ValueError):
    pass


class InfeasibleControlError(FilterError):
    pass


def resolve_target(spec: str | Iterable[str]) -> frozenset[Label]:
    """A family name ("matrixQ", "embeddedQ", "RC") or explicit label names."""
    if isinstance(spec, str):
        if spec in FAMILIES:
            return FAMILIES[spec]
        return frozenset({parse_label(spec)})
    labels: set[Label] = set()
    for name in spec:
        labels |= resolve_target(name)
    return frozenset(labels)


@dataclass(frozen=True)
class SentenceInfo:
    """What planning needs to know about one sentence."""

    utterance_id: str
    n_tokens: int
    labels: frozenset[Label] = frozenset()


@dataclass(frozen=True)
class FilterPlan:
    mode: str
    target: tuple[str, ...]
    removed_ids: tuple[str, ...]
    removed_sentences: int
    removed_tokens: int
    seed: int | None = None
    tolerance: float | None = None
    token_unit: str = TOKEN_UNIT

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "target": list(self.target),
            "seed": self.seed,
            "tolerance": self.tolerance,
            "token_unit": self.token_unit,
            "removed_sentences": self.removed_sentences,
            "removed_tokens": self.removed_tokens,
            "removed_ids": list(self.removed_ids),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "FilterPlan":
        return cls(mode=obj["mode"], target=tuple(obj["target"]),
                   removed_ids=tuple(obj["removed_ids"]),
                   removed_sentences=int(obj["removed_sentences"]),
                   removed_tokens=int(obj["removed_tokens"]),
                   seed=obj.get("seed"), tolerance=obj.get("tolerance"),
                   token_unit=obj.get("token_unit", TOKEN_UNIT))


def plan_targeted_filter(sentences: Sequence[SentenceInfo],
                         target: frozenset[Label] | str | Iterable[str]) -> FilterPlan:
    """Remove exactly the sentences whose label set intersects the target."""
    target_labels = target if isinstance(target, frozenset) else resolve_target(target)
    removed = [s for s in sentences if s.labels & target_labels]
    return FilterPlan(
        mode=MODE_TARGETED,
        target=tuple(sorted(l.value for l in target_labels)),
        removed_ids=tuple(s.utterance_id for s in removed),
        removed_sentences=len(removed),
        removed_tokens=sum(s.n_tokens for s in removed),
    )


def plan_control_filter(sentences: Sequence[SentenceInfo],
                        targeted_plan: FilterPlan,
                        seed: int,
                        tolerance: float = DEFAULT_TOLERANCE,
                        exclude_target: bool = False) -> FilterPlan:
    """Random selection matching the targeted plan in sentence count exactly
    and in token count within `tolerance` (a fraction of the targeted token
    total). Deterministic for a fixed seed.

    The candidate pool is the whole corpus by default; `exclude_target`
    restricts it to sentences outside the targeted plan.
    """
    want_n = targeted_plan.removed_sentences
    want_tokens = targeted_plan.removed_tokens
    tol_abs = tolerance * want_tokens
    by_id = {s.utterance_id: s for s in sentences}
    missing = [i for i in targeted_plan.removed_ids if i not in by_id]
    if missing:
        raise FilterError(f"targeted plan ids not in corpus: {missing[:5]}")
    if exclude_target:
        excluded = set(targeted_plan.removed_ids)
        pool = [s for s in sentences if s.utterance_id not in excluded]
    else:
        pool = list(sentences)
    if len(pool) < want_n:
        raise InfeasibleControlError(
            f"need {want_n} control sentences but only {len(pool)} candidates")
    if want_n == 0:
        return FilterPlan(mode=MODE_CONTROL, target=targeted_plan.target,
                          removed_ids=(), removed_sentences=0, removed_tokens=0,
                          seed=seed, tolerance=tolerance)

    rng = random.Random(seed)
    target_hist = Counter(by_id[i].n_tokens for i in targeted_plan.removed_ids)
    buckets: dict[int, list[str]] = {}
    for s in pool:
        buckets.setdefault(s.n_tokens, []).append(s.utterance_id)

    selected_by_len: dict[int, list[str]] = {}
    n_selected = 0
    shortfall: list[int] = []

    def select(uid: str, length: int) -> None:
        nonlocal n_selected
        selected_by_len.setdefault(length, []).append(uid)
        n_selected += 1

    for length in sorted(target_hist):
        ids = buckets.get(length, [])
        take = min(target_hist[length], len(ids))
        for uid in rng.sample(ids, take):
            select(uid, length)
        shortfall.extend([length] * (target_hist[length] - take))

    chosen = {uid for ids in selected_by_len.values() for uid in ids}
    remaining = sorted((s.n_tokens, s.utterance_id) for s in pool
                       if s.utterance_id not in chosen)

    def pop_nearest(length: int) -> tuple[int, str]:
        pos = bisect.bisect_left(remaining, (length, ""))
        best = None
        for i in (pos - 1, pos):
            if 0 <= i < len(remaining):
                if best is None or abs(remaining[i][0] - length) < abs(remaining[best][0] - length):
                    best = i
        return remaining.pop(best)

    for need in shortfall:
        if not remaining:
            raise InfeasibleControlError("candidate pool exhausted during histogram matching")
        length, uid = pop_nearest(need)
        select(uid, length)

    # repair pass: swap selected/unselected sentences of nearby lengths until
    # the token totals agree within tolerance
    total = sum(length * len(ids) for length, ids in selected_by_len.items())
    while abs(want_tokens - total) > tol_abs:
        deficit = want_tokens - total
        best_swap = None  # (new_gap, sel_len, rem_index)
        for sel_len in sorted(selected_by_len):
            if not selected_by_len[sel_len]:
                continue
            wanted = sel_len + deficit
            pos = bisect.bisect_left(remaining, (wanted, ""))
            for i in (pos - 1, pos):
                if not (0 <= i < len(remaining)):
                    continue
                new_gap = abs(want_tokens - (total - sel_len + remaining[i][0]))
                if best_swap is None or new_gap < best_swap[0]:
                    best_swap = (new_gap, sel_len, i)
        if best_swap is None or best_swap[0] >= abs(deficit):
            raise InfeasibleControlError(
                f"cannot match token count within tolerance: "
                f"{abs(deficit)} tokens off, allowed {tol_abs:.1f}")
        _, sel_len, rem_index = best_swap
        new_len, new_id = remaining.pop(rem_index)
        sel_id = selected_by_len[sel_len].pop()
        bisect.insort(remaining, (sel_len, sel_id))
        selected_by_len.setdefault(new_len, []).append(new_id)
        total = total - sel_len + new_len

    order = {s.utterance_id: pos for pos, s in enumerate(sentences)}
    chosen = {uid for ids in selected_by_len.values() for uid in ids}
    removed_ids = tuple(sorted(chosen, key=order.__getitem__))
    return FilterPlan(mode=MODE_CONTROL, target=targeted_plan.target,
                      removed_ids=removed_ids, removed_sentences=len(removed_ids),
                      removed_tokens=total, seed=seed, tolerance=tolerance)


T = TypeVar("T")


def apply_filter(items: Iterable[T], plan: FilterPlan,
                 id_of: Callable[[T], str]) -> Iterator[tuple[T, bool]]:
    """Yield (item, removed?) preserving input order; at end of stream,
    raise FilterError if any plan id never appeared."""
    targets = set(plan.removed_ids)
    seen: set[str] = set()
    for item in items:
        uid = id_of(item)
        if uid in targets:
            seen.add(uid)
            yield item, True
        else:
            yield item, False
    missing = targets - seen
    if missing:
        sample = ", ".join(sorted(missing)[:5])
        raise FilterError(f"{len(missing)} plan ids not found in corpus ({sample}, ...)")


_NO_SPACE_BEFORE = {".", ",", "!", "?", ";", ":", ")", "]", "}", "%", "''", "n't", "..."}
_NO_SPACE_AFTER = {"(", "[", "{", "``", "$"}


def detokenize(tokens: Sequence[str]) -> str:
    """Plain-text sentence for LM training exports; glues punctuation and
    apostrophe contractions to the preceding token."""
    parts: list[str] = []
    for tok in tokens:
        glue = tok in _NO_SPACE_BEFORE or tok.startswith("'")
        if parts and not glue and parts[-1] not in _NO_SPACE_AFTER:
            parts.append(" ")
        parts.append(tok)
    return "".join(parts)


def write_plan(path, plan: FilterPlan) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        json.dump(plan.to_json(), handle, indent=2)
        handle.write("\n")


def read_plan(path) -> FilterPlan:
    with open(path, encoding="utf-8") as handle:
        return FilterPlan.from_json(json.load(handle))
