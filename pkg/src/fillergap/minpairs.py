"""Template-based minimal-pair paradigms and accuracy scoring.

Each template is a four-sentence paradigm: a gap pair and a filled pair.
Within a pair the two sentences share a byte-identical continuation and
differ only in the filler or the gap-filling word, so comparing the
continuation probability under each context tests gap licensing. Scoring
itself is external; this module emits (context, continuation) requests and
aggregates returned log-probabilities.
"""

from __future__ import annotations

import json
import math
import random
import re
from dataclasses import dataclass
from typing import Iterable, Mapping

SKELETON_KEYS = ("gap_grammatical", "gap_ungrammatical",
                 "filled_grammatical", "filled_ungrammatical")
_PAIRS = (("gap_grammatical", "gap_ungrammatical"),
          ("filled_grammatical", "filled_ungrammatical"))
_SLOT = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)\}")

SITES = ("subject", "object")


class TemplateError(ValueError):
    pass


class ScoreJoinError(ValueError):
    pass


@dataclass(frozen=True)
class PairTemplate:
    """Four skeletons split into context|continuation, plus slot classes.

    Slots are written "{name}"; "{Name}" capitalizes the bound word. Slot
    names are declared lowercase and map to a lexical class.
    """

    template_id: str
    construction: str
    site: str
    skeletons: dict[str, str]
    slots: dict[str, str]

    def __post_init__(self):
        if "#" in self.template_id:
            raise TemplateError(f"template id {self.template_id!r} may not contain '#'")
        if self.site not in SITES:
            raise TemplateError(f"unknown extraction site {self.site!r}")
        if self.construction == "RC" and self.site == "subject":
            raise TemplateError(
                "subject relative clauses are not generated: the bare "
                "complementizer foil has a grammatical demonstrative reading")
        missing = [k for k in SKELETON_KEYS if k not in self.skeletons]
        if missing:
            raise TemplateError(f"{self.template_id}: missing skeletons {missing}")
        for key in SKELETON_KEYS:
            if self.skeletons[key].count("|") != 1:
                raise TemplateError(
                    f"{self.template_id}/{key}: need exactly one '|' split")
        for name in self.slots:
            if name != name.lower():
                raise TemplateError(f"slot name {name!r} must be lowercase")
        for key in SKELETON_KEYS:
            for ref in _SLOT.findall(self.skeletons[key]):
                base = ref[0].lower() + ref[1:]
                if base not in self.slots:
                    raise TemplateError(
                        f"{self.template_id}/{key}: unknown slot {ref!r}")


@dataclass(frozen=True)
class MinimalPair:
    grammatical: tuple[str, str]    # (context, continuation)
    ungrammatical: tuple[str, str]


@dataclass(frozen=True)
class MinimalPairItem:
    item_id: str
    template_id: str
    construction: str
    site: str
    bindings: tuple[tuple[str, str], ...]
    pairs: tuple[MinimalPair, MinimalPair]


def _substitute(skeleton: str, bindings: Mapping[str, str]) -> str:
    def repl(match: re.Match) -> str:
        ref = match.group(1)
        base = ref[0].lower() + ref[1:]
        word = bindings[base]
        if ref[0].isupper():
            return word[:1].upper() + word[1:]
        return word

    return _SLOT.sub(repl, skeleton)


def _realize(template: PairTemplate,
             bindings: Mapping[str, str]) -> tuple[MinimalPair, MinimalPair]:
    sides = {}
    for key in SKELETON_KEYS:
        text = _substitute(template.skeletons[key], bindings)
        context, continuation = (part.strip() for part in text.split("|"))
        sides[key] = (context, continuation)
    pairs = []
    for gram_key, ungram_key in _PAIRS:
        gram, ungram = sides[gram_key], sides[ungram_key]
        if gram[1] != ungram[1]:
            raise TemplateError(
                f"{template.template_id}: pair ({gram_key}, {ungram_key}) "
                f"continuations differ: {gram[1]!r} vs {ungram[1]!r}")
        if gram[0] == ungram[0]:
            raise TemplateError(
                f"{template.template_id}: pair ({gram_key}, {ungram_key}) "
                f"contexts are identical")
        pairs.append(MinimalPair(grammatical=gram, ungrammatical=ungram))
    return pairs[0], pairs[1]


def expand_templates(templates: Iterable[PairTemplate],
                     lexicon: Mapping[str, list[str]],
                     limit: int | None = None,
                     seed: int = 0) -> list[MinimalPairItem]:
    """Cartesian expansion of each template over its slot classes.

    With `limit`, a seeded sample of Cartesian indices is taken per
    template, so item ids are stable across limit settings. Unknown slot
    classes raise naming the slot.
    """
    items: list[MinimalPairItem] = []
    rng = random.Random(seed)
    for template in templates:
        slot_names = list(template.slots)
        for name in slot_names:
            klass = template.slots[name]
            if klass not in lexicon or not lexicon[klass]:
                raise TemplateError(
                    f"{template.template_id}: slot {name!r} needs lexical "
                    f"class {klass!r}, absent from the lexicon")
        value_lists = [list(lexicon[template.slots[name]]) for name in slot_names]
        total = math.prod(len(v) for v in value_lists)
        if limit is not None and total > limit:
            picks = sorted(rng.sample(range(total), limit))
        else:
            picks = range(total)
        for serial in picks:
            rest = serial
            values = []
            for vals in reversed(value_lists):
                rest, pos = divmod(rest, len(vals))
                values.append(vals[pos])
            values.reverse()
            bindings = dict(zip(slot_names, values))
            pairs = _realize(template, bindings)
            items.append(MinimalPairItem(
                item_id=f"{template.template_id}:{serial:06d}",
                template_id=template.template_id,
                construction=template.construction,
                site=template.site,
                bindings=tuple(sorted(bindings.items())),
                pairs=pairs,
            ))
    return items


def load_templates(path) -> list[PairTemplate]:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    entries = data["templates"] if isinstance(data, dict) else data
    return [PairTemplate(template_id=e["template_id"],
                         construction=e["construction"], site=e["site"],
                         skeletons=dict(e["skeletons"]), slots=dict(e["slots"]))
            for e in entries]


def load_lexicon(path) -> dict[str, list[str]]:
    with open(path, encoding="utf-8") as handle:
        data = json.load(handle)
    return {str(k): [str(w) for w in v] for k, v in data.items()}


# ---------------------------------------------------------------------------
# scoring


def request_id(item_id: str, pair_index: int, side: str) -> str:
    return f"{item_id}#{pair_index}#{side}"


def parse_request_id(rid: str) -> tuple[str, int, str]:
    item_id, pair_index, side = rid.rsplit("#", 2)
    if side not in ("gram", "ungram"):
        raise ScoreJoinError(f"malformed request id {rid!r}")
    return item_id, int(pair_index), side


def emit_scoring_requests(items: Iterable[MinimalPairItem]) -> list[dict]:
    """One request per (item, pair, side); request ids are bijective."""
    requests = []
    for item in items:
        for pair_index, pair in enumerate(item.pairs):
            for side, (context, continuation) in (("gram", pair.grammatical),
                                                  ("ungram", pair.ungrammatical)):
                requests.append({
                    "request_id": request_id(item.item_id, pair_index, side),
                    "context": context,
                    "continuation": continuation,
                })
    return requests


@dataclass(frozen=True)
class ScoreRecord:
    item_id: str
    pair_index: int
    logprob_grammatical: float
    logprob_ungrammatical: float


@dataclass
class AccuracyReport:
    rows: list[tuple[str, str, int, float]]  # construction, site, n_pairs, accuracy
    overall_pairs: int
    overall_accuracy: float | None
    missing: list[tuple[str, int]]

    def csv_rows(self) -> list[list[str]]:
        out = [["construction", "site", "n_pairs", "accuracy"]]
        for construction, site, n_pairs, accuracy in self.rows:
            out.append([construction, site, str(n_pairs), f"{accuracy:.6f}"])
        if self.overall_accuracy is not None:
            out.append(["overall", "", str(self.overall_pairs),
                        f"{self.overall_accuracy:.6f}"])
        return out


def join_scores(items: Iterable[MinimalPairItem],
                logprobs: Mapping[str, float]) -> tuple[list[ScoreRecord],
                                                        list[tuple[str, int]]]:
    """Pair up per-side log-probabilities; unknown or non-finite entries
    raise, pairs missing a side are returned separately."""
    known = {}
    for item in items:
        for pair_index in range(len(item.pairs)):
            for side in ("gram", "ungram"):
                known[request_id(item.item_id, pair_index, side)] = (item, pair_index, side)
    unknown = sorted(set(logprobs) - set(known))
    if unknown:
        raise ScoreJoinError(f"unmatched request ids: {unknown[:10]}")
    bad = sorted(rid for rid, lp in logprobs.items() if not math.isfinite(lp))
    if bad:
        raise ScoreJoinError(f"non-finite logprob for: {bad[:10]}")
    records: list[ScoreRecord] = []
    missing: list[tuple[str, int]] = []
    for item, pair_index in sorted({(known[rid][0], known[rid][1]) for rid in known},
                                   key=lambda x: (x[0].item_id, x[1])):
        gram = logprobs.get(request_id(item.item_id, pair_index, "gram"))
        ungram = logprobs.get(request_id(item.item_id, pair_index, "ungram"))
        if gram is None or ungram is None:
            missing.append((item.item_id, pair_index))
            continue
        records.append(ScoreRecord(item.item_id, pair_index, gram, ungram))
    return records, missing


def score_accuracy(items: Iterable[MinimalPairItem],
                   logprobs: Mapping[str, float]) -> AccuracyReport:
    """A pair is correct iff the grammatical side's continuation is strictly
    more probable; ties count as incorrect."""
    items = list(items)
    by_id = {item.item_id: item for item in items}
    records, missing = join_scores(items, logprobs)
    cells: dict[tuple[str, str], list[int]] = {}
    total, correct = 0, 0
    for record in records:
        item = by_id[record.item_id]
        cell = cells.setdefault((item.construction, item.site), [0, 0])
        ok = record.logprob_grammatical > record.logprob_ungrammatical
        cell[0] += 1
        cell[1] += int(ok)
        total += 1
        correct += int(ok)
    rows = [(construction, site, n, hits / n)
            for (construction, site), (n, hits) in sorted(cells.items())]
    return AccuracyReport(rows=rows, overall_pairs=total,
                          overall_accuracy=(correct / total if total else None),
                          missing=missing)
