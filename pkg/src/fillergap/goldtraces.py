"""Gold construction labels inferred from trace-annotated constituency trees.

Treebanks in this style mark a gap with a coindexed empty leaf ("*T*-1"
under an empty-category tag such as "-NONE-ABAR-WH-") and suffix the
filler node's label with the same index ("WHNP-1"). The construction is
read off the sentential node above the filler, the extraction site off
the gap's parent and the filler's sister clause.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator, TextIO

from .detectors import ADJUNCT_WH_PHRASES, subject_position_filled
from .labels import Label
from .trees import ConstituencyTree, node_at, walk

_TRACE_TEXT = re.compile(r"\*T\*-(\d+)$")
_DECORATION = re.compile(r"<[^>]*>")
_COINDEX = re.compile(r"-(\d+)(?=-|$)")

WH_TRACE_PREFIX = "-NONE-ABAR-WH"
DEFAULT_RC_TRACE_PATTERN = "REL"


def label_coindex(raw_label: str) -> int | None:
    """Integer coindex carried by a node label, e.g. "WHNP-1-<INANIM>" -> 1."""
    if raw_label.startswith("-"):
        return None
    cleaned = _DECORATION.sub("", raw_label)
    match = _COINDEX.search(cleaned)
    return int(match.group(1)) if match else None


@dataclass(frozen=True)
class TraceSite:
    trace_index: int
    gap_parent_label: str
    filler_path: tuple[int, ...]
    filler_category: str
    trace_kind: str
    trace_path: tuple[int, ...]


@dataclass(frozen=True)
class UnmatchedTrace:
    trace_index: int
    trace_kind: str
    trace_path: tuple[int, ...]


def extract_traces(tree: ConstituencyTree) -> tuple[list[TraceSite], list[UnmatchedTrace]]:
    """All coindexed (*T*-n, filler) pairs; traces with no filler go to the
    unmatched list instead of raising."""
    fillers: dict[int, tuple[tuple[int, ...], ConstituencyTree]] = {}
    for path, node in walk(tree):
        idx = label_coindex(node.raw_label)
        if idx is not None and idx not in fillers:
            fillers[idx] = (path, node)
    sites: list[TraceSite] = []
    unmatched: list[UnmatchedTrace] = []
    for path, node in walk(tree):
        if not (node.is_leaf and node.raw_label.startswith("-NONE-")):
            continue
        match = _TRACE_TEXT.match(node.text)
        if not match:
            continue
        idx = int(match.group(1))
        parent = node_at(tree, path[:-1]) if path else tree
        if idx in fillers:
            filler_path, filler = fillers[idx]
            sites.append(TraceSite(
                trace_index=idx,
                gap_parent_label=parent.label,
                filler_path=filler_path,
                filler_category=filler.label,
                trace_kind=node.raw_label,
                trace_path=path,
            ))
        else:
            unmatched.append(UnmatchedTrace(idx, node.raw_label, path))
    return sites, unmatched


@dataclass(frozen=True)
class GoldInference:
    site: TraceSite
    label: Label | None
    reason: str


_MATRIX, _EMBEDDED, _RC = "matrix", "embedded", "rc"

_LABEL_TABLE = {
    (_MATRIX, "subject"): Label.SMQ,
    (_MATRIX, "object"): Label.OMQ,
    (_MATRIX, "adjunct"): Label.AMQ,
    (_EMBEDDED, "subject"): Label.SEQ,
    (_EMBEDDED, "object"): Label.OEQ,
    (_EMBEDDED, "adjunct"): Label.AEQ,
    (_RC, "subject"): Label.SRC,
    (_RC, "object"): Label.ORC,
    (_RC, "adjunct"): Label.ARC,
}


def _sentential_above(tree: ConstituencyTree,
                      filler_path: tuple[int, ...]) -> tuple[tuple[int, ...], int] | None:
    """(path of the SBAR/SBARQ ancestor, index of the filler-side child)."""
    for depth in range(len(filler_path) - 1, -1, -1):
        anc = node_at(tree, filler_path[:depth])
        if anc.label in ("SBAR", "SBARQ"):
            return filler_path[:depth], filler_path[depth]
    return None


def infer_gold_label(tree: ConstituencyTree, site: TraceSite) -> GoldInference:
    """Construction from the sentential node above the filler, site from the
    gap parent plus the filler's sister clause. Unclassifiable
    configurations come back with label None and an explicit reason."""
    found = _sentential_above(tree, site.filler_path)
    if found is None:
        return GoldInference(site, None, "filler has no SBAR/SBARQ ancestor")
    sent_path, filler_child_idx = found
    sentential = node_at(tree, sent_path)
    if sentential.label == "SBARQ":
        construction = _MATRIX
    else:
        parent = node_at(tree, sent_path[:-1]) if sent_path else None
        parent_label = parent.label if parent is not None else None
        if parent_label == "VP":
            construction = _EMBEDDED
        elif parent_label == "NP":
            construction = _RC
        else:
            return GoldInference(site, None,
                                 f"SBAR under {parent_label!r}, not VP or NP")

    if site.filler_category in ADJUNCT_WH_PHRASES or \
            site.gap_parent_label in ("ADVP", "PP", "WHADVP", "WHPP"):
        gap_site = "adjunct"
    elif site.gap_parent_label == "NP" and site.filler_category == "WHNP":
        sister = next((c for c in sentential.children[filler_child_idx + 1:]
                       if c.label in ("S", "SQ", "SINV")), None)
        if sister is None:
            return GoldInference(site, None, "no clause follows the filler")
        gap_site = "object" if subject_position_filled(sister) else "subject"
    else:
        return GoldInference(
            site, None,
            f"unclassifiable gap parent {site.gap_parent_label!r} "
            f"with filler {site.filler_category!r}")
    return GoldInference(site, _LABEL_TABLE[(construction, gap_site)], "ok")


@dataclass
class GoldCorpusResult:
    labels: dict[str, set[Label]] = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)


def gold_label_corpus(trees: Iterable[tuple[str, ConstituencyTree]],
                      include_rc_traces: bool = False,
                      rc_trace_pattern: str = DEFAULT_RC_TRACE_PATTERN) -> GoldCorpusResult:
    """Union of inferred labels per utterance id.

    Only wh-movement traces (kind starting with "-NONE-ABAR-WH") emit
    labels by default; relative-clause trace kinds (matching
    `rc_trace_pattern`) are included only when `include_rc_traces` is set.
    Everything else is surfaced in diagnostics, never silently guessed.
    """
    result = GoldCorpusResult()
    for utt_id, tree in trees:
        labels = result.labels.setdefault(utt_id, set())
        sites, unmatched = extract_traces(tree)
        for miss in unmatched:
            result.diagnostics.append(
                f"{utt_id}: trace *T*-{miss.trace_index} ({miss.trace_kind}) "
                f"has no coindexed filler")
        for site in sites:
            is_wh = site.trace_kind.startswith(WH_TRACE_PREFIX)
            is_rc = rc_trace_pattern in site.trace_kind
            if not is_wh and not (include_rc_traces and is_rc):
                if not is_rc:
                    result.diagnostics.append(
                        f"{utt_id}: unknown trace kind {site.trace_kind!r} skipped")
                else:
                    result.diagnostics.append(
                        f"{utt_id}: relative-clause trace {site.trace_kind!r} "
                        f"skipped (rc-trace mode off)")
                continue
            inference = infer_gold_label(tree, site)
            if inference.label is None:
                result.diagnostics.append(
                    f"{utt_id}: trace *T*-{site.trace_index} unclassified: "
                    f"{inference.reason}")
            else:
                labels.add(inference.label)
    return result


def read_tree_file(handle: TextIO) -> Iterator[tuple[str, str]]:
    """Yield (utterance_id, tree text) from a bracketed-tree file.

    Trees may span multiple lines (balance-tracked) or sit one per line;
    an optional "id<TAB>tree" prefix names the tree, otherwise ids are
    t1, t2, ... in file order.
    """
    buffer: list[str] = []
    balance = 0
    tree_id: str | None = None
    count = 0

    def flush():
        nonlocal buffer, balance, tree_id, count
        text = "\n".join(buffer).strip()
        buffer, balance = [], 0
        name, tree_id = tree_id, None
        if not text:
            return None
        count += 1
        return (name if name is not None else f"t{count}", text)

    for line in handle:
        stripped = line.rstrip("\n")
        if not buffer and not stripped.strip():
            continue
        if not buffer and "\t" in stripped.split("(", 1)[0]:
            tree_id, stripped = stripped.split("\t", 1)
            tree_id = tree_id.strip()
        buffer.append(stripped)
        balance += stripped.count("(") - stripped.count(")")
        if balance <= 0:
            item = flush()
            if item:
                yield item
    if buffer:
        item = flush()
        if item:
            yield item
