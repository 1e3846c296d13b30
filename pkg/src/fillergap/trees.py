"""Data model and I/O for parsed utterances.

Bracketed constituency trees, dependency graphs, and the JSONL corpus
record format shared by every other module. All types are immutable
after construction; operations here are pure.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Iterator

SPEAKER_GROUPS = ("adult", "target_child", "other_child")


class ParseError(ValueError):
    """Malformed bracketed tree. `offset` is a character position in the input."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class CorpusError(ValueError):
    """Malformed corpus record. `line_no` is 1-based."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def strip_label(raw_label: str) -> str:
    """Strip coindex/annotation suffixes: "WHNP-1-<INANIM>" -> "WHNP".

    Labels beginning with '-' (empty-category tags such as
    "-NONE-ABAR-WH-") are never stripped.
    """
    if raw_label.startswith("-"):
        return raw_label
    for i, ch in enumerate(raw_label):
        if i > 0 and ch in "-=":
            return raw_label[:i]
    return raw_label


@dataclass(frozen=True)
class ConstituencyTree:
    """A constituency tree node.

    Leaves carry the surface `text` and a 1-based `token_index`; internal
    nodes carry `children`. `raw_label` preserves coindex suffixes and
    functional decorations; `label` is the stripped tag.
    """

    raw_label: str
    children: tuple["ConstituencyTree", ...] = ()
    text: str | None = None
    token_index: int | None = None

    @property
    def label(self) -> str:
        return strip_label(self.raw_label)

    @property
    def is_leaf(self) -> bool:
        return self.token_index is not None

    def leaves(self) -> Iterator["ConstituencyTree"]:
        if self.is_leaf:
            yield self
        else:
            for child in self.children:
                yield from child.leaves()

    def span(self) -> tuple[int, int] | None:
        """Inclusive (first, last) token index covered, None for empty yield."""
        indices = [leaf.token_index for leaf in self.leaves()]
        if not indices:
            return None
        return min(indices), max(indices)


def walk(tree: ConstituencyTree) -> Iterator[tuple[tuple[int, ...], ConstituencyTree]]:
    """Preorder traversal yielding (path-from-root, node)."""

    def _walk(path: tuple[int, ...], node: ConstituencyTree):
        yield path, node
        for i, child in enumerate(node.children):
            yield from _walk(path + (i,), child)

    yield from _walk((), tree)


def node_at(tree: ConstituencyTree, path: Iterable[int]) -> ConstituencyTree:
    node = tree
    for i in path:
        node = node.children[i]
    return node


_TREE_TOKEN = re.compile(r"[()]|[^\s()]+")


def parse_bracketed(text: str) -> ConstituencyTree:
    """Parse a Penn-style bracketed tree with exactly one top node.

    Raw labels (coindices, decorations) are preserved; leaf token indices
    are assigned 1..n in reading order. Raises ParseError with the
    character offset of the offending bracket or token.
    """
    # frame: [open_offset, label (None until seen), children, words]
    stack: list[list] = []
    root: ConstituencyTree | None = None
    next_index = 1

    def close(frame: list, close_offset: int) -> ConstituencyTree:
        nonlocal next_index
        offset, label, children, words = frame
        if label is None and not children and not words:
            raise ParseError("empty node", offset)
        if words and children:
            raise ParseError("node mixes tokens and children", offset)
        if words:
            if len(words) > 1:
                raise ParseError("leaf with multiple tokens", offset)
            node = ConstituencyTree(label, (), words[0], next_index)
            next_index += 1
            return node
        if not children:
            raise ParseError("leaf with no token", offset)
        return ConstituencyTree(label if label is not None else "", tuple(children))

    for match in _TREE_TOKEN.finditer(text):
        offset, tok = match.start(), match.group()
        if tok == "(":
            if not stack and root is not None:
                raise ParseError("multiple top-level nodes", offset)
            stack.append([offset, None, [], []])
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'", offset)
            node = close(stack.pop(), offset)
            if stack:
                stack[-1][2].append(node)
            else:
                root = node
        else:
            if not stack:
                raise ParseError("token outside brackets", offset)
            frame = stack[-1]
            if frame[1] is None and not frame[2] and not frame[3]:
                frame[1] = tok
            else:
                frame[3].append(tok)
    if stack:
        raise ParseError("unterminated bracket", stack[-1][0])
    if root is None:
        raise ParseError("no tree found", 0)
    return root


def serialize_bracketed(tree: ConstituencyTree) -> str:
    """Single-space bracketed form; round-trips through parse_bracketed."""
    if tree.is_leaf:
        return f"({tree.raw_label} {tree.text})"
    inner = " ".join(serialize_bracketed(child) for child in tree.children)
    return f"({tree.raw_label} {inner})"


@dataclass(frozen=True)
class Token:
    index: int
    text: str
    lemma: str
    pos: str


@dataclass(frozen=True)
class DependencyEdge:
    dependent: int
    head: int  # 0 for root
    relation: str


@dataclass
class DependencyGraph:
    """Dependency edges over tokens 1..n. Treat as immutable once built."""

    edges: tuple[DependencyEdge, ...]

    def __post_init__(self):
        self.edges = tuple(self.edges)
        self._head_of = {e.dependent: e for e in self.edges}
        self._children: dict[int, list[DependencyEdge]] = {}
        for e in self.edges:
            self._children.setdefault(e.head, []).append(e)

    @property
    def n(self) -> int:
        return len(self.edges)

    def edge_of(self, dependent: int) -> DependencyEdge | None:
        return self._head_of.get(dependent)

    def head_of(self, dependent: int) -> int | None:
        edge = self._head_of.get(dependent)
        return edge.head if edge else None

    def relation_of(self, dependent: int) -> str | None:
        edge = self._head_of.get(dependent)
        return edge.relation if edge else None

    @property
    def root(self) -> int:
        for e in self.edges:
            if e.head == 0:
                return e.dependent
        raise ValueError("dependency graph has no root edge")

    def validate(self) -> None:
        n = self.n
        seen = sorted(e.dependent for e in self.edges)
        if seen != list(range(1, n + 1)):
            raise ValueError("dependents do not cover 1..n exactly once")
        roots = [e.dependent for e in self.edges if e.head == 0]
        if len(roots) != 1:
            raise ValueError(f"expected exactly one root edge, found {len(roots)}")
        for e in self.edges:
            if not (0 <= e.head <= n):
                raise ValueError(f"head {e.head} out of range 0..{n}")
        # tree check: every token reachable from the root
        reached = {roots[0]}
        frontier = [roots[0]]
        while frontier:
            head = frontier.pop()
            for e in self._children.get(head, ()):
                if e.dependent not in reached:
                    reached.add(e.dependent)
                    frontier.append(e.dependent)
        if len(reached) != n:
            raise ValueError("dependency edges do not form a tree rooted at the root")


def dep_children(graph: DependencyGraph, head: int, relation: str | None = None) -> list[int]:
    """Dependents of `head`, optionally filtered by relation, ascending."""
    if not (1 <= head <= graph.n):
        raise ValueError(f"head index {head} out of range 1..{graph.n}")
    deps = [e.dependent for e in graph._children.get(head, ())
            if relation is None or e.relation == relation]
    return sorted(deps)


@dataclass(frozen=True)
class UtteranceMeta:
    utterance_id: str
    corpus_id: str
    transcript_id: str
    speaker_group: str
    child_age_months: float | None = None


@dataclass
class ParsedUtterance:
    """One utterance with both parse views. Treat as immutable once built."""

    meta: UtteranceMeta
    tokens: tuple[Token, ...]
    constituency: ConstituencyTree
    dependency: DependencyGraph

    def __post_init__(self):
        self.tokens = tuple(self.tokens)

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    def text(self) -> str:
        return " ".join(t.text for t in self.tokens)

    def validate(self) -> None:
        n = len(self.tokens)
        if [t.index for t in self.tokens] != list(range(1, n + 1)):
            raise ValueError("token indices are not contiguous 1..n")
        for t in self.tokens:
            if not t.text:
                raise ValueError(f"token {t.index} has empty text")
        if self.meta.speaker_group not in SPEAKER_GROUPS:
            raise ValueError(f"unknown speaker_group {self.meta.speaker_group!r}")
        age = self.meta.child_age_months
        if age is not None and (not math.isfinite(age) or age < 0):
            raise ValueError(f"child_age_months {age!r} is not a finite non-negative number")
        leaves = list(self.constituency.leaves())
        if len(leaves) != n:
            raise ValueError(f"tree has {len(leaves)} leaves but {n} tokens")
        if [l.token_index for l in leaves] != list(range(1, n + 1)):
            raise ValueError("leaf token indices are not 1..n in order")
        mismatch = [l.token_index for l, t in zip(leaves, self.tokens) if l.text != t.text]
        if mismatch:
            raise ValueError(f"leaf text differs from token text at index {mismatch[0]}")
        if self.dependency.n != n:
            raise ValueError(f"dependency graph covers {self.dependency.n} tokens, expected {n}")
        self.dependency.validate()


@dataclass(frozen=True)
class SubtreeMatch:
    """One site where a parent->children label pattern matched."""

    path: tuple[int, ...]
    node: ConstituencyTree
    child_index: int


def find_subtrees(tree: ConstituencyTree, parent_label: str,
                  child_labels: tuple[str, ...] | list[str]) -> list[SubtreeMatch]:
    """All nodes labeled `parent_label` whose children contain `child_labels`
    as a contiguous subsequence (stripped labels). Preorder; nested and
    overlapping sites are all returned.
    """
    pattern = tuple(child_labels)
    matches = []
    for path, node in walk(tree):
        if node.label != parent_label or len(node.children) < len(pattern):
            continue
        kid_labels = [c.label for c in node.children]
        for start in range(len(kid_labels) - len(pattern) + 1):
            if tuple(kid_labels[start:start + len(pattern)]) == pattern:
                matches.append(SubtreeMatch(path, node, start))
    return matches


@dataclass
class CorpusReport:
    """Summary counters filled in by read_corpus."""

    total: int = 0
    accepted: int = 0
    skipped: int = 0
    errors: list[tuple[int, str]] = field(default_factory=list)

    def record_error(self, line_no: int, message: str) -> None:
        self.skipped += 1
        self.errors.append((line_no, message))


_REQUIRED_FIELDS = ("utterance_id", "corpus_id", "transcript_id",
                    "speaker_group", "tokens", "deps", "tree")


def utterance_from_record(obj: dict) -> ParsedUtterance:
    """Build and validate a ParsedUtterance from a decoded JSONL record."""
    for name in _REQUIRED_FIELDS:
        if name not in obj:
            raise ValueError(f"missing field {name!r}")
    age = obj.get("child_age_months")
    if age is not None and not isinstance(age, (int, float)):
        raise ValueError("child_age_months must be a number or null")
    meta = UtteranceMeta(
        utterance_id=str(obj["utterance_id"]),
        corpus_id=str(obj["corpus_id"]),
        transcript_id=str(obj["transcript_id"]),
        speaker_group=obj["speaker_group"],
        child_age_months=float(age) if age is not None else None,
    )
    try:
        tokens = tuple(Token(index=int(t["i"]), text=str(t["text"]),
                             lemma=str(t.get("lemma", "")), pos=str(t.get("pos", "")))
                       for t in obj["tokens"])
        deps = DependencyGraph(tuple(DependencyEdge(int(d["d"]), int(d["h"]), str(d["rel"]))
                                     for d in obj["deps"]))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed tokens/deps entry: {exc}") from exc
    tree = parse_bracketed(obj["tree"])
    utt = ParsedUtterance(meta=meta, tokens=tokens, constituency=tree, dependency=deps)
    utt.validate()
    return utt


def utterance_to_record(utt: ParsedUtterance) -> dict:
    return {
        "utterance_id": utt.meta.utterance_id,
        "corpus_id": utt.meta.corpus_id,
        "transcript_id": utt.meta.transcript_id,
        "speaker_group": utt.meta.speaker_group,
        "child_age_months": utt.meta.child_age_months,
        "tokens": [{"i": t.index, "text": t.text, "lemma": t.lemma, "pos": t.pos}
                   for t in utt.tokens],
        "deps": [{"d": e.dependent, "h": e.head, "rel": e.relation}
                 for e in utt.dependency.edges],
        "tree": serialize_bracketed(utt.constituency),
    }


def read_corpus(path, strict: bool = False,
                report: CorpusReport | None = None) -> Iterator[ParsedUtterance]:
    """Stream ParsedUtterances from a JSONL corpus file.

    Lenient mode (default) skips malformed records and tallies them in
    `report`; strict mode raises CorpusError naming the line number and
    the violated invariant. Duplicate utterance_ids within the file are
    treated as violations.
    """
    if report is None:
        report = CorpusReport()
    seen_ids: set[str] = set()
    with open(path, encoding="utf-8") as handle:
        for line_no, line in enumerate(handle, start=1):
            if not line.strip():
                continue
            report.total += 1
            try:
                obj = json.loads(line)
                if not isinstance(obj, dict):
                    raise ValueError("record is not a JSON object")
                utt = utterance_from_record(obj)
                if utt.meta.utterance_id in seen_ids:
                    raise ValueError(f"duplicate utterance_id {utt.meta.utterance_id!r}")
                seen_ids.add(utt.meta.utterance_id)
            except (ValueError, json.JSONDecodeError) as exc:
                if strict:
                    raise CorpusError(line_no, str(exc)) from exc
                report.record_error(line_no, str(exc))
                continue
            report.accepted += 1
            yield utt
