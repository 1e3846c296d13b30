"""Minimal bracketed-tree reading/writing for treebank conversion.

Kept local so the adapter talks to the main toolkit only through its file
formats, never through its library API.
"""

from __future__ import annotations

import re
from dataclasses import dataclass


class BracketError(ValueError):
    pass


@dataclass
class Node:
    label: str
    children: list["Node"]
    word: str | None = None

    @property
    def is_leaf(self) -> bool:
        return self.word is not None

    def leaves(self):
        if self.is_leaf:
            yield self
        else:
            for child in self.children:
                yield from child.leaves()


_TOKEN = re.compile(r"[()]|[^\s()]+")


def parse(text: str) -> Node:
    stack: list[Node] = []
    root: Node | None = None
    pending_word: list[str] = []
    for match in _TOKEN.finditer(text):
        tok = match.group()
        if tok == "(":
            if not stack and root is not None:
                raise BracketError("multiple top-level nodes")
            stack.append(Node(label="", children=[]))
        elif tok == ")":
            if not stack:
                raise BracketError("unbalanced ')'")
            node = stack.pop()
            if node.word is None and not node.children:
                raise BracketError(f"empty or leafless node {node.label!r}")
            if stack:
                stack[-1].children.append(node)
            else:
                root = node
        else:
            if not stack:
                raise BracketError("token outside brackets")
            node = stack[-1]
            if not node.label and not node.children and node.word is None:
                node.label = tok
            elif node.word is None and not node.children:
                node.word = tok
            else:
                raise BracketError(f"unexpected token {tok!r} in node {node.label!r}")
    if stack:
        raise BracketError("unterminated bracket")
    if root is None:
        raise BracketError("no tree found")
    return root


def serialize(node: Node) -> str:
    if node.is_leaf:
        return f"({node.label} {node.word})"
    inner = " ".join(serialize(child) for child in node.children)
    return f"({node.label} {inner})"


def strip_empty_categories(node: Node) -> Node | None:
    """Copy of the tree without -NONE- leaves; empty branches are pruned."""
    if node.is_leaf:
        if node.label.startswith("-NONE-"):
            return None
        return Node(label=node.label, children=[], word=node.word)
    kept = [c for c in (strip_empty_categories(child) for child in node.children)
            if c is not None]
    if not kept:
        return None
    return Node(label=node.label, children=kept)


def read_tree_lines(handle):
    """Yield (id, tree text); trees may span lines, ids come from an
    optional "id<TAB>tree" prefix or are assigned t1, t2, ..."""
    buffer: list[str] = []
    balance = 0
    tree_id: str | None = None
    count = 0
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
            text = "\n".join(buffer).strip()
            buffer, balance = [], 0
            count += 1
            yield (tree_id if tree_id is not None else f"t{count}", text)
            tree_id = None
    if buffer:
        count += 1
        yield (tree_id if tree_id is not None else f"t{count}",
               "\n".join(buffer).strip())
