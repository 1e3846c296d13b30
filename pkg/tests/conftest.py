import itertools
import json
import random
from pathlib import Path

import pytest

from fillergap.labels import Label
from fillergap.trees import (ConstituencyTree, DependencyEdge, DependencyGraph,
                             ParsedUtterance, Token, UtteranceMeta, read_corpus)

FIXTURES = Path(__file__).parent / "fixtures"

LEAF_TAGS = ["NN", "NNS", "VB", "VBD", "DT", "PRP", "WP", "IN", "JJ", "RB", "."]
INTERNAL_LABELS = ["S", "NP", "VP", "SBAR", "PP", "ADJP", "WHNP-1",
                   "NP-<ANIM>-<AGENT-V1>", "FRAG", "SQ=2"]
WORDS = ["the", "dog", "saw", "a", "cat", "who", "ran", "quickly", "*T*-1",
         "home", "big", "."]


@pytest.fixture(scope="session")
def gold_corpus():
    return {utt.meta.utterance_id: utt
            for utt in read_corpus(FIXTURES / "gold_corpus.jsonl", strict=True)}


@pytest.fixture(scope="session")
def gold_labels():
    with open(FIXTURES / "gold_labels.json") as handle:
        return {utt_id: [Label(v) for v in values]
                for utt_id, values in json.load(handle).items()}


def random_tree(rng: random.Random, max_depth: int = 5,
                max_children: int = 4) -> ConstituencyTree:
    """Random well-formed tree; leaf token indices are 1..n in reading order."""
    counter = itertools.count(1)

    def build(depth: int) -> ConstituencyTree:
        if depth >= max_depth or (depth > 0 and rng.random() < 0.35):
            return ConstituencyTree(rng.choice(LEAF_TAGS), (),
                                    rng.choice(WORDS), next(counter))
        width = rng.randint(1, max_children)
        children = tuple(build(depth + 1) for _ in range(width))
        return ConstituencyTree(rng.choice(INTERNAL_LABELS), children)

    return build(0)


def random_dependency_graph(rng: random.Random, n: int) -> DependencyGraph:
    """Random rooted tree over tokens 1..n (random recursive tree)."""
    order = list(range(1, n + 1))
    rng.shuffle(order)
    edges = [DependencyEdge(order[0], 0, "root")]
    for i in range(1, n):
        head = order[rng.randrange(i)]
        edges.append(DependencyEdge(order[i], head, rng.choice(
            ["nsubj", "dobj", "det", "advmod", "relcl", "ccomp"])))
    return DependencyGraph(tuple(sorted(edges, key=lambda e: e.dependent)))


def make_utterance(tree: ConstituencyTree, deps, utt_id: str = "u1",
                   speaker_group: str = "adult", age: float | None = 30.0,
                   lemmas: dict | None = None) -> ParsedUtterance:
    """Build a validated ParsedUtterance from a tree plus (d, h, rel) edges."""
    lemmas = lemmas or {}
    tokens = tuple(Token(index=leaf.token_index, text=leaf.text,
                         lemma=lemmas.get(leaf.text, leaf.text.lower()),
                         pos=leaf.label)
                   for leaf in tree.leaves())
    graph = DependencyGraph(tuple(DependencyEdge(d, h, rel) for d, h, rel in deps))
    utt = ParsedUtterance(
        meta=UtteranceMeta(utterance_id=utt_id, corpus_id="test",
                           transcript_id="t", speaker_group=speaker_group,
                           child_age_months=age),
        tokens=tokens, constituency=tree, dependency=graph)
    utt.validate()
    return utt
