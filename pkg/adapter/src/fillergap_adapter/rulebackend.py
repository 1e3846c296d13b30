"""Deterministic rule-based parsing backend.

Produces both syntactic views over one shared tokenization for a fragment
of English typical of child-directed speech: SVO declaratives, copular
clauses, polar and wh matrix questions, embedded complement clauses and
questions, and who/which/that/whose relative clauses. It exists so the
adapter can run (and be tested end to end) without the neural parser
stack; structures mirror the Penn Treebank conventions those parsers
emit. Anything outside the fragment raises RuleParseFailure, which the
adapter logs and skips.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from . import lexicon as lex


class RuleParseFailure(ValueError):
    pass


@dataclass
class ParsedView:
    tokens: list[tuple[str, str, str]]  # (text, lemma, pos)
    tree: str
    deps: list[tuple[int, int, str]]    # (dependent, head, rel); head 0 = root


@dataclass
class Tok:
    i: int
    text: str
    tag: str
    lemma: str


@dataclass
class Node:
    label: str
    children: list = field(default_factory=list)
    tok: Tok | None = None

    @classmethod
    def leaf(cls, tok: Tok, tag: str | None = None) -> "Node":
        return cls(label=tag or tok.tag, tok=tok)

    def leaves(self):
        if self.tok is not None:
            yield self
        else:
            for child in self.children:
                yield from child.leaves()

    def serialize(self) -> str:
        if self.tok is not None:
            return f"({self.label} {self.tok.text})"
        inner = " ".join(c.serialize() for c in self.children)
        return f"({self.label} {inner})"


_CONTRACTIONS = re.compile(r"(n't|'ll|'re|'ve|'s|'m|'d)$", re.IGNORECASE)
_PUNCT_SPLIT = re.compile(r"^(.*?)([.?!,;:]+)$")


def tokenize(text: str) -> list[str]:
    """Whitespace tokenization plus contraction and punctuation splitting."""
    out: list[str] = []
    for chunk in text.split():
        trailing: list[str] = []
        match = _PUNCT_SPLIT.match(chunk)
        if match and match.group(1):
            chunk = match.group(1)
            trailing = list(match.group(2))
        parts: list[str] = []
        while True:
            match = _CONTRACTIONS.search(chunk)
            if match and match.start() > 0:
                parts.insert(0, match.group(1))
                chunk = chunk[:match.start()]
            else:
                break
        if chunk:
            parts.insert(0, chunk)
        out.extend(parts)
        out.extend(trailing)
    return out


_NOUNISH_NEXT = None  # computed lazily in _starts_nominal


def _is_verb_form(word: str) -> bool:
    return word in lex.VERB_FORMS or word in lex.BE_FORMS or \
        word in lex.DO_FORMS or word in lex.HAVE_FORMS


def _nounish(word: str) -> bool:
    return lex.noun_lemma(word) is not None or word in lex.ADJS or \
        word in lex.CD or word in lex.DT


def tag_tokens(words: list[str]) -> list[Tok]:
    toks: list[Tok] = []
    for pos, word in enumerate(words):
        lower = word.lower()
        nxt = words[pos + 1].lower() if pos + 1 < len(words) else None
        tag, lemma = _classify(lower, word, nxt, pos)
        toks.append(Tok(pos + 1, word, tag, lemma))
    # noun/verb ambiguity: a "verb" right after a determiner-like word is a noun
    for idx, tok in enumerate(toks):
        if tok.tag.startswith("VB") and idx > 0 and \
                toks[idx - 1].tag in ("DT", "PRP$", "JJ", "CD"):
            lemma = lex.noun_lemma(tok.text.lower())
            if lemma or tok.text.lower() in lex.NOUNS:
                plural = lex.is_plural_noun(tok.text.lower())
                toks[idx] = Tok(tok.i, tok.text, "NNS" if plural else "NN",
                                lemma or tok.text.lower())
    return toks


def _classify(lower: str, word: str, nxt: str | None, pos: int) -> tuple[str, str]:
    if lower in lex.PUNCT:
        return lex.PUNCT[lower], lower
    if lower in lex.BE_FORMS:
        return lex.BE_FORMS[lower]
    if lower in lex.DO_FORMS:
        return lex.DO_FORMS[lower]
    if lower in lex.HAVE_FORMS:
        return lex.HAVE_FORMS[lower]
    if lower in lex.MD:
        return "MD", {"'ll": "will", "'d": "would"}.get(lower, lower)
    if lower == "her":
        return ("PRP$", "her") if nxt and _nounish(nxt) else ("PRP", "her")
    if lower in lex.PRP_DOLLAR:
        return "PRP$", lower
    if lower in lex.PRP:
        return "PRP", lower
    if lower in lex.WP:
        return "WP", lower
    if lower in lex.WDT:
        return "WDT", lower
    if lower in lex.WP_DOLLAR:
        return "WP$", lower
    if lower in lex.WRB:
        return "WRB", lower
    if lower == "that":
        if nxt and _nounish(nxt) and nxt not in lex.DT:
            return "DT", "that"
        return "IN", "that"
    if lower in lex.DT:
        return "DT", lower
    if lower in lex.CC:
        return "CC", lower
    if lower in lex.UH:
        return "UH", lower
    if lower in lex.RB:
        return "RB", "not" if lower == "n't" else lower
    if lower in lex.CD:
        return "CD", lower
    if lower == "to":
        return ("TO", "to") if nxt and nxt in lex.VERB_FORMS else ("IN", "to")
    if lower in lex.IN:
        # clause-final preposition is a particle/adverb ("wake up", "outside")
        if lower not in ("that", "whether", "if", "because") and \
                (nxt is None or nxt in lex.PUNCT):
            return "RB", lower
        return "IN", lower
    if lower in lex.VERB_FORMS:
        return lex.VERB_FORMS[lower]
    noun = lex.noun_lemma(lower)
    if noun is not None:
        return ("NNS" if lex.is_plural_noun(lower) else "NN"), noun
    if lower in lex.ADJS:
        return "JJ", lower
    if lower.endswith("ly"):
        return "RB", lower
    if lower.endswith("ing"):
        return "VBG", lower[:-3]
    if lower.endswith("ed"):
        return "VBD", lower[:-2]
    if pos > 0 and word[:1].isupper():
        return "NNP", word
    return "NN", lower


PREPS = (lex.IN | {"to"}) - {"that", "whether", "if", "because"}
WH_TAGS = ("WP", "WDT", "WP$", "WRB")


class _Parser:
    def __init__(self, toks: list[Tok]):
        self.toks = toks
        self.pos = 0
        self.edges: dict[int, tuple[int, str]] = {}
        self.last_complement_verb: Tok | None = None

    # --- cursor helpers -----------------------------------------------------

    def peek(self, k: int = 0) -> Tok | None:
        idx = self.pos + k
        return self.toks[idx] if idx < len(self.toks) else None

    def take(self) -> Tok:
        tok = self.toks[self.pos]
        self.pos += 1
        return tok

    def at_end(self) -> bool:
        return self.pos >= len(self.toks)

    def fail(self, why: str):
        raise RuleParseFailure(f"{why} at token {self.pos + 1}")

    def add(self, dep: Tok, head: Tok, rel: str) -> None:
        if dep.i in self.edges:
            self.fail(f"token {dep.text!r} assigned two heads")
        self.edges[dep.i] = (head.i, rel)

    def set_root(self, tok: Tok) -> None:
        self.edges[tok.i] = (0, "root")

    # --- category tests -----------------------------------------------------

    def _is_verb(self, tok: Tok | None) -> bool:
        return tok is not None and tok.tag.startswith("VB")

    def _is_aux_candidate(self, tok: Tok | None) -> bool:
        return tok is not None and (tok.tag == "MD" or
                                    tok.lemma in ("be", "do", "have"))

    def _is_demonstrative(self, tok: Tok | None) -> bool:
        # "that" with no following nominal is a demonstrative pronoun
        return tok is not None and tok.tag == "IN" and tok.lemma == "that"

    def _starts_np(self, tok: Tok | None) -> bool:
        if self._is_demonstrative(tok):
            return True
        return tok is not None and tok.tag in ("DT", "PRP", "PRP$", "JJ",
                                               "NN", "NNS", "NNP", "CD")

    def _has_later_verb(self) -> bool:
        return any(self._is_verb(t) or t.tag == "MD"
                   for t in self.toks[self.pos:])

    # --- noun phrases ---------------------------------------------------------

    def parse_np(self, allow_relative: bool = True) -> tuple[Node, Tok]:
        tok = self.peek()
        if tok is None:
            self.fail("expected a noun phrase")
        if tok.tag == "PRP" or self._is_demonstrative(tok):
            head = self.take()
            node = Node("NP", [Node.leaf(head, "DT" if head.tag == "IN" else None)])
        else:
            det = None
            if tok.tag in ("DT", "PRP$"):
                det = self.take()
            adjs = []
            while self.peek() is not None and self.peek().tag == "JJ":
                adjs.append(self.take())
            nouns = []
            while self.peek() is not None and \
                    self.peek().tag in ("NN", "NNS", "NNP", "CD"):
                nouns.append(self.take())
            if not nouns:
                if det is None:
                    self.fail("expected a nominal")
                head = det
                node = Node("NP", [Node.leaf(det)])
            else:
                head = nouns[-1]
                kids = []
                if det is not None:
                    kids.append(Node.leaf(det))
                    self.add(det, head, "poss" if det.tag == "PRP$" else "det")
                for adj in adjs:
                    kids.append(Node.leaf(adj))
                    self.add(adj, head, "amod")
                for noun in nouns:
                    kids.append(Node.leaf(noun))
                    if noun is not head:
                        self.add(noun, head, "compound")
                node = Node("NP", kids)
        if allow_relative and self._relative_ahead():
            sbar = self.parse_relative_clause(head)
            node = Node("NP", [node, sbar])
        return node, head

    def _relative_ahead(self) -> bool:
        tok = self.peek()
        if tok is None:
            return False
        if tok.tag in ("WP", "WDT", "WP$"):
            return True
        if tok.tag == "WRB":  # "the day when ...", "the place where ..."
            nxt = self.peek(1)
            return self._is_verb(nxt) or self._starts_np(nxt) or \
                self._is_aux_candidate(nxt)
        # relativizer "that": only when a clause follows
        if tok.text.lower() == "that" and tok.tag == "IN":
            nxt = self.peek(1)
            return self._is_verb(nxt) or self._starts_np(nxt)
        return False

    def parse_relative_clause(self, noun_head: Tok) -> Node:
        rel = self.take()
        if rel.tag == "WRB":
            wh_node = Node("WHADVP", [Node.leaf(rel)])
            if self._is_verb(self.peek()) or self._is_aux_candidate(self.peek()):
                vp_node, verb = self.parse_vp()
                clause = Node("S", [vp_node])
            else:
                subj_node, subj_head = self.parse_np(allow_relative=False)
                vp_node, verb = self.parse_vp()
                self.add(subj_head, verb, "nsubj")
                clause = Node("S", [subj_node, vp_node])
            self.add(rel, verb, "advmod")
            self.add(verb, noun_head, "relcl")
            return Node("SBAR", [wh_node, clause])
        if rel.tag == "WP$":
            poss_np, poss_head = self.parse_np(allow_relative=False)
            wh_node = Node("WHNP", [Node.leaf(rel)] + poss_np.children)
            self.add(rel, poss_head, "poss")
            wh_head: Tok | None = poss_head
        else:
            tag = "WDT" if rel.text.lower() in ("that", "which") else rel.tag
            wh_node = Node("WHNP", [Node.leaf(rel, tag)])
            wh_head = rel
        if self._is_verb(self.peek()) or self._is_aux_candidate(self.peek()):
            # subject relative: "who taught syntax"
            vp_node, verb = self.parse_vp()
            self.add(wh_head, verb, "nsubj")
            self.add(verb, noun_head, "relcl")
            return Node("SBAR", [wh_node, Node("S", [vp_node])])
        subj_node, subj_head = self.parse_np(allow_relative=False)
        vp_node, verb = self.parse_vp(allow_object=False)
        self.add(subj_head, verb, "nsubj")
        self.add(wh_head, verb, "dobj")
        self.add(verb, noun_head, "relcl")
        return Node("SBAR", [wh_node, Node("S", [subj_node, vp_node])])

    # --- verb phrases ---------------------------------------------------------

    def parse_vp(self, allow_object: bool = True) -> tuple[Node, Tok]:
        """Aux chain plus main verb plus complements; returns the outermost
        VP node and the main verb token."""
        aux: list[Tok] = []
        while self._is_aux_candidate(self.peek()):
            nxt = self.peek(1)
            if nxt is not None and (self._is_verb(nxt) or
                                    (nxt.tag == "RB" and self._is_verb(self.peek(2)))):
                aux.append(self.take())
            else:
                break
        neg = None
        if self.peek() is not None and self.peek().tag == "RB" and \
                self.peek().lemma == "not" and self._is_verb(self.peek(1)):
            neg = self.take()
        main = self.peek()
        if not self._is_verb(main):
            self.fail("expected a verb")
        main = self.take()
        for tok in aux:
            self.add(tok, main, "aux")
        if neg is not None:
            self.add(neg, main, "neg")
        kids: list[Node] = [Node.leaf(main)]
        if neg is not None:
            kids.insert(0, Node.leaf(neg))
        self._parse_complements(kids, main, allow_object)
        node = Node("VP", kids)
        for tok in reversed(aux):
            node = Node("VP", [Node.leaf(tok), node])
        return node, main

    def _parse_complements(self, kids: list[Node], main: Tok,
                           allow_object: bool) -> None:
        is_copula = main.lemma == "be"
        has_object = False
        first_object: tuple[Tok, bool] | None = None  # (head, bare pronoun?)
        while not self.at_end():
            tok = self.peek()
            if tok.tag == "JJ" and is_copula:
                adj = self.take()
                kids.append(Node("ADJP", [Node.leaf(adj)]))
                self.add(adj, main, "acomp")
                continue
            if tok.tag == "RB":
                adv = self.take()
                kids.append(Node("ADVP", [Node.leaf(adv)]))
                self.add(adv, main, "advmod")
                continue
            if tok.tag == "TO" and self._is_verb(self.peek(1)):
                to = self.take()
                inner, xverb = self.parse_vp()
                self.add(to, xverb, "aux")
                self.add(xverb, main, "xcomp")
                kids.append(Node("S", [Node("VP", [Node.leaf(to), inner])]))
                continue
            if tok.tag == "IN" and tok.lemma in ("that", "whether", "if") and \
                    (self._starts_np(self.peek(1)) or self._is_verb(self.peek(1))):
                kids.append(self._parse_complement_clause(main))
                continue
            if tok.tag in WH_TAGS:
                kids.append(self._parse_embedded_question(main))
                continue
            if tok.tag == "IN" and tok.lemma in PREPS and \
                    self._starts_np(self.peek(1)):
                prep = self.take()
                np_node, np_head = self.parse_np(allow_relative=False)
                self.add(prep, main, "prep")
                self.add(np_head, prep, "pobj")
                kids.append(Node("PP", [Node.leaf(prep), np_node]))
                continue
            if allow_object and not has_object and self._starts_np(tok) and \
                    not self._is_verb(tok):
                np_node, np_head = self.parse_np()
                self.add(np_head, main, "attr" if is_copula else "dobj")
                kids.append(np_node)
                has_object = True
                first_object = (np_head, np_head.tag == "PRP")
                continue
            if allow_object and has_object and first_object is not None and \
                    first_object[1] and self._starts_np(tok) and \
                    not self._is_verb(tok) and not is_copula:
                # double object: "show me the picture" - pronoun is the iobj
                self.edges[first_object[0].i] = (main.i, "iobj")
                np_node, np_head = self.parse_np()
                self.add(np_head, main, "dobj")
                kids.append(np_node)
                first_object = None
                continue
            break

    def _parse_complement_clause(self, main: Tok) -> Node:
        comp = self.take()
        if self._is_verb(self.peek()) or self._is_aux_candidate(self.peek()):
            vp_node, verb = self.parse_vp()
            clause = Node("S", [vp_node])
        else:
            subj_node, subj_head = self.parse_np()
            vp_node, verb = self.parse_vp()
            self.add(subj_head, verb, "nsubj")
            clause = Node("S", [subj_node, vp_node])
        self.add(comp, verb, "mark")
        self.add(verb, main, "ccomp")
        self.last_complement_verb = verb
        return Node("SBAR", [Node.leaf(comp), clause])

    def _parse_embedded_question(self, main: Tok) -> Node:
        wh_node, wh_head, wh_tag = self.parse_wh_phrase()
        if self._is_verb(self.peek()) or self._is_aux_candidate(self.peek()):
            vp_node, verb = self.parse_vp()
            self.add(wh_head, verb,
                     "nsubj" if wh_tag != "WRB" else "advmod")
            clause = Node("S", [vp_node])
        else:
            subj_node, subj_head = self.parse_np()
            vp_node, verb = self.parse_vp(allow_object=(wh_tag == "WRB"))
            self.add(subj_head, verb, "nsubj")
            self.add(wh_head, verb, "dobj" if wh_tag != "WRB" else "advmod")
            clause = Node("S", [subj_node, vp_node])
        self.add(verb, main, "ccomp")
        return Node("SBAR", [wh_node, clause])

    # --- wh phrases -----------------------------------------------------------

    def parse_wh_phrase(self) -> tuple[Node, Tok, str]:
        tok = self.take()
        if tok.tag == "WRB":
            return Node("WHADVP", [Node.leaf(tok)]), tok, "WRB"
        if tok.tag == "WP$":
            nxt = self.peek()
            if nxt is not None and nxt.tag in ("NN", "NNS", "NNP"):
                noun = self.take()
                self.add(tok, noun, "poss")
                return (Node("WHNP", [Node.leaf(tok), Node.leaf(noun)]),
                        noun, "WP$")
            return Node("WHNP", [Node.leaf(tok)]), tok, "WP$"
        nxt = self.peek()
        if tok.tag == "WDT" and nxt is not None and \
                nxt.tag in ("NN", "NNS", "NNP"):
            noun = self.take()
            self.add(tok, noun, "det")
            return Node("WHNP", [Node.leaf(tok), Node.leaf(noun)]), noun, "WP"
        return Node("WHNP", [Node.leaf(tok)]), tok, "WP"

    # --- clauses ----------------------------------------------------------------

    def parse_wh_question(self) -> tuple[Node, Tok]:
        wh_node, wh_head, wh_tag = self.parse_wh_phrase()
        if self.at_end():
            self.set_root(wh_head)
            return Node("FRAG", [wh_node]), wh_head
        nxt = self.peek()
        if self._is_aux_candidate(nxt) and not self._is_verb(self.peek(1)) \
                and nxt.lemma == "be" and not self._has_later_verb_strict(1):
            # copular question: "What's your name?", "Why is he sad?"
            cop = self.take()
            self.set_root(cop)
            self.add(wh_head, cop, "advmod" if wh_tag == "WRB" else "attr")
            subj_node = None
            if not self.at_end():
                subj_node, subj_head = self.parse_np(allow_relative=False)
                self.add(subj_head, cop, "nsubj")
            if self.at_end():
                # inverted shape: the post-copular NP is the subject
                vp_kids = [Node.leaf(cop)]
                if subj_node is not None:
                    vp_kids.append(subj_node)
                sq = Node("SQ", [Node("VP", vp_kids)])
                return Node("SBARQ", [wh_node, sq]), cop
            # overt subject plus a predicate: "Why is he sad?"
            kids = [Node.leaf(cop), subj_node]
            tok = self.peek()
            if tok.tag == "JJ":
                adj = self.take()
                kids.append(Node("ADJP", [Node.leaf(adj)]))
                self.add(adj, cop, "acomp")
            elif tok.tag == "IN" and tok.lemma in PREPS:
                prep = self.take()
                np_node, np_head = self.parse_np(allow_relative=False)
                self.add(prep, cop, "prep")
                self.add(np_head, prep, "pobj")
                kids.append(Node("PP", [Node.leaf(prep), np_node]))
            else:
                pred_node, pred_head = self.parse_np(allow_relative=False)
                self.add(pred_head, cop, "attr")
                kids.append(pred_node)
            return Node("SBARQ", [wh_node, Node("SQ", kids)]), cop
        if self._is_aux_candidate(nxt) and not self._is_verb(self.peek(1)) \
                or (self._is_aux_candidate(nxt) and self._starts_np(self.peek(1))):
            # inverted question: "What did you see?"
            aux = self.take()
            subj_node, subj_head = self.parse_np()
            self.last_complement_verb = None
            vp_node, verb = self.parse_vp(allow_object=(wh_tag == "WRB"))
            self.add(aux, verb, "aux")
            self.add(subj_head, verb, "nsubj")
            # a complement clause with a missing object hosts the gap:
            # "what did you say that she made?"
            gap_verb = verb
            comp = self.last_complement_verb
            if wh_tag != "WRB" and comp is not None and \
                    not self._has_object(comp):
                gap_verb = comp
            self.add(wh_head, gap_verb, "dobj" if wh_tag != "WRB" else "advmod")
            self.set_root(verb)
            sq = Node("SQ", [Node.leaf(aux), subj_node, vp_node])
            return Node("SBARQ", [wh_node, sq]), verb
        if self._is_verb(nxt) or self._is_aux_candidate(nxt):
            # subject question: "Who praised the student?"
            vp_node, verb = self.parse_vp()
            self.add(wh_head, verb, "nsubj" if wh_tag != "WRB" else "advmod")
            self.set_root(verb)
            return Node("SBARQ", [wh_node, Node("SQ", [Node("VP", [vp_node])
                                                       if vp_node.label != "VP"
                                                       else vp_node])]), verb
        self.fail("unparsable wh-question")

    def _has_later_verb_strict(self, offset: int) -> bool:
        return any(self._is_verb(t) for t in self.toks[self.pos + offset:])

    def _has_object(self, verb: Tok) -> bool:
        return any(head == verb.i and rel in ("dobj", "attr")
                   for head, rel in self.edges.values())

    def parse_polar_question(self) -> tuple[Node, Tok]:
        aux = self.take()
        if aux.lemma == "be" and not self._has_later_verb_strict(0):
            # copular polar: "Is that a dog?"
            subj_node, subj_head = self.parse_np()
            self.add(subj_head, aux, "nsubj")
            self.set_root(aux)
            kids = [Node.leaf(aux), subj_node]
            if not self.at_end():
                tok = self.peek()
                if tok.tag == "JJ":
                    adj = self.take()
                    kids.append(Node("ADJP", [Node.leaf(adj)]))
                    self.add(adj, aux, "acomp")
                elif tok.tag == "IN" and tok.lemma in PREPS:
                    prep = self.take()
                    np_node, np_head = self.parse_np(allow_relative=False)
                    self.add(prep, aux, "prep")
                    self.add(np_head, prep, "pobj")
                    kids.append(Node("PP", [Node.leaf(prep), np_node]))
                else:
                    pred_node, pred_head = self.parse_np()
                    self.add(pred_head, aux, "attr")
                    kids.append(pred_node)
            return Node("SQ", kids), aux
        subj_node, subj_head = self.parse_np()
        vp_node, verb = self.parse_vp()
        self.add(aux, verb, "aux")
        self.add(subj_head, verb, "nsubj")
        self.set_root(verb)
        return Node("SQ", [Node.leaf(aux), subj_node, vp_node]), verb

    def parse_declarative(self) -> tuple[Node, Tok]:
        if self._is_verb(self.peek()) or \
                (self._is_aux_candidate(self.peek()) and
                 self._is_verb(self.peek(1))):
            vp_node, verb = self.parse_vp()  # imperative
            self.set_root(verb)
            return Node("S", [vp_node]), verb
        subj_node, subj_head = self.parse_np()
        if self.at_end():
            self.set_root(subj_head)
            return subj_node, subj_head  # bare NP fragment
        vp_node, verb = self.parse_vp()
        self.add(subj_head, verb, "nsubj")
        self.set_root(verb)
        return Node("S", [subj_node, vp_node]), verb

    def parse_interjection(self) -> tuple[Node, Tok]:
        kids = []
        head = None
        while not self.at_end():
            tok = self.take()
            kids.append(Node.leaf(tok))
            if head is None:
                head = tok
            else:
                self.add(tok, head, "dep")
        self.set_root(head)
        return Node("INTJ", kids), head

    def parse_utterance(self) -> Node:
        trailing: list[Tok] = []
        while self.toks and self.toks[-1].tag in (".", ",", ":"):
            trailing.insert(0, self.toks.pop())
        if not self.toks:
            self.fail("no content tokens")
        if any(t.tag in (".", ",", ":") for t in self.toks):
            self.fail("medial punctuation not supported")
        first = self.peek()
        if all(t.tag in ("UH", "RB") for t in self.toks):
            clause, root = self.parse_interjection()
        elif first.tag in WH_TAGS:
            clause, root = self.parse_wh_question()
        elif self._is_aux_candidate(first) and self._starts_np(self.peek(1)):
            clause, root = self.parse_polar_question()
        else:
            clause, root = self.parse_declarative()
        if not self.at_end():
            self.fail(f"unattached material from {self.peek().text!r}")
        for tok in trailing:
            clause.children.append(Node.leaf(tok))
            self.add(tok, root, "punct")
        self.toks.extend(trailing)
        return Node("TOP", [clause])


class RuleBackend:
    """Deterministic fallback backend for the supported English fragment."""

    name = "rule"

    def provenance(self) -> dict:
        return {"backend": self.name, "version": "0.1.0"}

    def parse_pretokenized(self, words: list[str]) -> ParsedView:
        if not words:
            raise RuleParseFailure("empty utterance")
        toks = tag_tokens(words)
        parser = _Parser(list(toks))
        tree = parser.parse_utterance()
        leaves = [leaf.tok for leaf in tree.leaves()]
        if [t.text for t in sorted(leaves, key=lambda t: t.i)] != words or \
                len(leaves) != len(words):
            raise RuleParseFailure("parse does not cover the token sequence")
        order = sorted(leaves, key=lambda t: t.i)
        if [leaf.tok.i for leaf in tree.leaves()] != [t.i for t in order]:
            raise RuleParseFailure("leaves out of order")
        missing = [t.i for t in toks if t.i not in parser.edges]
        if missing:
            raise RuleParseFailure(f"tokens without heads: {missing}")
        deps = [(i, parser.edges[i][0], parser.edges[i][1])
                for i in sorted(parser.edges)]
        tokens = [(t.text, t.lemma, t.tag) for t in toks]
        return ParsedView(tokens=tokens, tree=tree.serialize(), deps=deps)

    def parse_text(self, text: str) -> ParsedView:
        return self.parse_pretokenized(tokenize(text))
