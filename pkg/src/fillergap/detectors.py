"""Hybrid constituency+dependency detectors for filler-gap constructions.

One detector per construction family (relative clauses, matrix questions,
embedded questions). Constituency configurations decide the construction;
dependency relations validate and, on conflict, decide the extraction
site. Detectors are pure functions and never raise on odd input; they
return no detection instead.
"""

from __future__ import annotations

from dataclasses import dataclass

from .labels import LABEL_ORDER, Label
from .trees import (ConstituencyTree, DependencyGraph, ParsedUtterance,
                    dep_children, find_subtrees, walk)

WH_PHRASES = {"WHNP", "WHADVP", "WHPP", "WHADJP"}
ADJUNCT_WH_PHRASES = {"WHADVP", "WHPP", "WHADJP"}
POSSESSIVE_WH_TAGS = {"WP$"}

# Auxiliary preterminals ignored when scanning for the first NP/VP pair.
AUX_TAGS = {"MD", "VBZ", "VBP", "VBD"}
PUNCT_LABELS = {".", ",", ":", "``", "''", "-LRB-", "-RRB-", "HYPH", "NFP", "SYM"}
SKIP_PHRASES = {"ADVP", "INTJ", "PRN"}
SKIP_LEAF_TAGS = {"RB", "UH"} | AUX_TAGS

SUBJECT_RELS = {"nsubj", "nsubjpass"}
OBJECT_RELS = {"dobj", "obj", "iobj"}
RC_MODIFIER_RELS = {"relcl", "acl:relcl", "acl"}
COMPLEMENT_RELS = {"ccomp", "xcomp"}

SUBJECT, OBJECT, ADJUNCT = "subject", "object", "adjunct"

DEFAULT_EMBEDDING_VERBS = frozenset({
    "know", "see", "tell", "look", "remember", "wonder", "guess", "ask",
    "say", "forget", "figure", "understand", "decide", "show", "watch",
    "hear", "think",
})

DEFAULT_FREE_RELATIVE_WORDS = frozenset({
    "whatever", "whoever", "whomever", "whichever", "whenever", "wherever",
})


@dataclass(frozen=True)
class EmbeddingVerbLexicon:
    """Verb lemmas that select interrogative complements."""

    lemmas: frozenset[str] = DEFAULT_EMBEDDING_VERBS

    def __post_init__(self):
        if not self.lemmas:
            raise ValueError("embedding-verb lexicon must be non-empty")
        object.__setattr__(self, "lemmas", frozenset(w.lower() for w in self.lemmas))

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.lemmas


@dataclass(frozen=True)
class FreeRelativeExclusions:
    """Words whose presence marks the clause as a free relative."""

    words: frozenset[str] = DEFAULT_FREE_RELATIVE_WORDS

    def __post_init__(self):
        object.__setattr__(self, "words", frozenset(w.lower() for w in self.words))

    def __contains__(self, word: str) -> bool:
        return word in self.words


DEFAULT_LEXICON = EmbeddingVerbLexicon()
DEFAULT_EXCLUSIONS = FreeRelativeExclusions()


@dataclass(frozen=True)
class Detection:
    """One detected construction instance.

    `filler_span` is the inclusive 1-based token range of the overt filler
    (None for fillerless constructions); `clause_path` is the child-index
    path from the tree root to the construction's clause node; `evidence`
    names the heuristics that fired, for downstream auditing.
    """

    label: Label
    filler_span: tuple[int, int] | None
    clause_path: tuple[int, ...]
    evidence: tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# shared tree/graph heuristics


def is_empty_category(node: ConstituencyTree) -> bool:
    return node.is_leaf and node.raw_label.startswith("-NONE-")


def np_is_overt(node: ConstituencyTree) -> bool:
    """True when the phrase dominates at least one pronounced leaf."""
    return any(not is_empty_category(leaf) for leaf in node.leaves())


def _is_minor(node: ConstituencyTree) -> bool:
    if node.is_leaf:
        return node.label in PUNCT_LABELS or node.label in SKIP_LEAF_TAGS \
            or is_empty_category(node)
    return node.label in SKIP_PHRASES


def _is_punct(node: ConstituencyTree) -> bool:
    return node.is_leaf and (node.label in PUNCT_LABELS or is_empty_category(node))


def subject_position_filled(clause: ConstituencyTree) -> bool:
    """True when an overt NP precedes a VP inside the clause.

    Descends through auxiliary VP layers and ignores auxiliary
    preterminals (MD/VBZ/VBP/VBD), so "should the birdie say" counts the
    NP, while "praised the student" does not.
    """
    node = clause
    while node is not None:
        core = [c for c in node.children if not _is_minor(c)]
        np_pos = next((i for i, c in enumerate(core)
                       if c.label in ("NP", "NML") and np_is_overt(c)), None)
        vp_pos = next((i for i, c in enumerate(core) if c.label == "VP"), None)
        if np_pos is not None and vp_pos is not None and np_pos < vp_pos:
            return True
        if vp_pos is not None and np_pos is None:
            node = core[vp_pos]
            continue
        return False
    return False


def lowest_clause(node: ConstituencyTree) -> ConstituencyTree | None:
    """First S-type descendant below `node`, tolerating S-over-S wrappers."""
    clause = next((c for c in node.children if c.label in ("S", "SQ", "SINV")), None)
    while clause is not None:
        inner = [c for c in clause.children if not _is_punct(c)]
        if len(inner) == 1 and inner[0].label in ("S", "SQ", "SINV"):
            clause = inner[0]
        else:
            break
    return clause


def phrase_head(graph: DependencyGraph, span: tuple[int, int] | None) -> int | None:
    """Token in span whose dependency head lies outside the span (or root)."""
    if span is None:
        return None
    lo, hi = span
    for i in range(lo, hi + 1):
        head = graph.head_of(i)
        if head is None:
            continue
        if head == 0 or head < lo or head > hi:
            return i
    return None


def clause_main_verb(clause: ConstituencyTree) -> tuple[ConstituencyTree | None,
                                                        ConstituencyTree | None]:
    """(lowest VP, its leftmost verb leaf) for a clause, or (None, None)."""
    node = clause
    vp = clause if clause.label == "VP" else None
    while True:
        nxt = next((c for c in node.children if c.label == "VP"), None)
        if nxt is None:
            break
        vp = nxt
        node = nxt
    if vp is None:
        return None, None
    verb = next((c for c in vp.children if c.is_leaf and c.label.startswith("VB")), None)
    return vp, verb


def _object_missing(clause: ConstituencyTree, utt: ParsedUtterance) -> bool:
    """The clause's main verb has no object NP sibling and no dobj dependent."""
    vp, verb = clause_main_verb(clause)
    if vp is None or verb is None:
        return False
    verb_pos = vp.children.index(verb)
    for sibling in vp.children[verb_pos + 1:]:
        if sibling.label in ("NP", "NML") and np_is_overt(sibling):
            return False
    for rel in OBJECT_RELS:
        if dep_children(utt.dependency, verb.token_index, rel):
            return False
    return True


def _dep_site(utt: ParsedUtterance, wh_head: int | None) -> tuple[str | None, str | None]:
    """Extraction site suggested by the wh-word's dependency attachment."""
    if wh_head is None:
        return None, None
    graph = utt.dependency
    rel = graph.relation_of(wh_head)
    if rel in SUBJECT_RELS:
        return SUBJECT, "dep:wh_is_subject"
    if rel in OBJECT_RELS:
        return OBJECT, "dep:wh_is_object"
    head = graph.head_of(wh_head)
    if head:
        others = [d for r in SUBJECT_RELS for d in dep_children(graph, head, r)
                  if d != wh_head]
        if others:
            # the clause's overt subject is some other NP, so the gap is not subject
            return OBJECT, "dep:subject_filled_by_other"
    return None, None


def _crosses_complement(utt: ParsedUtterance, wh_head: int | None) -> bool:
    """True when the filler attaches to a verb below a ccomp/xcomp edge."""
    if wh_head is None:
        return False
    graph = utt.dependency
    node = graph.head_of(wh_head)
    hops = 0
    while node and hops <= graph.n:
        if graph.relation_of(node) in COMPLEMENT_RELS:
            return True
        node = graph.head_of(node)
        hops += 1
    return False


def _argument_site(utt: ParsedUtterance, clause: ConstituencyTree | None,
                   wh_span: tuple[int, int] | None) -> tuple[str, list[str]]:
    """Subject vs object for a WHNP filler: constituency first, dependency wins."""
    evidence = []
    filled = clause is not None and subject_position_filled(clause)
    site = OBJECT if filled else SUBJECT
    evidence.append("const:np_before_vp" if filled else "const:no_np_before_vp")
    wh_head = phrase_head(utt.dependency, wh_span)
    dep_site, dep_ev = _dep_site(utt, wh_head)
    if dep_ev:
        evidence.append(dep_ev)
    if dep_site is not None and dep_site != site:
        evidence.append("dep_site_override")
        site = dep_site
    return site, evidence


# ---------------------------------------------------------------------------
# relative clauses


def _rc_dependency_check(utt: ParsedUtterance, modified_np: ConstituencyTree,
                         clause_span: tuple[int, int] | None,
                         wh_span: tuple[int, int] | None) -> str | None:
    """Evidence tag when the dependency graph supports an RC reading, else None."""
    graph = utt.dependency
    head_noun = phrase_head(graph, modified_np.span())
    if head_noun is not None and clause_span is not None:
        lo, hi = clause_span
        for rel in RC_MODIFIER_RELS:
            if any(lo <= d <= hi for d in dep_children(graph, head_noun, rel)):
                return "dep:noun_modified_by_clause"
    wh_head = phrase_head(graph, wh_span)
    if wh_head is not None and clause_span is not None:
        head = graph.head_of(wh_head)
        if head is not None and clause_span[0] <= head <= clause_span[1]:
            return "dep:wh_attaches_in_clause"
    return None


def detect_relative_clauses(utt: ParsedUtterance) -> list[Detection]:
    """NP -> NP SBAR signature with wh subtyping, plus reduced-RC branches."""
    detections = []
    tree = utt.constituency

    for m in find_subtrees(tree, "NP", ("NP", "SBAR")):
        modified_np = m.node.children[m.child_index]
        sbar = m.node.children[m.child_index + 1]
        sbar_path = m.path + (m.child_index + 1,)
        content = [c for c in sbar.children if not _is_punct(c)]
        wh = next((c for c in content if c.label in WH_PHRASES), None)
        if wh is not None:
            det = _classify_wh_rc(utt, modified_np, sbar, sbar_path, wh)
        else:
            det = _classify_reduced_orc(utt, sbar, sbar_path, content)
        if det is not None:
            detections.append(det)

    # reduced subject RC: participial VP right-adjoined to the noun
    for m in find_subtrees(tree, "NP", ("NP", "VP")):
        modified_np = m.node.children[m.child_index]
        vp = m.node.children[m.child_index + 1]
        vp_path = m.path + (m.child_index + 1,)
        first_leaf = next((leaf for leaf in vp.leaves() if not _is_punct(leaf)), None)
        if first_leaf is None or first_leaf.label not in ("VBN", "VBG"):
            continue
        evidence = ["rc:np_vp", "reduced:participial_vp"]
        dep_ev = _reduced_subject_check(utt, modified_np, vp.span())
        if dep_ev is None:
            continue
        evidence.append(dep_ev)
        detections.append(Detection(Label.SRC_reduced, None, vp_path, tuple(evidence)))

    # reduced object RC with a bare S and no SBAR layer
    for m in find_subtrees(tree, "NP", ("NP", "S")):
        clause = m.node.children[m.child_index + 1]
        clause_path = m.path + (m.child_index + 1,)
        if subject_position_filled(clause) and _object_missing(clause, utt):
            detections.append(Detection(
                Label.ORC_reduced, None, clause_path,
                ("rc:np_s", "reduced:zero_complementizer", "reduced:object_missing")))
    return detections


def _classify_wh_rc(utt: ParsedUtterance, modified_np: ConstituencyTree,
                    sbar: ConstituencyTree, sbar_path: tuple[int, ...],
                    wh: ConstituencyTree) -> Detection | None:
    evidence = ["rc:np_sbar", f"wh:{wh.label}"]
    wh_span = wh.span()
    dep_ev = _rc_dependency_check(utt, modified_np, sbar.span(), wh_span)
    if dep_ev is None:
        return None
    evidence.append(dep_ev)
    possessive = any(leaf.label in POSSESSIVE_WH_TAGS or leaf.text.lower() == "whose"
                     for leaf in wh.leaves() if not is_empty_category(leaf))
    if wh.label == "WHNP" and possessive:
        return Detection(Label.PRC, wh_span, sbar_path, tuple(evidence + ["rc:possessive_wh"]))
    if wh.label in ADJUNCT_WH_PHRASES:
        return Detection(Label.ARC, wh_span, sbar_path, tuple(evidence))
    site, site_ev = _argument_site(utt, lowest_clause(sbar), wh_span)
    evidence.extend(site_ev)
    label = Label.ORC if site == OBJECT else Label.SRC
    return Detection(label, wh_span, sbar_path, tuple(evidence))


def _reduced_subject_check(utt: ParsedUtterance, modified_np: ConstituencyTree,
                           vp_span: tuple[int, int] | None) -> str | None:
    """The modified noun is a subject somewhere, or heads the participial clause."""
    graph = utt.dependency
    head_noun = phrase_head(graph, modified_np.span())
    if head_noun is None:
        return None
    if graph.relation_of(head_noun) in SUBJECT_RELS:
        return "dep:noun_is_subject"
    if vp_span is not None:
        lo, hi = vp_span
        for rel in RC_MODIFIER_RELS:
            if any(lo <= d <= hi for d in dep_children(graph, head_noun, rel)):
                return "dep:noun_modified_by_clause"
    return None


def _classify_reduced_orc(utt: ParsedUtterance, sbar: ConstituencyTree,
                          sbar_path: tuple[int, ...],
                          content: list[ConstituencyTree]) -> Detection | None:
    if not content:
        return None
    first = content[0]
    evidence = ["rc:np_sbar"]
    filler = None
    if first.is_leaf and first.text.lower() in ("that", "who"):
        evidence.append("reduced:overt_complementizer")
        filler = (first.token_index, first.token_index)
        clause = next((c for c in content[1:] if c.label in ("S", "SQ")), None)
    elif first.label == "S":
        evidence.append("reduced:zero_complementizer")
        clause = first
    else:
        return None
    if clause is None:
        return None
    if subject_position_filled(clause) and _object_missing(clause, utt):
        evidence.append("reduced:object_missing")
        return Detection(Label.ORC_reduced, filler, sbar_path, tuple(evidence))
    return None


# ---------------------------------------------------------------------------
# matrix questions


def _top_level(tree: ConstituencyTree) -> list[tuple[tuple[int, ...], ConstituencyTree]]:
    if tree.label in ("TOP", "ROOT", "") and tree.children:
        return [((i,), c) for i, c in enumerate(tree.children)]
    return [((), tree)]


def _plain_wh_fragment(utt: ParsedUtterance, node: ConstituencyTree) -> tuple[int, int] | None:
    """Span of the wh material when the whole utterance is a bare wh-phrase."""
    if len(utt.tokens) > 3:
        return None
    if node.label in WH_PHRASES:
        return node.span()
    content = [c for c in node.children if not _is_punct(c)]
    if content and all(c.label in WH_PHRASES for c in content):
        spans = [c.span() for c in content if c.span() is not None]
        if spans:
            return min(s[0] for s in spans), max(s[1] for s in spans)
    return None


def _polar_question(node: ConstituencyTree) -> bool:
    if any(c.label in WH_PHRASES for c in node.children):
        return False
    first = next((leaf for leaf in node.leaves()
                  if not _is_punct(leaf) and leaf.label not in ("UH", "INTJ")),
                 None)
    return first is not None and first.label in AUX_TAGS


def detect_matrix_questions(utt: ParsedUtterance) -> list[Detection]:
    """Root SBARQ -> wh SQ questions, root-SQ polar questions, wh fragments."""
    detections = []
    graph = utt.dependency
    for path, node in _top_level(utt.constituency):
        plain_span = _plain_wh_fragment(utt, node)
        if plain_span is not None:
            detections.append(Detection(Label.PlainMQ, plain_span, path,
                                         ("mq:bare_wh_fragment",)))
            continue
        if node.label == "SBARQ":
            wh = next((c for c in node.children if c.label in WH_PHRASES), None)
            clause = next((c for c in node.children
                           if c.label in ("SQ", "S", "SINV")), None)
            if wh is not None and clause is not None:
                detections.append(_classify_wh_matrix(utt, path, node, wh, clause))
            elif wh is None and clause is not None and _polar_question(clause):
                detections.append(Detection(Label.PMQ, None, path,
                                            ("mq:sbarq_polar_sq",)))
        elif node.label == "SQ" and _polar_question(node):
            detections.append(Detection(Label.PMQ, None, path, ("mq:root_polar_sq",)))
    return detections


_MATRIX_BY_SITE = {
    SUBJECT: (Label.SMQ, Label.CC_SMQ),
    OBJECT: (Label.OMQ, Label.CC_OMQ),
    ADJUNCT: (Label.AMQ, Label.CC_AMQ),
}


def _classify_wh_matrix(utt: ParsedUtterance, path: tuple[int, ...],
                        sbarq: ConstituencyTree, wh: ConstituencyTree,
                        clause: ConstituencyTree) -> Detection:
    evidence = [f"mq:sbarq_wh_{clause.label.lower()}", f"wh:{wh.label}"]
    wh_span = wh.span()
    if wh.label in ADJUNCT_WH_PHRASES:
        site = ADJUNCT
    else:
        site, site_ev = _argument_site(utt, clause, wh_span)
        evidence.extend(site_ev)
    wh_head = phrase_head(utt.dependency, wh_span)
    plain, crossed = _MATRIX_BY_SITE[site]
    if _crosses_complement(utt, wh_head):
        evidence.append("dep:gap_in_clausal_complement")
        return Detection(crossed, wh_span, path, tuple(evidence))
    return Detection(plain, wh_span, path, tuple(evidence))


# ---------------------------------------------------------------------------
# embedded questions


def detect_embedded_questions(
        utt: ParsedUtterance,
        lexicon: EmbeddingVerbLexicon = DEFAULT_LEXICON,
        exclusions: FreeRelativeExclusions = DEFAULT_EXCLUSIONS) -> list[Detection]:
    """VP-dominated SBAR with a fronted wh-category or whether/if head.

    Kept only when the selecting verb's lemma is a question-embedding
    predicate and the clause contains no free-relative word. Matrix
    questions never match: their wh-clause sits under SBARQ, not VP.
    """
    detections = []
    for path, node in walk(utt.constituency):
        if node.label != "VP":
            continue
        verb = next((c for c in node.children
                     if c.is_leaf and c.label.startswith("VB")), None)
        for i, child in enumerate(node.children):
            if child.label != "SBAR":
                continue
            det = _classify_embedded(utt, path + (i,), child, verb, lexicon, exclusions)
            if det is not None:
                detections.append(det)
    return detections


def _selects_questions(utt: ParsedUtterance, verb: ConstituencyTree | None,
                       lexicon: EmbeddingVerbLexicon) -> str | None:
    if verb is None:
        return None
    tok = utt.token(verb.token_index)
    lemma = tok.lemma.lower() if tok.lemma else tok.text.lower()
    if lemma in lexicon:
        return f"lex:{lemma}"
    return None


def _classify_embedded(utt: ParsedUtterance, sbar_path: tuple[int, ...],
                       sbar: ConstituencyTree, verb: ConstituencyTree | None,
                       lexicon: EmbeddingVerbLexicon,
                       exclusions: FreeRelativeExclusions) -> Detection | None:
    content = [c for c in sbar.children if not _is_punct(c)]
    if not content:
        return None
    first = content[0]
    polar = first.is_leaf and first.text.lower() in ("whether", "if")
    if not polar and first.label not in WH_PHRASES:
        return None
    lex_ev = _selects_questions(utt, verb, lexicon)
    if lex_ev is None:
        return None
    span = sbar.span()
    if span is not None and any(utt.token(i).text.lower() in exclusions
                                for i in range(span[0], span[1] + 1)):
        return None
    if polar:
        filler = (first.token_index, first.token_index)
        return Detection(Label.PEQ, filler, sbar_path,
                         ("eq:vp_sbar", "eq:polar_complementizer", lex_ev))
    evidence = ["eq:vp_sbar", f"wh:{first.label}", lex_ev]
    wh_span = first.span()
    if first.label in ADJUNCT_WH_PHRASES:
        return Detection(Label.AEQ, wh_span, sbar_path, tuple(evidence))
    site, site_ev = _argument_site(utt, lowest_clause(sbar), wh_span)
    evidence.extend(site_ev)
    label = Label.OEQ if site == OBJECT else Label.SEQ
    return Detection(label, wh_span, sbar_path, tuple(evidence))


# ---------------------------------------------------------------------------


def detect_all(utt: ParsedUtterance,
               lexicon: EmbeddingVerbLexicon = DEFAULT_LEXICON,
               exclusions: FreeRelativeExclusions = DEFAULT_EXCLUSIONS) -> list[Detection]:
    """Union of the three family detectors, deduplicated and ordered.

    Order: preorder position of the clause node, then label declaration
    order. Duplicate (label, clause) pairs are dropped.
    """
    found = (detect_relative_clauses(utt)
             + detect_matrix_questions(utt)
             + detect_embedded_questions(utt, lexicon, exclusions))
    unique: dict[tuple[Label, tuple[int, ...]], Detection] = {}
    for det in found:
        unique.setdefault((det.label, det.clause_path), det)
    return sorted(unique.values(),
                  key=lambda d: (d.clause_path, LABEL_ORDER[d.label]))


def detection_record(utt: ParsedUtterance, detections: list[Detection]) -> dict:
    """JSONL-ready record for one utterance's detections."""
    return {
        "utterance_id": utt.meta.utterance_id,
        "labels": sorted({d.label.value for d in detections},
                         key=lambda v: LABEL_ORDER[Label(v)]),
        "detections": [
            {"label": d.label.value,
             "filler_span": list(d.filler_span) if d.filler_span else None,
             "clause_path": list(d.clause_path),
             "evidence": list(d.evidence)}
            for d in detections
        ],
    }
