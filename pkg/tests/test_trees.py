import json
import random

import pytest

from fillergap.trees import (CorpusError, CorpusReport, ParseError, dep_children,
                             find_subtrees, node_at, parse_bracketed, read_corpus,
                             serialize_bracketed, strip_label, walk)

from conftest import random_dependency_graph, random_tree

FIG10 = ("(ROOT (SBARQ (WHNP-1-<INANIM>-<THEME-V1> (WP what)) "
         "(SQ (VP (MD should) (NP-<ANIM>-<AGENT-V1> (DT the) (NN birdie)) "
         "(VP (VB-<V1> say) (NP (-NONE-ABAR-WH- *T*-1))))) (. ?)))")


class TestStripLabel:
    def test_coindex_and_decorations(self):
        assert strip_label("WHNP-1-<INANIM>-<THEME-V1>") == "WHNP"
        assert strip_label("NP-<ANIM>") == "NP"
        assert strip_label("VB-<V1>") == "VB"
        assert strip_label("SQ=2") == "SQ"

    def test_leading_hyphen_kept_whole(self):
        assert strip_label("-NONE-ABAR-WH-") == "-NONE-ABAR-WH-"
        assert strip_label("-LRB-") == "-LRB-"

    def test_plain_labels_untouched(self):
        assert strip_label("NP") == "NP"
        assert strip_label("PRP$") == "PRP$"
        assert strip_label(".") == "."


class TestParseBracketed:
    def test_minimal_tree(self):
        tree = parse_bracketed("(TOP (S (NP (PRP I)) (VP (VBP love) (NP (NN syntax)))))")
        leaves = list(tree.leaves())
        assert tree.label == "TOP"
        assert [l.text for l in leaves] == ["I", "love", "syntax"]
        assert [l.token_index for l in leaves] == [1, 2, 3]

    def test_raw_labels_preserved(self):
        tree = parse_bracketed(FIG10)
        raws = {node.raw_label for _, node in walk(tree)}
        assert "WHNP-1-<INANIM>-<THEME-V1>" in raws
        filler = next(node for _, node in walk(tree)
                      if node.raw_label == "WHNP-1-<INANIM>-<THEME-V1>")
        assert filler.label == "WHNP"
        trace = next(node for _, node in walk(tree)
                     if node.raw_label == "-NONE-ABAR-WH-")
        assert trace.label == "-NONE-ABAR-WH-"
        assert trace.text == "*T*-1"

    def test_unterminated_bracket_offset(self):
        with pytest.raises(ParseError) as err:
            parse_bracketed("(S (NP")
        assert err.value.offset == 3

    def test_unbalanced_close(self):
        with pytest.raises(ParseError) as err:
            parse_bracketed("(NN dog))")
        assert err.value.offset == 8

    def test_empty_node(self):
        with pytest.raises(ParseError, match="empty node"):
            parse_bracketed("(S () (NN dog))")

    def test_leaf_with_no_token(self):
        with pytest.raises(ParseError, match="leaf with no token"):
            parse_bracketed("(S (NP))")

    def test_multiple_top_nodes(self):
        with pytest.raises(ParseError, match="multiple top-level"):
            parse_bracketed("(NN dog) (NN cat)")

    def test_mixed_tokens_and_children(self):
        with pytest.raises(ParseError, match="mixes"):
            parse_bracketed("(NP dog (NN cat))")

    def test_empty_root_label(self):
        tree = parse_bracketed("( (S (NN dog)))")
        assert tree.raw_label == ""
        assert tree.children[0].label == "S"


class TestSerializeBracketed:
    def test_single_leaf(self):
        assert serialize_bracketed(parse_bracketed("(NN dog)")) == "(NN dog)"

    def test_fig10_round_trip(self):
        tree = parse_bracketed(FIG10)
        assert serialize_bracketed(tree) == FIG10
        assert parse_bracketed(serialize_bracketed(tree)) == tree

    def test_whitespace_normalization(self):
        sloppy = "(S\n  (NP   (NN dog))\n  (VP (VBD ran)))"
        tree = parse_bracketed(sloppy)
        assert serialize_bracketed(tree) == "(S (NP (NN dog)) (VP (VBD ran)))"

    def test_random_round_trip(self):
        rng = random.Random(20240811)
        for _ in range(300):
            tree = random_tree(rng)
            assert parse_bracketed(serialize_bracketed(tree)) == tree


class TestFindSubtrees:
    FIG1 = ("(TOP (S (NP (PRP I)) (VP (VBP love) (NP (NP (DT the) (NN professor)) "
            "(SBAR (WHNP (WP who)) (S (VP (VBD taught) (NP (NN syntax))))))) (. .)))")
    FIG3R = ("(TOP (SBARQ (WHNP (WDT Which) (NN book)) (SQ (VBP do) (NP (PRP I)) "
             "(VP (VB remember) (SBAR (S (NP (NNP Mary)) (VP (VBD wrote))))) (. ?))))")

    def test_np_np_sbar_fig1(self):
        matches = find_subtrees(parse_bracketed(self.FIG1), "NP", ("NP", "SBAR"))
        assert len(matches) == 1
        node = matches[0].node
        assert [c.label for c in node.children] == ["NP", "SBAR"]
        assert " ".join(l.text for l in node.children[0].leaves()) == "the professor"

    def test_sbarq_whnp_sq_fig3(self):
        matches = find_subtrees(parse_bracketed(self.FIG3R), "SBARQ", ("WHNP", "SQ"))
        assert len(matches) == 1

    def test_unknown_tag(self):
        assert find_subtrees(parse_bracketed(self.FIG1), "ZZZ", ("NP",)) == []

    def test_matches_on_stripped_labels(self):
        tree = parse_bracketed("(NP-<X> (NP-1 (NN dog)) (SBAR-2 (IN that) (S (NN x))))")
        assert len(find_subtrees(tree, "NP", ("NP", "SBAR"))) == 1

    def test_nested_and_overlapping_all_returned(self):
        tree = parse_bracketed(
            "(NP (NP (NP (NN a)) (SBAR (IN x) (S (NN b)))) (SBAR (IN y) (S (NN c))))")
        matches = find_subtrees(tree, "NP", ("NP", "SBAR"))
        assert len(matches) == 2

    def test_preorder_and_naive_recheck(self):
        rng = random.Random(99)
        for _ in range(100):
            tree = random_tree(rng)
            matches = find_subtrees(tree, "NP", ("NP",))
            paths = [m.path for m in matches]
            assert paths == sorted(paths)
            for m in matches:
                node = node_at(tree, m.path)
                assert node.label == "NP"
                assert node.children[m.child_index].label == "NP"


class TestDepChildren:
    def test_fig1_relations(self, gold_corpus):
        utt = gold_corpus["fig_src_love"]
        # "taught"(6) has no relcl dependents; "professor"(4) -> relcl -> [6]
        assert dep_children(utt.dependency, 6, "relcl") == []
        assert dep_children(utt.dependency, 4, "relcl") == [6]

    def test_unknown_relation(self, gold_corpus):
        utt = gold_corpus["fig_src_love"]
        assert dep_children(utt.dependency, 4, "nonexistent") == []

    def test_head_out_of_range(self, gold_corpus):
        utt = gold_corpus["fig_src_love"]
        with pytest.raises(ValueError):
            dep_children(utt.dependency, 0)
        with pytest.raises(ValueError):
            dep_children(utt.dependency, 99)

    def test_children_partition_tokens(self):
        rng = random.Random(7)
        for _ in range(50):
            n = rng.randint(1, 40)
            graph = random_dependency_graph(rng, n)
            graph.validate()
            seen = []
            for head in range(1, n + 1):
                seen.extend(dep_children(graph, head))
            assert sorted(seen + [graph.root]) == list(range(1, n + 1))


class TestReadCorpus:
    def _write(self, tmp_path, lines):
        path = tmp_path / "corpus.jsonl"
        path.write_text("\n".join(lines) + "\n")
        return path

    def _record(self, **overrides):
        record = {
            "utterance_id": "u1", "corpus_id": "c", "transcript_id": "t",
            "speaker_group": "adult", "child_age_months": 30,
            "tokens": [{"i": 1, "text": "dogs", "lemma": "dog", "pos": "NNS"},
                       {"i": 2, "text": "run", "lemma": "run", "pos": "VBP"}],
            "deps": [{"d": 1, "h": 2, "rel": "nsubj"}, {"d": 2, "h": 0, "rel": "root"}],
            "tree": "(S (NP (NNS dogs)) (VP (VBP run)))",
        }
        record.update(overrides)
        return record

    def test_two_records(self, tmp_path):
        path = self._write(tmp_path, [json.dumps(self._record()),
                                      json.dumps(self._record(utterance_id="u2"))])
        utts = list(read_corpus(path))
        assert [u.meta.utterance_id for u in utts] == ["u1", "u2"]

    def test_leaf_token_mismatch_is_line_numbered(self, tmp_path):
        bad = self._record(tree="(S (NP (DT the) (NNS dogs)) (VP (VBP run)))")
        path = self._write(tmp_path, [json.dumps(self._record()), json.dumps(bad)])
        with pytest.raises(CorpusError) as err:
            list(read_corpus(path, strict=True))
        assert err.value.line_no == 2
        assert "leaves" in str(err.value)

    def test_missing_age_accepted(self, tmp_path):
        record = self._record()
        del record["child_age_months"]
        path = self._write(tmp_path, [json.dumps(record)])
        (utt,) = list(read_corpus(path, strict=True))
        assert utt.meta.child_age_months is None

    def test_lenient_skips_and_reports(self, tmp_path):
        bad = self._record(utterance_id="u2", speaker_group="alien")
        path = self._write(tmp_path, [json.dumps(self._record()), json.dumps(bad),
                                      "not json"])
        report = CorpusReport()
        utts = list(read_corpus(path, report=report))
        assert len(utts) == 1
        assert report.total == 3 and report.accepted == 1 and report.skipped == 2
        assert [line for line, _ in report.errors] == [2, 3]

    def test_duplicate_id_rejected(self, tmp_path):
        path = self._write(tmp_path, [json.dumps(self._record()),
                                      json.dumps(self._record())])
        report = CorpusReport()
        assert len(list(read_corpus(path, report=report))) == 1
        assert report.skipped == 1

    def test_unknown_fields_ignored(self, tmp_path):
        path = self._write(tmp_path, [json.dumps(self._record(extra_field=42))])
        assert len(list(read_corpus(path, strict=True))) == 1

    def test_yield_matches_tokens(self, gold_corpus):
        for utt in gold_corpus.values():
            assert [l.text for l in utt.constituency.leaves()] == \
                [t.text for t in utt.tokens]

    def test_cyclic_deps_rejected(self, tmp_path):
        bad = self._record(deps=[{"d": 1, "h": 2, "rel": "nsubj"},
                                 {"d": 2, "h": 1, "rel": "root"}])
        path = self._write(tmp_path, [json.dumps(bad)])
        with pytest.raises(CorpusError, match="root"):
            list(read_corpus(path, strict=True))
