import pytest

from fillergap.minpairs import (PairTemplate, ScoreJoinError, TemplateError,
                                emit_scoring_requests, expand_templates,
                                load_lexicon, load_templates, parse_request_id,
                                score_accuracy)

TEMPLATES_PATH = "src/fillergap/data/minpair_templates.json"
LEXICON_PATH = "src/fillergap/data/minpair_lexicon.json"

# Slot bindings that reproduce the five published example paradigms.
PRINTED_BINDINGS = {
    "mq_object_will": {"subject_pronoun": ["you"], "verb_base_transitive": ["build"],
                       "temporal_adjunct": ["today"], "object_pronoun": ["it"]},
    "mq_subject_will": {"verb_base_animate": ["chase"], "animate_noun": ["doctor"],
                        "filler_pronoun": ["it"]},
    "eq_object_knew": {"subject_pronoun": ["you"], "verb_past_transitive": ["built"],
                       "temporal_adjunct": ["today"], "object_pronoun": ["it"]},
    "eq_subject_knew": {"verb_past_animate": ["chased"], "animate_noun": ["doctor"],
                        "plural_pronoun": ["they"]},
    "rc_object_knew": {"concrete_noun": ["cake"], "subject_pronoun": ["you"],
                       "verb_past_transitive": ["made"], "object_pronoun": ["it"]},
}

PRINTED_PARADIGMS = {
    "mq_object_will": [(("What will you build", "today"), ("You will build", "today")),
                       (("You will build", "it"), ("What will you build", "it"))],
    "mq_subject_will": [(("Who will", "chase the doctor"), ("will", "chase the doctor")),
                        (("It will", "chase the doctor"),
                         ("Who will it", "chase the doctor"))],
    "eq_object_knew": [(("I knew what you built", "today"),
                        ("I knew that you built", "today")),
                       (("I knew that you built", "it"),
                        ("I knew what you built", "it"))],
    "eq_subject_knew": [(("I knew who", "chased the doctor"),
                         ("I knew that", "chased the doctor")),
                        (("I knew that they", "chased the doctor"),
                         ("I knew who they", "chased the doctor"))],
    "rc_object_knew": [(("I knew the cake that", "you made"),
                        ("I knew that", "you made")),
                       (("I knew that", "you made it"),
                        ("I knew the cake that", "you made it"))],
}


@pytest.fixture(scope="module")
def templates():
    return load_templates(TEMPLATES_PATH)


@pytest.fixture(scope="module")
def lexicon():
    return load_lexicon(LEXICON_PATH)


@pytest.fixture(scope="module")
def all_items(templates, lexicon):
    return expand_templates(templates, lexicon, seed=0)


class TestExpansion:
    @pytest.mark.parametrize("template_id", sorted(PRINTED_BINDINGS))
    def test_printed_paradigms_byte_exact(self, templates, template_id):
        template = next(t for t in templates if t.template_id == template_id)
        (item,) = expand_templates([template], PRINTED_BINDINGS[template_id], seed=0)
        got = [(p.grammatical, p.ungrammatical) for p in item.pairs]
        assert got == PRINTED_PARADIGMS[template_id]

    def test_one_word_per_slot_gives_one_item(self, templates):
        for template in templates:
            items = expand_templates([template],
                                     PRINTED_BINDINGS[template.template_id], seed=0)
            assert len(items) == 1

    def test_cartesian_expansion_size(self):
        template = PairTemplate(
            template_id="toy", construction="matrixQ", site="object",
            skeletons={"gap_grammatical": "What will {subject} {verb} | now",
                       "gap_ungrammatical": "{Subject} will {verb} | now",
                       "filled_grammatical": "{Subject} will {verb} | it",
                       "filled_ungrammatical": "What will {subject} {verb} | it"},
            slots={"subject": "subj", "verb": "verb"})
        items = expand_templates([template],
                                 {"subj": ["you", "they"],
                                  "verb": ["build", "make", "draw"]}, seed=0)
        assert len(items) == 6
        assert len({i.item_id for i in items}) == 6
        assert len({i.bindings for i in items}) == 6

    def test_limit_sampling_is_seeded(self, templates, lexicon):
        a = expand_templates(templates, lexicon, limit=7, seed=5)
        b = expand_templates(templates, lexicon, limit=7, seed=5)
        assert [i.item_id for i in a] == [i.item_id for i in b]
        c = expand_templates(templates, lexicon, limit=7, seed=6)
        assert [i.item_id for i in c] != [i.item_id for i in a]
        # ids are stable positions in the full enumeration
        full_ids = {i.item_id for i in expand_templates(templates, lexicon, seed=0)}
        assert {i.item_id for i in a} <= full_ids

    def test_unknown_slot_class_names_the_slot(self, templates):
        with pytest.raises(TemplateError, match="subject"):
            expand_templates([t for t in templates
                              if t.template_id == "mq_object_will"],
                             {"verb_base_transitive": ["build"],
                              "temporal_adjunct": ["today"],
                              "object_pronoun": ["it"]})

    def test_subject_rc_templates_rejected(self):
        with pytest.raises(TemplateError, match="demonstrative"):
            PairTemplate(template_id="rc_subj", construction="RC", site="subject",
                         skeletons={k: "a | b" for k in
                                    ("gap_grammatical", "gap_ungrammatical",
                                     "filled_grammatical", "filled_ungrammatical")},
                         slots={})

    def test_continuations_identical_contexts_differ(self, all_items):
        assert all_items
        for item in all_items:
            for pair in item.pairs:
                assert pair.grammatical[1] == pair.ungrammatical[1]
                assert pair.grammatical[0] != pair.ungrammatical[0]

    def test_distinct_bindings_distinct_items(self, all_items):
        assert len({i.item_id for i in all_items}) == len(all_items)
        assert len({(i.template_id, i.bindings) for i in all_items}) == len(all_items)


class TestScoringRequests:
    def test_one_item_four_requests(self, templates):
        (item,) = expand_templates(
            [templates[0]], PRINTED_BINDINGS[templates[0].template_id], seed=0)
        requests = emit_scoring_requests([item])
        assert len(requests) == 4
        assert len({r["request_id"] for r in requests}) == 4

    def test_zero_items(self):
        assert emit_scoring_requests([]) == []

    def test_request_ids_round_trip(self, all_items):
        requests = emit_scoring_requests(all_items)
        ids = {i.item_id for i in all_items}
        for request in requests:
            item_id, pair_index, side = parse_request_id(request["request_id"])
            assert item_id in ids
            assert pair_index in (0, 1)
            assert side in ("gram", "ungram")


def oracle_scores(items, margin=1.0):
    scores = {}
    for request in emit_scoring_requests(items):
        _, _, side = parse_request_id(request["request_id"])
        scores[request["request_id"]] = -1.0 if side == "gram" else -1.0 - margin
    return scores


class TestScoreAccuracy:
    def test_oracle_scorer_is_perfect(self, all_items):
        report = score_accuracy(all_items, oracle_scores(all_items))
        assert report.overall_accuracy == 1.0
        for _, _, n_pairs, accuracy in report.rows:
            assert accuracy == 1.0
            assert n_pairs > 0

    def test_constant_scorer_is_zero(self, all_items):
        scores = {r["request_id"]: -2.5 for r in emit_scoring_requests(all_items)}
        report = score_accuracy(all_items, scores)
        assert report.overall_accuracy == 0.0

    def test_three_of_four(self, templates, lexicon):
        items = expand_templates(
            [t for t in templates if t.template_id == "mq_object_will"],
            {"subject_pronoun": ["you", "they"], "verb_base_transitive": ["build"],
             "temporal_adjunct": ["today"], "object_pronoun": ["it"]}, seed=0)
        assert len(items) == 2  # 4 pairs total
        scores = oracle_scores(items)
        flipped = [r for r in emit_scoring_requests(items[:1])][:2]
        # invert the first pair: gram low, ungram high
        gram_id = next(r["request_id"] for r in flipped
                       if r["request_id"].endswith("#gram"))
        ungram_id = next(r["request_id"] for r in flipped
                         if r["request_id"].endswith("#ungram"))
        scores[gram_id] = -9.0
        scores[ungram_id] = -0.5
        report = score_accuracy(items, scores)
        assert report.overall_pairs == 4
        assert report.overall_accuracy == pytest.approx(0.75)

    def test_tie_counts_as_incorrect(self, templates):
        (item,) = expand_templates(
            [templates[0]], PRINTED_BINDINGS[templates[0].template_id], seed=0)
        scores = oracle_scores([item])
        requests = emit_scoring_requests([item])
        scores[requests[0]["request_id"]] = -3.0
        scores[requests[1]["request_id"]] = -3.0
        report = score_accuracy([item], scores)
        assert report.overall_accuracy == pytest.approx(0.5)

    def test_unmatched_request_ids_error(self, templates):
        (item,) = expand_templates(
            [templates[0]], PRINTED_BINDINGS[templates[0].template_id], seed=0)
        scores = oracle_scores([item])
        scores["bogus#0#gram"] = -1.0
        with pytest.raises(ScoreJoinError, match="bogus"):
            score_accuracy([item], scores)

    def test_missing_side_reported(self, templates):
        (item,) = expand_templates(
            [templates[0]], PRINTED_BINDINGS[templates[0].template_id], seed=0)
        scores = oracle_scores([item])
        del scores[emit_scoring_requests([item])[0]["request_id"]]
        report = score_accuracy([item], scores)
        assert report.missing == [(item.item_id, 0)]
        assert report.overall_pairs == 1

    def test_non_finite_scores_rejected(self, templates):
        (item,) = expand_templates(
            [templates[0]], PRINTED_BINDINGS[templates[0].template_id], seed=0)
        scores = oracle_scores([item])
        scores[next(iter(scores))] = float("nan")
        with pytest.raises(ScoreJoinError, match="non-finite"):
            score_accuracy([item], scores)
