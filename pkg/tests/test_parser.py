"""Parser tests: golden structures for the example listing, escaping,
dialect behavior, diagnostics and their source locations."""

import random

import pytest

from giftsmith.model import (
    Choice,
    ChoicesBody,
    MatchingBody,
    MatchPair,
    NumericBody,
    NumericEntry,
    NumericPoint,
    NumericRange,
    ShortAnswerBody,
    TrueFalseBody,
)
from giftsmith.parser import (
    ParseError,
    parse_answer_block,
    parse_document,
    parse_question,
    unescape_text,
)


class TestSection3Golden:
    def test_five_questions_no_diagnostics(self, section3_text):
        result = parse_document(section3_text)
        assert len(result.questions) == 5
        assert result.diagnostics == []

    def test_q1_true_false(self, section3_text):
        q = parse_document(section3_text).questions[0].question
        assert q.title == "Q1"
        assert q.stem_prefix == "1+1=2"
        assert q.body == TrueFalseBody(True)

    def test_q2_choices_with_feedback(self, section3_text):
        q = parse_document(section3_text).questions[1].question
        assert q.title == "Q2"
        assert q.stem_prefix == "What's between orange and green in the spectrum?"
        assert q.body == ChoicesBody((
            Choice("yellow", correct=True, feedback="correct!"),
            Choice("red", correct=False, feedback="wrong, it's yellow"),
            Choice("blue", correct=False, feedback="wrong, it's yellow"),
        ))

    def test_q3_missing_word(self, section3_text):
        q = parse_document(section3_text).questions[2].question
        assert q.stem_prefix == "Two plus"
        assert q.stem_suffix == "equals four."
        assert q.body == ShortAnswerBody((
            Choice("two", correct=True), Choice("2", correct=True)))

    def test_q4_matching(self, section3_text):
        q = parse_document(section3_text).questions[3].question
        assert q.body == MatchingBody((
            MatchPair("cat", "cat food"), MatchPair("dog", "dog food")))

    def test_q5_numeric_point(self, section3_text):
        q = parse_document(section3_text).questions[4].question
        assert q.title == "Q5"
        assert q.body == NumericBody((NumericEntry(NumericPoint(3, 2)),))

    def test_line_numbers(self, section3_text):
        lines = [pq.line for pq in parse_document(section3_text).questions]
        assert lines == [2, 5, 9, 12, 15]


class TestDocumentStructure:
    def test_empty_document(self):
        result = parse_document("")
        assert result.questions == [] and result.diagnostics == []

    def test_comment_only(self):
        result = parse_document("// only a comment\n")
        assert result.questions == [] and result.diagnostics == []

    def test_bom_and_crlf(self, section3_text):
        mangled = "﻿" + section3_text.replace("\n", "\r\n")
        result = parse_document(mangled)
        assert len(result.questions) == 5
        assert result.diagnostics == []
        assert result.questions[0].question.stem_prefix == "1+1=2"

    def test_category_directive(self):
        text = "$CATEGORY: C300/Chemistry\n\nq one {T}\n\n$CATEGORY: D1/Bio\n\nq two {F}\n"
        result = parse_document(text)
        assert [pq.category for pq in result.questions] == ["C300/Chemistry", "D1/Bio"]

    def test_category_without_blank_line_still_separates(self):
        text = "q one {T}\n$CATEGORY: X/Y\nq two {F}\n"
        result = parse_document(text)
        assert [pq.category for pq in result.questions] == [None, "X/Y"]

    def test_comment_inside_block_is_dropped(self):
        text = "stem starts\n// note\ncontinues {T}\n"
        result = parse_document(text)
        assert result.questions[0].question.stem_prefix == "stem starts continues"

    def test_malformed_block_does_not_abort(self):
        text = "good one {T}\n\nbad one without block\n\ngood two {F}\n"
        result = parse_document(text)
        assert len(result.questions) == 2
        assert len(result.errors) == 1
        assert result.errors[0].code == "no-answer-block"

    def test_block_permutation_permutes_output(self):
        blocks = ["::A:: first {T}", "::B:: second {F}", "::C:: third {#1..5}"]
        rng = random.Random(1)
        for _ in range(5):
            rng.shuffle(blocks)
            result = parse_document("\n\n".join(blocks))
            titles = [pq.question.title for pq in result.questions]
            assert titles == [b[2] for b in blocks]

    def test_error_line_points_inside_block(self):
        text = "first {T}\n\nsecond is broken {never closed\n\nthird {F}\n"
        result = parse_document(text)
        assert len(result.errors) == 1
        assert result.errors[0].code == "unterminated-block"
        assert result.errors[0].line == 3
        assert result.errors[0].column == 18


class TestTitles:
    def test_double_colon_title_with_spaces(self):
        q = parse_question(":: Q5:: stem {T}")
        assert q.title == "Q5"

    def test_single_colon_title_warns_and_normalizes(self):
        collected = []
        q = parse_question(":1:\nWater? {T}", collect=collected)
        assert q.title == "1"
        assert [d.code for d in collected] == ["single-colon-title"]

    def test_escaped_colon_in_title(self):
        q = parse_question("::a\\:b:: stem {T}")
        assert q.title == "a:b"

    def test_metadata_lines_skipped_with_warning(self):
        block = "Course ID C300\nQues type 3\n:1:\nWater? {T}"
        collected = []
        q = parse_question(block, collect=collected)
        assert q.title == "1"
        assert q.stem_prefix == "Water?"
        codes = {d.code for d in collected}
        assert "metadata-skipped" in codes and "single-colon-title" in codes

    def test_paper_export_shape(self):
        text = ("Course ID C300\nQues type 3\n:1:\n"
                "Water is a compound of two different elements.\nThey are:\n"
                "{\n~ Nitrogen\n= Oxygen\n~ Carbon Di-Oxide\n= Hydrogen\n"
                "# Oxygen and Hydrogen\n}\n")
        result = parse_document(text)
        assert len(result.questions) == 1
        assert result.errors == []
        q = result.questions[0].question
        assert q.stem_prefix == ("Water is a compound of two different elements. "
                                 "They are:")
        assert [c.correct for c in q.body.choices] == [False, True, False, True]
        assert q.general_feedback == "Oxygen and Hydrogen"


class TestFormatDirective:
    def test_known_directive(self):
        q = parse_question("::t:: [html] the <b>stem</b> {T}")
        assert q.text_format == "html"
        assert q.stem_prefix == "the <b>stem</b>"

    def test_unknown_directive_stays_in_stem(self):
        q = parse_question("[nope] stem {T}")
        assert q.text_format is None
        assert q.stem_prefix == "[nope] stem"

    def test_escaped_bracket_is_literal(self):
        q = parse_question("\\[html] stem {T}")
        assert q.text_format is None
        assert q.stem_prefix == "[html] stem"


class TestAnswerBlocks:
    def test_true_false_synonyms(self):
        for token, expected in [("T", True), ("TRUE", True), ("true", True),
                                ("F", False), ("FALSE", False), ("false", False)]:
            body, _ = parse_answer_block(token)
            assert body == TrueFalseBody(expected)

    def test_true_false_feedbacks(self):
        body, _ = parse_answer_block("T # shown when wrong # shown when right")
        assert body == TrueFalseBody(True, feedback_wrong="shown when wrong",
                                     feedback_right="shown when right")

    def test_q2_block(self):
        body, general = parse_answer_block(
            "=yellow # correct! ~red # wrong, it's yellow ~blue # wrong, it's yellow")
        assert general is None
        assert [c.text for c in body.choices] == ["yellow", "red", "blue"]
        assert [c.correct for c in body.choices] == [True, False, False]
        assert [c.feedback for c in body.choices] == [
            "correct!", "wrong, it's yellow", "wrong, it's yellow"]

    def test_numeric_point(self):
        body, _ = parse_answer_block("#3:2")
        assert body == NumericBody((NumericEntry(NumericPoint(3, 2)),))

    def test_numeric_range(self):
        body, _ = parse_answer_block("#1..5")
        assert body == NumericBody((NumericEntry(NumericRange(1, 5)),))

    def test_numeric_bare_value(self):
        body, _ = parse_answer_block("#42")
        assert body == NumericBody((NumericEntry(NumericPoint(42, 0)),))

    def test_numeric_multi_with_weights(self):
        body, _ = parse_answer_block("#\n= 3:2\n=%50% 6:1 # close enough")
        assert body == NumericBody((
            NumericEntry(NumericPoint(3, 2)),
            NumericEntry(NumericPoint(6, 1), weight=50.0, feedback="close enough"),
        ))

    def test_water_block_paper_general_feedback(self):
        content = ("\n~ Nitrogen\n= Oxygen\n~ Carbon Di-Oxide\n= Hydrogen\n"
                   "# Oxygen and Hydrogen\n")
        body, general = parse_answer_block(content, "paper")
        assert [c.correct for c in body.choices] == [False, True, False, True]
        assert all(c.feedback is None for c in body.choices)
        assert general == "Oxygen and Hydrogen"

    def test_same_block_moodle_attaches_to_last_choice(self):
        content = ("\n~ Nitrogen\n= Oxygen\n~ Carbon Di-Oxide\n= Hydrogen\n"
                   "# Oxygen and Hydrogen\n")
        body, general = parse_answer_block(content, "moodle")
        assert general is None
        assert body.choices[-1].feedback == "Oxygen and Hydrogen"

    def test_four_hash_general_feedback_both_dialects(self):
        for dialect in ("paper", "moodle"):
            body, general = parse_answer_block("=a ~b ####overall", dialect)
            assert general == "overall"
            assert body.choices[-1].feedback is None

    def test_weights(self):
        body, _ = parse_answer_block("~%50% a ~%-50% b ~%33.333% c", "paper")
        assert [c.weight for c in body.choices] == [50.0, -50.0, 33.333]

    def test_percent_text_is_not_a_weight(self):
        body, _ = parse_answer_block("= %50% off ~ full price", "paper")
        assert body.choices[0].weight is None
        assert body.choices[0].text == "%50% off"

    def test_moodle_canonical_weighted_collapses(self):
        content = "~%-50% Nitrogen ~%50% Oxygen ~%-50% Carbon ~%50% Hydrogen"
        body, _ = parse_answer_block(content, "moodle")
        assert [c.correct for c in body.choices] == [False, True, False, True]
        assert all(c.weight is None for c in body.choices)

    def test_paper_keeps_weights_verbatim(self):
        content = "~%-50% Nitrogen ~%50% Oxygen ~%-50% Carbon ~%50% Hydrogen"
        body, _ = parse_answer_block(content, "paper")
        assert all(not c.correct for c in body.choices)
        assert [c.weight for c in body.choices] == [-50.0, 50.0, -50.0, 50.0]

    def test_non_canonical_weights_stay_explicit_under_moodle(self):
        body, _ = parse_answer_block("~%75% a ~%25% b", "moodle")
        assert [c.weight for c in body.choices] == [75.0, 25.0]

    def test_short_answer_all_equals(self):
        body, _ = parse_answer_block("=two =2")
        assert body == ShortAnswerBody((
            Choice("two", correct=True), Choice("2", correct=True)))

    def test_matching_pairs(self):
        body, _ = parse_answer_block("=cat -> cat food =dog -> dog food")
        assert body == MatchingBody((
            MatchPair("cat", "cat food"), MatchPair("dog", "dog food")))


class TestEscaping:
    @pytest.mark.parametrize("raw,expected", [
        ("1+1\\=2", "1+1=2"),
        ("plain text", "plain text"),
        ("a\\{b\\}", "a{b}"),
        ("line\\nbreak", "line\nbreak"),
        ("tilde\\~ hash\\# colon\\:", "tilde~ hash# colon:"),
        ("double\\\\slash", "double\\slash"),
        ("\\[bracket", "[bracket"),
    ])
    def test_unescape_examples(self, raw, expected):
        assert unescape_text(raw) == expected

    def test_stray_escape_preserved_with_warning(self):
        collected = []
        q = parse_question("stem {=an\\swer}", collect=collected)
        assert q.body.answers[0].text == "an\\swer"
        assert any(d.code == "stray-escape" for d in collected)

    def test_escaped_markers_in_choice_text(self):
        body, _ = parse_answer_block("=a\\=b ~c\\~d")
        assert [c.text for c in body.choices] == ["a=b", "c~d"]

    def test_escaped_hash_is_not_feedback(self):
        body, _ = parse_answer_block("=value \\# literal")
        assert body.answers[0].text == "value # literal"
        assert body.answers[0].feedback is None

    def test_escaped_arrow_is_not_matching(self):
        body, _ = parse_answer_block("=uses \\-\\> arrow ~other")
        assert isinstance(body, ChoicesBody)


class TestParseFailures:
    @pytest.mark.parametrize("block,code", [
        ("no block here", "no-answer-block"),
        ("stem {never closed", "unterminated-block"),
        ("stem {}", "empty-block"),
        ("stem {   }", "empty-block"),
        ("stem {=cat -> food =dog}", "mixed-matching"),
        ("stem {= ~b}", "dangling-marker"),
        ("stem {=a} tail {T}", "multiple-blocks"),
        ("stem {{T}}", "nested-brace"),
        ("stem {=cat -> food # fb =dog -> kibble}", "matching-feedback"),
        ("stem {#notanumber}", "bad-numeric"),
        ("stem {#5..1}", "bad-numeric"),
        ("stem {#3:-1}", "bad-numeric"),
        ("stem {T # a # b # c}", "too-many-feedback"),
        ("stem {junk no marker}", "marker-expected"),
        ("{T}", "empty-stem"),
        ("stem {T} suffix", "bad-question"),
    ])
    def test_error_codes(self, block, code):
        with pytest.raises(ParseError) as exc_info:
            parse_question(block)
        assert exc_info.value.code == code

    def test_unterminated_block_reports_opening_brace(self):
        with pytest.raises(ParseError) as exc_info:
            parse_question("ok stem {#3:2")
        assert exc_info.value.line == 1
        assert exc_info.value.column == 9
