"""Writer tests: escape tables, canonical layout, dialect rewrites,
document assembly."""

import random

import pytest

from giftsmith.model import (
    Choice,
    ChoicesBody,
    MatchingBody,
    MatchPair,
    NumericBody,
    NumericEntry,
    NumericRange,
    Question,
    ShortAnswerBody,
    TrueFalseBody,
)
from giftsmith.parser import parse_document, parse_question, unescape_text
from giftsmith.writer import (
    SerializeError,
    escape_text,
    serialize_document,
    serialize_question,
)


def water_question():
    return Question(
        stem_prefix="Water is a compound of two different elements. They are:",
        body=ChoicesBody((
            Choice("Nitrogen"),
            Choice("Oxygen", correct=True),
            Choice("Carbon Di-Oxide"),
            Choice("Hydrogen", correct=True),
        )),
        general_feedback="Oxygen and Hydrogen",
    )


class TestEscapeText:
    @pytest.mark.parametrize("text,context,expected", [
        ("a=b", "answer", "a\\=b"),
        ("plain", "stem", "plain"),
        ("x#y", "feedback", "x\\#y"),
        ("a{b}c:d", "stem", "a\\{b\\}c\\:d"),
        ("a=b~c", "stem", "a=b~c"),
        ("[lead", "stem", "\\[lead"),
        ("mid[dle", "stem", "mid[dle"),
        ("back\\slash", "answer", "back\\\\slash"),
        ("two\nlines", "feedback", "two\\nlines"),
    ])
    def test_examples(self, text, context, expected):
        assert escape_text(text, context) == expected

    def test_unknown_context_rejected(self):
        with pytest.raises(ValueError):
            escape_text("x", "title")

    @pytest.mark.parametrize("context", ["answer", "feedback"])
    def test_mutual_inverse_property(self, context):
        rng = random.Random(13)
        alphabet = "ab =~#{}:\\n\n[%$/-.><"
        for _ in range(500):
            s = "".join(rng.choice(alphabet) for _ in range(rng.randint(0, 20)))
            assert unescape_text(escape_text(s, context)) == s


class TestSerializeQuestion:
    def test_q1_exact(self):
        q = Question("1+1=2", TrueFalseBody(True), title="Q1")
        assert serialize_question(q) == "::Q1:: 1+1=2 {T}"

    def test_numeric_range_untitled(self):
        q = Question("What is a number from 1 to 5?",
                      NumericBody((NumericEntry(NumericRange(1, 5)),)))
        assert serialize_question(q) == "What is a number from 1 to 5? {#1..5}"

    def test_water_paper_block_lines(self):
        text = serialize_question(water_question(), "paper")
        lines = text.split("\n")
        assert lines[1:6] == ["~ Nitrogen", "= Oxygen", "~ Carbon Di-Oxide",
                              "= Hydrogen", "# Oxygen and Hydrogen"]
        assert lines[-1] == "}"

    def test_water_moodle_weights(self):
        text = serialize_question(water_question(), "moodle")
        assert "~%50% Oxygen" in text
        assert "~%50% Hydrogen" in text
        assert "~%-50% Nitrogen" in text
        assert "~%-50% Carbon Di-Oxide" in text
        assert "####Oxygen and Hydrogen" in text
        assert "=" not in text.split("\n", 1)[1]

    def test_moodle_fraction_for_three_correct(self):
        q = Question("pick", ChoicesBody((
            Choice("a", correct=True), Choice("b", correct=True),
            Choice("c", correct=True), Choice("d"))))
        text = serialize_question(q, "moodle")
        assert text.count("~%33.333%") == 3
        assert text.count("~%-33.333%") == 1

    def test_explicit_weights_not_rewritten_under_moodle(self):
        q = Question("pick", ChoicesBody((
            Choice("a", correct=True, weight=75.0), Choice("b", correct=True),
            Choice("c"))))
        text = serialize_question(q, "moodle")
        assert "=%75% a" in text and "= b" in text and "~ c" in text

    def test_missing_word_layout(self):
        q = Question("Two plus", ShortAnswerBody((
            Choice("two", correct=True), Choice("2", correct=True))),
            stem_suffix="equals four.", title="Q3")
        assert serialize_question(q) == "::Q3:: Two plus {\n= two\n= 2\n} equals four."

    def test_matching_layout(self):
        q = Question("Which animal eats which food?", MatchingBody((
            MatchPair("cat", "cat food"), MatchPair("dog", "dog food"))), title="Q4")
        assert serialize_question(q) == (
            "::Q4:: Which animal eats which food? {\n"
            "= cat -> cat food\n= dog -> dog food\n}")

    def test_tf_feedback_layouts(self):
        q = Question("s", TrueFalseBody(False, feedback_wrong="w", feedback_right="r"))
        assert serialize_question(q) == "s {F # w # r}"
        q = Question("s", TrueFalseBody(True, feedback_wrong="w"))
        assert serialize_question(q) == "s {T # w}"

    def test_general_feedback_placement(self):
        q = Question("s", TrueFalseBody(True), general_feedback="overall")
        assert serialize_question(q, "paper") == "s {T\n# overall}"
        assert serialize_question(q, "moodle") == "s {T ####overall}"

    def test_stem_colon_escaped(self):
        q = Question("They are:", TrueFalseBody(True))
        assert serialize_question(q) == "They are\\: {T}"

    def test_refuses_invalid_question(self):
        q = Question("pick", ChoicesBody((Choice("a"), Choice("b"))))
        with pytest.raises(SerializeError) as exc_info:
            serialize_question(q)
        assert [d.code for d in exc_info.value.diagnostics] == ["no-correct-answer"]

    def test_wrap_width_preserves_ast(self):
        q = Question("a long stem " + "word " * 30 + "end", TrueFalseBody(True))
        wrapped = serialize_question(q, wrap_width=30)
        assert max(len(line) for line in wrapped.split("\n")) <= 40
        assert parse_question(wrapped) == q


class TestSerializeDocument:
    def test_empty(self):
        assert serialize_document([]) == ""

    def test_single_question_trailing_newline(self):
        q = Question("stem", TrueFalseBody(True))
        assert serialize_document([q]) == serialize_question(q) + "\n"

    def test_two_blocks_blank_line_separated(self):
        qs = [Question("one", TrueFalseBody(True)),
              Question("two", TrueFalseBody(False))]
        text = serialize_document(qs)
        assert text == "one {T}\n\ntwo {F}\n"
        assert len(parse_document(text).questions) == 2

    def test_category_directives_on_change(self):
        qs = [
            (Question("one", TrueFalseBody(True)), "C300/Chem"),
            (Question("two", TrueFalseBody(False)), "C300/Chem"),
            (Question("three", TrueFalseBody(True)), "D1/Bio"),
        ]
        text = serialize_document(qs)
        assert text.count("$CATEGORY:") == 2
        parsed = parse_document(text)
        assert [pq.category for pq in parsed.questions] == [
            "C300/Chem", "C300/Chem", "D1/Bio"]

    def test_error_reports_question_index(self):
        qs = [Question("ok", TrueFalseBody(True)),
              Question("bad", ChoicesBody((Choice("a"),)))]
        with pytest.raises(SerializeError) as exc_info:
            serialize_document(qs)
        assert exc_info.value.index == 1
