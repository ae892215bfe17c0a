"""Canonical GIFT serialization.

Produces one fixed layout so that serializing, reparsing and serializing
again is byte-identical: multi-entry answer blocks put one entry per
line, true/false and single numeric answers stay inline, and markers are
always followed by a single space. Parsing the output reconstructs the
question value exactly.
"""

from __future__ import annotations

import textwrap

from .model import (
    Body,
    Choice,
    Diagnostic,
    ERROR,
    GiftError,
    MatchingBody,
    NumericBody,
    NumericRange,
    Question,
    ShortAnswerBody,
    TrueFalseBody,
    nearest_moodle_fraction,
    validate,
)

_CONTEXTS = ("stem", "answer", "feedback")
_STRUCTURAL = "\\~=#{}:"


class SerializeError(GiftError):
    """Raised when a question fails validation and cannot be serialized."""

    def __init__(self, diagnostics: list[Diagnostic], index: int | None = None):
        self.diagnostics = list(diagnostics)
        self.index = index
        at = "" if index is None else f"question {index}: "
        detail = "; ".join(d.message for d in self.diagnostics) or "invalid question"
        super().__init__(at + detail)


def escape_text(s: str, context: str = "answer") -> str:
    """Escape structural characters for the given position in GIFT text.

    Answer and feedback text escape all of ``~ = # { } : \\`` (feedback
    additionally encodes newlines as ``\\n``); stems only need ``{ } :``
    and a leading ``[`` escaped, since the other markers are literal
    outside answer blocks.
    """
    if context not in _CONTEXTS:
        raise ValueError(f"unknown escape context {context!r}")
    out = []
    if context == "stem":
        for i, ch in enumerate(s):
            if ch in "{}:" or (ch == "[" and i == 0):
                out.append("\\")
            out.append(ch)
        return "".join(out)
    for ch in s:
        if ch in _STRUCTURAL:
            out.append("\\" + ch)
        elif ch == "\n" and context == "feedback":
            out.append("\\n")
        else:
            out.append(ch)
    return "".join(out)


def _num(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _spec_str(spec) -> str:
    if isinstance(spec, NumericRange):
        return f"{_num(spec.min)}..{_num(spec.max)}"
    if spec.tolerance == 0:
        return _num(spec.value)
    return f"{_num(spec.value)}:{_num(spec.tolerance)}"


def _entry(marker: str, weight, text: str, feedback) -> str:
    line = marker
    if weight is not None:
        line += f"%{_num(weight)}%"
    line += " " + escape_text(text, "answer")
    if feedback:
        line += " # " + escape_text(feedback, "feedback")
    return line


def _moodle_weighted(choices: tuple[Choice, ...]) -> list[Choice]:
    """Rewrite plain correct flags to the weighted form strict consumers
    need: every entry wrong-marked, correct ones at the canonical
    fraction of 100 and wrong ones at its negation."""
    ncorrect = sum(1 for c in choices if c.correct)
    fraction = nearest_moodle_fraction(100.0 / ncorrect)
    return [Choice(c.text, False, fraction if c.correct else -fraction, c.feedback)
            for c in choices]


def _render_body(body: Body, dialect: str) -> tuple[str | None, str, list[str]]:
    """Render to (inline, opener, lines); inline is set for one-line
    blocks, otherwise opener extends ``{`` and lines go one per line."""
    if isinstance(body, TrueFalseBody):
        inline = "T" if body.answer else "F"
        if body.feedback_wrong is not None or body.feedback_right is not None:
            inline += " # " + escape_text(body.feedback_wrong or "", "feedback")
        if body.feedback_right is not None:
            inline += " # " + escape_text(body.feedback_right, "feedback")
        return inline, "", []

    if isinstance(body, NumericBody):
        entries = body.entries
        if len(entries) == 1 and entries[0].weight is None:
            entry = entries[0]
            inline = "#" + _spec_str(entry.spec)
            if entry.feedback:
                inline += " # " + escape_text(entry.feedback, "feedback")
            return inline, "", []
        lines = []
        for entry in entries:
            line = "="
            if entry.weight is not None:
                line += f"%{_num(entry.weight)}%"
            line += " " + _spec_str(entry.spec)
            if entry.feedback:
                line += " # " + escape_text(entry.feedback, "feedback")
            lines.append(line)
        return None, "#", lines

    if isinstance(body, MatchingBody):
        lines = [f"= {escape_text(p.left, 'answer')} -> {escape_text(p.right, 'answer')}"
                 for p in body.pairs]
        return None, "", lines

    if isinstance(body, ShortAnswerBody):
        return None, "", [_entry("=", c.weight, c.text, c.feedback)
                          for c in body.answers]

    choices = body.choices
    if (dialect == "moodle"
            and sum(1 for c in choices if c.correct) >= 2
            and all(c.weight is None for c in choices)):
        choices = _moodle_weighted(choices)
    lines = [_entry("=" if c.correct else "~", c.weight, c.text, c.feedback)
             for c in choices]
    return None, "", lines


def serialize_question(question: Question, dialect: str = "paper",
                       wrap_width: int | None = None) -> str:
    """Serialize one question to canonical GIFT text.

    Refuses questions that fail validation for the dialect. ``wrap_width``
    soft-wraps the stem for readability; wrapped output reparses to the
    same question but is not byte-canonical.
    """
    errors = [d for d in validate(question, dialect) if d.severity == ERROR]
    if errors:
        raise SerializeError(errors)

    head = ""
    if question.title:
        head += f"::{escape_text(question.title, 'answer')}:: "
    if question.text_format:
        head += f"[{question.text_format}] "
    stem = escape_text(question.stem_prefix, "stem")
    if wrap_width:
        stem = _wrap(stem, wrap_width)
    head += stem

    inline, opener, lines = _render_body(question.body, dialect)

    general = None
    if question.general_feedback:
        fb = escape_text(question.general_feedback, "feedback")
        general = "# " + fb if dialect == "paper" else "####" + fb

    if inline is not None:
        block = "{" + inline
        if general:
            block += ("\n" + general) if dialect == "paper" else (" " + general)
        block += "}"
    else:
        if general:
            lines = lines + [general]
        block = "{" + opener + "\n" + "\n".join(lines) + "\n}"

    out = head + " " + block
    if question.stem_suffix:
        out += " " + escape_text(question.stem_suffix, "stem")
    return out


def serialize_document(questions, dialect: str = "paper") -> str:
    """Serialize a sequence of questions, or (question, category) pairs,
    to one GIFT document.

    Category directives are emitted where the category changes; blocks
    are separated by exactly one blank line and the document ends with a
    single trailing newline.
    """
    blocks: list[str] = []
    last_category = None
    for index, item in enumerate(questions):
        if isinstance(item, Question):
            question, category = item, None
        else:
            question, category = item
        if category is not None and category != last_category:
            blocks.append(f"$CATEGORY: {category}")
            last_category = category
        try:
            blocks.append(serialize_question(question, dialect))
        except SerializeError as exc:
            raise SerializeError(exc.diagnostics, index=index) from None
    if not blocks:
        return ""
    return "\n\n".join(blocks) + "\n"


def _wrap(text: str, width: int) -> str:
    wrapped = []
    for line in text.split("\n"):
        wrapped.extend(textwrap.wrap(line, width, break_long_words=False,
                                     break_on_hyphens=False) or [""])
    return "\n".join(wrapped)
