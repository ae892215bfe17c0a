"""Domain model for GIFT quiz questions.

Defines the question AST (six question types), the checkbox-flag to
answer-marker semantics used by authoring front ends, classification into
the six numbered question types, and dialect-aware validation rules.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

ERROR = "error"
WARNING = "warning"

DIALECTS = ("paper", "moodle")

TEXT_FORMATS = ("html", "markdown", "plain", "moodle")

# Percentage values strict GIFT consumers accept for weighted choices.
MOODLE_FRACTIONS = (
    100.0, 90.0, 83.333, 80.0, 75.0, 70.0, 66.666, 60.0, 50.0, 40.0,
    33.333, 30.0, 25.0, 20.0, 16.666, 14.2857, 12.5, 11.111, 10.0, 5.0,
)


class QuestionType(Enum):
    """The six supported question types, with their stable numeric codes."""

    TRUE_FALSE = 1
    MULTIPLE_CHOICE_SINGLE = 2
    MULTIPLE_RESPONSE = 3
    SHORT_ANSWER = 4
    MATCHING = 5
    NUMERIC = 6

    @property
    def code(self) -> int:
        return self.value


class Marker(Enum):
    """Answer marker: ``=`` flags a correct option, ``~`` a wrong one."""

    CORRECT = "="
    WRONG = "~"

    @property
    def symbol(self) -> str:
        return self.value


@dataclass(frozen=True)
class Diagnostic:
    """A source-located validation or parse message.

    ``error`` severity makes the subject question unusable for export;
    warnings are informational.
    """

    severity: str
    code: str
    message: str
    line: int | None = None
    column: int | None = None

    def __post_init__(self):
        if self.severity not in (ERROR, WARNING):
            raise ValueError(f"bad severity {self.severity!r}")
        if not self.message:
            raise ValueError("diagnostic message must be non-empty")

    @classmethod
    def error(cls, code: str, message: str, line: int | None = None,
              column: int | None = None) -> "Diagnostic":
        return cls(ERROR, code, message, line, column)

    @classmethod
    def warning(cls, code: str, message: str, line: int | None = None,
                column: int | None = None) -> "Diagnostic":
        return cls(WARNING, code, message, line, column)

    def __str__(self):
        where = ""
        if self.line is not None:
            where = f"{self.line}:" if self.column is None else f"{self.line}:{self.column}:"
            where = where + " "
        return f"{where}{self.severity}: {self.message} [{self.code}]"


class GiftError(Exception):
    """Base class for errors raised by this package."""


def _check_weight(weight, what: str) -> None:
    if weight is None:
        return
    if not isinstance(weight, (int, float)) or isinstance(weight, bool):
        raise ValueError(f"{what} weight must be a number, got {weight!r}")
    if not math.isfinite(weight) or not -100.0 <= weight <= 100.0:
        raise ValueError(f"{what} weight must be finite and in [-100, 100], got {weight!r}")


@dataclass(frozen=True)
class Choice:
    """One answer option: its text, correctness flag, optional credit weight
    (a percentage in [-100, 100]) and optional per-choice feedback."""

    text: str
    correct: bool = False
    weight: float | None = None
    feedback: str | None = None

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("choice text must be non-empty")
        _check_weight(self.weight, "choice")


@dataclass(frozen=True)
class MatchPair:
    """One left/right pairing of a matching question."""

    left: str
    right: str

    def __post_init__(self):
        if not self.left.strip() or not self.right.strip():
            raise ValueError("both sides of a match pair must be non-empty")


@dataclass(frozen=True)
class NumericPoint:
    """Numeric answer as value plus symmetric tolerance."""

    value: float
    tolerance: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.value) or not math.isfinite(self.tolerance):
            raise ValueError("numeric value and tolerance must be finite")
        if self.tolerance < 0:
            raise ValueError("tolerance must be non-negative")


@dataclass(frozen=True)
class NumericRange:
    """Numeric answer as an inclusive min..max interval."""

    min: float
    max: float

    def __post_init__(self):
        if not math.isfinite(self.min) or not math.isfinite(self.max):
            raise ValueError("range bounds must be finite")
        if self.min > self.max:
            raise ValueError(f"range min {self.min} exceeds max {self.max}")


NumericSpec = NumericPoint | NumericRange


@dataclass(frozen=True)
class NumericEntry:
    """One accepted numeric answer with optional weight and feedback."""

    spec: NumericSpec
    weight: float | None = None
    feedback: str | None = None

    def __post_init__(self):
        _check_weight(self.weight, "numeric answer")


@dataclass(frozen=True)
class TrueFalseBody:
    """True/false answer. The first feedback shows on a wrong submission,
    the second on a right one."""

    answer: bool
    feedback_wrong: str | None = None
    feedback_right: str | None = None


@dataclass(frozen=True)
class ChoicesBody:
    """Single- or multiple-response choice set."""

    choices: tuple[Choice, ...]

    def __post_init__(self):
        object.__setattr__(self, "choices", tuple(self.choices))


@dataclass(frozen=True)
class ShortAnswerBody:
    """Accepted short answers; every entry is correct by definition."""

    answers: tuple[Choice, ...]

    def __post_init__(self):
        object.__setattr__(self, "answers", tuple(self.answers))
        if not all(c.correct for c in self.answers):
            raise ValueError("short-answer entries must all be marked correct")


@dataclass(frozen=True)
class MatchingBody:
    """Pairs to be matched. Pairs carry no per-pair feedback."""

    pairs: tuple[MatchPair, ...]

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))


@dataclass(frozen=True)
class NumericBody:
    """One or more accepted numeric answers."""

    entries: tuple[NumericEntry, ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(self.entries))


Body = TrueFalseBody | ChoicesBody | ShortAnswerBody | MatchingBody | NumericBody


@dataclass(frozen=True)
class Question:
    """A parsed or authored quiz item.

    ``stem_suffix`` is non-empty only for missing-word questions, whose
    answer block sits mid-sentence; that form is only meaningful for
    choice and short-answer bodies.
    """

    stem_prefix: str
    body: Body
    stem_suffix: str = ""
    title: str | None = None
    text_format: str | None = None
    general_feedback: str | None = None

    def __post_init__(self):
        if not self.stem_prefix.strip():
            raise ValueError("question stem must be non-empty")
        if self.text_format is not None and self.text_format not in TEXT_FORMATS:
            raise ValueError(f"unknown text format {self.text_format!r}")
        if self.stem_suffix.strip() and not isinstance(
                self.body, (ChoicesBody, ShortAnswerBody)):
            raise ValueError("only choice and short-answer questions may "
                             "have text after the answer block")


@dataclass(frozen=True)
class LookupRow:
    """One row of the 16-row checkbox-to-marker lookup table."""

    index: int
    flags: tuple[bool, bool, bool, bool]
    markers: tuple[Marker, Marker, Marker, Marker]
    pattern: str

    def __post_init__(self):
        object.__setattr__(self, "flags", tuple(self.flags))
        object.__setattr__(self, "markers", tuple(self.markers))
        binary = 0
        for f in self.flags:
            binary = binary << 1 | int(f)
        if binary != self.index:
            raise ValueError(f"row index {self.index} does not match flags {self.flags}")


def markers_from_flags(flags) -> list[Marker]:
    """Map per-option correctness flags to answer markers, positionwise.

    A true flag yields ``=`` and a false one ``~``. Any number of options
    is accepted; four options reproduce the classic authoring-form table.
    """
    flags = list(flags)
    if not flags:
        raise ValueError("flags must be non-empty")
    return [Marker.CORRECT if f else Marker.WRONG for f in flags]


def pattern_from_flags(flags) -> str:
    """Summarize correctness flags as a T/F string, e.g. ``FTFT``."""
    flags = list(flags)
    if not flags:
        raise ValueError("flags must be non-empty")
    return "".join("T" if f else "F" for f in flags)


def generate_lookup_table() -> list[LookupRow]:
    """Compute all 16 rows of the four-checkbox lookup table.

    Row indices follow the binary value of the flags with the first
    checkbox most significant. The table is a pure computation; it exists
    so the positionwise marker rule can be checked against a reference
    transcription row by row.
    """
    rows = []
    for index in range(16):
        flags = tuple(bool(index >> shift & 1) for shift in (3, 2, 1, 0))
        rows.append(LookupRow(
            index=index,
            flags=flags,
            markers=tuple(markers_from_flags(flags)),
            pattern=pattern_from_flags(flags),
        ))
    return rows


def nearest_moodle_fraction(value: float) -> float:
    """Round a percentage to the nearest value strict consumers accept."""
    return min(MOODLE_FRACTIONS, key=lambda f: (abs(f - value), f))


def _answerable(body: ChoicesBody) -> bool:
    return any(c.correct for c in body.choices) or any(
        c.weight is not None and c.weight > 0 for c in body.choices)


def classify(question: Question) -> QuestionType:
    """Classify a structurally well-formed question into one of the six types.

    Choice sets with two or more correct options, or with any explicit
    weights, are multiple-response; exactly one correct option and no
    weights is single-answer multiple choice.

    Raises ValueError for a choice set with no correct option and no
    weights, which no consumer could grade.
    """
    body = question.body
    if isinstance(body, TrueFalseBody):
        return QuestionType.TRUE_FALSE
    if isinstance(body, ShortAnswerBody):
        return QuestionType.SHORT_ANSWER
    if isinstance(body, MatchingBody):
        return QuestionType.MATCHING
    if isinstance(body, NumericBody):
        return QuestionType.NUMERIC
    ncorrect = sum(1 for c in body.choices if c.correct)
    weighted = any(c.weight is not None for c in body.choices)
    if ncorrect >= 2 or weighted:
        return QuestionType.MULTIPLE_RESPONSE
    if ncorrect == 1:
        return QuestionType.MULTIPLE_CHOICE_SINGLE
    raise ValueError("choice question has no correct answer and no weights")


def validate(question: Question, dialect: str = "paper") -> list[Diagnostic]:
    """Check a question against export rules for the given dialect.

    Returns every violation found; an empty list means the question can be
    serialized. Errors make the question unexportable, warnings do not.
    """
    if dialect not in DIALECTS:
        raise ValueError(f"unknown dialect {dialect!r}")
    diags: list[Diagnostic] = []
    body = question.body

    if isinstance(body, ChoicesBody):
        if not _answerable(body):
            diags.append(Diagnostic.error(
                "no-correct-answer",
                "choice question has no correct answer"))
        else:
            ncorrect = sum(1 for c in body.choices if c.correct)
            weighted = any(c.weight is not None for c in body.choices)
            if dialect == "moodle" and ncorrect >= 2 and not weighted:
                diags.append(Diagnostic.warning(
                    "moodle-mr-weights",
                    "multiple-response question will be rewritten to "
                    "weighted form on export"))
        _check_duplicates(body.choices, diags)

    elif isinstance(body, ShortAnswerBody):
        if not body.answers:
            diags.append(Diagnostic.error(
                "no-correct-answer", "short-answer question has no accepted answers"))
        _check_duplicates(body.answers, diags)

    elif isinstance(body, MatchingBody):
        if len(body.pairs) < 2:
            diags.append(Diagnostic.error(
                "too-few-pairs",
                f"matching question needs at least 2 pairs, has {len(body.pairs)}"))
        elif dialect == "moodle" and len(body.pairs) < 3:
            diags.append(Diagnostic.warning(
                "few-pairs-moodle",
                "strict consumers expect at least 3 match pairs"))

    elif isinstance(body, NumericBody):
        if not body.entries:
            diags.append(Diagnostic.error(
                "empty-numeric", "numeric question has no accepted answers"))

    return diags


def _check_duplicates(choices, diags: list[Diagnostic]) -> None:
    seen = set()
    for c in choices:
        text = c.text.strip()
        if text in seen:
            diags.append(Diagnostic.warning(
                "duplicate-choice", f"duplicate choice text {text!r}"))
        seen.add(text)


def numeric_interval(spec: NumericSpec) -> tuple[float, float]:
    """Return the inclusive (lo, hi) interval a numeric spec accepts."""
    if isinstance(spec, NumericPoint):
        return (spec.value - spec.tolerance, spec.value + spec.tolerance)
    return (spec.min, spec.max)
