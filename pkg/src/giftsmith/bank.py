"""File-backed question bank.

A bank is an immutable value: every operation returns a new bank. The
on-disk form is a single human-diffable text file, UTF-8 with LF line
endings: the header line ``giftsmith-bank v1`` followed by one JSON
object per line. Each object carries a ``kind`` field:

    {"kind": "meta", "next_record_id": 7}
    {"kind": "course", "course_id": "C300", "subject": "Chemistry"}
    {"kind": "question", "record_id": 1, "course_id": "C300",
     "qtype_code": 3, "question": {...}, "created_at": "...",
     "updated_at": "..."}

Timestamps are RFC 3339 UTC. The question payload mirrors the question
model one to one; the same payload schema is used by the local authoring
service. Saves are atomic (write-temp-then-rename) and guarded by an
advisory lock file, so a crash never corrupts an existing bank and two
writers never interleave.
"""

from __future__ import annotations

import fcntl
import json
import os
import re
from dataclasses import dataclass, replace
from datetime import datetime, timezone
from pathlib import Path

from .model import (
    Body,
    Choice,
    ChoicesBody,
    Diagnostic,
    ERROR,
    GiftError,
    MatchingBody,
    MatchPair,
    NumericBody,
    NumericEntry,
    NumericPoint,
    NumericRange,
    Question,
    ShortAnswerBody,
    TrueFalseBody,
    classify,
    validate,
)
from .parser import parse_document
from .writer import serialize_question

FORMAT_VERSION = 1
_HEADER_RE = re.compile(r"giftsmith-bank v(\d+)\s*\Z")
_COURSE_ID_RE = re.compile(r"[A-Za-z][A-Za-z0-9_-]*\Z")


class BankError(GiftError):
    """Base class for bank failures."""


class UnknownCourseError(BankError):
    pass


class DuplicateCourseError(BankError):
    pass


class UnknownRecordError(BankError):
    pass


class BankLockedError(BankError):
    pass


class BankFormatError(BankError):
    """Raised for unreadable bank files; carries the byte offset."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} (byte {offset})")
        self.offset = offset


class ValidationFailed(BankError):
    """A question was rejected; carries the validation diagnostics."""

    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.message for d in self.diagnostics)
                         or "question failed validation")


@dataclass(frozen=True)
class Course:
    course_id: str
    subject: str


@dataclass(frozen=True)
class QuestionRecord:
    record_id: int
    course_id: str
    qtype_code: int
    question: Question
    created_at: datetime
    updated_at: datetime


@dataclass(frozen=True)
class RecordFilter:
    """Conjunctive record filter; absent fields match everything."""

    course_id: str | None = None
    qtype_code: int | None = None
    title_substring: str | None = None

    def matches(self, record: QuestionRecord) -> bool:
        if self.course_id is not None and record.course_id != self.course_id:
            return False
        if self.qtype_code is not None and record.qtype_code != self.qtype_code:
            return False
        if self.title_substring is not None:
            if self.title_substring not in (record.question.title or ""):
                return False
        return True


@dataclass(frozen=True)
class Bank:
    format_version: int = FORMAT_VERSION
    courses: tuple[Course, ...] = ()
    records: tuple[QuestionRecord, ...] = ()
    next_record_id: int = 1

    def course(self, course_id: str) -> Course:
        for course in self.courses:
            if course.course_id == course_id:
                return course
        raise UnknownCourseError(f"unknown course {course_id!r}")

    def record(self, record_id: int) -> QuestionRecord:
        for record in self.records:
            if record.record_id == record_id:
                return record
        raise UnknownRecordError(f"unknown record {record_id}")


def _now() -> datetime:
    return datetime.now(timezone.utc)


# -- course and record operations -------------------------------------------

def create_course(bank: Bank, course_id: str, subject: str) -> Bank:
    """Add a course; the id must be a fresh identifier."""
    if not _COURSE_ID_RE.match(course_id or ""):
        raise BankError(f"invalid course id {course_id!r}")
    if not subject or not subject.strip():
        raise BankError("course subject must be non-empty")
    if any(c.course_id == course_id for c in bank.courses):
        raise DuplicateCourseError(f"course {course_id!r} exists")
    return replace(bank, courses=bank.courses + (Course(course_id, subject),))


def add_question(bank: Bank, course_id: str, question: Question,
                 dialect: str = "paper") -> tuple[Bank, int]:
    """Append a validated question to a course; returns the new record id."""
    bank.course(course_id)
    errors = [d for d in validate(question, dialect) if d.severity == ERROR]
    if errors:
        raise ValidationFailed(errors)
    now = _now()
    record = QuestionRecord(
        record_id=bank.next_record_id,
        course_id=course_id,
        qtype_code=classify(question).code,
        question=question,
        created_at=now,
        updated_at=now,
    )
    new = replace(bank, records=bank.records + (record,),
                  next_record_id=bank.next_record_id + 1)
    return new, record.record_id


def update_question(bank: Bank, record_id: int, question: Question,
                    dialect: str = "paper") -> Bank:
    """Replace a record's question, refreshing its type code and timestamp."""
    old = bank.record(record_id)
    errors = [d for d in validate(question, dialect) if d.severity == ERROR]
    if errors:
        raise ValidationFailed(errors)
    updated = replace(old, question=question, qtype_code=classify(question).code,
                      updated_at=_now())
    records = tuple(updated if r.record_id == record_id else r for r in bank.records)
    return replace(bank, records=records)


def remove_question(bank: Bank, record_id: int) -> Bank:
    """Delete a record. Its id is never reused."""
    bank.record(record_id)
    records = tuple(r for r in bank.records if r.record_id != record_id)
    return replace(bank, records=records)


def list_records(bank: Bank, record_filter: RecordFilter | None = None
                 ) -> list[QuestionRecord]:
    """Records matching the filter, in record id order."""
    record_filter = record_filter or RecordFilter()
    return sorted((r for r in bank.records if record_filter.matches(r)),
                  key=lambda r: r.record_id)


# -- GIFT interchange --------------------------------------------------------

def export_gift(bank: Bank, record_filter: RecordFilter | None = None,
                dialect: str = "paper") -> str:
    """Export matching records as a GIFT document.

    Records are grouped by course (in bank order, record id order within
    a course) so each course contributes one category directive. Each
    record gets comment-safe header lines naming its course and type
    code, and its record id as the title when the question itself has
    none.
    """
    course_order = {c.course_id: i for i, c in enumerate(bank.courses)}
    records = sorted(list_records(bank, record_filter),
                     key=lambda r: (course_order[r.course_id], r.record_id))
    chunks = []
    last_course = None
    for record in records:
        lines = [f"// Course ID: {record.course_id}",
                 f"// Ques type: {record.qtype_code}"]
        if record.course_id != last_course:
            subject = bank.course(record.course_id).subject
            lines.append(f"$CATEGORY: {record.course_id}/{subject}")
            last_course = record.course_id
        question = record.question
        if not question.title:
            question = replace(question, title=str(record.record_id))
        lines.append(serialize_question(question, dialect))
        chunks.append("\n".join(lines))
    if not chunks:
        return ""
    return "\n\n".join(chunks) + "\n"


def import_gift(bank: Bank, course_id: str, text: str, dialect: str = "paper"
                ) -> tuple[Bank, list[int], list[Diagnostic]]:
    """Import every well-formed, valid question from a GIFT document.

    Per-question failures are reported in the returned diagnostics and do
    not abort the rest; only an unknown course is a hard error.
    """
    bank.course(course_id)
    result = parse_document(text, dialect)
    diagnostics = list(result.diagnostics)
    ids: list[int] = []
    for parsed in result.questions:
        diags = [replace(d, line=d.line if d.line is not None else parsed.line)
                 for d in validate(parsed.question, dialect)]
        diagnostics.extend(diags)
        if any(d.severity == ERROR for d in diags):
            continue
        bank, record_id = add_question(bank, course_id, parsed.question, dialect)
        ids.append(record_id)
    return bank, ids, diagnostics


# -- question payload encoding ------------------------------------------------

def question_to_payload(question: Question) -> dict:
    """Encode a question as the JSON-compatible payload used on disk and
    over the local service API."""
    return {
        "title": question.title,
        "format": question.text_format,
        "stem": question.stem_prefix,
        "suffix": question.stem_suffix,
        "body": _body_to_payload(question.body),
        "general_feedback": question.general_feedback,
    }


def _choice_to_payload(choice: Choice) -> dict:
    return {"text": choice.text, "correct": choice.correct,
            "weight": choice.weight, "feedback": choice.feedback}


def _body_to_payload(body: Body) -> dict:
    if isinstance(body, TrueFalseBody):
        return {"kind": "truefalse", "answer": body.answer,
                "feedback_wrong": body.feedback_wrong,
                "feedback_right": body.feedback_right}
    if isinstance(body, ChoicesBody):
        return {"kind": "choices",
                "choices": [_choice_to_payload(c) for c in body.choices]}
    if isinstance(body, ShortAnswerBody):
        return {"kind": "shortanswer",
                "answers": [_choice_to_payload(c) for c in body.answers]}
    if isinstance(body, MatchingBody):
        return {"kind": "matching",
                "pairs": [{"left": p.left, "right": p.right} for p in body.pairs]}
    if isinstance(body, NumericBody):
        return {"kind": "numeric", "entries": [
            {"spec": _spec_to_payload(e.spec), "weight": e.weight,
             "feedback": e.feedback} for e in body.entries]}
    raise ValueError(f"unknown body type {type(body).__name__}")


def _spec_to_payload(spec) -> dict:
    if isinstance(spec, NumericPoint):
        return {"kind": "point", "value": spec.value, "tolerance": spec.tolerance}
    return {"kind": "range", "min": spec.min, "max": spec.max}


def question_from_payload(payload: dict) -> Question:
    """Decode a question payload; raises ValueError on malformed input."""
    if not isinstance(payload, dict):
        raise ValueError("question payload must be an object")
    try:
        body = _body_from_payload(payload["body"])
        return Question(
            stem_prefix=payload["stem"],
            body=body,
            stem_suffix=payload.get("suffix") or "",
            title=payload.get("title"),
            text_format=payload.get("format"),
            general_feedback=payload.get("general_feedback"),
        )
    except KeyError as exc:
        raise ValueError(f"question payload missing field {exc.args[0]!r}") from None
    except (TypeError, AttributeError) as exc:
        raise ValueError(f"malformed question payload: {exc}") from None


def _choice_from_payload(payload: dict, correct: bool | None = None) -> Choice:
    weight = payload.get("weight")
    return Choice(
        text=payload["text"],
        correct=payload.get("correct", True) if correct is None else correct,
        weight=float(weight) if weight is not None else None,
        feedback=payload.get("feedback"),
    )


def _body_from_payload(payload: dict) -> Body:
    if not isinstance(payload, dict):
        raise ValueError("question body must be an object")
    kind = payload.get("kind")
    if kind == "truefalse":
        return TrueFalseBody(bool(payload["answer"]),
                             feedback_wrong=payload.get("feedback_wrong"),
                             feedback_right=payload.get("feedback_right"))
    if kind == "choices":
        return ChoicesBody(tuple(_choice_from_payload(c) for c in payload["choices"]))
    if kind == "shortanswer":
        return ShortAnswerBody(tuple(_choice_from_payload(c, correct=True)
                                     for c in payload["answers"]))
    if kind == "matching":
        return MatchingBody(tuple(MatchPair(p["left"], p["right"])
                                  for p in payload["pairs"]))
    if kind == "numeric":
        return NumericBody(tuple(
            NumericEntry(_spec_from_payload(e["spec"]),
                         weight=float(e["weight"]) if e.get("weight") is not None else None,
                         feedback=e.get("feedback"))
            for e in payload["entries"]))
    raise ValueError(f"unknown question body kind {kind!r}")


def _spec_from_payload(payload: dict):
    kind = payload.get("kind")
    if kind == "point":
        return NumericPoint(float(payload["value"]), float(payload.get("tolerance", 0.0)))
    if kind == "range":
        return NumericRange(float(payload["min"]), float(payload["max"]))
    raise ValueError(f"unknown numeric spec kind {kind!r}")


# -- persistence ---------------------------------------------------------------

def save_bank(bank: Bank, path) -> None:
    """Write the bank atomically: temp file plus rename, under an advisory
    lock so concurrent saves to one path are serialized."""
    path = Path(path)
    lines = [f"giftsmith-bank v{bank.format_version}",
             json.dumps({"kind": "meta", "next_record_id": bank.next_record_id})]
    for course in bank.courses:
        lines.append(json.dumps(
            {"kind": "course", "course_id": course.course_id,
             "subject": course.subject}, ensure_ascii=False))
    for record in bank.records:
        lines.append(json.dumps({
            "kind": "question",
            "record_id": record.record_id,
            "course_id": record.course_id,
            "qtype_code": record.qtype_code,
            "question": question_to_payload(record.question),
            "created_at": record.created_at.isoformat(),
            "updated_at": record.updated_at.isoformat(),
        }, ensure_ascii=False))
    data = "\n".join(lines) + "\n"

    lock_path = path.with_name(path.name + ".lock")
    lock_fd = os.open(lock_path, os.O_CREAT | os.O_RDWR, 0o644)
    try:
        try:
            fcntl.flock(lock_fd, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except OSError:
            raise BankLockedError(f"{path} is being written by another process")
        tmp_path = path.with_name(path.name + ".tmp")
        try:
            with open(tmp_path, "w", encoding="utf-8", newline="\n") as handle:
                handle.write(data)
                handle.flush()
                os.fsync(handle.fileno())
            os.replace(tmp_path, path)
        except BaseException:
            try:
                os.unlink(tmp_path)
            except OSError:
                pass
            raise
    finally:
        os.close(lock_fd)


def open_bank(path) -> Bank:
    """Read a bank file back; the exact inverse of save_bank."""
    path = Path(path)
    raw = path.read_bytes()
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise BankFormatError("bank file is not valid UTF-8", exc.start) from None

    offset = 0
    courses: list[Course] = []
    records: list[QuestionRecord] = []
    next_record_id = None

    for lineno, line in enumerate(text.split("\n"), start=1):
        line_offset = offset
        offset += len(line.encode("utf-8")) + 1
        if lineno == 1:
            match = _HEADER_RE.match(line)
            if not match:
                raise BankFormatError("malformed bank: missing giftsmith-bank header",
                                      line_offset)
            version = int(match.group(1))
            if version != FORMAT_VERSION:
                raise BankFormatError(
                    f"unsupported bank format version {version} "
                    f"(this build reads v{FORMAT_VERSION})", line_offset)
            continue
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            kind = obj.get("kind")
            if kind == "meta":
                next_record_id = int(obj["next_record_id"])
            elif kind == "course":
                course_id = obj["course_id"]
                if not _COURSE_ID_RE.match(course_id):
                    raise ValueError(f"invalid course id {course_id!r}")
                if any(c.course_id == course_id for c in courses):
                    raise ValueError(f"duplicate course {course_id!r}")
                courses.append(Course(course_id, obj["subject"]))
            elif kind == "question":
                records.append(QuestionRecord(
                    record_id=int(obj["record_id"]),
                    course_id=obj["course_id"],
                    qtype_code=int(obj["qtype_code"]),
                    question=question_from_payload(obj["question"]),
                    created_at=datetime.fromisoformat(obj["created_at"]),
                    updated_at=datetime.fromisoformat(obj["updated_at"]),
                ))
            else:
                raise ValueError(f"unknown record kind {kind!r}")
        except (ValueError, KeyError, TypeError, AttributeError) as exc:
            raise BankFormatError(f"malformed bank: {exc}", line_offset) from None

    ids = [r.record_id for r in records]
    if len(set(ids)) != len(ids):
        raise BankFormatError("malformed bank: duplicate record ids", 0)
    known = {c.course_id for c in courses}
    for record in records:
        if record.course_id not in known:
            raise BankFormatError(
                f"malformed bank: record {record.record_id} references "
                f"unknown course {record.course_id!r}", 0)
        # Error-level validation rules are dialect-independent, so one
        # dialect suffices to keep invalid records out of a bank.
        errors = [d for d in validate(record.question, "paper")
                  if d.severity == ERROR]
        if errors:
            raise BankFormatError(
                f"malformed bank: record {record.record_id} is invalid: "
                f"{errors[0].message}", 0)
        if record.qtype_code != classify(record.question).code:
            raise BankFormatError(
                f"malformed bank: record {record.record_id} has type code "
                f"{record.qtype_code} but classifies as "
                f"{classify(record.question).code}", 0)
    if next_record_id is None:
        next_record_id = max(ids, default=0) + 1
    if ids and next_record_id <= max(ids):
        raise BankFormatError("malformed bank: next_record_id not past "
                              "existing ids", 0)
    return Bank(format_version=FORMAT_VERSION, courses=tuple(courses),
                records=tuple(records), next_record_id=next_record_id)
