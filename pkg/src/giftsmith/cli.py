"""Command-line interface.

Ties the model, parser, writer and bank together for offline scripted
use. Data goes to stdout, diagnostics to stderr. Exit codes: 0 success,
1 parse/validation errors were reported (partial success), 2 hard
failure (I/O, unknown course, bad arguments).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from . import bank as bankmod
from .bank import Bank, RecordFilter
from .model import (
    Choice,
    ChoicesBody,
    ERROR,
    GiftError,
    Marker,
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
    generate_lookup_table,
    markers_from_flags,
    validate,
)
from .parser import parse_document
from .writer import serialize_question

TYPE_NAMES = {
    1: "true-false",
    2: "multiple-choice",
    3: "multiple-response",
    4: "short-answer",
    5: "matching",
    6: "numeric",
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="giftsmith",
        description="Offline GIFT question authoring, storage and exchange.")
    parser.add_argument("--bank", default="./bank.giftsmith",
                        help="bank file path (default: ./bank.giftsmith)")
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("init", help="create a new empty bank")

    course = sub.add_parser("course", help="manage courses")
    course_sub = course.add_subparsers(dest="course_command", required=True)
    course_add = course_sub.add_parser("add", help="add a course")
    course_add.add_argument("course_id")
    course_add.add_argument("subject")
    course_sub.add_parser("list", help="list courses")

    add = sub.add_parser("add", help="author one question from flags")
    add.add_argument("--course", required=True)
    add.add_argument("--title")
    add.add_argument("--stem", required=True)
    add.add_argument("--type", type=int, choices=sorted(TYPE_NAMES),
                     help="declared type code; checked against the question")
    add.add_argument("--opt", action="append", default=[], metavar="TEXT:correct|wrong",
                     help="choice option (repeatable)")
    add.add_argument("--tf", choices=["true", "false"], help="true/false answer")
    add.add_argument("--answer", action="append", default=[],
                     help="accepted short answer (repeatable)")
    add.add_argument("--pair", action="append", default=[], metavar="LEFT -> RIGHT",
                     help="match pair (repeatable)")
    add.add_argument("--numeric", action="append", default=[], metavar="V:TOL|MIN..MAX",
                     help="accepted numeric answer (repeatable)")
    add.add_argument("--suffix", default="", help="stem text after the answer block")
    add.add_argument("--feedback", help="general feedback")
    add.add_argument("--dialect", choices=["paper", "moodle"], default="paper")

    imp = sub.add_parser("import", help="import a GIFT file into a course")
    imp.add_argument("file")
    imp.add_argument("--course", required=True)
    imp.add_argument("--dialect", choices=["paper", "moodle"], default="paper")

    exp = sub.add_parser("export", help="export bank records as GIFT")
    exp.add_argument("--course")
    exp.add_argument("--type", type=int, choices=sorted(TYPE_NAMES))
    exp.add_argument("--dialect", choices=["paper", "moodle"], default="paper")
    exp.add_argument("--out", help="write to a file instead of stdout")

    val = sub.add_parser("validate", help="parse and validate a GIFT file")
    val.add_argument("file")
    val.add_argument("--dialect", choices=["paper", "moodle"], default="paper")

    sub.add_parser("lookup-table", help="print the 16-row flag/marker table")
    sub.add_parser("stats", help="bank summary counts")

    serve = sub.add_parser("serve", help="run the local authoring service")
    serve.add_argument("--port", type=int, default=8787)
    return parser


def run(argv) -> int:
    """Entry point; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(list(argv))
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 2

    try:
        return _dispatch(args)
    except GiftError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


def _dispatch(args) -> int:
    command = args.command
    if command == "init":
        return _cmd_init(args)
    if command == "course":
        return _cmd_course(args)
    if command == "add":
        return _cmd_add(args)
    if command == "import":
        return _cmd_import(args)
    if command == "export":
        return _cmd_export(args)
    if command == "validate":
        return _cmd_validate(args)
    if command == "lookup-table":
        return _cmd_lookup_table()
    if command == "stats":
        return _cmd_stats(args)
    if command == "serve":
        return _cmd_serve(args)
    raise AssertionError(command)


def _load(args) -> Bank:
    return bankmod.open_bank(args.bank)


def _cmd_init(args) -> int:
    path = Path(args.bank)
    if path.exists():
        print(f"error: {path} already exists", file=sys.stderr)
        return 2
    bankmod.save_bank(Bank(), path)
    print(f"initialized empty bank at {path}")
    return 0


def _cmd_course(args) -> int:
    bank = _load(args)
    if args.course_command == "add":
        bank = bankmod.create_course(bank, args.course_id, args.subject)
        bankmod.save_bank(bank, args.bank)
        print(f"added course {args.course_id} ({args.subject})")
        return 0
    for course in bank.courses:
        print(f"{course.course_id}  {course.subject}")
    return 0


def _parse_opt(raw: str) -> tuple[str, bool]:
    text, sep, flag = raw.rpartition(":")
    if not sep or flag.strip().lower() not in ("correct", "wrong"):
        raise GiftError(f"--opt needs the form 'text:correct' or 'text:wrong', got {raw!r}")
    return text.strip(), flag.strip().lower() == "correct"


def _parse_numeric_arg(raw: str) -> NumericEntry:
    token = raw.strip()
    try:
        if ".." in token:
            lo, hi = token.split("..", 1)
            return NumericEntry(NumericRange(float(lo), float(hi)))
        if ":" in token:
            value, tol = token.split(":", 1)
            return NumericEntry(NumericPoint(float(value), float(tol)))
        return NumericEntry(NumericPoint(float(token)))
    except ValueError as exc:
        raise GiftError(f"bad --numeric value {raw!r}: {exc}") from None


def _build_body(args):
    kinds = [bool(args.opt), args.tf is not None, bool(args.answer),
             bool(args.pair), bool(args.numeric)]
    if sum(kinds) != 1:
        raise GiftError("give exactly one of --opt, --tf, --answer, --pair, --numeric")
    if args.opt:
        parsed = [_parse_opt(raw) for raw in args.opt]
        markers = markers_from_flags([correct for _, correct in parsed])
        return ChoicesBody(tuple(
            Choice(text, marker is Marker.CORRECT)
            for (text, _), marker in zip(parsed, markers)))
    if args.tf is not None:
        return TrueFalseBody(args.tf == "true")
    if args.answer:
        return ShortAnswerBody(tuple(Choice(a, correct=True) for a in args.answer))
    if args.pair:
        pairs = []
        for raw in args.pair:
            left, sep, right = raw.partition("->")
            if not sep:
                raise GiftError(f"--pair needs the form 'left -> right', got {raw!r}")
            pairs.append(MatchPair(left.strip(), right.strip()))
        return MatchingBody(tuple(pairs))
    return NumericBody(tuple(_parse_numeric_arg(raw) for raw in args.numeric))


def _cmd_add(args) -> int:
    bank = _load(args)
    try:
        question = Question(
            stem_prefix=args.stem,
            body=_build_body(args),
            stem_suffix=args.suffix,
            title=args.title,
            general_feedback=args.feedback,
        )
    except ValueError as exc:
        raise GiftError(str(exc)) from None

    diags = validate(question, args.dialect)
    for diag in diags:
        print(str(diag), file=sys.stderr)
    if any(d.severity == ERROR for d in diags):
        return 1

    qtype = classify(question)
    if args.type is not None and args.type != qtype.code:
        raise GiftError(f"declared type {args.type} but question classifies "
                        f"as {qtype.code} ({TYPE_NAMES[qtype.code]})")

    bank, record_id = bankmod.add_question(bank, args.course, question, args.dialect)
    bankmod.save_bank(bank, args.bank)
    print(f"added record {record_id} (type {qtype.code} {TYPE_NAMES[qtype.code]})")
    print(serialize_question(question, args.dialect))
    return 0


def _cmd_import(args) -> int:
    bank = _load(args)
    text = Path(args.file).read_text(encoding="utf-8")
    bank, ids, diagnostics = bankmod.import_gift(bank, args.course, text, args.dialect)
    bankmod.save_bank(bank, args.bank)
    for diag in diagnostics:
        print(str(diag), file=sys.stderr)
    errors = sum(1 for d in diagnostics if d.severity == ERROR)
    print(f"imported {len(ids)} questions into {args.course}, {errors} errors")
    return 1 if errors else 0


def _cmd_export(args) -> int:
    bank = _load(args)
    if args.course is not None:
        bank.course(args.course)
    record_filter = RecordFilter(course_id=args.course, qtype_code=args.type)
    text = bankmod.export_gift(bank, record_filter, args.dialect)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8", newline="\n")
        print(f"exported {len(bankmod.list_records(bank, record_filter))} "
              f"questions to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


def _cmd_validate(args) -> int:
    text = Path(args.file).read_text(encoding="utf-8")
    result = parse_document(text, args.dialect)
    diagnostics = list(result.diagnostics)
    for parsed in result.questions:
        diagnostics.extend(
            replace(d, line=d.line if d.line is not None else parsed.line)
            for d in validate(parsed.question, args.dialect))
    for diag in diagnostics:
        print(str(diag), file=sys.stderr)
    errors = sum(1 for d in diagnostics if d.severity == ERROR)
    print(f"{len(result.questions)} questions, {errors} errors")
    return 1 if errors else 0


def _cmd_lookup_table() -> int:
    for row in generate_lookup_table():
        markers = " ".join(m.symbol for m in row.markers)
        print(f"{row.index:>2}  {row.pattern}  {markers}")
    return 0


def _cmd_stats(args) -> int:
    bank = _load(args)
    print(f"courses: {len(bank.courses)}")
    print(f"records: {len(bank.records)}")
    for course in bank.courses:
        count = sum(1 for r in bank.records if r.course_id == course.course_id)
        print(f"  {course.course_id}: {count}")
    by_type = {}
    for record in bank.records:
        by_type[record.qtype_code] = by_type.get(record.qtype_code, 0) + 1
    for code in sorted(by_type):
        print(f"  type {code} {TYPE_NAMES[code]}: {by_type[code]}")
    return 0


def _cmd_serve(args) -> int:
    from .service import serve_forever

    serve_forever(args.bank, port=args.port)
    return 0


if __name__ == "__main__":
    main()
