"""Parser for GIFT quiz documents.

Input is UTF-8 text, optionally BOM-prefixed, with LF or CRLF line
endings. Documents split into blocks at blank lines; ``//`` comment lines
are dropped; ``$CATEGORY:`` lines set the category for the questions that
follow. Each block parses into a Question, with failures reported as
source-located diagnostics instead of aborting the document.

Inside a block: an optional ``::title::`` prefix, an optional
``[format]`` directive, stem text up to the first unescaped ``{``, the
answer block up to the matching ``}``, and any trailing text as the
missing-word suffix. Backslash escapes the structural characters
``~ = # { } : \\`` and ``\\n`` encodes a newline.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .model import (
    Body,
    Choice,
    ChoicesBody,
    Diagnostic,
    GiftError,
    MatchingBody,
    MatchPair,
    NumericBody,
    NumericEntry,
    NumericPoint,
    NumericRange,
    Question,
    ShortAnswerBody,
    TEXT_FORMATS,
    TrueFalseBody,
    nearest_moodle_fraction,
)

# The escape set includes "[" so the writer's leading-bracket stem escape
# (which keeps a stem from being read as a format directive) inverts cleanly.
ESCAPABLE = "~=#{}:\\["

TRUE_WORDS = ("T", "TRUE")
FALSE_WORDS = ("F", "FALSE")

# Raw newlines inside a block are soft breaks, as consumers treat them;
# only the \n escape produces a literal newline in parsed text.
_SOFT_BREAK = re.compile(r"[ \t]*\n[ \t]*")
_NL_SENTINEL = "\x00"


class ParseError(GiftError):
    """Unrecoverable failure while parsing one question block."""

    def __init__(self, code: str, message: str, line: int | None = None,
                 column: int | None = None):
        super().__init__(message)
        self.code = code
        self.message = message
        self.line = line
        self.column = column

    def to_diagnostic(self) -> Diagnostic:
        return Diagnostic.error(self.code, self.message, self.line, self.column)


@dataclass(frozen=True)
class ParsedQuestion:
    """One question with the category in effect and its starting line."""

    question: Question
    category: str | None
    line: int


@dataclass
class ParseResult:
    """All questions recovered from a document plus every diagnostic."""

    questions: list[ParsedQuestion] = field(default_factory=list)
    diagnostics: list[Diagnostic] = field(default_factory=list)

    @property
    def errors(self) -> list[Diagnostic]:
        return [d for d in self.diagnostics if d.severity == "error"]


def unescape_text(raw: str) -> str:
    """Resolve backslash escapes to their literal characters.

    ``\\~ \\= \\# \\{ \\} \\: \\\\`` become the bare character and ``\\n``
    becomes a newline; a backslash before anything else is preserved
    as-is (the parser reports those as warnings).
    """
    return _unescape(raw)[0]


def _unescape(raw: str, newline: str = "\n") -> tuple[str, list[int]]:
    out: list[str] = []
    strays: list[int] = []
    i, n = 0, len(raw)
    while i < n:
        ch = raw[i]
        if ch == "\\":
            if i + 1 >= n:
                strays.append(i)
                out.append(ch)
                i += 1
                continue
            nxt = raw[i + 1]
            if nxt in ESCAPABLE:
                out.append(nxt)
            elif nxt == "n":
                out.append(newline)
            else:
                strays.append(i)
                out.append(ch)
                out.append(nxt)
            i += 2
            continue
        out.append(ch)
        i += 1
    return "".join(out), strays


def _find_unescaped(text: str, target: str, start: int = 0) -> int:
    """Index of the next unescaped occurrence of ``target``, or -1."""
    i, n = start, len(text)
    while i < n:
        if text[i] == "\\":
            i += 2
            continue
        if text.startswith(target, i):
            return i
        i += 1
    return -1


def _split_unescaped(text: str, sep: str) -> list[str]:
    parts: list[str] = []
    start = 0
    while True:
        idx = _find_unescaped(text, sep, start)
        if idx == -1:
            parts.append(text[start:])
            return parts
        parts.append(text[start:idx])
        start = idx + len(sep)


class _BlockParser:
    """Parses one blank-line-delimited block into a Question.

    ``line_map`` gives the original 1-based document line for each line of
    ``text`` (comment lines may have been dropped in between, so the
    mapping is not always contiguous).
    """

    def __init__(self, text: str, dialect: str, line_map: list[int] | None = None,
                 diagnostics: list[Diagnostic] | None = None):
        self.text = text
        self.dialect = dialect
        self.diagnostics = diagnostics if diagnostics is not None else []
        if line_map is None:
            line_map = list(range(1, text.count("\n") + 2))
        self.line_map = line_map

    def loc(self, offset: int) -> tuple[int, int]:
        offset = max(0, min(offset, len(self.text)))
        li = self.text.count("\n", 0, offset)
        col = offset - (self.text.rfind("\n", 0, offset) + 1) + 1
        li = min(li, len(self.line_map) - 1) if self.line_map else 0
        line = self.line_map[li] if self.line_map else 1
        return line, col

    def fail(self, code: str, message: str, offset: int):
        line, col = self.loc(offset)
        raise ParseError(code, message, line, col)

    def warn(self, code: str, message: str, offset: int) -> None:
        line, col = self.loc(offset)
        self.diagnostics.append(Diagnostic.warning(code, message, line, col))

    def unescape(self, raw: str, offset: int) -> str:
        text, strays = _unescape(raw)
        for stray in strays:
            self.warn("stray-escape",
                      "backslash does not escape anything here and is kept literally",
                      offset + stray)
        return text

    def field(self, raw: str, offset: int) -> str:
        """Cook one text field: resolve escapes, fold raw newlines to
        spaces (escaped \\n survives as a literal newline), and trim."""
        text, strays = _unescape(raw, newline=_NL_SENTINEL)
        for stray in strays:
            self.warn("stray-escape",
                      "backslash does not escape anything here and is kept literally",
                      offset + stray)
        text = _SOFT_BREAK.sub(" ", text)
        return text.replace(_NL_SENTINEL, "\n").strip()

    # -- question ----------------------------------------------------------

    def parse(self) -> Question:
        self._skip_metadata_lines()
        pos = self._skip_ws(0)
        if pos >= len(self.text):
            self.fail("empty-block", "block contains no question", 0)

        title, pos = self._parse_title(pos)
        pos = self._skip_ws(pos)
        text_format, pos = self._parse_format(pos)

        brace = _find_unescaped(self.text, "{", pos)
        if brace == -1:
            self.fail("no-answer-block", "no answer block: missing '{'", pos)
        stem = self.field(self.text[pos:brace], pos)
        if not stem:
            self.fail("empty-stem", "question has no stem text", pos)

        inner_open = _find_unescaped(self.text, "{", brace + 1)
        close = _find_unescaped(self.text, "}", brace + 1)
        if close == -1:
            line, col = self.loc(brace)
            raise ParseError("unterminated-block",
                             f"answer block opened at {line}:{col} is never closed",
                             line, col)
        if inner_open != -1 and inner_open < close:
            self.fail("nested-brace", "unexpected '{' inside answer block", inner_open)

        body, general = self._parse_block_content(self.text[brace + 1:close], brace + 1)

        suffix_raw = self.text[close + 1:]
        stray_open = _find_unescaped(suffix_raw, "{")
        if stray_open != -1:
            self.fail("multiple-blocks", "only one answer block is allowed per question",
                      close + 1 + stray_open)
        suffix = self.field(suffix_raw, close + 1)

        try:
            return Question(
                stem_prefix=stem,
                body=body,
                stem_suffix=suffix,
                title=title,
                text_format=text_format,
                general_feedback=general,
            )
        except ValueError as exc:
            self.fail("bad-question", str(exc), close + 1)

    def _skip_metadata_lines(self) -> None:
        # Some exporters print bare header lines (course, type) above the
        # title; skip them when they cannot be question content.
        lines = self.text.split("\n")
        title_at = None
        for i, line in enumerate(lines):
            if line.lstrip().startswith(":"):
                title_at = i
                break
        if not title_at:
            return
        before = lines[:title_at]
        if any(_find_unescaped(line, "{") != -1 for line in before):
            return
        if not all(line.strip() for line in before):
            return
        offset = sum(len(line) + 1 for line in before)
        self.warn("metadata-skipped",
                  f"skipped {title_at} metadata line(s) before the question title", 0)
        self.text = self.text[offset:]
        self.line_map = self.line_map[title_at:]

    def _skip_ws(self, pos: int) -> int:
        while pos < len(self.text) and self.text[pos].isspace():
            pos += 1
        return pos

    def _parse_title(self, pos: int) -> tuple[str | None, int]:
        text = self.text
        if text.startswith("::", pos):
            end = _find_unescaped(text, "::", pos + 2)
            if end == -1:
                self.fail("unterminated-title", "no closing '::' for question title", pos)
            title = self.field(text[pos + 2:end], pos + 2)
            return title or None, end + 2
        if text.startswith(":", pos):
            end = _find_unescaped(text, ":", pos + 1)
            if end != -1:
                raw = text[pos + 1:end]
                if "\n" not in raw and _find_unescaped(raw, "{") == -1:
                    self.warn("single-colon-title",
                              "single-colon title accepted and normalized to '::'", pos)
                    title = self.field(raw, pos + 1)
                    return title or None, end + 1
        return None, pos

    def _parse_format(self, pos: int) -> tuple[str | None, int]:
        text = self.text
        if pos < len(text) and text[pos] == "[":
            end = text.find("]", pos + 1)
            if end != -1:
                word = text[pos + 1:end].strip().lower()
                if word in TEXT_FORMATS:
                    return word, end + 1
        return None, pos

    # -- answer block ------------------------------------------------------

    def _parse_block_content(self, content: str, base: int) -> tuple[Body, str | None]:
        general = None

        hashes = _find_unescaped(content, "####")
        if hashes != -1:
            general = self.field(content[hashes + 4:], base + hashes + 4) or None
            content = content[:hashes]

        if not content.strip():
            self.fail("empty-block", "empty answer block (essay form unsupported)", base)

        rest, line_general = self._extract_paper_general(content, base)
        if line_general is not None:
            general = line_general
            content = rest

        stripped = content.strip()
        first = stripped[0]
        if first not in "=~#":
            body = self._parse_true_false(content, base)
            if body is None:
                self.fail("marker-expected",
                          "answer block must start with '=', '~', '#' or a "
                          "true/false word", base + _indent(content))
            return body, general
        if first == "#":
            return self._parse_numeric(content, base), general
        return self._parse_entries(content, base), general

    def _extract_paper_general(self, content: str, base: int) -> tuple[str, str | None]:
        """Under the paper dialect a final ``#`` line is general feedback.

        The ``#`` must start its own line, something must precede it, and
        no answer entries may follow; otherwise it is ordinary feedback.
        """
        if self.dialect != "paper":
            return content, None
        i = 0
        while True:
            idx = _find_unescaped(content, "#", i)
            if idx == -1 or content.startswith("####", idx):
                return content, None
            head = content[:idx]
            _, _, last_line = head.rpartition("\n")
            tail = content[idx + 1:]
            if (last_line.strip() == "" and head.strip()
                    and _find_unescaped(tail, "=") == -1
                    and _find_unescaped(tail, "~") == -1):
                general = self.field(tail, base + idx + 1)
                return head, general or None
            i = idx + 1

    def _parse_true_false(self, content: str, base: int) -> TrueFalseBody | None:
        segments = _split_unescaped(content, "#")
        word = segments[0].strip().upper()
        if word in TRUE_WORDS:
            answer = True
        elif word in FALSE_WORDS:
            answer = False
        else:
            return None
        if len(segments) > 3:
            self.fail("too-many-feedback",
                      "true/false takes at most two feedback fields "
                      "(wrong response, right response)", base)
        offset = base + len(segments[0]) + 1
        feedbacks: list[str | None] = []
        for seg in segments[1:]:
            feedbacks.append(self.field(seg, offset) or None)
            offset += len(seg) + 1
        feedbacks += [None, None]
        return TrueFalseBody(answer, feedback_wrong=feedbacks[0],
                             feedback_right=feedbacks[1])

    def _parse_numeric(self, content: str, base: int) -> NumericBody:
        lead = content.index("#")
        work = content[lead + 1:]
        offset = base + lead + 1

        # Entry form only when '=' markers precede any feedback.
        eq = _find_unescaped(work, "=")
        fb = _find_unescaped(work, "#")
        if eq == -1 or (fb != -1 and fb < eq):
            spec_raw, _, fb_raw = self._partition_unescaped(work, "#")
            spec = self._numeric_spec(spec_raw, offset)
            fb_off = offset + len(spec_raw) + 1
            feedback = self.field(fb_raw, fb_off) or None if fb_raw is not None else None
            return NumericBody((NumericEntry(spec, feedback=feedback),))

        if work[:eq].strip():
            self.fail("bad-numeric", "unexpected text before first '=' in numeric block",
                      offset)
        entries = []
        parts = _split_unescaped(work, "=")
        part_off = offset + len(parts[0]) + 1
        for part in parts[1:]:
            entries.append(self._numeric_entry(part, part_off))
            part_off += len(part) + 1
        return NumericBody(tuple(entries))

    def _numeric_entry(self, raw: str, offset: int) -> NumericEntry:
        weight, rest, rest_off = self._parse_weight(raw, offset)
        spec_raw, _, fb_raw = self._partition_unescaped(rest, "#")
        spec = self._numeric_spec(spec_raw, rest_off)
        feedback = None
        if fb_raw is not None:
            feedback = self.field(fb_raw, rest_off + len(spec_raw) + 1) or None
        try:
            return NumericEntry(spec, weight=weight, feedback=feedback)
        except ValueError as exc:
            self.fail("bad-numeric", str(exc), offset)

    def _numeric_spec(self, raw: str, offset: int) -> NumericPoint | NumericRange:
        token = raw.strip()
        if not token:
            self.fail("bad-numeric", "missing numeric answer", offset)
        try:
            if ".." in token:
                lo, hi = token.split("..", 1)
                return NumericRange(self._number(lo, offset), self._number(hi, offset))
            if ":" in token:
                value, tol = token.split(":", 1)
                return NumericPoint(self._number(value, offset), self._number(tol, offset))
            return NumericPoint(self._number(token, offset), 0.0)
        except ValueError as exc:
            self.fail("bad-numeric", str(exc), offset)

    def _number(self, raw: str, offset: int) -> float:
        token = raw.strip()
        try:
            value = float(token)
        except ValueError:
            self.fail("bad-numeric", f"{token!r} is not a number", offset)
        return value

    def _partition_unescaped(self, text: str, sep: str) -> tuple[str, str | None, str | None]:
        idx = _find_unescaped(text, sep)
        if idx == -1:
            return text, None, None
        return text[:idx], sep, text[idx + len(sep):]

    def _parse_weight(self, raw: str, offset: int) -> tuple[float | None, str, int]:
        """A ``%w%`` immediately after the marker is a credit weight."""
        if not raw.startswith("%"):
            return None, raw, offset
        end = _find_unescaped(raw, "%", 1)
        if end == -1:
            return None, raw, offset
        token = raw[1:end].strip()
        try:
            weight = float(token)
        except ValueError:
            return None, raw, offset
        if not -100.0 <= weight <= 100.0:
            self.fail("bad-weight", f"weight {token} outside [-100, 100]", offset)
        return weight, raw[end + 1:], offset + end + 1

    def _parse_entries(self, content: str, base: int) -> Body:
        entries = []  # (marker, raw, offset)
        i, n = 0, len(content)
        current_start = None
        current_marker = None
        while i < n:
            ch = content[i]
            if ch == "\\":
                i += 2
                continue
            if ch in "=~":
                if current_marker is None and content[:i].strip():
                    self.fail("marker-expected", "unexpected text before first answer marker",
                              base + _indent(content))
                if current_marker is not None:
                    entries.append((current_marker, content[current_start:i], base + current_start))
                current_marker = ch
                current_start = i + 1
            i += 1
        if current_marker is not None:
            entries.append((current_marker, content[current_start:], base + current_start))
        if not entries:
            self.fail("marker-expected", "no answer entries found", base)

        arrows = [_find_unescaped(raw, "->") != -1 for _, raw, _ in entries]
        if any(arrows):
            if not all(arrows):
                self.fail("mixed-matching",
                          "cannot mix match pairs ('->') with plain answers",
                          entries[arrows.index(False)][2])
            return self._parse_matching(entries)

        parsed = [self._parse_choice(marker, raw, off) for marker, raw, off in entries]
        markers = [marker for marker, _, _ in entries]

        if all(m == "=" for m in markers):
            return ShortAnswerBody(tuple(parsed))

        choices = tuple(
            Choice(c.text, marker == "=", c.weight, c.feedback)
            for c, marker in zip(parsed, markers))
        if self.dialect == "moodle":
            collapsed = _collapse_weighted(choices)
            if collapsed is not None:
                choices = collapsed
        return ChoicesBody(choices)

    def _parse_choice(self, marker: str, raw: str, offset: int) -> Choice:
        weight, rest, rest_off = self._parse_weight(raw, offset)
        text_raw, _, fb_raw = self._partition_unescaped(rest, "#")
        text = self.field(text_raw, rest_off)
        if not text:
            self.fail("dangling-marker", f"'{marker}' marker with no answer text", offset)
        feedback = None
        if fb_raw is not None:
            feedback = self.field(fb_raw, rest_off + len(text_raw) + 1) or None
        return Choice(text, correct=True, weight=weight, feedback=feedback)

    def _parse_matching(self, entries) -> MatchingBody:
        pairs = []
        for marker, raw, offset in entries:
            if marker != "=":
                self.fail("bad-pair", "match pairs must be marked '='", offset)
            weight, rest, rest_off = self._parse_weight(raw, offset)
            if weight is not None:
                self.fail("matching-weight", "match pairs cannot carry weights", offset)
            pair_raw, _, fb_raw = self._partition_unescaped(rest, "#")
            if fb_raw is not None and fb_raw.strip():
                self.fail("matching-feedback", "match pairs cannot carry feedback", rest_off)
            arrow = _find_unescaped(pair_raw, "->")
            left = self.field(pair_raw[:arrow], rest_off)
            right = self.field(pair_raw[arrow + 2:], rest_off + arrow + 2)
            if not left or not right:
                self.fail("bad-pair", "both sides of a match pair must be non-empty", offset)
            pairs.append(MatchPair(left, right))
        return MatchingBody(tuple(pairs))


def _indent(text: str) -> int:
    return len(text) - len(text.lstrip())


def _collapse_weighted(choices: tuple[Choice, ...]) -> tuple[Choice, ...] | None:
    """Invert the canonical weighted multiple-response rewrite.

    A choice set that is exactly the weighted form the writer produces
    (all wrong-marked, all weighted, positives at the canonical fraction
    and negatives at its negation) collapses back to plain correct flags.
    """
    if any(c.correct for c in choices):
        return None
    if any(c.weight is None for c in choices):
        return None
    positive = [c for c in choices if c.weight > 0]
    if len(positive) < 2:
        return None
    fraction = nearest_moodle_fraction(100.0 / len(positive))
    for c in choices:
        expected = fraction if c.weight > 0 else -fraction
        if abs(c.weight - expected) > 1e-9:
            return None
    return tuple(Choice(c.text, c.weight > 0, None, c.feedback) for c in choices)


def parse_answer_block(content: str, dialect: str = "paper",
                       collect: list[Diagnostic] | None = None
                       ) -> tuple[Body, str | None]:
    """Parse the text between the braces into (body, general_feedback)."""
    parser = _BlockParser(content, dialect, diagnostics=collect)
    return parser._parse_block_content(content, 0)


def parse_question(block: str, dialect: str = "paper",
                   collect: list[Diagnostic] | None = None) -> Question:
    """Parse one question block. Raises ParseError on malformed input;
    warnings are appended to ``collect`` when given."""
    return _BlockParser(block, dialect, diagnostics=collect).parse()


def parse_document(text: str, dialect: str = "paper") -> ParseResult:
    """Parse a whole GIFT document.

    Never hard-fails on content: each malformed block contributes an
    error diagnostic and parsing continues with the next block.
    """
    if text.startswith("\ufeff"):
        text = text[1:]
    text = text.replace("\r\n", "\n").replace("\r", "\n")

    result = ParseResult()
    category: str | None = None
    block_lines: list[tuple[int, str]] = []

    def flush():
        nonlocal block_lines
        if not block_lines:
            return
        block_text = "\n".join(line for _, line in block_lines)
        line_map = [no for no, _ in block_lines]
        start_line = line_map[0]
        parser = _BlockParser(block_text, dialect, line_map=line_map,
                              diagnostics=result.diagnostics)
        try:
            question = parser.parse()
        except ParseError as exc:
            result.diagnostics.append(exc.to_diagnostic())
        else:
            result.questions.append(ParsedQuestion(question, category, start_line))
        block_lines = []

    for lineno, line in enumerate(text.split("\n"), start=1):
        stripped = line.strip()
        if not stripped:
            flush()
            continue
        if stripped.startswith("//"):
            continue
        if stripped.startswith("$CATEGORY:"):
            flush()
            category = stripped[len("$CATEGORY:"):].strip() or None
            continue
        block_lines.append((lineno, line))
    flush()
    return result
