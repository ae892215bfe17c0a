"""giftsmith: offline authoring, storage and exchange of GIFT quiz questions."""

from .model import (
    Body,
    Choice,
    ChoicesBody,
    Diagnostic,
    GiftError,
    LookupRow,
    Marker,
    MatchingBody,
    MatchPair,
    NumericBody,
    NumericEntry,
    NumericPoint,
    NumericRange,
    Question,
    QuestionType,
    ShortAnswerBody,
    TrueFalseBody,
    classify,
    generate_lookup_table,
    markers_from_flags,
    numeric_interval,
    pattern_from_flags,
    validate,
)
from .parser import (
    ParsedQuestion,
    ParseError,
    ParseResult,
    parse_answer_block,
    parse_document,
    parse_question,
    unescape_text,
)
from .writer import SerializeError, escape_text, serialize_document, serialize_question
from .bank import (
    Bank,
    BankError,
    BankFormatError,
    BankLockedError,
    Course,
    DuplicateCourseError,
    QuestionRecord,
    RecordFilter,
    UnknownCourseError,
    UnknownRecordError,
    ValidationFailed,
    add_question,
    create_course,
    export_gift,
    import_gift,
    list_records,
    open_bank,
    question_from_payload,
    question_to_payload,
    remove_question,
    save_bank,
    update_question,
)

__version__ = "0.1.0"
