"""Local authoring service.

A loopback-only HTTP server exposing the bank and the serializer to the
browser front end. Every mutation goes through the same validate and
classify path as the library and the CLI, is persisted before the
response is sent, and is serialized through a single writer; reads serve
the last committed bank value.

Endpoints (JSON request/response bodies unless noted):

    GET    /api/courses
    POST   /api/courses              {course_id, subject}
    GET    /api/questions?course=&type=
    POST   /api/questions            {course_id, question[, dialect]}
    PUT    /api/questions/{id}       {question[, dialect]}
    DELETE /api/questions/{id}
    POST   /api/preview              {question[, dialect]} -> {gift, ...}
    GET    /api/export?course=&type=&dialect=   (text/plain attachment)
    POST   /api/import               {course_id, gift[, dialect]}
    GET    /  and  /assets/*         static front-end files

Error responses carry {"diagnostics": [...]}: 400 for parse/validation
failures, 404 for unknown resources, 409 for duplicate courses, 500 for
persistence failures.
"""

from __future__ import annotations

import json
import mimetypes
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from urllib.parse import parse_qs, urlsplit

from .bank import (
    Bank,
    BankError,
    DuplicateCourseError,
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
from .model import Diagnostic, classify, validate
from .writer import SerializeError, serialize_question

DEFAULT_PORT = 8787
_QUESTION_PATH = re.compile(r"/api/questions/(\d+)\Z")
_WEBUI_DIR = Path(__file__).parent / "webui"

_PLACEHOLDER_PAGE = b"""<!doctype html>
<html><head><meta charset="utf-8"><title>giftsmith</title></head>
<body><h1>giftsmith authoring service</h1>
<p>The service is running. The browser front end is not bundled in this
build; the /api endpoints are fully available.</p></body></html>
"""


def _diag_payload(diag: Diagnostic) -> dict:
    return {"severity": diag.severity, "code": diag.code,
            "message": diag.message, "line": diag.line, "column": diag.column}


def _error_body(status: int, code: str, message: str) -> tuple[int, dict, bytes]:
    body = {"diagnostics": [{"severity": "error", "code": code,
                             "message": message, "line": None, "column": None}]}
    return _json_response(status, body)


def _json_response(status: int, payload) -> tuple[int, dict, bytes]:
    data = json.dumps(payload, ensure_ascii=False).encode("utf-8")
    return status, {"Content-Type": "application/json; charset=utf-8"}, data


class AuthoringService:
    """Request handling core, independent of the socket layer."""

    def __init__(self, bank_path, webui_dir: Path | None = None):
        self.bank_path = Path(bank_path)
        self.bank: Bank = open_bank(self.bank_path)
        self.webui_dir = Path(webui_dir) if webui_dir is not None else _WEBUI_DIR
        self._write_lock = threading.Lock()

    # Mutations run under one lock and hit disk before the new value is
    # published, so any 2xx response survives a crash and restart.
    def _commit(self, fn):
        with self._write_lock:
            new_bank, result = fn(self.bank)
            save_bank(new_bank, self.bank_path)
            self.bank = new_bank
            return result

    def handle_request(self, method: str, path: str,
                       body: bytes | str | None = None) -> tuple[int, dict, bytes]:
        """Serve one request; returns (status, headers, body bytes)."""
        parts = urlsplit(path)
        route = parts.path
        query = {k: v[-1] for k, v in parse_qs(parts.query).items()}
        try:
            return self._route(method.upper(), route, query, body)
        except UnknownCourseError as exc:
            return _error_body(404, "unknown-course", str(exc))
        except UnknownRecordError as exc:
            return _error_body(404, "unknown-record", str(exc))
        except DuplicateCourseError as exc:
            return _error_body(409, "duplicate-course", str(exc))
        except ValidationFailed as exc:
            return _json_response(400, {"diagnostics": [
                _diag_payload(d) for d in exc.diagnostics]})
        except SerializeError as exc:
            return _json_response(400, {"diagnostics": [
                _diag_payload(d) for d in exc.diagnostics]})
        except BankError as exc:
            return _error_body(400, "bad-request", str(exc))
        except ValueError as exc:
            return _error_body(400, "bad-payload", str(exc))
        except OSError as exc:
            return _error_body(500, "persistence-failure", str(exc))

    def _route(self, method, route, query, body):
        if route == "/api/courses":
            if method == "GET":
                return self._get_courses()
            if method == "POST":
                return self._post_course(_json_body(body))
        if route == "/api/questions":
            if method == "GET":
                return self._get_questions(query)
            if method == "POST":
                return self._post_question(_json_body(body))
        match = _QUESTION_PATH.match(route)
        if match:
            record_id = int(match.group(1))
            if method == "PUT":
                return self._put_question(record_id, _json_body(body))
            if method == "DELETE":
                return self._delete_question(record_id)
        if route == "/api/preview" and method == "POST":
            return self._post_preview(_json_body(body))
        if route == "/api/export" and method == "GET":
            return self._get_export(query)
        if route == "/api/import" and method == "POST":
            return self._post_import(_json_body(body))
        if method == "GET" and not route.startswith("/api/"):
            return self._static(route)
        return _error_body(404, "not-found", f"no such endpoint: {method} {route}")

    # -- courses --

    def _get_courses(self):
        bank = self.bank
        return _json_response(200, {"courses": [
            {"course_id": c.course_id, "subject": c.subject} for c in bank.courses]})

    def _post_course(self, payload):
        course_id = _require(payload, "course_id")
        subject = _require(payload, "subject")
        self._commit(lambda b: (create_course(b, course_id, subject), None))
        return _json_response(201, {"course_id": course_id, "subject": subject})

    # -- questions --

    def _record_payload(self, record):
        return {
            "record_id": record.record_id,
            "course_id": record.course_id,
            "qtype_code": record.qtype_code,
            "question": question_to_payload(record.question),
            "created_at": record.created_at.isoformat(),
            "updated_at": record.updated_at.isoformat(),
        }

    def _get_questions(self, query):
        record_filter = RecordFilter(
            course_id=query.get("course") or None,
            qtype_code=int(query["type"]) if query.get("type") else None,
            title_substring=query.get("title") or None,
        )
        records = list_records(self.bank, record_filter)
        return _json_response(200, {"questions": [
            self._record_payload(r) for r in records]})

    def _post_question(self, payload):
        course_id = _require(payload, "course_id")
        question = question_from_payload(_require(payload, "question"))
        dialect = payload.get("dialect", "paper")
        record_id = self._commit(
            lambda b: add_question(b, course_id, question, dialect))
        return _json_response(201, {"record_id": record_id})

    def _put_question(self, record_id, payload):
        question = question_from_payload(_require(payload, "question"))
        dialect = payload.get("dialect", "paper")
        self._commit(
            lambda b: (update_question(b, record_id, question, dialect), None))
        return _json_response(200, {"record_id": record_id})

    def _delete_question(self, record_id):
        self._commit(lambda b: (remove_question(b, record_id), None))
        return _json_response(200, {"removed": record_id})

    # -- interchange --

    def _post_preview(self, payload):
        question = question_from_payload(_require(payload, "question"))
        dialect = payload.get("dialect", "paper")
        diagnostics = validate(question, dialect)
        gift = serialize_question(question, dialect)
        return _json_response(200, {
            "gift": gift,
            "qtype_code": classify(question).code,
            "diagnostics": [_diag_payload(d) for d in diagnostics],
        })

    def _get_export(self, query):
        course = query.get("course") or None
        if course is not None:
            self.bank.course(course)
        record_filter = RecordFilter(
            course_id=course,
            qtype_code=int(query["type"]) if query.get("type") else None,
        )
        dialect = query.get("dialect", "paper")
        text = export_gift(self.bank, record_filter, dialect)
        name = f"{course or 'bank'}.gift"
        headers = {
            "Content-Type": "text/plain; charset=utf-8",
            "Content-Disposition": f'attachment; filename="{name}"',
        }
        return 200, headers, text.encode("utf-8")

    def _post_import(self, payload):
        course_id = _require(payload, "course_id")
        gift = _require(payload, "gift")
        dialect = payload.get("dialect", "paper")

        box = {}

        def apply(bank):
            new_bank, ids, diagnostics = import_gift(bank, course_id, gift, dialect)
            box["ids"], box["diagnostics"] = ids, diagnostics
            return new_bank, None

        self._commit(apply)
        return _json_response(200, {
            "record_ids": box["ids"],
            "diagnostics": [_diag_payload(d) for d in box["diagnostics"]],
        })

    # -- static front end --

    def _static(self, route):
        if route == "/":
            route = "/index.html"
        relative = route.lstrip("/")
        base = self.webui_dir.resolve()
        target = (base / relative).resolve()
        if base not in target.parents and target != base:
            return _error_body(404, "not-found", "no such file")
        if target.is_file():
            ctype = mimetypes.guess_type(target.name)[0] or "application/octet-stream"
            if ctype.startswith("text/") or ctype in ("application/javascript",
                                                      "application/json"):
                ctype += "; charset=utf-8"
            return 200, {"Content-Type": ctype}, target.read_bytes()
        if route == "/index.html":
            return 200, {"Content-Type": "text/html; charset=utf-8"}, _PLACEHOLDER_PAGE
        return _error_body(404, "not-found", f"no such file: {route}")


def _require(payload, key):
    if not isinstance(payload, dict) or key not in payload or payload[key] is None:
        raise ValueError(f"request body must carry {key!r}")
    return payload[key]


def _json_body(body) -> dict:
    if body is None or body == b"" or body == "":
        raise ValueError("request body must be a JSON object")
    if isinstance(body, bytes):
        body = body.decode("utf-8")
    try:
        payload = json.loads(body)
    except json.JSONDecodeError as exc:
        raise ValueError(f"request body is not valid JSON: {exc}") from None
    if not isinstance(payload, dict):
        raise ValueError("request body must be a JSON object")
    return payload


class _Handler(BaseHTTPRequestHandler):
    service: AuthoringService = None  # set by make_server
    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):  # quiet by default
        pass

    def _serve(self):
        length = int(self.headers.get("Content-Length") or 0)
        body = self.rfile.read(length) if length else None
        status, headers, payload = self.service.handle_request(
            self.command, self.path, body)
        self.send_response(status)
        for key, value in headers.items():
            self.send_header(key, value)
        self.send_header("Content-Length", str(len(payload)))
        self.end_headers()
        self.wfile.write(payload)

    do_GET = do_POST = do_PUT = do_DELETE = _serve


def make_server(bank_path, port: int = DEFAULT_PORT, host: str = "127.0.0.1",
                webui_dir: Path | None = None) -> ThreadingHTTPServer:
    """Build a ready-to-run loopback server around a bank file."""
    service = AuthoringService(bank_path, webui_dir=webui_dir)
    handler = type("BoundHandler", (_Handler,), {"service": service})
    return ThreadingHTTPServer((host, port), handler)


def serve_forever(bank_path, port: int = DEFAULT_PORT) -> None:
    server = make_server(bank_path, port=port)
    host, actual_port = server.server_address[:2]
    print(f"giftsmith authoring service on http://{host}:{actual_port}/ "
          f"(bank: {bank_path})")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
