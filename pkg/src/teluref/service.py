"""Annotation service: REST endpoints over a loaded corpus plus static UI assets.

The only write path is an append-only JSON-lines annotation log, flushed per
record; corpus files are never touched. Restarting the service replays the
log, so adjudication state is a pure function of the log contents. Reads run
concurrently; appends serialize through one lock.
"""

from __future__ import annotations

import json
import re
import threading
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path

from .corpus import (
    AnnotationRecord,
    Conversation,
    adjudicate,
    annotation_from_dict,
    annotation_to_dict,
    conversation_to_dict,
    load_annotations,
)
from .errors import TelurefError, ValidationError
from .features import conversation_mention_vectors, pair_vector
from .mlp import MlpModel, predict_pair

_CONTENT_TYPES = {
    ".html": "text/html; charset=utf-8",
    ".js": "text/javascript; charset=utf-8",
    ".mjs": "text/javascript; charset=utf-8",
    ".css": "text/css; charset=utf-8",
    ".json": "application/json; charset=utf-8",
    ".map": "application/json; charset=utf-8",
    ".svg": "image/svg+xml",
    ".ico": "image/x-icon",
    ".png": "image/png",
}


class AnnotationStore:
    """Append-only JSON-lines log with an in-memory mirror."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self.records: list[AnnotationRecord] = []
        if self.path.exists():
            self.records = load_annotations(self.path.read_bytes())

    def append(self, record: AnnotationRecord) -> None:
        line = json.dumps(annotation_to_dict(record), sort_keys=True, ensure_ascii=False)
        with self._lock:
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
            self.records.append(record)

    def for_conversation(self, conversation_id: str) -> list[AnnotationRecord]:
        with self._lock:
            return [r for r in self.records if r.conversation == conversation_id]


class ServiceState:
    def __init__(
        self,
        conversations: list[Conversation],
        store: AnnotationStore,
        model: MlpModel | None = None,
        table=None,
    ):
        self.conversations = {c.id: c for c in conversations}
        self.store = store
        self.model = model
        self.table = table

    # -- domain operations backing the endpoints --

    def conversation_index(self) -> list[dict]:
        return [
            {"id": conv_id, "mention_count": len(conv.mentions)}
            for conv_id, conv in sorted(self.conversations.items())
        ]

    def validate_pair_submission(self, conv: Conversation, body: dict) -> AnnotationRecord:
        record = annotation_from_dict({**body, "conversation": conv.id})
        try:
            antecedent = conv.mention_by_id(record.antecedent)
            anaphor = conv.mention_by_id(record.anaphor)
        except KeyError as exc:
            raise ValidationError(f"unknown mention id {exc.args[0]!r}") from exc
        if not conv.document_order(antecedent) < conv.document_order(anaphor):
            raise ValidationError(
                f"antecedent {record.antecedent!r} must precede anaphor {record.anaphor!r}"
            )
        return record

    def adjudication(self, conv: Conversation) -> dict:
        records = self.store.for_conversation(conv.id)
        annotators: list[str] = []
        for rec in records:
            if rec.annotator not in annotators:
                annotators.append(rec.annotator)
        by_annotator = {
            name: [r for r in records if r.annotator == name] for name in annotators
        }
        if len(annotators) < 2:
            gold, conflicts = ({}, [])
            if annotators:
                only = by_annotator[annotators[0]]
                gold = {(r.antecedent, r.anaphor): r.label for r in only}
        else:
            a3 = by_annotator[annotators[2]] if len(annotators) >= 3 else None
            gold, conflicts = adjudicate(
                by_annotator[annotators[0]], by_annotator[annotators[1]], a3
            )
        return {
            "annotators": annotators,
            "gold": [
                {"antecedent": a, "anaphor": b, "label": label}
                for (a, b), label in sorted(gold.items())
            ],
            "conflicts": [
                {
                    "antecedent": c.antecedent,
                    "anaphor": c.anaphor,
                    "labels": {
                        annotators[0]: c.labels[0],
                        annotators[1]: c.labels[1],
                    },
                    "resolved": c.resolution is not None,
                }
                for c in conflicts
            ],
            "needs_third_review": any(c.resolution is None for c in conflicts),
        }

    def suggestions(self, conv: Conversation, anaphor_id: str | None) -> dict:
        if self.model is None or self.table is None:
            raise TelurefError("no model loaded for suggestions")
        vectors = conversation_mention_vectors(conv, self.table)
        ordered = conv.mentions_in_order()
        out: dict[str, list[dict]] = {}
        for j, anaphor in enumerate(ordered):
            if j == 0 or (anaphor_id is not None and anaphor.id != anaphor_id):
                continue
            scored = [
                {
                    "antecedent": ordered[i].id,
                    "probability": predict_pair(
                        self.model,
                        pair_vector(vectors[ordered[i].id], vectors[anaphor.id]),
                    ),
                }
                for i in range(j)
            ]
            scored.sort(key=lambda s: -s["probability"])
            out[anaphor.id] = scored
        if anaphor_id is not None and anaphor_id not in out:
            raise ValidationError(f"no candidates for anaphor {anaphor_id!r}")
        return {"suggestions": out}


class _Handler(BaseHTTPRequestHandler):
    # class attributes injected by make_server
    state: ServiceState = None
    ui_dir: Path | None = None
    quiet: bool = True

    protocol_version = "HTTP/1.1"

    def log_message(self, fmt, *args):
        if not self.quiet:
            super().log_message(fmt, *args)

    # -- plumbing --

    def _send_json(self, payload, status: int = 200) -> None:
        body = json.dumps(payload, ensure_ascii=False).encode("utf-8")
        self.send_response(status)
        self.send_header("Content-Type", "application/json; charset=utf-8")
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)

    def _send_error_json(self, status: int, message: str) -> None:
        self._send_json({"error": message}, status=status)

    def _read_json_body(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        try:
            body = json.loads(raw.decode("utf-8") or "null")
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise ValidationError(f"request body is not valid JSON: {exc}") from exc
        if not isinstance(body, dict):
            raise ValidationError("request body must be a JSON object")
        return body

    def _conversation_or_404(self, conv_id: str) -> Conversation | None:
        conv = self.state.conversations.get(conv_id)
        if conv is None:
            self._send_error_json(404, f"unknown conversation {conv_id!r}")
        return conv

    # -- routing --

    _ROUTES = [
        (re.compile(r"^/api/conversations$"), "list_conversations"),
        (re.compile(r"^/api/conversations/([^/]+)$"), "get_conversation"),
        (re.compile(r"^/api/conversations/([^/]+)/pairs$"), "pairs"),
        (re.compile(r"^/api/conversations/([^/]+)/adjudication$"), "adjudication"),
        (re.compile(r"^/api/conversations/([^/]+)/suggestions$"), "suggestions"),
    ]

    def _dispatch(self, method: str) -> None:
        path, _, query = self.path.partition("?")
        for pattern, name in self._ROUTES:
            match = pattern.match(path)
            if match:
                handler = getattr(self, f"_{method}_{name}", None)
                if handler is None:
                    self._send_error_json(405, f"{method.upper()} not allowed on {path}")
                    return
                handler(*match.groups(), query=query)
                return
        if method == "get" and self._serve_static(path):
            return
        self._send_error_json(404, f"no route for {path}")

    def do_GET(self):  # noqa: N802  (http.server API)
        self._guarded(lambda: self._dispatch("get"))

    def do_POST(self):  # noqa: N802
        self._guarded(lambda: self._dispatch("post"))

    def _guarded(self, fn) -> None:
        try:
            fn()
        except ValidationError as exc:
            self._send_error_json(400, str(exc))
        except TelurefError as exc:
            self._send_error_json(503, str(exc))
        except Exception as exc:  # pragma: no cover - defensive
            self._send_error_json(500, f"internal error: {exc}")

    # -- endpoints --

    def _get_list_conversations(self, query: str = "") -> None:
        self._send_json(self.state.conversation_index())

    def _get_get_conversation(self, conv_id: str, query: str = "") -> None:
        conv = self._conversation_or_404(conv_id)
        if conv is not None:
            self._send_json(conversation_to_dict(conv))

    def _get_pairs(self, conv_id: str, query: str = "") -> None:
        conv = self._conversation_or_404(conv_id)
        if conv is None:
            return
        annotator = _query_param(query, "annotator")
        records = self.state.store.for_conversation(conv.id)
        if annotator is not None:
            records = [r for r in records if r.annotator == annotator]
        self._send_json([annotation_to_dict(r) for r in records])

    def _post_pairs(self, conv_id: str, query: str = "") -> None:
        conv = self._conversation_or_404(conv_id)
        if conv is None:
            return
        record = self.state.validate_pair_submission(conv, self._read_json_body())
        self.state.store.append(record)
        self._send_json(annotation_to_dict(record), status=201)

    def _get_adjudication(self, conv_id: str, query: str = "") -> None:
        conv = self._conversation_or_404(conv_id)
        if conv is not None:
            self._send_json(self.state.adjudication(conv))

    def _get_suggestions(self, conv_id: str, query: str = "") -> None:
        conv = self._conversation_or_404(conv_id)
        if conv is not None:
            self._send_json(self.state.suggestions(conv, _query_param(query, "anaphor")))

    # -- static assets --

    def _serve_static(self, path: str) -> bool:
        if self.ui_dir is None:
            if path == "/":
                self._send_json(
                    {
                        "service": "teluref-annotator",
                        "endpoints": [p.pattern for p, _ in self._ROUTES],
                        "ui": "no ui assets configured (pass --ui-dir)",
                    }
                )
                return True
            return False
        rel = path.lstrip("/") or "index.html"
        target = (self.ui_dir / rel).resolve()
        if not str(target).startswith(str(self.ui_dir.resolve())) or not target.is_file():
            return False
        body = target.read_bytes()
        self.send_response(200)
        ctype = _CONTENT_TYPES.get(target.suffix, "application/octet-stream")
        self.send_header("Content-Type", ctype)
        self.send_header("Content-Length", str(len(body)))
        self.end_headers()
        self.wfile.write(body)
        return True


def _query_param(query: str, name: str) -> str | None:
    for part in query.split("&"):
        key, _, value = part.partition("=")
        if key == name and value:
            return value
    return None


def make_server(
    state: ServiceState,
    host: str = "127.0.0.1",
    port: int = 0,
    ui_dir=None,
    quiet: bool = True,
) -> ThreadingHTTPServer:
    """Build the HTTP server (port 0 picks a free port); caller runs serve_forever."""
    handler = type(
        "BoundHandler",
        (_Handler,),
        {
            "state": state,
            "ui_dir": Path(ui_dir) if ui_dir else None,
            "quiet": quiet,
        },
    )
    return ThreadingHTTPServer((host, port), handler)
