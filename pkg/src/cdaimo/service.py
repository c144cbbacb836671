"""Session-scoped HTTP facade for the workbench.

Endpoints (all bodies canonical JSON):

    POST   /sessions                {"scenario": text} -> {"session", "version", "warnings"}
    GET    /sessions/{id}/kb        schema + individuals + assertions (offset/limit paging)
    POST   /sessions/{id}/assert    {"directive": line, "version"?} -> accepted entry or 400
    POST   /sessions/{id}/reason    machine-format report, byte-identical to the CLI's
    GET    /sessions/{id}/explain   ?fact=<ind> is <Class> | <subj> <prop> <obj-or-literal>
    POST   /sessions/{id}/whatif    {"overrides": [...]} -> {"base", "whatif", "diff"}
    DELETE /sessions/{id}

Sessions are in-memory with idle expiry and are independent of each other.
Within a session, writes are serialized: an `assert` carrying a stale
`version` is rejected with 409 and the current version. Reads run against
the last loaded snapshot. The server binds to loopback unless told
otherwise; there is no authentication, so exposing it more widely exposes
every loaded scenario.
"""

from __future__ import annotations

import json
import re
import threading
import time
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Optional

from .kb import render_value
from .metrics import report_jsonable
from .reasoner import UnknownFact, explain
from .scenario import (
    LoadResult,
    ScenarioError,
    load_scenario,
    parse_fact_query,
    reason,
    whatif,
    write_report,
)

DEFAULT_PORT = 8787
DEFAULT_TTL = 3600


def canonical_json(obj) -> bytes:
    return (json.dumps(obj, sort_keys=True, indent=2, ensure_ascii=False) + "\n").encode("utf-8")


class _Session:
    def __init__(self, sid: str, base_text: str, load: LoadResult):
        self.id = sid
        self.base_text = base_text if base_text.endswith("\n") else base_text + "\n"
        self.overlay: list[str] = []
        self.version = 0
        self.lock = threading.Lock()
        self.last_access = time.time()
        self._load = load  # snapshot for the current version
        self._reason_cache: Optional[tuple[int, object, bytes]] = None

    def text(self) -> str:
        return self.base_text + "".join(line + "\n" for line in self.overlay)

    def snapshot(self) -> LoadResult:
        return self._load

    def accept(self, directive: str, load: LoadResult):
        self.overlay.append(directive)
        self.version += 1
        self._load = load
        self._reason_cache = None

    def reason_bytes(self):
        """(SaturationResult, machine report bytes) for the current version."""
        cached = self._reason_cache
        if cached and cached[0] == self.version:
            return cached[1], cached[2]
        result, report = reason(self._load)
        data = write_report(report, "machine")
        self._reason_cache = (self.version, result, data)
        return result, data


class _Registry:
    def __init__(self, ttl: int):
        self.ttl = ttl
        self.lock = threading.Lock()
        self.sessions: dict[str, _Session] = {}

    def purge(self):
        now = time.time()
        with self.lock:
            dead = [k for k, s in self.sessions.items() if now - s.last_access > self.ttl]
            for k in dead:
                del self.sessions[k]

    def create(self, text: str, load: LoadResult) -> _Session:
        s = _Session(uuid.uuid4().hex, text, load)
        with self.lock:
            self.sessions[s.id] = s
        return s

    def get(self, sid: str) -> Optional[_Session]:
        with self.lock:
            s = self.sessions.get(sid)
        if s:
            s.last_access = time.time()
        return s

    def drop(self, sid: str) -> bool:
        with self.lock:
            return self.sessions.pop(sid, None) is not None


class _ApiError(Exception):
    def __init__(self, status: int, code: str, message: str, **extra):
        self.status = status
        self.body = {"code": code, "message": message, **extra}
        super().__init__(message)


def _positioned(e: ScenarioError) -> _ApiError:
    return _ApiError(400, e.code, e.message, line=e.line, column=e.column)


_SESSION_PATH = re.compile(r"^/sessions/([0-9a-f]{32})(?:/([a-z]+))?$")


class _Handler(BaseHTTPRequestHandler):
    protocol_version = "HTTP/1.1"
    server_version = "cdaimo"
    registry: _Registry = None  # injected by run_server / make_server

    def log_message(self, fmt, *args):  # quiet by default
        pass

    # -- plumbing -------------------------------------------------------------

    def _send(self, status: int, body: bytes, content_type="application/json; charset=utf-8"):
        self.send_response(status)
        self.send_header("Content-Type", content_type)
        self.send_header("Content-Length", str(len(body)))
        self.send_header("Access-Control-Allow-Origin", "*")
        self.end_headers()
        if body:
            self.wfile.write(body)

    def _send_json(self, status: int, obj):
        self._send(status, canonical_json(obj))

    def _read_json(self) -> dict:
        length = int(self.headers.get("Content-Length") or 0)
        raw = self.rfile.read(length) if length else b""
        if not raw:
            raise _ApiError(400, "BadRequest", "request body must be a JSON object")
        try:
            obj = json.loads(raw.decode("utf-8"))
        except (ValueError, UnicodeDecodeError) as e:
            raise _ApiError(400, "BadRequest", f"malformed JSON body: {e}")
        if not isinstance(obj, dict):
            raise _ApiError(400, "BadRequest", "request body must be a JSON object")
        return obj

    def _session(self, sid: str) -> _Session:
        s = self.registry.get(sid)
        if s is None:
            raise _ApiError(404, "UnknownSession", f"no session {sid!r}")
        return s

    def _dispatch(self, method: str):
        self.registry.purge()
        try:
            path, _, query = self.path.partition("?")
            if method == "OPTIONS":
                self.send_response(204)
                self.send_header("Access-Control-Allow-Origin", "*")
                self.send_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS")
                self.send_header("Access-Control-Allow-Headers", "Content-Type")
                self.send_header("Content-Length", "0")
                self.end_headers()
                return
            if path == "/" and method == "GET":
                self._send_json(200, {
                    "service": "cdaimo",
                    "endpoints": [
                        "POST /sessions", "GET /sessions/{id}/kb",
                        "POST /sessions/{id}/assert", "POST /sessions/{id}/reason",
                        "GET /sessions/{id}/explain?fact=...",
                        "POST /sessions/{id}/whatif", "DELETE /sessions/{id}",
                    ],
                })
                return
            if path == "/sessions" and method == "POST":
                self._create_session()
                return
            m = _SESSION_PATH.match(path)
            if not m:
                raise _ApiError(404, "NotFound", f"no route {method} {path}")
            sid, action = m.group(1), m.group(2)
            if action is None and method == "DELETE":
                if not self.registry.drop(sid):
                    raise _ApiError(404, "UnknownSession", f"no session {sid!r}")
                self._send(204, b"")
                return
            handler = {
                ("GET", "kb"): self._get_kb,
                ("POST", "assert"): self._post_assert,
                ("POST", "reason"): self._post_reason,
                ("GET", "explain"): self._get_explain,
                ("POST", "whatif"): self._post_whatif,
            }.get((method, action))
            if handler is None:
                raise _ApiError(404, "NotFound", f"no route {method} {path}")
            handler(self._session(sid), query)
        except _ApiError as e:
            self._send_json(e.status, e.body)
        except BrokenPipeError:
            pass
        except Exception as e:  # defensive: surface, do not kill the thread
            self._send_json(500, {"code": "InternalError", "message": f"{type(e).__name__}: {e}"})

    def do_GET(self):
        self._dispatch("GET")

    def do_POST(self):
        self._dispatch("POST")

    def do_DELETE(self):
        self._dispatch("DELETE")

    def do_OPTIONS(self):
        self._dispatch("OPTIONS")

    # -- endpoints -------------------------------------------------------------

    def _create_session(self):
        body = self._read_json()
        text = body.get("scenario")
        if not isinstance(text, str):
            raise _ApiError(400, "BadRequest", "body needs a string field 'scenario'")
        try:
            load = load_scenario(text)
        except ScenarioError as e:
            raise _positioned(e)
        s = self.registry.create(text, load)
        self._send_json(201, {
            "session": s.id,
            "version": s.version,
            "warnings": _warnings_json(load),
        })

    def _get_kb(self, s: _Session, query: str):
        params = _query_params(query)
        offset = _int_param(params, "offset", 0)
        limit = _int_param(params, "limit", 500)
        kb = s.snapshot().kb
        individuals = [
            {
                "name": i.name,
                "classes": sorted(i.asserted),
                "derived": sorted(i.derived),
                "skolem": i.skolem,
            }
            for i in (kb.individuals[k] for k in sorted(kb.individuals))
        ]
        data = [
            {"subject": a.subject, "property": a.property, "value": render_value(a.value)}
            for a in sorted(
                kb.data_assertions, key=lambda a: (a.subject, a.property, render_value(a.value))
            )
        ]
        objects = [
            {"subject": a.subject, "property": a.property, "object": a.object}
            for a in sorted(
                kb.object_assertions, key=lambda a: (a.subject, a.property, a.object)
            )
        ]
        page = lambda xs: xs[offset : offset + limit]
        self._send_json(200, {
            "scenario": s.snapshot().doc.id,
            "version": s.version,
            "classes": [
                {"name": c.name, "parents": sorted(c.parents)}
                for c in (kb.classes[k] for k in sorted(kb.classes))
            ],
            "enums": {k: list(v) for k, v in sorted(kb.enums.items())},
            "properties": [
                {
                    "name": p.name,
                    "kind": p.kind,
                    "range": p.range if isinstance(p.range, str) else sorted(p.range),
                    "domain": sorted(p.domain),
                }
                for p in (kb.properties[k] for k in sorted(kb.properties))
            ],
            "individuals": page(individuals),
            "data_assertions": page(data),
            "object_assertions": page(objects),
            "offset": offset,
            "limit": limit,
            "totals": {
                "individuals": len(individuals),
                "data_assertions": len(data),
                "object_assertions": len(objects),
            },
        })

    def _post_assert(self, s: _Session, query: str):
        body = self._read_json()
        directive = body.get("directive")
        if not isinstance(directive, str) or "\n" in directive:
            raise _ApiError(400, "BadRequest", "body needs a single-line string field 'directive'")
        with s.lock:
            expected = body.get("version")
            if expected is not None and expected != s.version:
                raise _ApiError(
                    409, "Conflict",
                    f"session moved on (expected version {expected}, now {s.version})",
                    version=s.version,
                )
            candidate = s.text() + directive + "\n"
            try:
                load = load_scenario(candidate)
            except ScenarioError as e:
                raise _positioned(e)
            s.accept(directive, load)
            self._send_json(200, {
                "accepted": directive,
                "version": s.version,
                "warnings": _warnings_json(load),
            })

    def _post_reason(self, s: _Session, query: str):
        _result, data = s.reason_bytes()
        self._send(200, data)

    def _get_explain(self, s: _Session, query: str):
        params = _query_params(query)
        fact_text = params.get("fact")
        if not fact_text:
            raise _ApiError(400, "BadRequest", "missing query parameter 'fact'")
        result, _data = s.reason_bytes()
        try:
            individual, fact = parse_fact_query(result.kb_after, fact_text)
            tree = explain(result, individual, fact)
        except ScenarioError as e:
            raise _positioned(e)
        except UnknownFact as e:
            raise _ApiError(404, "UnknownFact", str(e))
        self._send_json(200, {"fact": fact_text, "tree": tree.to_jsonable()})

    def _post_whatif(self, s: _Session, query: str):
        body = self._read_json()
        overrides = body.get("overrides", [])
        if not isinstance(overrides, list) or not all(isinstance(o, str) for o in overrides):
            raise _ApiError(400, "BadRequest", "'overrides' must be a list of strings")
        try:
            base, after, diff = whatif(s.snapshot(), overrides)
        except ScenarioError as e:
            raise _positioned(e)
        self._send_json(200, {
            "base": report_jsonable(base),
            "whatif": report_jsonable(after),
            "diff": diff,
        })


def _warnings_json(load: LoadResult) -> list[dict]:
    return [
        {"kind": w.kind, "severity": w.severity, "names": list(w.names), "message": w.message}
        for w in load.warnings
    ]


def _query_params(query: str) -> dict[str, str]:
    from urllib.parse import parse_qs, unquote_plus

    out = {}
    for k, vs in parse_qs(query, keep_blank_values=True).items():
        out[k] = unquote_plus(vs[0]) if vs else ""
    return out


def _int_param(params: dict, key: str, default: int) -> int:
    raw = params.get(key)
    if raw is None or raw == "":
        return default
    try:
        v = int(raw)
    except ValueError:
        raise _ApiError(400, "BadRequest", f"query parameter {key!r} must be an integer")
    if v < 0:
        raise _ApiError(400, "BadRequest", f"query parameter {key!r} must be >= 0")
    return v


def make_server(bind: str = "127.0.0.1", port: int = 0, session_ttl: int = DEFAULT_TTL):
    """Build (not start) a server; port 0 picks an ephemeral port."""
    registry = _Registry(ttl=session_ttl)
    handler = type("Handler", (_Handler,), {"registry": registry})
    return ThreadingHTTPServer((bind, port), handler)


def run_server(bind: str = "127.0.0.1", port: int = DEFAULT_PORT, session_ttl: int = DEFAULT_TTL):
    server = make_server(bind=bind, port=port, session_ttl=session_ttl)
    host, actual_port = server.server_address[:2]
    # flush so supervisors reading a pipe see the bound port immediately
    print(f"cdaimo workbench service on http://{host}:{actual_port} (Ctrl-C stops)", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
