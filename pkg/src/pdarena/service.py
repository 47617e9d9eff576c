"""Live-play session layer plus a small JSON-over-HTTP server.

A session wraps one match between a human (submitting one action per
decision point) and a configured agent.  Submitting an action books its
motion (agent detection first, then momentum accumulation), then advances
the engine frame by frame until the human's next decision point or the end
of the round, returning every intermediate frame plus the current
balancedness (and, with `debug`, the agent's dominance rate).

Endpoints::

    POST   /sessions               {"agent": {...}?, "seed": int?, "debug": bool?}
    POST   /sessions/{id}/action   {"action": "RIGHT_PUNCH"}
    GET    /sessions/{id}
    DELETE /sessions/{id}

The frame-batch payload is ``{"frames": [{"frame", "player": {"hp", "x",
"phase"}, "ai": {"hp", "x", "phase"}, "events": [...]}, ...], "bal": float,
"momenta": {...}, "pdr"?: float, "outcome"?: {...}}``.  Momenta ride along
so a client can verify the reported balancedness.  Sessions are
lock-serialized; concurrent sessions are independent.
"""

from __future__ import annotations

import json
import random
import threading
import uuid
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

from . import engine, health
from .agents import build_agent
from .config import load_roster
from .engine import GameState, Match, Phase, Side
from .errors import ConfigError, IllegalActionError
from .harness import derive_seed
from .health import SegmentMomenta, load_m2mm

AWAITING_INPUT = "AWAITING_INPUT"
ADVANCING = "ADVANCING"
FINISHED = "FINISHED"


def _char_payload(ch) -> dict:
    return {"hp": ch.hp, "x": ch.x, "phase": ch.phase.value}


def _event_payload(ev) -> dict:
    return {
        "attacker": ev.attacker.value,
        "action": ev.action,
        "damage_dealt": ev.damage_dealt,
        "blocked": ev.blocked,
    }


def _outcome_payload(outcome) -> dict:
    return {
        "winner": outcome.winner.value,
        "hp_diff": outcome.hp_diff,
        "end_frame": outcome.end_frame,
    }


class PlaySession:
    """One human-vs-agent match; all public methods hold the session lock."""

    def __init__(self, session_id: str, match: Match, agent, seed: int, debug: bool):
        self.id = session_id
        self.match = match
        self.agent = agent
        self.debug = debug
        self.state: GameState = match.new_round(seed)
        self.momenta = SegmentMomenta()
        self.agent_rng = random.Random(derive_seed(seed, "agent"))
        self.phase = AWAITING_INPUT
        self.lock = threading.Lock()

    def roster_payload(self) -> list[dict]:
        return [
            {
                "id": a.id,
                "kind": a.kind.value,
                "damage": a.damage,
                "reach": a.reach,
                "motion_id": a.motion_id,
            }
            for a in self.match.actions
        ]

    def snapshot(self) -> dict:
        with self.lock:
            payload = {
                "id": self.id,
                "phase": self.phase,
                "frame": self.state.frame,
                "player": _char_payload(self.state.player),
                "ai": _char_payload(self.state.ai),
                "bal": health.balancedness(self.momenta),
                "momenta": self.momenta.as_dict(),
            }
            outcome = engine.is_round_over(self.state)
            if outcome is not None:
                payload["outcome"] = _outcome_payload(outcome)
            if self.debug and hasattr(self.agent, "pdr"):
                payload["pdr"] = self.agent.pdr
            return payload

    def submit(self, action: str) -> dict:
        with self.lock:
            if self.phase == FINISHED:
                raise SessionFinished(self.id)
            legal = engine.legal_actions(self.state, Side.PLAYER)
            if action not in legal:
                raise IllegalActionError(f"{action!r} is not legal now (legal: {legal})")
            self.phase = ADVANCING
            try:
                motion = self.match.motion_of(action)
                if hasattr(self.agent, "on_player_motion"):
                    self.agent.on_player_motion(motion, self.momenta)
                self.momenta = health.accumulate(self.momenta, motion, self.match.table)
                frames = []
                outcome = None
                pa: str | None = action
                while True:
                    aa = None
                    if self.state.ai.phase is Phase.IDLE:
                        aa = self.agent.act(self.state, self.agent_rng)
                    self.state, events = engine.step(self.state, pa, aa)
                    pa = None
                    frames.append(
                        {
                            "frame": self.state.frame,
                            "player": _char_payload(self.state.player),
                            "ai": _char_payload(self.state.ai),
                            "events": [_event_payload(ev) for ev in events],
                        }
                    )
                    outcome = engine.is_round_over(self.state)
                    if outcome is not None or self.state.player.phase is Phase.IDLE:
                        break
                batch = {
                    "frames": frames,
                    "bal": health.balancedness(self.momenta),
                    "momenta": self.momenta.as_dict(),
                }
                if self.debug and hasattr(self.agent, "pdr"):
                    batch["pdr"] = self.agent.pdr
                if outcome is not None:
                    batch["outcome"] = _outcome_payload(outcome)
                    self.phase = FINISHED
                else:
                    self.phase = AWAITING_INPUT
                return batch
            except BaseException:
                if self.phase == ADVANCING:
                    self.phase = AWAITING_INPUT
                raise


class SessionNotFound(KeyError):
    pass


class SessionFinished(ValueError):
    pass


class SessionStore:
    """Thread-safe registry of live sessions."""

    def __init__(self, master_seed: int = 0):
        self.master_seed = master_seed
        self._sessions: dict[str, PlaySession] = {}
        self._lock = threading.Lock()
        self._counter = 0

    def create(self, cfg: dict | None = None) -> PlaySession:
        cfg = dict(cfg or {})
        agent_spec = dict(cfg.get("agent", {"kind": "pda"}))
        debug = bool(cfg.get("debug", False))
        actions, rules = load_roster(cfg.get("roster"))
        table = load_m2mm(cfg.get("m2mm"))
        match = Match(actions, rules, table)
        with self._lock:
            self._counter += 1
            n = self._counter
        seed = cfg.get("seed")
        if seed is None:
            seed = derive_seed(self.master_seed, "session", n)
        # live play favors latency over playing strength
        agent_spec.setdefault("mcts", {}).setdefault("iterations", 300)
        agent = build_agent(agent_spec, match, gate_seed=derive_seed(seed, "gate"))
        session = PlaySession(uuid.uuid4().hex, match, agent, seed, debug)
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> PlaySession:
        with self._lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise SessionNotFound(session_id)
        return session

    def close(self, session_id: str) -> None:
        with self._lock:
            if self._sessions.pop(session_id, None) is None:
                raise SessionNotFound(session_id)

    def close_all(self) -> None:
        with self._lock:
            self._sessions.clear()


def make_server(host: str = "127.0.0.1", port: int = 0, master_seed: int = 0) -> ThreadingHTTPServer:
    """Build (but do not start) the HTTP server; `port` 0 picks a free one."""
    store = SessionStore(master_seed)

    class Handler(BaseHTTPRequestHandler):
        def log_message(self, *args):  # quiet by default
            pass

        def _send(self, code: int, payload: dict) -> None:
            body = json.dumps(payload).encode()
            self.send_response(code)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.send_header("Access-Control-Allow-Origin", "*")
            self.send_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS")
            self.send_header("Access-Control-Allow-Headers", "Content-Type")
            self.end_headers()
            self.wfile.write(body)

        def _json_body(self) -> dict:
            length = int(self.headers.get("Content-Length") or 0)
            if length == 0:
                return {}
            raw = self.rfile.read(length)
            try:
                parsed = json.loads(raw)
            except json.JSONDecodeError:
                raise ValueError("request body is not valid JSON")
            if not isinstance(parsed, dict):
                raise ValueError("request body must be a JSON object")
            return parsed

        def _route(self) -> tuple[str, str | None, str | None]:
            parts = [p for p in self.path.split("?")[0].split("/") if p]
            if not parts or parts[0] != "sessions":
                return ("", None, None)
            session_id = parts[1] if len(parts) > 1 else None
            tail = parts[2] if len(parts) > 2 else None
            return ("sessions", session_id, tail)

        def do_OPTIONS(self):  # CORS preflight for browser clients
            self._send(204, {})

        def do_POST(self):
            root, session_id, tail = self._route()
            try:
                if root == "sessions" and session_id is None:
                    session = store.create(self._json_body())
                    payload = session.snapshot()
                    payload["roster"] = session.roster_payload()
                    self._send(201, payload)
                elif root == "sessions" and tail == "action":
                    body = self._json_body()
                    action = body.get("action")
                    if not isinstance(action, str):
                        raise ValueError("body must carry an 'action' string")
                    session = store.get(session_id)
                    self._send(200, session.submit(action))
                else:
                    self._send(404, {"error": f"no such route {self.path!r}"})
            except SessionNotFound:
                self._send(404, {"error": f"unknown session {session_id!r}"})
            except SessionFinished:
                self._send(409, {"error": "session is finished"})
            except (ConfigError, IllegalActionError, ValueError) as exc:
                self._send(400, {"error": str(exc)})

        def do_GET(self):
            root, session_id, tail = self._route()
            if root != "sessions" or session_id is None or tail is not None:
                self._send(404, {"error": f"no such route {self.path!r}"})
                return
            try:
                self._send(200, store.get(session_id).snapshot())
            except SessionNotFound:
                self._send(404, {"error": f"unknown session {session_id!r}"})

        def do_DELETE(self):
            root, session_id, tail = self._route()
            if root != "sessions" or session_id is None or tail is not None:
                self._send(404, {"error": f"no such route {self.path!r}"})
                return
            try:
                store.close(session_id)
                self._send(200, {"closed": session_id})
            except SessionNotFound:
                self._send(404, {"error": f"unknown session {session_id!r}"})

    server = ThreadingHTTPServer((host, port), Handler)
    server.store = store  # type: ignore[attr-defined]
    return server


def serve(host: str = "127.0.0.1", port: int = 8640, master_seed: int = 0) -> None:
    server = make_server(host, port, master_seed)
    print(f"play service listening on http://{host}:{server.server_address[1]}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
