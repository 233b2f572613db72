"""HTTP service: batch generation, interactive sessions, query helpers.

Sessions live in memory, serialized per session id; an optional JSON
store file snapshots every state change for best-effort recovery.
"""

from __future__ import annotations

import io
import json
import threading
import uuid
from pathlib import Path
from typing import Dict, List, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .generation import GenerationConfig, GenerationError, GenerationSession
from .karaoke import KaraokeError, bind_timings, emit_lrc, parse_timing
from .lm.external import handle_request
from .rhyme import RhymeError, rhyming_candidates
from .runtime import EngineResources
from .scheme import (
    NoRhyme,
    RhymeIndex,
    RhymeLiteral,
    SchemeError,
    parse_scheme,
    seed_rhyme_map,
    validate_scheme,
)
from .phonetics import syllable_count_text


class CreateSessionRequest(BaseModel):
    prompt: str
    scheme: str
    config: Dict = Field(default_factory=dict)


class ChoiceRequest(BaseModel):
    candidate_index: int


class GenerateRequest(BaseModel):
    prompt: str
    scheme: str
    config: Dict = Field(default_factory=dict)


class KaraokeRequest(BaseModel):
    lines: List[str]
    timing: str


class ValidateRequest(BaseModel):
    scheme: str


class _SessionEntry:
    def __init__(self, session: GenerationSession):
        self.session = session
        self.lock = threading.Lock()


def _scheme_grid(scheme) -> List[List[Dict]]:
    grid = []
    for line in scheme.lines:
        row = []
        for segment in line:
            rhyme: Dict = {"kind": "none"}
            if isinstance(segment.rhyme, RhymeIndex):
                rhyme = {"kind": "index", "index": segment.rhyme.index}
            elif isinstance(segment.rhyme, RhymeLiteral):
                rhyme = {"kind": "literal", "phrase": segment.rhyme.phrase}
            row.append(
                {
                    "syllables": segment.syllables,
                    "rhyme": rhyme,
                    "end_sentence": segment.end_sentence,
                }
            )
        grid.append(row)
    return grid


def _config_from_dict(payload: Dict) -> GenerationConfig:
    try:
        return GenerationConfig(**payload)
    except (TypeError, ValueError) as exc:
        raise HTTPException(status_code=400, detail=f"bad config: {exc}") from exc


def create_app(
    resources: EngineResources, session_store: Optional[Path] = None
) -> FastAPI:
    app = FastAPI(title="parodist", version="0.1.0")
    sessions: Dict[str, _SessionEntry] = {}
    store_lock = threading.Lock()

    def _persist() -> None:
        if session_store is None:
            return
        with store_lock:
            payload = {
                sid: entry.session.snapshot() for sid, entry in sessions.items()
            }
            Path(session_store).write_text(json.dumps(payload), encoding="utf-8")

    def _recover() -> None:
        if session_store is None or not Path(session_store).exists():
            return
        try:
            payload = json.loads(Path(session_store).read_text(encoding="utf-8"))
            for sid, snapshot in payload.items():
                sessions[sid] = _SessionEntry(
                    GenerationSession.restore(
                        snapshot,
                        resources.model,
                        resources.dictionary,
                        resources.rdict,
                    )
                )
        except Exception:
            sessions.clear()  # recovery is best-effort

    _recover()

    def _session_view(session_id: str, session: GenerationSession) -> Dict:
        return {
            "id": session_id,
            "status": session.status,
            "cursor": {"line": session.line_index, "segment": session.segment_index},
            "prompt": session.prompt,
            "scheme_grid": _scheme_grid(session.scheme),
            "config": session.config.__dict__,
            "rhyme_map": {str(k): v for k, v in session.rhyme_map.as_dict().items()},
            "pending": [c.to_dict() for c in session.pending],
            "sampled_index": session.sampled_index,
            "completed_lines": list(session.raw_lines),
            "current_segments": list(session._segment_texts[session.line_index])
            if session.line_index < len(session.scheme.lines)
            else [],
            "degraded": session.degraded,
            "notes": list(session.notes),
            "result": session.result.to_dict() if session.result else None,
        }

    def _entry(session_id: str) -> _SessionEntry:
        entry = sessions.get(session_id)
        if entry is None:
            raise HTTPException(status_code=404, detail=f"no session {session_id}")
        return entry

    def _parse_and_validate(scheme_text: str):
        try:
            scheme = parse_scheme(scheme_text)
        except SchemeError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        violations = validate_scheme(scheme, resources.dictionary)
        if violations:
            raise HTTPException(
                status_code=400,
                detail={"violations": [str(v) for v in violations]},
            )
        return scheme

    @app.post("/v1/sessions")
    def create_session(request: CreateSessionRequest) -> Dict:
        scheme = _parse_and_validate(request.scheme)
        config = _config_from_dict(request.config)
        seeds = seed_rhyme_map(scheme.seeds, resources.dictionary)
        session = GenerationSession(
            resources.model,
            request.prompt,
            scheme,
            seeds,
            config,
            resources.dictionary,
            resources.rdict,
        )
        try:
            session.step()
        except GenerationError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
        session_id = uuid.uuid4().hex
        sessions[session_id] = _SessionEntry(session)
        _persist()
        return _session_view(session_id, session)

    @app.get("/v1/sessions/{session_id}")
    def get_session(session_id: str) -> Dict:
        entry = _entry(session_id)
        with entry.lock:
            return _session_view(session_id, entry.session)

    @app.post("/v1/sessions/{session_id}/choice")
    def choose(session_id: str, request: ChoiceRequest) -> Dict:
        entry = _entry(session_id)
        with entry.lock:
            session = entry.session
            if session.status != "awaiting_choice":
                raise HTTPException(
                    status_code=409,
                    detail=f"session is {session.status}, not awaiting a choice",
                )
            if not 0 <= request.candidate_index < len(session.pending):
                raise HTTPException(
                    status_code=400,
                    detail=f"candidate_index {request.candidate_index} out of range",
                )
            try:
                session.choose(request.candidate_index)
            except GenerationError as exc:
                raise HTTPException(status_code=500, detail=str(exc)) from exc
            _persist()
            return _session_view(session_id, session)

    @app.post("/v1/generate")
    def generate(request: GenerateRequest) -> Dict:
        scheme = _parse_and_validate(request.scheme)
        config = _config_from_dict(request.config)
        seeds = seed_rhyme_map(scheme.seeds, resources.dictionary)
        session = GenerationSession(
            resources.model,
            request.prompt,
            scheme,
            seeds,
            config,
            resources.dictionary,
            resources.rdict,
        )
        try:
            result = session.run_auto()
        except GenerationError as exc:
            raise HTTPException(status_code=500, detail=str(exc)) from exc
        return result.to_dict()

    @app.post("/v1/karaoke")
    def karaoke(request: KaraokeRequest) -> Dict:
        try:
            track = parse_timing(io.StringIO(request.timing))
            timed = bind_timings(request.lines, track)
            return {"lrc": emit_lrc(timed)}
        except KaraokeError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    @app.get("/v1/rhymes/{word}")
    def rhymes(word: str) -> Dict:
        try:
            found = sorted(rhyming_candidates(resources.rdict, word))
        except RhymeError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        return {"word": word.lower(), "rhymes": found}

    @app.get("/v1/syllables")
    def syllables(text: str = "") -> Dict:
        return {
            "text": text,
            "syllables": syllable_count_text(resources.dictionary, text),
        }

    @app.post("/v1/validate")
    def validate(request: ValidateRequest) -> Dict:
        try:
            scheme = parse_scheme(request.scheme)
        except SchemeError as exc:
            return {"violations": [str(exc)], "parsed": False}
        violations = validate_scheme(scheme, resources.dictionary)
        return {"violations": [str(v) for v in violations], "parsed": True}

    @app.post("/v1/lm")
    def lm_endpoint(request: Dict) -> Dict:
        # the wire protocol handles its own errors; responses are always 200
        return handle_request(resources.model, request)

    return app
