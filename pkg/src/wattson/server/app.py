"""HTTP surface: REST endpoints plus server-sent-event streams."""

from __future__ import annotations

import json
from typing import Iterator

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from wattson.server.service import Busy, ChatService, StreamEvent, UnknownSession


class MessageBody(BaseModel):
    content: str


class ConfirmationBody(BaseModel):
    confirmation_id: str
    approved: bool


def create_app(service: ChatService) -> FastAPI:
    app = FastAPI(title="wattson", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[service.config.ui_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    app.state.service = service

    @app.post("/api/sessions")
    def create_session() -> dict:
        session = service.create_session()
        return {"session_id": session.session_id}

    @app.post("/api/sessions/{session_id}/messages")
    def post_message(session_id: str, body: MessageBody) -> StreamingResponse:
        try:
            events = service.post_message(session_id, body.content)
        except UnknownSession as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        except Busy as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from None
        return _sse_response(events)

    @app.post("/api/sessions/{session_id}/confirmations")
    def resolve_confirmation(session_id: str, body: ConfirmationBody) -> StreamingResponse:
        try:
            events = service.resolve_confirmation(
                session_id, body.confirmation_id, body.approved
            )
        except UnknownSession as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None
        except Busy as exc:
            raise HTTPException(status_code=409, detail=str(exc)) from None
        return _sse_response(events)

    @app.get("/api/sessions/{session_id}/history")
    def get_history(session_id: str) -> dict:
        try:
            return service.get_history(session_id)
        except UnknownSession as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from None

    @app.get("/api/health")
    def health() -> dict:
        return service.health()

    return app


def _sse_response(events: Iterator[StreamEvent]) -> StreamingResponse:
    def body() -> Iterator[str]:
        for event in events:
            yield _render_sse(event)

    return StreamingResponse(
        body(),
        media_type="text/event-stream",
        headers={"Cache-Control": "no-cache", "X-Accel-Buffering": "no"},
    )


def _render_sse(event: StreamEvent) -> str:
    return f"event: {event.kind}\ndata: {json.dumps(event.to_wire())}\n\n"
