"""Live two-client WebSocket server.

Connections are accepted in order as user 0 and user 1; a third connection
is refused with ``session_full``. Inbound frames are funneled into a single
asyncio queue together with tick events, so the session only ever mutates
from one totally-ordered loop; the event log streams to disk as the session
runs. A client disconnect is injected as a synthetic ``leave`` message so
logs stay replayable.
"""

from __future__ import annotations

import asyncio
import json
from pathlib import Path

from websockets.asyncio.server import serve as ws_serve
from websockets.exceptions import ConnectionClosed

from .model import WireframeModel
from .resolution import Strategy
from .session import DEFAULT_TICK_HZ, Session, tick_period_ms


class SessionServer:
    def __init__(
        self,
        model: WireframeModel,
        target: WireframeModel,
        strategy: Strategy,
        log_path: str | Path,
        tick_hz: float = DEFAULT_TICK_HZ,
    ):
        self.session = Session(model, target, strategy, tick_hz)
        self.tick_hz = tick_hz
        self.log_path = Path(log_path)
        self.queue: asyncio.Queue = asyncio.Queue()
        self.conns: dict = {}
        self.assigned = 0
        self._t0 = 0.0
        self._events_written = 0
        self._log_fh = None

    def _t_ms(self) -> float:
        return (asyncio.get_running_loop().time() - self._t0) * 1000.0

    async def handler(self, websocket) -> None:
        if self.assigned >= 2:
            await websocket.send(json.dumps({"type": "deny", "reason": "session_full"}) + "\n")
            await websocket.close()
            return
        user = self.assigned
        self.assigned += 1
        self.conns[user] = websocket
        try:
            async for raw in websocket:
                try:
                    msg = json.loads(raw)
                    if not isinstance(msg, dict):
                        msg = {"type": "malformed"}
                except (json.JSONDecodeError, UnicodeDecodeError):
                    msg = {"type": "malformed"}
                await self.queue.put(("msg", user, msg))
        except ConnectionClosed:
            pass
        finally:
            self.conns.pop(user, None)
            await self.queue.put(("msg", user, {"type": "leave"}))

    async def _ticker(self) -> None:
        loop = asyncio.get_running_loop()
        period_s = tick_period_ms(self.tick_hz) / 1000.0
        k = 1
        while True:
            await asyncio.sleep(max(0.0, self._t0 + k * period_s - loop.time()))
            await self.queue.put(("tick", None, None))
            k += 1

    async def _deliver(self, user: int, msg: dict) -> None:
        websocket = self.conns.get(user)
        if websocket is None:
            return
        try:
            await websocket.send(json.dumps(msg) + "\n")
            if msg.get("type") == "error":
                await websocket.close()
        except ConnectionClosed:
            pass

    def _flush_log(self) -> None:
        events = self.session.events
        for ev in events[self._events_written :]:
            self._log_fh.write(json.dumps(ev.to_obj(), sort_keys=True) + "\n")
        self._events_written = len(events)
        self._log_fh.flush()

    async def _consumer(self) -> None:
        while True:
            kind, user, msg = await self.queue.get()
            t_ms = self._t_ms()
            if kind == "msg":
                outbound = self.session.handle_message(user, msg, t_ms)
            else:
                outbound = self.session.advance_tick(t_ms)
            for recipient, out in outbound:
                await self._deliver(recipient, out)
            self._flush_log()

    async def run(self, host: str, port: int, ready: asyncio.Future | None = None) -> None:
        self._t0 = asyncio.get_running_loop().time()
        self._log_fh = open(self.log_path, "w", encoding="utf-8")
        try:
            async with ws_serve(self.handler, host, port) as server:
                bound_port = server.sockets[0].getsockname()[1]
                print(f"listening on ws://{host}:{bound_port}", flush=True)
                if ready is not None and not ready.done():
                    ready.set_result(bound_port)
                tasks = [
                    asyncio.create_task(self._ticker()),
                    asyncio.create_task(self._consumer()),
                ]
                try:
                    await asyncio.gather(*tasks)
                finally:
                    for task in tasks:
                        task.cancel()
        finally:
            self._flush_log()
            self._log_fh.close()


def serve(
    model: WireframeModel,
    target: WireframeModel,
    strategy: Strategy,
    host: str,
    port: int,
    log_path: str | Path,
    tick_hz: float = DEFAULT_TICK_HZ,
) -> None:
    """Run the server until interrupted."""
    server = SessionServer(model, target, strategy, log_path, tick_hz)
    try:
        asyncio.run(server.run(host, port))
    except KeyboardInterrupt:
        print("server stopped")
