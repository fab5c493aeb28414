"""HTTP client for the impact-point service.

Without a server URL the client mounts the application in-process and
drives it through an ASGI transport, so the CLI works with no running
server while speaking the exact wire format; point it at a URL to use a
remote instance instead.
"""

from __future__ import annotations

import asyncio
from typing import Any

import httpx


class ServiceError(Exception):
    """Non-2xx response; carries the library error class name when the
    service attached one."""

    def __init__(self, status: int, error: str, message: str):
        self.status = status
        self.error = error
        self.message = message
        super().__init__(f"{error}: {message}")


class ServiceClient:
    def __init__(self, server: str | None = None, timeout: float = 300.0):
        self._timeout = timeout
        self._client: httpx.Client | None = None
        self._app = None
        if server is None:
            from .service import create_app

            self._app = create_app()
        else:
            self._client = httpx.Client(base_url=server, timeout=timeout)

    def close(self) -> None:
        if self._client is not None:
            self._client.close()

    def __enter__(self) -> "ServiceClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _check(self, resp: httpx.Response) -> dict[str, Any]:
        if resp.is_success:
            return resp.json()
        try:
            detail = resp.json().get("detail")
        except ValueError:
            detail = None
        if isinstance(detail, dict) and "error" in detail:
            raise ServiceError(resp.status_code, detail["error"],
                               detail.get("message", ""))
        raise ServiceError(resp.status_code, "RequestError",
                           detail if isinstance(detail, str) else resp.text[:500])

    def _request(self, method: str, path: str,
                 payload: dict[str, Any] | None = None) -> dict[str, Any]:
        if self._client is not None:
            return self._check(self._client.request(method, path, json=payload))

        async def go() -> httpx.Response:
            transport = httpx.ASGITransport(app=self._app)
            async with httpx.AsyncClient(transport=transport,
                                         base_url="http://iipkit.internal",
                                         timeout=self._timeout) as ac:
                return await ac.request(method, path, json=payload)

        return self._check(asyncio.run(go()))

    def get(self, path: str) -> dict[str, Any]:
        return self._request("GET", path)

    def post(self, path: str, payload: dict[str, Any]) -> dict[str, Any]:
        return self._request("POST", path, payload)

    def health(self) -> dict[str, Any]:
        return self.get("/health")
