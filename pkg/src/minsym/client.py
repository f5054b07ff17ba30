"""HTTP client for the service; the CLI's only way of doing work.

With a base URL the client talks to a running server over the network.
Without one it mounts the application in-process through an ASGI transport,
so the same request/response path is exercised with no server to manage.
"""

from __future__ import annotations

import asyncio

import httpx


class ServiceError(Exception):
    """Non-2xx response from the service."""

    def __init__(self, status_code: int, payload: dict):
        detail = payload.get("detail", "service error")
        super().__init__(f"HTTP {status_code}: {detail}")
        self.status_code = status_code
        self.payload = payload
        self.kind = payload.get("kind", "unknown")


class ServiceClient:
    def __init__(self, base_url: str | None = None):
        self._base_url = base_url
        self._app = None
        if base_url is None:
            from .service import create_app

            self._app = create_app()

    def get(self, path: str) -> dict:
        return self._request("GET", path, None)

    def post(self, path: str, payload: dict) -> dict:
        return self._request("POST", path, payload)

    def _request(self, method: str, path: str, payload: dict | None) -> dict:
        if self._base_url is not None:
            with httpx.Client(base_url=self._base_url, timeout=None) as client:
                response = client.request(method, path, json=payload)
        else:
            response = asyncio.run(self._asgi_request(method, path, payload))
        if response.status_code >= 400:
            try:
                body = response.json()
            except ValueError:
                body = {"detail": response.text}
            raise ServiceError(response.status_code, body)
        return response.json()

    async def _asgi_request(self, method: str, path: str, payload: dict | None) -> httpx.Response:
        transport = httpx.ASGITransport(app=self._app)
        async with httpx.AsyncClient(
            transport=transport, base_url="http://minsym.local", timeout=None
        ) as client:
            return await client.request(method, path, json=payload)
