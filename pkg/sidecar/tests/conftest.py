from __future__ import annotations

import socket
import threading
import time

import pytest
import uvicorn
from fastapi.testclient import TestClient

from nli_sidecar.app import create_app
from nli_sidecar.backends import LexicalBackend


@pytest.fixture(scope="session")
def client() -> TestClient:
    return TestClient(create_app(LexicalBackend(), max_batch=8))


def _free_port() -> int:
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    return port


@pytest.fixture(scope="session")
def live_server():
    """A real uvicorn server, for tests that must cross an actual socket."""
    port = _free_port()
    config = uvicorn.Config(create_app(LexicalBackend(), max_batch=8),
                            host="127.0.0.1", port=port, log_level="error")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("sidecar server did not start in time")
        time.sleep(0.02)
    yield f"http://127.0.0.1:{port}"
    server.should_exit = True
    thread.join(timeout=5)
