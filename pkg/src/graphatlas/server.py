"""Static HTTP serving of a dataset directory plus the viewer bundle.

GET-only; the dataset is mounted at the root and the viewer (when given)
under ``/viewer/``.  Meant for local browsing, not deployment.
"""

from __future__ import annotations

import posixpath
from http.server import SimpleHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path


def make_server(dataset_dir: str, viewer_dir: str | None = None, port: int = 8000, host: str = "127.0.0.1"):
    dataset = Path(dataset_dir).resolve()
    viewer = Path(viewer_dir).resolve() if viewer_dir else None

    class Handler(SimpleHTTPRequestHandler):
        protocol_version = "HTTP/1.1"

        def log_message(self, fmt, *args):  # quiet by default
            pass

        def translate_path(self, path: str) -> str:
            path = path.split("?", 1)[0].split("#", 1)[0]
            path = posixpath.normpath(path)
            parts = [p for p in path.split("/") if p and p not in (".", "..")]
            if viewer is not None and (path == "/" or (parts and parts[0] == "viewer")):
                if parts and parts[0] == "viewer":
                    parts = parts[1:]
                target = viewer.joinpath(*parts) if parts else viewer / "index.html"
                if target.is_dir():
                    target = target / "index.html"
                return str(target)
            return str(dataset.joinpath(*parts)) if parts else str(dataset)

        def list_directory(self, path):
            self.send_error(403, "directory listing disabled")
            return None

    return ThreadingHTTPServer((host, port), Handler)
