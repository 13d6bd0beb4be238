"""HTTP service wrapping the transfer engine; run with
``uvicorn styledit.service:app``."""

from .app import app, create_app

__all__ = ["app", "create_app"]
