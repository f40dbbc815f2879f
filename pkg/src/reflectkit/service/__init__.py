"""FastAPI service layer over the reflector design toolkit."""

from .app import app

__all__ = ["app"]
