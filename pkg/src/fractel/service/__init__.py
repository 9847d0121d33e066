"""HTTP service wrapping the solver commands."""

from .app import create_app

__all__ = ["create_app"]
