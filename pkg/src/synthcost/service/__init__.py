"""HTTP service wrapping the core package; the CLI reuses the same handlers."""

from .app import create_app

__all__ = ["create_app"]
