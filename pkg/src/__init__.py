"""Drug-target graph lab package initialization."""

from .app import create_app

__all__ = ["create_app"]
