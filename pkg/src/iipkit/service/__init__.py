"""HTTP service exposing the impact-point toolkit."""

from .app import create_app

__all__ = ["create_app"]
