"""Review HTTP API and static UI hosting."""

from mathforge.server.app import create_app

__all__ = ["create_app"]
