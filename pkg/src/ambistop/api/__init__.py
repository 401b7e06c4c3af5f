from .app import app
from .solve import router

__all__ = ["app", "router"]
