from .settings import Settings, get_settings, configure_logging, LOG_FORMAT

__all__ = ["Settings", "get_settings", "configure_logging", "LOG_FORMAT"]
