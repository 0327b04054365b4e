"""Synthesis of reactive implementations from assume-guarantee contracts."""

__version__ = "0.1.0"


def create_app():
    """Load the environment configuration, install logging and return the command-line app."""
    from .api.cli import CommandLineApp
    from .core.config import load_config
    from .core.logs import configure_logging

    cfg = load_config()
    configure_logging(cfg.log_level, cfg.log_json)
    return CommandLineApp(cfg)
