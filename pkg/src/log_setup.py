import logging

from rich.console import Console
from rich.logging import RichHandler

# Diagnostics go to stderr so stdout only ever carries results
err_console = Console(stderr=True)


def configure_logging(level: str = "WARNING", verbosity: int = 0) -> None:
    """Install a rich handler on the root logger"""
    if verbosity >= 2:
        level = "DEBUG"
    elif verbosity == 1 and level not in ("DEBUG",):
        level = "INFO"

    root = logging.getLogger()
    for handler in list(root.handlers):
        if isinstance(handler, RichHandler):
            root.removeHandler(handler)

    handler = RichHandler(console=err_console, show_path=False, markup=False)
    handler.setFormatter(logging.Formatter("%(name)s: %(message)s"))
    root.addHandler(handler)
    root.setLevel(level)


