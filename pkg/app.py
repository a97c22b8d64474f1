import logging
import sys

from reroute.bench import main
from reroute.configuration import Configuration


def setup_logging(level: int) -> None:
    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter("[{asctime}] [{levelname:<8}] {name}: {message}", "%Y-%m-%d %H:%M:%S", style="{"))
    root = logging.getLogger()
    root.setLevel(level)
    root.addHandler(handler)


if __name__ == "__main__":
    setup_logging(Configuration().log_level)
    sys.exit(main())
