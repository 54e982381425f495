import logging
import sys

from cli import run
from utils.config import get_settings

sys.dont_write_bytecode = True


def main(argv=None):
    settings = get_settings()
    logging.basicConfig(
        level=getattr(logging, settings.log_level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    return run(argv, settings)


if __name__ == '__main__':
    sys.exit(main())
