#!/usr/bin/env python3
"""
ISB chain laboratory
Main entry point for the `isb` command.
"""

import logging
import os
import sys
from typing import Optional, Sequence

import cli
from config import LOGGING_CONFIG


def setup_logging(level: int = logging.INFO, log_file: Optional[str] = None):
    """Setup logging to a file and to stderr (stdout is reserved for listings)."""
    log_file = log_file or os.getenv('ISB_LOG_FILE') or LOGGING_CONFIG['file']
    logging.basicConfig(
        level=level,
        format=LOGGING_CONFIG['format'],
        handlers=[
            logging.FileHandler(log_file),
            logging.StreamHandler(sys.stderr)
        ],
        force=True,
    )


def main(argv: Optional[Sequence[str]] = None):
    """Parse arguments, configure logging and run one command."""
    parser = cli.build_parser()
    args = parser.parse_args(argv)
    setup_logging(cli.log_level(args))
    logger = logging.getLogger(__name__)

    try:
        code = cli.execute(args)
    except KeyboardInterrupt:
        logger.info("Interrupted by user")
        code = 130
    except Exception as e:
        logger.error(f"Unexpected error: {e}")
        code = 1
    sys.exit(code)


if __name__ == "__main__":
    main()
