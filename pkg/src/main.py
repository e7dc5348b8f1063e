"""Main application entry point."""

import json
import logging
import sys
from collections.abc import Sequence
from typing import NoReturn

from pydantic import ValidationError as PydanticValidationError
from rich.console import Console

from src.application.factories.validation import convert_pydantic_error
from src.domain.exceptions import CoverageError, DecipherError, DivergenceError, ValidationError
from src.interface.cli.decipher_cli import DecipherCLI

console = Console(stderr=True)
logger = logging.getLogger(__name__)

EXIT_FAILURE = 1
EXIT_INVALID = 2
EXIT_DIVERGED = 3
EXIT_INTERRUPTED = 130


def main(argv: Sequence[str] | None = None) -> None:
    """
    Run the decipher command line.

    Exit codes:
        0: Success
        1: Any other toolkit or system error
        2: Invalid arguments, configuration, paths or gold coverage
        3: Training diverged
        130: Interrupted by the user
    """
    try:
        DecipherCLI().run(argv)
    except KeyboardInterrupt:
        console.print("\n[yellow]Interrupted by user[/yellow]")
        _exit_with_error(EXIT_INTERRUPTED)
    except (ValidationError, CoverageError) as e:
        console.print(f"[red]Invalid input: {e}[/red]")
        _exit_with_error(EXIT_INVALID)
    except PydanticValidationError as e:
        console.print(f"[red]Configuration validation error: {convert_pydantic_error(e)}[/red]")
        _exit_with_error(EXIT_INVALID)
    except FileNotFoundError as e:
        console.print(f"[red]{e}[/red]")
        _exit_with_error(EXIT_INVALID)
    except json.JSONDecodeError as e:
        console.print(f"[red]Invalid JSON in config file: {e}[/red]")
        _exit_with_error(EXIT_INVALID)
    except DivergenceError as e:
        console.print(f"[red]{e}[/red]")
        _exit_with_error(EXIT_DIVERGED)
    except DecipherError as e:
        console.print(f"[red]{e}[/red]")
        _exit_with_error(EXIT_FAILURE)
    except OSError as e:
        console.print(f"[red]System error: {e}[/red]")
        _exit_with_error(EXIT_FAILURE)


def _exit_with_error(code: int) -> NoReturn:
    """Exit the application with the specified error code.

    Args:
        code: Exit code to use
    """
    logger.debug("Exiting with code %d", code)
    sys.exit(code)


if __name__ == "__main__":
    main()
