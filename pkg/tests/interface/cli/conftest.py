"""
Shared fixtures for CLI tests.

Fixtures:
- cli_output: In-memory stdout and Rich console for a DecipherCLI
- decipher_cli: DecipherCLI writing to the in-memory streams
- cipher_files: Small synthetic instance on disk

Helper Functions:
- stdout_json: Parse the JSON lines a command printed
"""

import io
import json
from pathlib import Path

import pytest
from pydantic import BaseModel, ConfigDict
from rich.console import Console

from src.interface.cli.decipher_cli import DecipherCLI
from tests.fixtures.test_data import CipherFiles, write_cipher_instance


class CLIOutput(BaseModel):
    """In-memory streams a DecipherCLI writes to."""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    stdout: io.StringIO
    stderr: io.StringIO
    console: Console


@pytest.fixture
def cli_output() -> CLIOutput:
    stderr = io.StringIO()
    return CLIOutput(stdout=io.StringIO(), stderr=stderr, console=Console(file=stderr, width=120, color_system=None))


@pytest.fixture
def decipher_cli(cli_output: CLIOutput) -> DecipherCLI:
    """Create a DecipherCLI writing to in-memory streams."""
    return DecipherCLI(stdout=cli_output.stdout, console=cli_output.console)


@pytest.fixture
def cipher_files(tmp_path: Path) -> CipherFiles:
    return write_cipher_instance(tmp_path / "data")


def stdout_json(output: CLIOutput) -> list[dict]:
    """Parse every JSON line written to stdout."""
    return [json.loads(line) for line in output.stdout.getvalue().splitlines()]
