"""
File utilities for repository implementations.

This module provides common file handling used by the artifact
repositories: every write creates its parent directories, every file is
UTF-8 with "\\n" line endings, and OS failures surface as ArtifactError.
"""

from collections.abc import Iterable
from pathlib import Path

from src.domain.exceptions import ArtifactError


def ensure_parent_directory(file_path: Path) -> None:
    """
    Create the parent directories of a file if needed.

    Raises:
        ArtifactError: If the directories cannot be created
    """
    try:
        file_path.parent.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ArtifactError(f"Failed to create directory {file_path.parent}: {e}") from e


def write_lines(file_path: Path, lines: Iterable[str]) -> None:
    """
    Write lines to a file, each terminated by a newline.

    Args:
        file_path: Destination file, replaced if it exists
        lines: Lines without trailing newlines

    Raises:
        ArtifactError: If the file cannot be written
    """
    ensure_parent_directory(file_path)
    try:
        with open(file_path, "w", encoding="utf-8", newline="\n") as f:
            for line in lines:
                f.write(line)
                f.write("\n")
    except OSError as e:
        raise ArtifactError(f"Failed to write {file_path}: {e}") from e


def read_lines(file_path: Path) -> list[str]:
    """
    Read a UTF-8 file as a list of lines without their newlines.

    Raises:
        ArtifactError: If the file is missing, unreadable or not UTF-8
    """
    try:
        with open(file_path, encoding="utf-8") as f:
            return f.read().splitlines()
    except (OSError, UnicodeDecodeError) as e:
        raise ArtifactError(f"Failed to read {file_path}: {e}") from e


def split_fields(line: str, expected: int, file_path: Path, line_number: int) -> list[str]:
    """
    Split a TSV line into exactly expected fields.

    Raises:
        ArtifactError: If the field count is wrong
    """
    fields = line.split("\t")
    if len(fields) != expected:
        raise ArtifactError(f"{file_path}:{line_number}: expected {expected} tab-separated fields, got {len(fields)}")
    return fields


def parse_float(value: str, file_path: Path, line_number: int) -> float:
    """
    Parse a float field.

    Raises:
        ArtifactError: If the value is not a number
    """
    try:
        return float(value)
    except ValueError as e:
        raise ArtifactError(f"{file_path}:{line_number}: invalid number '{value}'") from e
