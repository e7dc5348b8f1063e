"""
Conversion of pydantic validation failures into domain errors.

Factories and the CLI call convert_pydantic_error so that every invalid
input surfaces as the domain ValidationError with readable messages.
"""

from pydantic import ValidationError as PydanticValidationError

from src.domain.exceptions import ValidationError


def convert_pydantic_error(pydantic_error: PydanticValidationError) -> ValidationError:
    """
    Convert a Pydantic ValidationError to a domain ValidationError.

    Args:
        pydantic_error: The Pydantic ValidationError to convert

    Returns:
        A domain ValidationError with user-friendly messages
    """
    error_messages = []

    for error in pydantic_error.errors():
        error_type = error["type"]
        location = ".".join(str(part) for part in error.get("loc", ())) or "value"

        if error_type == "value_error" and "ctx" in error:
            # Custom validator errors carry the original exception
            ctx_error = error["ctx"].get("error")
            error_messages.append(f"{location}: {ctx_error}" if ctx_error else error["msg"])
        elif error_type == "missing":
            error_messages.append(f"{location}: Field is required")
        elif error_type in ("int_parsing", "int_type"):
            error_messages.append(f"{location}: Must be a valid integer")
        elif error_type in ("float_parsing", "float_type"):
            error_messages.append(f"{location}: Must be a valid number")
        else:
            error_messages.append(f"{location}: {error['msg']}")

    return ValidationError("; ".join(error_messages))
