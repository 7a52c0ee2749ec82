"""Parsing helpers for command-line values."""

from typing import List

TRUE_VALUES = {"1", "true", "yes", "on"}
FALSE_VALUES = {"0", "false", "no", "off"}


def parse_bool(value: str) -> bool:
    """
    Parse a boolean flag value.

    Args:
        value (str): One of true/false, yes/no, on/off, 1/0 (case-insensitive).

    Returns:
        bool: Parsed value.
    """
    lowered = value.strip().lower()
    if lowered in TRUE_VALUES:
        return True
    if lowered in FALSE_VALUES:
        return False
    raise ValueError(f"Expected a boolean value, got {value!r}")


def parse_str_list(value: str) -> List[str]:
    """Split a comma-separated list, dropping blanks."""
    return [item.strip() for item in value.split(",") if item.strip()]


def parse_int_list(value: str) -> List[int]:
    """
    Parse a comma-separated list of integers, e.g. ``100,200,400``.

    Args:
        value (str): Comma-separated integers.

    Returns:
        List[int]: Parsed integers in the given order.
    """
    items = parse_str_list(value)
    if not items:
        raise ValueError("Expected at least one integer")
    try:
        return [int(item) for item in items]
    except ValueError:
        raise ValueError(f"Expected comma-separated integers, got {value!r}")
