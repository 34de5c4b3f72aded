"""Unit handling for config values.

All internal quantities are SI. Config files may give lengths either as
bare numbers (already in metres) or as strings with an explicit unit
suffix ("mm" or "m"); areas accept "mm2"/"mm^2"/"m2"/"m^2". The explicit
suffixes exist to prevent silent factor-of-1000 mistakes when copying
datasheet values.
"""

from __future__ import annotations

from decimal import Decimal, InvalidOperation

from .errors import ConfigError

_LENGTH_DIVISORS = {"m": 1, "mm": 10**3}
_AREA_DIVISORS = {"m2": 1, "m^2": 1, "mm2": 10**6, "mm^2": 10**6}


def _parse(value, divisors: dict[str, int], kind: str, field: str) -> float:
    if isinstance(value, bool):
        raise ConfigError(f"{field}: expected a {kind}, got a boolean")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        # Longest suffix first so "mm" wins over "m". Scaling goes through
        # Decimal so "0.13 mm" lands on the same float as the literal
        # 0.13e-3 (correct rounding of the decimal value, not a second
        # rounding of an already-rounded binary number).
        for suffix in sorted(divisors, key=len, reverse=True):
            if text.endswith(suffix):
                number = text[: -len(suffix)].strip()
                try:
                    return float(Decimal(number) / divisors[suffix])
                except InvalidOperation:
                    raise ConfigError(
                        f"{field}: cannot parse number in {value!r}"
                    ) from None
        raise ConfigError(
            f"{field}: {value!r} has no recognised unit suffix "
            f"(expected one of {sorted(divisors)})"
        )
    raise ConfigError(f"{field}: expected a number or unit string, got {type(value).__name__}")


def parse_length(value, field: str = "length") -> float:
    """Parse a length in metres; strings need an "mm" or "m" suffix."""
    return _parse(value, _LENGTH_DIVISORS, "length", field)


def parse_area(value, field: str = "area") -> float:
    """Parse an area in square metres; strings need an "mm2" or "m2" suffix."""
    return _parse(value, _AREA_DIVISORS, "area", field)


def format_length(metres: float) -> str:
    """Format a length for config output; exact round-trip via repr."""
    return f"{metres!r} m"


def format_area(sq_metres: float) -> str:
    return f"{sq_metres!r} m2"
