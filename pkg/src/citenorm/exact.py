"""Exact rational arithmetic helpers.

All indicator math in this package accumulates in `fractions.Fraction` so
conservation and equality properties hold exactly; rounding happens once, at
the export boundary, via `format_fixed`.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ConfigError

EXPORT_DIGITS = 12


def exact(value: int | float | str | Fraction) -> Fraction:
    """Convert a number to an exact Fraction.

    Floats are converted through their shortest repr so that a flag value
    typed as 0.1 means exactly 1/10, not the binary float nearest to it.
    Strings accept both decimal ("0.25") and ratio ("1/4") forms.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):  # bool is an int subclass; reject explicitly
        raise ConfigError(f"not a number: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as err:
            raise ConfigError(f"not a number: {value!r}") from err
    raise ConfigError(f"not a number: {value!r}")


def format_fixed(value: Fraction | int, digits: int = EXPORT_DIGITS) -> str:
    """Render a rational as a fixed-point decimal string, rounding half to even.

    Pure integer arithmetic; no float detour, so formatting is deterministic
    for any magnitude.
    """
    frac = value if isinstance(value, Fraction) else Fraction(value)
    sign = "-" if frac < 0 else ""
    frac = abs(frac)
    scale = 10**digits
    scaled = frac * scale
    whole, remainder = divmod(scaled.numerator, scaled.denominator)
    doubled = 2 * remainder
    if doubled > scaled.denominator or (doubled == scaled.denominator and whole % 2 == 1):
        whole += 1
    units, decimals = divmod(whole, scale)
    return f"{sign}{units}.{decimals:0{digits}d}"
