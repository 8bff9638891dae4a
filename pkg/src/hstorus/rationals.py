"""Exact-rational JSON helpers shared by certificates and parameter files."""

from __future__ import annotations

from fractions import Fraction


def parse_rational(value) -> Fraction:
    """Accepts int, "p/q" strings, or {"num": p, "den": q} objects."""
    if isinstance(value, bool):
        raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    if isinstance(value, dict) and set(value) == {"num", "den"}:
        return Fraction(int(value["num"]), int(value["den"]))
    if isinstance(value, Fraction):
        return value
    raise ValueError(f"not a rational: {value!r}")


def rational_to_json(q: Fraction) -> dict:
    return {"num": q.numerator, "den": q.denominator}
