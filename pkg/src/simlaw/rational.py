"""Rational exponent ingestion and read-only rational snapping.

Config exponents arrive as strings ("3/4", "-1", "0.25") or plain numbers
and are converted to float64 on ingestion; all internal math stays in
floating point. Snapping is for reporting only and never feeds back into
a computation.
"""

from fractions import Fraction

SNAP_MAX_DENOMINATOR = 12
SNAP_TOLERANCE = 1e-6


def parse_exponent(value):
    """Convert a config exponent (number, decimal string, or 'p/q') to float."""
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        text = value.strip()
        try:
            if "/" in text:
                return float(Fraction(text))
            return float(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"cannot parse exponent {value!r}") from exc
    raise ValueError(f"cannot parse exponent {value!r}")


def snap(x, max_denominator=SNAP_MAX_DENOMINATOR, tol=SNAP_TOLERANCE):
    """Nearest p/q with q <= max_denominator, or None if none is within tol."""
    frac = Fraction(x).limit_denominator(max_denominator)
    if abs(x - float(frac)) <= tol:
        return frac
    return None


def snap_str(x, max_denominator=SNAP_MAX_DENOMINATOR, tol=SNAP_TOLERANCE):
    """String form of snap(): '-3/4', '2', or None."""
    frac = snap(x, max_denominator, tol)
    if frac is None:
        return None
    return str(frac)
