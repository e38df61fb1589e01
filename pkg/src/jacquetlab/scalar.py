"""The exact rational scalar type: gmpy2's mpq when present, else Fraction."""

try:
    from gmpy2 import mpq as Rational
except ImportError:  # pragma: no cover
    from fractions import Fraction as Rational

__all__ = ["Rational"]
