"""sl2 arithmetic on the split triple (e, h, f) and the compact-adapted basis.

Elements are stored in split coordinates.  The compact-adapted generators
Hc, X+, X- (with ``[Hc, X+-] = +-2 X+-`` and ``[X+, X-] = Hc``) are related
to the split triple by the Cayley combination

    e = (Hc - X+ + X-)/2,   h = X+ + X-,   f = (Hc + X+ - X-)/2.

n = span(e) and its opposite nbar = span(f); the cocharacter pairing puts
e in degree +2 and f in degree -2.
"""

from __future__ import annotations

from dataclasses import dataclass

from .scalar import Rational

SPLIT_NAMES = ("e", "h", "f")
COMPACT_NAMES = ("Hc", "Xp", "Xm")
DEGREES = {"e": 2, "h": 0, "f": -2}


class _NonHomogeneous:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "NonHomogeneous"

    def __bool__(self):
        return False


NonHomogeneous = _NonHomogeneous()


@dataclass(frozen=True)
class LieElement:
    e: Rational = Rational(0)
    h: Rational = Rational(0)
    f: Rational = Rational(0)

    def __post_init__(self):
        for name in SPLIT_NAMES:
            object.__setattr__(self, name, Rational(getattr(self, name)))

    # -- compact coordinates
    @classmethod
    def from_compact(cls, Hc=0, Xp=0, Xm=0) -> "LieElement":
        Hc, Xp, Xm = Rational(Hc), Rational(Xp), Rational(Xm)
        # Hc = e + f, Xp = (h + f - e)/2, Xm = (h - f + e)/2
        return HC.scale(Hc) + XP.scale(Xp) + XM.scale(Xm)

    def compact(self) -> tuple[Rational, Rational, Rational]:
        """Coordinates ``(Hc, Xp, Xm)``."""
        e, h, f = self.e, self.h, self.f
        return ((e + f) / 2, h + (f - e) / 2, h + (e - f) / 2)

    def split(self) -> tuple[Rational, Rational, Rational]:
        return (self.e, self.h, self.f)

    @classmethod
    def named(cls, name: str) -> "LieElement":
        try:
            return _NAMED[name]
        except KeyError:
            raise ValueError(f"unknown generator {name!r}") from None

    # -- vector space structure
    def __add__(self, other: "LieElement") -> "LieElement":
        return LieElement(self.e + other.e, self.h + other.h, self.f + other.f)

    def __sub__(self, other: "LieElement") -> "LieElement":
        return LieElement(self.e - other.e, self.h - other.h, self.f - other.f)

    def __neg__(self) -> "LieElement":
        return self.scale(-1)

    def scale(self, a) -> "LieElement":
        a = Rational(a)
        return LieElement(a * self.e, a * self.h, a * self.f)

    def __rmul__(self, a) -> "LieElement":
        return self.scale(a)

    def is_zero(self) -> bool:
        return not (self.e or self.h or self.f)

    def homogeneous_parts(self) -> list[tuple[str, Rational]]:
        return [(n, getattr(self, n)) for n in SPLIT_NAMES if getattr(self, n)]

    def __repr__(self) -> str:
        terms = [f"{c}*{n}" for n, c in self.homogeneous_parts()]
        return " + ".join(terms) if terms else "0"


E = LieElement(e=1)
H = LieElement(h=1)
F = LieElement(f=1)
HC = LieElement(e=1, f=1)
XP = LieElement(e=Rational(-1, 2), h=Rational(1, 2), f=Rational(1, 2))
XM = LieElement(e=Rational(1, 2), h=Rational(1, 2), f=Rational(-1, 2))
_NAMED = {"e": E, "h": H, "f": F, "Hc": HC, "Xp": XP, "Xm": XM}


def bracket(x: LieElement, y: LieElement) -> LieElement:
    """Lie bracket from ``[h,e] = 2e``, ``[h,f] = -2f``, ``[e,f] = h``."""
    return LieElement(
        e=2 * (x.h * y.e - x.e * y.h),
        h=x.e * y.f - x.f * y.e,
        f=-2 * (x.h * y.f - x.f * y.h),
    )


def compact_bracket(a: tuple, b: tuple) -> tuple[Rational, Rational, Rational]:
    """Bracket of compact coordinate triples using only the compact relations."""
    a = tuple(Rational(x) for x in a)
    b = tuple(Rational(x) for x in b)
    Hc = a[1] * b[2] - a[2] * b[1]
    Xp = 2 * (a[0] * b[1] - a[1] * b[0])
    Xm = -2 * (a[0] * b[2] - a[2] * b[0])
    return (Hc, Xp, Xm)


def grading_degree(x: LieElement):
    """Pairing with the cocharacter: 2 on e, 0 on h, -2 on f.

    Returns ``NonHomogeneous`` for mixed (or zero) elements.
    """
    parts = x.homogeneous_parts()
    if len(parts) != 1:
        return NonHomogeneous
    return DEGREES[parts[0][0]]


def cayley_split_generators() -> dict[str, tuple[Rational, Rational, Rational]]:
    """The split triple written in compact coordinates ``(Hc, Xp, Xm)``."""
    half = Rational(1, 2)
    return {
        "e": (half, -half, half),
        "h": (Rational(0), Rational(1), Rational(1)),
        "f": (half, half, -half),
    }
