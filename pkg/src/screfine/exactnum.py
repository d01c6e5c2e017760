"""Exact rational scalars, 3-vectors and 3x3 systems.

Scalars are GMP rationals (``gmpy2.mpq``); nothing in here touches floats.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Union

from gmpy2 import mpq

Rat = mpq
RatLike = Union[mpq, Fraction, int, str]

__all__ = ["Rat", "Vec3", "Mat3", "SingularSystem", "as_rat", "triple_product", "solve3"]


class SingularSystem(ArithmeticError):
    """Three planes without a unique common point."""


_MPQ = type(mpq(0))


def as_rat(value: RatLike) -> mpq:
    if type(value) is _MPQ:
        return value
    if isinstance(value, float):
        raise TypeError("floats are not accepted as exact values")
    if isinstance(value, str):
        return mpq(value.strip())
    if isinstance(value, Fraction):
        return mpq(int(value.numerator), int(value.denominator))
    return mpq(value)


class Vec3:
    """Immutable exact 3-vector, ordered lexicographically."""

    __slots__ = ("x", "y", "z", "_hash")

    def __init__(self, x: RatLike, y: RatLike, z: RatLike):
        object.__setattr__(self, "x", as_rat(x))
        object.__setattr__(self, "y", as_rat(y))
        object.__setattr__(self, "z", as_rat(z))
        object.__setattr__(self, "_hash", hash((self.x, self.y, self.z)))

    def __setattr__(self, name, value):
        raise AttributeError("Vec3 is immutable")

    @classmethod
    def parse(cls, text: str) -> "Vec3":
        parts = [p.strip() for p in text.split(",")]
        if len(parts) != 3:
            raise ValueError(f"expected three comma-separated rationals, got {text!r}")
        return cls(*parts)

    def __iter__(self) -> Iterator[mpq]:
        yield self.x
        yield self.y
        yield self.z

    def __getitem__(self, i: int) -> mpq:
        return (self.x, self.y, self.z)[i]

    def as_tuple(self) -> tuple[mpq, mpq, mpq]:
        return (self.x, self.y, self.z)

    def __repr__(self) -> str:
        return f"Vec3({self.x}, {self.y}, {self.z})"

    def __str__(self) -> str:
        return f"({self.x}, {self.y}, {self.z})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vec3):
            return NotImplemented
        return self.x == other.x and self.y == other.y and self.z == other.z

    def __hash__(self) -> int:
        return self._hash

    def __lt__(self, other: "Vec3") -> bool:
        return self.as_tuple() < other.as_tuple()

    def __le__(self, other: "Vec3") -> bool:
        return self.as_tuple() <= other.as_tuple()

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Vec3":
        return Vec3(-self.x, -self.y, -self.z)

    def __mul__(self, k: RatLike) -> "Vec3":
        k = as_rat(k)
        return Vec3(self.x * k, self.y * k, self.z * k)

    __rmul__ = __mul__

    def __truediv__(self, k: RatLike) -> "Vec3":
        k = as_rat(k)
        return Vec3(self.x / k, self.y / k, self.z / k)

    def dot(self, other: "Vec3") -> mpq:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def cross(self, other: "Vec3") -> "Vec3":
        return Vec3(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )

    def norm2(self) -> mpq:
        return self.dot(self)

    def is_zero(self) -> bool:
        return self.x == 0 and self.y == 0 and self.z == 0

    def to_floats(self) -> tuple[float, float, float]:
        return (float(self.x), float(self.y), float(self.z))


ZERO = Vec3(0, 0, 0)


def triple_product(u: Vec3, v: Vec3, w: Vec3) -> mpq:
    """u . (v x w), the determinant with rows u, v, w."""
    return u.dot(v.cross(w))


class Mat3:
    """3x3 exact matrix stored as three row vectors."""

    __slots__ = ("rows",)

    def __init__(self, rows: Iterable[Vec3 | Iterable[RatLike]]):
        rs = tuple(r if isinstance(r, Vec3) else Vec3(*r) for r in rows)
        if len(rs) != 3:
            raise ValueError("Mat3 needs exactly three rows")
        object.__setattr__(self, "rows", rs)

    def __setattr__(self, name, value):
        raise AttributeError("Mat3 is immutable")

    @classmethod
    def identity(cls) -> "Mat3":
        return cls([(1, 0, 0), (0, 1, 0), (0, 0, 1)])

    def det(self) -> mpq:
        return triple_product(*self.rows)

    def __matmul__(self, v: Vec3) -> Vec3:
        return Vec3(*(r.dot(v) for r in self.rows))

    def __repr__(self) -> str:
        return f"Mat3({list(self.rows)!r})"


def solve3(a: Mat3, b: Vec3) -> Vec3:
    """Solve a x = b exactly by Cramer's rule."""
    r0, r1, r2 = a.rows
    det = triple_product(r0, r1, r2)
    if det == 0:
        raise SingularSystem("determinant is zero")
    # columns of a
    c0 = Vec3(r0.x, r1.x, r2.x)
    c1 = Vec3(r0.y, r1.y, r2.y)
    c2 = Vec3(r0.z, r1.z, r2.z)
    # det of a matrix given by columns equals det of its transpose
    return Vec3(
        triple_product(b, c1, c2) / det,
        triple_product(c0, b, c2) / det,
        triple_product(c0, c1, b) / det,
    )
