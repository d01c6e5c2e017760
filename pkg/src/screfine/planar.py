"""Square and triangular grid refinement tracked through exact Gram matrices.

A basis is stored as its coordinates in the *original* lattice basis
together with the original Gram matrix, so every squared length stays
rational even for the triangular grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exactnum import Rat

Mat2 = tuple[tuple[Rat, Rat], tuple[Rat, Rat]]

F = Rat

SQUARE_GRAM: Mat2 = ((F(1), F(0)), (F(0), F(1)))
TRIANGULAR_GRAM: Mat2 = ((F(1), F(-1, 2)), (F(-1, 2), F(1)))

# rows: new basis vectors in terms of the current ones
SQUARE_STEP: Mat2 = ((F(1, 2), F(1, 2)), (F(-1, 2), F(1, 2)))
TRIANGULAR_STEP: Mat2 = ((F(2, 3), F(1, 3)), (F(-1, 3), F(1, 3)))


def _matmul(a: Mat2, b: Mat2) -> Mat2:
    return tuple(
        tuple(sum(a[i][k] * b[k][j] for k in range(2)) for j in range(2)) for i in range(2)
    )


def _transpose(a: Mat2) -> Mat2:
    return ((a[0][0], a[1][0]), (a[0][1], a[1][1]))


def _det(a: Mat2) -> Rat:
    return a[0][0] * a[1][1] - a[0][1] * a[1][0]


def quad_form(gram: Mat2, v: tuple[Rat, Rat]) -> Rat:
    return sum(v[i] * gram[i][j] * v[j] for i in range(2) for j in range(2))


@dataclass(frozen=True)
class Basis2:
    kind: str
    steps: int
    coords: Mat2  # rows: basis vectors in original lattice coordinates
    base_gram: Mat2
    rotation_deg: int  # orientation modulo the grid's own rotational symmetry

    @property
    def gram(self) -> Mat2:
        return _matmul(_matmul(self.coords, self.base_gram), _transpose(self.coords))

    @property
    def constant2(self) -> Rat:
        """Squared lattice constant."""
        return self.gram[0][0]

    @property
    def area2(self) -> Rat:
        """Squared area of the parallelogram cell."""
        return _det(self.gram)

    def is_positive_definite(self) -> bool:
        g = self.gram
        return g[0][1] == g[1][0] and g[0][0] > 0 and _det(g) > 0

    def points_per_original_cell(self) -> int:
        """Count refined lattice points in the half-open original unit cell."""
        (a, b), (c, d) = self.coords
        det = a * d - b * c
        # lattice points i*r0 + j*r1 with both original coordinates in [0, 1)
        bound = math.ceil(1 / abs(det)) + 2 if det else 0
        n = 0
        for i in range(-bound, bound + 1):
            for j in range(-bound, bound + 1):
                x, y = i * a + j * c, i * b + j * d
                if 0 <= x < 1 and 0 <= y < 1:
                    n += 1
        return n


def _refine(kind, steps, step, gram, angle, period) -> Basis2:
    if steps < 0:
        raise ValueError("steps must be nonnegative")
    coords: Mat2 = ((F(1), F(0)), (F(0), F(1)))
    for _ in range(steps):
        coords = _matmul(step, coords)
    return Basis2(kind, steps, coords, gram, (angle * steps) % period)


def refine_square(steps: int) -> Basis2:
    """Square grid after ``steps`` center insertions: constant / sqrt(2), turned 45 deg."""
    return _refine("square", steps, SQUARE_STEP, SQUARE_GRAM, 45, 90)


def refine_triangular(steps: int) -> Basis2:
    """Triangular grid after ``steps`` K-point insertions: constant / sqrt(3), turned 30 deg."""
    return _refine("triangular", steps, TRIANGULAR_STEP, TRIANGULAR_GRAM, 30, 60)


def square_rotation_from_coords(b: Basis2) -> int:
    """Orientation of the first square basis vector mod 90 deg, read off exact coordinates."""
    x, y = b.coords[0]
    if x == 0 or y == 0:
        return 0
    if abs(x) == abs(y):
        return 45
    raise ValueError("not a 45-degree multiple")


K_POINT = (F(2, 3), F(1, 3))


def k_point_gaps() -> list[Rat]:
    """Squared distances from the first K point to its three surrounding lattice sites."""
    sites = [(F(0), F(0)), (F(1), F(0)), (F(1), F(1))]
    return [quad_form(TRIANGULAR_GRAM, (K_POINT[0] - s[0], K_POINT[1] - s[1])) for s in sites]


def recurrence_table(kind: str, steps: int) -> list[Basis2]:
    fn = {"square": refine_square, "triangular": refine_triangular}[kind]
    return [fn(n) for n in range(steps + 1)]
