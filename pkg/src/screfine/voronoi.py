"""Exact Voronoi cells by incremental half-space clipping."""

from __future__ import annotations

import functools
import itertools
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .exactnum import Rat, Vec3, triple_product
from .lattice import RefinementPlan, Site, candidate_neighbors, _check_plan

__all__ = [
    "HalfSpace",
    "ConvexCell",
    "FVector",
    "MetricReport",
    "CoincidentPoints",
    "EmptyResult",
    "InvalidCell",
    "bisector",
    "box_cell",
    "clip",
    "cell_from_neighbors",
    "voronoi_cell",
    "volume",
    "face_census",
    "validate",
    "cell_metrics",
    "canonical_form",
    "congruent",
    "SIGNED_PERMUTATIONS",
    "DEFAULT_R2",
]

DEFAULT_R2 = Rat(4)


class CoincidentPoints(ValueError):
    pass


class EmptyResult(ValueError):
    pass


class InvalidCell(AssertionError):
    pass


@dataclass(frozen=True)
class HalfSpace:
    """Closed half-space ``n . x <= d``."""

    n: Vec3
    d: Rat

    def __post_init__(self):
        if self.n.is_zero():
            raise ValueError("half-space normal must be nonzero")

    def side(self, p: Vec3) -> Rat:
        """Signed value n.p - d; positive means outside."""
        return self.n.dot(p) - self.d

    def contains(self, p: Vec3) -> bool:
        return self.side(p) <= 0


def bisector(p: Vec3, q: Vec3) -> HalfSpace:
    """Half-space of points at least as close to ``p`` as to ``q``."""
    if p == q:
        raise CoincidentPoints(f"bisector of coincident points {p}")
    n = q - p
    return HalfSpace(n, n.dot(p + q) / 2)


@dataclass(frozen=True)
class ConvexCell:
    """Convex polytope with outward-oriented face cycles.

    ``faces[i]`` indexes into ``vertices``; ``planes[i]`` supports face i.
    """

    vertices: tuple[Vec3, ...]
    faces: tuple[tuple[int, ...], ...]
    planes: tuple[HalfSpace, ...]
    generator: Site | None = None

    def face_points(self, i: int) -> list[Vec3]:
        return [self.vertices[k] for k in self.faces[i]]

    def edges(self) -> set[tuple[int, int]]:
        out = set()
        for f in self.faces:
            for a, b in zip(f, f[1:] + f[:1]):
                out.add((min(a, b), max(a, b)))
        return out

    def center(self) -> Vec3:
        return self.generator.pos if self.generator is not None else _centroid(self.vertices)

    def key(self) -> tuple:
        """Geometry-only identity: vertex set plus face cycles by position."""
        faces = []
        for f in self.faces:
            pts = [self.vertices[k] for k in f]
            i = pts.index(min(pts))
            faces.append(tuple(pts[i:] + pts[:i]))
        return (tuple(sorted(self.vertices)), tuple(sorted(faces)))

    def contains(self, p: Vec3) -> bool:
        return all(h.contains(p) for h in self.planes)


def _centroid(pts: Sequence[Vec3]) -> Vec3:
    n = len(pts)
    return Vec3(sum(p.x for p in pts) / n, sum(p.y for p in pts) / n, sum(p.z for p in pts) / n)


def _order_on_plane(pts: list[Vec3], n: Vec3) -> list[Vec3]:
    """Order coplanar convex-position points counterclockwise about ``n``.

    Uses only exact orientation predicates; collinear middle points are dropped.
    """
    pivot = min(pts)
    rest = [p for p in pts if p != pivot]

    def cmp(a: Vec3, b: Vec3) -> int:
        s = (a - pivot).cross(b - pivot).dot(n)
        if s > 0:
            return -1
        if s < 0:
            return 1
        # collinear with the pivot: nearer first
        da, db = (a - pivot).norm2(), (b - pivot).norm2()
        return -1 if da < db else (1 if da > db else 0)

    rest.sort(key=functools.cmp_to_key(cmp))
    ring = [pivot] + rest
    changed = True
    while changed and len(ring) >= 3:
        changed = False
        for i in range(len(ring)):
            a, b, c = ring[i - 1], ring[i], ring[(i + 1) % len(ring)]
            if (b - a).cross(c - b).dot(n) == 0:
                del ring[i]
                changed = True
                break
    return ring


def _build(faces: list[tuple[list[Vec3], HalfSpace]], generator: Site | None) -> ConvexCell:
    verts = sorted({p for pts, _ in faces for p in pts})
    index = {p: i for i, p in enumerate(verts)}
    return ConvexCell(
        vertices=tuple(verts),
        faces=tuple(tuple(index[p] for p in pts) for pts, _ in faces),
        planes=tuple(h for _, h in faces),
        generator=generator,
    )


def _face_list(cell: ConvexCell) -> list[tuple[list[Vec3], HalfSpace]]:
    return [(cell.face_points(i), h) for i, h in enumerate(cell.planes)]


def box_cell(lo: Vec3, hi: Vec3, generator: Site | None = None) -> ConvexCell:
    """Axis-aligned box [lo, hi] as a cell with six outward faces."""
    faces = []
    for axis in range(3):
        for sign, bound in ((1, hi), (-1, lo)):
            n = [0, 0, 0]
            n[axis] = sign
            nv = Vec3(*n)
            corners = []
            for a in (lo, hi):
                for b in (lo, hi):
                    c = [None, None, None]
                    c[axis] = bound[axis]
                    others = [k for k in range(3) if k != axis]
                    c[others[0]] = a[others[0]]
                    c[others[1]] = b[others[1]]
                    corners.append(Vec3(*c))
            faces.append((_order_on_plane(corners, nv), HalfSpace(nv, sign * bound[axis])))
    return _build(faces, generator)


def clip(cell: ConvexCell, h: HalfSpace) -> ConvexCell:
    """Intersect ``cell`` with ``h``; the input is returned when nothing is cut off."""
    sides = {p: h.side(p) for p in cell.vertices}
    if all(s <= 0 for s in sides.values()):
        return cell
    if not any(s < 0 for s in sides.values()):
        raise EmptyResult("half-space leaves no interior")
    new_faces = []
    section: set[Vec3] = set()
    for pts, plane in _face_list(cell):
        out = []
        m = len(pts)
        for i in range(m):
            a, b = pts[i], pts[(i + 1) % m]
            sa, sb = sides[a], sides[b]
            if sa <= 0:
                out.append(a)
                if sa == 0:
                    section.add(a)
            if (sa < 0 < sb) or (sb < 0 < sa):
                x = a + (b - a) * (sa / (sa - sb))
                out.append(x)
                section.add(x)
        if len(out) >= 3:
            new_faces.append((out, plane))
    if len(section) >= 3:
        ring = _order_on_plane(list(section), h.n)
        if len(ring) >= 3:
            new_faces.append((ring, h))
    return _build(new_faces, cell.generator)


def cell_from_neighbors(
    center: Site | Vec3, neighbors: Iterable[Site | Vec3], half_width: Rat = Rat(1)
) -> ConvexCell:
    """Clip a cube around ``center`` by the bisector towards each neighbor, in order."""
    gen = center if isinstance(center, Site) else None
    c = center.pos if isinstance(center, Site) else center
    hw = Vec3(half_width, half_width, half_width)
    cell = box_cell(c - hw, c + hw, gen)
    radius2 = 3 * half_width * half_width
    for t in neighbors:
        q = t.pos if isinstance(t, Site) else t
        # bisector sits at |q-c|/2 from c; beyond the circumradius it cannot cut
        if (q - c).norm2() >= 4 * radius2:
            continue
        nxt = clip(cell, bisector(c, q))
        if nxt is not cell:
            cell = nxt
            radius2 = max((v - c).norm2() for v in cell.vertices)
    return cell


def voronoi_cell(s: Site, plan: RefinementPlan | str, r2max=DEFAULT_R2) -> ConvexCell:
    """Exact Voronoi cell of ``s`` among the plan's sites."""
    plan = _check_plan(plan)
    return cell_from_neighbors(s, candidate_neighbors(s, plan, r2max))


def volume(cell: ConvexCell) -> Rat:
    """Divergence-theorem volume from fan triangles of each outward face."""
    total = Rat(0)
    for f in cell.faces:
        v0 = cell.vertices[f[0]]
        for a, b in zip(f[1:], f[2:]):
            total += triple_product(v0, cell.vertices[a], cell.vertices[b])
    return total / 6


@dataclass(frozen=True)
class FVector:
    vertices: int
    edges: int
    faces: int
    face_sizes: tuple[tuple[int, int], ...]

    @property
    def euler(self) -> int:
        return self.vertices - self.edges + self.faces

    def sizes(self) -> dict[int, int]:
        return dict(self.face_sizes)

    def describe(self) -> str:
        names = {3: "triangle", 4: "quadrangle", 5: "pentagon", 6: "hexagon"}
        parts = [f"{n} {names.get(k, f'{k}-gon')}{'s' if n != 1 else ''}" for k, n in self.face_sizes]
        return f"V={self.vertices} E={self.edges} F={self.faces} ({', '.join(parts)})"


def face_census(cell: ConvexCell) -> FVector:
    sizes = Counter(len(f) for f in cell.faces)
    return FVector(len(cell.vertices), len(cell.edges()), len(cell.faces), tuple(sorted(sizes.items())))


def validate(cell: ConvexCell) -> None:
    """Raise InvalidCell unless every structural invariant holds."""
    for i, (f, h) in enumerate(zip(cell.faces, cell.planes)):
        if len(f) < 3:
            raise InvalidCell(f"face {i} has {len(f)} vertices")
        if any(h.side(cell.vertices[k]) != 0 for k in f):
            raise InvalidCell(f"face {i} is not planar on its support")
        pts = [cell.vertices[k] for k in f]
        for a, b, c in zip(pts, pts[1:] + pts[:1], pts[2:] + pts[:2]):
            if (b - a).cross(c - b).dot(h.n) <= 0:
                raise InvalidCell(f"face {i} is not strictly convex and outward")
    for h in cell.planes:
        if any(h.side(v) > 0 for v in cell.vertices):
            raise InvalidCell("vertex outside a supporting half-space")
    directed = Counter()
    for f in cell.faces:
        for a, b in zip(f, f[1:] + f[:1]):
            directed[(a, b)] += 1
    for (a, b), n in directed.items():
        if n != 1 or directed.get((b, a)) != 1:
            raise InvalidCell(f"edge {a}-{b} is not shared by exactly two faces")
    if face_census(cell).euler != 2:
        raise InvalidCell("Euler characteristic is not 2")
    if cell.generator is not None:
        g = cell.generator.pos
        if any(h.side(g) >= 0 for h in cell.planes):
            raise InvalidCell("generator is not strictly interior")


@dataclass(frozen=True)
class MetricReport:
    vertices: tuple[Vec3, ...]
    face_edge_r2: tuple[tuple[Rat, ...], ...]
    edge_r2_census: tuple[tuple[Rat, int], ...]
    face_angles_deg: tuple[tuple[float, ...], ...]

    def edge_lengths(self) -> list[tuple[float, int]]:
        return [(math.sqrt(r2), n) for r2, n in self.edge_r2_census]


def _angle_deg(a: Vec3, b: Vec3, c: Vec3) -> float:
    u, v = a - b, c - b
    cosv = float(u.dot(v)) / math.sqrt(float(u.norm2()) * float(v.norm2()))
    return math.degrees(math.acos(max(-1.0, min(1.0, cosv))))


def cell_metrics(cell: ConvexCell) -> MetricReport:
    """Exact squared edge lengths per face, plus float interior angles."""
    per_face = []
    angles = []
    for f in cell.faces:
        pts = [cell.vertices[k] for k in f]
        m = len(pts)
        per_face.append(tuple(sorted((pts[(i + 1) % m] - pts[i]).norm2() for i in range(m))))
        angles.append(tuple(_angle_deg(pts[i - 1], pts[i], pts[(i + 1) % m]) for i in range(m)))
    census = Counter((cell.vertices[b] - cell.vertices[a]).norm2() for a, b in cell.edges())
    return MetricReport(
        vertices=tuple(sorted(cell.vertices)),
        face_edge_r2=tuple(per_face),
        edge_r2_census=tuple(sorted(census.items())),
        face_angles_deg=tuple(angles),
    )


SIGNED_PERMUTATIONS = tuple(
    (perm, signs)
    for perm in itertools.permutations(range(3))
    for signs in itertools.product((1, -1), repeat=3)
)


def apply_signed_permutation(p: Vec3, op) -> Vec3:
    perm, signs = op
    return Vec3(signs[0] * p[perm[0]], signs[1] * p[perm[1]], signs[2] * p[perm[2]])


def canonical_form(cell: ConvexCell) -> tuple[Vec3, ...]:
    """Sorted vertex set relative to the generator, minimized over the cube group."""
    c = cell.center()
    rel = [v - c for v in cell.vertices]
    return min(tuple(sorted(apply_signed_permutation(v, op) for v in rel)) for op in SIGNED_PERMUTATIONS)


def congruent(a: ConvexCell, b: ConvexCell) -> bool:
    return canonical_form(a) == canonical_form(b)
