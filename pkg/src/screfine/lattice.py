"""Labeled point sets of the refined simple-cubic lattices.

Coordinates are in units of the SC lattice constant.  Every class is a
finite set of offsets inside the half-open unit cube, replicated by
integer translations.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .exactnum import Rat, RatLike, Vec3, as_rat

__all__ = [
    "SiteClass",
    "Stage",
    "RefinementPlan",
    "InvalidPlan",
    "ClassNotInPlan",
    "Box",
    "Site",
    "ShellHistogram",
    "PLANS",
    "REPRESENTATIVES",
    "CELL_OFFSETS",
    "generate",
    "shell_histogram",
    "nearest_gap",
    "self_similarity_check",
    "sc_lattice",
    "candidate_neighbors",
    "classify",
    "representative",
]


class InvalidPlan(ValueError):
    pass


class ClassNotInPlan(ValueError):
    pass


class SiteClass(enum.IntEnum):
    GAMMA = 0
    BODY = 1
    W = 2
    X = 3
    M = 4
    LAMBDA = 5

    @classmethod
    def parse(cls, name: str) -> "SiteClass":
        key = name.strip().upper()
        aliases = {"Γ": "GAMMA", "G": "GAMMA", "Λ": "LAMBDA", "L": "LAMBDA", "B": "BODY"}
        key = aliases.get(key, key)
        try:
            return cls[key]
        except KeyError:
            raise ValueError(f"unknown site class {name!r}") from None


class Stage(enum.Enum):
    L0 = "L0"
    L1 = "L1"
    L2W = "L2W"
    L2X = "L2X"
    L3 = "L3"


_h = Rat(1, 2)
_q = Rat(1, 4)
_tq = Rat(3, 4)


def _lambda_offsets() -> list[Vec3]:
    pts = []
    for num in (5, 7, 17, 19):
        t = Rat(num, 24)
        pts += [Vec3(t, t, t), Vec3(1 - t, t, t), Vec3(t, 1 - t, t), Vec3(t, t, 1 - t)]
    return pts


# offsets within [0,1)^3; face/edge-shared points appear once (half-open ownership)
CELL_OFFSETS: dict[SiteClass, tuple[Vec3, ...]] = {
    SiteClass.GAMMA: (Vec3(0, 0, 0),),
    SiteClass.BODY: (Vec3(_h, _h, _h),),
    SiteClass.W: tuple(
        Vec3(*p)
        for p in [
            (0, _q, _h), (0, _tq, _h), (0, _h, _q), (0, _h, _tq),
            (_q, _h, 0), (_tq, _h, 0), (_h, _q, 0), (_h, _tq, 0),
            (_q, 0, _h), (_tq, 0, _h), (_h, 0, _q), (_h, 0, _tq),
        ]
    ),
    SiteClass.X: (Vec3(0, _h, _h), Vec3(_h, 0, _h), Vec3(_h, _h, 0)),
    SiteClass.M: (Vec3(_h, 0, 0), Vec3(0, _h, 0), Vec3(0, 0, _h)),
    SiteClass.LAMBDA: tuple(_lambda_offsets()),
}

STAGE_CLASSES: dict[Stage, tuple[SiteClass, ...]] = {
    Stage.L0: (SiteClass.GAMMA,),
    Stage.L1: (SiteClass.BODY,),
    Stage.L2W: (SiteClass.W,),
    Stage.L2X: (SiteClass.X, SiteClass.M),
    Stage.L3: (SiteClass.LAMBDA,),
}

STAGE_LEVEL = {Stage.L0: 0, Stage.L1: 1, Stage.L2W: 2, Stage.L2X: 2, Stage.L3: 3}

_VALID = {
    (Stage.L0,),
    (Stage.L0, Stage.L1),
    (Stage.L0, Stage.L1, Stage.L2W),
    (Stage.L0, Stage.L1, Stage.L2X),
    (Stage.L0, Stage.L1, Stage.L2W, Stage.L3),
}

REPRESENTATIVES: dict[SiteClass, Vec3] = {
    SiteClass.GAMMA: Vec3(0, 0, 0),
    SiteClass.BODY: Vec3(_h, _h, _h),
    SiteClass.W: Vec3(0, _q, _h),
    SiteClass.X: Vec3(0, _h, _h),
    SiteClass.M: Vec3(_h, 0, 0),
    SiteClass.LAMBDA: Vec3(Rat(5, 24), Rat(5, 24), Rat(5, 24)),
}


@dataclass(frozen=True)
class RefinementPlan:
    stages: tuple[Stage, ...]

    def __post_init__(self):
        if tuple(self.stages) not in _VALID:
            names = ",".join(s.value for s in self.stages)
            raise InvalidPlan(f"invalid refinement plan [{names}]")

    @classmethod
    def parse(cls, text: str | Sequence[str]) -> "RefinementPlan":
        parts = text.split(",") if isinstance(text, str) else list(text)
        try:
            stages = tuple(Stage(p.strip().upper()) for p in parts if p.strip())
        except ValueError as exc:
            raise InvalidPlan(str(exc)) from None
        return cls(stages)

    @property
    def classes(self) -> tuple[SiteClass, ...]:
        return tuple(c for s in self.stages for c in STAGE_CLASSES[s])

    @property
    def last_classes(self) -> tuple[SiteClass, ...]:
        return STAGE_CLASSES[self.stages[-1]]

    @property
    def level(self) -> int:
        return STAGE_LEVEL[self.stages[-1]]

    def previous(self) -> "RefinementPlan | None":
        return RefinementPlan(self.stages[:-1]) if len(self.stages) > 1 else None

    def __contains__(self, cls: SiteClass) -> bool:
        return cls in self.classes

    def label(self, sep: str = ",") -> str:
        return sep.join(s.value for s in self.stages)

    def __str__(self) -> str:
        return self.label()


PLANS = {
    name: RefinementPlan.parse(name)
    for name in ("L0", "L0,L1", "L0,L1,L2W", "L0,L1,L2X", "L0,L1,L2W,L3")
}


@dataclass(frozen=True)
class Box:
    """Half-open axis-aligned box [lo, hi)."""

    lo: Vec3
    hi: Vec3

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.lo, self.hi)):
            raise ValueError("empty box")

    @classmethod
    def cube(cls, lo: RatLike, hi: RatLike) -> "Box":
        return cls(Vec3(lo, lo, lo), Vec3(hi, hi, hi))

    @classmethod
    def around(cls, center: Vec3, half: RatLike) -> "Box":
        h = as_rat(half)
        return cls(Vec3(*(c - h for c in center)), Vec3(*(c + h for c in center)))

    @classmethod
    def parse(cls, text: str) -> "Box":
        vals = [as_rat(p.strip()) for p in text.split(",")]
        if len(vals) == 2:
            return cls.cube(*vals)
        if len(vals) == 6:
            return cls(Vec3(*vals[:3]), Vec3(*vals[3:]))
        raise ValueError("bbox needs 2 (cube) or 6 (lo xyz, hi xyz) rationals")

    def contains(self, p: Vec3) -> bool:
        return all(a <= c < b for a, c, b in zip(self.lo, p, self.hi))

    def shifted(self, v: Vec3) -> "Box":
        return Box(self.lo + v, self.hi + v)


@dataclass(frozen=True, order=True)
class Site:
    cls: SiteClass
    pos: Vec3
    level: int = 0

    def __str__(self) -> str:
        return f"{self.cls.name} {self.pos.x} {self.pos.y} {self.pos.z}"


CLASS_LEVEL = {c: STAGE_LEVEL[s] for s, cs in STAGE_CLASSES.items() for c in cs}

# common denominator of every cell offset
SCALE = 24


def _check_plan(plan) -> RefinementPlan:
    if isinstance(plan, RefinementPlan):
        return plan
    return RefinementPlan.parse(plan)


def _scaled_axis(lo: Rat, hi: Rat, off: int, scale: int) -> list[int]:
    # integers p = scale*i + off with lo <= p/scale < hi
    plo = math.ceil(lo * scale)
    phi = math.ceil(hi * scale)
    first = -((off - plo) // scale)
    return list(range(scale * first + off, phi, scale))


def _scaled_sites(plan: RefinementPlan, bbox: Box, scale: int):
    for cls in plan.classes:
        for off in CELL_OFFSETS[cls]:
            o = [int(c * scale) for c in off]
            xs = _scaled_axis(bbox.lo.x, bbox.hi.x, o[0], scale)
            ys = _scaled_axis(bbox.lo.y, bbox.hi.y, o[1], scale)
            zs = _scaled_axis(bbox.lo.z, bbox.hi.z, o[2], scale)
            for x in xs:
                for y in ys:
                    for z in zs:
                        yield cls, x, y, z


def _site(cls: SiteClass, x: int, y: int, z: int, scale: int) -> Site:
    return Site(cls, Vec3(Rat(x, scale), Rat(y, scale), Rat(z, scale)), CLASS_LEVEL[cls])


def generate(plan: RefinementPlan | str, bbox: Box) -> list[Site]:
    """All sites of the plan inside ``bbox``, each exactly once.

    Sorted by class, then lexicographically by position.
    """
    plan = _check_plan(plan)
    out = [_site(c, x, y, z, SCALE) for c, x, y, z in _scaled_sites(plan, bbox, SCALE)]
    out.sort()
    return out


def classify(plan: RefinementPlan | str, pos: Vec3) -> SiteClass | None:
    """Class of the site at ``pos``, or None when ``pos`` is not a site."""
    plan = _check_plan(plan)
    frac = Vec3(*(c - math.floor(c) for c in pos))
    for cls in plan.classes:
        if frac in CELL_OFFSETS[cls]:
            return cls
    return None


def representative(cls: SiteClass, plan: RefinementPlan | str) -> Site:
    plan = _check_plan(plan)
    if cls not in plan:
        raise ClassNotInPlan(f"{cls.name} is not part of plan [{plan}]")
    return Site(cls, REPRESENTATIVES[cls], CLASS_LEVEL[cls])


def _ceil_sqrt(r2: Rat) -> int:
    n = math.isqrt(r2.numerator // r2.denominator)
    while n * n < r2:
        n += 1
    return n


def candidate_neighbors(s: Site | Vec3, plan: RefinementPlan | str, r2max: RatLike) -> list[Site]:
    """Sites with 0 < |t - s|^2 <= r2max, nearest first."""
    plan = _check_plan(plan)
    r2max = as_rat(r2max)
    if r2max <= 0:
        raise ValueError("r2max must be positive")
    center = s.pos if isinstance(s, Site) else s
    reach = _ceil_sqrt(r2max) + 1
    scale = math.lcm(SCALE, *(c.denominator for c in center))
    cx, cy, cz = (int(c * scale) for c in center)
    lim = r2max * scale * scale
    found = []
    for cls, x, y, z in _scaled_sites(plan, Box.around(center, reach), scale):
        d2 = (x - cx) ** 2 + (y - cy) ** 2 + (z - cz) ** 2
        if 0 < d2 <= lim:
            found.append((d2, cls, x, y, z))
    found.sort()
    return [_site(cls, x, y, z, scale) for _, cls, x, y, z in found]


@dataclass(frozen=True)
class ShellHistogram:
    shells: tuple[tuple[Rat, int], ...]

    def __post_init__(self):
        r2s = [r for r, _ in self.shells]
        if any(a >= b for a, b in zip(r2s, r2s[1:])) or any(n <= 0 for _, n in self.shells):
            raise ValueError("shells must have strictly increasing r2 and positive counts")

    def __iter__(self):
        return iter(self.shells)

    def __len__(self):
        return len(self.shells)

    def as_pairs(self) -> list[tuple[Rat, int]]:
        return list(self.shells)


def histogram_about(center: Vec3, plan: RefinementPlan | str, max_r2: RatLike) -> ShellHistogram:
    counts: dict[Rat, int] = {}
    for t in candidate_neighbors(center, plan, max_r2):
        d2 = (t.pos - center).norm2()
        counts[d2] = counts.get(d2, 0) + 1
    return ShellHistogram(tuple(sorted(counts.items())))


def shell_histogram(center_cls: SiteClass, plan: RefinementPlan | str, max_r2: RatLike) -> ShellHistogram:
    """Neighbor counts per exact squared distance around a class representative."""
    plan = _check_plan(plan)
    rep = representative(center_cls, plan)
    return histogram_about(rep.pos, plan, max_r2)


def nearest_gap(new_cls: SiteClass, plan: RefinementPlan | str) -> Rat:
    """Squared distance from the newest class to everything that existed before it."""
    plan = _check_plan(plan)
    if new_cls not in plan.last_classes:
        raise ClassNotInPlan(f"{new_cls.name} is not the class added last by [{plan}]")
    prev = plan.previous()
    if prev is None:
        raise ClassNotInPlan("the first stage has no previous sites")
    best = None
    # every class is one translation-orbit per offset; check each offset
    for off in CELL_OFFSETS[new_cls]:
        for t in candidate_neighbors(off, prev, 1):
            d2 = (t.pos - off).norm2()
            if best is None or d2 < best:
                best = d2
    return best


def sc_lattice(spacing: RatLike, bbox: Box) -> set[Vec3]:
    """Points of the simple-cubic lattice of the given spacing inside ``bbox``."""
    a = as_rat(spacing)
    axes = []
    for lo, hi in zip(bbox.lo, bbox.hi):
        first = math.ceil(lo / a)
        vals = []
        k = first
        while k * a < hi:
            vals.append(k * a)
            k += 1
        axes.append(vals)
    return {Vec3(x, y, z) for x in axes[0] for y in axes[1] for z in axes[2]}


def self_similarity_check(
    bbox: Box, plan: RefinementPlan | str = "L0,L1,L2X", spacing: RatLike = Rat(1, 2)
) -> bool:
    """Whether the plan's sites in ``bbox`` coincide with an SC lattice of ``spacing``."""
    sites = {s.pos for s in generate(plan, bbox)}
    return sites == sc_lattice(spacing, bbox)
