"""Multi-cell configurations used for assembly exports."""

from __future__ import annotations

from .exactnum import Rat as F, Vec3
from .lattice import Site, classify, CLASS_LEVEL, RefinementPlan, PLANS
from .voronoi import ConvexCell, voronoi_cell


def _v(*xs) -> Vec3:
    return Vec3(*(F(x) if not isinstance(x, str) else F(x) for x in xs))


PRESETS: dict[str, tuple[str, tuple[Vec3, ...]]] = {
    # two cells sharing a square face, a third attached by a hexagon
    "bcc-three-cells": ("L0,L1", (_v(0, 0, 0), _v(1, 0, 0), _v("1/2", "-1/2", "1/2"))),
    # five Gamma-class cells and one W cell between two of them
    "level2-gamma-w": (
        "L0,L1,L2W",
        (_v(0, 0, 0), _v(1, 0, 0), _v(0, 1, 0), _v(0, 0, 1), _v("1/2", "1/2", "1/2"), _v("1/2", 0, "1/4")),
    ),
    # octahedra bridged by Lambda pairs along two space diagonals
    "level3-bridge": (
        "L0,L1,L2W,L3",
        (
            _v(0, 0, 0), _v("1/2", "1/2", "1/2"), _v(1, 0, 0),
            _v("5/24", "5/24", "5/24"), _v("7/24", "7/24", "7/24"),
            _v("19/24", "5/24", "5/24"), _v("17/24", "7/24", "7/24"),
        ),
    ),
    "level3-composite": (
        "L0,L1,L2W,L3",
        (
            _v(0, 0, 0), _v("1/2", "1/2", "1/2"),
            _v("5/24", "5/24", "5/24"), _v("7/24", "7/24", "7/24"),
            _v("1/4", 0, "1/2"), _v("1/2", 0, "1/4"),
            _v("5/24", "-5/24", "5/24"),
        ),
    ),
}


def preset_sites(name: str) -> tuple[RefinementPlan, list[Site]]:
    if name not in PRESETS:
        raise KeyError(f"unknown figure preset {name!r}; choose from {', '.join(PRESETS)}")
    plan_name, positions = PRESETS[name]
    plan = PLANS[plan_name]
    sites = []
    for p in positions:
        cls = classify(plan, p)
        if cls is None:
            raise ValueError(f"{p} is not a site of [{plan}]")
        sites.append(Site(cls, p, CLASS_LEVEL[cls]))
    return plan, sites


def assembly_cells(name: str) -> list[ConvexCell]:
    plan, sites = preset_sites(name)
    return [voronoi_cell(s, plan) for s in sites]
