"""Cross-checks: partition of unity, Monte Carlo volumes, max-free-point scans,
and the aggregated golden-value report."""

from __future__ import annotations

import functools
import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable

import numpy as np

from .exactnum import Mat3, Rat, Vec3, solve3
from .lattice import (
    PLANS,
    Box,
    RefinementPlan,
    SiteClass,
    _check_plan,
    generate,
    nearest_gap,
    representative,
    self_similarity_check,
    shell_histogram,
)
from .planar import k_point_gaps, refine_square, refine_triangular
from .voronoi import (
    ConvexCell,
    InvalidCell,
    bisector,
    canonical_form,
    cell_metrics,
    face_census,
    validate,
    volume,
    voronoi_cell,
)

F = Rat
UNIT_CELL = Box.cube(0, 1)


def fmt_rat(q: Rat) -> str:
    q = Rat(q)
    return f"{q.numerator}/{q.denominator}"


def fmt_float(x: float) -> str:
    return f"{x:.7g}"


@functools.lru_cache(maxsize=None)
def representative_cell(cls: SiteClass, plan: RefinementPlan) -> ConvexCell:
    return voronoi_cell(representative(cls, plan), plan)


def multiplicities(plan: RefinementPlan | str) -> dict[SiteClass, int]:
    """Sites of each class owned by one SC unit cell (half-open box count)."""
    plan = _check_plan(plan)
    counts = {c: 0 for c in plan.classes}
    for s in generate(plan, UNIT_CELL):
        counts[s.cls] += 1
    return counts


@dataclass(frozen=True)
class VolumeTable:
    plan: RefinementPlan
    entries: tuple[tuple[SiteClass, int, Rat], ...]

    @property
    def total(self) -> Rat:
        return sum((m * v for _, m, v in self.entries), Rat(0))

    @property
    def partition_ok(self) -> bool:
        return self.total == 1

    def volume(self, cls: SiteClass) -> Rat:
        return next(v for c, _, v in self.entries if c == cls)

    def identity(self) -> str:
        terms = " + ".join(f"{m}*{fmt_rat(v)}" for _, m, v in self.entries)
        return f"{terms} = {fmt_rat(self.total)}"


def volume_table(plan: RefinementPlan | str) -> VolumeTable:
    plan = _check_plan(plan)
    mult = multiplicities(plan)
    return VolumeTable(
        plan, tuple((c, mult[c], volume(representative_cell(c, plan))) for c in plan.classes)
    )


# --- Monte Carlo oracle -----------------------------------------------------


@dataclass(frozen=True)
class MCEstimate:
    cls: SiteClass
    estimate: float
    stderr: float
    hits: int
    samples: int


class _NearestSiteLocator:
    """Float nearest-site classification for points in the unit cell.

    A voxel table lists, per voxel, every site that can be nearest to some
    point of the voxel.  Voxels whose candidates all share one class
    classify their points directly; the rest compare distances to the
    candidates.  Candidates keep lexicographic site order, so ties resolve
    to the first site in that order.
    """

    def __init__(self, plan: RefinementPlan, voxels: int = 48):
        sites = generate(plan, Box.cube(-1, 2))
        classes = np.array([int(s.cls) for s in sites])
        pos = np.array([s.pos.to_floats() for s in sites])
        self.pos = np.vstack([pos, np.full((1, 3), 1e6)])
        self.classes = np.append(classes, -1)
        sentinel = len(pos)
        # coarse-to-fine: a sub-voxel's candidates are a subset of its parent's
        levels = [voxels]
        while levels[-1] % 2 == 0 and levels[-1] > 4:
            levels.append(levels[-1] // 2)
        table = np.arange(len(pos))[None, :]
        for n in reversed(levels):
            table = self._refine(table, n, sentinel)
        self.voxels = n
        self.table = table
        cand_cls = self.classes[table]
        first = cand_cls[:, 0]
        same = np.all((cand_cls == first[:, None]) | (table == sentinel), axis=1)
        self.voxel_class = np.where(same, first, -1)

    def _refine(self, parent: np.ndarray, n: int, sentinel: int) -> np.ndarray:
        pn = round(len(parent) ** (1 / 3))
        h = 1.0 / n
        ax = np.arange(n)
        ijk = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), -1).reshape(-1, 3)
        pijk = ijk * pn // n
        cand = parent[(pijk[:, 0] * pn + pijk[:, 1]) * pn + pijk[:, 2]]
        lo = ijk * h
        hi = lo + h
        rows, cols = [], []
        for a in range(0, len(lo), 4096):
            c = cand[a : a + 4096]
            p = self.pos[c]
            l, u = lo[a : a + 4096, None, :], hi[a : a + 4096, None, :]
            dmin = (np.maximum(np.maximum(l - p, p - u), 0) ** 2).sum(-1)
            dmax = (np.maximum(np.abs(l - p), np.abs(u - p)) ** 2).sum(-1)
            bound = dmax.min(axis=1, keepdims=True)
            keep = (dmin <= bound * (1 + 1e-9) + 1e-12) & (c != sentinel)
            r, k = np.nonzero(keep)
            rows.append(r + a)
            cols.append(c[r, k])
        rows = np.concatenate(rows)
        cols = np.concatenate(cols)
        counts = np.bincount(rows, minlength=len(lo))
        slot = np.arange(len(rows)) - np.repeat(np.cumsum(counts) - counts, counts)
        table = np.full((len(lo), int(counts.max())), sentinel, dtype=np.int64)
        table[rows, slot] = cols
        return table

    def _voxel(self, pts: np.ndarray) -> np.ndarray:
        v = self.voxels
        ijk = np.minimum((pts * v).astype(np.int64), v - 1)
        return (ijk[:, 0] * v + ijk[:, 1]) * v + ijk[:, 2]

    def nearest(self, pts: np.ndarray) -> np.ndarray:
        """Index of the nearest site for each point."""
        cand = self.table[self._voxel(pts)]
        d2 = ((self.pos[cand] - pts[:, None, :]) ** 2).sum(-1)
        return cand[np.arange(len(pts)), d2.argmin(1)]

    def nearest_class(self, pts: np.ndarray) -> np.ndarray:
        vox = self._voxel(pts)
        out = self.voxel_class[vox]
        amb = np.flatnonzero(out < 0)
        if len(amb):
            out[amb] = self.classes[self.nearest(pts[amb])]
        return out


@functools.lru_cache(maxsize=None)
def _locator(plan: RefinementPlan) -> _NearestSiteLocator:
    return _NearestSiteLocator(plan)


def montecarlo_volumes(
    plan: RefinementPlan | str, samples: int, seed: int, chunk: int = 250_000
) -> dict[SiteClass, MCEstimate]:
    """Estimate every class's cell volume from uniform points in the unit cell.

    The fraction of points nearest to a class, divided by that class's
    multiplicity per cell, estimates one cell's volume.
    """
    plan = _check_plan(plan)
    if samples < 10_000:
        raise ValueError("need at least 10^4 samples")
    loc = _locator(plan)
    mult = multiplicities(plan)
    rng = np.random.Generator(np.random.Philox(seed))
    hits = np.zeros(len(SiteClass), dtype=np.int64)
    done = 0
    while done < samples:
        n = min(chunk, samples - done)
        pts = rng.random((n, 3))
        hits += np.bincount(loc.nearest_class(pts), minlength=len(SiteClass))
        done += n
    out = {}
    for c in plan.classes:
        p = hits[c] / samples
        out[c] = MCEstimate(
            cls=c,
            estimate=p / mult[c],
            stderr=math.sqrt(p * (1 - p) / samples) / mult[c],
            hits=int(hits[c]),
            samples=samples,
        )
    return out


def montecarlo_volume(cls: SiteClass, plan: RefinementPlan | str, samples: int, seed: int) -> MCEstimate:
    plan = _check_plan(plan)
    if cls not in plan:
        raise ValueError(f"{cls.name} not in plan [{plan}]")
    return montecarlo_volumes(plan, samples, seed)[cls]


# --- maximum free point scan ------------------------------------------------

# (plan, point inserted next, its squared gap)
NEXT_INSERTION = {
    "L0": (Vec3(F(1, 2), F(1, 2), F(1, 2)), SiteClass.BODY, "L0,L1"),
    "L0,L1": (Vec3(0, F(1, 4), F(1, 2)), SiteClass.W, "L0,L1,L2W"),
    "L0,L1,L2W": (Vec3(F(5, 24), F(5, 24), F(5, 24)), SiteClass.LAMBDA, "L0,L1,L2W,L3"),
}


@dataclass(frozen=True)
class MaxFreeReport:
    plan: RefinementPlan
    grid_n: int
    max_r2: Rat
    argmax: tuple[Vec3, ...]
    expected_point: Vec3 | None
    expected_r2: Rat | None

    @property
    def ok(self) -> bool:
        if self.expected_point is None:
            return True
        return self.expected_point in self.argmax and self.max_r2 == self.expected_r2


def verify_max_free_point(plan: RefinementPlan | str, grid_n: int = 48) -> MaxFreeReport:
    """Exact brute-force scan of an n^3 grid over the unit cell for the largest
    squared distance to the nearest existing site."""
    plan = _check_plan(plan)
    if grid_n < 48 or grid_n % 48:
        raise ValueError("grid_n must be a positive multiple of 48")
    scale = math.lcm(grid_n, 24)
    step = scale // grid_n
    sites = np.array(
        [[int(c * scale) for c in s.pos] for s in generate(plan, Box.cube(-1, 2))], dtype=np.int64
    )
    ax = np.arange(grid_n, dtype=np.int64) * step
    grid = np.stack(np.meshgrid(ax, ax, ax, indexing="ij"), -1).reshape(-1, 3)
    best = np.empty(len(grid), dtype=np.int64)
    for a in range(0, len(grid), 2048):
        g = grid[a : a + 2048]
        best[a : a + 2048] = ((g[:, None, :] - sites[None]) ** 2).sum(-1).min(1)
    top = int(best.max())
    arg = tuple(sorted(Vec3(*(F(int(c), scale) for c in grid[i])) for i in np.flatnonzero(best == top)))
    exp = NEXT_INSERTION.get(plan.label())
    if exp is None:
        return MaxFreeReport(plan, grid_n, F(top, scale * scale), arg, None, None)
    point, cls, nxt = exp
    return MaxFreeReport(plan, grid_n, F(top, scale * scale), arg, point, nearest_gap(cls, nxt))


# --- aggregated report ------------------------------------------------------

P = PLANS
L0, L1, L2W, L2X, L3 = (P["L0"], P["L0,L1"], P["L0,L1,L2W"], P["L0,L1,L2X"], P["L0,L1,L2W,L3"])
G, B, W, X, M, LAM = (
    SiteClass.GAMMA, SiteClass.BODY, SiteClass.W, SiteClass.X, SiteClass.M, SiteClass.LAMBDA,
)


def _r(*pairs):
    return tuple((F(r), n) for r, n in pairs)


LAMBDA_CELL_VERTICES = tuple(
    Vec3(*v)
    for v in [
        (F(5, 16), 0, 0), (0, F(5, 16), 0), (0, 0, F(5, 16)),
        (F(95, 288), F(13, 144), F(95, 288)),
        (F(59, 144), F(49, 288), F(49, 288)),
        (F(95, 288), F(95, 288), F(13, 144)),
        (F(49, 288), F(59, 144), F(49, 288)),
        (F(13, 144), F(95, 288), F(95, 288)),
        (F(49, 288), F(49, 288), F(59, 144)),
        (F(35, 128), 0, F(35, 128)),
        (F(35, 128), F(35, 128), 0),
        (0, F(35, 128), F(35, 128)),
    ]
)

GOLDENS: dict[str, Any] = {
    "volume.L0.GAMMA": F(1),
    "volume.L1.GAMMA": F(1, 2),
    "volume.L2W.GAMMA": F(125, 1152),
    "volume.L2W.W": F(451, 6912),
    "volume.L2X.X": F(1, 8),
    "volume.L3.GAMMA": F(125, 3072),
    "volume.L3.LAMBDA": F(26291, 884736),
    "volume.L3.W": F(24505, 663552),
    "shells.L0.GAMMA": _r((1, 6), (2, 12), (3, 8), (4, 6), (5, 24), (6, 24)),
    "shells.L1.GAMMA": _r(
        (F(3, 4), 8), (1, 6), (2, 12), (F(11, 4), 24), (3, 8), (4, 6), (F(19, 4), 24), (5, 24), (6, 24)
    ),
    "shells.L2W.GAMMA": _r(
        (F(5, 16), 24), (F(3, 4), 8), (F(13, 16), 24), (1, 6), (F(21, 16), 48), (F(29, 16), 72)
    ),
    "shells.L2W.W": _r(
        (F(1, 8), 4), (F(1, 4), 2), (F(5, 16), 4), (F(3, 8), 8), (F(1, 2), 4), (F(5, 8), 8), (F(3, 4), 8)
    ),
    "faces.L1.GAMMA": ((4, 6), (6, 8)),
    "faces.L2W.GAMMA": ((3, 24),),
    "faces.L2W.W": ((3, 4), (6, 4)),
    "faces.L3.GAMMA": ((3, 8),),
    "faces.L3.LAMBDA": ((3, 4), (4, 6), (6, 1)),
    "faces.L3.W": ((4, 8), (5, 4)),
    "gap.W": F(5, 16),
    "gap.LAMBDA": F(25, 192),
    "gap.X": F(1, 4),
    "tetrakis.pyramid_height": F(5, 48),
    "tetrakis.cube_edge": F(5, 12),
    "tetrakis.apex": F(5, 16),
    "tetrakis.apex_edge_r2": F(25, 256),
    "tetrakis.base_angle_deg": math.degrees(math.acos(2 / 3)),
    "w2.hexagon_edge_r2": (F(1, 48), F(1, 48), F(25, 256), F(25, 256), F(9, 64), F(25, 144)),
    "lambda.first_vertex": Vec3(F(95, 288), F(13, 144), F(95, 288)),
    "lambda.vertices": LAMBDA_CELL_VERTICES,
    "planar.square_step": F(1, 2),
    "planar.triangular_step": F(1, 3),
}


@dataclass(frozen=True)
class CheckResult:
    name: str
    expected: str
    computed: str
    passed: bool

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        return f"{tag}  {self.name}: expected {self.expected}; computed {self.computed}"


@dataclass(frozen=True)
class Report:
    checks: tuple[CheckResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def to_text(self) -> str:
        lines = [c.line() for c in self.checks]
        n = sum(c.passed for c in self.checks)
        lines.append(f"{n}/{len(self.checks)} checks passed")
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "checks": [
                {"name": c.name, "expected": c.expected, "computed": c.computed, "passed": c.passed}
                for c in self.checks
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _show(v: Any) -> str:
    if isinstance(v, Rat):
        return fmt_rat(v)
    if isinstance(v, float):
        return fmt_float(v)
    if isinstance(v, Vec3):
        return "(" + ", ".join(fmt_rat(c) for c in v) + ")"
    if isinstance(v, (tuple, list)):
        return "[" + ", ".join(_show(x) for x in v) + "]"
    return str(v)


def _hist_pairs(h) -> tuple:
    return tuple(h.shells)


def _tetrakis(cell: ConvexCell) -> dict[str, Any]:
    apexes = [v for v in cell.vertices if sum(c == 0 for c in v) == 2]
    corners = [v for v in cell.vertices if abs(v.x) == abs(v.y) == abs(v.z)]
    apex = max(abs(c) for c in apexes[0])
    half = abs(corners[0].x)
    a = next(v for v in apexes if v.x > 0)
    e = next(v for v in corners if v.x > 0)
    e2 = Vec3(e.x, -e.y, e.z)
    u, w = a - e, e2 - e
    cosv = float(u.dot(w)) / math.sqrt(float(u.norm2()) * float(w.norm2()))
    return {
        "pyramid_height": apex - half,
        "cube_edge": 2 * half,
        "apex": apex,
        "apex_edge_r2": (a - e).norm2(),
        "base_angle_deg": math.degrees(math.acos(cosv)),
        "counts": (len(apexes), len(corners)),
    }


def lambda_vertex_from_planes() -> Vec3:
    """Intersect the three bisector planes named for the first hexagon vertex."""
    lam = Vec3(F(5, 24), F(5, 24), F(5, 24))
    others = [Vec3(F(7, 24), F(7, 24), F(7, 24)), Vec3(F(1, 4), 0, F(1, 2)), Vec3(F(1, 2), 0, F(1, 4))]
    hs = [bisector(lam, q) for q in others]
    return solve3(Mat3([h.n for h in hs]), Vec3(*(h.d for h in hs)))


def run_golden_checks(
    goldens: dict[str, Any] | None = None,
    mc_samples: int = 0,
    seed: int = 0,
    grid_n: int = 48,
) -> Report:
    """Run every golden check; failures are entries, never exceptions."""
    g = dict(GOLDENS)
    if goldens:
        g.update(goldens)
    checks: list[CheckResult] = []

    def check(name: str, expected: Any, computed: Any, ok: bool | None = None):
        passed = (expected == computed) if ok is None else ok
        checks.append(CheckResult(name, _show(expected), _show(computed), bool(passed)))

    def cell(cls, plan):
        return representative_cell(cls, plan)

    vol_cases = [
        ("volume.L0.GAMMA", G, L0), ("volume.L1.GAMMA", G, L1), ("volume.L2W.GAMMA", G, L2W),
        ("volume.L2W.W", W, L2W), ("volume.L2X.X", X, L2X), ("volume.L3.GAMMA", G, L3),
        ("volume.L3.LAMBDA", LAM, L3), ("volume.L3.W", W, L3),
    ]
    for key, cls, plan in vol_cases:
        check(key, g[key], volume(cell(cls, plan)))

    for plan in (L1, L2W, L2X, L3):
        t = volume_table(plan)
        check(f"partition.{plan.label('-')}", "1", t.identity(), t.partition_ok)

    check("shells.L0.GAMMA", g["shells.L0.GAMMA"], _hist_pairs(shell_histogram(G, L0, 6)))
    check("shells.L1.GAMMA", g["shells.L1.GAMMA"], _hist_pairs(shell_histogram(G, L1, 6)))
    check("shells.L1.BODY", g["shells.L1.GAMMA"], _hist_pairs(shell_histogram(B, L1, 6)))
    check("shells.L2W.GAMMA", g["shells.L2W.GAMMA"], _hist_pairs(shell_histogram(G, L2W, F(29, 16))))
    check("shells.L2W.W", g["shells.L2W.W"], _hist_pairs(shell_histogram(W, L2W, F(3, 4))))

    face_cases = [
        ("faces.L1.GAMMA", G, L1), ("faces.L2W.GAMMA", G, L2W), ("faces.L2W.W", W, L2W),
        ("faces.L3.GAMMA", G, L3), ("faces.L3.LAMBDA", LAM, L3), ("faces.L3.W", W, L3),
    ]
    for key, cls, plan in face_cases:
        c = cell(cls, plan)
        fv = face_census(c)
        try:
            validate(c)
            valid = "valid"
        except InvalidCell as exc:
            valid = f"invalid: {exc}"
        check(key, g[key], fv.face_sizes)
        check(key + ".manifold", "valid", valid)

    check("gap.W", g["gap.W"], nearest_gap(W, L2W))
    check("gap.LAMBDA", g["gap.LAMBDA"], nearest_gap(LAM, L3))
    check("gap.X", g["gap.X"], nearest_gap(X, L2X))
    for plan in (L0, L1, L2W):
        rep = verify_max_free_point(plan, grid_n)
        check(
            f"maxfree.{plan.label('-')}",
            f"{_show(rep.expected_point)} at {_show(rep.expected_r2)}",
            f"max {_show(rep.max_r2)} over {len(rep.argmax)} grid points",
            rep.ok,
        )

    check("selfsimilar.L2X", True, self_similarity_check(Box.cube(0, 2)))
    check("planar.square_step", g["planar.square_step"], refine_square(1).constant2 / refine_square(0).constant2)
    check(
        "planar.triangular_step",
        g["planar.triangular_step"],
        refine_triangular(1).constant2 / refine_triangular(0).constant2,
    )
    check("planar.k_point", [F(1, 3)] * 3, k_point_gaps())

    tk = _tetrakis(cell(G, L2W))
    for key in ("pyramid_height", "cube_edge", "apex", "apex_edge_r2"):
        check(f"tetrakis.{key}", g[f"tetrakis.{key}"], tk[key])
    check(
        "tetrakis.base_angle_deg",
        g["tetrakis.base_angle_deg"],
        tk["base_angle_deg"],
        abs(g["tetrakis.base_angle_deg"] - tk["base_angle_deg"]) < 1e-9,
    )
    metrics = cell_metrics(cell(W, L2W))
    hexes = [r for f, r in zip(cell(W, L2W).faces, metrics.face_edge_r2) if len(f) == 6]
    want = tuple(sorted(g["w2.hexagon_edge_r2"]))
    check("w2.hexagon_edge_r2", want, hexes[0] if hexes else (), bool(hexes) and all(h == want for h in hexes))

    check("lambda.first_vertex", g["lambda.first_vertex"], lambda_vertex_from_planes())
    lam_verts = set(cell(LAM, L3).vertices)
    want_v = g["lambda.vertices"]
    missing = [v for v in want_v if v not in lam_verts]
    check(
        "lambda.vertices",
        f"{len(want_v)} listed vertices present",
        f"{len(want_v) - len(missing)} present, {len(lam_verts)} total",
        not missing and len(lam_verts) == len(want_v),
    )

    if mc_samples:
        for plan in (L1, L2W, L2X, L3):
            exact = volume_table(plan)
            for cls, est in montecarlo_volumes(plan, mc_samples, seed).items():
                v = exact.volume(cls)
                dev = abs(est.estimate - float(v))
                check(
                    f"montecarlo.{plan.label('-')}.{cls.name}",
                    f"{fmt_float(float(v))} within 4 SE",
                    f"{fmt_float(est.estimate)} +- {est.stderr:.2g}",
                    dev <= 4 * est.stderr,
                )
    return Report(tuple(checks))
