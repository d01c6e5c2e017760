"""Acceptance gate: ten criteria, each reported as one PASS/FAIL line."""

import io
import random
from contextlib import contextmanager

import numpy as np
import pytest

from screfine.analysis import (
    LAMBDA_CELL_VERTICES,
    _tetrakis,
    montecarlo_volumes,
    multiplicities,
    representative_cell,
    verify_max_free_point,
    volume_table,
)
from screfine.exactnum import Rat, Vec3
from screfine.figures import PRESETS, assembly_cells
from screfine.lattice import (
    PLANS,
    Box,
    SiteClass,
    candidate_neighbors,
    generate,
    histogram_about,
    nearest_gap,
    representative,
    self_similarity_check,
    shell_histogram,
)
from screfine.meshio import read_off, stl_size, to_float_mesh, watertight_blocks, write_off, write_stl
from screfine.planar import recurrence_table
from screfine.voronoi import (
    canonical_form,
    cell_from_neighbors,
    cell_metrics,
    face_census,
    validate,
    voronoi_cell,
    volume,
)

G, B, W, X, M, LAM = SiteClass
L0, L1, L2W, L2X, L3 = (PLANS[k] for k in ("L0", "L0,L1", "L0,L1,L2W", "L0,L1,L2X", "L0,L1,L2W,L3"))
ALL = [(c, p) for p in PLANS.values() for c in p.classes]

RESULTS: dict[int, str] = {}


@contextmanager
def criterion(n: int, title: str):
    try:
        yield
    except BaseException:
        RESULTS[n] = f"FAIL  {n:2d}. {title}"
        print(RESULTS[n])
        raise
    RESULTS[n] = f"PASS  {n:2d}. {title}"
    print(RESULTS[n])


def pairs(h):
    return [(r2, n) for r2, n in h.as_pairs()]


def test_01_exact_volumes():
    with criterion(1, "exact cell volumes by direct construction"):
        cases = [
            (G, L0, Rat(1)),
            (G, L1, Rat(1, 2)),
            (G, L2W, Rat(125, 1152)),
            (W, L2W, Rat(451, 6912)),
            (G, L3, Rat(125, 3072)),
            (LAM, L3, Rat(26291, 884736)),
            (W, L3, Rat(24505, 663552)),
        ]
        for cls, plan, want in cases:
            assert volume(voronoi_cell(representative(cls, plan), plan)) == want, (cls, plan)


def test_02_partition_identities():
    with criterion(2, "partition identities exact"):
        assert 2 * Rat(1, 2) == 1
        assert 2 * Rat(125, 1152) + 12 * Rat(451, 6912) == 1
        assert 2 * Rat(125, 3072) + 16 * Rat(26291, 884736) + 12 * Rat(24505, 663552) == 1
        assert 8 * Rat(1, 8) == 1
        for plan in (L1, L2W, L2X, L3):
            t = volume_table(plan)
            assert t.total == 1 and t.partition_ok
        assert multiplicities(L3) == {G: 1, B: 1, W: 12, LAM: 16}
        assert sum(multiplicities(L2X).values()) == 8


def test_03_neighbor_tables():
    r = Rat
    with criterion(3, "neighbor shell tables"):
        assert pairs(shell_histogram(G, L0, 6)) == [(1, 6), (2, 12), (3, 8), (4, 6), (5, 24), (6, 24)]
        t2 = [(r(3, 4), 8), (1, 6), (2, 12), (r(11, 4), 24), (3, 8), (4, 6), (r(19, 4), 24), (5, 24), (6, 24)]
        assert pairs(shell_histogram(G, L1, 6)) == t2
        t3 = [(r(5, 16), 24), (r(3, 4), 8), (r(13, 16), 24), (1, 6), (r(21, 16), 48), (r(29, 16), 72)]
        assert pairs(shell_histogram(G, L2W, r(29, 16))) == t3
        t4 = [(r(1, 8), 4), (r(1, 4), 2), (r(5, 16), 4), (r(3, 8), 8), (r(1, 2), 4), (r(5, 8), 8), (r(3, 4), 8)]
        assert pairs(shell_histogram(W, L2W, r(3, 4))) == t4
        assert shell_histogram(B, L1, 6) == shell_histogram(G, L1, 6)


def test_04_face_censuses():
    with criterion(4, "face censuses, Euler characteristic, manifold edges"):
        cases = [
            (G, L1, {4: 6, 6: 8}),
            (G, L2W, {3: 24}),
            (W, L2W, {3: 4, 6: 4}),
            (G, L3, {3: 8}),
            (LAM, L3, {6: 1, 4: 6, 3: 4}),
            (W, L3, {4: 8, 5: 4}),
        ]
        for cls, plan, want in cases:
            fv = face_census(representative_cell(cls, plan))
            assert dict(fv.face_sizes) == want, (cls, plan, fv)
        for cls, plan in ALL:
            c = representative_cell(cls, plan)
            fv = face_census(c)
            assert fv.vertices - fv.edges + fv.faces == 2
            validate(c)


def test_05_insertion_gaps():
    with criterion(5, "insertion gaps exact, grid scan at n=48"):
        assert nearest_gap(W, L2W) == Rat(5, 16)
        assert nearest_gap(LAM, L3) == Rat(25, 192)
        assert nearest_gap(X, L2X) == Rat(1, 4)
        assert nearest_gap(M, L2X) == Rat(1, 4)

        scan = verify_max_free_point(L1, 48)
        w_pts = {s.pos for s in generate(L2W, Box.cube(0, 1)) if s.cls is W}
        assert scan.max_r2 == Rat(5, 16) and set(scan.argmax) == w_pts

        scan = verify_max_free_point(L2W, 48)
        lam_pts = {s.pos for s in generate(L3, Box.cube(0, 1)) if s.cls is LAM}
        assert scan.max_r2 == Rat(25, 192) and set(scan.argmax) == lam_pts

        # X is the lighter alternative: its free range to the BCC sites is a/2,
        # below the stage maximum attained by W.
        x = representative(X, L2X).pos
        x_gap = histogram_about(x, L1, 1).as_pairs()[0][0]
        assert x_gap == Rat(1, 4) < verify_max_free_point(L1, 48).max_r2


def test_06_cell_metrics():
    with criterion(6, "Lambda vertices, W hexagon edges, Tetrakis geometry"):
        lam = representative_cell(LAM, L3)
        assert Vec3("95/288", "13/144", "95/288") in lam.vertices
        assert set(lam.vertices) == set(LAMBDA_CELL_VERTICES) and len(lam.vertices) == 12

        w = representative_cell(W, L2W)
        want = sorted(Rat(x) for x in ("25/144", "25/256", "25/256", "1/48", "1/48", "9/64"))
        hexes = [e for f, e in zip(w.faces, cell_metrics(w).face_edge_r2) if len(f) == 6]
        assert hexes and all(sorted(h) == want for h in hexes)

        tk = _tetrakis(representative_cell(G, L2W))
        assert tk["pyramid_height"] == Rat(5, 48) and tk["cube_edge"] == Rat(5, 12)


def test_07_self_similarity():
    with criterion(7, "level-2X equals SC(1/2); planar squared scales 1/2 and 1/3"):
        assert self_similarity_check(Box.cube(0, 2))
        assert not self_similarity_check(Box.cube(0, 2), spacing=Rat(1, 3))
        for kind, ratio in (("square", Rat(1, 2)), ("triangular", Rat(1, 3))):
            rows = recurrence_table(kind, 6)
            for a, b in zip(rows, rows[1:]):
                assert b.constant2 / a.constant2 == ratio


def test_08_robustness():
    with criterion(8, "clip-order invariance x20, cutoff 4 vs 9, congruence"):
        rng = random.Random(2024)
        for cls, plan in ALL:
            rep = representative(cls, plan)
            ref = representative_cell(cls, plan).key()
            assert voronoi_cell(rep, plan, 9).key() == ref
            nb = candidate_neighbors(rep, plan, 4)
            for _ in range(20):
                rng.shuffle(nb)
                assert cell_from_neighbors(rep, nb).key() == ref
        for plan in PLANS.values():
            canon = {cls: canonical_form(representative_cell(cls, plan)) for cls in plan.classes}
            for box in (Box.cube(0, 1), Box.cube(-1, 0).shifted(Vec3(0, 2, 1))):
                for s in generate(plan, box):
                    assert canonical_form(voronoi_cell(s, plan)) == canon[s.cls], s


@pytest.mark.slow
def test_09_montecarlo():
    with criterion(9, "Monte-Carlo within 4 SE for >= 99 of 100 seeds, 1e6 samples"):
        worst = {}
        for plan in PLANS.values():
            exact = volume_table(plan)
            misses = {cls: 0 for cls in plan.classes}
            for seed in range(100):
                for cls, est in montecarlo_volumes(plan, 10**6, seed).items():
                    if abs(est.estimate - float(exact.volume(cls))) > 4 * est.stderr:
                        misses[cls] += 1
            for cls, n in misses.items():
                worst[(plan.label(), cls.name)] = n
        bad = {k: n for k, n in worst.items() if n > 1}
        assert not bad, bad


def test_10_mesh_output():
    with criterion(10, "STL size 84+50T, OFF round-trip bit-identical, watertight"):
        meshes = [to_float_mesh([representative_cell(c, p)]) for c, p in ALL]
        meshes += [to_float_mesh(assembly_cells(name)) for name in sorted(PRESETS)]
        for m in meshes:
            buf = io.BytesIO()
            write_stl(m, buf)
            assert len(buf.getvalue()) == stl_size(len(m.triangles)) == 84 + 50 * len(m.triangles)
            text = io.StringIO()
            write_off(m, text)
            verts, faces = read_off(io.StringIO(text.getvalue()))
            assert verts.tobytes() == m.vertices.tobytes() and faces == m.polygons
            assert np.array_equal(verts, m.vertices)
            assert all(watertight_blocks(m))
