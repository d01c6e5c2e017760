import itertools
from concurrent.futures import ThreadPoolExecutor

import pytest
from hypothesis import given, settings, strategies as st

from screfine.exactnum import Rat, Vec3, as_rat
from screfine.lattice import (
    CELL_OFFSETS,
    PLANS,
    Box,
    ClassNotInPlan,
    InvalidPlan,
    RefinementPlan,
    Site,
    SiteClass,
    candidate_neighbors,
    classify,
    generate,
    histogram_about,
    nearest_gap,
    representative,
    sc_lattice,
    self_similarity_check,
    shell_histogram,
)

G, B, W, X, M, LAM = SiteClass
UNIT = Box.cube(0, 1)


def r(*pairs):
    return [(Rat(a), n) for a, n in pairs]


TABLE_I = r((1, 6), (2, 12), (3, 8), (4, 6), (5, 24), (6, 24))
TABLE_II = r(("3/4", 8), (1, 6), (2, 12), ("11/4", 24), (3, 8), (4, 6), ("19/4", 24), (5, 24), (6, 24))
TABLE_III = r(("5/16", 24), ("3/4", 8), ("13/16", 24), (1, 6), ("21/16", 48), ("29/16", 72))
TABLE_IV = r(("1/8", 4), ("1/4", 2), ("5/16", 4), ("3/8", 8), ("1/2", 4), ("5/8", 8), ("3/4", 8))


def brute_histogram(center, plan, max_r2, reach=4):
    counts = {}
    for s in generate(plan, Box.around(center, reach)):
        d2 = (s.pos - center).norm2()
        if 0 < d2 <= max_r2:
            counts[d2] = counts.get(d2, 0) + 1
    return sorted(counts.items())


class TestPlan:
    @pytest.mark.parametrize("text", ["L0", "L0,L1", "L0,L1,L2W", "L0,L1,L2X", "L0,L1,L2W,L3"])
    def test_valid(self, text):
        assert RefinementPlan.parse(text).label() == text

    @pytest.mark.parametrize("text", ["L1", "L0,L2W", "L0,L1,L2X,L3", "L0,L1,L3", "", "L0,L0", "L5"])
    def test_invalid(self, text):
        with pytest.raises(InvalidPlan):
            RefinementPlan.parse(text)


class TestGenerate:
    def test_level0_single_site(self):
        assert generate("L0", UNIT) == [Site(G, Vec3(0, 0, 0), 0)]

    @pytest.mark.parametrize(
        "plan,count", [("L0", 1), ("L0,L1", 2), ("L0,L1,L2W", 14), ("L0,L1,L2X", 8), ("L0,L1,L2W,L3", 30)]
    )
    def test_density(self, plan, count):
        assert len(generate(plan, UNIT)) == count
        assert len(generate(plan, Box.cube(-1, 2))) == 27 * count

    def test_level2w_census(self):
        sites = generate("L0,L1,L2W", UNIT)
        assert [s.cls for s in sites].count(W) == 12

    def test_level3_adds_sixteen(self):
        sites = generate("L0,L1,L2W,L3", UNIT)
        assert sum(s.cls == LAM for s in sites) == 16

    def test_sorted_and_unique(self):
        sites = generate("L0,L1,L2W,L3", Box.cube(-1, 1))
        assert sites == sorted(sites)
        assert len({s.pos for s in sites}) == len(sites)

    def test_denominators(self):
        limit = {G: 2, B: 2, W: 4, X: 4, M: 4, LAM: 24}
        for plan in ("L0,L1,L2W,L3", "L0,L1,L2X"):
            for s in generate(plan, Box.cube(-1, 1)):
                assert all(limit[s.cls] % c.denominator == 0 for c in s.pos)

    def test_lambda_on_space_diagonals(self):
        params = {Rat(k, 24) for k in (5, 7, 17, 19)}
        diagonals = [
            (Vec3(0, 0, 0), Vec3(1, 1, 1)),
            (Vec3(1, 0, 0), Vec3(-1, 1, 1)),
            (Vec3(0, 1, 0), Vec3(1, -1, 1)),
            (Vec3(0, 0, 1), Vec3(1, 1, -1)),
        ]
        lam = [s.pos for s in generate("L0,L1,L2W,L3", UNIT) if s.cls == LAM]
        for origin, d in diagonals:
            on = {p for p in lam if (p - origin).cross(d).is_zero()}
            assert len(on) == 4
            assert {(p - origin).x / d.x for p in on} == params

    @given(
        st.tuples(st.integers(-3, 3), st.integers(-3, 3), st.integers(-3, 3)),
        st.fractions(-2, 1, max_denominator=24),
        st.fractions(Rat(1, 24), 2, max_denominator=24),
    )
    @settings(max_examples=30, deadline=None)
    def test_translation_closure(self, shift, lo, width):
        box = Box.cube(as_rat(lo), as_rat(lo) + as_rat(width))
        v = Vec3(*shift)
        base = {(s.cls, s.pos + v) for s in generate("L0,L1,L2W,L3", box)}
        moved = {(s.cls, s.pos) for s in generate("L0,L1,L2W,L3", box.shifted(v))}
        assert base == moved

    @pytest.mark.parametrize("plan", list(PLANS))
    def test_cubic_symmetry_about_gamma(self, plan):
        sites = {(s.cls, s.pos) for s in generate(plan, Box.cube(-2, 3))}
        inner = {(c, p) for c, p in sites if all(abs(x) <= 1 for x in p)}
        for perm in itertools.permutations(range(3)):
            for signs in itertools.product((1, -1), repeat=3):
                img = {(c, Vec3(*(signs[i] * p[perm[i]] for i in range(3)))) for c, p in inner}
                assert img == inner

    def test_parallel_subboxes_match_serial(self):
        plan = "L0,L1,L2W,L3"
        full = Box.cube(-1, 2)
        cuts = [Rat(-1), Rat(-1, 3), Rat(1, 2), Rat(7, 5), Rat(2)]
        parts = [Box(Vec3(a, -1, -1), Vec3(b, 2, 2)) for a, b in zip(cuts, cuts[1:])]
        with ThreadPoolExecutor(max_workers=4) as pool:
            chunks = list(pool.map(lambda b: generate(plan, b), parts))
        merged = sorted(s for c in chunks for s in c)
        assert merged == generate(plan, full)

    def test_classify(self):
        assert classify("L0,L1,L2W,L3", Vec3("-5/24", "5/24", "-5/24")) is LAM
        assert classify("L0,L1,L2W", Vec3(3, "1/4", "-1/2")) is W
        assert classify("L0,L1,L2W", Vec3("5/24", 0, 0)) is None


class TestShells:
    def test_table_i(self):
        assert shell_histogram(G, "L0", 6).as_pairs() == TABLE_I

    def test_table_ii(self):
        assert shell_histogram(G, "L0,L1", 6).as_pairs() == TABLE_II

    def test_table_ii_body_same(self):
        assert shell_histogram(B, "L0,L1", 6) == shell_histogram(G, "L0,L1", 6)

    def test_table_iii(self):
        assert shell_histogram(G, "L0,L1,L2W", Rat(29, 16)).as_pairs() == TABLE_III

    def test_table_iv(self):
        assert shell_histogram(W, "L0,L1,L2W", Rat(3, 4)).as_pairs() == TABLE_IV

    @pytest.mark.parametrize("plan,cls,max_r2", [
        ("L0,L1", G, 3), ("L0,L1,L2W", W, 1), ("L0,L1,L2W,L3", LAM, 1), ("L0,L1,L2X", X, 2),
    ])
    def test_matches_brute_force(self, plan, cls, max_r2):
        center = representative(cls, plan).pos
        assert shell_histogram(cls, plan, max_r2).as_pairs() == brute_histogram(center, plan, max_r2)

    @pytest.mark.parametrize("plan", ["L0,L1,L2W", "L0,L1,L2X", "L0,L1,L2W,L3"])
    def test_independent_of_representative(self, plan):
        for cls in RefinementPlan.parse(plan).classes:
            ref = shell_histogram(cls, plan, 2)
            for off in CELL_OFFSETS[cls]:
                assert histogram_about(off, plan, 2) == ref

    def test_class_not_in_plan(self):
        with pytest.raises(ClassNotInPlan):
            shell_histogram(W, "L0,L1", 1)


class TestNeighbors:
    def test_six_unit_neighbors(self):
        nb = candidate_neighbors(representative(G, "L0"), "L0", 1)
        assert len(nb) == 6 and all(s.pos.norm2() == 1 for s in nb)

    def test_eight_body_centers(self):
        nb = candidate_neighbors(representative(G, "L0,L1"), "L0,L1", Rat(3, 4))
        assert len(nb) == 8 and all(s.cls is B for s in nb)

    def test_empty_below_gap(self):
        assert candidate_neighbors(Vec3("1/3", "1/7", 0), "L0", Rat(1, 32)) == []

    def test_sorted_by_distance(self):
        c = representative(LAM, "L0,L1,L2W,L3")
        d = [(s.pos - c.pos).norm2() for s in candidate_neighbors(c, "L0,L1,L2W,L3", 2)]
        assert d == sorted(d)
        # the nearest neighbor of a Lambda site is the Lambda beside it on the diagonal
        assert d[0] == 3 * Rat(1, 12) ** 2


class TestGaps:
    def test_w(self):
        assert nearest_gap(W, "L0,L1,L2W") == Rat(5, 16)

    def test_lambda(self):
        assert nearest_gap(LAM, "L0,L1,L2W,L3") == Rat(25, 192)

    def test_x(self):
        assert nearest_gap(X, "L0,L1,L2X") == Rat(1, 4)

    def test_wrong_class(self):
        with pytest.raises(ClassNotInPlan):
            nearest_gap(G, "L0,L1,L2W")

    def test_lambda_has_seven_nearest(self):
        lam = Vec3("5/24", "5/24", "5/24")
        nb = candidate_neighbors(lam, "L0,L1,L2W", Rat(25, 192))
        assert sorted(s.cls for s in nb) == [G] + [W] * 6
        assert {s.pos for s in nb if s.cls is W} == {
            Vec3(*p) for p in itertools.permutations((0, "1/4", "1/2"))
        }


class TestSelfSimilarity:
    def test_level2x_is_half_sc(self):
        assert self_similarity_check(Box.cube(0, 2))

    def test_offset_box(self):
        assert self_similarity_check(Box(Vec3("-1/3", 0, "1/5"), Vec3(2, "9/4", "5/2")))

    def test_third_spacing_fails(self):
        assert not self_similarity_check(Box.cube(0, 2), spacing=Rat(1, 3))

    def test_level2w_not_cubic(self):
        # 14 sites per cell is no cube number, so no SC spacing 1/k matches
        for k in range(1, 5):
            assert not self_similarity_check(Box.cube(0, 2), plan="L0,L1,L2W", spacing=Rat(1, k))

    def test_sc_lattice_counts(self):
        assert len(sc_lattice(Rat(1, 2), Box.cube(0, 2))) == 64
