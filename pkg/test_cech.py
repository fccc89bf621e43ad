"""
Cech complexes: covers, sheaf data, differentials, global sections, vanishing and refinement
"""

from fractions import Fraction

import pytest

from backend.api.cech import (
    ConstantSheaf,
    Cover,
    FiniteSheafData,
    StructureSheafPn,
    UnitSheafPn,
    build_cech,
    h0_global,
    opposite,
    refinement_morphism,
    vanishing_bound,
)
from backend.api.errors import InputError, NotSemifieldError, RefinementError, SheafGluingError
from backend.api.laurent import LaurentPoly
from backend.api.pm_complex import (
    check_chain_identity,
    classical_cohomology_finite,
    cohomology_finite,
    compute_cohomology,
    induced_map,
    is_cocycle,
)
from backend.api.semiring_core import BOOLEAN, NAT, QMAX, boolean_table, zmod_table
from backend.api.semimodule import find_isomorphism, regular_module

IDENTITY = [0, 1]


@pytest.fixture
def two_cover():
    return Cover([{"a", "b"}, {"b", "c"}], name="ab|bc")


@pytest.fixture
def constant_b(bool_module):
    return ConstantSheaf(bool_module)


def T(k, coef=None, ring=QMAX):
    """T^k with T = x1/x0 on P^1"""
    return LaurentPoly.monomial(ring, (-k, k), coef)


class TestCover:
    def test_tuples(self):
        U = Cover.standard(2)
        assert U.size == 3
        assert U.tuples(1) == [(0, 1), (0, 2), (1, 2)]
        assert U.tuples(3) == []
        assert U.open((0, 2)) == (0, 2)

    def test_point_set_intersections(self, two_cover):
        assert two_cover.open((0, 1)) == frozenset({"b"})
        assert not two_cover.is_empty((0, 1))
        assert Cover([{1}, {2}]).is_empty((0, 1))

    def test_empty_cover(self):
        with pytest.raises(InputError):
            Cover([])
        with pytest.raises(InputError):
            Cover()


class TestConstantSheaf:
    def test_connected_two_cover(self, two_cover, constant_b):
        C = build_cech(two_cover, constant_b)
        assert compute_cohomology(C, 0).module.size == 2
        assert compute_cohomology(C, 1).module.size == 1
        for n in C.degrees:
            assert check_chain_identity(C, n).exhaustive

    def test_global_sections_glue(self, two_cover, constant_b):
        H0 = h0_global(two_cover, constant_b)
        assert H0.global_sections.size == 2
        assert H0.cocycle_count == 2
        assert H0.verified
        assert H0.r(1) == 3 and H0.s(3) == 1

    def test_disconnected_cover_does_not_glue(self, constant_b):
        with pytest.raises(SheafGluingError):
            h0_global(Cover([{"a"}, {"b"}]), constant_b)

    def test_disconnected_cohomology(self, constant_b):
        C = build_cech(Cover([{"a"}, {"b"}]), constant_b)
        assert compute_cohomology(C, 0).module.size == 4
        assert compute_cohomology(C, 1).module.size == 1


class TestFiniteSheafData:
    def sheaf(self):
        B = regular_module(boolean_table())
        return FiniteSheafData(
            boolean_table(),
            {(0,): B, (1,): B, (0, 1): B},
            {((0, 1), (0,)): IDENTITY, ((0, 1), (1,)): IDENTITY},
        )

    def test_cohomology(self):
        C = build_cech(Cover(count=2), self.sheaf())
        assert compute_cohomology(C, 0).module.size == 2
        assert compute_cohomology(C, 1).module.size == 1
        assert h0_global(Cover(count=2), self.sheaf()).verified

    def test_restrictions_must_be_face_inclusions(self):
        B = regular_module(boolean_table())
        with pytest.raises(InputError):
            FiniteSheafData(boolean_table(), {(0,): B, (0, 1): B}, {((0,), (0, 1)): IDENTITY})

    def test_restrictions_must_commute(self):
        B = regular_module(boolean_table())
        tuples = [(0,), (1,), (2,), (0, 1), (0, 2), (1, 2), (0, 1, 2)]
        faces = {}
        for dst in tuples:
            for k in range(len(dst)):
                src = dst[:k] + dst[k + 1:]
                if src:
                    faces[(dst, src)] = IDENTITY
        faces[((0, 1, 2), (0, 2))] = [0, 0]
        with pytest.raises(InputError):
            FiniteSheafData(boolean_table(), {t: B for t in tuples}, faces)


PROJECTION = [0, 1, 0, 1]


class TestReordering:
    """Reversing the member order permutes cochains and leaves cohomology unchanged up to isomorphism"""

    def lopsided_pair(self, diamond_module):
        B = regular_module(boolean_table())
        return Cover(count=2, name="pair"), FiniteSheafData(
            boolean_table(),
            {(0,): diamond_module, (1,): B, (0, 1): B},
            {((0, 1), (0,)): PROJECTION, ((0, 1), (1,)): IDENTITY},
            name="lopsided",
        )

    def lopsided_chain(self, diamond_module):
        B = regular_module(boolean_table())
        return Cover(count=3, name="chain"), FiniteSheafData(
            boolean_table(),
            {(0,): diamond_module, (1,): B, (2,): B, (0, 1): B, (1, 2): B},
            {
                ((0, 1), (0,)): PROJECTION,
                ((0, 1), (1,)): IDENTITY,
                ((1, 2), (1,)): IDENTITY,
                ((1, 2), (2,)): IDENTITY,
            },
            name="lopsided",
        )

    def assert_same_cohomology(self, cover, F, degrees):
        C = build_cech(cover, F)
        reversed_cover, G = opposite(cover, F)
        D = build_cech(reversed_cover, G)
        for n in degrees:
            H, K = cohomology_finite(C, n), cohomology_finite(D, n)
            assert H.size == K.size, n
            assert find_isomorphism(H, K) is not None, n

    def test_reindexed_sheaf_moves_sections(self, diamond_module):
        _, F = self.lopsided_pair(diamond_module)
        G = F.reindexed({0: 1, 1: 0})
        assert G.sections((1,)) is diamond_module
        assert G.restrict((1,), (0, 1), 3) == 1
        assert G.restrict((0,), (0, 1), 1) == 1

    def test_reindexing_must_be_injective(self, diamond_module):
        _, F = self.lopsided_pair(diamond_module)
        with pytest.raises(InputError):
            F.reindexed({0: 0, 1: 0})
        with pytest.raises(InputError):
            F.reindexed({0: 1})

    def test_two_members(self, diamond_module):
        cover, F = self.lopsided_pair(diamond_module)
        assert cohomology_finite(build_cech(cover, F), 0).size == 4
        self.assert_same_cohomology(cover, F, (0, 1, 2))

    def test_three_members(self, diamond_module):
        cover, F = self.lopsided_chain(diamond_module)
        self.assert_same_cohomology(cover, F, (0, 1, 2))

    def test_point_set_cover(self, constant_b):
        cover = Cover([{"a", "b"}, {"b", "c"}, {"c", "d"}], name="path")
        reversed_cover, G = opposite(cover, constant_b)
        assert reversed_cover.open((0, 1)) == frozenset({"c"})
        assert G is constant_b
        self.assert_same_cohomology(cover, constant_b, (0, 1, 2))

    def test_chart_sheaves_keep_their_order(self):
        with pytest.raises(InputError):
            opposite(Cover.standard(1), StructureSheafPn(1, QMAX))


class TestGroupCoefficients:
    """With Z/m coefficients the +- cohomology is the classical Cech cohomology"""

    COVERS = {
        "two": [{"a", "b"}, {"b", "c"}],
        "triangle": [{"a", "b"}, {"b", "c"}, {"c", "a"}],
        "apart": [{"a"}, {"b"}],
    }

    @pytest.mark.parametrize("modulus", [2, 3])
    @pytest.mark.parametrize("shape", sorted(COVERS))
    def test_matches_classical(self, modulus, shape):
        F = ConstantSheaf(regular_module(zmod_table(modulus)))
        C = build_cech(Cover(self.COVERS[shape], name=shape), F)
        for n in (0, 1, 2):
            H, K = cohomology_finite(C, n), classical_cohomology_finite(C, n)
            assert H.size == K.size, n
            assert find_isomorphism(H, K) is not None, n

    @pytest.mark.parametrize("modulus", [2, 3])
    def test_triangle_has_a_loop(self, modulus):
        F = ConstantSheaf(regular_module(zmod_table(modulus)))
        C = build_cech(Cover(self.COVERS["triangle"]), F)
        assert cohomology_finite(C, 0).size == modulus
        assert cohomology_finite(C, 1).size == modulus
        assert cohomology_finite(C, 2).size == 1


class TestProjectiveLine:
    @pytest.fixture
    def complex_(self):
        return build_cech(Cover.standard(1), StructureSheafPn(1, QMAX), max_degree=1)

    def test_differentials_pick_the_other_chart(self, complex_):
        a, b = T(2, Fraction(1)), T(-1, Fraction(3))
        assert complex_.plus(0, (a, b)) == (b,)
        assert complex_.minus(0, (a, b)) == (a,)

    def test_every_laurent_polynomial_in_t_is_a_cocycle(self, complex_):
        t = T(2, Fraction(3)) + T(-1, Fraction(1))
        assert is_cocycle(complex_, 1, (t,))
        assert not is_cocycle(complex_, 1, (LaurentPoly.monomial(QMAX, (1, -2)),))

    def test_chart_sections_have_no_negative_foreign_exponents(self, complex_):
        assert not complex_.spaces[0].contains((T(-1), T(-1)))
        assert complex_.spaces[0].contains((T(1), T(-1)))

    def test_components_and_cochains(self, complex_):
        y = complex_.cochain(0, {(1,): T(-2)})
        assert complex_.components(0, y)[(0,)].is_zero()
        with pytest.raises(InputError):
            complex_.cochain(0, {(0, 1): T(0)})


class TestGlobalSections:
    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize("ring", [BOOLEAN, QMAX])
    def test_constants_are_the_global_sections(self, n, ring):
        H0 = h0_global(Cover.standard(n), StructureSheafPn(n, ring), samples=8)
        assert H0.global_sections is ring
        assert H0.verified, H0.checks
        assert H0.cocycle_count >= 2

    def test_round_trip_of_a_constant(self):
        H0 = h0_global(Cover.standard(1), StructureSheafPn(1, QMAX), samples=8)
        family = H0.r(Fraction(5, 2))
        assert family == (LaurentPoly.constant(QMAX, 2, Fraction(5, 2)),) * 2
        assert H0.s(family) == Fraction(5, 2)

    def test_non_matching_family(self):
        H0 = h0_global(Cover.standard(1), StructureSheafPn(1, QMAX), samples=8)
        with pytest.raises(SheafGluingError):
            H0.s((T(1), T(0)))

    def test_twisted_sheaf_has_no_model(self):
        with pytest.raises(InputError):
            h0_global(Cover.standard(1), StructureSheafPn(1, QMAX, degree=1), samples=8)


class TestVanishing:
    def test_degrees_at_the_cover_size_are_empty_products(self):
        assert vanishing_bound(Cover.standard(1), StructureSheafPn(1, QMAX), 2)
        assert vanishing_bound(Cover.standard(2), StructureSheafPn(2, QMAX), 4)

    def test_finite_sheaf(self, two_cover, constant_b):
        assert vanishing_bound(two_cover, constant_b, 2)

    def test_no_claim_below_the_cover_size(self, two_cover, constant_b):
        assert not vanishing_bound(two_cover, constant_b, 1)


@pytest.mark.slow
class TestSampledChainIdentity:
    @pytest.mark.parametrize(
        "n, sheaf",
        [
            (1, StructureSheafPn(1, QMAX)),
            (2, StructureSheafPn(2, QMAX)),
            (2, StructureSheafPn(2, QMAX, degree=1)),
            (2, StructureSheafPn(2, NAT)),
            (1, UnitSheafPn(1, QMAX)),
            (2, UnitSheafPn(2, QMAX)),
        ],
    )
    def test_thousand_samples_per_degree(self, n, sheaf):
        C = build_cech(Cover.standard(n), sheaf, max_degree=2)
        for p in (0, 1):
            result = check_chain_identity(C, p, samples=1000)
            assert result.holds, result.counterexample
            assert result.tested == 1001
            assert not result.exhaustive

    def test_unit_sheaf_needs_a_semifield(self):
        with pytest.raises(NotSemifieldError):
            UnitSheafPn(1, NAT)


class TestRefinement:
    def test_identity_refinement(self, two_cover, constant_b):
        f = refinement_morphism(two_cover, two_cover, (0, 1), constant_b)
        assert induced_map(f, 0) == {0: 0, 1: 1}

    def test_collapse_on_empty_intersections(self, two_cover, constant_b):
        fine = Cover([{"a"}, {"b"}, {"c"}])
        f = refinement_morphism(fine, two_cover, (0, 0, 1), constant_b)
        H_coarse = compute_cohomology(f.source, 0)
        H_fine = compute_cohomology(f.target, 0)
        assert H_fine.module.size == 8
        mapping = induced_map(f, 0)
        assert mapping[H_coarse.class_of(0)] == H_fine.class_of(0)
        assert len(set(mapping.values())) == 2

    def test_collapse_on_a_nonempty_intersection_is_rejected(self, two_cover, constant_b):
        fine = Cover([{"a", "b"}, {"b"}, {"b", "c"}])
        with pytest.raises(RefinementError):
            refinement_morphism(fine, two_cover, (0, 0, 1), constant_b)

    def test_members_must_be_contained(self, two_cover, constant_b):
        with pytest.raises(RefinementError):
            refinement_morphism(two_cover, two_cover, (1, 0), constant_b)
        with pytest.raises(RefinementError):
            refinement_morphism(two_cover, two_cover, (0,), constant_b)

    def test_refinements_compose(self, constant_b):
        U = Cover([{"a", "b", "c"}, {"c", "d"}], name="U")
        V = Cover([{"a", "b", "c"}, {"c"}], name="V")
        W = Cover([{"a"}, {"b", "c"}, {"c"}], name="W")
        CU, CV, CW = (build_cech(cover, constant_b, max_degree=2) for cover in (U, V, W))
        v_to_u = refinement_morphism(V, U, (0, 1), constant_b, source=CU, target=CV)
        w_to_v = refinement_morphism(W, V, (0, 0, 1), constant_b, source=CV, target=CW)
        w_to_u = refinement_morphism(W, U, (0, 0, 1), constant_b, source=CU, target=CW)
        composite = w_to_v.compose(v_to_u)
        for p in CU.degrees:
            for x in CU.spaces[p].values():
                assert w_to_u(p, x) == composite(p, x), (p, x)
        for p in (0, 1):
            first, second, direct = induced_map(v_to_u, p), induced_map(w_to_v, p), induced_map(w_to_u, p)
            assert direct == {c: second[first[c]] for c in first}

    def test_prebuilt_complexes_must_match_the_covers(self, two_cover, constant_b):
        other = build_cech(Cover([{"a", "b"}, {"b", "c"}]), constant_b)
        with pytest.raises(RefinementError):
            refinement_morphism(two_cover, two_cover, (0, 1), constant_b, source=other)
