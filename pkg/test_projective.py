"""
P^n: unit cocycles and their degrees, coboundary witnesses, trivializations,
and the witnesses for vanishing higher cohomology of O
"""

import random
from fractions import Fraction

import pytest

from backend.api.errors import (
    CocycleError,
    IncompatibleOperandsError,
    InputError,
    NotInvertibleError,
    NotSemifieldError,
    PreconditionError,
)
from backend.api.laurent import LaurentPoly, section_space
from backend.api.pm_complex import is_cocycle, rho_related
from backend.api.projective import (
    ProjectiveSpace,
    Trivialization,
    UnitCocycle,
    brute_force_unit_witness,
    classify_cocycle,
    coboundary_witness,
    cocycle_from_trivialization,
    common_refinement_witness,
    inverse_cocycle,
    picard_group,
    random_structure_cocycle,
    random_unit_cocycle,
    rescale_trivialization,
    rescaling_witness,
    split_witness,
    standard_trivialization,
    structure_complex,
    tensor_cocycles,
    twisting_cocycle,
    unit_complex,
    vanishing_witness,
)
from backend.api.semiring_core import BOOLEAN, NAT, QMAX, ZMAX


def T(k, coef=None):
    """T^k with T = x1/x0 on P^1"""
    return LaurentPoly.monomial(QMAX, (-k, k), coef)


class TestUnitCocycles:
    def test_dimension(self):
        with pytest.raises(InputError):
            ProjectiveSpace(0)

    def test_twisting_cocycle_entries(self):
        X = ProjectiveSpace(2)
        f = twisting_cocycle(X, 2)
        assert f[(0, 1)] == X.monomial((2, -2, 0))
        assert f[(2, 0)] == X.monomial((-2, 0, 2))
        assert f[(1, 1)] == X.constant()
        assert f.cocycle_violation() is None

    def test_pairs_must_be_complete(self):
        X = ProjectiveSpace(2)
        with pytest.raises(InputError):
            UnitCocycle.from_mapping(X, {(0, 1): X.transition(0, 1, 1)})

    def test_entries_must_be_units(self):
        X = ProjectiveSpace(1)
        with pytest.raises(InputError):
            UnitCocycle.from_mapping(X, {(0, 1): T(1) + T(-1)})
        with pytest.raises(InputError):
            UnitCocycle.from_mapping(ProjectiveSpace(2), {
                (0, 1): ProjectiveSpace(2).monomial((1, 0, -1)),
                (0, 2): ProjectiveSpace(2).constant(),
                (1, 2): ProjectiveSpace(2).constant(),
            })

    def test_cocycle_law(self):
        X = ProjectiveSpace(2)
        f = UnitCocycle.from_mapping(X, {(0, 1): X.transition(0, 1, 1), (0, 2): X.constant(), (1, 2): X.constant()})
        assert f.cocycle_violation() == (0, 1, 2)
        with pytest.raises(CocycleError):
            f.require_cocycle()

    def test_document_form(self):
        X = ProjectiveSpace(2)
        f = random_unit_cocycle(X, -2, random.Random(3))
        doc = f.to_dict()
        assert doc["n"] == 2 and set(doc["entries"]) == {"0,1", "0,2", "1,2"}
        assert UnitCocycle.from_dict(doc) == f

    def test_malformed_document(self):
        with pytest.raises(InputError):
            UnitCocycle.from_dict({"n": 1, "entries": {"01": {"exp": [1, -1]}}})
        with pytest.raises(InputError):
            UnitCocycle.from_dict({"entries": {}})

    def test_unit_sheaf_needs_a_semifield(self):
        X = ProjectiveSpace(1, NAT)
        with pytest.raises(NotSemifieldError):
            twisting_cocycle(X, 1)


class TestClassification:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_twisting_cocycles_classify_to_their_degree(self, n):
        X = ProjectiveSpace(n)
        for m in range(-3, 4):
            c = classify_cocycle(X, twisting_cocycle(X, m))
            assert c.degree == m
            assert all(q == QMAX.one for q in c.q.values())
            assert c.normalized(X) == twisting_cocycle(X, m)

    def test_degree_is_additive_under_tensor(self, rng):
        for _ in range(100):
            X = ProjectiveSpace(rng.randint(1, 3), rng.choice([QMAX, ZMAX]))
            a, b = rng.randint(-4, 4), rng.randint(-4, 4)
            f, g = random_unit_cocycle(X, a, rng), random_unit_cocycle(X, b, rng)
            assert classify_cocycle(X, tensor_cocycles(f, g)).degree == a + b
            assert classify_cocycle(X, inverse_cocycle(f)).degree == -a

    def test_boolean_is_classifiable(self):
        X = ProjectiveSpace(2, BOOLEAN)
        assert classify_cocycle(X, twisting_cocycle(X, -1)).degree == -1

    def test_exponents_must_agree(self):
        X = ProjectiveSpace(2)
        f = UnitCocycle.from_mapping(X, {
            (0, 1): X.transition(0, 1, 1),
            (0, 2): X.transition(0, 2, 2),
            (1, 2): X.transition(1, 2, 1),
        })
        with pytest.raises(CocycleError):
            classify_cocycle(X, f)

    def test_coefficients_must_multiply(self):
        X = ProjectiveSpace(2)
        f = UnitCocycle.from_mapping(X, {
            (0, 1): X.transition(0, 1, 1, Fraction(1)),
            (0, 2): X.transition(0, 2, 1),
            (1, 2): X.transition(1, 2, 1),
        })
        with pytest.raises(CocycleError):
            classify_cocycle(X, f)


class TestCoboundaries:
    def test_equal_degrees_are_cohomologous(self, rng):
        for _ in range(100):
            X = ProjectiveSpace(rng.randint(1, 3))
            m = rng.randint(-3, 3)
            f, g = random_unit_cocycle(X, m, rng), random_unit_cocycle(X, m, rng)
            result = coboundary_witness(X, f, g)
            assert result.equivalent and result.verified
            assert rho_related(unit_complex(X), 1, f.as_cochain(), g.as_cochain(), result.u, result.v)

    def test_distinct_degrees_are_not(self, rng):
        for _ in range(50):
            X = ProjectiveSpace(rng.randint(1, 3))
            a = rng.randint(-3, 3)
            b = rng.choice([d for d in range(-3, 4) if d != a])
            result = coboundary_witness(X, random_unit_cocycle(X, a, rng), random_unit_cocycle(X, b, rng))
            assert not result.equivalent
            assert result.degrees == (a, b)
            assert result.u is None

    def test_exhaustive_search_agrees_on_small_scalars(self):
        X = ProjectiveSpace(1)
        scalars = [Fraction(-1), Fraction(0), Fraction(1)]
        f = UnitCocycle.from_mapping(X, {(0, 1): X.transition(0, 1, 1, Fraction(1))})
        g = UnitCocycle.from_mapping(X, {(0, 1): X.transition(0, 1, 1)})
        assert brute_force_unit_witness(X, f, g, scalars) is not None
        h = twisting_cocycle(X, 2)
        assert brute_force_unit_witness(X, f, h, scalars) is None


class TestTrivializations:
    @pytest.mark.parametrize("m", [-2, 0, 1, 3])
    def test_standard_trivialization_gives_the_twisting_cocycle(self, m):
        X = ProjectiveSpace(2)
        assert cocycle_from_trivialization(X, standard_trivialization(X, m)) == twisting_cocycle(X, m)

    def test_basis_must_generate(self):
        X = ProjectiveSpace(1)
        with pytest.raises(NotInvertibleError):
            Trivialization(X, 1, (X.monomial((1, 0)), X.monomial((1, 0))))
        with pytest.raises(NotInvertibleError):
            Trivialization(X, 1, (X.monomial((1, 0)) + X.monomial((0, 1)), X.monomial((0, 1))))
        with pytest.raises(InputError):
            Trivialization(X, 1, (X.monomial((1, 0)),))

    def test_rescaling_is_a_coboundary(self, rng):
        for _ in range(30):
            X = ProjectiveSpace(rng.randint(1, 3))
            L = standard_trivialization(X, rng.randint(-3, 3))
            g = [QMAX.random_unit(rng, 5) for _ in range(X.nvars)]
            assert rescaling_witness(X, L, g)
            rescaled = cocycle_from_trivialization(X, rescale_trivialization(L, g))
            assert classify_cocycle(X, rescaled).degree == L.degree

    def test_common_refinement(self, rng):
        X = ProjectiveSpace(2)
        L = standard_trivialization(X, 2)
        L2 = rescale_trivialization(L, [Fraction(1), Fraction(-3, 2), Fraction(4)])
        witness = common_refinement_witness(L, L2)
        assert witness.verified and witness.failure is None
        assert len(witness.index) == 9
        assert witness.index[:3] == [(0, 0), (0, 1), (0, 2)]

    def test_refinement_needs_the_same_sheaf(self):
        X = ProjectiveSpace(1)
        with pytest.raises(IncompatibleOperandsError):
            common_refinement_witness(standard_trivialization(X, 1), standard_trivialization(X, 2))


class TestPicardGroup:
    def test_group_law(self, rng):
        G = picard_group(ProjectiveSpace(2))
        assert G.verify_homomorphism(rng, samples=20)
        assert G.class_of(G.identity()) == 0
        assert G.class_of(G.representative_of(-3)) == -3
        f = random_unit_cocycle(G.space, 2, rng)
        assert G.class_of(G.inverse(f)) == -2
        assert G.same_class(f, G.representative_of(2))
        assert not G.same_class(f, G.representative_of(1))

    def test_needs_an_ordered_idempotent_semifield(self):
        with pytest.raises(PreconditionError):
            picard_group(ProjectiveSpace(1, NAT))


class TestVanishing:
    def test_worked_example_on_the_line(self):
        X = ProjectiveSpace(1)
        t = T(2, Fraction(3)) + T(-1, Fraction(1))
        witness = vanishing_witness(X, 1, (t,))
        assert witness.verified
        assert witness.u == (T(2, Fraction(3)), T(-1, Fraction(1)))
        assert witness.u == witness.v
        assert witness.assignment[(0, 1)] == [(0,), (1,)]

    @pytest.mark.slow
    @pytest.mark.parametrize("n, p", [(1, 1), (2, 1), (2, 2), (3, 1), (3, 2), (3, 3)])
    def test_random_cocycles_have_witnesses(self, n, p):
        rng = random.Random(1000 * n + p)
        X = ProjectiveSpace(n)
        C = structure_complex(X, p)
        nonzero = 0
        for _ in range(100):
            t = random_structure_cocycle(X, p, rng)
            assert is_cocycle(C, p, t)
            witness = vanishing_witness(X, p, t)
            assert witness.verified
            nonzero += any(not c.is_zero() for c in t)
        assert nonzero > 50

    def test_boolean_coefficients(self, rng):
        X = ProjectiveSpace(2, BOOLEAN)
        for _ in range(20):
            assert vanishing_witness(X, 1, random_structure_cocycle(X, 1, rng)).verified

    def test_non_cocycle(self):
        X = ProjectiveSpace(2)
        C = structure_complex(X, 1)
        t = C.cochain(1, {(0, 1): X.monomial((-1, 1, 0))})
        with pytest.raises(CocycleError):
            vanishing_witness(X, 1, t)

    def test_degree_range_and_idempotency(self):
        X = ProjectiveSpace(2)
        with pytest.raises(InputError):
            vanishing_witness(X, 3, ())
        with pytest.raises(PreconditionError):
            vanishing_witness(ProjectiveSpace(1, NAT), 1, ())


class TestSplitWitness:
    def test_random_pairs_on_the_line(self, rng):
        X = ProjectiveSpace(1)
        C = structure_complex(X, 1)
        U01 = section_space(1, (0, 1))
        for _ in range(100):
            x, y = U01.random_element(rng, 3, max_terms=4), U01.random_element(rng, 3, max_terms=4)
            u, v = split_witness(X, x, y)
            assert C.spaces[0].contains(u) and C.spaces[0].contains(v)
            assert rho_related(C, 1, (x,), (y,), u, v)

    def test_only_on_the_line(self):
        X = ProjectiveSpace(2)
        with pytest.raises(InputError):
            split_witness(X, X.constant(), X.constant())
