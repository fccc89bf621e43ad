"""
Affine pieces: prime ideals, monomial localizations, cover certificates and
the contraction of O* cocycles on principal covers
"""

import random
from fractions import Fraction

import pytest

from backend.api.affine import (
    MonomialLocalization,
    PrincipalCover,
    contract_unit_cocycle,
    cover_witness,
    detect_unit,
    is_ideal,
    is_prime,
    laurent_torus,
    prime_ideals,
    random_principal_cover,
    random_unit_cochain,
    unordered_coboundary,
    unordered_pm_differentials,
)
from backend.api.errors import CocycleError, GuardExceededError, InputError, NotInvertibleError, PreconditionError
from backend.api.laurent import LaurentPoly
from backend.api.semiring_core import NAT, QMAX, boolean_table, chain_table, zmod_table


def mono(exp, coef=None, ring=QMAX):
    return LaurentPoly.monomial(ring, exp, coef)


@pytest.fixture
def half_torus():
    """Q_max[x0, x1] with x0 inverted"""
    return MonomialLocalization.of(QMAX, (1, 0))


class TestPrimeIdeals:
    def test_chain(self, chain3):
        assert [sorted(P.elements) for P in prime_ideals(chain3)] == [[0], [0, 1]]

    def test_boolean(self):
        assert [sorted(P.elements) for P in prime_ideals(boolean_table())] == [[0]]

    def test_integers_mod_n(self, z4):
        assert [sorted(P.elements) for P in prime_ideals(z4)] == [[0, 2]]
        assert [sorted(P.elements) for P in prime_ideals(zmod_table(6))] == [[0, 3], [0, 2, 4]]

    def test_ideal_predicates(self, chain3, z4):
        assert not is_ideal(chain3, [0, 2])
        assert is_ideal(z4, [0])
        assert not is_prime(z4, [0])

    def test_guard(self):
        with pytest.raises(GuardExceededError):
            prime_ideals(chain_table(20))

    def test_labels(self, chain3):
        P = prime_ideals(chain3)[1]
        assert P.to_dict()["elements"] == [0, 1]
        assert 1 in P and 2 not in P


class TestLocalization:
    def test_membership(self, half_torus):
        assert half_torus.inverted == frozenset({0})
        assert half_torus.contains(mono((-3, 2)))
        assert not half_torus.contains(mono((1, -1)))

    def test_units(self, half_torus):
        assert half_torus.is_unit(mono((-2, 0), Fraction(3)))
        assert not half_torus.is_unit(mono((0, 1)))
        assert half_torus.inverse(mono((2, 0))) == mono((-2, 0))
        with pytest.raises(NotInvertibleError):
            half_torus.inverse(mono((0, 1)))

    def test_localizing_at_a_monomial(self, half_torus):
        B = half_torus.localize(mono((0, 2)))
        assert B.g == (1, 2)
        assert B.is_unit(mono((0, -1)))
        with pytest.raises(PreconditionError):
            half_torus.localize(mono((0, 1)) + mono((1, 0)))

    def test_validation(self):
        with pytest.raises(InputError):
            MonomialLocalization.of(QMAX, (-1, 0))

    def test_description(self, half_torus):
        assert half_torus.describe().endswith("_x0")
        assert laurent_torus(3).g == (1, 1, 1)


class TestCoverWitness:
    def test_unit_member_gives_a_certificate(self, half_torus):
        fs = [mono((0, 1)), mono((2, 0), Fraction(5))]
        witness = cover_witness(half_torus, fs)
        assert witness.found and witness.index == 1
        total = witness.h[0] * fs[0] + witness.h[1] * fs[1]
        assert total == half_torus.one()

    def test_definite_refusal_over_an_ordered_semifield(self, half_torus):
        witness = cover_witness(half_torus, [mono((0, 1)), mono((1, 2))])
        assert witness.status == "none"
        assert not witness.found

    def test_bounded_search_elsewhere(self):
        A = MonomialLocalization.of(NAT, (0, 0))
        witness = cover_witness(A, [mono((1, 0), ring=NAT), mono((0, 1), ring=NAT)])
        assert witness.status == "inconclusive"
        assert cover_witness(A, [mono((1, 0), ring=NAT), LaurentPoly.constant(NAT, 2)]).index == 1

    def test_family_validation(self, half_torus):
        with pytest.raises(InputError):
            cover_witness(half_torus, [])
        with pytest.raises(InputError):
            cover_witness(half_torus, [mono((0, -1))])

    def test_detect_unit(self, half_torus):
        cert = detect_unit(half_torus, [mono((0, 1)), mono((-1, 0), Fraction(2))])
        assert cert.index == 1 and cert.verified

    def test_sum_of_units_is_not_a_unit(self):
        A = laurent_torus(2)
        with pytest.raises(PreconditionError):
            detect_unit(A, [mono((-1, 1)) + mono((1, -1))])


class TestUnorderedCochains:
    def test_charts_accumulate(self, half_torus):
        cover = PrincipalCover(half_torus, (mono((0, 1)), half_torus.one()))
        assert cover.chart((0, 0)).g == (1, 2)
        assert cover.tuples(1) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_charts_are_monomials(self, half_torus):
        with pytest.raises(PreconditionError):
            PrincipalCover(half_torus, (mono((0, 1)) + half_torus.one(),))

    def test_alternating_product_is_plus_over_minus(self, rng, half_torus):
        for _ in range(20):
            cover = random_principal_cover(rng, half_torus, size=3)
            for n in (0, 1):
                y = random_unit_cochain(cover, n, rng)
                plus, minus = unordered_pm_differentials(cover, y, n)
                dy = unordered_coboundary(cover, y, n)
                assert all(dy[t] == plus[t] * minus[t].inverse() for t in dy)

    def test_coboundaries_are_cocycles(self, rng, half_torus):
        cover = random_principal_cover(rng, half_torus, size=2)
        z = random_unit_cochain(cover, 0, rng)
        y = unordered_coboundary(cover, z, 0)
        one = half_torus.one()
        assert all(value == one for value in unordered_coboundary(cover, y, 1).values())


class TestContraction:
    @pytest.mark.parametrize("n", [1, 2])
    def test_random_covers(self, n, half_torus):
        rng = random.Random(77 + n)
        for _ in range(20):
            cover = random_principal_cover(rng, half_torus, size=rng.randint(2, 3))
            y = unordered_coboundary(cover, random_unit_cochain(cover, n - 1, rng), n - 1)
            result = contract_unit_cocycle(cover, y, n)
            assert result.verified
            assert result.certificate.verified
            assert half_torus.is_unit(cover.fs[result.chart])
            assert unordered_coboundary(cover, result.x, n - 1) == y

    def test_torus_covers(self, rng):
        A = laurent_torus(2)
        for _ in range(5):
            cover = random_principal_cover(rng, A, size=3)
            y = unordered_coboundary(cover, random_unit_cochain(cover, 0, rng), 0)
            assert contract_unit_cocycle(cover, y, 1).verified

    def test_non_cocycle(self, half_torus):
        cover = PrincipalCover(half_torus, (half_torus.one(),))
        with pytest.raises(CocycleError):
            contract_unit_cocycle(cover, {(0, 0): mono((1, 0))}, 1)

    def test_needs_a_unit_chart(self, half_torus):
        cover = PrincipalCover(half_torus, (mono((0, 1)),))
        with pytest.raises(PreconditionError):
            contract_unit_cocycle(cover, {(0, 0): half_torus.one()}, 1)

    def test_input_validation(self, half_torus):
        cover = PrincipalCover(half_torus, (half_torus.one(),))
        with pytest.raises(InputError):
            contract_unit_cocycle(cover, {(0, 0): half_torus.one()}, 0)
        with pytest.raises(InputError):
            contract_unit_cocycle(cover, {}, 1)
        with pytest.raises(InputError):
            contract_unit_cocycle(cover, {(0, 0): mono((0, 1))}, 1)
