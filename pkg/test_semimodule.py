"""
Finite semimodules: constructions, homomorphisms, congruences and both tensor products
"""

import itertools
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from backend.api.errors import AxiomViolationError, GuardExceededError, InputError, MembershipError, MorphismError
from backend.api.semimodule import (
    FiniteSemimodule,
    SemimoduleHom,
    check_hom_tensor_adjunction,
    check_quotient_universal_property,
    congruence_closure,
    enumerate_homs,
    find_isomorphism,
    free_module,
    golan_duality_failure,
    golan_tensor_collapse,
    hom_semimodule,
    invertible_module_identities,
    pr_tensor,
    product_module,
    quotient,
    regular_module,
    submodule,
    tensor_product,
    zero_module,
)
from backend.api.semiring_core import BOOLEAN, NAT, QMAX, ZMAX, boolean_table


def chain_b_module():
    """The chain 0 < 1 < 2 under max as a B-module"""
    return FiniteSemimodule(
        boolean_table(),
        [[0, 1, 2], [1, 1, 2], [2, 2, 2]],
        [[0, 0, 0], [0, 1, 2]],
        0,
        name="C3",
    )


def diamond():
    return FiniteSemimodule(
        boolean_table(),
        [[0, 1, 2, 3], [1, 1, 3, 3], [2, 3, 2, 3], [3, 3, 3, 3]],
        [[0, 0, 0, 0], [0, 1, 2, 3]],
        0,
        name="BxB",
    )


class TestConstructions:
    def test_axioms_are_validated(self):
        with pytest.raises(AxiomViolationError):
            FiniteSemimodule(boolean_table(), [[0, 1], [0, 1]], [[0, 0], [0, 1]], 0)
        with pytest.raises(AxiomViolationError):
            FiniteSemimodule(boolean_table(), [[0, 1], [1, 1]], [[0, 1], [0, 1]], 0)

    def test_scalar_shape(self):
        with pytest.raises(AxiomViolationError):
            FiniteSemimodule(boolean_table(), [[0, 1], [1, 1]], [[0, 1]], 0)

    def test_regular_and_zero_modules(self, chain3):
        R = regular_module(chain3)
        assert R.size == 3 and R.top() == 2
        assert zero_module(chain3).size == 1

    def test_product_of_booleans_is_the_diamond(self, bool_module):
        P = product_module([bool_module, bool_module])
        assert P.size == 4
        assert find_isomorphism(P, diamond()) is not None

    def test_free_module(self):
        F = free_module(boolean_table(), 2)
        assert F.size == 4
        assert find_isomorphism(F, diamond()) is not None

    def test_submodules(self, diamond_module):
        sub, embedding = submodule(diamond_module, [0, 1])
        assert sub.size == 2 and embedding == [0, 1]
        with pytest.raises(AxiomViolationError):
            submodule(diamond_module, [0, 1, 2])
        with pytest.raises(MembershipError):
            submodule(diamond_module, [1, 3])

    def test_negation_in_a_group(self, z4):
        assert regular_module(z4).negation().tolist() == [0, 3, 2, 1]


class TestHomomorphisms:
    def test_hom_from_the_ring_is_the_module(self, bool_module, diamond_module):
        H = hom_semimodule(bool_module, diamond_module)
        assert H.size == 4
        assert find_isomorphism(H, diamond_module) is not None

    def test_validation(self, bool_module, diamond_module):
        with pytest.raises(MorphismError):
            SemimoduleHom(bool_module, diamond_module, (0,))
        with pytest.raises(MorphismError):
            SemimoduleHom(bool_module, diamond_module, (1, 1))

    def test_composition(self, bool_module, diamond_module):
        f = SemimoduleHom(bool_module, diamond_module, (0, 1))
        g = SemimoduleHom(diamond_module, bool_module, (0, 1, 1, 1))
        assert g.compose(f) == SemimoduleHom.identity(bool_module)
        assert not f.is_bijective()

    def test_projections_of_the_diamond(self, diamond_module, bool_module):
        homs = [h.tolist() for h in enumerate_homs(diamond_module, bool_module)]
        assert [0, 1, 0, 1] in homs and [0, 0, 1, 1] in homs
        assert len(homs) == 4

    def test_guard(self, diamond_module):
        with pytest.raises(GuardExceededError):
            list(enumerate_homs(diamond_module, diamond_module, guard=8))

    def test_non_isomorphic(self, diamond_module):
        assert find_isomorphism(diamond_module, chain_b_module()) is None
        assert find_isomorphism(chain_b_module(), product_module([regular_module(boolean_table())] * 2)) is None


class TestCongruences:
    def test_closure_in_z4(self, z4):
        M = regular_module(z4)
        C = congruence_closure(M, [(0, 2)])
        assert C.classes() == [(0, 2), (1, 3)]
        Q = quotient(M, C)
        assert Q.size == 2

    def test_closure_swallows_joins(self, diamond_module):
        C = congruence_closure(diamond_module, [(1, 2)])
        assert C.classes() == [(0,), (1, 2, 3)]

    def test_universal_property(self, z4, diamond_module, bool_module):
        assert check_quotient_universal_property(regular_module(z4), [(0, 2)], regular_module(z4))
        assert check_quotient_universal_property(diamond_module, [(0, 1)], bool_module)

    def test_out_of_range_pair(self, diamond_module):
        with pytest.raises(InputError):
            congruence_closure(diamond_module, [(0, 9)])


@given(st.lists(st.tuples(st.integers(0, 3), st.integers(0, 3)), max_size=4))
def test_closure_is_the_smallest_congruence_containing_the_pairs(pairs):
    M = diamond()
    C = congruence_closure(M, pairs)
    assert C.is_congruence_on(M)
    assert all(C.related(a, b) for a, b in pairs)
    assert quotient(M, C).size == C.class_count


class TestGolanCollapse:
    @pytest.mark.parametrize("R", [BOOLEAN, QMAX, ZMAX])
    def test_idempotent_builtins_collapse(self, R):
        collapse = golan_tensor_collapse(R)
        assert collapse.trivial and collapse.size == 1

    def test_symbolic_witness(self):
        collapse = golan_tensor_collapse(QMAX)
        assert collapse.witness(Fraction(1), Fraction(-3)) == Fraction(1)

    def test_nat_is_cancellative(self):
        collapse = golan_tensor_collapse(NAT)
        assert not collapse.trivial
        assert collapse.witness(1, 2) is None

    def test_finite_idempotent_modules_with_top(self, bool_module, diamond_module, chain3):
        for M in (bool_module, diamond_module, regular_module(chain3), chain_b_module()):
            collapse = golan_tensor_collapse(M)
            assert collapse.trivial, M.name
            assert collapse.congruence.class_count == 1

    def test_z4_does_not_collapse(self, z4):
        collapse = golan_tensor_collapse(regular_module(z4))
        assert not collapse.trivial
        assert collapse.size == 4

    def test_duality_failure(self, chain3):
        report = golan_duality_failure(chain3)
        assert report["collapsed"]
        assert report["hom_tensor_size"] == 1
        assert report["hom_hom_size"] == 3
        assert report["duality_fails"]


class TestTensorProduct:
    def test_unit_law(self, diamond_module, chain3):
        B = boolean_table()
        assert find_isomorphism(pr_tensor(regular_module(B), diamond_module), diamond_module) is not None
        assert find_isomorphism(pr_tensor(chain_b_module(), regular_module(B)), chain_b_module()) is not None
        R = regular_module(chain3)
        assert find_isomorphism(pr_tensor(R, R), R) is not None

    def test_zero_pairs_vanish(self, diamond_module):
        T = tensor_product(diamond_module, diamond_module)
        assert T(0, 3) == T(2, 0) == T.module.zero
        assert len(T.generators) == 9

    def test_product_of_chains(self):
        C = chain_b_module()
        assert pr_tensor(C, C).size == 6

    def test_guard(self, diamond_module):
        with pytest.raises(GuardExceededError):
            tensor_product(diamond_module, diamond_module, guard=100)

    def test_hom_tensor_adjunction(self, bool_module, diamond_module):
        factors = [bool_module, chain_b_module()]
        targets = [bool_module, chain_b_module(), diamond_module]
        checked = 0
        for M, N, P in itertools.product(factors, factors, targets):
            report = check_hom_tensor_adjunction(M, N, P)
            assert report.holds, (M.name, N.name, P.name, report.counterexample)
            assert report.left_size == report.right_size
            checked += 1
        assert checked >= 10

    def test_invertible_module_identities(self, chain3):
        assert all(invertible_module_identities(chain3).values())
        assert all(invertible_module_identities(boolean_table()).values())
