# backend/api/affine.py
"""
Affine Engine - prime ideals and principal covers of affine semiring schemes
Finite Spec enumeration, Nullstellensatz-style cover certificates over
monomial localizations M[x_0..x_r]_g, and the contraction that kills the
higher Cech cohomology of O* on such covers.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from backend.api.errors import (
    CocycleError,
    GuardExceededError,
    InputError,
    NotInvertibleError,
    PreconditionError,
)
from backend.api.laurent import ExponentVector, LaurentPoly
from backend.api.semiring_core import QMAX, Semiring, SemiringTable
from backend.api.settings import settings

logger = logging.getLogger(__name__)

Chain = Tuple[int, ...]
UnorderedCochain = Dict[Chain, LaurentPoly]


# Prime ideals

@dataclass(frozen=True)
class PrimeIdeal:
    ring: SemiringTable = field(repr=False)
    elements: FrozenSet[int]

    def __contains__(self, a: int) -> bool:
        return a in self.elements

    def labels(self) -> List[str]:
        return [self.ring.labels[a] for a in sorted(self.elements)]

    def to_dict(self) -> Dict[str, Any]:
        return {"elements": sorted(self.elements), "labels": self.labels()}


def is_ideal(S: SemiringTable, members: Sequence[int]) -> bool:
    """Contains 0, closed under +, absorbs multiplication by S, and misses 1"""
    mask = np.zeros(S.size, dtype=bool)
    mask[list(members)] = True
    if not mask[S.zero] or mask[S.one]:
        return False
    idx = np.flatnonzero(mask)
    sums = S.add_table[np.ix_(idx, idx)]
    products = S.mul_table[idx, :]
    return bool(mask[sums].all() and mask[products].all())


def is_prime(S: SemiringTable, members: Sequence[int]) -> bool:
    if not is_ideal(S, members):
        return False
    mask = np.zeros(S.size, dtype=bool)
    mask[list(members)] = True
    outside = np.flatnonzero(~mask)
    # xy in I with x, y both outside I breaks primality
    return not mask[S.mul_table[np.ix_(outside, outside)]].any()


def prime_ideals(S: SemiringTable, guard: Optional[int] = None) -> List[PrimeIdeal]:
    """All prime ideals of a finite semiring, smallest first"""
    guard = guard or settings.prime_guard
    if S.size > guard:
        raise GuardExceededError(
            f"|{S.name}| = {S.size} exceeds the prime enumeration guard {guard}",
            {"size": S.size, "guard": guard},
        )
    rest = [a for a in S.values() if a not in (S.zero, S.one)]
    primes = []
    for k in range(len(rest) + 1):
        for extra in itertools.combinations(rest, k):
            members = (S.zero,) + extra
            if is_ideal(S, members) and is_prime(S, members):
                primes.append(PrimeIdeal(S, frozenset(members)))
    logger.info("found %d prime ideals in %s", len(primes), S.name)
    return primes


# Monomial localizations

@dataclass(frozen=True)
class MonomialLocalization:
    """M[x_0..x_r]_g: Laurent polynomials whose negative exponents sit inside supp(g)"""

    ring: Semiring
    nvars: int
    g: ExponentVector

    def __post_init__(self):
        if len(self.g) != self.nvars or any(e < 0 for e in self.g):
            raise InputError(f"g = {list(self.g)} must be a nonnegative exponent vector of length {self.nvars}")

    @classmethod
    def of(cls, ring: Semiring, g: Sequence[int]) -> "MonomialLocalization":
        return cls(ring, len(g), tuple(int(e) for e in g))

    @property
    def inverted(self) -> FrozenSet[int]:
        return frozenset(j for j, e in enumerate(self.g) if e > 0)

    def allows(self, exp: Sequence[int]) -> bool:
        return all(e >= 0 or j in self.inverted for j, e in enumerate(exp))

    def contains(self, p: Any) -> bool:
        return (
            isinstance(p, LaurentPoly)
            and p.ring == self.ring
            and p.nvars == self.nvars
            and all(self.allows(e) for e in p.exponents())
        )

    def element(self, p: LaurentPoly) -> LaurentPoly:
        if not self.contains(p):
            raise InputError(f"{p!r} is not an element of {self.describe()}")
        return p

    def one(self) -> LaurentPoly:
        return LaurentPoly.constant(self.ring, self.nvars)

    def is_unit(self, p: LaurentPoly) -> bool:
        """Units are exactly monomials with invertible coefficient whose inverse also lies here"""
        if not self.contains(p) or not p.is_monomial():
            return False
        coef, exp = p.monomial_parts()
        return self.ring.is_unit(coef) and self.allows([-e for e in exp])

    def inverse(self, p: LaurentPoly) -> LaurentPoly:
        if not self.is_unit(p):
            raise NotInvertibleError(f"{p!r} is not a unit of {self.describe()}")
        return p.inverse()

    def localize(self, f: LaurentPoly) -> "MonomialLocalization":
        """A_f for a monomial f"""
        self.element(f)
        if not f.is_monomial():
            raise PreconditionError(f"localization at the non-monomial {f!r} is not supported")
        coef, exp = f.monomial_parts()
        if not self.ring.is_unit(coef):
            raise PreconditionError(f"the coefficient of {f!r} is not invertible")
        return MonomialLocalization(self.ring, self.nvars, tuple(a + max(e, 0) for a, e in zip(self.g, exp)))

    def random_unit(self, rng: random.Random, bound: Optional[int] = None) -> LaurentPoly:
        bound = bound or settings.exponent_bound
        exp = [rng.randint(-bound, bound) if j in self.inverted else 0 for j in range(self.nvars)]
        return LaurentPoly.monomial(self.ring, exp, self.ring.random_unit(rng, settings.coefficient_bound))

    def describe(self) -> str:
        g = "".join(f"x{j}" + (f"^{e}" if e > 1 else "") for j, e in enumerate(self.g) if e)
        return f"{self.ring.name}[x0..x{self.nvars - 1}]" + (f"_{g}" if g else "")


# Cover certificates

@dataclass
class CoverWitness:
    """Outcome of the search for h with sum h_i f_i = 1: found, none or inconclusive"""

    status: str
    h: Optional[List[LaurentPoly]] = None
    index: Optional[int] = None
    reason: str = ""

    @property
    def found(self) -> bool:
        return self.status == "found"


def _check_fs(A: MonomialLocalization, fs: Sequence[LaurentPoly]) -> None:
    if not fs:
        raise InputError("a cover needs at least one element")
    for i, f in enumerate(fs):
        if not A.contains(f):
            raise InputError(f"f_{i} = {f!r} is not an element of {A.describe()}", {"index": i})


def cover_witness(A: MonomialLocalization, fs: Sequence[LaurentPoly], bound: Optional[int] = None) -> CoverWitness:
    """
    Over a totally ordered idempotent semifield a sum equals 1 only when one
    summand h_i f_i is the constant 1, so fs covers Spec A exactly when some f_i
    is a unit and the answer is definite. Other semirings get a bounded search
    over monomial multipliers.
    """
    _check_fs(A, fs)
    zero = LaurentPoly.zero(A.ring, A.nvars)
    for i, f in enumerate(fs):
        if A.is_unit(f):
            h = [zero] * len(fs)
            h[i] = A.inverse(f)
            return CoverWitness("found", h, i)
    if A.ring.is_totally_ordered_idempotent() and A.ring.is_semifield():
        return CoverWitness("none", reason="no f_i is a unit monomial, so no h_i f_i can equal 1")
    return _bounded_cover_search(A, fs, bound or settings.cover_search_bound)


def _bounded_cover_search(A: MonomialLocalization, fs: Sequence[LaurentPoly], bound: int) -> CoverWitness:
    ring = A.ring
    zero = LaurentPoly.zero(ring, A.nvars)
    exps = [e for e in itertools.product(range(-bound, bound + 1), repeat=A.nvars) if A.allows(e)]
    coefs = [ring.one] if not ring.is_finite else [c for c in ring.values() if not ring.is_zero(c)]
    candidates = [zero] + [LaurentPoly.monomial(ring, e, c) for e in exps for c in coefs]
    total = len(candidates) ** len(fs)
    if total > settings.witness_guard:
        return CoverWitness("inconclusive", reason=f"{total} multiplier tuples exceed the search guard")
    one = A.one()
    for h in itertools.product(candidates, repeat=len(fs)):
        acc = zero
        for hi, f in zip(h, fs):
            acc = acc + hi * f
        if acc == one:
            return CoverWitness("found", list(h))
    return CoverWitness("inconclusive", reason=f"no witness with exponents in [-{bound}, {bound}]")


@dataclass
class UnitCertificate:
    index: int
    element: LaurentPoly
    inverse: LaurentPoly

    @property
    def verified(self) -> bool:
        return self.element * self.inverse == LaurentPoly.constant(self.element.ring, self.element.nvars)


def detect_unit(A: MonomialLocalization, fs: Sequence[LaurentPoly]) -> UnitCertificate:
    """Index of the first invertible f_i, certified by its inverse monomial"""
    _check_fs(A, fs)
    for i, f in enumerate(fs):
        if A.is_unit(f):
            return UnitCertificate(i, f, A.inverse(f))
    raise PreconditionError(
        f"no element of the family is a unit of {A.describe()}, so it does not cover Spec A",
        {"family": [repr(f) for f in fs]},
    )


# Unordered cochains of O* on principal covers

@dataclass(frozen=True)
class PrincipalCover:
    """D(f_0), ..., D(f_k) inside Spec A for unit-coefficient monomials f_i"""

    base: MonomialLocalization
    fs: Tuple[LaurentPoly, ...]

    def __post_init__(self):
        _check_fs(self.base, self.fs)
        for i, f in enumerate(self.fs):
            if not f.is_monomial():
                raise PreconditionError(f"f_{i} = {f!r} is not a monomial; only monomial charts are supported")

    @property
    def size(self) -> int:
        return len(self.fs)

    def chart(self, t: Chain) -> MonomialLocalization:
        A = self.base
        for i in t:
            A = A.localize(self.fs[i])
        return A

    def tuples(self, n: int) -> List[Chain]:
        return list(itertools.product(range(self.size), repeat=n + 1))


def _alternating(y: UnorderedCochain, t: Chain, parities: Tuple[int, ...], signed: bool, one: LaurentPoly) -> LaurentPoly:
    acc = one
    for k in range(len(t)):
        if k % 2 not in parities:
            continue
        face = y[t[:k] + t[k + 1:]]
        acc = acc * (face.inverse() if signed and k % 2 else face)
    return acc


def unordered_coboundary(cover: PrincipalCover, y: UnorderedCochain, n: int) -> UnorderedCochain:
    """(dy)_t = prod_k y_(t - t_k)^((-1)^k) over all (n+2)-tuples with repeats"""
    one = cover.base.one()
    return {t: _alternating(y, t, (0, 1), True, one) for t in cover.tuples(n + 1)}


def unordered_pm_differentials(cover: PrincipalCover, y: UnorderedCochain, n: int) -> Tuple[UnorderedCochain, UnorderedCochain]:
    """Products over the even and over the odd omitted positions"""
    one = cover.base.one()
    plus = {t: _alternating(y, t, (0,), False, one) for t in cover.tuples(n + 1)}
    minus = {t: _alternating(y, t, (1,), False, one) for t in cover.tuples(n + 1)}
    return plus, minus


def check_unordered_cochain(cover: PrincipalCover, y: UnorderedCochain, n: int) -> None:
    expected = set(cover.tuples(n))
    if set(y) != expected:
        raise InputError(f"a degree-{n} unordered cochain needs all {len(expected)} index tuples")
    for t, value in y.items():
        if not cover.chart(t).is_unit(value):
            raise InputError(f"y_{t} = {value!r} is not a unit over D(f_t)", {"tuple": list(t)})


@dataclass
class Contraction:
    chart: int
    degree: int
    x: UnorderedCochain
    verified: bool
    certificate: UnitCertificate


def contract_unit_cocycle(cover: PrincipalCover, y: UnorderedCochain, n: int) -> Contraction:
    """
    With D(f_i) = Spec A, x_(i_0..i_(n-1)) = y_(i i_0..i_(n-1)) satisfies dx = y
    for every cocycle y of degree n >= 1.
    """
    if n < 1:
        raise InputError("contraction needs degree n >= 1")
    check_unordered_cochain(cover, y, n)
    one = cover.base.one()
    dy = unordered_coboundary(cover, y, n)
    broken = next((t for t, value in dy.items() if value != one), None)
    if broken is not None:
        raise CocycleError(f"dy is not trivial on {list(broken)}", {"tuple": list(broken)})
    plus, minus = unordered_pm_differentials(cover, y, n)
    if plus != minus:
        raise CocycleError("d+y and d-y disagree although dy is trivial")
    certificate = detect_unit(cover.base, cover.fs)
    i = certificate.index
    x = {t: y[(i,) + t] for t in cover.tuples(n - 1)}
    verified = unordered_coboundary(cover, x, n - 1) == y
    logger.debug("contracted a degree-%d cocycle through chart %d", n, i)
    return Contraction(i, n, x, verified, certificate)


def random_unit_cochain(cover: PrincipalCover, n: int, rng: random.Random) -> UnorderedCochain:
    return {t: cover.chart(t).random_unit(rng) for t in cover.tuples(n)}


def random_principal_cover(rng: random.Random, A: MonomialLocalization, size: int = 3) -> PrincipalCover:
    """Monomial charts with nonnegative exponents plus one unit chart at a random position"""
    if size < 1:
        raise InputError("a cover needs at least one chart")
    bound = settings.exponent_bound
    fs = [
        LaurentPoly.monomial(A.ring, [rng.randint(0, bound) for _ in range(A.nvars)])
        for _ in range(size - 1)
    ]
    fs.insert(rng.randrange(size), A.random_unit(rng))
    return PrincipalCover(A, tuple(fs))


def laurent_torus(nvars: int = 2, ring: Semiring = QMAX) -> MonomialLocalization:
    """M[x_0..x_r]_(x_0...x_r)"""
    return MonomialLocalization.of(ring, [1] * nvars)
