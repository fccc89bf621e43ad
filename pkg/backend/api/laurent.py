# backend/api/laurent.py
"""
Laurent polynomials over a coefficient semiring
Sections of O_X(m) on intersections of the standard charts of P^n all live in
one Laurent ring; a chart intersection is described by a membership predicate
rather than by a separate data type.
"""

import itertools
import logging
import random
from dataclasses import dataclass
from typing import Any, Dict, FrozenSet, Iterable, Iterator, List, Mapping, Optional, Sequence, Tuple, Union

from backend.api.errors import IncompatibleOperandsError, InputError, NotInvertibleError, NotSemifieldError, PreconditionError
from backend.api.semiring_core import QMAX, Semiring, SemiringElement

logger = logging.getLogger(__name__)

ExponentVector = Tuple[int, ...]


def _exponent(exp: Sequence[int], nvars: int) -> ExponentVector:
    vector = tuple(int(e) for e in exp)
    if len(vector) != nvars:
        raise InputError(f"exponent vector {list(vector)} must have length {nvars}")
    return vector


class LaurentPoly:
    """
    A finitely supported map from exponent vectors to nonzero coefficients.
    Values are immutable; arithmetic returns new polynomials.
    """

    __slots__ = ("ring", "nvars", "_terms")

    def __init__(
        self,
        ring: Semiring,
        nvars: int,
        terms: Union[Mapping[Sequence[int], Any], Iterable[Tuple[Sequence[int], Any]]] = (),
    ):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: Dict[ExponentVector, Any] = {}
        for exp, coef in items:
            vector = _exponent(exp, nvars)
            if isinstance(coef, SemiringElement):
                if coef.parent != ring:
                    raise IncompatibleOperandsError("coefficient from a different semiring", {"coef": repr(coef)})
                value = coef.value
            else:
                value = coef
                if not ring.contains(value):
                    raise InputError(f"coefficient {coef!r} is not in {ring.name}")
            acc[vector] = ring.add(acc[vector], value) if vector in acc else value
        self.ring = ring
        self.nvars = nvars
        self._terms = {e: c for e, c in acc.items() if not ring.is_zero(c)}

    # Constructors

    @classmethod
    def zero(cls, ring: Semiring, nvars: int) -> "LaurentPoly":
        return cls(ring, nvars)

    @classmethod
    def constant(cls, ring: Semiring, nvars: int, value=None) -> "LaurentPoly":
        return cls(ring, nvars, [((0,) * nvars, ring.one if value is None else value)])

    @classmethod
    def monomial(cls, ring: Semiring, exp: Sequence[int], coef=None) -> "LaurentPoly":
        return cls(ring, len(exp), [(exp, ring.one if coef is None else coef)])

    # Inspection

    def items(self) -> List[Tuple[ExponentVector, Any]]:
        return sorted(self._terms.items())

    def exponents(self) -> List[ExponentVector]:
        return sorted(self._terms)

    def coefficient(self, exp: Sequence[int]) -> SemiringElement:
        return SemiringElement(self._terms.get(tuple(exp), self.ring.zero), self.ring)

    def __len__(self) -> int:
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_monomial(self) -> bool:
        return len(self._terms) == 1

    def degrees(self) -> FrozenSet[int]:
        return frozenset(sum(e) for e in self._terms)

    def is_homogeneous(self, degree: int) -> bool:
        return all(sum(e) == degree for e in self._terms)

    def negative_support(self) -> FrozenSet[int]:
        """Variables that occur with a negative exponent somewhere"""
        return frozenset(j for e in self._terms for j, k in enumerate(e) if k < 0)

    def support(self) -> FrozenSet[int]:
        return frozenset(j for e in self._terms for j, k in enumerate(e) if k != 0)

    def monomial_parts(self) -> Tuple[Any, ExponentVector]:
        if not self.is_monomial():
            raise InputError(f"{self!r} is not a single monomial")
        (exp, coef), = self._terms.items()
        return coef, exp

    def monomials(self) -> Iterator["LaurentPoly"]:
        for exp, coef in self.items():
            yield LaurentPoly(self.ring, self.nvars, [(exp, coef)])

    # Arithmetic

    def _check(self, other: "LaurentPoly") -> None:
        if not isinstance(other, LaurentPoly) or other.ring != self.ring or other.nvars != self.nvars:
            raise IncompatibleOperandsError(
                "Laurent polynomials from different ambient rings",
                {"left": repr(self), "right": repr(other)},
            )

    def __add__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        return LaurentPoly(self.ring, self.nvars, itertools.chain(self._terms.items(), other._terms.items()))

    def __mul__(self, other: "LaurentPoly") -> "LaurentPoly":
        self._check(other)
        ring = self.ring
        products = (
            (tuple(a + b for a, b in zip(e1, e2)), ring.mul(c1, c2))
            for e1, c1 in self._terms.items()
            for e2, c2 in other._terms.items()
        )
        return LaurentPoly(ring, self.nvars, products)

    def scale(self, value) -> "LaurentPoly":
        return LaurentPoly(self.ring, self.nvars, ((e, self.ring.mul(value, c)) for e, c in self._terms.items()))

    def shift(self, exp: Sequence[int]) -> "LaurentPoly":
        """Multiply by the monomial x^exp"""
        vector = _exponent(exp, self.nvars)
        return LaurentPoly(
            self.ring, self.nvars, ((tuple(a + b for a, b in zip(e, vector)), c) for e, c in self._terms.items())
        )

    def inverse(self) -> "LaurentPoly":
        """Inverse of q*x^e is q^-1 * x^-e; anything else is not a unit of the Laurent ring"""
        if not self.is_monomial():
            raise NotInvertibleError(f"{self!r} is not a monomial", {"terms": len(self._terms)})
        coef, exp = self.monomial_parts()
        return LaurentPoly(self.ring, self.nvars, [(tuple(-k for k in exp), self.ring.inverse(coef))])

    def __pow__(self, k: int) -> "LaurentPoly":
        if k < 0:
            return self.inverse() ** (-k)
        result = LaurentPoly.constant(self.ring, self.nvars)
        for _ in range(k):
            result = result * self
        return result

    def __eq__(self, other) -> bool:
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.ring == other.ring and self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.nvars, frozenset(self._terms.items())))

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for exp, coef in self.items():
            factors = [f"x{j}" if k == 1 else f"x{j}^{k}" for j, k in enumerate(exp) if k != 0]
            parts.append("*".join([str(self.ring.format(coef))] + factors))
        return " + ".join(parts)

    # Serialization

    def to_dict(self) -> Dict[str, Any]:
        return {
            "vars": self.nvars,
            "terms": [{"exp": list(e), "coef": self.ring.format(c)} for e, c in self.items()],
        }

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any], ring: Semiring) -> "LaurentPoly":
        try:
            nvars = int(doc["vars"])
            terms = [(t["exp"], ring.parse(t["coef"])) for t in doc.get("terms", [])]
        except (KeyError, TypeError) as e:
            raise InputError(f"malformed Laurent polynomial document: {e}")
        return cls(ring, nvars, terms)


def poly_arith(a: LaurentPoly, b: LaurentPoly, op: str) -> LaurentPoly:
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise InputError(f"unknown polynomial operation {op!r}")


def localize_monomial(p: LaurentPoly, g: Sequence[int]) -> LaurentPoly:
    """p / g for an honest monomial g; the result may carry negative exponents on g's support"""
    vector = _exponent(g, p.nvars)
    if any(k < 0 for k in vector):
        raise InputError(f"localizing monomial {list(vector)} must have nonnegative exponents")
    return p.shift([-k for k in vector])


def _chart(n: int, chart: Sequence[int]) -> Tuple[int, ...]:
    chart = tuple(int(i) for i in chart)
    if not chart:
        raise InputError("a chart tuple must be nonempty")
    if any(b <= a for a, b in zip(chart, chart[1:])):
        raise InputError(f"chart tuple {list(chart)} must be strictly increasing")
    if chart[0] < 0 or chart[-1] > n:
        raise InputError(f"chart tuple {list(chart)} must lie in 0..{n}")
    return chart


def _random_coefficient(ring: Semiring, rng: random.Random, bound: int):
    for _ in range(64):
        value = ring.random_value(rng, bound)
        if not ring.is_zero(value):
            return value
    return ring.one


@dataclass(frozen=True)
class SectionSpace:
    """
    Degree-m sections of O_X(m) over U_{i0...ik} on P^n: sums of monomials q*x^e
    with sum(e) = m and e_j >= 0 for every j outside the chart tuple.
    """

    ring: Semiring
    n: int
    chart: Tuple[int, ...]
    degree: int = 0

    @property
    def nvars(self) -> int:
        return self.n + 1

    def allows(self, exp: Sequence[int]) -> bool:
        if len(exp) != self.nvars or sum(exp) != self.degree:
            return False
        return all(k >= 0 for j, k in enumerate(exp) if j not in self.chart)

    def contains(self, p: Any) -> bool:
        if not isinstance(p, LaurentPoly) or p.ring != self.ring or p.nvars != self.nvars:
            return False
        return all(self.allows(e) for e in p.exponents())

    def zero(self) -> LaurentPoly:
        return LaurentPoly.zero(self.ring, self.nvars)

    def restrict(self, p: LaurentPoly, target: Sequence[int]) -> LaurentPoly:
        """Restriction to a smaller open U_target (target contains the chart) is the identity embedding"""
        if not set(self.chart) <= set(target):
            raise InputError(f"U{list(target)} is not contained in U{list(self.chart)}")
        return p

    def generator_exponents(self, bound: int) -> List[ExponentVector]:
        ranges = [range(-bound, bound + 1) if j in self.chart else range(0, bound + 1) for j in range(self.nvars)]
        return [e for e in itertools.product(*ranges) if sum(e) == self.degree]

    def generators(self, bound: int) -> List[LaurentPoly]:
        return [LaurentPoly.monomial(self.ring, e) for e in self.generator_exponents(bound)]

    def random_element(self, rng: random.Random, bound: int, max_terms: int = 3) -> LaurentPoly:
        exps = self.generator_exponents(bound)
        if not exps:
            raise PreconditionError(
                f"no degree-{self.degree} monomial on U{list(self.chart)} has exponents within {bound}",
                {"degree": self.degree, "chart": list(self.chart), "bound": bound},
            )
        count = rng.randint(0, max_terms)
        return LaurentPoly(
            self.ring, self.nvars, [(rng.choice(exps), _random_coefficient(self.ring, rng, bound)) for _ in range(count)]
        )


@dataclass(frozen=True)
class UnitSectionSpace:
    """Invertible degree-0 sections over U_{i0...ik}: q*x^e with q a unit, sum(e) = 0, e supported on the chart"""

    ring: Semiring
    n: int
    chart: Tuple[int, ...]

    @property
    def nvars(self) -> int:
        return self.n + 1

    def contains(self, p: Any) -> bool:
        if not isinstance(p, LaurentPoly) or p.ring != self.ring or p.nvars != self.nvars or not p.is_monomial():
            return False
        coef, exp = p.monomial_parts()
        if sum(exp) != 0 or not self.ring.is_unit(coef):
            return False
        return all(k == 0 for j, k in enumerate(exp) if j not in self.chart)

    def one(self) -> LaurentPoly:
        return LaurentPoly.constant(self.ring, self.nvars)

    def restrict(self, p: LaurentPoly, target: Sequence[int]) -> LaurentPoly:
        if not set(self.chart) <= set(target):
            raise InputError(f"U{list(target)} is not contained in U{list(self.chart)}")
        return p

    def generator_exponents(self, bound: int) -> List[ExponentVector]:
        ranges = [range(-bound, bound + 1) if j in self.chart else range(0, 1) for j in range(self.nvars)]
        return [e for e in itertools.product(*ranges) if sum(e) == 0]

    def random_element(self, rng: random.Random, bound: int) -> LaurentPoly:
        return LaurentPoly.monomial(
            self.ring, rng.choice(self.generator_exponents(bound)), self.ring.random_unit(rng, bound)
        )


def section_space(n: int, chart: Sequence[int], m: int = 0, ring: Optional[Semiring] = None) -> SectionSpace:
    return SectionSpace(ring or QMAX, n, _chart(n, chart), m)


def unit_sections(n: int, chart: Sequence[int], ring: Optional[Semiring] = None) -> UnitSectionSpace:
    ring = ring or QMAX
    if not ring.is_semifield():
        raise NotSemifieldError(f"{ring.name} is not a semifield; unit sections need invertible coefficients")
    return UnitSectionSpace(ring, n, _chart(n, chart))
