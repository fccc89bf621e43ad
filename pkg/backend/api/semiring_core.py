# backend/api/semiring_core.py
"""
Semiring Core - exact commutative semirings
Built-in tropical semifields over exact numbers, finite semirings given by
tables, the canonical order and the structural predicates used downstream.
"""

import logging
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Hashable, Iterable, Optional, Sequence, Tuple

import numpy as np

from backend.api.errors import (
    AxiomViolationError,
    IncompatibleOperandsError,
    InputError,
    NotInvertibleError,
)

logger = logging.getLogger(__name__)


class _NegInf:
    """Bottom element of the tropical semifields (the tropical zero)"""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "-inf"

    def __hash__(self) -> int:
        return hash("-inf")

    def __reduce__(self):
        return (_NegInf, ())


NEG_INF = _NegInf()


class SemiringKind(str, Enum):
    BOOLEAN = "boolean"
    QMAX = "qmax"
    ZMAX = "zmax"
    NAT = "nat"


class Semiring(ABC):
    """
    A commutative semiring with exact, hashable element values.
    Elements are plain Python values; SemiringElement wraps them with their parent.
    """

    name: str = "semiring"

    @property
    @abstractmethod
    def zero(self) -> Hashable:
        ...

    @property
    @abstractmethod
    def one(self) -> Hashable:
        ...

    @abstractmethod
    def add(self, a, b):
        ...

    @abstractmethod
    def mul(self, a, b):
        ...

    @abstractmethod
    def contains(self, value) -> bool:
        ...

    @abstractmethod
    def parse(self, literal: Any):
        ...

    @abstractmethod
    def format(self, value) -> Any:
        ...

    @abstractmethod
    def inverse(self, value):
        ...

    @abstractmethod
    def is_idempotent(self) -> bool:
        ...

    @abstractmethod
    def is_totally_ordered_idempotent(self) -> bool:
        ...

    @abstractmethod
    def is_semifield(self) -> bool:
        ...

    @abstractmethod
    def random_value(self, rng: random.Random, bound: int):
        ...

    @property
    def is_finite(self) -> bool:
        return False

    def values(self) -> Tuple:
        raise NotImplementedError(f"{self.name} is infinite")

    def is_zero(self, value) -> bool:
        return value == self.zero

    def is_unit(self, value) -> bool:
        try:
            self.inverse(value)
        except NotInvertibleError:
            return False
        return True

    def random_unit(self, rng: random.Random, bound: int):
        for _ in range(64):
            value = self.random_value(rng, bound)
            if self.is_unit(value):
                return value
        return self.one

    def sum(self, values: Iterable):
        total = self.zero
        for v in values:
            total = self.add(total, v)
        return total

    def product(self, values: Iterable):
        total = self.one
        for v in values:
            total = self.mul(total, v)
        return total

    def power(self, value, k: int):
        if k < 0:
            return self.power(self.inverse(value), -k)
        result = self.one
        for _ in range(k):
            result = self.mul(result, value)
        return result

    def element(self, value) -> "SemiringElement":
        if not self.contains(value):
            raise InputError(f"{value!r} is not an element of {self.name}")
        return SemiringElement(value, self)

    def __call__(self, literal: Any) -> "SemiringElement":
        return SemiringElement(self.parse(literal), self)


@dataclass(frozen=True)
class SemiringElement:
    """An element tagged by its parent semiring; arithmetic never leaves the parent"""

    value: Any
    parent: Semiring

    def _check(self, other: "SemiringElement") -> None:
        if not isinstance(other, SemiringElement) or other.parent != self.parent:
            raise IncompatibleOperandsError(
                "operands belong to different semirings",
                {"left": repr(self), "right": repr(other)},
            )

    def __add__(self, other: "SemiringElement") -> "SemiringElement":
        self._check(other)
        return SemiringElement(self.parent.add(self.value, other.value), self.parent)

    def __mul__(self, other: "SemiringElement") -> "SemiringElement":
        self._check(other)
        return SemiringElement(self.parent.mul(self.value, other.value), self.parent)

    def inverse(self) -> "SemiringElement":
        return SemiringElement(self.parent.inverse(self.value), self.parent)

    def is_zero(self) -> bool:
        return self.parent.is_zero(self.value)

    def __repr__(self) -> str:
        return str(self.parent.format(self.value))


def _tropical_max(a, b):
    if a is NEG_INF:
        return b
    if b is NEG_INF:
        return a
    return a if a >= b else b


def _tropical_times(a, b):
    if a is NEG_INF or b is NEG_INF:
        return NEG_INF
    return a + b


@dataclass(frozen=True)
class BuiltinSemiring(Semiring):
    """Boolean, tropical max-plus over exact rationals or integers, and the naturals"""

    kind: SemiringKind

    @property
    def name(self) -> str:
        return self.kind.value

    @property
    def zero(self):
        if self.kind in (SemiringKind.QMAX, SemiringKind.ZMAX):
            return NEG_INF
        return 0

    @property
    def one(self):
        if self.kind is SemiringKind.QMAX:
            return Fraction(0)
        if self.kind is SemiringKind.ZMAX:
            return 0
        return 1

    @property
    def is_finite(self) -> bool:
        return self.kind is SemiringKind.BOOLEAN

    def values(self) -> Tuple:
        if self.kind is SemiringKind.BOOLEAN:
            return (0, 1)
        return super().values()

    def add(self, a, b):
        if self.kind is SemiringKind.BOOLEAN:
            return a | b
        if self.kind is SemiringKind.NAT:
            return a + b
        return _tropical_max(a, b)

    def mul(self, a, b):
        if self.kind is SemiringKind.BOOLEAN:
            return a & b
        if self.kind is SemiringKind.NAT:
            return a * b
        return _tropical_times(a, b)

    def contains(self, value) -> bool:
        if self.kind is SemiringKind.BOOLEAN:
            return value in (0, 1) and not isinstance(value, Fraction)
        if self.kind is SemiringKind.NAT:
            return isinstance(value, int) and not isinstance(value, bool) and value >= 0
        if value is NEG_INF:
            return True
        if self.kind is SemiringKind.ZMAX:
            return isinstance(value, int) and not isinstance(value, bool)
        return isinstance(value, Fraction)

    def parse(self, literal: Any):
        try:
            if self.kind in (SemiringKind.QMAX, SemiringKind.ZMAX):
                if literal is NEG_INF or (isinstance(literal, str) and literal.strip() == "-inf"):
                    return NEG_INF
                if self.kind is SemiringKind.QMAX:
                    return Fraction(literal) if not isinstance(literal, float) else Fraction(str(literal))
                value = Fraction(literal)
                if value.denominator != 1:
                    raise InputError(f"{literal!r} is not an integer")
                return int(value)
            value = int(literal)
        except (TypeError, ValueError, ZeroDivisionError) as e:
            if isinstance(e, InputError):
                raise
            raise InputError(f"cannot read {literal!r} as an element of {self.name}")
        if not self.contains(value):
            raise InputError(f"{literal!r} is not an element of {self.name}")
        return value

    def format(self, value):
        if value is NEG_INF:
            return "-inf"
        if isinstance(value, Fraction):
            return str(value)
        return value

    def inverse(self, value):
        if self.kind in (SemiringKind.QMAX, SemiringKind.ZMAX):
            if value is NEG_INF:
                raise NotInvertibleError("-inf has no tropical inverse")
            return -value
        if value == 1:
            return 1
        raise NotInvertibleError(f"{value} is not invertible in {self.name}")

    def is_idempotent(self) -> bool:
        return self.kind is not SemiringKind.NAT

    def is_totally_ordered_idempotent(self) -> bool:
        return self.kind is not SemiringKind.NAT

    def is_semifield(self) -> bool:
        return self.kind is not SemiringKind.NAT

    def random_value(self, rng: random.Random, bound: int):
        if self.kind is SemiringKind.BOOLEAN:
            return rng.randint(0, 1)
        if self.kind is SemiringKind.NAT:
            return rng.randint(0, bound)
        if rng.random() < 0.1:
            return NEG_INF
        if self.kind is SemiringKind.ZMAX:
            return rng.randint(-bound, bound)
        return Fraction(rng.randint(-4 * bound, 4 * bound), rng.randint(1, 4))

    def random_unit(self, rng: random.Random, bound: int):
        if self.kind is SemiringKind.ZMAX:
            return rng.randint(-bound, bound)
        if self.kind is SemiringKind.QMAX:
            return Fraction(rng.randint(-4 * bound, 4 * bound), rng.randint(1, 4))
        return 1

    def __repr__(self) -> str:
        return f"BuiltinSemiring({self.kind.value})"


BOOLEAN = BuiltinSemiring(SemiringKind.BOOLEAN)
QMAX = BuiltinSemiring(SemiringKind.QMAX)
ZMAX = BuiltinSemiring(SemiringKind.ZMAX)
NAT = BuiltinSemiring(SemiringKind.NAT)

_BUILTINS = {s.kind.value: s for s in (BOOLEAN, QMAX, ZMAX, NAT)}


def builtin(tag: str) -> BuiltinSemiring:
    """Look up a built-in semiring by its tag ("boolean", "qmax", "zmax", "nat")"""
    try:
        return _BUILTINS[tag.strip().lower()]
    except (KeyError, AttributeError):
        raise InputError(f"unknown semiring tag {tag!r}; expected one of {sorted(_BUILTINS)}")


def _first_violation(mask: np.ndarray) -> Optional[Tuple[int, ...]]:
    bad = np.argwhere(~mask)
    if len(bad) == 0:
        return None
    return tuple(int(i) for i in bad[0])


def check_table_axioms(size: int, add: np.ndarray, mul: np.ndarray, zero: int, one: int) -> None:
    """Exhaustively check the commutative semiring axioms; raise on the first violation"""
    idx = np.arange(size)
    for name, table in (("add", add), ("mul", mul)):
        if table.shape != (size, size):
            raise AxiomViolationError(f"{name} table must be {size}x{size}", {"shape": list(table.shape)})
        if table.min() < 0 or table.max() >= size:
            raise AxiomViolationError(f"{name} table has entries outside 0..{size - 1}")
    if not (0 <= zero < size and 0 <= one < size):
        raise AxiomViolationError("zero and one must be element indices")
    if zero == one:
        raise AxiomViolationError("one must differ from zero")

    checks = [
        ("addition is commutative", add == add.T),
        ("multiplication is commutative", mul == mul.T),
        ("addition is associative", add[add] == add[idx[:, None, None], add[None, :, :]]),
        ("multiplication is associative", mul[mul] == mul[idx[:, None, None], mul[None, :, :]]),
        ("zero is an additive identity", add[zero] == idx),
        ("one is a multiplicative identity", mul[one] == idx),
        ("zero is multiplicatively absorbing", mul[zero] == zero),
        (
            "multiplication distributes over addition",
            mul[idx[:, None, None], add[None, :, :]] == add[mul[:, :, None], mul[:, None, :]],
        ),
    ]
    for axiom, mask in checks:
        witness = _first_violation(np.asarray(mask))
        if witness is not None:
            raise AxiomViolationError(f"semiring axiom violated: {axiom}", {"witness": list(witness)})


class SemiringTable(Semiring):
    """A finite semiring given by explicit addition and multiplication tables"""

    def __init__(
        self,
        add: Sequence[Sequence[int]],
        mul: Sequence[Sequence[int]],
        zero: int = 0,
        one: int = 1,
        name: str = "table",
        labels: Optional[Sequence[str]] = None,
    ):
        add_arr = np.asarray(add, dtype=np.int64)
        mul_arr = np.asarray(mul, dtype=np.int64)
        if add_arr.ndim != 2 or add_arr.shape[0] == 0:
            raise AxiomViolationError("tables must be non-empty square arrays")
        size = add_arr.shape[0]
        check_table_axioms(size, add_arr, mul_arr, int(zero), int(one))
        add_arr.setflags(write=False)
        mul_arr.setflags(write=False)
        self.size = size
        self.add_table = add_arr
        self.mul_table = mul_arr
        self._zero = int(zero)
        self._one = int(one)
        self.name = name
        self.labels = tuple(labels) if labels is not None else tuple(str(i) for i in range(size))
        logger.debug("validated %d-element semiring table %s", size, name)

    @property
    def zero(self) -> int:
        return self._zero

    @property
    def one(self) -> int:
        return self._one

    @property
    def is_finite(self) -> bool:
        return True

    def values(self) -> Tuple[int, ...]:
        return tuple(range(self.size))

    def add(self, a, b) -> int:
        return int(self.add_table[a, b])

    def mul(self, a, b) -> int:
        return int(self.mul_table[a, b])

    def contains(self, value) -> bool:
        return isinstance(value, (int, np.integer)) and 0 <= value < self.size

    def parse(self, literal: Any) -> int:
        if isinstance(literal, str) and literal in self.labels:
            return self.labels.index(literal)
        try:
            value = int(literal)
        except (TypeError, ValueError):
            raise InputError(f"cannot read {literal!r} as an element of {self.name}")
        if not self.contains(value):
            raise InputError(f"{literal!r} is not an element index of {self.name}")
        return value

    def format(self, value) -> str:
        return self.labels[int(value)]

    def inverse(self, value) -> int:
        hits = np.flatnonzero(self.mul_table[int(value)] == self._one)
        if len(hits) == 0:
            raise NotInvertibleError(f"{self.format(value)} is not invertible in {self.name}")
        return int(hits[0])

    def is_idempotent(self) -> bool:
        idx = np.arange(self.size)
        return bool(np.all(self.add_table[idx, idx] == idx))

    def is_totally_ordered_idempotent(self) -> bool:
        if not self.is_idempotent():
            return False
        idx = np.arange(self.size)
        comparable = (self.add_table == idx[None, :]) | (self.add_table == idx[:, None])
        return bool(np.all(comparable))

    def is_semifield(self) -> bool:
        nonzero = [a for a in range(self.size) if a != self._zero]
        return len(units(self)) == len(nonzero)

    def random_value(self, rng: random.Random, bound: int) -> int:
        return rng.randrange(self.size)

    def random_unit(self, rng: random.Random, bound: int) -> int:
        return rng.choice(sorted(units(self)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "size": self.size,
            "zero": self._zero,
            "one": self._one,
            "add": self.add_table.tolist(),
            "mul": self.mul_table.tolist(),
        }

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, SemiringTable):
            return NotImplemented
        return (
            self.size == other.size
            and self._zero == other._zero
            and self._one == other._one
            and np.array_equal(self.add_table, other.add_table)
            and np.array_equal(self.mul_table, other.mul_table)
        )

    def __hash__(self) -> int:
        return hash((self.size, self._zero, self._one, self.add_table.tobytes(), self.mul_table.tobytes()))

    def __repr__(self) -> str:
        return f"SemiringTable({self.name}, size={self.size})"


# Operations on elements and semirings

def canonical_leq(a: SemiringElement, b: SemiringElement) -> bool:
    """x <= y iff x + y = y"""
    a._check(b)
    return a.parent.add(a.value, b.value) == b.value


def is_idempotent(S: Semiring) -> bool:
    return S.is_idempotent()


def is_totally_ordered_idempotent(S: Semiring) -> bool:
    return S.is_totally_ordered_idempotent()


def is_semifield(S: Semiring) -> bool:
    return S.is_semifield()


def units(S: Semiring) -> Dict[int, int]:
    """The multiplicative group of a finite semiring as an {element: inverse} map"""
    if not S.is_finite:
        raise InputError(f"{S.name} is infinite; units() needs a finite semiring")
    inverses = {}
    for a in S.values():
        for b in S.values():
            if S.mul(a, b) == S.one:
                inverses[a] = b
                break
    return inverses


def is_semiring_homomorphism(f: Sequence[int], S: Semiring, T: Semiring) -> bool:
    """f(a+b)=f(a)+f(b), f(ab)=f(a)f(b), f(0)=0 and f(1)=1, checked exhaustively"""
    if f[S.zero] != T.zero or f[S.one] != T.one:
        return False
    for a in S.values():
        for b in S.values():
            if f[S.add(a, b)] != T.add(f[a], f[b]) or f[S.mul(a, b)] != T.mul(f[a], f[b]):
                return False
    return True


# Standard finite semirings

def boolean_table() -> SemiringTable:
    return SemiringTable([[0, 1], [1, 1]], [[0, 0], [0, 1]], 0, 1, name="B", labels=("0", "1"))


def chain_table(k: int = 3) -> SemiringTable:
    """The k-element chain 0 < ... < k-1 with max as addition and min as multiplication"""
    idx = np.arange(k)
    return SemiringTable(
        np.maximum(idx[:, None], idx[None, :]),
        np.minimum(idx[:, None], idx[None, :]),
        0,
        k - 1,
        name=f"chain{k}",
    )


def zmod_table(m: int) -> SemiringTable:
    idx = np.arange(m)
    return SemiringTable(
        (idx[:, None] + idx[None, :]) % m,
        (idx[:, None] * idx[None, :]) % m,
        0,
        1 % m if m > 1 else 0,
        name=f"Z/{m}",
    )


def saturating_nat_table(k: int) -> SemiringTable:
    """{0, ..., k} with addition and multiplication truncated at k"""
    idx = np.arange(k + 1)
    return SemiringTable(
        np.minimum(idx[:, None] + idx[None, :], k),
        np.minimum(idx[:, None] * idx[None, :], k),
        0,
        1,
        name=f"N<={k}",
    )


def product_table(S: SemiringTable, T: SemiringTable) -> SemiringTable:
    """Componentwise product; element (i, j) has index i * |T| + j"""
    n, m = S.size, T.size
    idx = np.arange(n * m)
    first, second = idx // m, idx % m
    add = S.add_table[first[:, None], first[None, :]] * m + T.add_table[second[:, None], second[None, :]]
    mul = S.mul_table[first[:, None], first[None, :]] * m + T.mul_table[second[:, None], second[None, :]]
    labels = [f"({S.labels[i]},{T.labels[j]})" for i in range(n) for j in range(m)]
    return SemiringTable(
        add, mul, S.zero * m + T.zero, S.one * m + T.one, name=f"{S.name}x{T.name}", labels=labels
    )


def semiring_from_dict(doc: Dict[str, Any]) -> SemiringTable:
    return SemiringTable(
        doc["add"], doc["mul"], doc.get("zero", 0), doc.get("one", 1),
        name=doc.get("name", "table"), labels=doc.get("labels"),
    )
