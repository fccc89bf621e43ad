# backend/api/pm_complex.py
"""
Paired-differential (+/-) cochain complexes of semimodules
Cocycles are the equalizers of d+ and d-, cohomology is the quotient of the
cocycles by the witness congruence x + d+u + d-v = y + d+v + d-u.
"""

import itertools
import logging
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from backend.api.errors import (
    ChainIdentityError,
    CongruenceViolationError,
    GuardExceededError,
    IncompatibleOperandsError,
    InputError,
    MembershipError,
    MorphismError,
)
from backend.api.semimodule import (
    Congruence,
    FiniteSemimodule,
    FreeSemimodule,
    SemimoduleHom,
    congruence_closure,
    quotient,
    submodule,
)
from backend.api.semiring_core import zmod_table
from backend.api.settings import settings

logger = logging.getLogger(__name__)


class SymbolicSpace(ABC):
    """An infinite semimodule known through membership, addition and sampling"""

    name: str = "X"

    @property
    @abstractmethod
    def zero(self) -> Any:
        ...

    @abstractmethod
    def add(self, a: Any, b: Any) -> Any:
        ...

    @abstractmethod
    def contains(self, x: Any) -> bool:
        ...

    @abstractmethod
    def sample(self, rng: random.Random, count: int) -> List[Any]:
        ...

    def sum(self, elements: Iterable[Any]) -> Any:
        total = self.zero
        for x in elements:
            total = self.add(total, x)
        return total


Space = Union[FiniteSemimodule, SymbolicSpace]
Map = Callable[[Any], Any]


def _contains(space: Space, x: Any) -> bool:
    if isinstance(space, FiniteSemimodule):
        return isinstance(x, (int, np.integer)) and 0 <= x < space.size
    return space.contains(x)


def _hom_table(hom: Map, space: FiniteSemimodule) -> np.ndarray:
    return np.array([hom(a) for a in space.values()], dtype=np.int64)


class PMComplex:
    """
    Spaces X^low ... X^high with d+_n, d-_n : X^n -> X^(n+1) for low <= n < high.
    Degrees outside the range are zero spaces; d_high maps everything to zero.
    """

    def __init__(
        self,
        spaces: Dict[int, Space],
        d_plus: Dict[int, Map],
        d_minus: Dict[int, Map],
        name: str = "X",
    ):
        if not spaces:
            raise InputError("a complex needs at least one space")
        degrees = sorted(spaces)
        if degrees != list(range(degrees[0], degrees[-1] + 1)):
            raise InputError(f"degrees {degrees} are not contiguous")
        self.low, self.high = degrees[0], degrees[-1]
        for n in range(self.low, self.high):
            if n not in d_plus or n not in d_minus:
                raise InputError(f"missing differential pair in degree {n}")
        self.spaces = dict(spaces)
        self.d_plus = dict(d_plus)
        self.d_minus = dict(d_minus)
        self.name = name

    @property
    def degrees(self) -> range:
        return range(self.low, self.high + 1)

    def space(self, n: int) -> Optional[Space]:
        return self.spaces.get(n)

    def is_finite(self, n: int) -> bool:
        space = self.spaces.get(n)
        return space is None or isinstance(space, FiniteSemimodule)

    def zero(self, n: int) -> Any:
        space = self.spaces.get(n)
        return None if space is None else space.zero

    def add(self, n: int, a: Any, b: Any) -> Any:
        space = self.spaces.get(n)
        return None if space is None else space.add(a, b)

    def plus(self, n: int, x: Any) -> Any:
        if n not in self.d_plus:
            return self.zero(n + 1)
        return self.d_plus[n](x)

    def minus(self, n: int, x: Any) -> Any:
        if n not in self.d_minus:
            return self.zero(n + 1)
        return self.d_minus[n](x)

    def test_elements(self, n: int, samples: Optional[int] = None, rng: Optional[random.Random] = None) -> Tuple[List[Any], bool]:
        """All elements of a finite space, or a seeded sample plus the zero of a symbolic one"""
        space = self.spaces.get(n)
        if space is None:
            return [], True
        if isinstance(space, FiniteSemimodule):
            return list(space.values()), True
        rng = rng or random.Random(settings.random_seed)
        count = samples or settings.chain_identity_samples
        return [space.zero] + space.sample(rng, count), False

    def validate(self, samples: Optional[int] = None) -> None:
        for n in range(self.low, self.high):
            result = check_chain_identity(self, n, samples)
            if not result.holds:
                raise ChainIdentityError(
                    f"chain identity fails in degree {n} of {self.name}",
                    {"degree": n, "counterexample": repr(result.counterexample)},
                )

    def __repr__(self) -> str:
        return f"PMComplex({self.name}, degrees {self.low}..{self.high})"


@dataclass
class ChainIdentityResult:
    degree: int
    holds: bool
    exhaustive: bool
    tested: int
    counterexample: Any = None


def check_chain_identity(C: PMComplex, n: int, samples: Optional[int] = None) -> ChainIdentityResult:
    """d+d+ + d-d- = d-d+ + d+d- from X^n to X^(n+2), on every element or on a seeded sample"""
    if n not in C.spaces:
        raise InputError(f"degree {n} is outside {C.low}..{C.high}")
    elements, exhaustive = C.test_elements(n, samples)
    if n + 2 not in C.spaces:
        return ChainIdentityResult(n, True, exhaustive, len(elements))
    if not exhaustive:
        logger.warning("chain identity in degree %d checked on %d sampled elements", n, len(elements))
    for x in elements:
        p, m = C.plus(n, x), C.minus(n, x)
        lhs = C.add(n + 2, C.plus(n + 1, p), C.minus(n + 1, m))
        rhs = C.add(n + 2, C.minus(n + 1, p), C.plus(n + 1, m))
        if lhs != rhs:
            return ChainIdentityResult(n, False, exhaustive, len(elements), counterexample=x)
    return ChainIdentityResult(n, True, exhaustive, len(elements))


def is_cocycle(C: PMComplex, n: int, x: Any) -> bool:
    return _contains(C.spaces[n], x) and C.plus(n, x) == C.minus(n, x)


def cocycles(C: PMComplex, n: int) -> Union[List[int], Callable[[Any], bool]]:
    """Z^n as a sorted index list for finite spaces, as a membership predicate otherwise"""
    if n not in C.spaces:
        raise InputError(f"degree {n} is outside {C.low}..{C.high}")
    if C.is_finite(n):
        return [a for a in C.spaces[n].values() if C.plus(n, a) == C.minus(n, a)]
    return lambda x: is_cocycle(C, n, x)


def rho_related(C: PMComplex, n: int, x: Any, y: Any, u: Any = None, v: Any = None) -> bool:
    """Check a proposed witness pair: x + d+u + d-v == y + d+v + d-u"""
    for name, z in (("x", x), ("y", y)):
        if not is_cocycle(C, n, z):
            raise MembershipError(f"{name} is not a cocycle in degree {n}", {name: repr(z)})
    if n - 1 not in C.spaces:
        return x == y
    prev = n - 1
    u = C.zero(prev) if u is None else u
    v = C.zero(prev) if v is None else v
    for name, w in (("u", u), ("v", v)):
        if not _contains(C.spaces[prev], w):
            raise MembershipError(f"{name} is not in degree {prev}", {name: repr(w)})
    lhs = C.add(n, x, C.add(n, C.plus(prev, u), C.minus(prev, v)))
    rhs = C.add(n, y, C.add(n, C.plus(prev, v), C.minus(prev, u)))
    return lhs == rhs


def _witness_pairs(C: PMComplex, n: int, guard: Optional[int] = None) -> List[Tuple[int, int, int, int]]:
    """(d+u + d-v, d+v + d-u, u, v) for all u, v in X^(n-1), lexicographic in (u, v)"""
    prev = C.spaces.get(n - 1)
    if prev is None:
        zero = C.zero(n)
        return [(zero, zero, None, None)]
    if not isinstance(prev, FiniteSemimodule):
        raise InputError(f"degree {n - 1} is symbolic; witness search needs a finite space")
    count = prev.size ** 2
    bound = guard or settings.witness_guard
    if count > bound:
        raise GuardExceededError(f"witness search over {count} pairs exceeds {bound}", {"count": count, "guard": bound})
    X = C.spaces[n]
    plus = _hom_table(C.d_plus[n - 1], prev)
    minus = _hom_table(C.d_minus[n - 1], prev)
    return [
        (X.add(int(plus[u]), int(minus[v])), X.add(int(plus[v]), int(minus[u])), u, v)
        for u, v in itertools.product(prev.values(), repeat=2)
    ]


def find_rho_witness(C: PMComplex, n: int, x: int, y: int, guard: Optional[int] = None) -> Optional[Tuple[Any, Any]]:
    """First (u, v) in lexicographic order witnessing x rho y, or None"""
    X = C.spaces[n]
    for a, b, u, v in _witness_pairs(C, n, guard):
        if X.add(x, a) == X.add(y, b):
            return (C.zero(n - 1) if u is None else u, C.zero(n - 1) if v is None else v)
    return None


@dataclass
class Cohomology:
    """H^n = Z^n / rho^n together with the data needed to map classes"""

    degree: int
    module: FiniteSemimodule
    cocycles: List[int]
    congruence: Congruence
    projection: np.ndarray

    def class_of(self, x: int) -> int:
        try:
            return int(self.projection[self.cocycles.index(x)])
        except ValueError:
            raise MembershipError(f"{x} is not a cocycle in degree {self.degree}")

    def members(self, cls: int) -> List[int]:
        return [z for z, c in zip(self.cocycles, self.projection) if c == cls]


def compute_cohomology(C: PMComplex, n: int, guard: Optional[int] = None) -> Cohomology:
    if n not in C.spaces:
        raise InputError(f"degree {n} is outside {C.low}..{C.high}")
    for k in (n - 1, n, n + 1):
        if not C.is_finite(k):
            raise InputError(f"degree {k} is symbolic; cohomology_finite needs finite spaces")
    X = C.spaces[n]
    Z = cocycles(C, n)
    Zmod, _ = submodule(X, Z, name=f"Z{n}")
    pairs = _witness_pairs(C, n, guard)
    a = np.array(sorted({(p[0], p[1]) for p in pairs}), dtype=np.int64)
    zs = np.asarray(Z, dtype=np.int64)
    left = X.add_table[np.ix_(zs, a[:, 0])]
    right = X.add_table[np.ix_(zs, a[:, 1])]
    relation = np.stack([(left[i][None, :] == right).any(axis=1) for i in range(len(zs))])
    related = [(int(i), int(j)) for i, j in np.argwhere(relation) if i < j]
    closure = congruence_closure(Zmod, related)
    if not np.array_equal(closure.matrix(), relation):
        missing = np.argwhere(closure.matrix() & ~relation)
        i, j = (int(k) for k in missing[0])
        raise CongruenceViolationError(
            f"rho in degree {n} is not a congruence",
            {"degree": n, "pair": [int(zs[i]), int(zs[j])]},
        )
    H = quotient(Zmod, closure, name=f"H{n}({C.name})")
    logger.debug("H^%d(%s): |Z|=%d, %d witness pairs, %d classes", n, C.name, len(Z), len(a), H.size)
    return Cohomology(n, H, Z, closure, closure.projection())


def cohomology_finite(C: PMComplex, n: int, guard: Optional[int] = None) -> FiniteSemimodule:
    return compute_cohomology(C, n, guard).module


def classical_cohomology_finite(C: PMComplex, n: int) -> FiniteSemimodule:
    """ker / im of the single differential d+ - d- on complexes of groups"""
    X = C.spaces[n]
    nxt = C.spaces.get(n + 1)

    def boundary(k: int, x: int) -> int:
        target = C.spaces[k + 1]
        return target.add(C.plus(k, x), int(target.negation()[C.minus(k, x)]))

    kernel = [x for x in X.values() if nxt is None or n not in C.d_plus or boundary(n, x) == nxt.zero]
    Zmod, members = submodule(X, kernel, name=f"ker{n}")
    position = {a: i for i, a in enumerate(members)}
    prev = C.spaces.get(n - 1)
    image = {X.zero} if prev is None else {boundary(n - 1, u) for u in prev.values()}
    if not image <= set(kernel):
        raise ChainIdentityError(f"d+ - d- does not square to zero at degree {n}")
    C_rel = congruence_closure(Zmod, [(Zmod.zero, position[b]) for b in image])
    return quotient(Zmod, C_rel, name=f"Hclassical{n}({C.name})")


# Morphisms

class PMMorphism:
    """Per-degree maps f^n : X^n -> Y^n commuting with both differentials"""

    def __init__(self, source: PMComplex, target: PMComplex, maps: Dict[int, Map], samples: Optional[int] = None):
        self.source = source
        self.target = target
        self.maps = dict(maps)
        for n in source.degrees:
            if n in target.spaces and n not in self.maps:
                raise InputError(f"morphism is missing its degree-{n} component")
        self._validate(samples)

    def __call__(self, n: int, x: Any) -> Any:
        if n not in self.maps:
            return self.target.zero(n)
        return self.maps[n](x)

    def _validate(self, samples: Optional[int]) -> None:
        for n in self.source.degrees:
            if n + 1 not in self.source.spaces and n + 1 not in self.target.spaces:
                continue
            elements, _ = self.source.test_elements(n, samples)
            for x in elements:
                for sign, ds, dt in (("+", self.source.plus, self.target.plus), ("-", self.source.minus, self.target.minus)):
                    if self(n + 1, ds(n, x)) != dt(n, self(n, x)):
                        raise MorphismError(
                            f"f^{n + 1} d{sign} != d{sign} f^{n} on {x!r}",
                            {"degree": n, "sign": sign, "element": repr(x)},
                        )

    def compose(self, inner: "PMMorphism") -> "PMMorphism":
        """self after inner"""
        if inner.target is not self.source:
            raise IncompatibleOperandsError("composition of non-adjacent morphisms")
        maps = {
            n: (lambda x, n=n: self(n, inner(n, x)))
            for n in inner.source.degrees
            if n in self.target.spaces
        }
        return PMMorphism(inner.source, self.target, maps)

    @classmethod
    def identity(cls, C: PMComplex) -> "PMMorphism":
        return cls(C, C, {n: (lambda x: x) for n in C.degrees})

    @classmethod
    def zero(cls, C: PMComplex, D: PMComplex) -> "PMMorphism":
        return cls(C, D, {n: (lambda x, n=n: D.zero(n)) for n in C.degrees if n in D.spaces})


def induced_map(f: PMMorphism, n: int, guard: Optional[int] = None) -> Dict[int, int]:
    """[x] -> [f^n(x)], re-checking that every member of a class lands in one class"""
    HX = compute_cohomology(f.source, n, guard)
    HY = compute_cohomology(f.target, n, guard)
    mapping: Dict[int, int] = {}
    for cls in range(HX.module.size):
        images = {HY.class_of(int(f(n, x))) for x in HX.members(cls)}
        if len(images) != 1:
            raise MorphismError(f"class {cls} in degree {n} maps to several classes", {"images": sorted(images)})
        mapping[cls] = images.pop()
    return mapping


# Finite complexes from tables

def finite_complex(
    modules: Sequence[FiniteSemimodule],
    d_plus: Sequence[Sequence[int]],
    d_minus: Sequence[Sequence[int]],
    low: int = 0,
    name: str = "X",
) -> PMComplex:
    """A finite complex from image tables; each table is validated as a homomorphism"""
    if len(d_plus) != len(modules) - 1 or len(d_minus) != len(modules) - 1:
        raise InputError(f"{len(modules)} spaces need {len(modules) - 1} differential pairs")
    spaces = {low + k: M for k, M in enumerate(modules)}
    plus = {low + k: SemimoduleHom(modules[k], modules[k + 1], tuple(int(x) for x in t)) for k, t in enumerate(d_plus)}
    minus = {low + k: SemimoduleHom(modules[k], modules[k + 1], tuple(int(x) for x in t)) for k, t in enumerate(d_minus)}
    return PMComplex(spaces, plus, minus, name=name)


def _linear_images(source: FreeSemimodule, target: FreeSemimodule, matrix: np.ndarray, modulus: int) -> Tuple[int, ...]:
    coords = (source.digits @ matrix.T) % modulus
    return tuple(target.encode(row) for row in coords)


def _elementary(rng: random.Random, k: int, modulus: int, steps: int) -> Tuple[np.ndarray, np.ndarray]:
    """A random invertible matrix over Z/m and its inverse, as products of row additions"""
    P = np.eye(k, dtype=np.int64)
    P_inv = np.eye(k, dtype=np.int64)
    for _ in range(steps if k > 1 else 0):
        i, j = rng.sample(range(k), 2)
        c = rng.randrange(1, modulus)
        E = np.eye(k, dtype=np.int64)
        E[i, j] = c
        E_inv = np.eye(k, dtype=np.int64)
        E_inv[i, j] = (-c) % modulus
        P = (E @ P) % modulus
        P_inv = (P_inv @ E_inv) % modulus
    return P, P_inv


def random_ring_complex(rng: random.Random, modulus: int, dims: Sequence[int], name: str = "G") -> PMComplex:
    """
    A +/- complex of free Z/m-modules with d+ = D + d- for a random d- and a
    random differential D with D o D = 0 (a split complex in a scrambled basis).
    """
    R = zmod_table(modulus)
    frees = [FreeSemimodule(R, k) for k in dims]
    modules = [F.materialize(name=f"(Z/{modulus})^{k}") for F, k in zip(frees, dims)]
    ranks, used = [], 0
    for k in range(len(dims) - 1):
        room = min(dims[k] - used, dims[k + 1])
        r = rng.randint(0, max(room, 0))
        ranks.append(r)
        used = r
    bases = [_elementary(rng, k, modulus, 3 * k) for k in dims]
    d_plus, d_minus = [], []
    for k, r in enumerate(ranks):
        D = np.zeros((dims[k + 1], dims[k]), dtype=np.int64)
        # the first r coordinates of X^(k+1) are hit by the last r coordinates of X^k
        start = dims[k] - r
        for t in range(r):
            D[t, start + t] = 1
        P_next, _ = bases[k + 1]
        _, P_inv = bases[k]
        D = (P_next @ D @ P_inv) % modulus
        minus = np.array([[rng.randrange(modulus) for _ in range(dims[k])] for _ in range(dims[k + 1])], dtype=np.int64)
        minus = minus.reshape(dims[k + 1], dims[k])
        plus = (D + minus) % modulus
        d_plus.append(_linear_images(frees[k], frees[k + 1], plus, modulus))
        d_minus.append(_linear_images(frees[k], frees[k + 1], minus, modulus))
    return finite_complex(modules, d_plus, d_minus, name=name)
