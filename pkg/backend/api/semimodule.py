# backend/api/semimodule.py
"""
Semimodule Engine - finite semimodules over finite semirings
Homomorphisms, congruence closure, quotients, Hom-semimodules and the two
tensor products (Golan's cancellation quotient and the Pareigis-Roehrl
construction as a quotient of a free module).
"""

import itertools
import logging
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np
from networkx.utils import UnionFind

from backend.api.errors import (
    AxiomViolationError,
    CongruenceViolationError,
    GuardExceededError,
    IncompatibleOperandsError,
    InputError,
    MembershipError,
    MorphismError,
)
from backend.api.semiring_core import BuiltinSemiring, Semiring, SemiringTable
from backend.api.settings import settings

logger = logging.getLogger(__name__)


def ring_tables(R: Semiring) -> Tuple[np.ndarray, np.ndarray]:
    """Addition and multiplication tables of a finite scalar semiring whose values are 0..q-1"""
    if isinstance(R, SemiringTable):
        return R.add_table, R.mul_table
    if not R.is_finite:
        raise InputError(f"{R.name} is infinite; finite semimodules need a finite scalar semiring")
    values = tuple(R.values())
    if values != tuple(range(len(values))):
        raise InputError(f"{R.name} elements must be the indices 0..{len(values) - 1}")
    add = np.array([[R.add(a, b) for b in values] for a in values], dtype=np.int64)
    mul = np.array([[R.mul(a, b) for b in values] for a in values], dtype=np.int64)
    return add, mul


def _check_guard(count: int, guard: int, what: str) -> None:
    if count > guard:
        raise GuardExceededError(f"{what} needs {count} candidates, above the guard {guard}", {"count": count, "guard": guard})


class SemimoduleBase:
    """Shared interface: element indices 0..size-1, a zero index, addition and scalar action"""

    ring: Semiring
    size: int
    zero: int

    def values(self) -> range:
        return range(self.size)

    def add(self, a: int, b: int) -> int:
        raise NotImplementedError

    def act(self, r: int, a: int) -> int:
        raise NotImplementedError

    def add_row(self, a: int) -> np.ndarray:
        """a + c for every element c"""
        raise NotImplementedError

    def act_column(self, a: int) -> np.ndarray:
        """r * a for every scalar r"""
        raise NotImplementedError

    def sum(self, elements: Iterable[int]) -> int:
        total = self.zero
        for a in elements:
            total = self.add(total, a)
        return total

    @property
    def scalar_count(self) -> int:
        return len(self.ring.values())

    def label(self, a: int) -> str:
        return str(a)


class FiniteSemimodule(SemimoduleBase):
    """
    Enumerated semimodule: addition table, zero index and a |R| x size scalar
    action table. All semimodule axioms are validated at construction.
    """

    def __init__(
        self,
        ring: Semiring,
        add: Sequence[Sequence[int]],
        scalar: Sequence[Sequence[int]],
        zero: int = 0,
        name: str = "M",
        elements: Optional[Sequence[Any]] = None,
    ):
        radd, rmul = ring_tables(ring)
        add_arr = np.asarray(add, dtype=np.int64)
        scalar_arr = np.asarray(scalar, dtype=np.int64)
        if add_arr.ndim != 2 or add_arr.shape[0] == 0 or add_arr.shape[0] != add_arr.shape[1]:
            raise AxiomViolationError("addition table must be a non-empty square array")
        size = add_arr.shape[0]
        q = radd.shape[0]
        if scalar_arr.shape != (q, size):
            raise AxiomViolationError(
                f"scalar table must be {q}x{size}", {"shape": list(scalar_arr.shape)}
            )
        _check_semimodule_axioms(size, add_arr, scalar_arr, int(zero), ring, radd, rmul)
        add_arr.setflags(write=False)
        scalar_arr.setflags(write=False)
        self.ring = ring
        self.size = size
        self.zero = int(zero)
        self.add_table = add_arr
        self.scalar_table = scalar_arr
        self.name = name
        self.elements = tuple(elements) if elements is not None else None

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def act(self, r: int, a: int) -> int:
        return int(self.scalar_table[r, a])

    def add_row(self, a: int) -> np.ndarray:
        return self.add_table[a]

    def act_column(self, a: int) -> np.ndarray:
        return self.scalar_table[:, a]

    def label(self, a: int) -> str:
        if self.elements is not None:
            return str(self.elements[a])
        return str(a)

    def top(self) -> Optional[int]:
        """An absorbing element t with t + a = t for all a, if one exists"""
        hits = np.flatnonzero(np.all(self.add_table == np.arange(self.size)[:, None], axis=1))
        return int(hits[0]) if len(hits) else None

    def is_idempotent(self) -> bool:
        idx = np.arange(self.size)
        return bool(np.all(self.add_table[idx, idx] == idx))

    def negation(self) -> np.ndarray:
        """Additive inverses; raises when the underlying monoid is not a group"""
        hits = self.add_table == self.zero
        if not np.all(hits.any(axis=1)):
            raise InputError(f"{self.name} is not additively a group")
        return np.argmax(hits, axis=1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "size": self.size,
            "zero": self.zero,
            "add": self.add_table.tolist(),
            "scalar": self.scalar_table.tolist(),
        }

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, FiniteSemimodule):
            return NotImplemented
        return (
            self.ring == other.ring
            and self.zero == other.zero
            and np.array_equal(self.add_table, other.add_table)
            and np.array_equal(self.scalar_table, other.scalar_table)
        )

    def __hash__(self) -> int:
        return hash((self.size, self.zero, self.add_table.tobytes(), self.scalar_table.tobytes()))

    def __repr__(self) -> str:
        return f"FiniteSemimodule({self.name}, size={self.size}, ring={self.ring.name})"

    @classmethod
    def from_dict(cls, doc: Dict[str, Any], ring: Semiring) -> "FiniteSemimodule":
        try:
            return cls(ring, doc["add"], doc["scalar"], doc.get("zero", 0), name=doc.get("name", "M"))
        except KeyError as e:
            raise InputError(f"semimodule document is missing {e}")


def _check_semimodule_axioms(
    size: int,
    add: np.ndarray,
    scalar: np.ndarray,
    zero: int,
    ring: Semiring,
    radd: np.ndarray,
    rmul: np.ndarray,
) -> None:
    if add.min() < 0 or add.max() >= size or scalar.min() < 0 or scalar.max() >= size:
        raise AxiomViolationError("table entries outside the element range")
    if not 0 <= zero < size:
        raise AxiomViolationError("zero must be an element index")
    idx = np.arange(size)
    ridx = np.arange(radd.shape[0])
    checks = [
        ("addition is commutative", add == add.T),
        ("addition is associative", add[add] == add[idx[:, None, None], add[None, :, :]]),
        ("zero is an additive identity", add[zero] == idx),
        ("r(a+b) = ra + rb", scalar[:, add] == add[scalar[:, :, None], scalar[:, None, :]]),
        ("(r+s)a = ra + sa", scalar[radd] == add[scalar[:, None, :], scalar[None, :, :]]),
        ("(rs)a = r(sa)", scalar[rmul] == scalar[ridx[:, None, None], scalar[None, :, :]]),
        ("1a = a", scalar[ring.one] == idx),
        ("0a = 0", scalar[ring.zero] == zero),
        ("r0 = 0", scalar[:, zero] == zero),
    ]
    for axiom, mask in checks:
        bad = np.argwhere(~np.asarray(mask))
        if len(bad):
            raise AxiomViolationError(
                f"semimodule axiom violated: {axiom}", {"witness": [int(i) for i in bad[0]]}
            )


class FreeSemimodule(SemimoduleBase):
    """
    R^k with elements encoded as base-|R| digit vectors.
    Operations are computed on the fly so large free modules need no tables.
    """

    def __init__(self, ring: Semiring, rank: int, guard: Optional[int] = None):
        radd, rmul = ring_tables(ring)
        q = radd.shape[0]
        size = q ** rank
        _check_guard(size, guard or settings.tensor_guard, f"free module {ring.name}^{rank}")
        self.ring = ring
        self.rank = rank
        self.size = size
        self._radd = radd
        self._rmul = rmul
        self._powers = q ** np.arange(rank, dtype=np.int64)
        self.digits = (np.arange(size, dtype=np.int64)[:, None] // self._powers[None, :]) % q
        self.zero = self.encode([ring.zero] * rank)

    def encode(self, digits: Sequence[int]) -> int:
        return int(np.dot(np.asarray(digits, dtype=np.int64), self._powers)) if self.rank else 0

    def basis(self, i: int) -> int:
        digits = [self.ring.zero] * self.rank
        digits[i] = self.ring.one
        return self.encode(digits)

    def add(self, a: int, b: int) -> int:
        return self.encode(self._radd[self.digits[a], self.digits[b]])

    def act(self, r: int, a: int) -> int:
        return self.encode(self._rmul[r, self.digits[a]])

    def add_row(self, a: int) -> np.ndarray:
        if not self.rank:
            return np.zeros(1, dtype=np.int64)
        return self._radd[self.digits[a][None, :], self.digits] @ self._powers

    def act_column(self, a: int) -> np.ndarray:
        if not self.rank:
            return np.zeros(self._rmul.shape[0], dtype=np.int64)
        return self._rmul[:, self.digits[a]] @ self._powers

    def label(self, a: int) -> str:
        return "(" + ",".join(str(self.ring.format(int(d))) for d in self.digits[a]) + ")"

    def materialize(self, name: Optional[str] = None) -> FiniteSemimodule:
        add = np.stack([self.add_row(a) for a in self.values()])
        scalar = np.stack([self.act_column(a) for a in self.values()], axis=1)
        return FiniteSemimodule(
            self.ring, add, scalar, self.zero,
            name=name or f"{self.ring.name}^{self.rank}",
            elements=[self.label(a) for a in self.values()],
        )


# Constructions

def regular_module(R: Semiring) -> FiniteSemimodule:
    """R as a module over itself"""
    radd, rmul = ring_tables(R)
    return FiniteSemimodule(R, radd, rmul, R.zero, name=R.name, elements=[R.format(a) for a in R.values()])


def zero_module(R: Semiring) -> FiniteSemimodule:
    q = len(R.values())
    return FiniteSemimodule(R, [[0]], [[0]] * q, 0, name="0", elements=["0"])


def free_module(R: Semiring, k: int) -> FiniteSemimodule:
    return FreeSemimodule(R, k).materialize()


def product_module(modules: Sequence[FiniteSemimodule], name: Optional[str] = None) -> FiniteSemimodule:
    """Direct product; tuple (a_0, ..., a_k) has index sum(a_i * prod(|M_j|, j < i))"""
    if not modules:
        raise InputError("product of an empty family needs a ring; use zero_module")
    ring = modules[0].ring
    for M in modules:
        if M.ring != ring:
            raise IncompatibleOperandsError("product factors over different semirings")
    sizes = [M.size for M in modules]
    total = int(np.prod(sizes))
    strides = np.cumprod([1] + sizes[:-1]).astype(np.int64)
    idx = np.arange(total, dtype=np.int64)
    coords = [(idx // s) % m for s, m in zip(strides, sizes)]
    add = sum(M.add_table[c[:, None], c[None, :]] * s for M, c, s in zip(modules, coords, strides))
    scalar = sum(M.scalar_table[:, c] * s for M, c, s in zip(modules, coords, strides))
    zero = int(sum(M.zero * s for M, s in zip(modules, strides)))
    labels = ["(" + ",".join(M.label(int(c[i])) for M, c in zip(modules, coords)) + ")" for i in range(total)]
    return FiniteSemimodule(ring, add, scalar, zero, name=name or "x".join(M.name for M in modules), elements=labels)


def submodule(M: FiniteSemimodule, elements: Iterable[int], name: Optional[str] = None) -> Tuple[FiniteSemimodule, List[int]]:
    """The sub-semimodule on a closed subset, plus the embedding (new index -> old index)"""
    members = sorted(set(int(a) for a in elements))
    if M.zero not in members:
        raise MembershipError(f"a sub-semimodule of {M.name} must contain zero")
    position = {a: i for i, a in enumerate(members)}
    try:
        add = [[position[M.add(a, b)] for b in members] for a in members]
        scalar = [[position[M.act(r, a)] for a in members] for r in M.ring.values()]
    except KeyError as e:
        raise AxiomViolationError(f"subset of {M.name} is not closed under the operations", {"escaped": int(e.args[0])})
    sub = FiniteSemimodule(
        M.ring, add, scalar, position[M.zero], name=name or f"sub({M.name})",
        elements=[M.label(a) for a in members],
    )
    return sub, members


# Homomorphisms

@dataclass(frozen=True)
class SemimoduleHom:
    """A validated homomorphism given by its image table"""

    source: FiniteSemimodule
    target: FiniteSemimodule
    images: Tuple[int, ...]

    def __post_init__(self):
        if self.source.ring != self.target.ring:
            raise IncompatibleOperandsError("homomorphism between modules over different semirings")
        if len(self.images) != self.source.size:
            raise MorphismError(f"image table must have {self.source.size} entries")
        if not is_homomorphism(np.asarray(self.images, dtype=np.int64), self.source, self.target):
            raise MorphismError(
                f"map {list(self.images)} is not a homomorphism {self.source.name} -> {self.target.name}"
            )

    def __call__(self, a: int) -> int:
        return self.images[a]

    def compose(self, inner: "SemimoduleHom") -> "SemimoduleHom":
        """self after inner"""
        if inner.target != self.source:
            raise IncompatibleOperandsError("composition of non-adjacent homomorphisms")
        return SemimoduleHom(inner.source, self.target, tuple(self.images[b] for b in inner.images))

    def is_bijective(self) -> bool:
        return self.source.size == self.target.size and len(set(self.images)) == self.source.size

    @classmethod
    def identity(cls, M: FiniteSemimodule) -> "SemimoduleHom":
        return cls(M, M, tuple(M.values()))

    @classmethod
    def zero_map(cls, M: FiniteSemimodule, N: FiniteSemimodule) -> "SemimoduleHom":
        return cls(M, N, (N.zero,) * M.size)


def is_homomorphism(images: np.ndarray, M: FiniteSemimodule, N: FiniteSemimodule) -> bool:
    if images.min() < 0 or images.max() >= N.size or images[M.zero] != N.zero:
        return False
    if not np.array_equal(images[M.add_table], N.add_table[images[:, None], images[None, :]]):
        return False
    return np.array_equal(images[M.scalar_table], N.scalar_table[:, images])


def enumerate_homs(M: FiniteSemimodule, N: FiniteSemimodule, guard: Optional[int] = None) -> Iterator[np.ndarray]:
    """All homomorphisms M -> N as image arrays, in lexicographic order of images"""
    if M.ring != N.ring:
        raise IncompatibleOperandsError("Hom between modules over different semirings")
    others = [a for a in M.values() if a != M.zero]
    _check_guard(N.size ** len(others), guard or settings.hom_guard, f"Hom({M.name}, {N.name})")
    images = np.empty(M.size, dtype=np.int64)
    images[M.zero] = N.zero
    for choice in itertools.product(range(N.size), repeat=len(others)):
        images[others] = choice
        if is_homomorphism(images, M, N):
            yield images.copy()


def hom_semimodule(M: FiniteSemimodule, N: FiniteSemimodule, guard: Optional[int] = None) -> FiniteSemimodule:
    """Hom(M, N) with pointwise operations; element i is the map stored in .elements[i]"""
    maps = [tuple(int(x) for x in h) for h in enumerate_homs(M, N, guard)]
    index = {h: i for i, h in enumerate(maps)}
    arrays = [np.asarray(h, dtype=np.int64) for h in maps]
    add = [[index[tuple(int(x) for x in N.add_table[f, g])] for g in arrays] for f in arrays]
    scalar = [[index[tuple(int(x) for x in N.scalar_table[r, f])] for f in arrays] for r in M.ring.values()]
    zero = index[(N.zero,) * M.size]
    logger.debug("Hom(%s, %s) has %d elements", M.name, N.name, len(maps))
    return FiniteSemimodule(M.ring, add, scalar, zero, name=f"Hom({M.name},{N.name})", elements=maps)


def find_isomorphism(M: FiniteSemimodule, N: FiniteSemimodule, guard: Optional[int] = None) -> Optional[SemimoduleHom]:
    """Brute-force search over bijections fixing zero; None when the modules are not isomorphic"""
    if M.ring != N.ring or M.size != N.size:
        return None
    _check_guard(M.size, guard or settings.isomorphism_guard, "isomorphism search module size")
    if M.is_idempotent() != N.is_idempotent():
        return None
    sources = [a for a in M.values() if a != M.zero]
    targets = [b for b in N.values() if b != N.zero]
    images = np.empty(M.size, dtype=np.int64)
    images[M.zero] = N.zero
    for perm in itertools.permutations(targets):
        images[sources] = perm
        if is_homomorphism(images, M, N):
            return SemimoduleHom(M, N, tuple(int(x) for x in images))
    return None


# Congruences

class Congruence:
    """A partition of 0..size-1 stored by canonical representative (least index of each class)"""

    def __init__(self, representatives: Sequence[int]):
        reps = np.asarray(representatives, dtype=np.int64)
        reps.setflags(write=False)
        self.representatives = reps
        self.size = len(reps)

    @classmethod
    def identity(cls, size: int) -> "Congruence":
        return cls(range(size))

    @classmethod
    def total(cls, size: int) -> "Congruence":
        return cls([0] * size)

    @classmethod
    def from_union_find(cls, size: int, uf: UnionFind) -> "Congruence":
        reps = list(range(size))
        for block in uf.to_sets():
            least = min(block)
            for a in block:
                reps[a] = least
        return cls(reps)

    def rep(self, a: int) -> int:
        return int(self.representatives[a])

    def related(self, a: int, b: int) -> bool:
        return self.representatives[a] == self.representatives[b]

    def classes(self) -> List[Tuple[int, ...]]:
        blocks: Dict[int, List[int]] = {}
        for a, r in enumerate(self.representatives):
            blocks.setdefault(int(r), []).append(a)
        return [tuple(blocks[r]) for r in sorted(blocks)]

    @property
    def class_count(self) -> int:
        return len(set(self.representatives.tolist()))

    def projection(self) -> np.ndarray:
        """Element index -> quotient index, quotient elements ordered by representative"""
        reps = sorted(set(self.representatives.tolist()))
        position = {r: i for i, r in enumerate(reps)}
        return np.array([position[int(r)] for r in self.representatives], dtype=np.int64)

    def matrix(self) -> np.ndarray:
        return self.representatives[:, None] == self.representatives[None, :]

    def is_congruence_on(self, M: SemimoduleBase) -> bool:
        reps = self.representatives
        for a in M.values():
            r = int(reps[a])
            if r == a:
                continue
            if not np.array_equal(reps[M.add_row(a)], reps[M.add_row(r)]):
                return False
            if not np.array_equal(reps[M.act_column(a)], reps[M.act_column(r)]):
                return False
        return True

    def __eq__(self, other) -> bool:
        if not isinstance(other, Congruence):
            return NotImplemented
        return np.array_equal(self.representatives, other.representatives)

    def __hash__(self) -> int:
        return hash(self.representatives.tobytes())

    def __repr__(self) -> str:
        return f"Congruence({self.class_count} classes on {self.size} elements)"


def congruence_closure(M: SemimoduleBase, pairs: Iterable[Tuple[int, int]]) -> Congruence:
    """
    Smallest congruence containing the pairs.
    Each merge (a, b) queues its translates (a+c, b+c) and scalings (ra, rb);
    the loop stops when every queued pair already shares a class.
    """
    uf = UnionFind(range(M.size))
    queue = deque()
    for a, b in pairs:
        a, b = int(a), int(b)
        if not (0 <= a < M.size and 0 <= b < M.size):
            raise InputError(f"pair ({a}, {b}) references an element outside 0..{M.size - 1}")
        queue.append((a, b))
    merges = 0
    while queue:
        a, b = queue.popleft()
        if uf[a] == uf[b]:
            continue
        uf.union(a, b)
        merges += 1
        queue.extend(zip(M.add_row(a).tolist(), M.add_row(b).tolist()))
        queue.extend(zip(M.act_column(a).tolist(), M.act_column(b).tolist()))
    logger.debug("congruence closure on %d elements: %d merges", M.size, merges)
    return Congruence.from_union_find(M.size, uf)


def quotient(M: SemimoduleBase, C: Congruence, name: Optional[str] = None) -> FiniteSemimodule:
    """Semimodule of classes; class i is represented by the i-th smallest representative"""
    if C.size != M.size:
        raise IncompatibleOperandsError("congruence and module sizes differ")
    reps = sorted(set(C.representatives.tolist()))
    proj = C.projection()
    add = [[int(proj[M.add(a, b)]) for b in reps] for a in reps]
    scalar = [[int(proj[M.act(r, a)]) for a in reps] for r in M.ring.values()]
    return FiniteSemimodule(
        M.ring, add, scalar, int(proj[M.zero]),
        name=name or f"{getattr(M, 'name', 'M')}/~",
        elements=[M.label(a) for a in reps],
    )


def check_quotient_universal_property(
    M: FiniteSemimodule, pairs: Sequence[Tuple[int, int]], P: FiniteSemimodule, guard: Optional[int] = None
) -> bool:
    """
    Every hom M -> P equalizing the pairs factors uniquely through M/closure(pairs),
    and every hom out of the quotient arises this way.
    """
    C = congruence_closure(M, pairs)
    Q = quotient(M, C)
    proj = C.projection()
    reps = sorted(set(C.representatives.tolist()))
    equalizing = 0
    for f in enumerate_homs(M, P, guard):
        if any(f[a] != f[b] for a, b in pairs):
            continue
        equalizing += 1
        g = np.array([f[r] for r in reps], dtype=np.int64)
        if not is_homomorphism(g, Q, P) or not np.array_equal(g[proj], f):
            logger.info("equalizing hom %s does not factor through the quotient", f.tolist())
            return False
    factored = sum(1 for _ in enumerate_homs(Q, P, guard))
    return factored == equalizing


# Tensor products

@dataclass(frozen=True)
class GolanCollapse:
    """M modulo the cancellation congruence a ~ b iff a + c = b + c for some c"""

    source: str
    trivial: bool
    quotient: Optional[FiniteSemimodule] = None
    congruence: Optional[Congruence] = None
    rule: str = ""
    ring: Optional[Semiring] = field(default=None, compare=False)

    @property
    def size(self) -> Optional[int]:
        if self.quotient is not None:
            return self.quotient.size
        return 1 if self.trivial else None

    def witness(self, a, b):
        """A cancellation witness c for a ~ b in the symbolic case"""
        if self.ring is None or not self.trivial:
            return None
        c = self.ring.add(a, b)
        if self.ring.add(a, c) != self.ring.add(b, c):
            raise CongruenceViolationError(f"{self.ring.format(c)} does not cancel {a!r} and {b!r}")
        return c


def cancellation_witness(M: FiniteSemimodule, a: int, b: int) -> Optional[int]:
    hits = np.flatnonzero(M.add_table[a] == M.add_table[b])
    return int(hits[0]) if len(hits) else None


def golan_tensor_collapse(M) -> GolanCollapse:
    if isinstance(M, BuiltinSemiring):
        if M.is_idempotent():
            return GolanCollapse(M.name, True, rule="c = a + b absorbs both sides", ring=M)
        return GolanCollapse(M.name, False, rule="cancellative: a + c = b + c forces a = b", ring=M)
    if not isinstance(M, FiniteSemimodule):
        raise InputError("golan_tensor_collapse needs a finite semimodule or a builtin semiring")
    relation = (M.add_table[:, None, :] == M.add_table[None, :, :]).any(axis=2)
    pairs = [(int(a), int(b)) for a, b in np.argwhere(relation) if a < b]
    C = congruence_closure(M, pairs)
    if not np.array_equal(C.matrix(), relation):
        raise CongruenceViolationError(
            f"cancellation relation on {M.name} is not closed", {"relation_pairs": len(pairs)}
        )
    Q = quotient(M, C, name=f"{M.name}/cancel")
    return GolanCollapse(M.name, Q.size == 1, Q, C, rule="exhaustive witness search")


@dataclass(frozen=True)
class TensorProduct:
    """M (x)_R N with the canonical bilinear map (m, n) -> class index"""

    module: FiniteSemimodule
    pair_class: Dict[Tuple[int, int], int]
    generators: Tuple[Tuple[int, int], ...]

    def __call__(self, m: int, n: int) -> int:
        return self.pair_class[(m, n)]


def tensor_product(M: FiniteSemimodule, N: FiniteSemimodule, guard: Optional[int] = None) -> TensorProduct:
    """
    Free module on the pairs of nonzero elements modulo bilinearity.
    Pairs with a zero entry are identified with 0 up front, which gives the same
    quotient as the free module on all of M x N.
    """
    if M.ring != N.ring:
        raise IncompatibleOperandsError("tensor factors over different semirings")
    R = M.ring
    gens = tuple((m, n) for m in M.values() if m != M.zero for n in N.values() if n != N.zero)
    _check_guard(len(R.values()) ** len(gens), guard or settings.tensor_guard, f"{M.name} (x) {N.name}")
    F = FreeSemimodule(R, len(gens), guard=guard)
    basis = {g: F.basis(i) for i, g in enumerate(gens)}

    def pair(m: int, n: int) -> int:
        return basis.get((m, n), F.zero)

    relations = []
    for m, m2 in itertools.product(M.values(), repeat=2):
        for n in N.values():
            relations.append((pair(M.add(m, m2), n), F.add(pair(m, n), pair(m2, n))))
    for n, n2 in itertools.product(N.values(), repeat=2):
        for m in M.values():
            relations.append((pair(m, N.add(n, n2)), F.add(pair(m, n), pair(m, n2))))
    for r in R.values():
        for m, n in itertools.product(M.values(), N.values()):
            scaled = F.act(r, pair(m, n))
            relations.append((pair(M.act(r, m), n), scaled))
            relations.append((pair(m, N.act(r, n)), scaled))
    C = congruence_closure(F, relations)
    Q = quotient(F, C, name=f"{M.name}(x){N.name}")
    proj = C.projection()
    classes = {(m, n): int(proj[pair(m, n)]) for m in M.values() for n in N.values()}
    logger.debug("tensor %s (x) %s: free rank %d, %d classes", M.name, N.name, len(gens), Q.size)
    return TensorProduct(Q, classes, gens)


def pr_tensor(M: FiniteSemimodule, N: FiniteSemimodule, guard: Optional[int] = None) -> FiniteSemimodule:
    return tensor_product(M, N, guard).module


@dataclass
class AdjunctionReport:
    holds: bool
    left_size: int
    right_size: int
    bijection: Dict[int, int] = field(default_factory=dict)
    counterexample: Optional[Dict[str, Any]] = None


def check_hom_tensor_adjunction(
    M: FiniteSemimodule, N: FiniteSemimodule, P: FiniteSemimodule, guard: Optional[int] = None
) -> AdjunctionReport:
    """
    Hom(M (x) N, P) -> Hom(M, Hom(N, P)), phi -> (m -> (n -> phi(m (x) n))),
    checked to be a well-defined bijection by enumeration.
    """
    T = tensor_product(M, N, guard)
    left = [h for h in enumerate_homs(T.module, P, guard)]
    inner = hom_semimodule(N, P, guard)
    right = hom_semimodule(M, inner, guard)
    inner_index = {h: i for i, h in enumerate(inner.elements)}
    right_index = {h: i for i, h in enumerate(right.elements)}
    bijection: Dict[int, int] = {}
    for k, phi in enumerate(left):
        curried = []
        for m in M.values():
            slice_map = tuple(int(phi[T(m, n)]) for n in N.values())
            if slice_map not in inner_index:
                return AdjunctionReport(False, len(left), right.size, counterexample={"phi": phi.tolist(), "m": m})
            curried.append(inner_index[slice_map])
        curried = tuple(curried)
        if curried not in right_index:
            return AdjunctionReport(False, len(left), right.size, counterexample={"phi": phi.tolist()})
        bijection[k] = right_index[curried]
    holds = len(left) == right.size and len(set(bijection.values())) == len(left)
    return AdjunctionReport(holds, len(left), right.size, bijection=bijection)


def invertible_module_identities(R: Semiring) -> Dict[str, bool]:
    """Finite checks of Hom(R, R) = R, Hom(L, L) = R and Hom(L, R) (x) L = R for L = R"""
    regular = regular_module(R)
    L = regular_module(R)
    dual = hom_semimodule(L, regular)
    return {
        "hom_R_R_is_R": find_isomorphism(hom_semimodule(regular, regular), regular) is not None,
        "hom_L_L_is_R": find_isomorphism(hom_semimodule(L, L), regular) is not None,
        "dual_tensor_L_is_R": find_isomorphism(pr_tensor(dual, L), regular) is not None,
    }


def golan_duality_failure(R: Semiring) -> Dict[str, Any]:
    """
    For idempotent R with a top element the cancellation tensor R (x) R collapses,
    so Hom(R (x) R, R) has one element while Hom(R, Hom(R, R)) has |R|.
    """
    regular = regular_module(R)
    collapse = golan_tensor_collapse(regular)
    left = hom_semimodule(collapse.quotient, regular)
    right = hom_semimodule(regular, hom_semimodule(regular, regular))
    return {
        "collapsed": collapse.trivial,
        "hom_tensor_size": left.size,
        "hom_hom_size": right.size,
        "duality_fails": left.size != right.size,
    }
