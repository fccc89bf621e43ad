# backend/api/projective.py
"""
Projective Space Engine - P^n over an idempotent semifield
Standard-cover models of O, O(m) and O*, witnesses for the vanishing of the
higher cohomology of O, and the classification of unit cocycles by degree.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from backend.api.cech import CechComplex, Cover, StructureSheafPn, UnitSheafPn, build_cech
from backend.api.errors import (
    CocycleError,
    DecompositionError,
    IncompatibleOperandsError,
    InputError,
    NotInvertibleError,
    PreconditionError,
)
from backend.api.laurent import LaurentPoly, unit_sections
from backend.api.pm_complex import is_cocycle, rho_related
from backend.api.semiring_core import QMAX, Semiring
from backend.api.settings import settings

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


@dataclass(frozen=True)
class ProjectiveSpace:
    """P^n_M with its standard cover D(x_0), ..., D(x_n)"""

    n: int
    ring: Semiring = QMAX

    def __post_init__(self):
        if self.n < 1:
            raise InputError(f"P^{self.n}: dimension must be at least 1")

    @property
    def nvars(self) -> int:
        return self.n + 1

    @property
    def cover(self) -> Cover:
        return Cover.standard(self.n)

    def pairs(self) -> List[Pair]:
        return list(itertools.combinations(range(self.nvars), 2))

    def triples(self) -> List[Tuple[int, int, int]]:
        return list(itertools.combinations(range(self.nvars), 3))

    def is_classifiable(self) -> bool:
        return self.ring.is_totally_ordered_idempotent() and self.ring.is_semifield()

    def require_classifiable(self) -> None:
        if not self.is_classifiable():
            raise PreconditionError(
                f"{self.ring.name} is not a totally ordered idempotent semifield",
                {"ring": self.ring.name},
            )

    def monomial(self, exp: Sequence[int], coef=None) -> LaurentPoly:
        return LaurentPoly.monomial(self.ring, exp, coef)

    def constant(self, value=None) -> LaurentPoly:
        return LaurentPoly.constant(self.ring, self.nvars, value)

    def transition(self, i: int, j: int, degree: int, coef=None) -> LaurentPoly:
        """q * x_i^d * x_j^-d"""
        exp = [0] * self.nvars
        exp[i] += degree
        exp[j] -= degree
        return self.monomial(exp, coef)


@lru_cache(maxsize=64)
def structure_complex(X: ProjectiveSpace, max_degree: Optional[int] = None, twist: int = 0) -> CechComplex:
    return build_cech(X.cover, StructureSheafPn(X.n, X.ring, twist), max_degree=max_degree if max_degree is not None else X.n)


@lru_cache(maxsize=64)
def unit_complex(X: ProjectiveSpace) -> CechComplex:
    """The Cech complex of O* with multiplication as the semimodule operation"""
    return build_cech(X.cover, UnitSheafPn(X.n, X.ring), max_degree=1)


# Unit cocycles

@dataclass(frozen=True)
class UnitCocycle:
    """f_ij for i < j, each an invertible degree-0 monomial supported on {i, j}"""

    space: ProjectiveSpace
    entries: Tuple[Tuple[Pair, LaurentPoly], ...]

    def __post_init__(self):
        keys = [pair for pair, _ in self.entries]
        if sorted(keys) != self.space.pairs():
            raise InputError(f"a unit cocycle on P^{self.space.n} needs exactly the pairs {self.space.pairs()}")
        for (i, j), f in self.entries:
            if not unit_sections(self.space.n, (i, j), self.space.ring).contains(f):
                raise InputError(f"f_{i}{j} = {f!r} is not an invertible section over U_{i}{j}", {"pair": [i, j]})

    @classmethod
    def from_mapping(cls, X: ProjectiveSpace, entries: Mapping[Pair, LaurentPoly]) -> "UnitCocycle":
        return cls(X, tuple(sorted((tuple(k), v) for k, v in entries.items())))

    def __getitem__(self, pair: Pair) -> LaurentPoly:
        i, j = pair
        if i == j:
            return self.space.constant()
        if i > j:
            return self[(j, i)].inverse()
        return dict(self.entries)[(i, j)]

    def mapping(self) -> Dict[Pair, LaurentPoly]:
        return dict(self.entries)

    def cocycle_violation(self) -> Optional[Tuple[int, int, int]]:
        """First triple i < j < k with f_ik != f_ij * f_jk"""
        f = self.mapping()
        for i, j, k in self.space.triples():
            if f[(i, k)] != f[(i, j)] * f[(j, k)]:
                return (i, j, k)
        return None

    def require_cocycle(self) -> None:
        triple = self.cocycle_violation()
        if triple is not None:
            raise CocycleError(f"cocycle law fails on the triple {list(triple)}", {"triple": list(triple)})

    def as_cochain(self) -> Tuple[LaurentPoly, ...]:
        f = self.mapping()
        return tuple(f[t] for t in self.space.pairs())

    def to_dict(self) -> Dict[str, Any]:
        ring = self.space.ring
        entries = {}
        for (i, j), f in self.entries:
            coef, exp = f.monomial_parts()
            entries[f"{i},{j}"] = {"q": ring.format(coef), "exp": list(exp)}
        return {"n": self.space.n, "entries": entries}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any], ring: Semiring = QMAX) -> "UnitCocycle":
        try:
            X = ProjectiveSpace(int(doc["n"]), ring)
            entries = {}
            for key, entry in doc["entries"].items():
                i, j = (int(s) for s in str(key).split(","))
                entries[(i, j)] = X.monomial(entry["exp"], ring.parse(entry.get("q", ring.format(ring.one))))
        except (KeyError, TypeError, ValueError, AttributeError) as e:
            if isinstance(e, InputError):
                raise
            raise InputError(f"malformed unit cocycle document: {e}")
        return cls.from_mapping(X, entries)

    def __repr__(self) -> str:
        return "UnitCocycle(" + ", ".join(f"{i}{j}: {f!r}" for (i, j), f in self.entries) + ")"


def twisting_cocycle(X: ProjectiveSpace, m: int) -> UnitCocycle:
    """f_ij = x_i^m / x_j^m"""
    f = UnitCocycle.from_mapping(X, {(i, j): X.transition(i, j, m) for i, j in X.pairs()})
    f.require_cocycle()
    return f


@dataclass(frozen=True)
class Classification:
    degree: int
    q: Dict[Pair, Any] = field(hash=False)
    normalizer: Tuple[Any, ...] = ()

    def normalized(self, X: ProjectiveSpace) -> UnitCocycle:
        """The canonical representative: the q-family divided out by the normalizer"""
        return twisting_cocycle(X, self.degree)


def classify_cocycle(X: ProjectiveSpace, f: UnitCocycle) -> Classification:
    """
    Read each f_ij as q_ij * x_i^d_ij * x_j^-d_ij, check that all d_ij agree and
    that q_ik = q_ij * q_jk, and return the common degree with the q-family.
    """
    X.require_classifiable()
    ring = X.ring
    degrees: Dict[Pair, int] = {}
    q: Dict[Pair, Any] = {}
    for (i, j), poly in f.entries:
        if not poly.is_monomial():
            raise CocycleError(f"f_{i}{j} is not a monomial", {"pair": [i, j]})
        coef, exp = poly.monomial_parts()
        if exp[i] != -exp[j] or any(e for k, e in enumerate(exp) if k not in (i, j)):
            raise CocycleError(f"f_{i}{j} = {poly!r} is not of the form q x_{i}^d x_{j}^-d", {"pair": [i, j]})
        degrees[(i, j)] = exp[i]
        q[(i, j)] = coef
    degree = degrees[(0, 1)]
    for pair, d in degrees.items():
        if d != degree:
            raise CocycleError(
                f"exponent {d} on {list(pair)} differs from the degree {degree} fixed by f_01",
                {"pair": list(pair), "exponent": d, "degree": degree},
            )
    for i, j, k in X.triples():
        if q[(i, k)] != ring.mul(q[(i, j)], q[(j, k)]):
            raise CocycleError(
                f"q_{i}{k} != q_{i}{j} * q_{j}{k}", {"triple": [i, j, k]}
            )
    normalizer = (ring.one,) + tuple(q[(0, j)] for j in range(1, X.nvars))
    return Classification(degree, q, normalizer)


def tensor_cocycles(f: UnitCocycle, g: UnitCocycle) -> UnitCocycle:
    if f.space != g.space:
        raise IncompatibleOperandsError("cocycles on different projective spaces")
    a, b = f.mapping(), g.mapping()
    return UnitCocycle.from_mapping(f.space, {k: a[k] * b[k] for k in a})


def inverse_cocycle(f: UnitCocycle) -> UnitCocycle:
    return UnitCocycle.from_mapping(f.space, {k: v.inverse() for k, v in f.mapping().items()})


@dataclass
class CoboundaryResult:
    """Either a verified witness (u, v) in C^0(O*) or a record that the classes differ"""

    equivalent: bool
    degrees: Tuple[int, int]
    u: Optional[Tuple[LaurentPoly, ...]] = None
    v: Optional[Tuple[LaurentPoly, ...]] = None
    verified: bool = False
    reason: str = ""


def coboundary_witness(X: ProjectiveSpace, f: UnitCocycle, g: UnitCocycle) -> CoboundaryResult:
    """
    For equal degrees the ratio r_ij = g_ij / f_ij is a constant cocycle; u_j = r_0j
    and v = 1 then satisfy f * d+u * d-v = g * d+v * d-u, checked on the unit complex.
    """
    cf, cg = classify_cocycle(X, f), classify_cocycle(X, g)
    degrees = (cf.degree, cg.degree)
    if cf.degree != cg.degree:
        return CoboundaryResult(
            False, degrees,
            reason=f"degrees {cf.degree} and {cg.degree} differ; constant unit cochains cannot change exponents",
        )
    ring = X.ring
    ratio = {pair: ring.mul(cg.q[pair], ring.inverse(cf.q[pair])) for pair in X.pairs()}
    u = (X.constant(),) + tuple(X.constant(ratio[(0, j)]) for j in range(1, X.nvars))
    v = tuple(X.constant() for _ in range(X.nvars))
    C = unit_complex(X)
    verified = rho_related(C, 1, f.as_cochain(), g.as_cochain(), u, v)
    if not verified:
        logger.error("coboundary witness for degree %d failed verification", cf.degree)
    return CoboundaryResult(True, degrees, u, v, verified)


def brute_force_unit_witness(
    X: ProjectiveSpace, f: UnitCocycle, g: UnitCocycle, scalars: Sequence[Any]
) -> Optional[Tuple[Tuple[LaurentPoly, ...], Tuple[LaurentPoly, ...]]]:
    """Search all u, v in C^0(O*) with constant entries from scalars; sections of O* on one chart are constants"""
    C = unit_complex(X)
    x, y = f.as_cochain(), g.as_cochain()
    constants = [X.constant(q) for q in scalars]
    for u in itertools.product(constants, repeat=X.nvars):
        for v in itertools.product(constants, repeat=X.nvars):
            if rho_related(C, 1, x, y, u, v):
                return u, v
    return None


# Trivializations

@dataclass(frozen=True)
class Trivialization:
    """Basis sections e_i of an invertible sheaf over each chart D(x_i)"""

    space: ProjectiveSpace
    degree: int
    basis: Tuple[LaurentPoly, ...]

    def __post_init__(self):
        if len(self.basis) != self.space.nvars:
            raise InputError(f"a trivialization of P^{self.space.n} needs {self.space.nvars} basis sections")
        ring = self.space.ring
        for i, e in enumerate(self.basis):
            if not e.is_monomial():
                raise NotInvertibleError(f"e_{i} = {e!r} is not a monomial", {"chart": i})
            coef, exp = e.monomial_parts()
            expected = tuple(self.degree if k == i else 0 for k in range(self.space.nvars))
            if not ring.is_unit(coef) or tuple(exp) != expected:
                raise NotInvertibleError(
                    f"e_{i} = {e!r} does not generate O({self.degree}) over D(x_{i})", {"chart": i}
                )


def standard_trivialization(X: ProjectiveSpace, m: int) -> Trivialization:
    """e_i = x_i^m, the image of 1 under a -> a x_i^m"""
    return Trivialization(X, m, tuple(_power(X, i, m) for i in range(X.nvars)))


def _power(X: ProjectiveSpace, i: int, m: int) -> LaurentPoly:
    exp = [0] * X.nvars
    exp[i] = m
    return X.monomial(exp)


def cocycle_from_trivialization(X: ProjectiveSpace, L: Trivialization) -> UnitCocycle:
    """f_ij = e_i / e_j, so that e_i = e_j * f_ij on U_ij"""
    if L.space != X:
        raise IncompatibleOperandsError("trivialization of a different projective space")
    f = UnitCocycle.from_mapping(X, {(i, j): L.basis[i] * L.basis[j].inverse() for i, j in X.pairs()})
    f.require_cocycle()
    return f


def rescale_trivialization(L: Trivialization, g: Sequence[Any]) -> Trivialization:
    """e_i -> g_i e_i for unit constants g_i"""
    X = L.space
    if len(g) != X.nvars:
        raise InputError(f"rescaling needs {X.nvars} units")
    return Trivialization(X, L.degree, tuple(X.constant(gi) * e for gi, e in zip(g, L.basis)))


def rescaling_witness(X: ProjectiveSpace, L: Trivialization, g: Sequence[Any]) -> bool:
    """f * d-(g) = f' * d+(g) for f, f' computed before and after rescaling by g"""
    f = cocycle_from_trivialization(X, L)
    f2 = cocycle_from_trivialization(X, rescale_trivialization(L, g))
    ones = tuple(X.constant() for _ in range(X.nvars))
    gs = tuple(X.constant(gi) for gi in g)
    return rho_related(unit_complex(X), 1, f.as_cochain(), f2.as_cochain(), ones, gs)


@dataclass
class RefinementWitness:
    """g on the common refinement U_i n U'_j indexed by I x J in dictionary order"""

    index: List[Pair]
    g: Dict[Pair, LaurentPoly]
    verified: bool
    failure: Optional[Tuple[Pair, Pair]] = None


def common_refinement_witness(L: Trivialization, L2: Trivialization) -> RefinementWitness:
    """
    Two trivializations of one sheaf on the standard cover give cocycles f, f'.
    On W_(i,j) = U_i n U_j, g_(i,j) = e'_j / e_i satisfies
    f_ik * g_(i,j) = f'_jl * g_(k,l) for every (i,j) < (k,l).
    """
    X = L.space
    if L2.space != X or L2.degree != L.degree:
        raise IncompatibleOperandsError("trivializations of different sheaves")
    f = cocycle_from_trivialization(X, L)
    f2 = cocycle_from_trivialization(X, L2)
    index = list(itertools.product(range(X.nvars), repeat=2))
    g = {(i, j): L2.basis[j] * L.basis[i].inverse() for i, j in index}
    for (i, j), section in g.items():
        if not unit_sections(X.n, tuple(sorted({i, j})), X.ring).contains(section):
            return RefinementWitness(index, g, False, ((i, j), (i, j)))
    for a, b in itertools.combinations(index, 2):
        (i, j), (k, l) = a, b
        if f[(i, k)] * g[a] != f2[(j, l)] * g[b]:
            return RefinementWitness(index, g, False, (a, b))
    return RefinementWitness(index, g, True)


# Picard group

class PicardGroup:
    """Pic(P^n) as Z: class = degree, representative = twisting cocycle, law = tensor"""

    def __init__(self, X: ProjectiveSpace):
        X.require_classifiable()
        self.space = X

    def class_of(self, f: UnitCocycle) -> int:
        return classify_cocycle(self.space, f).degree

    def representative_of(self, m: int) -> UnitCocycle:
        return twisting_cocycle(self.space, m)

    def multiply(self, f: UnitCocycle, g: UnitCocycle) -> UnitCocycle:
        return tensor_cocycles(f, g)

    def inverse(self, f: UnitCocycle) -> UnitCocycle:
        return inverse_cocycle(f)

    def identity(self) -> UnitCocycle:
        return twisting_cocycle(self.space, 0)

    def same_class(self, f: UnitCocycle, g: UnitCocycle) -> bool:
        return coboundary_witness(self.space, f, g).equivalent

    def verify_homomorphism(self, rng: random.Random, samples: int = 20, degree_bound: int = 3) -> bool:
        for _ in range(samples):
            a, b = rng.randint(-degree_bound, degree_bound), rng.randint(-degree_bound, degree_bound)
            f = random_unit_cocycle(self.space, a, rng)
            g = random_unit_cocycle(self.space, b, rng)
            if self.class_of(self.multiply(f, g)) != self.class_of(f) + self.class_of(g):
                return False
        return True


def picard_group(X: ProjectiveSpace) -> PicardGroup:
    return PicardGroup(X)


def random_unit_cocycle(X: ProjectiveSpace, degree: int, rng: random.Random, bound: Optional[int] = None) -> UnitCocycle:
    """q_0j free in M*, q_ij = q_0j / q_0i, all exponents equal to degree"""
    ring = X.ring
    bound = bound or settings.coefficient_bound
    base = [ring.one] + [ring.random_unit(rng, bound) for _ in range(X.n)]
    entries = {
        (i, j): X.transition(i, j, degree, ring.mul(base[j], ring.inverse(base[i])))
        for i, j in X.pairs()
    }
    return UnitCocycle.from_mapping(X, entries)


# Higher cohomology of O

@dataclass
class VanishingWitness:
    degree: int
    u: Tuple[LaurentPoly, ...]
    v: Tuple[LaurentPoly, ...]
    verified: bool
    assignment: Dict[Tuple[int, ...], List[Tuple[int, ...]]] = field(default_factory=dict)


def vanishing_witness(X: ProjectiveSpace, p: int, t: Tuple[LaurentPoly, ...]) -> VanishingWitness:
    """
    Split every monomial of t_l onto the face l - l_k for the first position k
    where its exponent of x_(l_k) is nonnegative, collect the pieces into u and
    take v = u; idempotency then gives t + d+u + d-u = d+u + d-u.
    """
    if not X.ring.is_idempotent():
        raise PreconditionError(f"{X.ring.name} is not idempotent")
    if not 1 <= p <= X.n:
        raise InputError(f"degree {p} is outside 1..{X.n}")
    C = structure_complex(X, p)
    if not is_cocycle(C, p, t):
        raise CocycleError(f"t is not a cocycle in degree {p}")
    pieces: Dict[Tuple[int, ...], LaurentPoly] = {}
    assignment: Dict[Tuple[int, ...], List[Tuple[int, ...]]] = {}
    zero = LaurentPoly.zero(X.ring, X.nvars)
    for l, component in C.components(p, t).items():
        for mono in component.monomials():
            _, exp = mono.monomial_parts()
            k = next((k for k, i in enumerate(l) if exp[i] >= 0), None)
            if k is None:
                raise DecompositionError(
                    f"monomial {mono!r} of t_{''.join(map(str, l))} fits no face section space",
                    {"tuple": list(l), "exp": list(exp)},
                )
            face = l[:k] + l[k + 1:]
            pieces[face] = pieces.get(face, zero) + mono
            assignment.setdefault(l, []).append(face)
    u = C.cochain(p - 1, pieces)
    zero_cochain = C.zero(p)
    verified = rho_related(C, p, t, zero_cochain, u, u)
    return VanishingWitness(p, u, u, verified, assignment)


def random_structure_cocycle(X: ProjectiveSpace, p: int, rng: random.Random, max_terms: int = 4, bound: Optional[int] = None) -> Tuple[LaurentPoly, ...]:
    """
    A random element of Z^p(U, O) built from a pool of degree-0 monomials:
    a monomial with negative support N joins t_l for every l containing N, and it
    is kept only if every (p+2)-tuple L containing N has positions of L - N of
    both parities, which makes d+t = d-t term by term.
    """
    if not X.ring.is_idempotent():
        raise PreconditionError(f"{X.ring.name} is not idempotent")
    bound = bound or settings.exponent_bound
    C = structure_complex(X, p)
    pool = [e for e in itertools.product(range(-bound, bound + 1), repeat=X.nvars) if sum(e) == 0 and _pool_admissible(X, p, e)]
    chosen = rng.sample(pool, min(len(pool), rng.randint(0, max_terms)))
    terms = [(e, _nonzero(X.ring, rng)) for e in chosen]
    values = {}
    for l in C.tuples[p]:
        inside = [(e, c) for e, c in terms if all(e[i] >= 0 for i in range(X.nvars) if i not in l)]
        values[l] = LaurentPoly(X.ring, X.nvars, inside)
    return C.cochain(p, values)


def _pool_admissible(X: ProjectiveSpace, p: int, exp: Sequence[int]) -> bool:
    negative = {i for i, e in enumerate(exp) if e < 0}
    if len(negative) > p + 1:
        return False
    for L in itertools.combinations(range(X.nvars), p + 2):
        if not negative <= set(L):
            continue
        parities = {k % 2 for k, i in enumerate(L) if i not in negative}
        if parities != {0, 1}:
            return False
    return True


def _nonzero(ring: Semiring, rng: random.Random):
    for _ in range(64):
        value = ring.random_value(rng, settings.coefficient_bound)
        if not ring.is_zero(value):
            return value
    return ring.one


def split_witness(X: ProjectiveSpace, x: LaurentPoly, y: LaurentPoly) -> Tuple[Tuple[LaurentPoly, ...], Tuple[LaurentPoly, ...]]:
    """
    On P^1: split x = x0 + x1 into its part with x_1-exponent >= 0 (a section over U_0)
    and the rest (over U_1), likewise y; then u = (x0, y1), v = (y0, x1).
    """
    if X.n != 1:
        raise InputError("the two-chart split lives on P^1")

    def split(z: LaurentPoly) -> Tuple[LaurentPoly, LaurentPoly]:
        low = [(e, c) for e, c in z.items() if e[1] >= 0]
        high = [(e, c) for e, c in z.items() if e[1] < 0]
        return LaurentPoly(X.ring, 2, low), LaurentPoly(X.ring, 2, high)

    x0, x1 = split(x)
    y0, y1 = split(y)
    return (x0, y1), (y0, x1)
