# backend/api/cech.py
"""
Cech Complex Builder
Ordered Cech cochains of a sheaf on a finite cover, with d+ summing the
restrictions over even omitted positions and d- over odd ones.
"""

import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, FrozenSet, Hashable, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np

from backend.api.errors import (
    InputError,
    MembershipError,
    RefinementError,
    SheafGluingError,
)
from backend.api.laurent import LaurentPoly, SectionSpace, UnitSectionSpace, section_space, unit_sections
from backend.api.pm_complex import PMComplex, PMMorphism, SymbolicSpace, compute_cohomology, cocycles
from backend.api.semimodule import FiniteSemimodule, SemimoduleHom, product_module, zero_module
from backend.api.semiring_core import Semiring
from backend.api.settings import settings

logger = logging.getLogger(__name__)

Chain = Tuple[int, ...]


class Cover:
    """
    A finite cover with a total order on its members (their positions).
    Covers built from point sets know which intersections are empty; the
    standard chart cover of P^n identifies U_t with the chart tuple t.
    """

    def __init__(self, sets: Optional[Sequence[Iterable[Hashable]]] = None, count: Optional[int] = None, name: str = "U"):
        if sets is not None:
            self.sets: Optional[Tuple[FrozenSet, ...]] = tuple(frozenset(s) for s in sets)
            self.size = len(self.sets)
        elif count is not None:
            self.sets = None
            self.size = int(count)
        else:
            raise InputError("a cover needs either member sets or a member count")
        if self.size == 0:
            raise InputError("a cover needs at least one member")
        self.name = name

    @classmethod
    def standard(cls, n: int) -> "Cover":
        """D(x_0), ..., D(x_n) on P^n"""
        return cls(count=n + 1, name=f"std(P{n})")

    def tuples(self, p: int) -> List[Chain]:
        """Strictly increasing (p+1)-tuples of member positions"""
        if p < 0:
            return []
        return list(itertools.combinations(range(self.size), p + 1))

    def open(self, t: Sequence[int]) -> Hashable:
        if self.sets is None:
            return tuple(t)
        return frozenset.intersection(*(self.sets[i] for i in t))

    def is_empty(self, t: Sequence[int]) -> bool:
        return self.sets is not None and not self.open(t)

    def contains(self, big: Hashable, small: Hashable) -> bool:
        """small is a subset of big"""
        if self.sets is None:
            return set(big) <= set(small)
        return small <= big

    def reversed(self) -> "Cover":
        if self.sets is None:
            return Cover(count=self.size, name=f"{self.name}^op")
        return Cover(list(reversed(self.sets)), name=f"{self.name}^op")

    def __repr__(self) -> str:
        return f"Cover({self.name}, {self.size} members)"


# Sheaf data

class SheafData:
    """Sections per open and restriction maps between opens"""

    name = "F"
    finite = True

    def sections(self, U: Hashable):
        raise NotImplementedError

    def restrict(self, U: Hashable, V: Hashable, x: Any) -> Any:
        raise NotImplementedError


class ConstantSheaf(SheafData):
    """M on every nonempty open, 0 on the empty one; restrictions are identities"""

    def __init__(self, module: FiniteSemimodule, name: Optional[str] = None):
        self.module = module
        self.ring = module.ring
        self.zero_module = zero_module(module.ring)
        self.name = name or f"const({module.name})"

    def sections(self, U: Hashable) -> FiniteSemimodule:
        return self.module if U else self.zero_module

    def restrict(self, U: Hashable, V: Hashable, x: int) -> int:
        if not V:
            return self.zero_module.zero
        if not U:
            raise InputError("restriction out of the empty open into a nonempty one")
        return x

    def global_sections(self, cover: "Cover") -> FiniteSemimodule:
        return self.module


class FiniteSheafData(SheafData):
    """
    Explicit finite sheaf data on a cover without point sets: a module per
    tuple (missing tuples carry the zero module) and a homomorphism per face
    inclusion t - {t_k} -> t.
    """

    def __init__(
        self,
        ring: Semiring,
        sections: Mapping[Chain, FiniteSemimodule],
        restrictions: Mapping[Tuple[Chain, Chain], Sequence[int]],
        name: str = "F",
    ):
        self.ring = ring
        self.name = name
        self._zero = zero_module(ring)
        self._sections = {tuple(t): M for t, M in sections.items()}
        self._faces: Dict[Tuple[Chain, Chain], SemimoduleHom] = {}
        for (dst, src), table in restrictions.items():
            dst, src = tuple(dst), tuple(src)
            if not (set(src) < set(dst) and len(dst) == len(src) + 1):
                raise InputError(f"restriction {list(dst)}<-{list(src)} is not a face inclusion")
            self._faces[(dst, src)] = SemimoduleHom(self.sections(src), self.sections(dst), tuple(int(x) for x in table))
        self._check_functoriality()

    def sections(self, U: Chain) -> FiniteSemimodule:
        return self._sections.get(tuple(U), self._zero)

    def _face(self, dst: Chain, src: Chain) -> SemimoduleHom:
        hom = self._faces.get((dst, src))
        if hom is not None:
            return hom
        source, target = self.sections(src), self.sections(dst)
        if source.size == 1 or target.size == 1:
            return SemimoduleHom.zero_map(source, target)
        raise InputError(f"missing restriction {list(dst)}<-{list(src)}", {"dst": list(dst), "src": list(src)})

    def reindexed(self, perm: Mapping[int, int], name: Optional[str] = None) -> "FiniteSheafData":
        """The same data with member i renamed perm[i]"""
        if len(set(perm.values())) != len(perm):
            raise InputError(f"reindexing {dict(perm)} is not injective")
        members = {i for t in self._sections for i in t} | {i for d, _ in self._faces for i in d}
        if not members <= set(perm):
            raise InputError(f"reindexing misses members {sorted(members - set(perm))}")

        def move(t: Chain) -> Chain:
            return tuple(sorted(perm[i] for i in t))

        sections = {move(t): M for t, M in self._sections.items()}
        restrictions = {(move(d), move(s)): hom.images for (d, s), hom in self._faces.items()}
        return FiniteSheafData(self.ring, sections, restrictions, name=name or self.name)

    def restrict(self, U: Chain, V: Chain, x: int) -> int:
        U, V = tuple(U), tuple(V)
        current = U
        for i in V:
            if i in current:
                continue
            nxt = tuple(sorted(current + (i,)))
            x = self._face(nxt, current)(x)
            current = nxt
        return x

    def _check_functoriality(self) -> None:
        tuples = set(self._sections) | {d for d, _ in self._faces}
        for T in sorted(tuples):
            for a, b in itertools.combinations(T, 2):
                base = tuple(i for i in T if i not in (a, b))
                if not base:
                    continue
                via_a = tuple(i for i in T if i != a)
                via_b = tuple(i for i in T if i != b)
                first = self._face(T, via_b).compose(self._face(via_b, base))
                second = self._face(T, via_a).compose(self._face(via_a, base))
                if first.images != second.images:
                    raise InputError(
                        f"restrictions to {list(T)} from {list(base)} depend on the path",
                        {"tuple": list(T), "base": list(base)},
                    )


class AdditiveSections(SymbolicSpace):
    """Sections of O_X(m) over one chart intersection under addition"""

    def __init__(self, space: SectionSpace):
        self.space = space
        self.name = f"O({space.degree})(U{list(space.chart)})"

    @property
    def zero(self) -> LaurentPoly:
        return self.space.zero()

    def add(self, a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
        return a + b

    def contains(self, x: Any) -> bool:
        return self.space.contains(x)

    def sample(self, rng: random.Random, count: int) -> List[LaurentPoly]:
        return [self.space.random_element(rng, settings.exponent_bound) for _ in range(count)]


class MultiplicativeSections(SymbolicSpace):
    """Invertible sections over one chart intersection under multiplication"""

    def __init__(self, space: UnitSectionSpace):
        self.space = space
        self.name = f"O*(U{list(space.chart)})"

    @property
    def zero(self) -> LaurentPoly:
        return self.space.one()

    def add(self, a: LaurentPoly, b: LaurentPoly) -> LaurentPoly:
        return a * b

    def contains(self, x: Any) -> bool:
        return self.space.contains(x)

    def sample(self, rng: random.Random, count: int) -> List[LaurentPoly]:
        return [self.space.random_element(rng, settings.exponent_bound) for _ in range(count)]


class StructureSheafPn(SheafData):
    """O_X(m) on the standard cover of P^n; restriction is the identity embedding"""

    finite = False

    def __init__(self, n: int, ring: Semiring, degree: int = 0):
        self.n = n
        self.ring = ring
        self.degree = degree
        self.name = "O" if degree == 0 else f"O({degree})"

    def sections(self, U: Chain) -> AdditiveSections:
        return AdditiveSections(section_space(self.n, U, self.degree, self.ring))

    def restrict(self, U: Chain, V: Chain, x: LaurentPoly) -> LaurentPoly:
        return section_space(self.n, U, self.degree, self.ring).restrict(x, V)

    def global_sections(self) -> Semiring:
        return self.ring


class UnitSheafPn(SheafData):
    """O*_X on the standard cover of P^n, written multiplicatively"""

    finite = False

    def __init__(self, n: int, ring: Semiring):
        unit_sections(n, (0,), ring)
        self.n = n
        self.ring = ring
        self.name = "O*"

    def sections(self, U: Chain) -> MultiplicativeSections:
        return MultiplicativeSections(unit_sections(self.n, U, self.ring))

    def restrict(self, U: Chain, V: Chain, x: LaurentPoly) -> LaurentPoly:
        return unit_sections(self.n, U, self.ring).restrict(x, V)


def opposite(cover: Cover, F: SheafData) -> Tuple[Cover, SheafData]:
    """The cover with its member order reversed and F carried along"""
    if isinstance(F, ConstantSheaf):
        return cover.reversed(), F
    if isinstance(F, FiniteSheafData):
        last = cover.size - 1
        return cover.reversed(), F.reindexed({i: last - i for i in range(cover.size)}, name=f"{F.name}^op")
    raise InputError(f"{F.name} is tied to the order of {cover.name}; only finite sheaf data can be reordered")


# Cochain spaces

class CochainSpace(SymbolicSpace):
    """Product of symbolic section spaces over the (p+1)-tuples of a cover"""

    def __init__(self, tuples: Sequence[Chain], factors: Sequence[SymbolicSpace], name: str = "C"):
        self.tuples = list(tuples)
        self.factors = list(factors)
        self.name = name

    @property
    def zero(self) -> Tuple:
        return tuple(f.zero for f in self.factors)

    def add(self, a: Tuple, b: Tuple) -> Tuple:
        return tuple(f.add(x, y) for f, x, y in zip(self.factors, a, b))

    def contains(self, x: Any) -> bool:
        return (
            isinstance(x, tuple)
            and len(x) == len(self.factors)
            and all(f.contains(c) for f, c in zip(self.factors, x))
        )

    def sample(self, rng: random.Random, count: int) -> List[Tuple]:
        return [tuple(f.sample(rng, 1)[0] for f in self.factors) for _ in range(count)]


def _strides(sizes: Sequence[int]) -> List[int]:
    return [int(s) for s in np.cumprod([1] + list(sizes[:-1]))] if sizes else []


class CochainLayout:
    """Tuple order and component encoding of the cochains in each degree"""

    def __init__(self, cover: Cover, sheaf: SheafData, top: int):
        self.cover = cover
        self.sheaf = sheaf
        self.tuples = {p: cover.tuples(p) for p in range(top + 1)}
        self.factors = {p: [sheaf.sections(cover.open(t)) for t in ts] for p, ts in self.tuples.items()}

    def space(self, p: int):
        factors = self.factors[p]
        if self.sheaf.finite:
            return product_module(factors, name=f"C{p}") if factors else zero_module(self.sheaf.ring)
        return CochainSpace(self.tuples[p], factors, name=f"C{p}")

    def components(self, p: int, x: Any) -> Dict[Chain, Any]:
        tuples = self.tuples[p]
        if self.sheaf.finite:
            sizes = [f.size for f in self.factors[p]]
            return {t: (int(x) // s) % m for t, s, m in zip(tuples, _strides(sizes), sizes)}
        return dict(zip(tuples, x))

    def cochain(self, p: int, values: Mapping[Chain, Any]) -> Any:
        """Assemble a degree-p cochain; missing tuples are zero"""
        tuples = self.tuples[p]
        unknown = set(values) - set(tuples)
        if unknown:
            raise InputError(f"{sorted(unknown)} are not {p + 1}-tuples of {self.cover.name}")
        factors = self.factors[p]
        comps = [values.get(t, f.zero) for t, f in zip(tuples, factors)]
        if self.sheaf.finite:
            sizes = [f.size for f in factors]
            return int(sum(int(c) * s for c, s in zip(comps, _strides(sizes))))
        return tuple(comps)


class CechComplex(PMComplex):
    """A PMComplex that remembers the cover, the sheaf and the tuple layout of each degree"""

    def __init__(self, layout: CochainLayout, spaces, d_plus, d_minus):
        super().__init__(spaces, d_plus, d_minus, name=f"C({layout.cover.name},{layout.sheaf.name})")
        self.layout = layout
        self.cover = layout.cover
        self.sheaf = layout.sheaf
        self.tuples = layout.tuples

    def components(self, p: int, x: Any) -> Dict[Chain, Any]:
        return self.layout.components(p, x)

    def cochain(self, p: int, values: Mapping[Chain, Any]) -> Any:
        return self.layout.cochain(p, values)


def _differential(cover: Cover, F: SheafData, p: int, comps: Mapping[Chain, Any], parity: int) -> Dict[Chain, Any]:
    """Component T of the result sums the restrictions of comps[T - T_k] over k of the given parity"""
    result = {}
    for T in cover.tuples(p + 1):
        V = cover.open(T)
        target = F.sections(V)
        total = target.zero
        for k in range(parity, len(T), 2):
            face = T[:k] + T[k + 1:]
            total = target.add(total, F.restrict(cover.open(face), V, comps[face]))
        result[T] = total
    return result


def build_cech(cover: Cover, F: SheafData, max_degree: Optional[int] = None, samples: Optional[int] = None) -> CechComplex:
    """
    Degrees 0..max_degree+1 (default max_degree = number of cover members),
    so cocycles exist in every degree up to max_degree.
    """
    top = (cover.size if max_degree is None else max_degree) + 1
    layout = CochainLayout(cover, F, top)
    spaces = {p: layout.space(p) for p in range(top + 1)}
    d_plus = {p: _make_differential(layout, spaces, p, 0) for p in range(top)}
    d_minus = {p: _make_differential(layout, spaces, p, 1) for p in range(top)}
    complex_ = CechComplex(layout, spaces, d_plus, d_minus)
    complex_.validate(samples or settings.build_check_samples)
    logger.debug("built %r", complex_)
    return complex_


def _make_differential(layout: CochainLayout, spaces: Mapping[int, Any], p: int, parity: int) -> Callable[[Any], Any]:
    cover, F = layout.cover, layout.sheaf

    def apply(x: Any) -> Any:
        return layout.cochain(p + 1, _differential(cover, F, p, layout.components(p, x), parity))

    if not F.finite:
        return apply
    source, target = spaces[p], spaces[p + 1]
    return SemimoduleHom(source, target, tuple(apply(x) for x in source.values()))


# Global sections

@dataclass
class H0Result:
    """H^0 = Z^0 with the restriction map r and the gluing map s"""

    global_sections: Any
    cocycle_count: Optional[int]
    exhaustive: bool
    r: Callable[[Any], Any] = field(repr=False)
    s: Callable[[Any], Any] = field(repr=False)
    checks: Dict[str, bool] = field(default_factory=dict)

    @property
    def verified(self) -> bool:
        return bool(self.checks) and all(self.checks.values())


def h0_global(cover: Cover, F: SheafData, samples: Optional[int] = None) -> H0Result:
    C = build_cech(cover, F, max_degree=1, samples=samples)
    if F.finite:
        return _h0_finite(C)
    if isinstance(F, StructureSheafPn) and F.degree == 0:
        return _h0_projective(C, samples)
    raise InputError(f"no global section model for {F.name}")


def _h0_finite(C: CechComplex) -> H0Result:
    cover, F = C.cover, C.sheaf
    Z = cocycles(C, 0)
    H = compute_cohomology(C, 0)
    checks = {"rho0_is_equality": H.module.size == len(Z)}
    if not hasattr(F, "global_sections"):
        # global sections are the glued families themselves
        return H0Result(H.module, len(Z), True, r=lambda z: z, s=lambda z: z, checks=checks)
    G: FiniteSemimodule = F.global_sections(cover)
    X = frozenset().union(*cover.sets) if cover.sets is not None else "X"

    def r(g: int) -> int:
        return C.cochain(0, {(i,): F.restrict(X, cover.open((i,)), g) for i in range(cover.size)})

    images = [r(g) for g in G.values()]
    if len(set(images)) != G.size:
        raise SheafGluingError(f"distinct global sections of {F.name} restrict to the same family")
    missing = sorted(set(Z) - set(images))
    if missing:
        raise SheafGluingError(
            f"matching family does not glue for {F.name}",
            {"family": {str(t): c for t, c in C.components(0, missing[0]).items()}},
        )
    inverse = {z: g for g, z in enumerate(images)}

    def s(z: int) -> int:
        if z not in inverse:
            raise MembershipError(f"{z} is not a matching family")
        return inverse[z]

    checks["r_lands_in_cocycles"] = set(images) <= set(Z)
    checks["s_after_r_is_identity"] = all(s(r(g)) == g for g in G.values())
    checks["r_after_s_is_identity"] = all(r(s(z)) == z for z in Z)
    return H0Result(G, len(Z), True, r=r, s=s, checks=checks)


def _h0_projective(C: CechComplex, samples: Optional[int]) -> H0Result:
    """Global sections of O on P^n are the constants M"""
    F: StructureSheafPn = C.sheaf
    ring, nvars = F.ring, F.n + 1

    def r(q) -> Tuple:
        const = LaurentPoly.constant(ring, nvars, q)
        return C.cochain(0, {(i,): const for i in range(C.cover.size)})

    def s(y: Tuple):
        if not C.spaces[0].contains(y) or C.plus(0, y) != C.minus(0, y):
            raise SheafGluingError("family does not agree on overlaps", {"family": [repr(c) for c in y]})
        head = y[0]
        if head.is_zero():
            return ring.zero
        coef, exp = head.monomial_parts()
        if any(exp):
            raise SheafGluingError(f"glued section {head!r} is not constant")
        return coef

    # Z^0 forces all components to agree, so equal families over bounded monomials cover it
    bound = 1
    exps = [e for e in itertools.product(range(-bound, bound + 1), repeat=nvars) if sum(e) == 0]
    if ring.is_finite:
        scalars = [q for q in ring.values() if not ring.is_zero(q)]
        exhaustive = True
    else:
        rng = random.Random(settings.random_seed)
        scalars = [ring.random_unit(rng, settings.coefficient_bound) for _ in range(samples or 8)]
        exhaustive = False
        logger.warning("H0 maps over %s checked on %d sampled coefficients", ring.name, len(scalars))
    candidates = [LaurentPoly.zero(ring, nvars)]
    for e, q in itertools.product(exps, scalars):
        candidates.append(LaurentPoly.monomial(ring, e, q))
    for (e1, q1), (e2, q2) in itertools.combinations(list(itertools.product(exps, scalars[:2])), 2):
        candidates.append(LaurentPoly(ring, nvars, [(e1, q1), (e2, q2)]))
    glued = []
    for p in candidates:
        family = tuple(p for _ in range(C.cover.size))
        if C.spaces[0].contains(family) and C.plus(0, family) == C.minus(0, family):
            glued.append(family)
    values = list(ring.values()) if ring.is_finite else [ring.zero] + scalars
    checks = {
        "glued_sections_are_constant": all(y[0].is_zero() or (y[0].is_monomial() and not any(y[0].monomial_parts()[1])) for y in glued),
        "s_after_r_is_identity": all(s(r(q)) == q for q in values),
        "r_after_s_is_identity": all(r(s(y)) == y for y in glued),
        "rho0_is_equality": -1 not in C.spaces,
    }
    return H0Result(ring, len(glued), exhaustive, r=r, s=s, checks=checks)


def vanishing_bound(cover: Cover, F: SheafData, m: int) -> bool:
    """For m >= number of members the degree-m cochains form the empty product"""
    if m < cover.size:
        logger.info("degree %d is below the cover size %d; no vanishing claim", m, cover.size)
        return False
    C = build_cech(cover, F, max_degree=m)
    space = C.spaces[m]
    if F.finite:
        return not C.tuples[m] and space.size == 1
    return not C.tuples[m] and space.zero == ()


# Refinement

def refinement_morphism(
    fine: Cover,
    coarse: Cover,
    sigma: Sequence[int],
    F: SheafData,
    max_degree: Optional[int] = None,
    source: Optional[CechComplex] = None,
    target: Optional[CechComplex] = None,
) -> PMMorphism:
    """
    sigma^p(x)_J = x_sigma(J) restricted to V_J, from C(coarse, F) to C(fine, F).
    A tuple J whose image sigma(J) is not strictly increasing is accepted only
    when V_J is empty. Passing already built complexes lets refinements compose.
    """
    sigma = tuple(int(s) for s in sigma)
    if len(sigma) != fine.size or any(not 0 <= s < coarse.size for s in sigma):
        raise RefinementError(f"index map {list(sigma)} does not send {fine.size} members into {coarse.size}")
    for j, s in enumerate(sigma):
        if not coarse.contains(coarse.open((s,)), fine.open((j,))):
            raise RefinementError(f"V_{j} is not contained in U_{s}", {"j": j, "sigma_j": s})
    for role, C, cover in (("source", source, coarse), ("target", target, fine)):
        if C is not None and (C.cover is not cover or C.sheaf is not F):
            raise RefinementError(f"{role} complex {C.name} is not built on {cover.name} with {F.name}")
    top = max_degree if max_degree is not None else max(fine.size, coarse.size)
    source = source if source is not None else build_cech(coarse, F, top)
    target = target if target is not None else build_cech(fine, F, top)
    maps = {p: _refinement_component(source, target, sigma, p) for p in target.degrees if p in source.spaces}
    return PMMorphism(source, target, maps)


def _refinement_component(source: CechComplex, target: CechComplex, sigma: Chain, p: int) -> Callable[[Any], Any]:
    fine, coarse, F = target.cover, source.cover, source.sheaf
    for J in target.tuples[p]:
        image = tuple(sigma[j] for j in J)
        monotone = all(a < b for a, b in zip(image, image[1:]))
        if not monotone and not fine.is_empty(J):
            raise RefinementError(
                f"sigma{list(J)} = {list(image)} is not increasing on a nonempty V_J",
                {"J": list(J), "image": list(image)},
            )

    def apply(x: Any) -> Any:
        comps = source.components(p, x)
        values = {}
        for J in target.tuples[p]:
            image = tuple(sigma[j] for j in J)
            if all(a < b for a, b in zip(image, image[1:])):
                values[J] = F.restrict(coarse.open(image), fine.open(J), comps[image])
        return target.cochain(p, values)

    if not F.finite:
        return apply
    return SemimoduleHom(source.spaces[p], target.spaces[p], tuple(apply(x) for x in source.spaces[p].values()))
