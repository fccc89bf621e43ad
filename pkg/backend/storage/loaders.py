# backend/storage/loaders.py
"""
Document loaders - validated JSON documents to engine objects
"""

import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Type, TypeVar, Union

from pydantic import BaseModel, ValidationError

from backend.api.affine import MonomialLocalization, UnorderedCochain
from backend.api.cech import ConstantSheaf, Cover, FiniteSheafData, SheafData
from backend.api.errors import InputError, SemicechError
from backend.api.laurent import LaurentPoly
from backend.api.pm_complex import PMComplex, finite_complex
from backend.api.projective import ProjectiveSpace, UnitCocycle
from backend.api.semimodule import FiniteSemimodule
from backend.api.semiring_core import Semiring, builtin, semiring_from_dict
from backend.models.documents import (
    AffineDocument,
    ComplexDocument,
    CoverSheafDocument,
    LaurentDocument,
    SemimoduleDocument,
    SemiringDocument,
    SemiringRef,
    UnitCocycleDocument,
)

logger = logging.getLogger(__name__)

Model = TypeVar("Model", bound=BaseModel)


def read_document(path: Union[str, Path]) -> Dict[str, Any]:
    """Read a JSON file; parse errors carry the line and column"""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise InputError(f"cannot read {path}: {e.strerror}", {"path": str(path)})
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InputError(f"{path}:{e.lineno}:{e.colno}: {e.msg}", {"path": str(path), "line": e.lineno, "column": e.colno})
    logger.debug("read %s (%d bytes)", path, len(text))
    return doc


def validate(model: Type[Model], doc: Any) -> Model:
    try:
        return model.model_validate(doc)
    except ValidationError as e:
        first = e.errors()[0]
        location = ".".join(str(p) for p in first["loc"]) or "<root>"
        raise InputError(f"{model.__name__} at {location}: {first['msg']}", {"errors": e.errors(include_url=False)})


def compute_digest(payload: Any) -> str:
    """sha256 of the canonical JSON form of the inputs"""
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode()).hexdigest()


def load_semiring(ref: Optional[SemiringRef], default: str = "boolean") -> Semiring:
    if ref is None:
        return builtin(default)
    if isinstance(ref, str):
        return builtin(ref)
    if isinstance(ref, Mapping):
        ref = validate(SemiringDocument, ref)
    try:
        return semiring_from_dict(ref.model_dump(exclude_none=True))
    except SemicechError as e:
        raise InputError(f"semiring table rejected: {e.message}", e.detail)


def load_module(doc: SemimoduleDocument, ring: Semiring) -> FiniteSemimodule:
    if doc.ring is not None:
        own = load_semiring(doc.ring)
        if own != ring:
            raise InputError(f"module {doc.name} is over {own.name}, expected {ring.name}")
    return FiniteSemimodule(ring, doc.add, doc.scalar, doc.zero, name=doc.name)


def load_laurent(doc: LaurentDocument, ring: Semiring) -> LaurentPoly:
    terms = [(t.exp, ring.one if t.coef is None else ring.parse(t.coef)) for t in doc.terms]
    return LaurentPoly(ring, doc.vars, terms)


def load_complex(doc: Union[ComplexDocument, Mapping[str, Any]]) -> PMComplex:
    if not isinstance(doc, ComplexDocument):
        doc = validate(ComplexDocument, doc)
    ring = load_semiring(doc.ring)
    modules = [load_module(m, ring) for m in doc.modules]
    return finite_complex(modules, doc.d_plus, doc.d_minus, low=doc.low, name=doc.name)


def _chain_key(key: str) -> Tuple[int, ...]:
    """Strictly increasing member positions; '1,0' and '0,0' are rejected, never reordered"""
    try:
        chain = tuple(int(s) for s in key.split(",") if s.strip())
    except ValueError:
        raise InputError(f"{key!r} is not a comma separated index tuple")
    if any(a >= b for a, b in zip(chain, chain[1:])):
        raise InputError(f"index tuple {key!r} must be strictly increasing", {"key": key})
    return chain


def load_cover_sheaf(doc: Union[CoverSheafDocument, Mapping[str, Any]]) -> Tuple[Cover, SheafData]:
    if not isinstance(doc, CoverSheafDocument):
        doc = validate(CoverSheafDocument, doc)
    ring = load_semiring(doc.ring)
    cover = Cover(sets=doc.sets) if doc.sets is not None else Cover(count=len(doc.indices))
    if doc.constant is not None:
        return cover, ConstantSheaf(load_module(doc.constant, ring), name=doc.name)
    sections = {_chain_key(k): load_module(m, ring) for k, m in doc.sections.items()}
    restrictions = {}
    for key, table in doc.restrictions.items():
        if "<-" not in key:
            raise InputError(f"restriction key {key!r} must look like '0,1<-0'")
        dst, src = key.split("<-", 1)
        restrictions[(_chain_key(dst), _chain_key(src))] = table
    return cover, FiniteSheafData(ring, sections, restrictions, name=doc.name)


def load_cocycle(doc: Union[UnitCocycleDocument, Mapping[str, Any]], ring: Semiring) -> UnitCocycle:
    if not isinstance(doc, UnitCocycleDocument):
        doc = validate(UnitCocycleDocument, doc)
    X = ProjectiveSpace(doc.n, ring)
    entries = {}
    for key, entry in doc.entries.items():
        pair = _chain_key(key)
        if len(pair) != 2:
            raise InputError(f"cocycle key {key!r} is not a pair")
        if len(entry.exp) != X.nvars:
            raise InputError(f"exponent of f_{key} needs {X.nvars} entries")
        q = ring.one if entry.q is None else ring.parse(entry.q)
        entries[pair] = X.monomial(entry.exp, q)
    return UnitCocycle.from_mapping(X, entries)


def load_affine(doc: Union[AffineDocument, Mapping[str, Any]]) -> Tuple[MonomialLocalization, List[LaurentPoly], Optional[UnorderedCochain]]:
    if not isinstance(doc, AffineDocument):
        doc = validate(AffineDocument, doc)
    ring = load_semiring(doc.ring, default="qmax")
    A = MonomialLocalization.of(ring, doc.g)
    fs = [load_laurent(f, ring) for f in doc.fs]
    cochain = None
    if doc.cochain is not None:
        cochain = {}
        for key, value in doc.cochain.items():
            try:
                t = tuple(int(s) for s in key.split(","))
            except ValueError:
                raise InputError(f"{key!r} is not a comma separated index tuple")
            cochain[t] = load_laurent(value, ring)
    return A, fs, cochain
