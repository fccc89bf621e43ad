# backend/models/documents.py
"""
Input documents - the JSON shapes accepted by the CLI and the HTTP service
"""

from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, model_validator

Literal_ = Union[str, int]


class SemiringDocument(BaseModel):
    """A finite semiring given by its tables"""
    size: Optional[int] = None
    zero: int = 0
    one: int = 1
    add: List[List[int]]
    mul: List[List[int]]
    name: str = "table"
    labels: Optional[List[str]] = None

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "size": 3,
                "zero": 0,
                "one": 2,
                "add": [[0, 1, 2], [1, 1, 2], [2, 2, 2]],
                "mul": [[0, 0, 0], [0, 1, 1], [0, 1, 2]],
            }
        }
    )

    @model_validator(mode="after")
    def check_shape(self):
        n = len(self.add)
        if self.size is not None and self.size != n:
            raise ValueError(f"size {self.size} does not match a {n}-row addition table")
        for table, label in ((self.add, "add"), (self.mul, "mul")):
            if len(table) != n or any(len(row) != n for row in table):
                raise ValueError(f"{label} must be a {n}x{n} table")
        return self


# A builtin tag ("boolean", "qmax", "zmax", "nat") or an explicit table
SemiringRef = Union[str, SemiringDocument]


class TermDocument(BaseModel):
    exp: List[int]
    coef: Optional[Literal_] = None  # the semiring one when omitted


class LaurentDocument(BaseModel):
    vars: int = Field(ge=1)
    terms: List[TermDocument] = []

    @model_validator(mode="after")
    def check_lengths(self):
        for term in self.terms:
            if len(term.exp) != self.vars:
                raise ValueError(f"exponent {term.exp} does not have {self.vars} entries")
        return self


class SemimoduleDocument(BaseModel):
    size: Optional[int] = None
    zero: int = 0
    add: List[List[int]]
    scalar: List[List[int]]
    ring: Optional[SemiringRef] = None
    name: str = "M"

    @model_validator(mode="after")
    def check_shape(self):
        n = len(self.add)
        if self.size is not None and self.size != n:
            raise ValueError(f"size {self.size} does not match a {n}-row addition table")
        if any(len(row) != n for row in self.add):
            raise ValueError(f"add must be a {n}x{n} table")
        if any(len(row) != n for row in self.scalar):
            raise ValueError(f"scalar rows must have {n} entries")
        return self


class ComplexDocument(BaseModel):
    """A finite +- complex: spaces in consecutive degrees and image tables of d+ and d-"""
    ring: SemiringRef = "boolean"
    low: int = 0
    modules: List[SemimoduleDocument] = Field(min_length=1)
    d_plus: List[List[int]] = []
    d_minus: List[List[int]] = []
    name: str = "X"

    @model_validator(mode="after")
    def check_pairs(self):
        expected = len(self.modules) - 1
        if len(self.d_plus) != expected or len(self.d_minus) != expected:
            raise ValueError(f"{len(self.modules)} spaces need {expected} tables in d_plus and in d_minus")
        return self


class CoverSheafDocument(BaseModel):
    """
    Either a constant sheaf on a cover by point sets, or explicit finite sheaf
    data keyed by tuples ("0,1") with restrictions keyed "0,1<-0".
    """
    ring: SemiringRef = "boolean"
    indices: Optional[List[int]] = None
    sets: Optional[List[List[Literal_]]] = None
    constant: Optional[SemimoduleDocument] = None
    sections: Dict[str, SemimoduleDocument] = {}
    restrictions: Dict[str, List[int]] = {}
    name: str = "F"

    @model_validator(mode="after")
    def check_cover(self):
        if (self.indices is None) == (self.sets is None):
            raise ValueError("give exactly one of 'indices' or 'sets'")
        if self.constant is None and not self.sections:
            raise ValueError("give a 'constant' module or explicit 'sections'")
        if self.constant is not None and self.sections:
            raise ValueError("'constant' and 'sections' are exclusive")
        return self


class CocycleEntryDocument(BaseModel):
    q: Optional[Literal_] = None
    exp: List[int]


class UnitCocycleDocument(BaseModel):
    n: int = Field(ge=1)
    entries: Dict[str, CocycleEntryDocument]


class AffineDocument(BaseModel):
    """A monomial localization M[x_0..x_r]_g, a family fs and an optional unordered cochain"""
    ring: SemiringRef = "qmax"
    g: List[int]
    fs: List[LaurentDocument] = Field(min_length=1)
    degree: int = 1
    cochain: Optional[Dict[str, LaurentDocument]] = None

    model_config = ConfigDict(
        json_schema_extra={
            "example": {
                "ring": "qmax",
                "g": [1, 1],
                "fs": [
                    {"vars": 2, "terms": [{"exp": [-1, 1], "coef": "0"}]},
                    {"vars": 2, "terms": [{"exp": [2, 0], "coef": "0"}]},
                ],
                "degree": 1,
            }
        }
    )


class TensorDocument(BaseModel):
    """Operands of the tensor commands; golan takes one module or a builtin tag"""
    ring: SemiringRef = "boolean"
    modules: List[SemimoduleDocument] = []
    builtin: Optional[str] = None


class PrimesDocument(BaseModel):
    semiring: SemiringRef
