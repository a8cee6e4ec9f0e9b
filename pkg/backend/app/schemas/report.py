# backend/app/schemas/report.py
from typing import Dict, List

from pydantic import BaseModel, ConfigDict, Field


class RelationCheckOut(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    relation: str
    context: str
    passed: bool = Field(..., alias="pass")


class EigenRowOut(BaseModel):
    word: str
    colors: List[str]
    multiplicity: int


class CharacterRowOut(BaseModel):
    word: str
    colors: List[str]
    multiplicity: int


class KTermOut(BaseModel):
    shape: List[List[List[int]]]
    coeff: str


class WeightOut(BaseModel):
    fund: Dict[str, int] = Field(default_factory=dict)
    roots: Dict[str, int] = Field(default_factory=dict)


class SemisimpleOut(BaseModel):
    semisimple: bool
    condition_1: bool
    condition_2: bool
    projective_equals_standard: bool
    reasons: List[str] = Field(default_factory=list)
