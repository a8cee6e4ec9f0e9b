# backend/app/schemas/diagram.py
from typing import Any, Dict, List, Tuple

from pydantic import BaseModel, Field, field_validator

from app.services.words import LETTERS


def _word(v: Any) -> str:
    if v is None:
        return ""
    if not isinstance(v, str) or any(ch not in LETTERS for ch in v):
        raise ValueError("words are strings over 'u' and 'd'")
    return v


# ============== Diagram Schemas ==============

class DiagramIn(BaseModel):
    src: str = ""
    dst: str = ""
    pairs: List[Tuple[Tuple[str, int], Tuple[str, int]]]
    dots: List[int] = Field(default_factory=list)

    @field_validator("src", "dst", mode="before")
    @classmethod
    def check_word(cls, v):
        return _word(v)

    @field_validator("dots")
    @classmethod
    def non_negative(cls, v):
        if any(x < 0 for x in v):
            raise ValueError("dot counts must be non-negative")
        return v


class LayerIn(BaseModel):
    position: int = Field(..., ge=0)
    generator: str


class LayerWordIn(BaseModel):
    src: str = ""
    layers: List[LayerIn] = Field(default_factory=list)

    @field_validator("src", mode="before")
    @classmethod
    def check_word(cls, v):
        return _word(v)


class TermIn(BaseModel):
    diagram: DiagramIn
    coeff: str = "1"

    @field_validator("coeff", mode="before")
    @classmethod
    def as_text(cls, v):
        return str(v)


class MorphismIn(BaseModel):
    src: str = ""
    dst: str = ""
    terms: List[TermIn] = Field(default_factory=list)

    @field_validator("src", "dst", mode="before")
    @classmethod
    def check_word(cls, v):
        return _word(v)


# ============== Output Schemas ==============

class TermOut(BaseModel):
    diagram: Dict[str, Any]
    coeff: str


class MorphismOut(BaseModel):
    src: str
    dst: str
    terms: List[TermOut]
