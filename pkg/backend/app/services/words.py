"""
Words Service - orientation words, class indices and the class order
Obrauer - Cyclotomic Oriented Brauer Engine

A word is a string over ``u`` (up) and ``d`` (down).
"""

from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from math import comb
from typing import List, Optional

import structlog

from app.core.exceptions import SizeLimitError, WordError

logger = structlog.get_logger()

LETTERS = "ud"


class Orientation(str, Enum):
    UP = "u"
    DOWN = "d"

    @property
    def flipped(self) -> "Orientation":
        return Orientation.DOWN if self == Orientation.UP else Orientation.UP


@dataclass(frozen=True, order=True)
class ClassIndex:
    """(number of down letters, number of up letters)."""

    r: int
    s: int

    @property
    def size(self) -> int:
        return self.r + self.s

    def to_dict(self) -> dict:
        return {"r": self.r, "s": self.s}


def check_word(word: str) -> str:
    if not isinstance(word, str) or any(ch not in LETTERS for ch in word):
        raise WordError(f"word must be a string over 'u' and 'd', got {word!r}")
    return word


def parse_word(text: Optional[str]) -> str:
    """CLI spelling: ``-``, ``empty`` or an empty string stand for the empty word."""
    if text is None:
        return ""
    body = text.strip()
    if body in ("", "-", "empty", "∅"):
        return ""
    body = body.replace("↑", "u").replace("↓", "d")
    return check_word(body)


def class_of(word: str) -> ClassIndex:
    check_word(word)
    return ClassIndex(r=word.count("d"), s=word.count("u"))


def order_leq(x: ClassIndex, y: ClassIndex) -> bool:
    """x precedes y when x is y with the same number of up and down letters cancelled."""
    k = x.r - y.r
    return k >= 0 and x.s - y.s == k


def upset(x: ClassIndex) -> List[ClassIndex]:
    return [ClassIndex(x.r - k, x.s - k) for k in range(min(x.r, x.s) + 1)]


def class_size(x: ClassIndex) -> int:
    return comb(x.r + x.s, x.r)


def words_in_class(x: ClassIndex, size_limit: Optional[int] = None) -> List[str]:
    """All words of the class, sorted."""
    if x.r < 0 or x.s < 0:
        raise WordError(f"class index must be non-negative, got {x}")
    n = x.r + x.s
    if size_limit is not None and n > size_limit:
        raise SizeLimitError(f"class ({x.r},{x.s}) has words of length {n} > {size_limit}")
    words = []
    for down_positions in combinations(range(n), x.r):
        letters = ["u"] * n
        for pos in down_positions:
            letters[pos] = "d"
        words.append("".join(letters))
    words.sort()
    return words


def sigma(a: str, b: str):
    """The crossing-only diagram b -> a joining the k-th up letters and the k-th down letters."""
    from app.services.diagrams import make_diagram

    if class_of(a) != class_of(b):
        raise WordError(f"words {a!r} and {b!r} lie in different classes")
    pairs = []
    for letter in LETTERS:
        bottom = [i for i, ch in enumerate(b) if ch == letter]
        top = [j for j, ch in enumerate(a) if ch == letter]
        for i, j in zip(bottom, top):
            pairs.append((("B", i), ("T", j)))
    return make_diagram(b, a, pairs, [0] * len(pairs))
