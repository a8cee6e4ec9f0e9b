"""
Diagrams Service - normally ordered dotted oriented Brauer diagrams
Obrauer - Cyclotomic Oriented Brauer Engine

An endpoint is ``("B", i)`` on the bottom (source) boundary or ``("T", j)`` on the
top (target) boundary. A diagram records the matching of endpoints together with
the number of dots each strand carries at its normal position.
"""

from dataclasses import dataclass
from enum import Enum
from itertools import product
from math import factorial
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

import structlog

from app.core.exceptions import DiagramError, SizeLimitError
from app.services.words import ClassIndex, check_word

logger = structlog.get_logger()

Endpoint = Tuple[str, int]
Pair = Tuple[Endpoint, Endpoint]

BOTTOM = "B"
TOP = "T"


class StrandKind(str, Enum):
    CUP = "cup"
    CAP = "cap"
    VERT_UP = "vert_up"
    VERT_DOWN = "vert_down"


class SubsetKind(str, Enum):
    Y = "Y"
    H = "H"
    X = "X"


@dataclass(frozen=True, order=True)
class NormalDiagram:
    src: str
    dst: str
    pairs: Tuple[Pair, ...]
    dots: Tuple[int, ...]

    def letter(self, endpoint: Endpoint) -> str:
        side, idx = endpoint
        return self.src[idx] if side == BOTTOM else self.dst[idx]

    def kind(self, index: int) -> StrandKind:
        (s1, i1), (s2, _) = self.pairs[index]
        if s1 == s2:
            return StrandKind.CAP if s1 == BOTTOM else StrandKind.CUP
        return StrandKind.VERT_UP if self.src[i1] == "u" else StrandKind.VERT_DOWN

    def strands(self) -> List[Tuple[Pair, int, StrandKind]]:
        return [
            (pair, dots, self.kind(i)) for i, (pair, dots) in enumerate(zip(self.pairs, self.dots))
        ]

    @property
    def total_dots(self) -> int:
        return sum(self.dots)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "src": self.src,
            "dst": self.dst,
            "pairs": [[list(e1), list(e2)] for e1, e2 in self.pairs],
            "dots": list(self.dots),
        }

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "NormalDiagram":
        try:
            pairs = [
                ((str(e1[0]), int(e1[1])), (str(e2[0]), int(e2[1]))) for e1, e2 in data["pairs"]
            ]
            dots = [int(x) for x in data.get("dots", [0] * len(pairs))]
            return make_diagram(data["src"], data["dst"], pairs, dots)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise DiagramError(f"malformed diagram record: {exc}") from exc


def _compatible(src: str, dst: str, e1: Endpoint, e2: Endpoint) -> bool:
    l1 = src[e1[1]] if e1[0] == BOTTOM else dst[e1[1]]
    l2 = src[e2[1]] if e2[0] == BOTTOM else dst[e2[1]]
    return (l1 != l2) if e1[0] == e2[0] else (l1 == l2)


def make_diagram(
    src: str, dst: str, pairs: Iterable[Pair], dots: Optional[Sequence[int]] = None
) -> NormalDiagram:
    """Validate and canonicalize: endpoints sorted inside each pair, pairs sorted."""
    check_word(src)
    check_word(dst)
    pairs = [tuple(p) for p in pairs]
    dots = list(dots) if dots is not None else [0] * len(pairs)
    if len(dots) != len(pairs):
        raise DiagramError("dots must be aligned with pairs")

    expected = {(BOTTOM, i) for i in range(len(src))} | {(TOP, j) for j in range(len(dst))}
    seen = set()
    entries = []
    for (e1, e2), count in zip(pairs, dots):
        e1, e2 = tuple(e1), tuple(e2)
        for e in (e1, e2):
            if e not in expected:
                raise DiagramError(f"endpoint {e} does not exist on {src!r} -> {dst!r}")
            if e in seen:
                raise DiagramError(f"endpoint {e} is matched twice")
            seen.add(e)
        if not _compatible(src, dst, e1, e2):
            raise DiagramError(f"pair {e1}-{e2} is not orientation-compatible")
        if count < 0:
            raise DiagramError("dot counts must be non-negative")
        entries.append((tuple(sorted((e1, e2))), count))
    if seen != expected:
        raise DiagramError("every endpoint must be matched exactly once")

    entries.sort()
    return NormalDiagram(
        src=src,
        dst=dst,
        pairs=tuple(pair for pair, _ in entries),
        dots=tuple(count for _, count in entries),
    )


def check_dots(diagram: NormalDiagram, level: int) -> NormalDiagram:
    if any(count >= level for count in diagram.dots):
        raise DiagramError(f"dot counts must be below the level {level}")
    return diagram


def identity_diagram(word: str) -> NormalDiagram:
    return make_diagram(word, word, [((BOTTOM, i), (TOP, i)) for i in range(len(word))])


def hom_dim(src: str, dst: str, level: int) -> int:
    """Closed-form count of the basis of Hom(src, dst)."""
    check_word(src)
    check_word(dst)
    sources = src.count("u") + dst.count("d")
    sinks = src.count("d") + dst.count("u")
    if sources != sinks:
        return 0
    return factorial(sources) * level**sources


def _matchings(ends: List[Endpoint], src: str, dst: str) -> Iterable[List[Pair]]:
    if not ends:
        yield []
        return
    first, rest = ends[0], ends[1:]
    for k, other in enumerate(rest):
        if _compatible(src, dst, first, other):
            for tail in _matchings(rest[:k] + rest[k + 1 :], src, dst):
                yield [(first, other)] + tail


def enumerate_basis(
    src: str, dst: str, level: int, size_limit: Optional[int] = None
) -> List[NormalDiagram]:
    """Every normally ordered dotted diagram src -> dst, sorted."""
    check_word(src)
    check_word(dst)
    if size_limit is not None and max(len(src), len(dst)) > size_limit:
        raise SizeLimitError(
            f"words of length {max(len(src), len(dst))} exceed the size limit {size_limit}"
        )
    if hom_dim(src, dst, level) == 0:
        return []
    ends = [(BOTTOM, i) for i in range(len(src))] + [(TOP, j) for j in range(len(dst))]
    basis = []
    for matching in _matchings(ends, src, dst):
        for dots in product(range(level), repeat=len(matching)):
            basis.append(make_diagram(src, dst, matching, dots))
    basis.sort()
    logger.debug("basis_enumerated", src=src, dst=dst, size=len(basis))
    return basis


def _verticals(diagram: NormalDiagram) -> List[Tuple[int, int, int]]:
    out = []
    for (e1, e2), count in zip(diagram.pairs, diagram.dots):
        if e1[0] == BOTTOM and e2[0] == TOP:
            out.append((e1[1], e2[1], count))
    return out


def has_crossing_verticals(diagram: NormalDiagram) -> bool:
    verticals = _verticals(diagram)
    for b1, t1, _ in verticals:
        for b2, t2, _ in verticals:
            if b1 < b2 and t1 > t2:
                return True
    return False


def in_subset(diagram: NormalDiagram, kind: SubsetKind) -> bool:
    kinds = {diagram.kind(i) for i in range(len(diagram.pairs))}
    has_cup = StrandKind.CUP in kinds
    has_cap = StrandKind.CAP in kinds
    if kind == SubsetKind.H:
        return not has_cup and not has_cap
    vertical_dots = any(count for _, _, count in _verticals(diagram))
    if kind == SubsetKind.Y:
        return not has_cap and not has_crossing_verticals(diagram) and not vertical_dots
    return not has_cup and not has_crossing_verticals(diagram) and not vertical_dots


def enumerate_yhx(
    kind: SubsetKind, a: str, b: str, level: int, size_limit: Optional[int] = None
) -> List[NormalDiagram]:
    """The Y, H or X diagrams in Hom(b, a)."""
    return [d for d in enumerate_basis(b, a, level, size_limit) if in_subset(d, SubsetKind(kind))]


def vertical_class(diagram: NormalDiagram) -> ClassIndex:
    r = sum(1 for i in range(len(diagram.pairs)) if diagram.kind(i) == StrandKind.VERT_DOWN)
    s = sum(1 for i in range(len(diagram.pairs)) if diagram.kind(i) == StrandKind.VERT_UP)
    return ClassIndex(r=r, s=s)


def tau(diagram: NormalDiagram) -> NormalDiagram:
    """Reflect top to bottom; orientations and dot counts are kept."""
    flip = {BOTTOM: TOP, TOP: BOTTOM}
    pairs = [((flip[s1], i1), (flip[s2], i2)) for (s1, i1), (s2, i2) in diagram.pairs]
    return make_diagram(diagram.dst, diagram.src, pairs, diagram.dots)


def tensor_diagrams(left: NormalDiagram, right: NormalDiagram) -> NormalDiagram:
    shift = {BOTTOM: len(left.src), TOP: len(left.dst)}
    pairs = list(left.pairs)
    pairs += [((s1, i1 + shift[s1]), (s2, i2 + shift[s2])) for (s1, i1), (s2, i2) in right.pairs]
    return make_diagram(
        left.src + right.src, left.dst + right.dst, pairs, list(left.dots) + list(right.dots)
    )
