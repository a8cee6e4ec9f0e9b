"""
Combinatorics Service - multipartitions, contents, paths and standard characters
Obrauer - Cyclotomic Oriented Brauer Engine

Boxes use 1-based (component, row, column). A path starts at the empty
bipartition and adds or removes one box per step. Adding to the up side or
removing from the down side reads as ``u``; the other two moves read as ``d``.
"""

import json
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from math import factorial
from typing import Any, Dict, Iterator, List, Optional, Tuple

import structlog

from app.core.exceptions import ParameterError
from app.services.ground import Params
from app.services.words import ClassIndex

logger = structlog.get_logger()

Partition = Tuple[int, ...]
TypeKey = Tuple[str, Tuple[Any, ...]]


class Side(str, Enum):
    UP = "up"
    DOWN = "down"


class StepKind(str, Enum):
    ADD = "add"
    REMOVE = "remove"


@dataclass(frozen=True, order=True)
class Multipartition:
    components: Tuple[Partition, ...]

    @classmethod
    def empty(cls, level: int) -> "Multipartition":
        return cls(tuple(() for _ in range(level)))

    @property
    def level(self) -> int:
        return len(self.components)

    @property
    def size(self) -> int:
        return sum(sum(part) for part in self.components)

    def boxes(self) -> List[Tuple[int, int, int]]:
        return [
            (j + 1, row + 1, col + 1)
            for j, part in enumerate(self.components)
            for row, length in enumerate(part)
            for col in range(length)
        ]

    def addable(self) -> List[Tuple[int, int, int]]:
        out = []
        for j, part in enumerate(self.components):
            for row in range(len(part) + 1):
                length = part[row] if row < len(part) else 0
                if row == 0 or part[row - 1] > length:
                    out.append((j + 1, row + 1, length + 1))
        return out

    def removable(self) -> List[Tuple[int, int, int]]:
        out = []
        for j, part in enumerate(self.components):
            for row, length in enumerate(part):
                if row + 1 == len(part) or part[row + 1] < length:
                    out.append((j + 1, row + 1, length))
        return out

    def with_box(self, component: int, row: int, delta: int) -> "Multipartition":
        parts = [list(part) for part in self.components]
        part = parts[component - 1]
        if row > len(part):
            part.append(0)
        part[row - 1] += delta
        parts[component - 1] = [x for x in part if x > 0]
        return Multipartition(tuple(tuple(part) for part in parts))

    def to_list(self) -> List[List[int]]:
        return [list(part) for part in self.components]


@dataclass(frozen=True, order=True)
class Bipartition:
    down: Multipartition
    up: Multipartition

    @classmethod
    def empty(cls, level: int) -> "Bipartition":
        return cls(Multipartition.empty(level), Multipartition.empty(level))

    @property
    def level(self) -> int:
        return self.up.level

    @property
    def size(self) -> int:
        return self.down.size + self.up.size

    @property
    def class_index(self) -> ClassIndex:
        return ClassIndex(r=self.down.size, s=self.up.size)

    def side(self, side: Side) -> Multipartition:
        return self.up if side == Side.UP else self.down

    def replace(self, side: Side, shape: Multipartition) -> "Bipartition":
        if side == Side.UP:
            return Bipartition(self.down, shape)
        return Bipartition(shape, self.up)

    def to_list(self) -> List[List[List[int]]]:
        return [self.down.to_list(), self.up.to_list()]

    def __str__(self) -> str:
        return json.dumps(self.to_list(), separators=(",", ":"))


@dataclass(frozen=True)
class Box:
    side: Side
    component: int
    row: int
    column: int

    def to_dict(self) -> Dict[str, Any]:
        return {
            "side": self.side.value,
            "component": self.component,
            "row": self.row,
            "column": self.column,
        }


@dataclass(frozen=True)
class Step:
    kind: StepKind
    box: Box

    @property
    def letter(self) -> str:
        adds_up = self.kind == StepKind.ADD and self.box.side == Side.UP
        removes_down = self.kind == StepKind.REMOVE and self.box.side == Side.DOWN
        return "u" if adds_up or removes_down else "d"


@dataclass(frozen=True)
class Path:
    steps: Tuple[Step, ...]
    word: str
    colors: Tuple[Any, ...]

    def to_dict(self, params: Params) -> Dict[str, Any]:
        return {
            "word": self.word,
            "colors": [params.fmt(c) for c in self.colors],
            "steps": [{"kind": s.kind.value, **s.box.to_dict()} for s in self.steps],
        }


def content(box: Box, params: Params) -> Any:
    """u_j + k - l on the up side, u'_j - k + l on the down side."""
    if not 1 <= box.component <= params.level:
        raise ParameterError(f"component {box.component} out of range for level {params.level}")
    shift = params.scalar(box.column - box.row)
    if box.side == Side.UP:
        return params.u[box.component - 1] + shift
    return params.uprime[box.component - 1] - shift


def _moves(shape: Bipartition) -> Iterator[Tuple[Step, Bipartition]]:
    for side in (Side.UP, Side.DOWN):
        part = shape.side(side)
        for j, row, col in part.addable():
            step = Step(StepKind.ADD, Box(side, j, row, col))
            yield step, shape.replace(side, part.with_box(j, row, 1))
        for j, row, col in part.removable():
            step = Step(StepKind.REMOVE, Box(side, j, row, col))
            yield step, shape.replace(side, part.with_box(j, row, -1))


def addable_removable(shape: Bipartition, residue: Any, params: Params) -> Dict[str, Dict]:
    """Boxes of content ``residue`` addable to or removable from each side."""
    report = {}
    for side in (Side.UP, Side.DOWN):
        part = shape.side(side)
        addables = [Box(side, *b) for b in part.addable()]
        removables = [Box(side, *b) for b in part.removable()]
        report[side.value] = {
            "addable": [b for b in addables if content(b, params) == residue],
            "removable": [b for b in removables if content(b, params) == residue],
        }
    return report


def _hook_count(part: Partition) -> int:
    n = sum(part)
    if n == 0:
        return 1
    conj = [sum(1 for length in part if length > col) for col in range(part[0])]
    hooks = 1
    for row, length in enumerate(part):
        for col in range(length):
            hooks *= (length - col - 1) + (conj[col] - row - 1) + 1
    return factorial(n) // hooks


def syt_count(shape: Multipartition) -> int:
    """Standard tableaux of a multipartition: interleavings times hook-length counts."""
    total = factorial(shape.size)
    for part in shape.components:
        total //= factorial(sum(part))
    for part in shape.components:
        total *= _hook_count(part)
    return total


def _box_set(shape: Bipartition) -> set:
    down = {(Side.DOWN, *b) for b in shape.down.boxes()}
    return down | {(Side.UP, *b) for b in shape.up.boxes()}


def distance(a: Bipartition, b: Bipartition) -> int:
    """Fewest single-box moves between two bipartitions."""
    return len(_box_set(a) ^ _box_set(b))


def paths_to(target: Bipartition, length: int, params: Params) -> List[Path]:
    """Every path of ``length`` steps from the empty bipartition to ``target``."""
    if length < target.size or (length - target.size) % 2:
        return []
    found: List[Path] = []

    def walk(shape: Bipartition, steps: List[Step], colors: List[Any]) -> None:
        remaining = length - len(steps)
        if remaining == 0:
            if shape == target:
                word = "".join(s.letter for s in steps)
                found.append(Path(tuple(steps), word, tuple(colors)))
            return
        for step, nxt in _moves(shape):
            if distance(nxt, target) > remaining - 1:
                continue
            steps.append(step)
            colors.append(content(step.box, params))
            walk(nxt, steps, colors)
            steps.pop()
            colors.pop()

    walk(Bipartition.empty(params.level), [], [])
    return found


def _type_counts(target: Bipartition, max_length: int, params: Params) -> List[Counter]:
    """Path counts grouped by type, indexed by path length 0..max_length."""
    layer: Dict[Bipartition, Counter] = {Bipartition.empty(params.level): Counter({("", ()): 1})}
    by_length = []
    for step_count in range(max_length + 1):
        by_length.append(Counter(layer.get(target, Counter())))
        if step_count == max_length:
            break
        remaining = max_length - step_count - 1
        nxt: Dict[Bipartition, Counter] = {}
        for shape, types in layer.items():
            for step, moved in _moves(shape):
                if distance(moved, target) > remaining:
                    continue
                color = content(step.box, params)
                bucket = nxt.setdefault(moved, Counter())
                for (word, colors), count in types.items():
                    bucket[(word + step.letter, colors + (color,))] += count
        layer = nxt
    return by_length


def path_counts_by_type(target: Bipartition, length: int, params: Params) -> Dict[TypeKey, int]:
    """Counts of paths with exactly ``length`` steps, keyed by (word, colors)."""
    return dict(_type_counts(target, length, params)[length])


def character_std(target: Bipartition, max_length: int, params: Params) -> Dict[TypeKey, int]:
    """Character of the standard module: path counts by type for all lengths up to max_length."""
    total: Counter = Counter()
    for counts in _type_counts(target, max_length, params):
        total.update(counts)
    logger.debug("character_computed", shape=str(target), max_length=max_length, size=len(total))
    return dict(total)


def character_by_word(character: Dict[TypeKey, int], word: str) -> Dict[Tuple[Any, ...], int]:
    return {colors: count for (w, colors), count in character.items() if w == word}


@lru_cache(maxsize=None)
def partitions(n: int, largest: Optional[int] = None) -> Tuple[Partition, ...]:
    """Partitions of n in reverse lexicographic order."""
    if n == 0:
        return ((),)
    largest = n if largest is None else largest
    out = []
    for first in range(min(n, largest), 0, -1):
        for rest in partitions(n - first, first):
            out.append((first,) + rest)
    return tuple(out)


def multipartitions(n: int, level: int) -> List[Multipartition]:
    if level == 1:
        return [Multipartition((p,)) for p in partitions(n)]
    out = []
    for k in range(n, -1, -1):
        for head in partitions(k):
            for tail in multipartitions(n - k, level - 1):
                out.append(Multipartition((head,) + tail.components))
    return out


def bipartitions_of_size(n: int, level: int) -> List[Bipartition]:
    """Bipartitions with n boxes in total, ordered by the size of the down side."""
    out = []
    for r in range(n + 1):
        for down in multipartitions(r, level):
            for up in multipartitions(n - r, level):
                out.append(Bipartition(down, up))
    return out


def all_bipartitions(max_total: int, level: int) -> List[Bipartition]:
    return [b for n in range(max_total + 1) for b in bipartitions_of_size(n, level)]


def _generic(params: Params) -> bool:
    if params.char:
        return False
    charges = params.u + params.uprime
    for i, a in enumerate(charges):
        for b in charges[i + 1 :]:
            if int((a - b).denominator) == 1:
                return False
    return True


def is_restricted(shape: Multipartition, params: Params) -> Optional[bool]:
    """Restrictedness when it is decidable here; None otherwise.

    Level one uses e-restricted partitions with e the characteristic (no bound in
    characteristic zero). The generic regime makes every shape restricted.
    """
    if params.level == 1:
        if params.char == 0:
            return True
        part = shape.components[0]
        rows = list(part) + [0]
        return all(rows[i] - rows[i + 1] < params.char for i in range(len(part)))
    if _generic(params):
        return True
    return None


def _parse_multipartition(raw: Any, level: int) -> Multipartition:
    if raw in (None, [], "empty", "-"):
        return Multipartition.empty(level)
    if not isinstance(raw, list):
        raise ParameterError(f"cannot read multipartition from {raw!r}")
    if level == 1 and all(isinstance(x, int) for x in raw):
        raw = [raw]
    if len(raw) != level:
        raise ParameterError(f"expected {level} components, got {len(raw)}")
    parts = []
    for part in raw:
        if not isinstance(part, list) or not all(isinstance(x, int) and x > 0 for x in part):
            raise ParameterError(f"components must be lists of positive integers, got {part!r}")
        if list(part) != sorted(part, reverse=True):
            raise ParameterError(f"component {part!r} is not weakly decreasing")
        parts.append(tuple(part))
    return Multipartition(tuple(parts))


def parse_shape(text: Any, level: int) -> Bipartition:
    """Read ``empty``, ``[down, up]`` or ``{"down": ..., "up": ...}``."""
    if text is None or (isinstance(text, str) and text.strip() in ("", "-", "empty", "∅")):
        return Bipartition.empty(level)
    data = text
    if isinstance(text, str):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParameterError(f"shape is not valid JSON: {text!r}") from exc
    if isinstance(data, dict):
        data = [data.get("down"), data.get("up")]
    if not isinstance(data, list) or len(data) != 2:
        raise ParameterError("shape must be a pair [down, up]")
    return Bipartition(_parse_multipartition(data[0], level), _parse_multipartition(data[1], level))
