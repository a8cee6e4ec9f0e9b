"""
Planar Rewriting Core
Obrauer - Cyclotomic Oriented Brauer Engine

A planar diagram is a stack of cup, cap and crossing layers over a source word with
dots recorded per (gap, position). Gap g lies below layer g, so gap 0 is the bottom
boundary and gap n (n = number of layers) the top boundary.

Normalization walks every strand in its direction of travel, slides dots to the
outward end of open strands and to a single left-edge point on closed loops, applies
the cyclotomic relations at the left edge and replaces loops by bubble scalars.
"""

import threading
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Iterable, List, NamedTuple, Optional, Tuple

import structlog

from app.core.exceptions import CompositionError
from app.core.metrics import CACHE_HITS_TOTAL, CORRECTIONS_TOTAL, NORMALIZATIONS_TOTAL
from app.services.diagrams import BOTTOM, TOP, NormalDiagram, make_diagram
from app.services.ground import Params, bubble_value, cyclo_poly
from app.services.words import Orientation, check_word

logger = structlog.get_logger()

Point = Tuple[int, int]


class Gen(str, Enum):
    CUP_R = "cupR"
    CAP_R = "capR"
    CUP_L = "cupL"
    CAP_L = "capL"
    CROSS_UU = "crossUU"
    CROSS_DD = "crossDD"
    CROSS_UD = "crossUD"
    CROSS_DU = "crossDU"
    DOT_UP = "dotUp"
    DOT_DOWN = "dotDown"


# letters created by a cup, consumed by a cap, read by a crossing or a dot
CUPS = {Gen.CUP_R: "ud", Gen.CUP_L: "du"}
CAPS = {Gen.CAP_R: "du", Gen.CAP_L: "ud"}
CROSSINGS = {Gen.CROSS_UU: "uu", Gen.CROSS_DD: "dd", Gen.CROSS_UD: "ud", Gen.CROSS_DU: "du"}
DOTS = {Gen.DOT_UP: "u", Gen.DOT_DOWN: "d"}

CUP_FOR = {letters: gen for gen, letters in CUPS.items()}
CAP_FOR = {letters: gen for gen, letters in CAPS.items()}
CROSSING_FOR = {letters: gen for gen, letters in CROSSINGS.items()}
DOT_FOR = {letters: gen for gen, letters in DOTS.items()}


@dataclass(frozen=True)
class Layer:
    position: int
    generator: Gen

    def shifted(self, offset: int) -> "Layer":
        return Layer(self.position + offset, self.generator)

    def to_dict(self) -> Dict[str, Any]:
        return {"position": self.position, "generator": self.generator.value}


def apply_layer(word: str, layer: Layer) -> str:
    """The word above ``layer`` when ``word`` is below it."""
    gen, p = Gen(layer.generator), layer.position
    if p < 0:
        raise CompositionError(f"negative position in layer {layer}")
    if gen in DOTS:
        if p >= len(word) or word[p] != DOTS[gen]:
            raise CompositionError(f"{gen.value} at {p} does not fit {word!r}")
        return word
    if gen in CUPS:
        if p > len(word):
            raise CompositionError(f"{gen.value} at {p} does not fit {word!r}")
        return word[:p] + CUPS[gen] + word[p:]
    expected = CROSSINGS.get(gen) or CAPS[gen]
    if word[p : p + 2] != expected:
        raise CompositionError(f"{gen.value} at {p} does not fit {word!r}")
    if gen in CAPS:
        return word[:p] + word[p + 2 :]
    return word[:p] + word[p + 1] + word[p] + word[p + 2 :]


def crossing_at(word: str, position: int) -> Layer:
    letters = word[position : position + 2]
    if len(letters) != 2:
        raise CompositionError(f"no crossing at {position} on {word!r}")
    return Layer(position, CROSSING_FOR[letters])


def dot_at(word: str, position: int) -> Layer:
    if not 0 <= position < len(word):
        raise CompositionError(f"no strand at {position} on {word!r}")
    return Layer(position, DOT_FOR[word[position]])


@dataclass(frozen=True)
class LayerWord:
    """Generators listed bottom to top, starting from ``src``."""

    src: str
    layers: Tuple[Layer, ...] = ()

    def words(self) -> List[str]:
        check_word(self.src)
        words = [self.src]
        for layer in self.layers:
            words.append(apply_layer(words[-1], layer))
        return words

    @property
    def dst(self) -> str:
        return self.words()[-1]

    def then(self, *layers: Layer) -> "LayerWord":
        return LayerWord(self.src, self.layers + tuple(layers))

    def to_dict(self) -> Dict[str, Any]:
        return {"src": self.src, "layers": [layer.to_dict() for layer in self.layers]}


def skeleton_words(src: str, layers: Iterable[Layer]) -> List[str]:
    words = [src]
    for layer in layers:
        words.append(apply_layer(words[-1], layer))
    return words


@dataclass(frozen=True)
class PlanarDiagram:
    """Hashable key: skeleton layers plus dots as sorted (gap, position, count)."""

    src: str
    layers: Tuple[Layer, ...]
    dots: Tuple[Tuple[int, int, int], ...] = ()

    @classmethod
    def from_layer_word(cls, layer_word: LayerWord) -> "PlanarDiagram":
        check_word(layer_word.src)
        skeleton: List[Layer] = []
        dots: Dict[Point, int] = {}
        word = layer_word.src
        for layer in layer_word.layers:
            word = apply_layer(word, layer)
            if Gen(layer.generator) in DOTS:
                key = (len(skeleton), layer.position)
                dots[key] = dots.get(key, 0) + 1
            else:
                skeleton.append(layer)
        return cls(
            layer_word.src,
            tuple(skeleton),
            tuple(sorted((g, p, k) for (g, p), k in dots.items())),
        )


class _Sketch:
    """Mutable working copy of a planar diagram."""

    __slots__ = ("src", "layers", "dots", "words")

    def __init__(self, src: str, layers, dots: Dict[Point, int], words=None):
        self.src = src
        self.layers = list(layers)
        self.dots = {point: k for point, k in dots.items() if k}
        self.words = list(words) if words is not None else skeleton_words(src, self.layers)

    @classmethod
    def thaw(cls, diagram: PlanarDiagram) -> "_Sketch":
        return cls(diagram.src, diagram.layers, {(g, p): k for g, p, k in diagram.dots})

    @property
    def height(self) -> int:
        return len(self.layers)

    def letter(self, point: Point) -> str:
        return self.words[point[0]][point[1]]

    def copy(self) -> "_Sketch":
        return _Sketch(self.src, self.layers, dict(self.dots), self.words)

    def freeze(self) -> PlanarDiagram:
        return PlanarDiagram(
            self.src,
            tuple(self.layers),
            tuple(sorted((g, p, k) for (g, p), k in self.dots.items() if k)),
        )

    def move(self, source: Point, target: Point, count: int) -> None:
        left = self.dots.get(source, 0) - count
        if left < 0:
            raise CompositionError(f"cannot move {count} dots from {source}")
        if left:
            self.dots[source] = left
        else:
            self.dots.pop(source, None)
        self.dots[target] = self.dots.get(target, 0) + count


class _Step(NamedTuple):
    gap: int
    pos: int
    layer: Optional[int]
    branch: Optional[str]


def _forward(sk: _Sketch, point: Point) -> Optional[_Step]:
    """Next point along the strand's orientation, or None at an outward end."""
    gap, pos = point
    if sk.letter(point) == "u":
        if gap == sk.height:
            return None
        layer = sk.layers[gap]
        q, gen = layer.position, layer.generator
        if gen in CROSSINGS:
            if pos == q:
                return _Step(gap + 1, q + 1, gap, "L")
            if pos == q + 1:
                return _Step(gap + 1, q, gap, "R")
            return _Step(gap + 1, pos, None, None)
        if gen in CAPS:
            if pos in (q, q + 1):
                return _Step(gap, q + 1 if pos == q else q, None, None)
            return _Step(gap + 1, pos if pos < q else pos - 2, None, None)
        return _Step(gap + 1, pos if pos < q else pos + 2, None, None)

    if gap == 0:
        return None
    layer = sk.layers[gap - 1]
    q, gen = layer.position, layer.generator
    if gen in CROSSINGS:
        if pos == q + 1:
            return _Step(gap - 1, q, gap - 1, "L")
        if pos == q:
            return _Step(gap - 1, q + 1, gap - 1, "R")
        return _Step(gap - 1, pos, None, None)
    if gen in CUPS:
        if pos in (q, q + 1):
            return _Step(gap, q + 1 if pos == q else q, None, None)
        return _Step(gap - 1, pos if pos < q else pos - 2, None, None)
    return _Step(gap - 1, pos if pos < q else pos + 2, None, None)


def _epsilon(gen: Gen, branch: str) -> int:
    like = gen in (Gen.CROSS_UU, Gen.CROSS_DD)
    if branch == "L":
        return 1 if like else -1
    return -1 if like else 1


def _trace(sk: _Sketch, start: Point) -> List[Point]:
    path = [start]
    point = start
    while True:
        step = _forward(sk, point)
        if step is None:
            return path
        point = (step.gap, step.pos)
        if point == start:
            return path
        path.append(point)


def _open_paths(sk: _Sketch) -> List[List[Point]]:
    top = sk.height
    starts = [(0, p) for p, ch in enumerate(sk.words[0]) if ch == "u"]
    starts += [(top, p) for p, ch in enumerate(sk.words[top]) if ch == "d"]
    return [_trace(sk, start) for start in starts]


def _closed_loops(sk: _Sketch, open_paths: List[List[Point]]) -> List[List[Point]]:
    visited = {point for path in open_paths for point in path}
    loops = []
    for gap, word in enumerate(sk.words):
        for pos in range(len(word)):
            if (gap, pos) in visited:
                continue
            loop = _trace(sk, (gap, pos))
            visited.update(loop)
            loops.append(loop)
    return loops


def _smooth(sk: _Sketch, index: int, dropped: Point) -> _Sketch:
    """Resolve the crossing at layer ``index`` into its orientation-preserving smoothing."""
    layer = sk.layers[index]
    dots = dict(sk.dots)
    dots[dropped] -= 1
    if Gen(layer.generator) in (Gen.CROSS_UU, Gen.CROSS_DD):
        layers = sk.layers[:index] + sk.layers[index + 1 :]
        moved: Dict[Point, int] = {}
        for (g, p), k in dots.items():
            key = (g if g <= index else g - 1, p)
            moved[key] = moved.get(key, 0) + k
        return _Sketch(sk.src, layers, moved)

    below = CROSSINGS[layer.generator]
    replacement = [
        Layer(layer.position, CAP_FOR[below]),
        Layer(layer.position, CUP_FOR[below[::-1]]),
    ]
    layers = sk.layers[:index] + replacement + sk.layers[index + 1 :]
    moved = {(g if g <= index else g + 1, p): k for (g, p), k in dots.items()}
    return _Sketch(sk.src, layers, moved)


def _insert_block(sk: _Sketch, gap: int, offset: int, keep_below: bool) -> _Sketch:
    """Insert 2*offset crossing layers at ``gap`` carrying position ``offset`` to 0 and back.

    Dots already on ``gap`` stay under the block when ``keep_below`` and sit on top of it
    otherwise. The middle gap of the block is ``gap + offset`` with the strand at 0.
    """
    word = sk.words[gap]
    block: List[Layer] = []
    for t in range(offset):
        layer = crossing_at(word, offset - 1 - t)
        block.append(layer)
        word = apply_layer(word, layer)
    for t in range(offset):
        layer = crossing_at(word, t)
        block.append(layer)
        word = apply_layer(word, layer)

    width = 2 * offset
    layers = sk.layers[:gap] + block + sk.layers[gap:]
    moved = {}
    for (g, p), k in sk.dots.items():
        if g < gap or (g == gap and keep_below):
            moved[(g, p)] = k
        else:
            moved[(g + width, p)] = k
    return _Sketch(sk.src, layers, moved)


class Normalizer:
    """Brings planar diagrams to a linear combination of normally ordered diagrams."""

    def __init__(self, params: Params):
        self.params = params
        self._lock = threading.Lock()
        self._memo: Dict[PlanarDiagram, Dict[NormalDiagram, Any]] = {}

    @property
    def cache_size(self) -> int:
        return len(self._memo)

    def normalize(self, diagram: PlanarDiagram) -> Dict[NormalDiagram, Any]:
        with self._lock:
            cached = self._memo.get(diagram)
        if cached is not None:
            CACHE_HITS_TOTAL.labels(table="normalize").inc()
            return cached

        NORMALIZATIONS_TOTAL.inc()
        out: Dict[NormalDiagram, Any] = {}
        self._rewrite(_Sketch.thaw(diagram), self.params.one, out)
        result = {d: c for d, c in sorted(out.items()) if c}
        with self._lock:
            self._memo[diagram] = result
        return result

    def normalize_layer_word(self, layer_word: LayerWord) -> Dict[NormalDiagram, Any]:
        return self.normalize(PlanarDiagram.from_layer_word(layer_word))

    def _accumulate(self, sk: _Sketch, coeff, out: Dict[NormalDiagram, Any]) -> None:
        if not coeff:
            return
        for diagram, value in self.normalize(sk.freeze()).items():
            out[diagram] = out.get(diagram, self.params.zero) + coeff * value

    def _step(self, sk: _Sketch, point: Point, count: int, coeff, out) -> Point:
        """Move ``count`` dots one step forward, collecting crossing corrections."""
        step = _forward(sk, point)
        target = (step.gap, step.pos)
        if step.layer is None:
            sk.move(point, target, count)
            return target
        eps = _epsilon(sk.layers[step.layer].generator, step.branch)
        for _ in range(count):
            CORRECTIONS_TOTAL.labels(kind="crossing").inc()
            self._accumulate(_smooth(sk, step.layer, point), -eps * coeff, out)
            sk.move(point, target, 1)
        return target

    def _carry(self, sk: _Sketch, start: Point, stop: Point, count: int, coeff, out) -> None:
        point = start
        while point != stop:
            point = self._step(sk, point, count, coeff, out)

    def _finger(self, sk: _Sketch, point: Point, count: int, coeff, out) -> Tuple[_Sketch, Point]:
        """Bring ``count`` dots at ``point`` to position 0 through an inserted crossing block."""
        gap, pos = point
        if pos == 0:
            return sk, point
        up = sk.letter(point) == "u"
        sk = _insert_block(sk, gap, pos, keep_below=up)
        start = (gap, pos) if up else (gap + 2 * pos, pos)
        middle = (gap + pos, 0)
        self._carry(sk, start, middle, count, coeff, out)
        return sk, middle

    def _reduce_end(self, sk: _Sketch, end: Point, coeff, out) -> None:
        level = self.params.level
        orientation = Orientation(sk.letter(end))
        sk, end = self._finger(sk, end, level, coeff, out)
        base = sk.dots[end] - level
        poly = cyclo_poly(self.params, orientation)
        for m in range(level):
            if not poly[m]:
                continue
            CORRECTIONS_TOTAL.labels(kind="cyclotomic").inc()
            reduced = sk.copy()
            reduced.dots[end] = base + m
            if not reduced.dots[end]:
                del reduced.dots[end]
            self._accumulate(reduced, -poly[m] * coeff, out)

    def _rewrite(self, sk: _Sketch, coeff, out: Dict[NormalDiagram, Any]) -> None:
        level = self.params.level

        paths = _open_paths(sk)
        for path in paths:
            for point in path[:-1]:
                count = sk.dots.get(point, 0)
                if count:
                    self._step(sk, point, count, coeff, out)

        for path in paths:
            end = path[-1]
            if sk.dots.get(end, 0) >= level:
                self._reduce_end(sk, end, coeff, out)
                return

        while True:
            loops = _closed_loops(sk, _open_paths(sk))
            pending = None
            for loop in loops:
                dotted = [point for point in loop if sk.dots.get(point)]
                if len(dotted) > 1 or (dotted and dotted[0][1] != 0):
                    pending = loop
                    break
            if pending is None:
                break
            sk = self._pin_loop(sk, pending, coeff, out)

        scalar = self.params.one
        for loop in loops:
            dotted = [point for point in loop if sk.dots.get(point)]
            if dotted:
                point = dotted[0]
                scalar *= bubble_value(self.params, sk.dots[point], sk.letter(point) == "u")
            else:
                scalar *= bubble_value(self.params, 0, True)
            if not scalar:
                return
        CORRECTIONS_TOTAL.labels(kind="bubble").inc(len(loops))

        diagram = self._read_off(sk)
        out[diagram] = out.get(diagram, self.params.zero) + coeff * scalar

    def _pin_loop(self, sk: _Sketch, loop: List[Point], coeff, out) -> _Sketch:
        """Gather a loop's dots at its leftmost point and move them to position 0."""
        target = min(loop, key=lambda point: (point[1], point[0]))
        index = loop.index(target)
        order = loop[index + 1 :] + loop[: index + 1]
        for point in order[:-1]:
            count = sk.dots.get(point, 0)
            if count:
                self._step(sk, point, count, coeff, out)
        sk, _ = self._finger(sk, target, sk.dots[target], coeff, out)
        return sk

    def _read_off(self, sk: _Sketch) -> NormalDiagram:
        pairs = []
        dots = []
        for path in _open_paths(sk):
            start, end = path[0], path[-1]
            pairs.append((_endpoint(sk, start, True), _endpoint(sk, end, False)))
            dots.append(sk.dots.get(end, 0))
        return make_diagram(sk.src, sk.words[sk.height], pairs, dots)


def _endpoint(sk: _Sketch, point: Point, is_start: bool) -> Tuple[str, int]:
    at_bottom = (sk.letter(point) == "u") == is_start
    return (BOTTOM, point[1]) if at_bottom else (TOP, point[1])
