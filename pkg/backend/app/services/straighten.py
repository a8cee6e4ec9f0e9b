"""
Straightening Engine - morphisms, composition and the relation catalog
Obrauer - Cyclotomic Oriented Brauer Engine

Morphisms are finite linear combinations of normally ordered diagrams. Every product is
computed by slicing the factors into generator layers and normalizing the stack.
"""

import random
import threading
from dataclasses import dataclass
from itertools import product
from typing import Any, Callable, Dict, Iterable, List, Optional, Sequence, Tuple

import structlog

from app.core.exceptions import CompositionError, DiagramError, RelationError
from app.core.metrics import CACHE_HITS_TOTAL, COMPOSITIONS_TOTAL
from app.services.diagrams import (
    BOTTOM,
    TOP,
    NormalDiagram,
    StrandKind,
    check_dots,
    enumerate_basis,
    identity_diagram,
    tensor_diagrams,
)
from app.services.ground import Params, bubble_value, cyclo_poly
from app.services.planar import (
    CAP_FOR,
    CAPS,
    CROSSINGS,
    CUPS,
    CUP_FOR,
    DOT_FOR,
    DOTS,
    Gen,
    Layer,
    LayerWord,
    Normalizer,
    PlanarDiagram,
    apply_layer,
    crossing_at,
    dot_at,
)
from app.services.words import Orientation, check_word

logger = structlog.get_logger()

__all__ = [
    "Engine",
    "Gen",
    "Layer",
    "LayerWord",
    "Morphism",
    "RelationCheck",
    "flip_layer_word",
    "relation_catalog",
    "slice_diagram",
]


@dataclass(frozen=True)
class Morphism:
    src: str
    dst: str
    terms: Tuple[Tuple[NormalDiagram, Any], ...] = ()

    @classmethod
    def build(cls, src: str, dst: str, mapping: Dict[NormalDiagram, Any]) -> "Morphism":
        items = sorted(((d, c) for d, c in mapping.items() if c), key=lambda item: item[0])
        for diagram, _ in items:
            if diagram.src != src or diagram.dst != dst:
                raise DiagramError(
                    f"term of type {diagram.src!r}->{diagram.dst!r} in a morphism {src!r}->{dst!r}"
                )
        return cls(src, dst, tuple(items))

    def as_dict(self) -> Dict[NormalDiagram, Any]:
        return dict(self.terms)

    def coefficient(self, diagram: NormalDiagram, default: Any = 0) -> Any:
        return self.as_dict().get(diagram, default)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def _check_type(self, other: "Morphism") -> None:
        if (self.src, self.dst) != (other.src, other.dst):
            raise CompositionError(
                f"cannot add {self.src!r}->{self.dst!r} and {other.src!r}->{other.dst!r}"
            )

    def __add__(self, other: "Morphism") -> "Morphism":
        self._check_type(other)
        merged = self.as_dict()
        for diagram, coeff in other.terms:
            merged[diagram] = merged[diagram] + coeff if diagram in merged else coeff
        return Morphism.build(self.src, self.dst, merged)

    def __neg__(self) -> "Morphism":
        return Morphism(self.src, self.dst, tuple((d, -c) for d, c in self.terms))

    def __sub__(self, other: "Morphism") -> "Morphism":
        return self + (-other)

    def scale(self, scalar: Any) -> "Morphism":
        return Morphism.build(self.src, self.dst, {d: scalar * c for d, c in self.terms})


def _outward_end(diagram: NormalDiagram, index: int, side: str, letter: str):
    for end in diagram.pairs[index]:
        if end[0] == side and diagram.letter(end) == letter:
            return end
    return None


def _leg_labels(diagram: NormalDiagram) -> Dict[Tuple[str, int], Tuple[int, int]]:
    """(strand index, leg) for every endpoint; leg 0 is the smaller endpoint."""
    labels = {}
    for index, (e1, e2) in enumerate(diagram.pairs):
        labels[e1] = (index, 0)
        labels[e2] = (index, 1)
    return labels


def _bubble_sort(word: str, current: List, target: List) -> Tuple[List[Layer], str]:
    rank = {label: i for i, label in enumerate(target)}
    current = list(current)
    layers = []
    for sweep in range(len(current)):
        for p in range(len(current) - 1 - sweep):
            if rank[current[p]] > rank[current[p + 1]]:
                layer = crossing_at(word, p)
                layers.append(layer)
                word = apply_layer(word, layer)
                current[p], current[p + 1] = current[p + 1], current[p]
    return layers, word


def slice_diagram(diagram: NormalDiagram) -> LayerWord:
    """A deterministic generator word whose normalization is exactly ``diagram``.

    Dots on outward bottom ends come first, then a crossing block that gathers the caps
    to the left, the caps, the cups, a crossing block into the top order and finally the
    dots on outward top ends.
    """
    labels = _leg_labels(diagram)
    layers: List[Layer] = []
    word = diagram.src

    caps, cups, verticals = [], [], []
    for index in range(len(diagram.pairs)):
        kind = diagram.kind(index)
        if kind == StrandKind.CAP:
            caps.append(index)
        elif kind == StrandKind.CUP:
            cups.append(index)
        else:
            verticals.append(index)

    for index in caps + verticals:
        end = _outward_end(diagram, index, BOTTOM, "d")
        if end is not None:
            layers += [Layer(end[1], Gen.DOT_DOWN)] * diagram.dots[index]

    bottom = [labels[(BOTTOM, i)] for i in range(len(diagram.src))]
    gathered = [(index, leg) for index in caps for leg in (0, 1)]
    gathered += [(index, 0) for index in verticals]
    block, word = _bubble_sort(word, bottom, gathered)
    layers += block

    for _ in caps:
        layer = Layer(0, CAP_FOR[word[:2]])
        layers.append(layer)
        word = apply_layer(word, layer)

    for index in reversed(cups):
        e1, e2 = diagram.pairs[index]
        layer = Layer(0, CUP_FOR[diagram.letter(e1) + diagram.letter(e2)])
        layers.append(layer)
        word = apply_layer(word, layer)

    middle = [(index, leg) for index in cups for leg in (0, 1)]
    middle += [(index, 1) for index in verticals]
    top = [labels[(TOP, j)] for j in range(len(diagram.dst))]
    block, word = _bubble_sort(word, middle, top)
    layers += block

    for index in verticals + cups:
        end = _outward_end(diagram, index, TOP, "u")
        if end is not None:
            layers += [Layer(end[1], Gen.DOT_UP)] * diagram.dots[index]

    return LayerWord(diagram.src, tuple(layers))


_FLIP = {Gen.CUP_R: Gen.CAP_L, Gen.CUP_L: Gen.CAP_R, Gen.CAP_R: Gen.CUP_L, Gen.CAP_L: Gen.CUP_R}


def flip_layer_word(layer_word: LayerWord) -> LayerWord:
    """Reflect a layer word top to bottom."""
    words = layer_word.words()
    flipped = []
    for index in reversed(range(len(layer_word.layers))):
        layer = layer_word.layers[index]
        gen = Gen(layer.generator)
        if gen in CROSSINGS:
            flipped.append(crossing_at(words[index + 1], layer.position))
        elif gen in DOTS:
            flipped.append(layer)
        else:
            flipped.append(Layer(layer.position, _FLIP[gen]))
    return LayerWord(words[-1], tuple(flipped))


# ============== Relation Catalog ==============

# A term is (coefficient, [(op, position), ...]) with ops "X" (crossing), "dot" or a
# cup/cap generator name; crossings and dots take their type from the current word.
Term = Tuple[Any, List[Tuple[str, int]]]


@dataclass(frozen=True)
class Equation:
    word: str
    lhs: List[Term]
    rhs: List[Term]


@dataclass(frozen=True)
class RelationSpec:
    relation_id: str
    description: str
    build: Callable[[Params], List[Equation]]
    left_edge: bool = False


@dataclass
class RelationCheck:
    relation: str
    context: str
    passed: bool

    def to_dict(self) -> Dict[str, Any]:
        return {"relation": self.relation, "context": self.context, "pass": self.passed}


def _fixed(*equations: Equation) -> Callable[[Params], List[Equation]]:
    return lambda params: list(equations)


def _bubble_equations(dots: int, clockwise: bool) -> Callable[[Params], List[Equation]]:
    def build(params: Params) -> List[Equation]:
        if clockwise:
            ops = [("cupR", 0)] + [("dot", 0)] * dots + [("capL", 0)]
        else:
            ops = [("cupL", 0)] + [("dot", 0)] * dots + [("capR", 0)]
        value = bubble_value(params, dots, clockwise)
        return [Equation("", [(1, ops)], [(value, [])])]

    return build


def _cyclotomic_equations(orientation: Orientation) -> Callable[[Params], List[Equation]]:
    def build(params: Params) -> List[Equation]:
        poly = cyclo_poly(params, orientation)
        lhs = [(poly[m], [("dot", 0)] * m) for m in range(params.level + 1) if poly[m]]
        return [Equation(orientation.value, lhs, [])]

    return build


_SMOOTH_UD = [("capL", 0), ("cupL", 0)]
_SMOOTH_DU = [("capR", 0), ("cupR", 0)]

_CATALOG: List[RelationSpec] = [
    RelationSpec(
        "rel-1",
        "right zigzag on an up strand",
        _fixed(Equation("u", [(1, [("cupR", 0), ("capR", 1)])], [(1, [])])),
    ),
    RelationSpec(
        "rel-2",
        "right zigzag on a down strand",
        _fixed(Equation("d", [(1, [("cupR", 1), ("capR", 0)])], [(1, [])])),
    ),
    RelationSpec(
        "rel-3",
        "up-up double crossing",
        _fixed(Equation("uu", [(1, [("X", 0), ("X", 0)])], [(1, [])])),
    ),
    RelationSpec(
        "rel-4",
        "up braid",
        _fixed(
            Equation(
                "uuu",
                [(1, [("X", 0), ("X", 1), ("X", 0)])],
                [(1, [("X", 1), ("X", 0), ("X", 1)])],
            )
        ),
    ),
    RelationSpec(
        "rel-5",
        "mixed crossings are mutually inverse",
        _fixed(
            Equation("ud", [(1, [("X", 0), ("X", 0)])], [(1, [])]),
            Equation("du", [(1, [("X", 0), ("X", 0)])], [(1, [])]),
        ),
    ),
    RelationSpec(
        "rel-6",
        "dot past an up-up crossing",
        _fixed(
            Equation("uu", [(1, [("X", 0), ("dot", 1)])], [(1, [("dot", 0), ("X", 0)]), (1, [])])
        ),
    ),
    RelationSpec(
        "rel-7",
        "left zigzag on an up strand",
        _fixed(Equation("u", [(1, [("cupL", 1), ("capL", 0)])], [(1, [])])),
    ),
    RelationSpec(
        "rel-8",
        "left zigzag on a down strand",
        _fixed(Equation("d", [(1, [("cupL", 0), ("capL", 1)])], [(1, [])])),
    ),
    RelationSpec(
        "rel-9",
        "down-down double crossing",
        _fixed(Equation("dd", [(1, [("X", 0), ("X", 0)])], [(1, [])])),
    ),
    RelationSpec(
        "rel-10",
        "down braid",
        _fixed(
            Equation(
                "ddd",
                [(1, [("X", 0), ("X", 1), ("X", 0)])],
                [(1, [("X", 1), ("X", 0), ("X", 1)])],
            )
        ),
    ),
    RelationSpec(
        "rel-11",
        "dot past a down-down crossing",
        _fixed(
            Equation("dd", [(1, [("X", 0), ("dot", 1)])], [(1, [("dot", 0), ("X", 0)]), (-1, [])])
        ),
    ),
    RelationSpec(
        "dots-1",
        "up dot upward through a mixed crossing",
        _fixed(
            Equation(
                "ud",
                [(1, [("X", 0), ("dot", 1)])],
                [(1, [("dot", 0), ("X", 0)]), (-1, _SMOOTH_UD)],
            )
        ),
    ),
    RelationSpec(
        "dots-2",
        "down dot downward through a mixed crossing",
        _fixed(
            Equation(
                "ud",
                [(1, [("dot", 1), ("X", 0)])],
                [(1, [("X", 0), ("dot", 0)]), (1, _SMOOTH_UD)],
            )
        ),
    ),
    RelationSpec(
        "dots-3",
        "down dot downward through the other mixed crossing",
        _fixed(
            Equation(
                "du",
                [(1, [("dot", 0), ("X", 0)])],
                [(1, [("X", 0), ("dot", 1)]), (-1, _SMOOTH_DU)],
            )
        ),
    ),
    RelationSpec(
        "dots-4",
        "up dot upward through the other mixed crossing",
        _fixed(
            Equation(
                "du",
                [(1, [("X", 0), ("dot", 0)])],
                [(1, [("dot", 1), ("X", 0)]), (1, _SMOOTH_DU)],
            )
        ),
    ),
    RelationSpec(
        "dots-5",
        "dot slides around a right cup",
        _fixed(Equation("", [(1, [("cupR", 0), ("dot", 0)])], [(1, [("cupR", 0), ("dot", 1)])])),
    ),
    RelationSpec(
        "dots-6",
        "dot slides around a right cap",
        _fixed(Equation("du", [(1, [("dot", 0), ("capR", 0)])], [(1, [("dot", 1), ("capR", 0)])])),
    ),
    RelationSpec(
        "dots-7",
        "dot slides around a left cup",
        _fixed(Equation("", [(1, [("cupL", 0), ("dot", 0)])], [(1, [("cupL", 0), ("dot", 1)])])),
    ),
    RelationSpec(
        "dots-8",
        "dot slides around a left cap",
        _fixed(Equation("ud", [(1, [("dot", 0), ("capL", 0)])], [(1, [("dot", 1), ("capL", 0)])])),
    ),
]

_BUBBLE_RANGE = range(3)

for _dots in _BUBBLE_RANGE:
    _CATALOG.append(
        RelationSpec(
            f"bubble-cw-{_dots}",
            f"clockwise loop with {_dots} dots",
            _bubble_equations(_dots, True),
            left_edge=True,
        )
    )
for _dots in _BUBBLE_RANGE:
    _CATALOG.append(
        RelationSpec(
            f"bubble-ccw-{_dots}",
            f"counterclockwise loop with {_dots} dots",
            _bubble_equations(_dots, False),
            left_edge=True,
        )
    )
_CATALOG += [
    RelationSpec(
        "cyclotomic-up",
        "f of the dot on a leftmost up strand",
        _cyclotomic_equations(Orientation.UP),
        left_edge=True,
    ),
    RelationSpec(
        "cyclotomic-down",
        "f' of the dot on a leftmost down strand",
        _cyclotomic_equations(Orientation.DOWN),
        left_edge=True,
    ),
]

RELATIONS: Dict[str, RelationSpec] = {spec.relation_id: spec for spec in _CATALOG}
CORE_RELATIONS = [f"rel-{k}" for k in range(1, 12)] + [f"dots-{k}" for k in range(1, 9)]


def relation_catalog() -> List[str]:
    return [spec.relation_id for spec in _CATALOG]


def lookup_relation(relation_id: str) -> RelationSpec:
    if relation_id in RELATIONS:
        return RELATIONS[relation_id]
    for prefix, clockwise in (("bubble-cw-", True), ("bubble-ccw-", False)):
        if relation_id.startswith(prefix) and relation_id[len(prefix) :].isdigit():
            dots = int(relation_id[len(prefix) :])
            label = "clockwise" if clockwise else "counterclockwise"
            return RelationSpec(
                relation_id,
                f"{label} loop with {dots} dots",
                _bubble_equations(dots, clockwise),
                left_edge=True,
            )
    raise RelationError(f"unknown relation {relation_id!r}")


def contexts(max_length: int = 2, left_edge: bool = False) -> List[Tuple[str, str]]:
    """Whiskering contexts (left, right) with |left| + |right| <= max_length."""
    words = [""]
    for length in range(1, max_length + 1):
        words += ["".join(letters) for letters in product("ud", repeat=length)]
    pairs = []
    for left in words:
        for right in words:
            if len(left) + len(right) <= max_length and not (left_edge and left):
                pairs.append((left, right))
    return pairs


def format_context(left: str, right: str) -> str:
    return f"{left or '-'}|{right or '-'}"


def _resolve(word: str, ops: Sequence[Tuple[str, int]], offset: int) -> LayerWord:
    layers = []
    current = word
    for name, position in ops:
        position += offset
        if name == "X":
            layer = crossing_at(current, position)
        elif name == "dot":
            layer = dot_at(current, position)
        else:
            layer = Layer(position, Gen(name))
        current = apply_layer(current, layer)
        layers.append(layer)
    return LayerWord(word, tuple(layers))


# ============== Engine ==============


class Engine:
    """Normalization, composition and tensor product for one parameter set."""

    def __init__(self, params: Params, size_limit: Optional[int] = 8):
        self.params = params
        self.size_limit = size_limit
        self.normalizer = Normalizer(params)
        self._lock = threading.Lock()
        self._append_memo: Dict[Tuple[NormalDiagram, Layer], Dict[NormalDiagram, Any]] = {}
        self._compose_memo: Dict[Tuple[NormalDiagram, NormalDiagram], Dict[NormalDiagram, Any]] = {}

    # ---- construction ----

    def zero(self, src: str, dst: str) -> Morphism:
        return Morphism(check_word(src), check_word(dst))

    def identity(self, word: str) -> Morphism:
        return Morphism.build(word, word, {identity_diagram(word): self.params.one})

    def from_diagram(self, diagram: NormalDiagram, coeff: Any = None) -> Morphism:
        check_dots(diagram, self.params.level)
        coeff = self.params.one if coeff is None else coeff
        return Morphism.build(diagram.src, diagram.dst, {diagram: coeff})

    def basis(self, src: str, dst: str) -> List[NormalDiagram]:
        return enumerate_basis(src, dst, self.params.level, self.size_limit)

    def generator_morphism(self, gen: Gen, word: str = "", position: int = 0) -> Morphism:
        """A single generator acting at ``position`` of ``word`` (its minimal word by default)."""
        gen = Gen(gen)
        if not word:
            word = {**CAPS, **CROSSINGS, **DOTS}.get(gen, "")
        return self.eval(LayerWord(word, (Layer(position, gen),)))

    # ---- normalization ----

    def normalize(self, diagram: PlanarDiagram) -> Morphism:
        terms = self.normalizer.normalize(diagram)
        dst = apply_all(diagram.src, diagram.layers)
        return Morphism.build(diagram.src, dst, terms)

    def eval_direct(self, layer_word: LayerWord) -> Morphism:
        """Normalize the whole stack at once."""
        dst = layer_word.dst
        terms = self.normalizer.normalize_layer_word(layer_word)
        return Morphism.build(layer_word.src, dst, terms)

    def append(self, diagram: NormalDiagram, layer: Layer) -> Dict[NormalDiagram, Any]:
        key = (diagram, layer)
        with self._lock:
            cached = self._append_memo.get(key)
        if cached is not None:
            CACHE_HITS_TOTAL.labels(table="append").inc()
            return cached
        stacked = slice_diagram(diagram).then(layer)
        result = self.normalizer.normalize_layer_word(stacked)
        with self._lock:
            self._append_memo[key] = result
        return result

    def eval(self, layer_word: LayerWord) -> Morphism:
        """Image of a layer word, appending one generator at a time."""
        words = layer_word.words()
        state: Dict[NormalDiagram, Any] = {identity_diagram(layer_word.src): self.params.one}
        for layer in layer_word.layers:
            nxt: Dict[NormalDiagram, Any] = {}
            for diagram, coeff in state.items():
                for target, value in self.append(diagram, layer).items():
                    nxt[target] = nxt.get(target, self.params.zero) + coeff * value
            state = {d: c for d, c in nxt.items() if c}
        return Morphism.build(layer_word.src, words[-1], state)

    def apply_layers(self, morphism: Morphism, layers: Iterable[Layer]) -> Morphism:
        result = morphism
        for layer in layers:
            dst = apply_layer(result.dst, layer)
            acc: Dict[NormalDiagram, Any] = {}
            for diagram, coeff in result.terms:
                for target, value in self.append(diagram, layer).items():
                    acc[target] = acc.get(target, self.params.zero) + coeff * value
            result = Morphism.build(result.src, dst, acc)
        return result

    # ---- monoidal structure ----

    def _compose_pair(self, outer: NormalDiagram, inner: NormalDiagram) -> Dict[NormalDiagram, Any]:
        key = (outer, inner)
        with self._lock:
            cached = self._compose_memo.get(key)
        if cached is not None:
            CACHE_HITS_TOTAL.labels(table="compose").inc()
            return cached
        COMPOSITIONS_TOTAL.inc()
        stacked = LayerWord(
            inner.src, slice_diagram(inner).layers + slice_diagram(outer).layers
        )
        result = self.normalizer.normalize_layer_word(stacked)
        with self._lock:
            self._compose_memo[key] = result
        return result

    def compose(self, g: Morphism, h: Morphism) -> Morphism:
        """g after h."""
        if h.dst != g.src:
            raise CompositionError(
                f"cannot compose {g.src!r}->{g.dst!r} after {h.src!r}->{h.dst!r}"
            )
        acc: Dict[NormalDiagram, Any] = {}
        for outer, cg in g.terms:
            for inner, ch in h.terms:
                for diagram, value in self._compose_pair(outer, inner).items():
                    acc[diagram] = acc.get(diagram, self.params.zero) + cg * ch * value
        return Morphism.build(h.src, g.dst, acc)

    def tensor(self, g: Morphism, h: Morphism) -> Morphism:
        acc: Dict[NormalDiagram, Any] = {}
        for left, cg in g.terms:
            for right, ch in h.terms:
                diagram = tensor_diagrams(left, right)
                acc[diagram] = acc.get(diagram, self.params.zero) + cg * ch
        return Morphism.build(g.src + h.src, g.dst + h.dst, acc)

    def apply_tau(self, morphism: Morphism) -> Morphism:
        acc: Dict[NormalDiagram, Any] = {}
        for diagram, coeff in morphism.terms:
            flipped = flip_layer_word(slice_diagram(diagram))
            for target, value in self.normalizer.normalize_layer_word(flipped).items():
                acc[target] = acc.get(target, self.params.zero) + coeff * value
        return Morphism.build(morphism.dst, morphism.src, acc)

    # ---- tables and checks ----

    def structure_constants(
        self, src: str, mid: str, dst: str
    ) -> Dict[Tuple[int, int], Dict[int, Any]]:
        """Products of basis(mid, dst) after basis(src, mid), in basis(src, dst) coordinates."""
        outer_basis = self.basis(mid, dst)
        inner_basis = self.basis(src, mid)
        index = {d: k for k, d in enumerate(self.basis(src, dst))}
        table = {}
        for i, outer in enumerate(outer_basis):
            for j, inner in enumerate(inner_basis):
                row = {}
                for diagram, value in self._compose_pair(outer, inner).items():
                    if diagram not in index:
                        raise DiagramError(f"product left the basis of {src!r}->{dst!r}")
                    row[index[diagram]] = value
                table[(i, j)] = row
        logger.debug("structure_constants_built", src=src, mid=mid, dst=dst, size=len(table))
        return table

    def _coerce(self, coeff: Any) -> Any:
        return self.params.scalar(coeff) if isinstance(coeff, int) else coeff

    def combination(self, word: str, terms: List[Term], offset: int, dst: str) -> Morphism:
        """Sum of coeff * eval(ops) over ``terms``, all of type word -> dst."""
        total = self.zero(word, dst)
        for coeff, ops in terms:
            image = self.eval(_resolve(word, ops, offset))
            total = total + image.scale(self._coerce(coeff))
        return total

    def verify_relation(self, relation_id: str, left: str = "", right: str = "") -> bool:
        spec = lookup_relation(relation_id)
        check_word(left)
        check_word(right)
        if spec.left_edge and left:
            raise RelationError(f"{relation_id} holds only at the left edge")
        for equation in spec.build(self.params):
            word = left + equation.word + right
            sample_ops = (equation.lhs or equation.rhs)[0][1]
            dst = _resolve(word, sample_ops, len(left)).dst
            lhs = self.combination(word, equation.lhs, len(left), dst)
            rhs = self.combination(word, equation.rhs, len(left), dst)
            if lhs != rhs:
                logger.info(
                    "relation_failed",
                    relation=relation_id,
                    context=format_context(left, right),
                    word=word,
                )
                return False
        return True

    def verify_relations(
        self,
        relation_ids: Optional[Sequence[str]] = None,
        max_context: int = 2,
        sample: Optional[int] = None,
        seed: int = 0,
    ) -> List[RelationCheck]:
        checks = []
        rng = random.Random(seed)
        for relation_id in relation_ids or relation_catalog():
            spec = lookup_relation(relation_id)
            pool = contexts(max_context, spec.left_edge)
            if sample is not None and sample < len(pool):
                pool = sorted(rng.sample(pool, sample), key=pool.index)
            for left, right in pool:
                passed = self.verify_relation(relation_id, left, right)
                checks.append(RelationCheck(relation_id, format_context(left, right), passed))
        return checks

    def dot_naturality_check(self, a: str, b: str, side: str) -> bool:
        """(1_a ⊗ x)∘(m ⊗ 1_side) = (m ⊗ 1_side)∘(1_b ⊗ x) for every basis m of Hom(b, a)."""
        letter = Orientation(side).value
        dot = self.generator_morphism(DOT_FOR[letter])
        strand = self.identity(letter)
        for diagram in self.basis(b, a):
            m = self.tensor(self.from_diagram(diagram), strand)
            after = self.compose(self.tensor(self.identity(a), dot), m)
            before = self.compose(m, self.tensor(self.identity(b), dot))
            if after != before:
                logger.info("dot_naturality_failed", a=a, b=b, side=side)
                return False
        return True

    def bend_down(self, morphism: Morphism, b: str, cup: Gen) -> Morphism:
        """Hom(b + x, a) -> Hom(b, a + y): feed a cup on the right into the source."""
        total = self.zero(b, morphism.dst + CUPS[cup][1])
        for diagram, coeff in morphism.terms:
            stacked = LayerWord(b, (Layer(len(b), cup),) + slice_diagram(diagram).layers)
            total = total + self.eval_direct(stacked).scale(coeff)
        return total

    def bend_up(self, morphism: Morphism, a: str, letter: str, cap: Gen) -> Morphism:
        """Hom(b, a + y) -> Hom(b + x, a): close the extra target letter with a cap."""
        total = self.zero(morphism.src + letter, a)
        for diagram, coeff in morphism.terms:
            stacked = LayerWord(
                morphism.src + letter, slice_diagram(diagram).layers + (Layer(len(a), cap),)
            )
            total = total + self.eval_direct(stacked).scale(coeff)
        return total

    def bimodule_iso_check(self, a: str, b: str) -> Dict[str, bool]:
        """The cup/cap maps between Hom(b + x, a) and Hom(b, a + y) are mutually inverse."""
        report = {}
        for letter, cup, cap in (("u", Gen.CUP_R, Gen.CAP_R), ("d", Gen.CUP_L, Gen.CAP_L)):
            other = CUPS[cup][1]
            passed = True
            for diagram in self.basis(b + letter, a):
                m = self.from_diagram(diagram)
                if self.bend_up(self.bend_down(m, b, cup), a, letter, cap) != m:
                    passed = False
                    break
            if passed:
                for diagram in self.basis(b, a + other):
                    n = self.from_diagram(diagram)
                    if self.bend_down(self.bend_up(n, a, letter, cap), b, cup) != n:
                        passed = False
                        break
            report[f"{letter}->{other}"] = passed
        logger.debug("bimodule_iso_checked", a=a, b=b, report=report)
        return report

    def cache_stats(self) -> Dict[str, int]:
        return {
            "normalize": self.normalizer.cache_size,
            "append": len(self._append_memo),
            "compose": len(self._compose_memo),
        }


def apply_all(word: str, layers: Iterable[Layer]) -> str:
    for layer in layers:
        word = apply_layer(word, layer)
    return word
