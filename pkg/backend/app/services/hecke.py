"""
Hecke Service - degenerate cyclotomic Hecke generators inside corner algebras
Obrauer - Cyclotomic Oriented Brauer Engine

The corner object is ``u^r d^s``. The up factor has charges u, the down factor
has charges -u' and its Jucys-Murphy generator is minus the dot on the first
down strand.
"""

from dataclasses import dataclass
from enum import Enum
from itertools import permutations, product
from typing import Any, Dict, List, Optional, Tuple

import structlog
from sympy.polys.matrices import DomainMatrix

from app.core.exceptions import ParameterError
from app.services.combinatorics import Side
from app.services.planar import LayerWord, crossing_at, dot_at
from app.services.straighten import Engine, Morphism, RelationCheck
from app.services.towers import CornerAlgebra, corner_algebra, generalized_eigenvalues

logger = structlog.get_logger()


class HeckeGen(str, Enum):
    L1_UP = "L1up"
    L1_DOWN = "L1down"
    S_UP = "S_up"
    S_DOWN = "S_down"


@dataclass(frozen=True)
class HeckeParams:
    level: int
    size: int
    charges: Tuple[Any, ...]


def corner_word(r: int, s: int) -> str:
    if r < 0 or s < 0:
        raise ParameterError(f"strand counts must be non-negative, got r={r}, s={s}")
    return "u" * r + "d" * s


def hecke_params(engine: Engine, side: Side, r: int, s: int) -> HeckeParams:
    params = engine.params
    if Side(side) == Side.UP:
        return HeckeParams(level=params.level, size=r, charges=params.u)
    return HeckeParams(level=params.level, size=s, charges=tuple(-c for c in params.uprime))


def _layer_image(engine: Engine, algebra: CornerAlgebra, layer) -> Morphism:
    return algebra.project(engine.eval(LayerWord(algebra.word, (layer,))))


def hecke_generator_image(
    gen: HeckeGen,
    r: int,
    s: int,
    engine: Engine,
    index: int = 1,
    algebra: Optional[CornerAlgebra] = None,
) -> Morphism:
    """Image of a Hecke generator in the corner algebra of ``u^r d^s``."""
    gen = HeckeGen(gen)
    word = corner_word(r, s)
    algebra = algebra or corner_algebra(word, engine)
    if gen == HeckeGen.L1_UP:
        if r < 1:
            raise ParameterError("L1up needs at least one up strand")
        return _layer_image(engine, algebra, dot_at(word, 0))
    if gen == HeckeGen.L1_DOWN:
        if s < 1:
            raise ParameterError("L1down needs at least one down strand")
        return -_layer_image(engine, algebra, dot_at(word, r))
    if gen == HeckeGen.S_UP:
        if not 1 <= index <= r - 1:
            raise ParameterError(f"S_up index {index} out of range for r={r}")
        return _layer_image(engine, algebra, crossing_at(word, index - 1))
    if not 1 <= index <= s - 1:
        raise ParameterError(f"S_down index {index} out of range for s={s}")
    return _layer_image(engine, algebra, crossing_at(word, r + index - 1))


class _Generators:
    """Memoized generator images for one corner."""

    def __init__(self, r: int, s: int, engine: Engine):
        self.r, self.s, self.engine = r, s, engine
        self.algebra = corner_algebra(corner_word(r, s), engine)
        self._cache: Dict[Tuple[HeckeGen, int], Morphism] = {}

    def get(self, gen: HeckeGen, index: int = 1) -> Morphism:
        key = (gen, index)
        if key not in self._cache:
            self._cache[key] = hecke_generator_image(
                gen, self.r, self.s, self.engine, index, self.algebra
            )
        return self._cache[key]

    def simple(self, side: Side, index: int) -> Morphism:
        return self.get(HeckeGen.S_UP if side == Side.UP else HeckeGen.S_DOWN, index)

    def first_jm(self, side: Side) -> Morphism:
        return self.get(HeckeGen.L1_UP if side == Side.UP else HeckeGen.L1_DOWN)

    def size(self, side: Side) -> int:
        return self.r if side == Side.UP else self.s

    def all_generators(self, side: Side) -> List[Morphism]:
        n = self.size(side)
        if n == 0:
            return []
        return [self.first_jm(side)] + [self.simple(side, i) for i in range(1, n)]


def _jm(gens: _Generators, side: Side, i: int) -> Morphism:
    mul = gens.algebra.multiply
    current = gens.first_jm(side)
    for k in range(1, i):
        s_k = gens.simple(side, k)
        current = mul(mul(s_k, current), s_k) + s_k
    return current


def jucys_murphy(i: int, r: int, s: int, side: Side, engine: Engine) -> Morphism:
    """L_i = S_{i-1} L_{i-1} S_{i-1} + S_{i-1} on the chosen side."""
    side = Side(side)
    gens = _Generators(r, s, engine)
    if not 1 <= i <= gens.size(side):
        raise ParameterError(f"index {i} out of range for the {side.value} side")
    return _jm(gens, side, i)


def _cyclotomic(gens: _Generators, side: Side) -> Morphism:
    algebra = gens.algebra
    jm = gens.first_jm(side)
    result = algebra.unit()
    for charge in hecke_params(gens.engine, side, gens.r, gens.s).charges:
        result = algebra.multiply(result, jm - algebra.unit().scale(charge))
    return result


def _commute(algebra: CornerAlgebra, x: Morphism, y: Morphism) -> bool:
    return algebra.multiply(x, y) == algebra.multiply(y, x)


def _side_checks(gens: _Generators, side: Side) -> List[RelationCheck]:
    algebra = gens.algebra
    mul = algebra.multiply
    unit = algebra.unit()
    n = gens.size(side)
    label = side.value
    checks = []
    if n == 0:
        return checks

    checks.append(
        RelationCheck(f"cyclotomic-{label}", label, _cyclotomic(gens, side).is_zero)
    )
    jm1 = gens.first_jm(side)
    for i in range(1, n):
        s_i = gens.simple(side, i)
        checks.append(RelationCheck(f"square-{label}", f"i={i}", mul(s_i, s_i) == unit))
        if i >= 2:
            passed = _commute(algebra, s_i, jm1)
            checks.append(RelationCheck(f"jm-commute-{label}", f"i={i}", passed))
    for i in range(1, n - 1):
        s_i, s_j = gens.simple(side, i), gens.simple(side, i + 1)
        passed = mul(mul(s_i, s_j), s_i) == mul(mul(s_j, s_i), s_j)
        checks.append(RelationCheck(f"braid-{label}", f"i={i}", passed))
    for i in range(1, n):
        for j in range(i + 2, n):
            passed = _commute(algebra, gens.simple(side, i), gens.simple(side, j))
            checks.append(RelationCheck(f"far-commute-{label}", f"i={i},j={j}", passed))
    if n >= 2:
        checks.append(
            RelationCheck(f"jm-pair-{label}", "L1,L2", _commute(algebra, jm1, _jm(gens, side, 2)))
        )
    return checks


def check_hecke_relations(r: int, s: int, engine: Engine) -> List[RelationCheck]:
    """Defining relations of the two Hecke factors and their mutual commutation."""
    gens = _Generators(r, s, engine)
    checks = _side_checks(gens, Side.UP) + _side_checks(gens, Side.DOWN)
    for x in gens.all_generators(Side.UP):
        for y in gens.all_generators(Side.DOWN):
            passed = _commute(gens.algebra, x, y)
            checks.append(RelationCheck("factors-commute", "up|down", passed))
    failed = [c.relation for c in checks if not c.passed]
    logger.info("hecke_relations_checked", r=r, s=s, total=len(checks), failed=failed)
    return checks


def reduced_word(perm: Tuple[int, ...]) -> List[int]:
    """Adjacent transpositions (1-based) whose product, left to right, is ``perm``."""
    current = list(range(len(perm)))
    word = []
    for target_pos in range(len(perm)):
        pos = current.index(perm[target_pos])
        while pos > target_pos:
            current[pos - 1], current[pos] = current[pos], current[pos - 1]
            word.append(pos)
            pos -= 1
    return word


def _side_basis(gens: _Generators, side: Side) -> List[Morphism]:
    algebra = gens.algebra
    n = gens.size(side)
    jms = [_jm(gens, side, i) for i in range(1, n + 1)]
    perms = []
    for perm in permutations(range(n)):
        element = algebra.unit()
        for k in reduced_word(perm):
            element = algebra.multiply(element, gens.simple(side, k))
        perms.append(element)
    images = []
    for exponents in product(range(gens.engine.params.level), repeat=n):
        monomial = algebra.unit()
        for jm, exponent in zip(jms, exponents):
            monomial = algebra.multiply(monomial, algebra.power(jm, exponent))
        images.extend(algebra.multiply(monomial, w) for w in perms)
    return images


def _basis_images(gens: _Generators) -> List[Morphism]:
    up = _side_basis(gens, Side.UP)
    down = _side_basis(gens, Side.DOWN)
    return [gens.algebra.multiply(x, y) for x in up for y in down]


def hecke_basis_images(r: int, s: int, engine: Engine) -> List[Morphism]:
    """Images of L-monomials times permutation words, up factor times down factor."""
    return _basis_images(_Generators(r, s, engine))


def hecke_span_rank(r: int, s: int, engine: Engine) -> Dict[str, int]:
    gens = _Generators(r, s, engine)
    algebra = gens.algebra
    images = _basis_images(gens)
    rank = 0
    if algebra.dim:
        rows = [algebra.vector(image) for image in images]
        rank = DomainMatrix(rows, (len(rows), algebra.dim), engine.params.field).rank()
    return {"r": r, "s": s, "images": len(images), "rank": rank, "dim": algebra.dim}


def jm_spectrum(i: int, r: int, s: int, side: Side, engine: Engine) -> Dict[Any, int]:
    """Generalized eigenvalues of L_i acting on the corner algebra by left multiplication."""
    side = Side(side)
    gens = _Generators(r, s, engine)
    if not 1 <= i <= gens.size(side):
        raise ParameterError(f"index {i} out of range for the {side.value} side")
    element = _jm(gens, side, i)
    matrix = gens.algebra.left_matrix(element)
    params = engine.params
    radius = gens.size(side)
    charges = hecke_params(engine, side, r, s).charges
    candidates = sorted(
        {c + params.scalar(n) for c in charges for n in range(-radius, radius + 1)},
        key=params.sort_key,
    )
    return generalized_eigenvalues(matrix, candidates, params.field)
