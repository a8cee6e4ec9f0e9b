"""
Towers Service - truncated quotients, corner algebras and dot operators
Obrauer - Cyclotomic Oriented Brauer Engine
"""

import random
import threading
from dataclasses import dataclass, field
from math import comb
from typing import Any, Dict, List, Optional, Sequence, Tuple

import structlog
from sympy.polys.matrices import DomainMatrix

from app.core.exceptions import CompositionError, ParameterError, SizeLimitError
from app.services.combinatorics import Bipartition, syt_count
from app.services.diagrams import NormalDiagram, SubsetKind, enumerate_yhx, vertical_class
from app.services.planar import LayerWord, dot_at
from app.services.straighten import Engine, Morphism
from app.services.words import ClassIndex, class_of, order_leq, sigma, words_in_class

logger = structlog.get_logger()


def project_leq(morphism: Morphism, bound: ClassIndex) -> Morphism:
    """Image in the quotient by everything factoring through classes not below ``bound``."""
    for word in (morphism.src, morphism.dst):
        if not order_leq(class_of(word), bound):
            raise CompositionError(f"word {word!r} is not below class ({bound.r},{bound.s})")
    kept = {d: c for d, c in morphism.terms if order_leq(vertical_class(d), bound)}
    return Morphism.build(morphism.src, morphism.dst, kept)


def _check_size(word: str, engine: Engine) -> None:
    if engine.size_limit is not None and len(word) > engine.size_limit:
        raise SizeLimitError(f"word {word!r} exceeds the size limit {engine.size_limit}")


def _matrix(columns: List[List[Any]], size: int, domain) -> DomainMatrix:
    if size == 0:
        return DomainMatrix.zeros((0, 0), domain)
    rows = [[columns[j][i] for j in range(len(columns))] for i in range(size)]
    return DomainMatrix(rows, (size, len(columns)), domain)


def _nullity(matrix: DomainMatrix) -> int:
    return matrix.shape[1] - matrix.rank()


def _power_kernel_matrix(matrix: DomainMatrix, value: Any, domain) -> DomainMatrix:
    size = matrix.shape[0]
    shifted = matrix - DomainMatrix.diag([value] * size, domain)
    return shifted**size


@dataclass
class CornerAlgebra:
    """The cup/cap-free endomorphisms of ``word`` with products projected to its class."""

    word: str
    basis: List[NormalDiagram]
    engine: Engine
    _index: Dict[NormalDiagram, int] = field(default_factory=dict, repr=False)
    _table: Dict[Tuple[int, int], Dict[int, Any]] = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    def __post_init__(self):
        self._index = {d: i for i, d in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def bound(self) -> ClassIndex:
        return class_of(self.word)

    @property
    def domain(self):
        return self.engine.params.field

    def element(self, coords: Dict[int, Any]) -> Morphism:
        return Morphism.build(self.word, self.word, {self.basis[i]: c for i, c in coords.items()})

    def basis_element(self, index: int) -> Morphism:
        return self.engine.from_diagram(self.basis[index])

    def unit(self) -> Morphism:
        return self.engine.identity(self.word)

    def project(self, morphism: Morphism) -> Morphism:
        return project_leq(morphism, self.bound)

    def vector(self, element: Morphism) -> List[Any]:
        coords = [self.engine.params.zero] * self.dim
        for diagram, coeff in element.terms:
            if diagram not in self._index:
                raise CompositionError("element has terms outside the corner basis")
            coords[self._index[diagram]] = coeff
        return coords

    def _product(self, i: int, j: int) -> Dict[int, Any]:
        key = (i, j)
        with self._lock:
            cached = self._table.get(key)
        if cached is not None:
            return cached
        product = self.project(self.engine.compose(self.basis_element(i), self.basis_element(j)))
        row = {self._index[d]: c for d, c in product.terms}
        with self._lock:
            self._table[key] = row
        return row

    def multiply(self, x: Morphism, y: Morphism) -> Morphism:
        acc: Dict[int, Any] = {}
        zero = self.engine.params.zero
        x_coords = self.vector(self.project(x))
        y_coords = self.vector(self.project(y))
        for i, cx in enumerate(x_coords):
            if not cx:
                continue
            for j, cy in enumerate(y_coords):
                if not cy:
                    continue
                for k, value in self._product(i, j).items():
                    acc[k] = acc.get(k, zero) + cx * cy * value
        return self.element(acc)

    def power(self, x: Morphism, exponent: int) -> Morphism:
        result = self.unit()
        for _ in range(exponent):
            result = self.multiply(result, x)
        return result

    def structure_constants(self) -> Dict[Tuple[int, int], Dict[int, Any]]:
        return {(i, j): self._product(i, j) for i in range(self.dim) for j in range(self.dim)}

    def left_matrix(self, x: Morphism) -> DomainMatrix:
        columns = [self.vector(self.multiply(x, self.basis_element(j))) for j in range(self.dim)]
        return _matrix(columns, self.dim, self.domain)

    def is_commutative(self) -> bool:
        for i in range(self.dim):
            for j in range(i + 1, self.dim):
                if self._product(i, j) != self._product(j, i):
                    return False
        return True

    def is_associative(self, sample: Optional[int] = None, seed: int = 0) -> bool:
        triples = [
            (i, j, k) for i in range(self.dim) for j in range(self.dim) for k in range(self.dim)
        ]
        if sample is not None and sample < len(triples):
            triples = random.Random(seed).sample(triples, sample)
        for i, j, k in triples:
            x, y, z = self.basis_element(i), self.basis_element(j), self.basis_element(k)
            if self.multiply(self.multiply(x, y), z) != self.multiply(x, self.multiply(y, z)):
                return False
        return True


def corner_algebra(word: str, engine: Engine) -> CornerAlgebra:
    _check_size(word, engine)
    basis = enumerate_yhx(SubsetKind.H, word, word, engine.params.level, engine.size_limit)
    logger.debug("corner_algebra_built", word=word, dim=len(basis))
    return CornerAlgebra(word=word, basis=basis, engine=engine)


def sigma_transport(morphism: Morphism, c: str, d: str, engine: Engine) -> Morphism:
    """Conjugate an element of the quotient Hom(b, a) into Hom(d, c) by sigma diagrams."""
    a, b = morphism.dst, morphism.src
    if class_of(a) != class_of(c) or class_of(b) != class_of(d):
        raise CompositionError(f"cannot transport {b!r}->{a!r} to {d!r}->{c!r}")
    if class_of(a) != class_of(b):
        raise CompositionError("transport is defined inside a single class")
    left = engine.from_diagram(sigma(c, a))
    right = engine.from_diagram(sigma(b, d))
    return project_leq(engine.compose(left, engine.compose(morphism, right)), class_of(a))


def dot_matrix(a: str, b: str, i: int, engine: Engine) -> DomainMatrix:
    """Matrix of post-composition with a dot on strand ``i`` (1-based) on the basis of Hom(b, a)."""
    if not 1 <= i <= len(a):
        raise ParameterError(f"strand index {i} out of range for {a!r}")
    basis = engine.basis(b, a)
    index = {d: k for k, d in enumerate(basis)}
    layer = dot_at(a, i - 1)
    zero = engine.params.zero
    columns = []
    for diagram in basis:
        column = [zero] * len(basis)
        for target, value in engine.append(diagram, layer).items():
            column[index[target]] = value
        columns.append(column)
    return _matrix(columns, len(basis), engine.params.field)


def candidate_eigenvalues(engine: Engine, radius: int) -> List[Any]:
    params = engine.params
    values = {c + params.scalar(n) for c in params.charges for n in range(-radius, radius + 1)}
    return sorted(values, key=params.sort_key)


def generalized_eigenvalues(
    matrix: DomainMatrix, candidates: Sequence[Any], domain
) -> Dict[Any, int]:
    """Multiplicity of each candidate as a generalized eigenvalue."""
    found = {}
    for value in candidates:
        mult = _nullity(_power_kernel_matrix(matrix, value, domain))
        if mult:
            found[value] = mult
    return found


@dataclass
class EigenProfile:
    word: str
    table: Dict[Tuple[Any, ...], int]
    dim: int

    @property
    def total(self) -> int:
        return sum(self.table.values())

    def rows(self, fmt) -> List[Dict[str, Any]]:
        return [
            {"word": self.word, "colors": [fmt(c) for c in colors], "multiplicity": mult}
            for colors, mult in self.table.items()
        ]


def eigen_profile(a: str, b: str, engine: Engine) -> EigenProfile:
    """Simultaneous generalized eigenspace dimensions of X_1..X_|a| on Hom(b, a)."""
    params = engine.params
    domain = params.field
    dim = len(engine.basis(b, a))
    if dim == 0:
        return EigenProfile(a, {}, 0)
    if not a:
        return EigenProfile(a, {(): dim}, dim)

    candidates = candidate_eigenvalues(engine, len(a) + len(b))
    per_strand = []
    for i in range(1, len(a) + 1):
        matrix = dot_matrix(a, b, i, engine)
        kernels = []
        for value in candidates:
            powered = _power_kernel_matrix(matrix, value, domain)
            if _nullity(powered):
                kernels.append((value, powered))
        per_strand.append(kernels)

    table: Dict[Tuple[Any, ...], int] = {}

    def search(depth: int, colors: Tuple[Any, ...], stacked: Optional[DomainMatrix]) -> None:
        if depth == len(per_strand):
            mult = _nullity(stacked)
            if mult:
                table[colors] = mult
            return
        for value, powered in per_strand[depth]:
            combined = powered if stacked is None else stacked.vstack(powered)
            if _nullity(combined):
                search(depth + 1, colors + (value,), combined)

    search(0, (), None)
    profile = EigenProfile(a, table, dim)
    if profile.total != dim:
        logger.warning("eigen_profile_incomplete", word=a, src=b, found=profile.total, dim=dim)
    return profile


def std_dim(shape: Bipartition, a: str, engine: Engine) -> int:
    """Dimension of the a-weight space of the standard module of ``shape``."""
    cls = shape.class_index
    level = engine.params.level
    total = 0
    for b in words_in_class(cls, engine.size_limit):
        total += len(enumerate_yhx(SubsetKind.Y, a, b, level, engine.size_limit))
    return total * syt_count(shape.down) * syt_count(shape.up)


def morita_dimension_check(r: int, s: int, engine: Engine) -> Dict[str, Any]:
    """Sum of |H(a, b)| over a class against C(r+s, r)^2 times the corner dimension."""
    cls = ClassIndex(r=r, s=s)
    level = engine.params.level
    words = words_in_class(cls, engine.size_limit)
    total = sum(
        len(enumerate_yhx(SubsetKind.H, a, b, level, engine.size_limit))
        for a in words
        for b in words
    )
    corner = len(enumerate_yhx(SubsetKind.H, "d" * r + "u" * s, "d" * r + "u" * s, level))
    expected = comb(r + s, r) ** 2 * corner
    return {"r": r, "s": s, "total": total, "expected": expected, "passed": total == expected}


def i_restriction_profile(word: str, engine: Engine) -> Dict[Any, int]:
    """Generalized eigenvalues of the last-strand dot acting on the corner algebra of ``word``."""
    if not word:
        return {}
    algebra = corner_algebra(word, engine)
    dot = algebra.project(engine.eval(LayerWord(word, (dot_at(word, len(word) - 1),))))
    matrix = algebra.left_matrix(dot)
    candidates = candidate_eigenvalues(engine, len(word))
    return generalized_eigenvalues(matrix, candidates, engine.params.field)
