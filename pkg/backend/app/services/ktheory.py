"""
K-Theory Service - weights, Chevalley operators on standard classes and checks
Obrauer - Cyclotomic Oriented Brauer Engine

Standard classes are indexed by bipartitions. ``f`` adds a box to the up side or
removes one from the down side; ``e`` does the opposite. Weights are formal
combinations of fundamental weights and simple roots indexed by residues.
"""

from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Optional, Tuple

import structlog
from sympy.polys.domains import QQ
from sympy.polys.matrices import DomainMatrix

from app.services.combinatorics import (
    Bipartition,
    Box,
    Side,
    all_bipartitions,
    content,
)
from app.services.ground import Params, is_integral

logger = structlog.get_logger()


class Op(str, Enum):
    E = "e"
    F = "f"


class Sector(str, Enum):
    TOTAL = "total"
    UP = "up"
    DOWN = "down"


def cartan(i: Any, j: Any, params: Params) -> int:
    if i == j:
        return 2
    one = params.one
    if params.char == 2 and i == j - one:
        return -2
    if i == j - one or i == j + one:
        return -1
    return 0


def _clean(mapping: Dict[Any, int]) -> Dict[Any, int]:
    return {k: v for k, v in mapping.items() if v}


@dataclass(frozen=True)
class Weight:
    fund: Dict[Any, int] = field(default_factory=dict)
    roots: Dict[Any, int] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "fund", _clean(self.fund))
        object.__setattr__(self, "roots", _clean(self.roots))

    def __add__(self, other: "Weight") -> "Weight":
        fund, roots = Counter(self.fund), Counter(self.roots)
        for k, v in other.fund.items():
            fund[k] += v
        for k, v in other.roots.items():
            roots[k] += v
        return Weight(dict(fund), dict(roots))

    def __neg__(self) -> "Weight":
        return Weight({k: -v for k, v in self.fund.items()}, {k: -v for k, v in self.roots.items()})

    def __sub__(self, other: "Weight") -> "Weight":
        return self + (-other)

    def __hash__(self) -> int:
        return hash((frozenset(self.fund.items()), frozenset(self.roots.items())))

    def pairing(self, residue: Any, params: Params) -> int:
        """<h_i, weight> = fund(i) + sum_j roots(j) a_{i,j}."""
        total = self.fund.get(residue, 0)
        for j, coeff in self.roots.items():
            total += coeff * cartan(residue, j, params)
        return total

    def to_dict(self, params: Params) -> Dict[str, Dict[str, int]]:
        def render(mapping):
            items = sorted(mapping.items(), key=lambda kv: params.sort_key(kv[0]))
            return {params.fmt(k): v for k, v in items}

        return {"fund": render(self.fund), "roots": render(self.roots)}


def fundamental(residue: Any, coeff: int = 1) -> Weight:
    return Weight(fund={residue: coeff})


def simple_root(residue: Any, coeff: int = 1) -> Weight:
    return Weight(roots={residue: coeff})


def _charge_weight(charges: Iterable[Any]) -> Weight:
    total = Weight()
    for c in charges:
        total = total + fundamental(c)
    return total


def wt(shape: Bipartition, params: Params) -> Tuple[Weight, Weight]:
    """(wt_down, wt_up) of a bipartition."""
    down = -_charge_weight(params.uprime)
    for j, row, col in shape.down.boxes():
        down = down + simple_root(content(Box(Side.DOWN, j, row, col), params))
    up = _charge_weight(params.u)
    for j, row, col in shape.up.boxes():
        up = up - simple_root(content(Box(Side.UP, j, row, col), params))
    return down, up


def dominance_leq(x: Weight, y: Weight) -> bool:
    """x <= y when y - x is a non-negative combination of simple roots."""
    diff = y - x
    return not diff.fund and all(v >= 0 for v in diff.roots.values())


def inverse_dominance_leq(x: Tuple[Weight, Weight], y: Tuple[Weight, Weight]) -> bool:
    """x precedes y when the totals agree and y's down part is dominated by x's."""
    if x[0] + x[1] != y[0] + y[1]:
        return False
    return dominance_leq(y[0], x[0])


@dataclass
class KVector:
    terms: Dict[Bipartition, Any] = field(default_factory=dict)
    truncated: bool = False

    @classmethod
    def basis(cls, shape: Bipartition) -> "KVector":
        return cls({shape: QQ.one})

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def add(self, shape: Bipartition, coeff: Any) -> None:
        value = self.terms.get(shape, QQ.zero) + coeff
        if value:
            self.terms[shape] = value
        else:
            self.terms.pop(shape, None)

    def __add__(self, other: "KVector") -> "KVector":
        out = KVector(dict(self.terms), self.truncated or other.truncated)
        for shape, coeff in other.terms.items():
            out.add(shape, coeff)
        return out

    def __sub__(self, other: "KVector") -> "KVector":
        return self + other.scale(-QQ.one)

    def scale(self, scalar: Any) -> "KVector":
        out = KVector(truncated=self.truncated)
        for shape, coeff in self.terms.items():
            out.add(shape, coeff * scalar)
        return out

    def coefficient(self, shape: Bipartition) -> Any:
        return self.terms.get(shape, QQ.zero)

    def to_list(self) -> List[Dict[str, Any]]:
        rows = []
        for shape in sorted(self.terms):
            coeff = self.terms[shape]
            num, den = int(coeff.numerator), int(coeff.denominator)
            text = str(num) if den == 1 else f"{num}/{den}"
            rows.append({"shape": shape.to_list(), "coeff": text})
        return rows


def _sector_moves(
    op: Op, sector: Sector, residue: Any, shape: Bipartition, params: Params
) -> List[Bipartition]:
    """Targets of one operator on one bipartition, each with multiplicity one."""
    out = []
    grow_up = op == Op.F
    if sector in (Sector.TOTAL, Sector.UP):
        part = shape.up
        boxes = part.addable() if grow_up else part.removable()
        for j, row, col in boxes:
            if content(Box(Side.UP, j, row, col), params) == residue:
                out.append(shape.replace(Side.UP, part.with_box(j, row, 1 if grow_up else -1)))
    if sector in (Sector.TOTAL, Sector.DOWN):
        part = shape.down
        boxes = part.removable() if grow_up else part.addable()
        for j, row, col in boxes:
            if content(Box(Side.DOWN, j, row, col), params) == residue:
                out.append(shape.replace(Side.DOWN, part.with_box(j, row, -1 if grow_up else 1)))
    return out


def apply_op(
    op: Op,
    sector: Sector,
    residue: Any,
    vector: KVector,
    params: Params,
    truncation: Optional[int] = None,
) -> KVector:
    """Linear action of e_i or f_i; terms beyond the truncation are dropped and flagged."""
    op, sector = Op(op), Sector(sector)
    out = KVector(truncated=vector.truncated)
    for shape, coeff in vector.terms.items():
        for target in _sector_moves(op, sector, residue, shape, params):
            if truncation is not None and target.size > truncation:
                out.truncated = True
                continue
            out.add(target, coeff)
    if out.truncated and not vector.truncated:
        logger.warning("k_vector_truncated", op=op.value, sector=sector.value, bound=truncation)
    return out


def residue_window(params: Params, radius: int) -> List[Any]:
    """Charges shifted by every integer of absolute value at most ``radius``."""
    values = {
        c + params.scalar(n)
        for c in params.u + params.uprime
        for n in range(-radius, radius + 1)
    }
    return sorted(values, key=params.sort_key)


def op_matrix(
    op: Op, sector: Sector, residue: Any, truncation: int, params: Params
) -> Tuple[List[Bipartition], DomainMatrix]:
    """Matrix of an operator on the classes of size at most ``truncation``."""
    basis = all_bipartitions(truncation, params.level)
    index = {shape: k for k, shape in enumerate(basis)}
    rows = [[QQ.zero] * len(basis) for _ in basis]
    for col, shape in enumerate(basis):
        image = apply_op(op, sector, residue, KVector.basis(shape), params, truncation)
        for target, coeff in image.terms.items():
            rows[index[target]][col] = coeff
    return basis, DomainMatrix(rows, (len(basis), len(basis)), QQ)


def transpose_check(residue: Any, truncation: int, params: Params) -> bool:
    """e_i is the transpose of f_i on the truncated standard basis."""
    for sector in Sector:
        _, e_matrix = op_matrix(Op.E, sector, residue, truncation, params)
        _, f_matrix = op_matrix(Op.F, sector, residue, truncation, params)
        if e_matrix != f_matrix.transpose():
            return False
    return True


@dataclass
class CommutatorFailure:
    shape: Bipartition
    expected: KVector
    actual: KVector

    def to_dict(self) -> Dict[str, Any]:
        return {
            "shape": self.shape.to_list(),
            "expected": self.expected.to_list(),
            "actual": self.actual.to_list(),
        }


def commutator_check(
    i: Any, j: Any, truncation: int, params: Params, sector: Sector = Sector.TOTAL
) -> Dict[str, Any]:
    """(e_i f_j - f_j e_i) against the weight pairing on every class of size at most N."""
    sector = Sector(sector)
    bound = truncation + 2
    failures = []
    shapes = all_bipartitions(truncation, params.level)
    for shape in shapes:
        v = KVector.basis(shape)
        ef = apply_op(Op.E, sector, i, apply_op(Op.F, sector, j, v, params, bound), params, bound)
        fe = apply_op(Op.F, sector, j, apply_op(Op.E, sector, i, v, params, bound), params, bound)
        actual = ef - fe
        actual.truncated = False
        expected = KVector()
        if i == j:
            down, up = wt(shape, params)
            if sector == Sector.TOTAL:
                weight = down + up
            else:
                weight = up if sector == Sector.UP else down
            expected.add(shape, QQ(weight.pairing(i, params)))
        if actual.terms != expected.terms:
            failures.append(CommutatorFailure(shape, expected, actual))
    logger.info(
        "commutator_checked",
        i=params.fmt(i),
        j=params.fmt(j),
        shapes=len(shapes),
        failures=len(failures),
    )
    return {
        "i": params.fmt(i),
        "j": params.fmt(j),
        "sector": sector.value,
        "truncation": truncation,
        "checked": len(shapes),
        "failures": [f.to_dict() for f in failures],
        "passed": not failures,
    }


def highest_lowest_check(truncation: int, params: Params) -> bool:
    """e_i on the up side and f_i on the down side both kill the empty bipartition."""
    empty = KVector.basis(Bipartition.empty(params.level))
    for residue in residue_window(params, truncation):
        if not apply_op(Op.E, Sector.UP, residue, empty, params).is_zero:
            return False
        if not apply_op(Op.F, Sector.DOWN, residue, empty, params).is_zero:
            return False
    return True


def weight_of_edge_check(truncation: int, params: Params) -> bool:
    """Every f-edge lowers the weight of the acted side by the simple root."""
    for shape in all_bipartitions(truncation, params.level):
        down, up = wt(shape, params)
        for residue in residue_window(params, truncation + 1):
            alpha = simple_root(residue)
            for target in _sector_moves(Op.F, Sector.UP, residue, shape, params):
                if wt(target, params) != (down, up - alpha):
                    return False
            for target in _sector_moves(Op.F, Sector.DOWN, residue, shape, params):
                if wt(target, params) != (down - alpha, up):
                    return False
    return True


def _integral_difference(x: Any, y: Any, params: Params) -> bool:
    return is_integral(x - y, params.char)


def projective_equals_standard(params: Params) -> bool:
    """No up charge is an integer translate of a down charge."""
    return not any(
        _integral_difference(a, b, params) for a in params.u for b in params.uprime
    )


def semisimple_check(params: Params) -> Dict[str, Any]:
    reasons = []
    mixed_ok = projective_equals_standard(params)
    if not mixed_ok:
        if params.char:
            reasons.append(
                "condition (1) fails: in positive characteristic every difference of "
                "prime-field charges is an integer multiple of 1"
            )
        else:
            reasons.append("condition (1) fails: some u_i - u'_j is an integer")
    same_ok = True
    if params.char == 0:
        for label, charges in (("u", params.u), ("u'", params.uprime)):
            for a in range(len(charges)):
                for b in range(a + 1, len(charges)):
                    if _integral_difference(charges[a], charges[b], params):
                        same_ok = False
                        reasons.append(
                            f"condition (2) fails: {label}_{a + 1} - {label}_{b + 1} is an integer"
                        )
    verdict = mixed_ok and same_ok
    logger.debug("semisimple_checked", params=params.describe(), semisimple=verdict)
    return {
        "semisimple": verdict,
        "condition_1": mixed_ok,
        "condition_2": same_ok,
        "projective_equals_standard": mixed_ok,
        "reasons": reasons,
    }


def orbit_decomposition(params: Params) -> Dict[str, Any]:
    """Charges grouped by integer translation."""
    labelled = [(f"u{k + 1}", c) for k, c in enumerate(params.u)]
    labelled += [(f"u'{k + 1}", c) for k, c in enumerate(params.uprime)]
    orbits: List[List[Tuple[str, Any]]] = []
    for label, value in labelled:
        for orbit in orbits:
            if _integral_difference(orbit[0][1], value, params):
                orbit.append((label, value))
                break
        else:
            orbits.append([(label, value)])
    algebra = "sl_infinity" if params.char == 0 else f"affine_sl_{params.char}"
    return {
        "algebra": algebra,
        "copies": len(orbits),
        "orbits": [
            {"members": [label for label, _ in orbit], "values": [params.fmt(v) for _, v in orbit]}
            for orbit in orbits
        ],
    }
