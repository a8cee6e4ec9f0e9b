import pytest
from sympy.polys.domains import QQ

from app.services.combinatorics import Bipartition, parse_shape
from app.services.ground import make_params
from app.services.ktheory import (
    KVector,
    Op,
    Sector,
    apply_op,
    cartan,
    commutator_check,
    fundamental,
    highest_lowest_check,
    inverse_dominance_leq,
    orbit_decomposition,
    residue_window,
    semisimple_check,
    simple_root,
    transpose_check,
    weight_of_edge_check,
    wt,
)

EMPTY = Bipartition.empty(1)


def test_cartan():
    p0 = make_params(1, 0, ["0"], ["0"])
    p2 = make_params(1, 2, ["0"], ["0"])
    zero, one = p0.scalar(0), p0.scalar(1)
    assert cartan(zero, zero, p0) == 2
    assert cartan(zero, one, p0) == -1
    assert cartan(zero, p0.scalar(3), p0) == 0
    assert cartan(p2.scalar(0), p2.scalar(1), p2) == -2


class TestWeights:
    def test_empty_and_single_box_weights(self, p3):
        down, up = wt(EMPTY, p3)
        assert down == -fundamental(QQ(5)) and up == fundamental(QQ(0))
        assert wt(parse_shape("[[], [1]]", 1), p3)[1] == fundamental(QQ(0)) - simple_root(QQ(0))
        assert wt(parse_shape("[[1], []]", 1), p3)[0] == -fundamental(QQ(5)) + simple_root(QQ(5))

    def test_pairing_and_rendering(self, p3):
        down, up = wt(EMPTY, p3)
        total = down + up
        assert total.pairing(QQ(0), p3) == 1
        assert total.pairing(QQ(5), p3) == -1
        assert (up - simple_root(QQ(0))).pairing(QQ(0), p3) == -1
        assert total.to_dict(p3) == {"fund": {"0": 1, "5": -1}, "roots": {}}

    def test_inverse_dominance(self):
        params = make_params(1, 0, ["0"], ["0"])
        empty = wt(EMPTY, params)
        both = wt(parse_shape("[[1], [1]]", 1), params)
        assert inverse_dominance_leq(both, empty)
        assert not inverse_dominance_leq(empty, both)
        assert inverse_dominance_leq(empty, empty)
        up_only = wt(parse_shape("[[], [1]]", 1), params)
        down_only = wt(parse_shape("[[1], []]", 1), params)
        assert not inverse_dominance_leq(up_only, down_only)


class TestOperators:
    def test_single_box_moves(self, p3):
        v = KVector.basis(EMPTY)
        f0 = apply_op(Op.F, Sector.TOTAL, QQ(0), v, p3)
        assert f0.terms == {parse_shape("[[], [1]]", 1): QQ(1)}
        assert apply_op(Op.E, Sector.TOTAL, QQ(0), v, p3).is_zero
        assert apply_op(Op.F, Sector.TOTAL, QQ(5), v, p3).is_zero
        e5 = apply_op("e", "total", QQ(5), v, p3)
        assert e5.to_list() == [{"shape": [[[1]], [[]]], "coeff": "1"}]

    def test_truncation_is_flagged(self, p3):
        v = KVector.basis(parse_shape("[[], [1]]", 1))
        out = apply_op(Op.F, Sector.UP, QQ(1), v, p3, truncation=1)
        assert out.is_zero and out.truncated

    def test_vector_arithmetic(self, p3):
        v = KVector.basis(EMPTY)
        assert (v + v).coefficient(EMPTY) == QQ(2)
        assert (v - v).is_zero
        assert v.scale(QQ(3)).coefficient(EMPTY) == QQ(3)

    def test_window(self, p3):
        window = residue_window(p3, 1)
        assert [p3.fmt(x) for x in window] == ["-1", "0", "1", "4", "5", "6"]


class TestCommutators:
    def test_documented_cases(self, p3):
        assert commutator_check(QQ(0), QQ(0), 0, p3)["passed"]
        report = commutator_check(QQ(0), QQ(1), 0, p3)
        assert report["passed"] and report["checked"] == 1

    @pytest.mark.parametrize("name", ["p1", "p2", "p3"])
    @pytest.mark.parametrize("sector", list(Sector))
    def test_diagonal_commutators(self, name, sector, request):
        params = request.getfixturevalue(name)
        for residue in residue_window(params, 2):
            report = commutator_check(residue, residue, 2, params, sector)
            assert report["passed"], report["failures"]

    def test_off_diagonal_commutators(self, p2):
        window = residue_window(p2, 1)
        for i in window:
            for j in window:
                if i != j:
                    assert commutator_check(i, j, 2, p2)["passed"]

    def test_positive_characteristic(self):
        params = make_params(1, 5, ["0"], ["3"])
        for residue in residue_window(params, 2):
            assert commutator_check(residue, residue, 3, params)["passed"]

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["p1", "p2", "p3"])
    def test_all_pairs_up_to_four_boxes(self, name, request):
        params = request.getfixturevalue(name)
        window = residue_window(params, 4)
        for i in window:
            for j in window:
                assert commutator_check(i, j, 4, params)["passed"]


class TestStructureChecks:
    @pytest.mark.parametrize("name", ["p1", "p2", "p3"])
    def test_transpose_highest_and_edges(self, name, request):
        params = request.getfixturevalue(name)
        assert all(transpose_check(r, 2, params) for r in residue_window(params, 2))
        assert highest_lowest_check(3, params)
        assert weight_of_edge_check(2, params)


class TestSemisimplicity:
    def test_half_integer_shift_is_semisimple(self):
        report = semisimple_check(make_params(1, 0, ["0"], ["1/2"]))
        assert report["semisimple"] and report["projective_equals_standard"]
        assert report["reasons"] == []

    def test_integral_mixed_difference(self):
        report = semisimple_check(make_params(1, 0, ["0"], ["3"]))
        assert not report["semisimple"] and not report["condition_1"]
        assert report["reasons"][0].startswith("condition (1) fails")

    def test_integral_same_side_difference(self):
        report = semisimple_check(make_params(2, 0, ["0", "1"], ["1/2", "7/3"]))
        assert not report["semisimple"]
        assert report["condition_1"] and not report["condition_2"]
        assert report["reasons"] == ["condition (2) fails: u_1 - u_2 is an integer"]

    def test_positive_characteristic_is_never_semisimple(self):
        report = semisimple_check(make_params(1, 5, ["0"], ["3"]))
        assert not report["condition_1"]


class TestOrbits:
    def test_single_orbit(self):
        report = orbit_decomposition(make_params(1, 0, ["0"], ["3"]))
        assert report["algebra"] == "sl_infinity" and report["copies"] == 1
        assert report["orbits"] == [{"members": ["u1", "u'1"], "values": ["0", "3"]}]

    def test_two_orbits(self):
        assert orbit_decomposition(make_params(1, 0, ["0"], ["1/2"]))["copies"] == 2

    def test_affine_type(self):
        report = orbit_decomposition(make_params(1, 5, ["0"], ["3"]))
        assert report["algebra"] == "affine_sl_5" and report["copies"] == 1
