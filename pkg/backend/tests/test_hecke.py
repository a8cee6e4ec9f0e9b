from itertools import permutations

import pytest
from sympy.polys.domains import QQ

from app.core.exceptions import ParameterError
from app.services.combinatorics import Side
from app.services.hecke import (
    HeckeGen,
    check_hecke_relations,
    corner_word,
    hecke_basis_images,
    hecke_generator_image,
    hecke_params,
    hecke_span_rank,
    jm_spectrum,
    jucys_murphy,
    reduced_word,
)
from app.services.towers import corner_algebra

SMALL_CORNERS = [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]


def _inversions(perm):
    return sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])


class TestGenerators:
    def test_corner_word_puts_up_strands_first(self):
        assert corner_word(2, 1) == "uud"
        with pytest.raises(ParameterError):
            corner_word(-1, 0)

    def test_down_charges_are_negated(self, engine_p3):
        assert hecke_params(engine_p3, Side.DOWN, 0, 2).charges == (QQ(-5),)
        assert hecke_params(engine_p3, Side.UP, 1, 0).size == 1

    def test_first_down_jucys_murphy_is_minus_the_dot(self, engine_p2):
        image = hecke_generator_image(HeckeGen.L1_DOWN, 0, 1, engine_p2)
        algebra = corner_algebra("d", engine_p2)
        assert algebra.vector(image) == [QQ(0), QQ(-1)]

    def test_jucys_murphy_starts_at_the_generator(self, engine_p2):
        first = jucys_murphy(1, 2, 0, Side.UP, engine_p2)
        assert first == hecke_generator_image(HeckeGen.L1_UP, 2, 0, engine_p2)

    @pytest.mark.parametrize(
        "gen,r,s,index",
        [
            (HeckeGen.L1_UP, 0, 1, 1),
            (HeckeGen.L1_DOWN, 1, 0, 1),
            (HeckeGen.S_UP, 1, 1, 1),
            (HeckeGen.S_DOWN, 0, 2, 2),
        ],
    )
    def test_out_of_range(self, engine_p1, gen, r, s, index):
        with pytest.raises(ParameterError):
            hecke_generator_image(gen, r, s, engine_p1, index)


class TestRelations:
    @pytest.mark.parametrize("engine_name", ["engine_p1", "engine_p2", "engine_p3"])
    @pytest.mark.parametrize("r,s", SMALL_CORNERS)
    def test_small_corners(self, engine_name, r, s, request):
        engine = request.getfixturevalue(engine_name)
        checks = check_hecke_relations(r, s, engine)
        assert checks
        assert [c.relation for c in checks if not c.passed] == []

    def test_relation_names(self, engine_p1):
        names = {c.relation for c in check_hecke_relations(2, 1, engine_p1)}
        assert {"cyclotomic-up", "square-up", "jm-pair-up", "factors-commute"} <= names

    @pytest.mark.slow
    @pytest.mark.parametrize("r,s", [(3, 0), (2, 1), (1, 2), (0, 3)])
    def test_larger_corners(self, engine_p1, r, s):
        assert all(c.passed for c in check_hecke_relations(r, s, engine_p1))


class TestBasis:
    def test_reduced_words(self):
        assert reduced_word((0, 1)) == []
        assert reduced_word((1, 0)) == [1]
        for n in (3, 4):
            for perm in permutations(range(n)):
                assert len(reduced_word(perm)) == _inversions(perm)

    @pytest.mark.parametrize("r,s", SMALL_CORNERS)
    def test_images_span_the_corner(self, engine_p2, r, s):
        report = hecke_span_rank(r, s, engine_p2)
        assert report["images"] == report["dim"] == report["rank"]

    def test_image_count(self, engine_p1):
        assert len(hecke_basis_images(2, 1, engine_p1)) == 2


class TestSpectrum:
    def test_second_jucys_murphy_element(self, engine_p3):
        assert jm_spectrum(2, 2, 0, Side.UP, engine_p3) == {QQ(-1): 1, QQ(1): 1}

    def test_first_element_sees_the_charges(self, engine_p2):
        assert jm_spectrum(1, 1, 0, Side.UP, engine_p2) == {QQ(0): 1, QQ(2): 1}
        assert jm_spectrum(1, 0, 1, Side.DOWN, engine_p2) == {QQ(-1): 1, QQ(0): 1}

    def test_index_out_of_range(self, engine_p1):
        with pytest.raises(ParameterError):
            jm_spectrum(2, 1, 0, Side.UP, engine_p1)
