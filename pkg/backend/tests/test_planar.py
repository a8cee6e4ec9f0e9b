import pytest
from sympy.polys.domains import QQ

from app.core.exceptions import CompositionError
from app.services.diagrams import BOTTOM, TOP, identity_diagram, make_diagram
from app.services.planar import (
    Gen,
    Layer,
    LayerWord,
    Normalizer,
    PlanarDiagram,
    apply_layer,
    crossing_at,
)


def test_apply_layer():
    assert apply_layer("u", Layer(1, Gen.CUP_R)) == "uud"
    assert apply_layer("udu", Layer(1, Gen.CAP_R)) == "u"
    assert apply_layer("ud", Layer(0, Gen.CROSS_UD)) == "du"
    assert crossing_at("dud", 1).generator == Gen.CROSS_UD
    with pytest.raises(CompositionError):
        apply_layer("uu", Layer(0, Gen.CAP_L))
    with pytest.raises(CompositionError):
        apply_layer("d", Layer(0, Gen.DOT_UP))


def test_layer_word_words():
    layer_word = LayerWord("", (Layer(0, Gen.CUP_L), Layer(2, Gen.CUP_R)))
    assert layer_word.words() == ["", "du", "duud"]
    assert layer_word.then(Layer(2, Gen.CAP_L)).dst == "du"
    with pytest.raises(CompositionError):
        layer_word.then(Layer(1, Gen.CAP_L)).dst


def test_planar_diagram_separates_dots():
    layer_word = LayerWord("u", (Layer(0, Gen.DOT_UP), Layer(1, Gen.CUP_R), Layer(0, Gen.DOT_UP)))
    planar = PlanarDiagram.from_layer_word(layer_word)
    assert planar.layers == (Layer(1, Gen.CUP_R),)
    assert planar.dots == ((0, 0, 1), (1, 0, 1))


class TestNormalizer:
    def test_zigzag_straightens(self, p2):
        layer_word = LayerWord("u", (Layer(0, Gen.CUP_R), Layer(1, Gen.CAP_R)))
        assert Normalizer(p2).normalize_layer_word(layer_word) == {identity_diagram("u"): QQ(1)}

    def test_dot_above_crossing_is_normal(self, p2):
        layer_word = LayerWord("uu", (Layer(0, Gen.CROSS_UU), Layer(1, Gen.DOT_UP)))
        crossing = make_diagram("uu", "uu", [((BOTTOM, 0), (TOP, 1)), ((BOTTOM, 1), (TOP, 0))])
        dotted = make_diagram("uu", "uu", crossing.pairs, [1, 0])
        assert Normalizer(p2).normalize_layer_word(layer_word) == {dotted: QQ(1)}

    def test_results_are_memoized(self, p1):
        normalizer = Normalizer(p1)
        layer_word = LayerWord("", (Layer(0, Gen.CUP_R), Layer(0, Gen.CAP_L)))
        first = normalizer.normalize_layer_word(layer_word)
        assert normalizer.cache_size == 1
        assert normalizer.normalize_layer_word(layer_word) is first
