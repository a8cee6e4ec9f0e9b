import random

import pytest
from sympy.polys.domains import QQ

from app.core.exceptions import CompositionError, RelationError
from app.services.diagrams import BOTTOM, TOP, identity_diagram, make_diagram, tau
from app.services.planar import CAPS, CROSSINGS, CUPS, Gen, Layer, LayerWord, dot_at
from app.services.straighten import (
    CORE_RELATIONS,
    contexts,
    format_context,
    lookup_relation,
    relation_catalog,
    slice_diagram,
)

SMALL_TYPES = [
    ("", ""),
    ("", "ud"),
    ("du", ""),
    ("u", "u"),
    ("d", "d"),
    ("ud", "ud"),
    ("ud", "du"),
    ("uu", "uu"),
    ("dd", "dd"),
    ("uud", "u"),
    ("d", "ddu"),
    ("", "udud"),
]


def random_layer_word(rng, src, length):
    """A random stack of generators that fits on ``src``."""
    layers = []
    word = src
    for _ in range(length):
        options = [Layer(p, g) for g in CUPS for p in range(len(word) + 1)]
        for p in range(len(word) - 1):
            pair = word[p : p + 2]
            fitting = {**CAPS, **CROSSINGS}
            options += [Layer(p, g) for g, letters in fitting.items() if letters == pair]
        options += [dot_at(word, p) for p in range(len(word))]
        layer = rng.choice(options)
        layers.append(layer)
        word = LayerWord(word, (layer,)).dst
    return LayerWord(src, tuple(layers))


def words_up_to(length):
    words, layer = [""], [""]
    for _ in range(length):
        layer = [w + letter for w in layer for letter in "du"]
        words += layer
    return words


def types_up_to(endpoints):
    words = words_up_to(endpoints)
    return [(a, b) for a in words for b in words if len(a) + len(b) <= endpoints]


# chains a -> b -> c -> d of morphism types with matching orientation count
CHAINS = [
    ("u", "uud", "udu", "u"),
    ("", "ud", "du", ""),
    ("ud", "du", "ud", "du"),
    ("d", "ddu", "dud", "d"),
    ("", "udud", "ud", ""),
    ("du", "", "ud", "uddu"),
]


def random_chain(engine, rng):
    words = rng.choice(CHAINS)
    return [
        engine.from_diagram(rng.choice(engine.basis(src, dst)))
        for src, dst in zip(words, words[1:])
    ]


class TestCatalog:
    def test_catalog_contents(self):
        catalog = relation_catalog()
        assert catalog[: len(CORE_RELATIONS)] == CORE_RELATIONS
        assert "bubble-cw-2" in catalog and "cyclotomic-down" in catalog
        assert len(catalog) == 27

    def test_lookup(self):
        assert lookup_relation("bubble-ccw-7").left_edge
        with pytest.raises(RelationError):
            lookup_relation("rel-99")

    def test_contexts(self):
        assert len(contexts(1)) == 5
        assert all(left == "" for left, _ in contexts(2, left_edge=True))
        assert format_context("", "ud") == "-|ud"


class TestRelations:
    @pytest.mark.parametrize("engine_name", ["engine_p1", "engine_p2", "engine_p3"])
    def test_all_relations_hold_in_short_contexts(self, engine_name, request):
        engine = request.getfixturevalue(engine_name)
        checks = engine.verify_relations(max_context=1)
        failed = [(c.relation, c.context) for c in checks if not c.passed]
        assert failed == []

    @pytest.mark.slow
    @pytest.mark.parametrize("engine_name", ["engine_p1", "engine_p2"])
    def test_all_relations_hold_in_longer_contexts(self, engine_name, request):
        checks = request.getfixturevalue(engine_name).verify_relations(max_context=2)
        failed = [(c.relation, c.context) for c in checks if not c.passed]
        assert failed == []

    def test_sampled_contexts(self, engine_p1):
        checks = engine_p1.verify_relations(["rel-3", "bubble-cw-0"], max_context=2, sample=2)
        assert [c.relation for c in checks] == ["rel-3"] * 2 + ["bubble-cw-0"] * 2
        assert checks[0].to_dict().keys() == {"relation", "context", "pass"}

    def test_left_edge_relations_refuse_left_context(self, engine_p1):
        with pytest.raises(RelationError):
            engine_p1.verify_relation("cyclotomic-up", left="u")


class TestNormalForms:
    @pytest.mark.parametrize("engine_name", ["engine_p1", "engine_p2"])
    def test_slicing_round_trip(self, engine_name, request):
        engine = request.getfixturevalue(engine_name)
        for src, dst in SMALL_TYPES:
            for diagram in engine.basis(src, dst):
                layer_word = slice_diagram(diagram)
                assert layer_word.src == src and layer_word.dst == dst
                assert engine.eval(layer_word) == engine.from_diagram(diagram)

    @pytest.mark.slow
    @pytest.mark.parametrize("engine_name", ["engine_p1", "engine_p2"])
    def test_slicing_round_trip_up_to_six_endpoints(self, engine_name, request):
        engine = request.getfixturevalue(engine_name)
        for src, dst in types_up_to(6):
            for diagram in engine.basis(src, dst):
                assert engine.eval(slice_diagram(diagram)) == engine.from_diagram(diagram)

    def test_loops_evaluate_to_bubble_values(self, engine_p2, engine_p3):
        cup = engine_p3.generator_morphism(Gen.CUP_R)
        cap = engine_p3.generator_morphism(Gen.CAP_L)
        loop = engine_p3.compose(cap, cup)
        assert loop.coefficient(identity_diagram("")) == QQ(-5)

        dotted = LayerWord("", (Layer(0, Gen.CUP_R), Layer(0, Gen.DOT_UP), Layer(0, Gen.CAP_L)))
        assert engine_p2.eval(dotted).coefficient(identity_diagram("")) == QQ(2)

    def test_dots_reduce_on_the_leftmost_strand(self, engine_p1, engine_p3):
        up_dot = LayerWord("u", (dot_at("u", 0),))
        assert engine_p1.eval(up_dot) == engine_p1.identity("u")
        assert engine_p3.eval(up_dot).is_zero
        down_dot = LayerWord("d", (dot_at("d", 0),))
        assert engine_p3.eval(down_dot) == engine_p3.identity("d").scale(QQ(5))

    def test_direct_and_incremental_evaluation_agree(self, engine_p2):
        rng = random.Random(7)
        for src in ("", "u", "ud", "du"):
            for length in range(1, 5):
                layer_word = random_layer_word(rng, src, length)
                assert engine_p2.eval_direct(layer_word) == engine_p2.eval(layer_word)


class TestComposition:
    def test_identity_is_neutral(self, engine_p2):
        for diagram in engine_p2.basis("ud", "du"):
            m = engine_p2.from_diagram(diagram)
            assert engine_p2.compose(engine_p2.identity("du"), m) == m
            assert engine_p2.compose(m, engine_p2.identity("ud")) == m

    def test_associativity(self, engine_p2):
        rng = random.Random(3)
        first = engine_p2.basis("u", "uud")
        second = engine_p2.basis("uud", "udu")
        third = engine_p2.basis("udu", "u")
        for _ in range(10):
            h = engine_p2.from_diagram(rng.choice(first))
            g = engine_p2.from_diagram(rng.choice(second))
            f = engine_p2.from_diagram(rng.choice(third))
            left = engine_p2.compose(f, engine_p2.compose(g, h))
            right = engine_p2.compose(engine_p2.compose(f, g), h)
            assert left == right

    @pytest.mark.slow
    @pytest.mark.parametrize("engine_name", ["engine_p1", "engine_p2", "engine_p3"])
    def test_associativity_over_mixed_types(self, engine_name, request):
        engine = request.getfixturevalue(engine_name)
        rng = random.Random(11)
        for _ in range(30):
            h, g, f = random_chain(engine, rng)
            left = engine.compose(f, engine.compose(g, h))
            assert left == engine.compose(engine.compose(f, g), h)

    @pytest.mark.parametrize("engine_name", ["engine_p1", "engine_p2"])
    def test_interchange_law(self, engine_name, request):
        engine = request.getfixturevalue(engine_name)
        rng = random.Random(5)
        for _ in range(30):
            h1, g1, _ = random_chain(engine, rng)
            h2, g2, _ = random_chain(engine, rng)
            composite_of_tensors = engine.compose(engine.tensor(g1, g2), engine.tensor(h1, h2))
            tensor_of_composites = engine.tensor(engine.compose(g1, h1), engine.compose(g2, h2))
            assert composite_of_tensors == tensor_of_composites

    def test_type_mismatch(self, engine_p1):
        with pytest.raises(CompositionError):
            engine_p1.compose(engine_p1.identity("u"), engine_p1.identity("d"))
        with pytest.raises(CompositionError):
            engine_p1.identity("u") + engine_p1.identity("d")

    def test_structure_constants_of_the_loop(self, engine_p2):
        table = engine_p2.structure_constants("", "ud", "")
        assert table == {
            (0, 0): {0: QQ(1)},
            (0, 1): {0: QQ(2)},
            (1, 0): {0: QQ(2)},
            (1, 1): {0: QQ(4)},
        }

    def test_tensor_of_identities(self, engine_p1):
        both = engine_p1.tensor(engine_p1.identity("u"), engine_p1.identity("d"))
        assert both == engine_p1.identity("ud")


class TestTau:
    def test_undotted_diagrams_flip(self, engine_p1):
        cup = make_diagram("", "ud", [((TOP, 0), (TOP, 1))])
        assert engine_p1.apply_tau(engine_p1.from_diagram(cup)) == engine_p1.from_diagram(tau(cup))

    def test_involution_and_anti_multiplicativity(self, engine_p2):
        basis = engine_p2.basis("ud", "ud")
        for diagram in basis:
            m = engine_p2.from_diagram(diagram)
            assert engine_p2.apply_tau(engine_p2.apply_tau(m)) == m
        g = engine_p2.from_diagram(basis[1])
        h = engine_p2.from_diagram(basis[-1])
        product = engine_p2.compose(g, h)
        flipped = engine_p2.compose(engine_p2.apply_tau(h), engine_p2.apply_tau(g))
        assert engine_p2.apply_tau(product) == flipped

    @pytest.mark.parametrize("engine_name", ["engine_p1", "engine_p2", "engine_p3"])
    def test_anti_multiplicativity_over_mixed_types(self, engine_name, request):
        engine = request.getfixturevalue(engine_name)
        rng = random.Random(13)
        for _ in range(30):
            h, g, _ = random_chain(engine, rng)
            flipped = engine.compose(engine.apply_tau(h), engine.apply_tau(g))
            assert engine.apply_tau(engine.compose(g, h)) == flipped
            assert engine.apply_tau(engine.apply_tau(h)) == h


class TestChecks:
    @pytest.mark.parametrize("a,b,side", [("ud", "ud", "u"), ("u", "uud", "d"), ("", "du", "u")])
    def test_dot_naturality(self, engine_p2, a, b, side):
        assert engine_p2.dot_naturality_check(a, b, side)

    @pytest.mark.parametrize("a,b", [("u", ""), ("ud", "d"), ("", "d")])
    def test_bimodule_isomorphisms(self, engine_p2, a, b):
        assert engine_p2.bimodule_iso_check(a, b) == {"u->d": True, "d->u": True}

    def test_cache_stats(self, engine_p1):
        engine_p1.compose(engine_p1.identity("u"), engine_p1.identity("u"))
        stats = engine_p1.cache_stats()
        assert stats["compose"] >= 1 and set(stats) == {"normalize", "append", "compose"}


def test_slice_of_identity_has_no_layers():
    assert slice_diagram(identity_diagram("udu")).layers == ()
    crossing = make_diagram("ud", "du", [((BOTTOM, 0), (TOP, 1)), ((BOTTOM, 1), (TOP, 0))])
    assert slice_diagram(crossing).dst == "du"
