import pytest
from sympy.polys.domains import QQ

from app.core.exceptions import ParameterError
from app.services.combinatorics import (
    Bipartition,
    Box,
    Multipartition,
    Side,
    addable_removable,
    all_bipartitions,
    bipartitions_of_size,
    character_by_word,
    character_std,
    content,
    distance,
    is_restricted,
    multipartitions,
    parse_shape,
    partitions,
    path_counts_by_type,
    paths_to,
    syt_count,
)
from app.services.ground import make_params


class TestShapes:
    def test_parse_forms(self):
        assert parse_shape("empty", 2) == Bipartition.empty(2)
        assert parse_shape("[[], [2, 1]]", 1).up == Multipartition(((2, 1),))
        assert parse_shape('{"down": [[1], []], "up": [[], [1]]}', 2).size == 2
        assert str(parse_shape("[[1], []]", 1)) == "[[[1]],[[]]]"

    @pytest.mark.parametrize("text", ["[[1, 2], []]", "not json", "[[]]", "[[1], [0]]"])
    def test_parse_errors(self, text):
        with pytest.raises(ParameterError):
            parse_shape(text, 1)

    def test_addable_and_removable_boxes(self):
        shape = Multipartition(((2,), ()))
        assert shape.addable() == [(1, 1, 3), (1, 2, 1), (2, 1, 1)]
        assert shape.removable() == [(1, 1, 2)]
        assert shape.with_box(1, 1, -1).with_box(1, 1, -1) == Multipartition.empty(2)

    def test_distance(self):
        a = parse_shape("[[1], [1]]", 1)
        assert distance(a, Bipartition.empty(1)) == 2
        assert distance(a, parse_shape("[[1], [2]]", 1)) == 1

    def test_enumeration(self):
        assert partitions(4) == ((4,), (3, 1), (2, 2), (2, 1, 1), (1, 1, 1, 1))
        assert len(multipartitions(2, 2)) == 5
        assert len(bipartitions_of_size(1, 1)) == 2
        assert len(all_bipartitions(1, 1)) == 3
        assert all(b.size == 2 for b in bipartitions_of_size(2, 2))

    @pytest.mark.parametrize(
        "components,expected",
        [(((),), 1), (((2, 1),), 2), (((3, 2),), 5), (((1,), (1,)), 2), (((2,), (1,)), 3)],
    )
    def test_standard_tableaux(self, components, expected):
        assert syt_count(Multipartition(components)) == expected


class TestContents:
    def test_box_contents(self, p3):
        assert content(Box(Side.DOWN, 1, 2, 1), p3) == QQ(6)
        assert content(Box(Side.UP, 1, 1, 3), p3) == QQ(2)
        with pytest.raises(ParameterError):
            content(Box(Side.UP, 2, 1, 1), p3)

    def test_addable_removable_by_residue(self, p3):
        shape = parse_shape("[[], [2]]", 1)
        assert addable_removable(shape, QQ(2), p3)["up"]["addable"] == [Box(Side.UP, 1, 1, 3)]
        assert addable_removable(shape, QQ(1), p3)["up"]["removable"] == [Box(Side.UP, 1, 1, 2)]
        down = parse_shape("[[1], []]", 1)
        assert addable_removable(down, QQ(5), p3)["down"]["removable"] == [
            Box(Side.DOWN, 1, 1, 1)
        ]

    def test_restricted(self, p2):
        level_one = make_params(1, 3, ["0"], ["1"])
        assert is_restricted(Multipartition(((2, 1),)), level_one) is True
        assert is_restricted(Multipartition(((3,),)), level_one) is False
        generic = make_params(2, 0, ["0", "1/2"], ["1/3", "2/3"])
        assert is_restricted(Multipartition(((1,), ())), generic) is True
        assert is_restricted(Multipartition(((1,), ())), p2) is None


class TestPaths:
    def test_paths_to_empty(self, p3):
        paths = paths_to(Bipartition.empty(1), 2, p3)
        types = {(p.word, tuple(p3.fmt(c) for c in p.colors)) for p in paths}
        assert types == {("ud", ("0", "0")), ("du", ("5", "5"))}
        assert paths[0].to_dict(p3)["steps"][0]["kind"] == "add"

    def test_parity_and_length(self, p3):
        assert paths_to(Bipartition.empty(1), 3, p3) == []
        assert paths_to(parse_shape("[[1], [1]]", 1), 1, p3) == []

    def test_path_words(self, p3):
        paths = paths_to(parse_shape("[[], [1]]", 1), 3, p3)
        assert {p.word for p in paths} == {"uud", "udu", "duu"}
        assert all(p.word.count("u") - p.word.count("d") == 1 for p in paths)

    def test_character_at_level_two(self, p2):
        character = character_std(Bipartition.empty(2), 2, p2)
        assert character_by_word(character, "ud") == {(QQ(0), QQ(0)): 1, (QQ(2), QQ(2)): 1}
        assert character_by_word(character, "du") == {(QQ(0), QQ(0)): 1, (QQ(1), QQ(1)): 1}
        assert character[("", ())] == 1

    def test_counts_agree_with_enumeration(self, p2):
        for shape in all_bipartitions(2, 2):
            for length in range(5):
                counts = path_counts_by_type(shape, length, p2)
                assert sum(counts.values()) == len(paths_to(shape, length, p2))

    def test_branching_by_the_last_step(self, p3):
        target = parse_shape("[[], [1]]", 1)
        counts = path_counts_by_type(target, 3, p3)
        # a final up step either added an up box or removed a down box
        before = [parse_shape("empty", 1), parse_shape("[[1], [1]]", 1)]
        shorter = {}
        for shape in before:
            for key, count in path_counts_by_type(shape, 2, p3).items():
                shorter[key] = shorter.get(key, 0) + count
        ending_up = sum(c for (word, _), c in counts.items() if word.endswith("u"))
        assert ending_up == sum(shorter.values())
