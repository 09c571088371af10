import pytest

from sardkit.nonholonomy import BracketWord, bracket_flag, left_nested_levels, parse_word


def test_r7_words(frames):
    fr = frames["example_r7"]
    fmt = {w.label(): f.format() for level in left_nested_levels(fr.fields, 10) for w, f in level}
    assert fmt["13"] == "-2*x1*d5 - 3*x1^2*d6 - 4*x1^3*d7"
    assert fmt["23"] == "d3"
    assert fmt["131"] == "-2*d5 - 6*x1*d6 - 12*x1^2*d7"
    assert fmt["1311"] == "-6*d6 - 24*x1*d7"
    assert fmt["13111"] == "-24*d7"
    assert BracketWord((1, 2)).evaluate(fr.fields).is_zero()


@pytest.mark.parametrize(
    "name, dims, step",
    [
        ("heisenberg", (2, 3), 2),
        ("martinet", (2, 2, 3), 3),
        ("example_r7", (3, 4, 5, 6, 7), 5),
        ("engel", (2, 3, 4), 3),
        ("free_nilpotent_2_3", (2, 3, 5), 3),
        ("carnot_step2", (3, 6), 2),
    ],
)
def test_flag_at_origin(frames, name, dims, step):
    fr = frames[name]
    flag = bracket_flag(fr, [0] * fr.n)
    assert flag.dims == dims
    assert flag.step == step


def test_martinet_flag_off_the_surface(frames):
    assert bracket_flag(frames["martinet"], [1, 0, 0]).dims == (2, 3)


def test_cap_truncates(frames):
    flag = bracket_flag(frames["example_r7"], [0] * 7, cap=3)
    assert flag.dims == (3, 4, 5)
    assert not flag.reached


def test_parse_word():
    assert parse_word("131") == BracketWord(((1, 3), 1))
    assert parse_word("[[1,3],[2,1]]") == BracketWord(((1, 3), (2, 1)))
    assert parse_word("[[1,3],[2,1]]").label() == "[[1,3],[2,1]]"
    with pytest.raises(ValueError):
        parse_word("[1,2,3]")
