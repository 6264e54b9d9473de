import pytest

from cantorval.errors import NielsenLimit, NotInvertible, SubstitutionSyntaxError
from cantorval.invertibility import (
    CANTORVAL,
    FREE_GROUP,
    INTERVAL,
    UNDETERMINED,
    A,
    B,
    classify,
    free_reduce,
    from_word,
    inverse,
    is_invertible,
    nielsen_reduce,
    parse_word,
    substitute,
    word_str,
)
from cantorval.substitution import parse_substitution


def test_free_reduction():
    assert free_reduce([('a', 1), ('b', 1), ('b', -1), ('a', -1)]) == FREE_GROUP.identity
    assert free_reduce([('b', 1), ('b', -1), ('a', 1)]) == A
    assert free_reduce([]) == FREE_GROUP.identity
    assert len(free_reduce([('a', 1), ('a', 1), ('a', -1)])) == 1


def test_word_parsing():
    word = parse_word("b^-1 a")
    assert word == B**-1 * A
    assert word_str(word) == "b^-1 a"
    assert word_str(parse_word("e")) == "e"
    assert word_str(parse_word("")) == "e"
    assert parse_word("a b b^-1") == from_word("a")
    assert word_str(from_word("aab")) == "a a b"
    assert word_str(A**-2 * B) == "a^-1 a^-1 b"
    for text in ("c", "a^2", "b^-"):
        with pytest.raises(SubstitutionSyntaxError):
            parse_word(text)


def test_group_algebra():
    w = from_word("aab")
    assert (w * w**-1).is_identity
    assert (w**-1)**-1 == w
    images = {'a': from_word("ab"), 'b': from_word("a")}
    assert substitute(parse_word("b^-1 a"), images) == B
    assert substitute(A * B, images) == from_word("aba")
    assert substitute(FREE_GROUP.identity, images).is_identity


def test_fibonacci_inverse():
    s = parse_substitution("(ab,a)")
    assert is_invertible(s)
    inv_a, inv_b = inverse(s)
    assert inv_a == B
    assert inv_b == B**-1 * A
    assert (word_str(inv_a), word_str(inv_b)) == ("b", "b^-1 a")


def test_identity_substitution_inverse():
    s = parse_substitution("(a,b)")
    assert inverse(s) == (A, B)


@pytest.mark.parametrize("text", ["(ab,a)", "(aba,ab)", "(ba,a)", "(abb,ab)"])
def test_inverse_composes_to_identity(text):
    s = parse_substitution(text)
    images = {'a': from_word(s.image_a), 'b': from_word(s.image_b)}
    inv = dict(zip("ab", inverse(s)))
    assert substitute(inv['a'], images) == A
    assert substitute(inv['b'], images) == B


@pytest.mark.parametrize("text", ["(aab,ba)", "(bba,ab)"])
def test_not_invertible(text):
    s = parse_substitution(text)
    assert not is_invertible(s)
    with pytest.raises(NotInvertible):
        inverse(s)


def test_non_unimodular_is_not_invertible():
    s = parse_substitution("(aaba,aa)")
    assert not is_invertible(s)
    with pytest.raises(NotInvertible) as info:
        inverse(s)
    assert info.value.exit_code == 2


def test_nielsen_reduction_of_fibonacci_pair():
    result = nielsen_reduce(from_word("ab"), from_word("a"))
    assert result.moves == ["u <- v^-1 u"]
    assert (result.u, result.v) == (B, A)
    assert result.total_length == 2


def test_nielsen_reduction_stops_at_minimal_pair():
    result = nielsen_reduce(from_word("aab"), from_word("ba"))
    assert result.moves == []
    assert result.total_length == 5


def test_nielsen_reduction_of_basis():
    result = nielsen_reduce(A, B)
    assert result.moves == []
    assert (result.u_expr, result.v_expr) == (A, B)


def test_nielsen_move_limit():
    with pytest.raises(NielsenLimit):
        nielsen_reduce(from_word("ab"), from_word("a"), max_moves=0)


def test_classification():
    assert classify(parse_substitution("(ab,a)")).kind == INTERVAL
    scrambled = parse_substitution("(aab,ba)")
    verdict = classify(scrambled, 0.91578546)
    assert verdict.kind == CANTORVAL
    assert verdict.evidence == {'invertible': False, 'boundary_dimension': 0.91578546}
    assert classify(scrambled, 0.0).kind == UNDETERMINED
    assert classify(scrambled).kind == UNDETERMINED
    assert classify(scrambled, 1e-7).kind == UNDETERMINED
