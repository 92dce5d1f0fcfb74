import pytest
from hypothesis import given
from hypothesis import strategies as st

from tracecount.alphabet import ConcurrentAlphabet, is_independent, width
from tracecount.errors import AlphabetError

EXAMPLE = ConcurrentAlphabet("abc", [("a", "b"), ("b", "c")])


def test_independence_is_symmetric_and_irreflexive():
    assert is_independent(EXAMPLE, "a", "b")
    assert is_independent(EXAMPLE, "b", "a")
    assert not is_independent(EXAMPLE, "a", "a")
    assert not is_independent(EXAMPLE, "a", "c")


def test_width_examples():
    assert width(ConcurrentAlphabet("abc")) == 1
    assert width(ConcurrentAlphabet("abc", [("a", "b"), ("a", "c"), ("b", "c")])) == 3
    assert width(EXAMPLE) == 2


@pytest.mark.parametrize("letters, pairs", [
    ("ab", [("a", "a")]),
    ("ab", [("a", "z")]),
    ("ab", [("a",)]),
    ("aa", []),
    ("", []),
])
def test_invalid_alphabets_are_rejected(letters, pairs):
    with pytest.raises(AlphabetError):
        ConcurrentAlphabet(letters, pairs)


def test_order_follows_declaration():
    alpha = ConcurrentAlphabet(["c", "a", "b"])
    assert alpha.less("c", "a") and alpha.less("a", "b")
    assert alpha.rank("b") == 2


def test_words_parse_and_format():
    assert EXAMPLE.parse_word("bacc") == ("b", "a", "c", "c")
    assert EXAMPLE.format_word(("a", "b")) == "ab"
    multi = ConcurrentAlphabet(["x1", "x2"])
    assert multi.parse_word("x1 x2 x1") == ("x1", "x2", "x1")
    assert multi.format_word(("x2", "x1")) == "x2 x1"
    with pytest.raises(AlphabetError):
        EXAMPLE.parse_word("abz")


def test_json_round_trip():
    data = EXAMPLE.to_json()
    assert ConcurrentAlphabet(data["alphabet"], data["independence"]) == EXAMPLE


@given(st.integers(1, 5), st.data())
def test_width_is_largest_pairwise_independent_set(k, data):
    letters = "abcde"[:k]
    pairs = [(a, b) for i, a in enumerate(letters) for b in letters[i + 1:] if data.draw(st.booleans())]
    alpha = ConcurrentAlphabet(letters, pairs)
    w = alpha.width()
    assert 1 <= w <= k
    # a greedy clique never beats the exact search
    greedy = []
    for a in letters:
        if all(alpha.is_independent(a, b) for b in greedy):
            greedy.append(a)
    assert len(greedy) <= w
