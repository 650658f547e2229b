import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from haarint.diagram import (
    Factor,
    Monomial,
    ParseError,
    canonicalize,
    parse_monomial,
    required_dimension,
    vanishes_by_invariance,
)


def test_parse_simple():
    m = parse_monomial("O(1,1)^2 O(1,2)^4")
    assert m == Monomial([(1, 1, 2), (1, 2, 4)])
    assert m.order == 6


def test_parse_merges_duplicates():
    m = parse_monomial("O(1,1) O(1,1)")
    assert m.factors == (Factor(1, 1, 2),)
    assert m.order == 2


def test_parse_without_spaces():
    assert parse_monomial("O(1,1)O(2,1)O(2,2)O(1,2)").order == 4


def test_parse_empty():
    assert parse_monomial("   ").factors == ()


def test_zero_power_factor_is_stripped():
    assert Monomial([(1, 1, 0), (2, 2, 2)]).factors == (Factor(2, 2, 2),)


@pytest.mark.parametrize(
    "text, pos",
    [("O(0,1)", 2), ("O(1,1) O(2,0)", 11), ("O(1,1) X(1,2)", 7), ("O(1,1)^0", 7), ("O(1,", 0)],
)
def test_parse_errors_report_position(text, pos):
    with pytest.raises(ParseError) as info:
        parse_monomial(text)
    assert info.value.position == pos
    assert info.value.caret().splitlines()[1] == " " * pos + "^"


def test_index_zero_message():
    with pytest.raises(ParseError, match="index must be >= 1"):
        parse_monomial("O(0,1)")


def test_relabeling_invariance_example():
    a = canonicalize(Monomial([(3, 7, 2), (3, 9, 4)]))
    b = canonicalize(Monomial([(1, 1, 2), (1, 2, 4)]))
    assert a == b


def test_transposition_example():
    assert canonicalize(Monomial([(1, 1, 2), (2, 1, 2)])) == canonicalize(
        Monomial([(1, 1, 2), (1, 2, 2)])
    )


def test_figure_one_diagram():
    d = canonicalize(Monomial([(1, 1, 1), (1, 2, 3), (2, 1, 1), (2, 2, 1)]))
    assert d.shape == (2, 2)
    assert sorted(m for _, _, m in d.edges) == [1, 1, 1, 3]
    assert sorted(d.left_degrees) == [2, 4]
    assert sorted(d.right_degrees) == [2, 4]


def test_degrees_sorted_descending():
    d = canonicalize(parse_monomial("O(1,1)^2 O(2,1)^2 O(2,2)^2 O(3,3)^4"))
    assert list(d.left_degrees) == sorted(d.left_degrees, reverse=True)
    assert list(d.right_degrees) == sorted(d.right_degrees, reverse=True)


@pytest.mark.parametrize(
    "text, expected",
    [
        ("O(1,1)", True),
        ("O(1,1) O(1,2) O(2,1) O(2,2)", False),
        ("O(1,1)^2 O(1,2) O(2,2)", True),
        ("O(1,1)^2 O(2,2)^2", False),
        ("", False),
    ],
)
def test_vanishing(text, expected):
    assert vanishes_by_invariance(canonicalize(parse_monomial(text))) is expected


@pytest.mark.parametrize(
    "text, n",
    [("O(1,1)^2 O(1,2)^2 O(1,3)^2", 3), ("O(1,1)^2", 1), ("O(1,1) O(1,2) O(2,1) O(2,2)", 2), ("", 1)],
)
def test_required_dimension(text, n):
    assert required_dimension(canonicalize(parse_monomial(text))) == n


factors = st.lists(
    st.tuples(st.integers(1, 4), st.integers(1, 4), st.integers(0, 3)), min_size=0, max_size=6
)


def _random_relabel(m, seed):
    rnd = random.Random(seed)
    rows = list(range(1, 5))
    cols = list(range(1, 5))
    targets_r = rnd.sample(range(1, 40), 4)
    targets_c = rnd.sample(range(1, 40), 4)
    return m.relabel(dict(zip(rows, targets_r)), dict(zip(cols, targets_c)))


@settings(max_examples=200, deadline=None)
@given(factors, st.integers(0, 10**6))
def test_canonical_form_relabel_invariant(fs, seed):
    m = Monomial(fs)
    assert canonicalize(m) == canonicalize(_random_relabel(m, seed))


@settings(max_examples=200, deadline=None)
@given(factors)
def test_canonical_form_transpose_invariant(fs):
    m = Monomial(fs)
    assert canonicalize(m) == canonicalize(m.transpose())


@settings(max_examples=200, deadline=None)
@given(factors)
def test_canonicalize_idempotent_and_vanishing_stable(fs):
    m = Monomial(fs)
    d = canonicalize(m)
    assert canonicalize(d.to_monomial()) == d
    assert d.order == m.order
    degrees_odd = any(
        sum(f.power for f in m.factors if f.row == r) % 2 for r in {f.row for f in m.factors}
    ) or any(
        sum(f.power for f in m.factors if f.col == c) % 2 for c in {f.col for f in m.factors}
    )
    assert vanishes_by_invariance(d) == (degrees_odd or m.order % 2 == 1)
