import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ladderlab.errors import NotDominant
from ladderlab.weights import (
    GlWeight,
    Path,
    PositiveRoot,
    SlWeight,
    canonical_sequence,
    dominance_leq,
    dominance_lt,
    elementary_data,
    enumerate_paths,
    full_path,
    highest_weight,
    inversion_set,
    is_dominant_sum,
    omega_set,
    pairing_A,
    path_leq,
    sl_coords,
    weight_from_strings,
    weight_of_word,
)


def test_sl_coords():
    assert sl_coords(GlWeight((1, 0, 0, 0))) == SlWeight((1, 0, 0))
    assert sl_coords(GlWeight((0, 1, 0, 1))) == SlWeight((-1, 1, -1))
    assert sl_coords(GlWeight((0, 1, 1, 0))) == SlWeight((-1, 0, 1))


def test_pairing():
    for n in (2, 3, 4, 5):
        for i in range(1, n):
            assert pairing_A(SlWeight.zero(n), PositiveRoot(i, i + 1)) == 1
    b, c = 3, 5
    assert pairing_A(SlWeight((b, c)), PositiveRoot(1, 3)) == b + c + 2
    assert pairing_A(SlWeight((1, 0, 0)), PositiveRoot(1, 2)) == 2


def test_inversion_set():
    for n in (2, 3, 4):
        for a in range(1, n):
            assert inversion_set(highest_weight(a, n)) == frozenset()
    assert inversion_set(GlWeight((0, 1))) == frozenset({PositiveRoot(1, 2)})
    assert inversion_set(GlWeight((0, 0, 1))) == frozenset(
        {PositiveRoot(1, 3), PositiveRoot(2, 3)}
    )


def test_is_dominant_sum():
    assert is_dominant_sum(SlWeight.zero(3), highest_weight(2, 3))
    assert not is_dominant_sum(SlWeight((0,)), GlWeight((0, 1)))
    assert is_dominant_sum(SlWeight((1, 1)), GlWeight((0, 0, 1)))


@given(st.integers(2, 5), st.data())
@settings(max_examples=120)
def test_minusone_claim(n, data):
    """A(lam+mu, alpha) = A(lam, alpha) - 1 exactly for alpha in Phi(mu), and
    A(lam+mu, alpha) in {A(lam,alpha), A(lam,alpha)+1} otherwise."""
    a = data.draw(st.integers(1, n - 1))
    mu = data.draw(st.sampled_from(omega_set(a, n)))
    lam = SlWeight(tuple(data.draw(st.integers(0, 4)) for _ in range(n - 1)))
    target = lam + sl_coords(mu)
    inv = inversion_set(mu)
    for i in range(1, n):
        for j in range(i + 1, n + 1):
            alpha = PositiveRoot(i, j)
            diff = pairing_A(target, alpha) - pairing_A(lam, alpha)
            if alpha in inv:
                assert diff == -1
            else:
                assert diff in (0, 1)


def test_enumerate_paths_examples():
    assert len(enumerate_paths((1,), 2, SlWeight((1,)))) == 1
    assert len(enumerate_paths((1,) * 6, 2, SlWeight((0,)))) == 5  # Catalan C_3
    assert len(enumerate_paths((1, 2), 3, SlWeight.zero(3))) == 1


def test_enumerate_paths_deterministic_order():
    paths = enumerate_paths((1, 1), 2)
    assert [str(p) for p in paths] == ["10;10", "10;01"]


def test_paths_partition_plethysm():
    """|paths(w + a)| equals the sum over paths of w of viable mu counts."""
    for n, word, a in [(2, (1, 1), 1), (3, (1, 2), 2), (3, (2, 1, 1), 1), (4, (2, 3), 2)]:
        base = enumerate_paths(word, n)
        total = sum(
            sum(
                1
                for mu in omega_set(a, n)
                if (p.endpoint + sl_coords(mu)).is_dominant()
            )
            for p in base
        )
        assert len(enumerate_paths(word + (a,), n)) == total


def test_path_full_and_order():
    p = full_path((1, 1), 2)
    assert p.is_full() and p.endpoint == SlWeight((2,))
    ps = enumerate_paths((1, 1), 2)
    assert path_leq(ps[1], ps[0]) and not path_leq(ps[0], ps[1])


def test_elementary_data_paper_examples():
    d = elementary_data(GlWeight.parse("01101001110"))
    assert (d.k, d.y, d.x, d.alpha, d.beta) == (
        3,
        (0, 3, 5, 10),
        (1, 4, 7),
        (0, 2, 3, 6),
        (1, 2, 4),
    )
    d = elementary_data(GlWeight.parse("10001100111"))
    assert (d.k, d.y, d.x, d.alpha, d.beta) == (2, (1, 6, 11), (4, 8), (1, 3, 6), (3, 5))
    d = elementary_data(highest_weight(3, 7))
    assert d.k == 0 and d.y == (3,) and d.alpha == (3,)


@given(st.integers(2, 9), st.data())
@settings(max_examples=150)
def test_elementary_data_roundtrip(n, data):
    a = data.draw(st.integers(1, n - 1))
    mu = data.draw(st.sampled_from(omega_set(a, n)))
    d = elementary_data(mu)
    assert weight_from_strings(d.y, d.x, n) == mu
    seq = [d.y[0]]
    for i in range(d.k):
        seq.extend([d.x[i], d.y[i + 1]])
    assert all(p < q for p, q in zip(seq, seq[1:]))
    assert 0 <= d.y[0] and d.y[-1] <= n


def test_canonical_sequence():
    assert canonical_sequence(SlWeight((2,))) == (1, 1)
    assert canonical_sequence(SlWeight((1, 1))) == (1, 2)
    assert canonical_sequence(SlWeight((0, 2, 1))) == (2, 2, 3)
    with pytest.raises(NotDominant):
        canonical_sequence(SlWeight((-1, 0)))


def test_dominance_order():
    assert dominance_leq(SlWeight((0,)), SlWeight((2,)))
    assert not dominance_leq(SlWeight((2,)), SlWeight((0,)))
    assert not dominance_leq(SlWeight((1,)), SlWeight((2,)))  # different parity
    # incomparable pair in sl_3
    assert not dominance_leq(SlWeight((2, 0)), SlWeight((1, 1)))
    assert not dominance_leq(SlWeight((1, 1)), SlWeight((2, 0)))
    assert dominance_lt(SlWeight((0, 0)), SlWeight((1, 1)))


def test_weight_of_word():
    assert weight_of_word((1, 1, 2), 3) == SlWeight((2, 1))
    assert weight_of_word((), 4) == SlWeight.zero(4)
