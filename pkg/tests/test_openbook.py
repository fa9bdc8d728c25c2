import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from reebgss.openbook import (
    AbstractOpenBook,
    BookSumChain,
    ChartPoint,
    Monodromy,
    PageSurface,
    block_graph,
    build_chain,
    classify_point,
    decompose,
    dehn_shift,
    dehn_sigma,
    example_chain,
    make_annulus_book,
    make_base_book,
    make_disk_book,
)


def test_dehn_twist_profile_endpoints():
    assert dehn_sigma(-1.0) == pytest.approx(2 * np.pi)
    assert dehn_sigma(1.0) == pytest.approx(0.0)
    assert dehn_sigma(0.0) == pytest.approx(np.pi)


def test_shift_negative_and_flat_at_boundary():
    x = np.linspace(-1, 1, 101)
    assert np.all(dehn_shift(x) < 0)
    # sigma' = -pi equals -T'(x)/x, the relation tying twist and return time
    h = 1e-6
    xs = np.array([-0.7, 0.2, 0.9])
    dT = (dehn_shift(xs + h) - dehn_shift(xs - h)) / (2 * h)
    assert np.allclose(dT / xs, np.pi, rtol=1e-8)


def test_page_validation():
    with pytest.raises(ValueError):
        PageSurface("annulus", 1)
    with pytest.raises(ValueError):
        PageSurface("torus", 1)
    with pytest.raises(ValueError):
        Monodromy("dehn_twist")
    with pytest.raises(ValueError):
        AbstractOpenBook(PageSurface("disk", 1), Monodromy("identity"), ("a", "b"))


def test_monodromy_apply():
    book = make_annulus_book()
    x, phi = book.monodromy.apply(np.array([-1.0, 0.0, 1.0]), np.zeros(3))
    assert np.allclose(phi, [0.0, np.pi, 0.0], atol=1e-12)
    with pytest.raises(ValueError):
        make_base_book().monodromy.apply(0.0, 0.0)


def test_chain_structure():
    ch = build_chain(make_base_book(), 3)
    assert ch.joins == (("B", "L1"), ("U1", "L2"), ("U2", "L3"))
    assert ch.free_labels == ("U3",)
    assert ch.owner("L2") == 2


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.randoms(use_true_random=False))
def test_join_order_is_irrelevant(k, rnd):
    ref = build_chain(make_base_book(), k)
    joins = list(ref.joins)
    rnd.shuffle(joins)
    joins = [j if rnd.random() < 0.5 else j[::-1] for j in joins]
    assert BookSumChain(ref.books, tuple(joins)).joins == ref.joins


def test_chain_rejects_bad_joins():
    books = (make_disk_book("B"), make_annulus_book("U1", "L1"), make_annulus_book("U2", "L2"))
    with pytest.raises(ValueError):
        BookSumChain(books, (("B", "L1"), ("B", "L2")))
    with pytest.raises(ValueError):
        BookSumChain(books, (("B", "L2"), ("U2", "L1")))
    with pytest.raises(ValueError):
        BookSumChain(books, (("B", "X"), ("U1", "L2")))
    with pytest.raises(ValueError):
        build_chain(make_annulus_book(), 2)


# frozen from the separation rule: for each sum, the blocks left of it, its
# handle set and the blocks right of its binding neighbourhood are pairwise unlinked
THM1_ZERO_TWO_JOINS = np.array(
    [
        [0, 1, 0, 1, 1, 1, 1],
        [1, 0, 0, 1, 1, 1, 1],
        [0, 0, 0, 0, 1, 0, 1],
        [1, 1, 0, 0, 1, 0, 1],
        [1, 1, 1, 1, 0, 0, 1],
        [1, 1, 0, 0, 0, 0, 0],
        [1, 1, 1, 1, 1, 0, 0],
    ],
    bool,
)


def _separation_oracle(k):
    m = 3 * k + 1
    z = np.zeros((m, m), bool)
    for j in range(k):
        left = set(range(3 * j + 1))
        hand = {3 * j + 1}
        right = set(range(3 * j + 3, m))
        for A, B in ((left, hand), (left, right), (hand, right)):
            for p in A:
                for q in B:
                    z[p, q] = z[q, p] = True
    return z


def test_thm1_blocks():
    dec = decompose(build_chain(make_base_book(), 2))
    assert dec.labels == ["P0", "H0", "N0", "P1", "H1", "N1", "P2"]
    assert np.array_equal(dec.zero_matrix, THM1_ZERO_TWO_JOINS)
    for j in range(2):
        assert [dec.labels[i] for i in dec.admissible(j)] == [f"H{j}", f"N{j}"]


@pytest.mark.parametrize("k", [1, 2, 4, 6])
def test_zero_matrix_symmetric_irreflexive(k):
    z = decompose(build_chain(make_base_book(), k)).zero_matrix
    assert np.array_equal(z, _separation_oracle(k))
    assert np.array_equal(z, z.T)
    assert not z.diagonal().any()


def test_thm2_regions():
    dec = decompose(example_chain(1, "thm2"), "thm2")
    assert dec.labels == ["V0", "V1", "V2", "V3", "V4"]
    idx = np.arange(5)
    assert np.array_equal(dec.zero_matrix, np.abs(idx[:, None] - idx) >= 2)
    assert dec.counted_handles == (2, 3, 4)
    with pytest.raises(ValueError):
        decompose(build_chain(make_base_book(), 2), "thm2")
    with pytest.raises(ValueError):
        decompose(build_chain(make_base_book(), 2), "other")


def test_example_chain_sizes():
    assert len(example_chain(2, "thm1").joins) == 3
    assert len(example_chain(2, "thm2").joins) == 8
    with pytest.raises(ValueError):
        example_chain(0)


def test_classify_point_priority():
    dec = decompose(build_chain(make_base_book(), 2))
    mt = ChartPoint("mapping_torus", 1, (0.3, 0.0, 0.0))
    hd = ChartPoint("handle", 1, (1.5, 0.1))
    bd = ChartPoint("binding", "U1", (0.0, 0.2, 0.0))
    assert classify_point(dec, mt).label == "P1"
    assert classify_point(dec, [mt, hd]).label == "H1"
    assert classify_point(dec, [mt, hd, bd]).label == "N1"
    assert classify_point(dec, ChartPoint("binding", "U2", (0, 0.5, 0))).label == "P2"
    assert classify_point(dec, ChartPoint("binding", 0, (0, 0.5, 0))).label == "N0"
    with pytest.raises(ValueError):
        classify_point(dec, ChartPoint("handle", 0, (2.5, 0.0)))
    with pytest.raises(ValueError):
        classify_point(dec, ChartPoint("handle", 5, (1.5, 0.0)))


def test_block_graph_canonical():
    a = block_graph(decompose(build_chain(make_base_book(), 3)))
    b = block_graph(decompose(build_chain(make_base_book("B", genus=2), 3)))
    assert a[0] == b[0] and np.array_equal(a[1], b[1]) and np.array_equal(a[2], b[2])
    assert a[1].sum() == 2 * (len(a[0]) - 1)
