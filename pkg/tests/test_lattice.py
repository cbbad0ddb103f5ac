import pytest
from hypothesis import given
from hypothesis import strategies as st

from birdyn.lattice import (
    P1xP1,
    P2,
    BlowupModel,
    InfinitelyNear,
    Proper,
    intersection,
    make_point,
    normalize_group,
    parse_point,
    point_str,
)


def model_p2(n):
    pts = [Proper(((1, 0, 0),)), Proper(((0, 1, 0),)), Proper(((0, 0, 1),)), Proper(((1, 1, 1),))]
    return BlowupModel(P2, tuple(pts[:n]))


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4])
def test_canonical_self_intersection_p2(n):
    m = model_p2(n)
    K = m.canonical_class()
    assert intersection(m, K, K) == 9 - n
    assert m.signature() == (1, n)


def test_p1xp1_form():
    m = BlowupModel(P1xP1, (Proper(((0, 1), (1, 0))),))
    K = m.canonical_class()
    assert intersection(m, K, K) == 7
    assert m.signature() == (1, 2)
    A = m.ample_base_class()
    assert intersection(m, A, A) > 0


def test_infinitely_near_strict_transform():
    m = BlowupModel(P2, (Proper(((0, 1, 0),)), InfinitelyNear(0, (1, 0))))
    s = m.strict_exceptional(0)
    # E0 - E1 has self-intersection -2
    assert intersection(m, s, s) == -2
    assert intersection(m, s, m.e(1)) == 1


def test_bad_models_rejected():
    with pytest.raises(ValueError):
        BlowupModel(P2, (InfinitelyNear(0, (1, 0)),))
    with pytest.raises(ValueError):
        BlowupModel(P2, (Proper(((0, 1, 0),)), InfinitelyNear(0, (0, 0))))
    with pytest.raises(ValueError):
        normalize_group([0, 0, 0])


def test_point_parsing():
    p = parse_point(P1xP1, "0:1;2:-4")
    assert p == ((0, 1), (1, -2))
    assert parse_point(P2, point_str(((3, 6, -9),))) == ((1, 2, -3),)


@given(st.lists(st.integers(-50, 50), min_size=3, max_size=3).filter(any), st.integers(-20, 20).filter(bool))
def test_normalize_is_projective(v, k):
    assert normalize_group(v) == normalize_group([k * c for c in v])
    assert make_point(P2, v) == (normalize_group(v),)


@given(st.lists(st.integers(-5, 5), min_size=5, max_size=5), st.lists(st.integers(-5, 5), min_size=5, max_size=5))
def test_intersection_symmetric_bilinear(a, b):
    m = model_p2(4)
    assert intersection(m, a, b) == intersection(m, b, a)
    two_a = [2 * x for x in a]
    assert intersection(m, two_a, b) == 2 * intersection(m, a, b)
