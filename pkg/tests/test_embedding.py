import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from synthcurate.embedding import cosine_similarity, l2_norm
from synthcurate.errors import DomainError, ValidationError

finite_vec = st.lists(
    st.floats(-1e6, 1e6, allow_nan=False, allow_infinity=False), min_size=2, max_size=16
)


def test_norm_examples():
    assert l2_norm([0, 0, 0]) == 0.0
    assert l2_norm([3, 4]) == 5.0
    assert l2_norm([1, 1, 1, 1]) == 2.0


def test_cosine_identity():
    assert cosine_similarity([0.5, 0.5, 0.7], [0.5, 0.5, 0.7]) == 1.0


def test_cosine_orthogonal():
    assert cosine_similarity([1, 0], [0, 1]) == 0.0


def test_cosine_45_degrees():
    # 1/sqrt(2), cross-checked with mpmath-free high precision math.sqrt
    assert cosine_similarity([1, 0], [1, 1]) == pytest.approx(1 / math.sqrt(2), abs=1e-12)


def test_dimension_mismatch():
    with pytest.raises(ValidationError):
        cosine_similarity([1, 0], [1, 0, 0])


def test_zero_norm_is_domain_error():
    with pytest.raises(DomainError):
        cosine_similarity([0, 0], [1, 1])


def test_non_finite_rejected():
    with pytest.raises(ValidationError):
        l2_norm([1.0, float("inf")])


@given(finite_vec, finite_vec)
def test_bounded_and_symmetric(u, v):
    if len(u) != len(v):
        u = (u + v)[: min(len(u), len(v))]
        v = v[: len(u)]
    if l2_norm(u) == 0 or l2_norm(v) == 0:
        return
    s = cosine_similarity(u, v)
    assert -1.0 <= s <= 1.0
    assert s == cosine_similarity(v, u)


@given(finite_vec, st.floats(0.01, 100))
def test_positive_scaling_gives_one(u, c):
    if l2_norm(u) == 0:
        return
    u = np.array(u)
    assert cosine_similarity(u, c * u) == pytest.approx(1.0, abs=1e-12)
    assert cosine_similarity(u, -c * u) == pytest.approx(-1.0, abs=1e-12)
