import numpy as np
import pytest
from hypothesis import given, strategies as st

from nilharm.hermite import (dilate, hermite_1d, hermite_eval, hermite_functions, multi_indices,
                             recurrence_check, special_hermite_diag, special_hermite_scaled)

# frozen with mpmath at 30 digits from the explicit Hermite polynomial formula
HERMITE_ORACLE = [
    (0, 0.5, 0.66286596644247953),
    (3, 1.2, -0.030396415302535834),
    (10, -2.5, 0.05096381236221044),
    (40, 3.0, 0.057369581235740706),
]
# exp(-|z|^2/4) L_a(|z|^2/2) with the Laguerre polynomial summed term by term
LAGUERRE_ORACLE = [
    (0, 1.0, 0.77880078307140487),
    (1, 2.0, 0.0),
    (4, 5.0, 0.27531320323283892),
    (2, 0.3, 0.65985755465118326),
    (3, 9.0, 0.28326041601001041),
]


@pytest.mark.parametrize("p, x, expected", HERMITE_ORACLE)
def test_hermite_against_oracle(p, x, expected):
    assert hermite_1d(p, x) == pytest.approx(expected, rel=1e-12, abs=1e-15)
    assert hermite_functions(p, np.array([x]))[p, 0] == pytest.approx(expected, rel=1e-12, abs=1e-15)


@pytest.mark.parametrize("a, r2, expected", LAGUERRE_ORACLE)
def test_special_hermite_against_oracle(a, r2, expected):
    z = np.sqrt(r2) * np.exp(0.7j)
    assert special_hermite_diag((a,), np.array([z]))[()] == pytest.approx(expected, rel=1e-12, abs=1e-14)


def test_hermite_orthonormal():
    x, w = np.polynomial.hermite.hermgauss(80)
    H = hermite_functions(20, x) * np.exp(x * x / 2)
    gram = (H * w) @ H.T
    np.testing.assert_allclose(gram, np.eye(21), atol=1e-12)


def test_hermite_stable_at_high_degree():
    x = np.linspace(-30, 30, 2001)
    vals = hermite_functions(200, x)
    assert np.all(np.isfinite(vals))
    assert np.abs(vals).max() < 1.0


@given(st.lists(st.floats(0.1, 8.0), min_size=1, max_size=3),
       st.lists(st.integers(0, 4), min_size=3, max_size=3))
def test_dilation_preserves_norm(r, alpha):
    alpha = tuple(alpha[:len(r)])
    if len(r) > 2:
        return
    x, w = np.polynomial.hermite.hermgauss(60)
    grids = np.meshgrid(*([x] * len(r)), indexing="ij")
    xi = np.stack(grids, axis=-1) / np.sqrt(r)
    weight = np.prod(np.stack(np.meshgrid(*([w] * len(r)), indexing="ij")), axis=0)
    vals = dilate(r, alpha, xi)
    gauss = np.exp(-np.sum(r * xi ** 2, axis=-1))
    norm2 = np.sum(weight * vals ** 2 / gauss) / np.prod(np.sqrt(r))
    assert norm2 == pytest.approx(1.0, rel=1e-10)


def test_hermite_eval_is_product():
    xi = np.array([[0.3, -1.1]])
    assert hermite_eval((2, 1), xi)[0] == pytest.approx(hermite_1d(2, 0.3) * hermite_1d(1, -1.1))


def test_special_hermite_normalisation():
    # int |Phi^d_aa|^2 over C^1 is 2 pi / d
    r = np.linspace(0, 40, 40001)
    for a, d in [(0, 1.0), (2, 0.5), (3, 2.0)]:
        vals = special_hermite_scaled((a,), [d], r[:, None].astype(complex))
        integral = np.trapezoid(2 * np.pi * r * vals ** 2, r)
        assert integral == pytest.approx(2 * np.pi / d, rel=1e-6)


def test_special_hermite_even():
    z = np.array([[0.4 + 1.2j, -0.8 + 0.1j]])
    assert special_hermite_diag((2, 1), z) == pytest.approx(special_hermite_diag((2, 1), -z))


@given(st.lists(st.integers(0, 5), min_size=1, max_size=2), st.integers(0, 1),
       st.floats(-2, 2), st.floats(-2, 2))
def test_derivative_recurrence(alpha, j, re, im):
    j = min(j, len(alpha) - 1)
    z = np.full(len(alpha), 0.3 - 0.2j)
    z[j] = complex(re, im)
    assert recurrence_check(alpha, j, z) < 1e-6


def test_multi_indices_graded():
    idx = multi_indices(2, 2)
    assert idx == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    assert len(multi_indices(3, 4)) == 35


def test_bad_inputs():
    with pytest.raises(ValueError):
        hermite_eval((1, 2), np.zeros((4, 3)))
    with pytest.raises(ValueError):
        dilate([-1.0], (0,), np.zeros(1))
    with pytest.raises(ValueError):
        special_hermite_diag((-1,), np.zeros(1))
