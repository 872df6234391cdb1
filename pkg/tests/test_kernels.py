import numpy as np
import pytest

from ocdesc.errors import ConfigError, InputError, NumericError
from ocdesc.kernels import KernelSpec, check_psd, compute_gram, cross_kernel


def test_linear_orthonormal_inputs():
    G = compute_gram(np.eye(2), KernelSpec("linear"))
    np.testing.assert_array_equal(G, np.eye(2))


def test_gaussian_unit_diagonal_and_range(rng):
    X = rng.normal(size=(3, 7)) * 4
    G = compute_gram(X, KernelSpec("gaussian", 0.7))
    assert np.all(np.diag(G) == 1.0)
    assert np.all(G > 0) and np.all(G <= 1.0)
    assert np.abs(G - G.T).max() <= 1e-10


def test_gaussian_hand_value():
    G = compute_gram(np.array([[0.0, 3.0]]), KernelSpec("gaussian", 3.0))
    assert G[0, 1] == pytest.approx(np.exp(-9 / 18), abs=1e-12)
    assert round(G[0, 1], 4) == 0.6065


def test_cross_kernel_matches_gram(rng):
    X = rng.normal(size=(2, 5))
    spec = KernelSpec("gaussian", 1.3)
    np.testing.assert_allclose(cross_kernel(X, X, spec), compute_gram(X, spec), atol=1e-14)


@pytest.mark.parametrize("sigma", [0.0, -1.0, float("nan")])
def test_bad_sigma(sigma):
    with pytest.raises(ConfigError):
        KernelSpec("gaussian", sigma)


def test_unknown_kind():
    with pytest.raises(ConfigError):
        KernelSpec("poly")


def test_non_finite_input():
    with pytest.raises(InputError):
        compute_gram(np.array([[1.0, np.nan]]))


def test_psd_check():
    check_psd(np.ones((3, 3)))
    with pytest.raises(NumericError):
        check_psd(np.array([[1.0, 2.0], [2.0, 1.0]]))
    with pytest.raises(InputError):
        check_psd(np.array([[1.0, 0.5], [0.0, 1.0]]))


def test_spec_roundtrip():
    s = KernelSpec("gaussian", 2.5)
    assert KernelSpec.from_dict(s.to_dict()) == s
