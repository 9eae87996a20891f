import numpy as np
import pytest

from collkit.util import (
    bracket,
    gauss_panel,
    geometric_panels,
    graded_panels,
    orthonormal_complement,
    sphere_area,
    sphere_rule,
    splitmix64,
)


def test_splitmix_deterministic():
    a = splitmix64(2024, 16)
    b = splitmix64(2024, 16)
    assert np.array_equal(a, b)
    assert np.all((a >= 0.0) & (a < 1.0))
    assert not np.array_equal(a, splitmix64(2025, 16))


def test_gauss_panel_exactness():
    x, w = gauss_panel(-1.0, 3.0, 6)
    # exact for polynomials up to degree 11
    assert np.dot(w, x**10) == pytest.approx((3.0**11 + 1.0) / 11.0, rel=1e-13)


def test_graded_panels_weight_sum():
    x, w = graded_panels(0.0, 2.0, 10, 4)
    assert np.sum(w) == pytest.approx(2.0, rel=1e-14)
    assert np.all((x > 0.0) & (x < 2.0))


def test_graded_panels_singular_integrand():
    # integral of x^{-1/2} over [0, 1] = 2; the panels must both resolve the
    # endpoint singularity and converge under refinement
    x8, w8 = graded_panels(0.0, 1.0, 8, 4)
    x32, w32 = graded_panels(0.0, 1.0, 32, 4)
    e8 = abs(np.dot(w8, x8**-0.5) - 2.0)
    e32 = abs(np.dot(w32, x32**-0.5) - 2.0)
    assert e32 < 5e-3
    assert e32 < e8 / 3.0


def test_graded_panels_smooth_convergence():
    # refinement must also shrink the error for a smooth integrand with mass
    # away from the graded endpoint
    f = lambda x: np.cos(3.0 * x)
    exact = np.sin(3.0) / 3.0
    errs = []
    for n in (4, 8, 16):
        x, w = graded_panels(0.0, 1.0, n, 4)
        errs.append(abs(np.dot(w, f(x)) - exact))
    assert errs[2] < 1e-10
    assert errs[2] < errs[0]


def test_geometric_panels_log_integrand():
    x, w = geometric_panels(1.0, np.e**4, 16, 4)
    assert np.dot(w, 1.0 / x) == pytest.approx(4.0, rel=1e-8)


def test_panel_interval_validation():
    with pytest.raises(ValueError):
        graded_panels(1.0, 1.0, 4, 4)
    with pytest.raises(ValueError):
        geometric_panels(0.0, 1.0, 4, 4)


def test_sphere_rule_weight_sum():
    for dim in (2, 3):
        pts, w = sphere_rule(dim, 8, 16)
        assert np.sum(w) == pytest.approx(sphere_area(dim), rel=1e-12)
        assert np.allclose(np.linalg.norm(pts, axis=-1), 1.0)


def test_sphere_rule_second_moment():
    # integral of x^2 over S^2 is |S^2|/3
    pts, w = sphere_rule(3, 8, 16)
    assert np.dot(w, pts[:, 0] ** 2) == pytest.approx(4.0 * np.pi / 3.0, rel=1e-12)
    # odd moments vanish
    assert abs(np.dot(w, pts[:, 2])) < 1e-13


def test_orthonormal_complement_frames():
    rng = np.random.default_rng(7)
    n = rng.normal(size=(50, 3))
    n /= np.linalg.norm(n, axis=-1, keepdims=True)
    e1, e2 = orthonormal_complement(n)
    assert np.allclose(np.sum(e1 * n, axis=-1), 0.0, atol=1e-12)
    assert np.allclose(np.sum(e2 * n, axis=-1), 0.0, atol=1e-12)
    assert np.allclose(np.sum(e1 * e2, axis=-1), 0.0, atol=1e-12)
    assert np.allclose(np.linalg.norm(e1, axis=-1), 1.0)
    assert np.allclose(np.linalg.norm(e2, axis=-1), 1.0)


def test_bracket_values():
    assert bracket(0.0) == 1.0
    assert bracket(np.array([3.0, 0.0, 4.0])) == pytest.approx(np.sqrt(26.0))


def test_sphere_area_values():
    assert sphere_area(2) == pytest.approx(2.0 * np.pi)
    assert sphere_area(3) == pytest.approx(4.0 * np.pi)
