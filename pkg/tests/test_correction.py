import numpy as np
import pytest

from bandpert.correction import (HypothesisError, F_values, closed_form_F, correction_F,
                                 finite_difference, lambda_eta, lambda_eta_symmetric_part,
                                 lambda_functional, lambda_integrand, pairing_with_F)
from bandpert.model import (ModelSpec, build_model, LimitDensity, VarianceProfile, semicircle_model,
                            triangular_goe_model, uniform_band_model)


@pytest.fixture(scope="module")
def band():
    return uniform_band_model(0.2)


@pytest.fixture(scope="module")
def tri():
    return triangular_goe_model()


@pytest.fixture(scope="module")
def semi():
    return semicircle_model(1.0)


def test_closed_form_band_values():
    assert float(closed_form_F("uniform-band", 0.1, ell=0.2)) == pytest.approx(np.log(2.0))
    assert float(closed_form_F("uniform-band", 0.5, ell=0.2)) == 0.0
    assert float(closed_form_F("uniform-band", 1.3, ell=0.2)) == 0.0
    with pytest.raises(ValueError):
        closed_form_F("uniform-band", 0.5, ell=1.5)


def test_closed_form_triangular_values():
    # evaluated directly from (1-s){(1-s)log(1-s) - (1+s)log(1+s) + 2s log|s|}
    expected = 0.5 * (0.5 * np.log(0.5) - 1.5 * np.log(1.5) + np.log(0.5))
    assert float(closed_form_F("triangular-goe", 0.5)) == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(-0.823959, abs=1e-6)
    assert float(closed_form_F("triangular-goe", -0.5)) == pytest.approx(-expected, abs=1e-14)
    assert float(closed_form_F("triangular-goe", 0.0)) == 0.0
    assert float(closed_form_F("triangular-goe", 1.0)) == 0.0


def test_band_correction_matches_closed_form(band):
    grid = np.linspace(-0.05, 1.05, 221)
    table = correction_F(band, grid)
    keep = np.ones(grid.size, bool)
    for p in (0.0, 0.2, 0.8, 1.0):
        keep &= np.abs(grid - p) > 10 * 1e-3
    np.testing.assert_allclose(table.F[keep], closed_form_F("uniform-band", grid[keep], ell=0.2), atol=1e-3)


def test_band_correction_midpoint(band):
    assert abs(float(F_values(band, [0.5])[0])) < 1e-10


def test_triangular_correction_matches_formula(tri):
    s = np.array([-0.9, -0.5, -0.1, 0.1, 0.5, 0.9])
    np.testing.assert_allclose(F_values(tri, s), closed_form_F("triangular-goe", s), atol=1e-6)


def test_semicircle_correction_matches_formula(semi):
    s = np.linspace(-1.9, 1.9, 21)
    np.testing.assert_allclose(F_values(semi, s), closed_form_F("semicircle-goe", s), atol=1e-5)


def test_F_vanishes_outside_support(band, tri):
    for m in (band, tri):
        a, b = m.support
        s = np.concatenate([np.linspace(a - 1, a - 1e-3, 20), np.linspace(b + 1e-3, b + 1, 20)])
        assert np.all(np.abs(F_values(m, s)) < 1e-6)


@pytest.mark.parametrize("name", ["band", "tri", "semi"])
def test_first_moment_preserved(name, request):
    m = request.getfixturevalue(name)
    a, b = m.support
    grid = np.linspace(a, b, 801)
    F = F_values(m, grid)
    F = np.where(np.isfinite(F), F, 0.0)
    # log singularities at jumps are integrable; trapezoid over the finite values
    assert abs(np.trapezoid(F, grid)) < 1e-2 if name == "band" else abs(np.trapezoid(F, grid)) < 1e-4


def test_first_moment_band_exact_quadrature(band):
    from scipy import integrate
    f = lambda s: float(closed_form_F("uniform-band", s, ell=0.2))
    val, _ = integrate.quad(f, 0, 1, points=[0.2, 0.8], limit=200)
    assert abs(val) < 1e-10


def test_odd_symmetry(tri, semi):
    for m in (tri, semi):
        s = np.linspace(0.05, 0.95 * m.support[1], 15)
        np.testing.assert_allclose(F_values(m, -s), -F_values(m, s), atol=1e-9)


def test_flags_and_derivative(band):
    grid = np.linspace(-0.05, 1.05, 111)
    table = correction_F(band, grid)
    assert set(table.flags) <= {"ok", "singular"}
    for p in (0.0, 1.0):
        i = int(np.argmin(np.abs(grid - p)))
        assert table.flags[i] == "singular"
    mid = (grid > 0.3) & (grid < 0.7)
    assert np.all(table.flags[mid] == "ok")
    # F' = 1/(1-s) + ... inside (0.2, 0.8): F is constant 0 there
    assert np.all(np.abs(table.dF[mid]) < 1e-6)
    inner = (grid > 0.05) & (grid < 0.15)
    np.testing.assert_allclose(table.dF[inner], -1.0 / grid[inner], rtol=2e-2)


def test_finite_difference_one_sided_at_singular_point():
    g = np.linspace(0, 1, 11)
    v = np.where(g < 0.55, g, 10 + g)
    d = finite_difference(g, v, singular=[0.55])
    np.testing.assert_allclose(d, 1.0)


def test_grid_must_cover_support(band):
    with pytest.raises(ValueError):
        correction_F(band, np.linspace(0.02, 0.98, 200))
    with pytest.raises(ValueError):
        correction_F(band, np.array([0.0, 0.1, 0.5, 1.0]))


def test_holder_failure_raises(tri):
    # rho is Lipschitz with constant 1, so C = 1e-3 cannot hold
    k = tri.kernel.with_holder(C=1e-3)
    bad = ModelSpec(f=tri.f, profile=tri.profile, kernel=k, rho=tri.rho, resolution=tri.resolution)
    with pytest.raises(HypothesisError):
        correction_F(bad, np.linspace(-1.1, 1.1, 50))


def test_lambda_integrand_identity():
    rng = np.random.default_rng(0)
    for _ in range(50):
        z = complex(rng.uniform(-2, 2), rng.uniform(0.1, 2))
        s, t = rng.uniform(-1, 1, 2)
        g = lambda x: 1 / (z - x)
        assert lambda_integrand(z, s, t) == pytest.approx(g(t) * g(s) ** 2, rel=1e-8)


@pytest.mark.parametrize("name,example", [("band", "uniform-band"), ("tri", "triangular-goe"),
                                          ("semi", "semicircle-goe")])
def test_oracle_triangle(name, example, request):
    m = request.getfixturevalue(name)
    F = lambda s: closed_form_F(example, s, ell=0.2)
    rng = np.random.default_rng(11)
    a, b = m.support
    for _ in range(10):
        z = complex(rng.uniform(a - 0.5, b + 0.5), rng.uniform(0.2, 2.0))
        lam = lambda_functional(m, z)
        assert abs(lam - pairing_with_F(m, z, F)) <= 1e-3 * (1 + abs(lam))


def test_numeric_F_pairing(band):
    z = 0.5 + 0.5j
    lam = lambda_functional(band, z)
    assert abs(lam - pairing_with_F(band, z)) <= 1e-3 * (1 + abs(lam))


def test_lambda_decays_like_cube(tri):
    vals = [abs(lambda_functional(tri, 1j * Y)) for Y in (10.0, 20.0, 40.0)]
    assert vals[0] / vals[1] == pytest.approx(8.0, rel=0.1)
    assert vals[1] / vals[2] == pytest.approx(8.0, rel=0.05)


def test_lambda_rejects_lower_half_plane(tri):
    with pytest.raises(ValueError):
        lambda_functional(tri, 0.5 - 1j)
    with pytest.raises(ValueError):
        lambda_eta(tri, 0.5 + 1j, 0.0)


def test_lambda_eta_converges(band):
    z = 0.5 + 0.5j
    lam = lambda_functional(band, z)
    errs = [abs(lambda_eta(band, z, eta) - lam) for eta in (1e-1, 1e-2, 1e-3)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-2 * abs(lam)


def test_lambda_eta_empty_domain(semi):
    assert lambda_eta(semi, 1j, 4 * semi.M) == 0


def test_antisymmetric_part_cancels(band, tri):
    for m in (band, tri):
        val, scale = lambda_eta_symmetric_part(m, 0.3 + 0.7j, 0.05, nodes=200)
        assert abs(val) <= 1e-12 * scale
