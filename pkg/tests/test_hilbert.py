import numpy as np
import pytest
from scipy import integrate

from bandpert.hilbert import PvQuadratureConfig, hilbert_closed_form, hilbert_pv, theta_eta
from bandpert.model import LimitDensity, semicircle_model, triangular_goe_model, uniform_band_model

CFG = PvQuadratureConfig()


def indicator(t):
    t = np.asarray(t, float)
    return ((t > 0) & (t < 1)).astype(float)


def test_indicator_transform():
    val = hilbert_pv(indicator, 0.75, CFG, (0, 1), breaks=(0, 1), jumps=(0, 1))
    assert val == pytest.approx(np.log(3.0), abs=1e-9)


def test_indicator_matches_scipy_cauchy_weight():
    # independent oracle: QUADPACK's Cauchy principal value routine
    for s in (0.1, 0.33, 0.75, 0.9):
        ref, _ = integrate.quad(lambda t: -1.0, 0, 1, weight="cauchy", wvar=s)
        assert hilbert_pv(indicator, s, CFG, (0, 1), jumps=(0, 1)) == pytest.approx(ref, abs=1e-9)


def test_even_function_vanishes_at_zero():
    rho = LimitDensity.triangular()
    assert abs(hilbert_pv(rho.pdf, 0.0, CFG, (-1, 1), breaks=(-1, 0, 1))) < 1e-10


def test_semicircle_at_one():
    rho = LimitDensity.semicircle(1.0)
    assert hilbert_pv(rho.pdf, 1.0, CFG, (-2, 2)) == pytest.approx(0.5, abs=1e-4)


def test_semicircle_closed_form_matches_scipy():
    rho = LimitDensity.semicircle(1.0)
    for s in np.linspace(-1.9, 1.9, 10):
        ref, _ = integrate.quad(lambda t: -rho.pdf(t), -2, 2, weight="cauchy", wvar=s, limit=200)
        assert float(hilbert_closed_form("semicircle", s, 1.0)) == pytest.approx(ref, abs=1e-6)


def test_triangular_closed_form_matches_scipy():
    rho = LimitDensity.triangular()
    for s in (-0.7, -0.2, 0.3, 0.5, 0.9, 1.5, -2.0):
        ref = 0.0
        for lo, hi in ((-1, 0), (0, 1)):
            v, _ = integrate.quad(lambda t: -rho.pdf(t), lo, hi, weight="cauchy", wvar=s) \
                if lo < s < hi else integrate.quad(lambda t: rho.pdf(t) / (s - t), lo, hi)
            ref += v
        assert float(hilbert_closed_form("triangular", s)) == pytest.approx(ref, abs=1e-8)


def test_triangular_closed_form_at_half():
    # rho(0.5) H[rho](0.5) = -F_tri(0.5), F_tri(s) = (1-s){(1-s)log(1-s) - (1+s)log(1+s) + 2s log s}
    bracket = 0.5 * np.log(0.5) - 1.5 * np.log(1.5) + 1.0 * np.log(0.5)
    assert float(hilbert_closed_form("triangular", 0.5)) == pytest.approx(-bracket, abs=1e-12)
    assert float(hilbert_closed_form("triangular", 0.0)) == 0.0


@pytest.mark.parametrize("kind,rho,breaks", [
    ("semicircle", LimitDensity.semicircle(1.0), ()),
    ("triangular", LimitDensity.triangular(), (-1, 0, 1)),
    ("uniform", LimitDensity.uniform(), (0, 1)),
])
def test_oracle_equivalence(kind, rho, breaks):
    a, b = rho.support
    jumps = (0, 1) if kind == "uniform" else ()
    s = np.linspace(a, b, 52)[1:-1]
    num = np.array([hilbert_pv(rho.pdf, si, CFG, (a, b), breaks=breaks, jumps=jumps) for si in s])
    np.testing.assert_allclose(num, hilbert_closed_form(kind, s), atol=1e-4)


def test_antisymmetry_for_even_density():
    rho = LimitDensity.triangular()
    s = np.random.default_rng(1).uniform(-1.5, 1.5, 100)
    h = lambda x: hilbert_pv(rho.pdf, x, CFG, (-1, 1), breaks=(-1, 0, 1))
    for x in s:
        assert h(-x) == pytest.approx(-h(x), abs=1e-9)


def test_refinement_convergence():
    rho = LimitDensity.semicircle(1.0)
    for s in (-1.3, 0.2, 1.7):
        v1 = hilbert_pv(rho.pdf, s, CFG, (-2, 2))
        v2 = hilbert_pv(rho.pdf, s, CFG.refined(), (-2, 2))
        assert abs(v1 - v2) < 1e-5


def test_truncated_form_without_subtraction():
    cfg = PvQuadratureConfig(exclusion_eta=0.05, nodes=20000, use_singularity_subtraction=False)
    s = 0.4
    val = hilbert_pv(indicator, s, cfg, (0, 1), jumps=(0, 1))
    exact = np.log(s / 0.05) - np.log((1 - s) / 0.05)
    assert val == pytest.approx(exact, abs=1e-6)


def test_errors():
    with pytest.raises(ValueError):
        hilbert_pv(indicator, 0.0, CFG, (0, 1), jumps=(0, 1))
    with pytest.raises(ValueError):
        hilbert_pv(lambda t: np.full(np.shape(t), np.nan), 0.5, CFG, (0, 1))
    with pytest.raises(ValueError):
        PvQuadratureConfig(exclusion_eta=0.0)


def test_theta_eta_even_model_vanishes_at_zero():
    m = triangular_goe_model()
    for eta in (0.3, 0.01):
        assert abs(theta_eta(m, 0.0, eta)) < 1e-10


def test_theta_eta_band_limit():
    m = uniform_band_model(0.2)
    # -F(0.1)/rho(0.1) = -log 2
    assert theta_eta(m, 0.1, 1e-4) == pytest.approx(-np.log(2.0), abs=1e-3)


def test_theta_eta_empty_domain_and_errors():
    m = semicircle_model(1.0)
    assert theta_eta(m, 0.3, 4 * m.M) == 0.0
    with pytest.raises(ValueError):
        theta_eta(m, 0.3, 0.0)


def test_theta_eta_bound():
    for m in (triangular_goe_model(), semicircle_model(1.0)):
        k = m.kernel
        rng = np.random.default_rng(3)
        a, b = m.support
        for s in rng.uniform(a, b, 15):
            for eta in k.eta0 * rng.uniform(0.01, 1.0, 3):
                r = float(m.rho.pdf(s))
                bound = (2 * k.C * r / k.alpha) * k.eta0 ** k.alpha + (k.bound / k.eta0) * r
                assert abs(theta_eta(m, s, eta)) <= bound
