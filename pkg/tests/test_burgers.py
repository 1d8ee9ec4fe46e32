import numpy as np
import pytest

from bandpert.burgers import (DensityFlow, burgers_residual, semicircle_cdf, semicircle_density,
                              semicircle_flow, semigroup_check, semigroup_table, solver_flow)
from bandpert.cauchy import DensityTable
from bandpert.hilbert import PvQuadratureConfig, hilbert_pv
from bandpert.model import LimitDensity, VarianceProfile, build_model


def test_semicircle_density_values():
    assert float(semicircle_density(1.0, 0.0)) == pytest.approx(1 / np.pi)
    for t in (0.3, 2.0):
        # 4t - s^2 may round to a tiny positive number at the computed edge
        assert float(semicircle_density(t, 2 * np.sqrt(t))) == pytest.approx(0.0, abs=1e-7)
        assert float(semicircle_density(t, -2 * np.sqrt(t))) == pytest.approx(0.0, abs=1e-7)
        assert float(semicircle_density(t, 2 * np.sqrt(t) + 1e-9)) == 0.0
        s = np.linspace(-2 * np.sqrt(t), 2 * np.sqrt(t), 20001)
        assert np.trapezoid(semicircle_density(t, s), s) == pytest.approx(1.0, abs=1e-5)
    assert float(semicircle_cdf(1.0, 0.0)) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        semicircle_density(0.0, 0.0)


def test_flux_derivatives_at_origin():
    # d_t rho = -1/(2 pi v^{3/2}) and d_s(rho H[rho]) = +1/(2 pi v^{3/2}) at s = 0
    c, h = 1.0, 1e-4
    dt = (semicircle_density(c + h, 0.0) - semicircle_density(c - h, 0.0)) / (2 * h)
    assert float(dt) == pytest.approx(-1 / (2 * np.pi * c ** 1.5), rel=1e-6)
    cfg = PvQuadratureConfig()
    r = 2 * np.sqrt(c)
    flux = lambda s: float(semicircle_density(c, s)) * hilbert_pv(lambda t: semicircle_density(c, t), s,
                                                                  cfg, (-r, r))
    ds = (flux(1e-3) - flux(-1e-3)) / 2e-3
    assert ds == pytest.approx(1 / (2 * np.pi * c ** 1.5), rel=1e-4)


def residual_at(dt, ds, c=1.0, t_mid=0.2):
    times = t_mid + dt * np.arange(-1, 2)
    r = 2 * np.sqrt(c + times[-1])
    m = int(np.ceil(r / ds)) + 2
    s = ds * np.arange(-m, m + 1)
    return burgers_residual(semicircle_flow(c, times, s))


def test_closed_form_residual_small_and_second_order():
    r1 = residual_at(0.1, 0.04).max_interior()
    r2 = residual_at(0.05, 0.02).max_interior()
    assert r1 < 0.05
    assert 3.0 <= r1 / r2 <= 5.0


def test_interior_excludes_edges():
    table = residual_at(0.05, 0.02)
    v = 1.25
    s_in = table.s[table.interior[0]]
    assert np.all(np.abs(s_in) <= 0.9 * 2 * np.sqrt(v))


def test_residual_input_errors():
    s = np.linspace(-3, 3, 61)
    flow = semicircle_flow(1.0, [0.0, 0.1], s)
    with pytest.raises(ValueError):
        burgers_residual(flow)
    zero = [DensityTable(s, np.zeros_like(s), np.zeros_like(s), 0.0) for _ in range(3)]
    with pytest.raises(ValueError):
        burgers_residual(DensityFlow([0.0, 0.1, 0.2], zero, "solver"))
    narrow = np.linspace(-1, 1, 41)
    with pytest.raises(ValueError):
        burgers_residual(semicircle_flow(1.0, [0.0, 0.1, 0.2], narrow))
    with pytest.raises(ValueError):
        burgers_residual(semicircle_flow(1.0, [0.0, 0.1, 0.2], s), dt=0.03)


def test_flow_mass_and_variance():
    s = np.linspace(-3, 3, 3001)
    flow = semicircle_flow(1.0, [0.0, 0.25, 0.5], s)
    for t, sl in zip(flow.times, flow.slices):
        assert sl.mass() == pytest.approx(1.0, abs=1e-2)
        assert sl.moment(2) == pytest.approx(1.0 + t, rel=0.02)
    assert flow.support(2)[1] > flow.support(0)[1]


def test_semigroup_center_value():
    s, solved, exact = semigroup_table(1.0, 1.0, points=41)
    assert float(exact[20]) == pytest.approx(1 / (np.pi * np.sqrt(2)))
    assert abs(solved[20] - exact[20]) < 1e-3


def test_semigroup_small_t_is_smoothing_bias_only():
    err_small = semigroup_check(1.0, 1e-4, points=81)
    assert err_small < 2e-3


def test_solver_flow_residual():
    # uniform mu with sigma^2 = 1; interior excludes the square-root edges of each slice
    model = build_model(LimitDensity.uniform(), VarianceProfile.constant(1.0))
    s = np.arange(-100, 201) * 0.01
    flow = solver_flow(model, [0.095, 0.10, 0.105], s)
    assert burgers_residual(flow).max_interior() <= 0.05
