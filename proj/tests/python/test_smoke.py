import math

import pytest

import loopsoup as ls


def test_special_functions():
    assert ls.zeta(2.0) == pytest.approx(math.pi**2 / 6, rel=1e-14)
    assert ls.polylog(2.0, 0.5) == pytest.approx(math.pi**2 / 12 - math.log(2) ** 2 / 2, rel=1e-13)
    w = ls.lambert_w_m1(-0.1)
    assert w * math.exp(w) == pytest.approx(-0.1, rel=1e-12)


def test_thermo_and_condensate():
    p = ls.ModelParams(d=3, beta=1.0)
    rc = ls.critical_density(p)
    assert rc == pytest.approx((2 * math.pi) ** -1.5 * ls.zeta(1.5), rel=1e-13)
    assert ls.density(p, ls.mu_of_rho(p, 0.5 * rc)) == pytest.approx(0.5 * rc, rel=1e-10)
    assert ls.rate_I(p, 0.0, 2 * rc) == 0.0

    h = ls.HYLParams(a=0.0, b=1.0)
    sol = ls.solve_rho_bar(p, h, 1.5 * rc)
    assert sol.rho_bar == pytest.approx(0.157895, rel=2e-5)
    rho_hy, jump = ls.critical_density_hyl(p, h)
    assert rho_hy < rc and jump > 0
    assert ls.free_energy(p, h, 1.5 * rc) < 0


def test_grand_canonical():
    p = ls.ModelParams()
    h = ls.HYLParams(a=2.0, b=1.0)
    mus = [-1.0, -0.5, 0.0, 0.5]
    rhos = [ls.rho_gc(p, h, mu) for mu in mus]
    assert rhos == sorted(rhos)
    assert ls.rho_mean_field(p, 2.0, 1.0) == pytest.approx(0.5)
    with pytest.raises(ValueError):
        ls.rho_gc(p, ls.HYLParams(a=1.0, b=1.0), 0.0)


def test_finite_volume_and_sampler():
    p = ls.ModelParams()
    m = ls.FiniteVolumeModel(V=5.0, params=p, q=1, hyl=ls.HYLParams(a=0.0, b=0.0), mu=-0.3)
    pmf = ls.free_canonical_pmf(m, 300)
    assert sum(pmf) == pytest.approx(1.0, abs=1e-9)
    assert pmf[1] / pmf[0] == pytest.approx(ls.intensity(m, 1), rel=1e-12)

    m = ls.FiniteVolumeModel(V=20.0, params=p, q=4, hyl=ls.HYLParams(a=0.0, b=1.0))
    exact = ls.long_loop_density_exact(m, 10)
    cfg = ls.SamplerConfig(seed=3, n_chains=2, sweeps=20000, burn_in=1000)
    rep = ls.estimate_long_density(m, 10, cfg)
    assert abs(rep.mean - exact) <= 5 * rep.std_error
    assert set(rep.acceptance_rates) <= {"split", "merge", "reslice"}
    assert ls.canonical_log_partition(m, 10) >= 0.0


def test_pressure_gap():
    g = ls.pressure_gap(ls.ModelParams(), ls.HYLParams(a=2.0, b=1.0), 0.0)
    assert g["gap"] < -1e-8
