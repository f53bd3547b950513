"""Acceptance gate: one test per headline criterion, at the stated
tolerance, with a printed PASS/FAIL line each.

Every test prints ``ACCEPTANCE <name>: PASS/FAIL (details)`` before
asserting, so the measured numbers are visible in the captured output of
failing tests and the pytest -v line itself carries the verdict.  Wall
times exclude the one-off kernel warmup performed by the session fixture.
"""

import math
import time

import numpy as np
import pytest

from radtrap import (Inhomogeneous, PopulationState, Radiative, SystemParams,
                     StochasticConfig, absorption_spectrum,
                     asymptotic_pump_rate_inhom, asymptotic_pump_rate_rad,
                     estimate_asymptote, evolve, gamma_ab, gamma_avg_inhom,
                     gamma_selfconsistent_rad, simulate_stochastic,
                     spectral_distribution, stationary, sweep)
from radtrap.kernels import PHI_SERIES_CUT, phi_reg

INIT = PopulationState(0.0, 0.5, 0.5)


def params_inhom(K, gp=1.0, g0=0.0, R=10.0, dw=100.0):
    return SystemParams(gamma_prime=gp, gamma0=g0, pump_rate=R,
                        regime=Inhomogeneous(doppler_width=dw, density_param=K))


def params_rad(K0, gp=1.0, g0=0.0, R=10.0):
    return SystemParams(gamma_prime=gp, gamma0=g0, pump_rate=R,
                        regime=Radiative(density_param_k0=K0))


_CAPSYS = None


@pytest.fixture(autouse=True)
def _route_report(capsys):
    global _CAPSYS
    _CAPSYS = capsys
    yield
    _CAPSYS = None


def report(name, ok, detail):
    line = f"ACCEPTANCE {name}: {'PASS' if ok else 'FAIL'} ({detail})"
    print(line)
    # also bypass pytest's capture so passing criteria stay visible
    if _CAPSYS is not None:
        with _CAPSYS.disabled():
            print(f"\n{line}", flush=True)


@pytest.fixture(scope="module", autouse=True)
def warm_kernels():
    """Compile the hot kernels once so the runtime criteria measure the
    algorithm, not the jit compiler."""
    evolve(params_inhom(1.0), t_end=1.0, n_out=10)
    evolve(params_rad(1.0), t_end=1.0, n_out=10)
    cfg = StochasticConfig(bandwidth=200.0, n_trajectories=100, seed=0)
    simulate_stochastic(params_inhom(0.0), cfg, INIT, 0.1, n_out=3)
    stationary(params_rad(1.0, g0=1e-3))


def plateau(params, window=12.0):
    from radtrap import pump_rate_estimate
    t_end = window / pump_rate_estimate(params)
    traj = evolve(params, t_end=t_end, n_out=400)
    return estimate_asymptote(traj).rate


def test_thin_medium_pump_rate():
    # K=0, gamma0=0, R=10, gamma'=1: the late-time pump rate must equal
    # gamma/2 within 2%
    t0 = time.perf_counter()
    rate = plateau(params_inhom(0.0))
    elapsed = time.perf_counter() - t0
    ok = abs(rate - 0.5) / 0.5 <= 0.02 and elapsed < 1.0
    report("thin-medium-pump-rate", ok,
           f"plateau={rate:.5f}, target 0.5 +-2%, rel dev "
           f"{abs(rate - 0.5) / 0.5:.3f}, {elapsed:.2f}s")
    assert elapsed < 1.0
    assert abs(rate - 0.5) / 0.5 <= 0.02, (
        f"thin-medium plateau {rate:.5f} deviates {abs(rate-0.5)/0.5:.1%} "
        "from gamma/2; the finite-pump value is the slow eigenvalue of the "
        "thin-medium rate matrix (0.46435 at R=10), which only approaches "
        "gamma/2 as R -> infinity")


def test_inhomogeneous_asymptote():
    t0 = time.perf_counter()
    r100 = plateau(params_inhom(100.0)) / asymptotic_pump_rate_inhom(100.0)
    r1000 = plateau(params_inhom(1000.0)) / asymptotic_pump_rate_inhom(1000.0)
    elapsed = time.perf_counter() - t0
    ok = abs(r100 - 1) <= 0.25 and abs(r1000 - 1) < abs(r100 - 1) and elapsed < 60
    report("inhomogeneous-asymptote", ok,
           f"ratio(K=100)={r100:.4f}, ratio(K=1000)={r1000:.4f}, {elapsed:.1f}s")
    assert elapsed < 60
    assert abs(r100 - 1) <= 0.25
    assert abs(r1000 - 1) < abs(r100 - 1), "ratio must move toward 1 with K"


def test_radiative_asymptote():
    t0 = time.perf_counter()
    gab = gamma_ab(params_rad(0.0))   # 6.0 at R=10, gamma'=1
    ratios = {}
    for kt in (2.0, 5.0):
        rate = plateau(params_rad(kt * gab))
        ratios[kt] = rate / asymptotic_pump_rate_rad(kt)
    elapsed = time.perf_counter() - t0
    ok = (all(abs(r - 1) <= 0.25 for r in ratios.values())
          and abs(ratios[5.0] - 1) <= abs(ratios[2.0] - 1) and elapsed < 60)
    report("radiative-asymptote", ok,
           f"ratio(Kt=2)={ratios[2.0]:.4f}, ratio(Kt=5)={ratios[5.0]:.4f}, "
           f"{elapsed:.1f}s")
    assert elapsed < 60
    for kt, r in ratios.items():
        assert abs(r - 1) <= 0.25, f"K_tilde={kt}: ratio {r:.3f}"
    assert abs(ratios[5.0] - 1) <= abs(ratios[2.0] - 1)


def test_equalization_trend():
    t0 = time.perf_counter()
    K_grid = np.logspace(0, 3, 13)
    table = sweep(params_rad(1.0, g0=1e-2), K_grid, [1e-2])
    bbs = np.array([r.state.rho_bb for r in table.rows])
    elapsed = time.perf_counter() - t0
    monotone = bool(np.all(np.diff(bbs) <= 1e-12))
    ok = monotone and bbs[-1] < 0.5 and elapsed < 10
    report("equalization-trend", ok,
           f"monotone={monotone}, final rho_bb={bbs[-1]:.4f}, {elapsed:.1f}s")
    assert elapsed < 10
    assert monotone
    assert bbs[-1] < 0.5


def test_severity_ordering():
    # matched density parameter means matched effective optical depth: the
    # radiative series is evaluated at K0 = K * gamma_ab so K_tilde = K
    t0 = time.perf_counter()
    g0 = 1e-2
    K_grid = np.logspace(0, 4, 13)
    gab = gamma_ab(params_inhom(1.0, g0=g0))
    inhom = sweep(params_inhom(1.0, g0=g0), K_grid, [g0])
    rad = sweep(params_rad(1.0, g0=g0), K_grid * gab, [g0])
    bb_i = np.array([r.state.rho_bb for r in inhom.rows])
    bb_r = np.array([r.state.rho_bb for r in rad.rows])
    elapsed = time.perf_counter() - t0
    ordered = bool(np.all(bb_r <= bb_i + 1e-12))
    report("severity-ordering", ordered and elapsed < 30,
           f"max(rad - inhom)={float((bb_r - bb_i).max()):.2e}, {elapsed:.1f}s")
    assert elapsed < 30
    assert ordered


def test_oracle_equivalence():
    t0 = time.perf_counter()
    params = params_inhom(0.0)
    grid = np.linspace(0.0, 2.0, 21)
    ref = evolve(params, initial=INIT, output_grid=grid)

    cfg = StochasticConfig(bandwidth=200.0, n_trajectories=10_000, seed=0)
    res = simulate_stochastic(params, cfg, INIT, 2.0, n_out=21)
    disc = res.mean - ref.states
    with np.errstate(invalid="ignore", divide="ignore"):
        z = np.where(res.stderr > 0, np.abs(disc) / res.stderr, 0.0)
    zmax = float(z.max())

    # B-doubling convergence check on larger ensembles so the O(1/B)
    # part stands clear of the statistical noise; the scale estimator
    # subtracts the known sampling variance from the rho_bb rms
    def scale(B):
        c = StochasticConfig(bandwidth=B, n_trajectories=40_000, seed=1)
        r = simulate_stochastic(params, c, INIT, 2.0, n_out=21)
        d = r.mean[1:, 1] - ref.states[1:, 1]
        se = r.stderr[1:, 1]
        return math.sqrt(max(float(np.mean(d ** 2 - se ** 2)), 0.0))

    ratio = scale(400.0) / scale(200.0)
    elapsed = time.perf_counter() - t0

    three_se = zmax <= 3.0
    halves = 0.3 <= ratio <= 0.75
    ok = three_se and halves and elapsed < 300
    report("oracle-equivalence", ok,
           f"max z={zmax:.2f} (<=3 required), B-doubling ratio={ratio:.3f}, "
           f"{elapsed:.1f}s")
    assert elapsed < 300
    assert halves, f"doubling B gave discrepancy ratio {ratio:.3f}, not ~0.5"
    assert three_se, (
        f"max |mean - reference| = {zmax:.2f} standard errors. The pump "
        "noise is an Ornstein-Uhlenbeck process, so the ensemble carries a "
        "deterministic O(1/B) offset (the same offset the B-doubling check "
        "measures); at B=200 with 10^4 trajectories it reaches about 3.3 "
        "standard errors of rho_bb, so this bound cannot hold robustly")


def test_quadrature_and_fixed_point_suite():
    from scipy.integrate import quad
    t0 = time.perf_counter()

    # Gauss-Hermite vs adaptive quadrature, < 1e-9 relative
    rng = np.random.default_rng(14)
    worst_q = 0.0
    for _ in range(10):
        aa = rng.uniform(0.01, 0.45)
        bb = aa + rng.uniform(0.01, 1.0 - 2 * aa)
        K = 10.0 ** rng.uniform(-2, 4)
        x = bb - aa

        def integrand(y):
            f = math.exp(-y * y)
            return f * -math.expm1(-K * x * f) / x

        ref, _ = quad(integrand, -np.inf, np.inf, epsabs=1e-300,
                      epsrel=1e-12, limit=200)
        ref *= aa / math.sqrt(math.pi)
        got = gamma_avg_inhom(PopulationState(aa, bb, 1 - aa - bb), K)
        worst_q = max(worst_q, abs(got - ref) / ref)

    # fixed-point residual < 1e-10
    worst_r = 0.0
    for _ in range(10):
        aa = rng.uniform(0.01, 0.4)
        bb = aa + rng.uniform(0.02, 1.0 - 2 * aa)
        K0 = 10.0 ** rng.uniform(-1, 3)
        p = params_rad(K0)
        g = gamma_selfconsistent_rad(PopulationState(aa, bb, 1 - aa - bb), p, K0)
        x = bb - aa
        rhs = aa * -math.expm1(-K0 * x / (gamma_ab(p) + g)) / x
        worst_r = max(worst_r, abs(g - rhs))

    # regularization-seam continuity: at the seam argument the series and
    # exact branches must agree to < 1e-12 relative
    worst_s = 0.0
    for x in (0.5, -0.5, 0.02, -0.02):
        coef = PHI_SERIES_CUT / abs(x)
        series = coef * (1.0 - 0.5 * coef * x)
        exact = -math.expm1(-coef * x) / x
        worst_s = max(worst_s, abs(series - exact) / abs(exact))

    elapsed = time.perf_counter() - t0
    ok = worst_q < 1e-9 and worst_r < 1e-10 and worst_s < 1e-12 and elapsed < 5
    report("quadrature-fixed-point-suite", ok,
           f"quad rel={worst_q:.2e}, fp residual={worst_r:.2e}, "
           f"seam={worst_s:.2e}, {elapsed:.1f}s")
    assert elapsed < 5
    assert worst_q < 1e-9
    assert worst_r < 1e-10
    assert worst_s < 1e-12


def test_spectral_broadening():
    t0 = time.perf_counter()
    widths = {}
    for K0 in (1.0, 100.0):
        p = params_rad(K0, g0=1e-4)
        st = stationary(p)
        d = np.linspace(-80.0, 80.0, 3201)
        trapped = spectral_distribution(st.state, p, d)
        g_star = gamma_selfconsistent_rad(st.state, p, K0)
        absorb = absorption_spectrum(st.state, p, g_star, d)
        widths[K0] = (trapped.fwhm(), absorb.fwhm())
    elapsed = time.perf_counter() - t0

    w_t100, w_a100 = widths[100.0]
    w_t1, w_a1 = widths[1.0]
    rel1 = abs(w_t1 - w_a1) / w_a1
    ok = w_t100 > w_a100 and rel1 < 0.5 and elapsed < 5
    report("spectral-broadening", ok,
           f"K0=100 trapped/absorption={w_t100 / w_a100:.2f}, "
           f"K0=1 width diff={rel1:.2%}, {elapsed:.1f}s")
    assert elapsed < 5
    assert w_t100 > w_a100
    assert rel1 < 0.5
