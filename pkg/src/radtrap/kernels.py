"""Hot numerical kernels.

Everything here is compiled with numba unless ``RADTRAP_NO_NUMBA`` is set
(see :mod:`radtrap.backend`).  The functions take plain floats and numpy
arrays so the same source runs on both paths.

Conventions: all rates in units of gamma (= 1), times in 1/gamma.  The
population state is the scalar triple (aa, bb, cc).  Regime codes:
0 = inhomogeneous (Doppler), 1 = radiative.

Status codes returned by the solvers:
0 ok, 1 step-size underflow, 2 inversion (aa > bb), 3 no convergence.
"""

import cmath
import math

import numpy as np

from .backend import njit, prange

SQRT_PI = math.sqrt(math.pi)

STATUS_OK = 0
STATUS_UNDERFLOW = 1
STATUS_INVERSION = 2
STATUS_NO_CONVERGENCE = 3

REGIME_INHOM = 0
REGIME_RAD = 1

#: Below this value of the exponent argument the trapping factor switches
#: to its first-order series; the seam error is O(1e-13).
PHI_SERIES_CUT = 1e-6


@njit
def phi_reg(coef, x):
    """Regularized (1 - exp(-coef*x))/x; series branch near coef*x = 0."""
    a = coef * x
    if abs(a) < PHI_SERIES_CUT:
        return coef * (1.0 - 0.5 * a)
    return -math.expm1(-a) / x


@njit
def gamma_spectral_inhom_kernel(aa, bb, K, delta_over_dw):
    """Doppler-regime spectral trapping rate at detuning delta/Delta_D."""
    f = math.exp(-0.5 * delta_over_dw * delta_over_dw)
    return aa * phi_reg(K * f, bb - aa)


@njit
def gamma_avg_inhom_kernel(aa, bb, K, gh_f, gh_w):
    """Velocity-averaged trapping rate, Gauss-Hermite quadrature.

    ``gh_f`` holds exp(-y_i^2) at the (symmetry-folded) nodes and ``gh_w``
    the matching weights; weights sum to sqrt(pi).

    For K*x >= 1e-3 the node sum collapses to a single weighted exp sum,
    which is both faster and accurate to ~1e-13 relative; below that the
    per-node expm1/series form avoids cancellation.
    """
    x = bb - aa
    c = K * x
    n = gh_f.size
    if abs(c) >= 1e-3:
        s = 0.0
        for i in range(n):
            s += gh_w[i] * math.exp(-c * gh_f[i])
        return aa * (SQRT_PI - s) / (x * SQRT_PI)
    s = 0.0
    for i in range(n):
        s += gh_w[i] * phi_reg(K * gh_f[i], x)
    return aa * s / SQRT_PI


@njit
def rad_rhs_eval(G, aa, x, K0, gab):
    """Right-hand side of the radiative self-consistency relation at Delta=0."""
    c = K0 / (gab + G)
    return aa * phi_reg(c, x)


@njit
def rad_fixed_point(aa, bb, K0, gab):
    """Solve G = rhs(G) for the radiative collective rate at line center.

    The rhs is non-increasing in G, so the root is unique and bracketed by
    [0, rhs(0)].  Guarded Newton inside a shrinking bisection bracket.
    Returns (G, status, iterations).
    """
    if aa > bb + 1e-9:
        return 0.0, STATUS_INVERSION, 0
    x = bb - aa
    if aa <= 0.0 or K0 <= 0.0:
        return 0.0, STATUS_OK, 0
    hi = rad_rhs_eval(0.0, aa, x, K0, gab)
    if hi <= 0.0:
        return 0.0, STATUS_OK, 0
    lo = 0.0
    G = 0.5 * hi
    it = 0
    while it < 200:
        it += 1
        # F(G) = G - rhs(G) is increasing; Newton with bracket fallback
        u = K0 * x / (gab + G)
        r = rad_rhs_eval(G, aa, x, K0, gab)
        F = G - r
        if F > 0.0:
            hi = G
        else:
            lo = G
        drdG = -aa * math.exp(-u) * K0 / ((gab + G) * (gab + G))
        step = F / (1.0 - drdG)
        Gn = G - step
        if Gn <= lo or Gn >= hi:
            Gn = 0.5 * (lo + hi)
        dG = abs(Gn - G)
        G = Gn
        if dG < 1e-13 * (1.0 + G):
            return G, STATUS_OK, it
    return G, STATUS_NO_CONVERGENCE, it


@njit
def rad_spectral_kernel(aa, bb, K0, gab, g_star, delta):
    """Radiative-regime spectral rate at detuning delta, given the line-center
    fixed point ``g_star``."""
    big_gab = gab + g_star
    c = K0 * big_gab / (big_gab * big_gab + delta * delta)
    return aa * phi_reg(c, bb - aa)


@njit
def collective_rate(aa, bb, regime, K, gab, gh_f, gh_w):
    """Collective decay/repump rate for the current populations.

    Returns (Gamma, status).  Negative excited population is clipped to
    zero; it can occur transiently at the integrator's working precision.
    """
    if K <= 0.0:
        return 0.0, STATUS_OK
    a = aa if aa > 0.0 else 0.0
    if a == 0.0:
        return 0.0, STATUS_OK
    if regime == REGIME_INHOM:
        g = gamma_avg_inhom_kernel(a, bb, K, gh_f, gh_w)
        if g < 0.0:
            g = 0.0
        return g, STATUS_OK
    g, st, _ = rad_fixed_point(a, bb, K, gab)
    return g, st


@njit
def _rhs(aa, bb, cc, gp, g0, R, G):
    daa = -(1.0 + gp + G) * aa + G * bb - R * (aa - cc)
    dcc = gp * aa + g0 * bb - g0 * cc + R * (aa - cc)
    dbb = -(daa + dcc)
    return daa, dbb, dcc


@njit
def integrate_populations(aa0, bb0, cc0, gp, g0, R, regime, K,
                          gh_f, gh_w, t_out, rtol, atol):
    """Dormand-Prince 5(4) integration of the trapping-coupled rate equations.

    The collective rate is re-evaluated from the instantaneous populations
    at every stage.  Steps are clamped to land exactly on the requested
    output times.  Returns (states (n,3), gammas (n,), status).
    """
    n = t_out.size
    states = np.zeros((n, 3))
    gammas = np.zeros(n)
    gab = 0.5 * (1.0 + gp + R + g0)

    aa, bb, cc = aa0, bb0, cc0
    t = t_out[0]
    states[0, 0], states[0, 1], states[0, 2] = aa, bb, cc
    g0_rate, st = collective_rate(aa, bb, regime, K, gab, gh_f, gh_w)
    if st != STATUS_OK:
        return states, gammas, st
    gammas[0] = g0_rate

    # Dormand-Prince 5(4) tableau
    a21 = 1.0 / 5.0
    a31, a32 = 3.0 / 40.0, 9.0 / 40.0
    a41, a42, a43 = 44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0
    a51, a52, a53, a54 = 19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0
    a61, a62, a63, a64, a65 = 9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0
    b1, b3, b4, b5, b6 = 35.0 / 384.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0
    e1, e3, e4, e5, e6, e7 = (71.0 / 57600.0, -71.0 / 16695.0, 71.0 / 1920.0,
                              -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0)

    h = 1e-3
    iout = 1
    while iout < n:
        target = t_out[iout]
        hs = h
        clamp = False
        if t + hs >= target:
            hs = target - t
            clamp = True
        if hs < 1e-14:
            if clamp:
                # grid point closer than the underflow floor: copy state
                states[iout, 0], states[iout, 1], states[iout, 2] = aa, bb, cc
                G, st = collective_rate(aa, bb, regime, K, gab, gh_f, gh_w)
                if st != STATUS_OK:
                    return states, gammas, st
                gammas[iout] = G
                t = target
                iout += 1
                continue
            return states, gammas, STATUS_UNDERFLOW

        G, st = collective_rate(aa, bb, regime, K, gab, gh_f, gh_w)
        if st != STATUS_OK:
            return states, gammas, st
        k1a, k1b, k1c = _rhs(aa, bb, cc, gp, g0, R, G)

        ya, yb, yc = aa + hs * a21 * k1a, bb + hs * a21 * k1b, cc + hs * a21 * k1c
        G, st = collective_rate(ya, yb, regime, K, gab, gh_f, gh_w)
        if st != STATUS_OK:
            return states, gammas, st
        k2a, k2b, k2c = _rhs(ya, yb, yc, gp, g0, R, G)

        ya = aa + hs * (a31 * k1a + a32 * k2a)
        yb = bb + hs * (a31 * k1b + a32 * k2b)
        yc = cc + hs * (a31 * k1c + a32 * k2c)
        G, st = collective_rate(ya, yb, regime, K, gab, gh_f, gh_w)
        if st != STATUS_OK:
            return states, gammas, st
        k3a, k3b, k3c = _rhs(ya, yb, yc, gp, g0, R, G)

        ya = aa + hs * (a41 * k1a + a42 * k2a + a43 * k3a)
        yb = bb + hs * (a41 * k1b + a42 * k2b + a43 * k3b)
        yc = cc + hs * (a41 * k1c + a42 * k2c + a43 * k3c)
        G, st = collective_rate(ya, yb, regime, K, gab, gh_f, gh_w)
        if st != STATUS_OK:
            return states, gammas, st
        k4a, k4b, k4c = _rhs(ya, yb, yc, gp, g0, R, G)

        ya = aa + hs * (a51 * k1a + a52 * k2a + a53 * k3a + a54 * k4a)
        yb = bb + hs * (a51 * k1b + a52 * k2b + a53 * k3b + a54 * k4b)
        yc = cc + hs * (a51 * k1c + a52 * k2c + a53 * k3c + a54 * k4c)
        G, st = collective_rate(ya, yb, regime, K, gab, gh_f, gh_w)
        if st != STATUS_OK:
            return states, gammas, st
        k5a, k5b, k5c = _rhs(ya, yb, yc, gp, g0, R, G)

        ya = aa + hs * (a61 * k1a + a62 * k2a + a63 * k3a + a64 * k4a + a65 * k5a)
        yb = bb + hs * (a61 * k1b + a62 * k2b + a63 * k3b + a64 * k4b + a65 * k5b)
        yc = cc + hs * (a61 * k1c + a62 * k2c + a63 * k3c + a64 * k4c + a65 * k5c)
        G, st = collective_rate(ya, yb, regime, K, gab, gh_f, gh_w)
        if st != STATUS_OK:
            return states, gammas, st
        k6a, k6b, k6c = _rhs(ya, yb, yc, gp, g0, R, G)

        na = aa + hs * (b1 * k1a + b3 * k3a + b4 * k4a + b5 * k5a + b6 * k6a)
        nb = bb + hs * (b1 * k1b + b3 * k3b + b4 * k4b + b5 * k5b + b6 * k6b)
        nc = cc + hs * (b1 * k1c + b3 * k3c + b4 * k4c + b5 * k5c + b6 * k6c)
        G, st = collective_rate(na, nb, regime, K, gab, gh_f, gh_w)
        if st != STATUS_OK:
            return states, gammas, st
        k7a, k7b, k7c = _rhs(na, nb, nc, gp, g0, R, G)

        era = hs * (e1 * k1a + e3 * k3a + e4 * k4a + e5 * k5a + e6 * k6a + e7 * k7a)
        erb = hs * (e1 * k1b + e3 * k3b + e4 * k4b + e5 * k5b + e6 * k6b + e7 * k7b)
        erc = hs * (e1 * k1c + e3 * k3c + e4 * k4c + e5 * k5c + e6 * k6c + e7 * k7c)

        sa = atol + rtol * max(abs(aa), abs(na))
        sb = atol + rtol * max(abs(bb), abs(nb))
        sc = atol + rtol * max(abs(cc), abs(nc))
        err = math.sqrt(((era / sa) ** 2 + (erb / sb) ** 2 + (erc / sc) ** 2) / 3.0)

        if err <= 1.0:
            aa, bb, cc = na, nb, nc
            if clamp:
                t = target
                states[iout, 0], states[iout, 1], states[iout, 2] = aa, bb, cc
                G, st = collective_rate(aa, bb, regime, K, gab, gh_f, gh_w)
                if st != STATUS_OK:
                    return states, gammas, st
                gammas[iout] = G
                iout += 1
            else:
                t += hs
            fac = 0.9 * err ** -0.2 if err > 0.0 else 5.0
            if fac > 5.0:
                fac = 5.0
            elif fac < 0.2:
                fac = 0.2
            hn = hs * fac
            if clamp:
                if hn > h:
                    h = hn
            else:
                h = hn
        else:
            fac = 0.9 * err ** -0.2
            if fac < 0.2:
                fac = 0.2
            h = hs * fac
            if h < 1e-14:
                return states, gammas, STATUS_UNDERFLOW

    return states, gammas, STATUS_OK


@njit(parallel=True)
def ou_ensemble(n_traj, n_steps, stride, dt, bandwidth, R, gp, g0, G_fixed,
                delta_ac, gamma_ac, aa0, cc0, seed, n_store):
    """Monte-Carlo ensemble of the stochastic three-level Bloch equations.

    The complex pump amplitude is an Ornstein-Uhlenbeck process with
    correlation rate ``bandwidth`` calibrated so the integrated amplitude
    autocorrelation equals R.  Per step the amplitude is frozen and the
    atom advanced by Strang splitting: exact half-step of the coherence,
    RK4 full step of the populations, exact half-step of the coherence.

    Trajectories get independent, deterministically seeded RNG streams and
    write disjoint rows, so the result is reproducible regardless of the
    thread count.  Returns (out, omega_store) where out[k, j] holds
    (aa, bb, cc) of trajectory k at output sample j and omega_store keeps
    the full amplitude history of the first ``n_store`` trajectories.
    """
    n_out = n_steps // stride + 1
    out = np.zeros((n_traj, n_out, 3))
    omega_store = np.zeros((n_store, n_steps + 1), dtype=np.complex128)

    # per-quadrature-component OU parameters: stationary variance R*B/4
    sig_st = math.sqrt(R * bandwidth / 4.0) if R > 0.0 else 0.0
    decay = math.exp(-bandwidth * dt)
    exc = sig_st * math.sqrt(1.0 - decay * decay)

    lam = complex(gamma_ac, delta_ac)
    e_half = cmath.exp(-lam * dt / 2.0)

    for k in prange(n_traj):
        np.random.seed((seed + 2654435761 * (k + 1)) % 4294967296)
        ox = sig_st * np.random.normal(0.0, 1.0)
        oy = sig_st * np.random.normal(0.0, 1.0)
        om = complex(ox, oy)
        aa = aa0
        cc = cc0
        # the rate-equation limit assumes the pump has been on long enough
        # for the coherence to reach its stationary response; starting it
        # at zero would add a spurious O(1/B) startup layer.  The coherence
        # low-pass filters the amplitude, so its stationary conditional
        # mean given om is i*om*w/(lam + B)
        rac = 1j * om * (aa - cc) / (lam + bandwidth)
        out[k, 0, 0] = aa
        out[k, 0, 1] = 1.0 - aa - cc
        out[k, 0, 2] = cc
        if k < n_store:
            omega_store[k, 0] = om
        for step in range(n_steps):
            ox = ox * decay + exc * np.random.normal(0.0, 1.0)
            oy = oy * decay + exc * np.random.normal(0.0, 1.0)
            om = complex(ox, oy)
            if k < n_store:
                omega_store[k, step + 1] = om

            # coherence half-step, populations frozen
            w = aa - cc
            ss = 1j * om * w / lam
            rac = ss + (rac - ss) * e_half

            # populations full step, coherence frozen
            S = -2.0 * (om.conjugate() * rac).imag
            k1a = -(1.0 + gp + G_fixed) * aa + G_fixed * (1.0 - aa - cc) + S
            k1c = gp * aa + g0 * (1.0 - aa - cc) - g0 * cc - S
            ta = aa + 0.5 * dt * k1a
            tc = cc + 0.5 * dt * k1c
            k2a = -(1.0 + gp + G_fixed) * ta + G_fixed * (1.0 - ta - tc) + S
            k2c = gp * ta + g0 * (1.0 - ta - tc) - g0 * tc - S
            ta = aa + 0.5 * dt * k2a
            tc = cc + 0.5 * dt * k2c
            k3a = -(1.0 + gp + G_fixed) * ta + G_fixed * (1.0 - ta - tc) + S
            k3c = gp * ta + g0 * (1.0 - ta - tc) - g0 * tc - S
            ta = aa + dt * k3a
            tc = cc + dt * k3c
            k4a = -(1.0 + gp + G_fixed) * ta + G_fixed * (1.0 - ta - tc) + S
            k4c = gp * ta + g0 * (1.0 - ta - tc) - g0 * tc - S
            aa = aa + dt * (k1a + 2.0 * k2a + 2.0 * k3a + k4a) / 6.0
            cc = cc + dt * (k1c + 2.0 * k2c + 2.0 * k3c + k4c) / 6.0

            # coherence half-step with updated populations
            w = aa - cc
            ss = 1j * om * w / lam
            rac = ss + (rac - ss) * e_half

            if (step + 1) % stride == 0:
                j = (step + 1) // stride
                out[k, j, 0] = aa
                out[k, j, 1] = 1.0 - aa - cc
                out[k, j, 2] = cc
    return out, omega_store
