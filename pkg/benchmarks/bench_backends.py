"""Compare the compiled (numba) and pure-numpy backends.

Each backend runs in its own subprocess because the backend choice is
made at import time from ``RADTRAP_NO_NUMBA``.  Two workloads:

* ``evolve``: the adaptive integrator with the velocity-averaged
  collective rate at K=100 (the quadrature-dominated hot loop).
* ``ensemble``: the stochastic Bloch ensemble (the per-trajectory loop,
  parallelized under numba).

Usage: python benchmarks/bench_backends.py [--quick]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import numpy as np

quick = sys.argv[1] == "quick"

import radtrap as rt

out = {"numba": rt.NUMBA_ENABLED}

params = rt.SystemParams(gamma_prime=1.0, gamma0=0.0, pump_rate=10.0,
                         regime=rt.Inhomogeneous(doppler_width=100.0,
                                                 density_param=100.0))
t_end = 200.0 if quick else 2000.0
# warmup (jit compilation on the compiled path)
rt.evolve(params, t_end=1.0, n_out=5)
t0 = time.perf_counter()
traj = rt.evolve(params, t_end=t_end, n_out=200)
out["evolve_s"] = time.perf_counter() - t0
out["evolve_final"] = traj.states[-1].tolist()

thin = rt.SystemParams(gamma_prime=1.0, gamma0=0.0, pump_rate=10.0,
                       regime=rt.Inhomogeneous(doppler_width=100.0,
                                               density_param=0.0))
n_traj = 500 if quick else 4000
cfg = rt.StochasticConfig(bandwidth=200.0, n_trajectories=n_traj, seed=7)
init = rt.PopulationState(0.0, 0.5, 0.5)
rt.simulate_stochastic(thin, cfg, init, 0.05, n_out=3)   # warmup
t0 = time.perf_counter()
res = rt.simulate_stochastic(thin, cfg, init, 2.0, n_out=11)
out["ensemble_s"] = time.perf_counter() - t0
out["ensemble_final"] = res.mean[-1].tolist()
out["ensemble_se"] = res.stderr[-1].tolist()

print(json.dumps(out))
"""


def run_backend(no_numba: bool, quick: bool) -> dict:
    env = dict(os.environ)
    if no_numba:
        env["RADTRAP_NO_NUMBA"] = "1"
    else:
        env.pop("RADTRAP_NO_NUMBA", None)
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, "quick" if quick else "full"],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--quick", action="store_true",
                        help="smaller workloads for a fast sanity run")
    args = parser.parse_args()

    print("running compiled backend...")
    fast = run_backend(no_numba=False, quick=args.quick)
    print("running numpy fallback...")
    slow = run_backend(no_numba=True, quick=args.quick)

    assert fast["numba"] and not slow["numba"], "backend selection failed"

    print()
    print(f"{'workload':<12} {'numba':>10} {'numpy':>10} {'speedup':>9}")
    for key, label in (("evolve_s", "evolve"), ("ensemble_s", "ensemble")):
        a, b = fast[key], slow[key]
        print(f"{label:<12} {a:>9.3f}s {b:>9.3f}s {b / a:>8.1f}x")

    # the integrator is deterministic: both backends run identical
    # arithmetic, so final states must agree to rounding
    diff = max(abs(x - y) for x, y in
               zip(fast["evolve_final"], slow["evolve_final"]))
    print(f"\nevolve final-state agreement: {diff:.2e}")
    assert diff < 1e-12, "backends disagree on the deterministic workload"

    # the ensemble uses backend-specific RNG streams; agreement is
    # statistical (5 combined standard errors)
    worst = 0.0
    for m1, m2, s1, s2 in zip(fast["ensemble_final"], slow["ensemble_final"],
                              fast["ensemble_se"], slow["ensemble_se"]):
        comb = (s1 ** 2 + s2 ** 2) ** 0.5
        if comb > 0:
            worst = max(worst, abs(m1 - m2) / comb)
    print(f"ensemble agreement: {worst:.2f} combined standard errors")
    assert worst < 5.0, "ensemble means disagree beyond statistical noise"
    print("OK")
    return 0


if __name__ == "__main__":
    sys.exit(main())
