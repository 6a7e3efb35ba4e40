"""Monte Carlo calibration runs behind the frozen constants in
tests/frozen.py.

Run ``python tools/calibrate.py`` and paste the printed block into
tests/frozen.py. Seeds are fixed, so reruns reproduce the same numbers.
"""

import numpy as np

from mcscreen.ace import AceConfig, ace_mc
from mcscreen.baselines import dcor_score, default_nis_spec, nis_score, sis_score
from mcscreen.bspline import SplineSpec
from mcscreen.maxcorr import YSide, _pair_core, estimate_mc


def mc_null_uniform(n=2000, seeds=200):
    spec = SplineSpec(1, 3)
    vals = []
    for seed in range(seeds):
        rng = np.random.default_rng(seed)
        x = rng.uniform(0, 1, n)
        y = rng.uniform(0, 1, n)
        vals.append(estimate_mc(x, y, spec, spec).lambda_hat)
    v = np.array(vals)
    return float(v.mean()), float(v.std()), float(v.max())


def ace_null(n=500, seeds=100):
    vals = []
    for seed in range(seeds):
        rng = np.random.default_rng(1000 + seed)
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        vals.append(ace_mc(x, y, AceConfig()).rho_hat)
    v = np.array(vals)
    return float(v.mean()), float(v.std()), float(v.max())


def baseline_nulls(n=1000, seeds=200):
    sis_vals, nis_vals, dc_vals = [], [], []
    for seed in range(seeds):
        rng = np.random.default_rng(2000 + seed)
        x = rng.standard_normal(n)
        y = rng.standard_normal(n)
        sis_vals.append(sis_score(x, y))
        nis_vals.append(nis_score(x, y, SplineSpec(1, 3)))
        dc_vals.append(dcor_score(x, y))
    out = {}
    for name, vals in (("sis", sis_vals), ("nis", nis_vals), ("dcor", dc_vals)):
        v = np.array(vals)
        out[name] = (float(v.mean()), float(v.std()), float(v.max()))
    return out


def screen_null_max_lambda(n, p=100, seeds=200):
    spec = default_nis_spec(n)
    vals = []
    for seed in range(seeds):
        rng = np.random.default_rng(3000 + seed)
        y = rng.standard_normal(n)
        x = rng.standard_normal((n, p))
        yside = YSide(y, spec)
        m = 0.0
        for j in range(p):
            lam = _pair_core(yside, np.ascontiguousarray(x[:, j]), spec,
                             1e-8)[0]
            m = max(m, float(lam))
        vals.append(m)
    v = np.array(vals)
    return float(v.mean()), float(v.max()), float(np.quantile(v, 0.99))


def main():
    mc_mean, mc_sd, mc_max = mc_null_uniform()
    print(f"MC_NULL_UNIFORM_MEAN = {mc_mean:.6g}")
    print(f"MC_NULL_UNIFORM_SD = {mc_sd:.6g}")
    print(f"MC_NULL_UNIFORM_MAX = {mc_max:.6g}")

    am, asd, amax = ace_null()
    print(f"ACE_NULL_MEAN = {am:.6g}")
    print(f"ACE_NULL_SD = {asd:.6g}")
    print(f"ACE_NULL_MAX = {amax:.6g}")

    nulls = baseline_nulls()
    for name, (m, sd, mx) in nulls.items():
        up = name.upper()
        print(f"{up}_NULL_MEAN = {m:.6g}")
        print(f"{up}_NULL_SD = {sd:.6g}")
        print(f"{up}_NULL_MAX = {mx:.6g}")

    for n in (400, 800):
        mean, vmax, q99 = screen_null_max_lambda(n)
        print(f"SCREEN_NULL_MAXLAM_MEAN_N{n} = {mean:.6g}")
        print(f"SCREEN_NULL_MAXLAM_MAX_N{n} = {vmax:.6g}")
        print(f"SCREEN_NULL_MAXLAM_Q99_N{n} = {q99:.6g}")
        print(f"SCREEN_NULL_THRESHOLD_N{n} = {vmax * 1.1:.6g}")


if __name__ == "__main__":
    main()
