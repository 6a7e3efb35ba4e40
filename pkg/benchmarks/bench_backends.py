"""Time the numba kernel builds against the pure-numpy fallbacks.

Run:  python benchmarks/bench_backends.py [n]

The same arrays go through both builds of each kernel; numbers are
best-of-5 wall times. The end-to-end row times a full mc-spline screen via
subprocesses so the import-time backend switch (MCSCREEN_NUMBA) applies.
"""

import os
import subprocess
import sys
import time

import numpy as np

from mcscreen._accel import NUMBA_ENABLED
from mcscreen._kernels import (
    _dcor_sums_nb,
    _dcor_sums_np,
    _design_matrix_nb,
    _design_matrix_np,
    _mc_core_nb,
    _mc_core_np,
    _pearson_nb,
    _pearson_np,
)
from mcscreen.bspline import SplineSpec, build_basis, design_matrix
from mcscreen.maxcorr import YSide, _helmert_rows


def best_of(fn, repeats=5, loops=20):
    best = np.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        for _ in range(loops):
            fn()
        best = min(best, (time.perf_counter() - t0) / loops)
    return best


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 1000
    rng = np.random.default_rng(0)
    x = rng.standard_normal(n)
    y = np.sin(x) + 0.5 * rng.standard_normal(n)
    spec = SplineSpec(2, 4)
    basis = build_basis(x, spec)
    out = np.zeros((n, basis.dim))
    yside = YSide(y, spec)
    bx = design_matrix(basis, x)
    z = np.ascontiguousarray(_helmert_rows(spec.dim))

    rows = []
    if NUMBA_ENABLED:
        # trigger compilation outside the timed region
        _design_matrix_nb(basis.knots, spec.degree, x, out)
        _mc_core_nb(yside.whitened, bx, spec.num_knots, z, 1e-8)
        _dcor_sums_nb(x[:300], y[:300])
        _pearson_nb(x, y)
        pairs = [
            ("design_matrix", lambda: _design_matrix_nb(basis.knots, spec.degree, x, out),
             lambda: _design_matrix_np(basis.knots, spec.degree, x, out)),
            ("mc_core", lambda: _mc_core_nb(yside.whitened, bx, spec.num_knots, z, 1e-8),
             lambda: _mc_core_np(yside.whitened, bx, spec.num_knots, z, 1e-8)),
            ("dcor_sums", lambda: _dcor_sums_nb(x, y),
             lambda: _dcor_sums_np(x, y)),
            ("pearson", lambda: _pearson_nb(x, y),
             lambda: _pearson_np(x, y)),
        ]
        print(f"n = {n}")
        print(f"{'kernel':<14}{'numba':>12}{'numpy':>12}{'speedup':>9}")
        for name, f_nb, f_np in pairs:
            t_nb = best_of(f_nb)
            t_np = best_of(f_np)
            rows.append((name, t_nb, t_np))
            print(f"{name:<14}{t_nb * 1e6:>10.1f}us{t_np * 1e6:>10.1f}us"
                  f"{t_np / t_nb:>8.1f}x")
    else:
        print("numba backend not active; kernel comparison skipped")

    # end-to-end: one mc-spline screen per backend, fresh interpreter each
    code = (
        "import time, numpy as np\n"
        "import mcscreen as ms\n"
        "rng = np.random.default_rng(0)\n"
        f"x = rng.standard_normal(({n}, 50))\n"
        "y = x[:,0]*np.exp(x[:,1])\n"
        "ds = ms.Dataset(y=y, x=x)\n"
        "spec = ms.SplineSpec(2, 4)\n"
        "ms.screen(ds, ms.ScoreKind.MC_SPLINE, spec=spec)\n"  # warm compile
        "t0 = time.perf_counter()\n"
        "ms.screen(ds, ms.ScoreKind.MC_SPLINE, spec=spec)\n"
        "print(f'{time.perf_counter()-t0:.4f}')\n"
    )
    print()
    for flag, label in (("1", "numba"), ("0", "numpy")):
        env = dict(os.environ)
        env["MCSCREEN_NUMBA"] = flag
        proc = subprocess.run([sys.executable, "-c", code],
                              capture_output=True, text=True, env=env)
        stamp = proc.stdout.strip().splitlines()[-1] if proc.returncode == 0 \
            else f"failed: {proc.stderr.strip()[:120]}"
        print(f"screen mc-spline (p=50) {label:>6}: {stamp}s")


if __name__ == "__main__":
    main()
