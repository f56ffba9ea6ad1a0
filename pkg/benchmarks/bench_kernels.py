"""Time the numba kernels against their numpy counterparts.

    python3 benchmarks/bench_kernels.py [--sizes 128x256 128x512] [--repeat 50]

Also times one full density and momentum right-hand side under whichever
backend ``VML_NUMBA`` selects.  The first numba call is excluded (JIT).
"""
import argparse
import timeit

import numpy as np

from vml import _accel
from vml.density import vlasov_rhs
from vml.fields import PhysParams
from vml.grid import fd_tables, make_grid
from vml.momentum import init_momentum_from_density, momentum_vlasov_rhs
from vml.scenarios import landau


def best_ms(fn, repeat):
    fn()
    return 1e3 * min(timeit.repeat(fn, number=1, repeat=repeat))


def bench_size(n_q, n_p, repeat):
    rng = np.random.default_rng(0)
    x = rng.normal(size=(n_q, n_p))
    y = rng.normal(size=(n_q, n_p))
    u = rng.normal(size=(n_q, n_p))
    interior, left, right = (np.asarray(t, dtype=np.float64) for t in fd_tables(4))
    kernels = {
        "ddp fd4": ("stencil_axis1", (x, interior, left, right, 10.0)),
        "advect": ("advect", (u, x, y, x)),
        "cross": ("cross", (u, x, y, x)),
        "rk4 combine": ("rk4_combine", (x, y, u, x, y, 0.01)),
    }
    rows = []
    for label, (name, args) in kernels.items():
        t_np = best_ms(lambda: getattr(_accel, name + "_numpy")(*args), repeat)
        if _accel.HAVE_NUMBA:
            fn = getattr(_accel, name + "_numba")
            t_nb = best_ms(lambda: fn(*args), repeat)
            diff = float(np.abs(fn(*args) - getattr(_accel, name + "_numpy")(*args)).max())
        else:
            t_nb, diff = float("nan"), float("nan")
        rows.append((label, t_np, t_nb, diff))
    return rows


def bench_rhs(n_q, n_p, repeat):
    grid = make_grid(n_q, n_p, 4 * np.pi, 8.0)
    params = PhysParams()
    f = landau(grid)
    pi = init_momentum_from_density(grid, f)
    t_d = best_ms(lambda: vlasov_rhs(grid, f, params), repeat)
    t_m = best_ms(lambda: momentum_vlasov_rhs(grid, pi, params), repeat)
    return t_d, t_m


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--sizes", nargs="+", default=["128x256", "128x512"])
    ap.add_argument("--repeat", type=int, default=30)
    args = ap.parse_args()
    print(f"backend in use: {_accel.backend()}  (numba available: {_accel.HAVE_NUMBA})")
    for size in args.sizes:
        n_q, n_p = (int(s) for s in size.lower().split("x"))
        print(f"\n{n_q}x{n_p}")
        print(f"  {'kernel':<12} {'numpy ms':>9} {'numba ms':>9} {'speed-up':>9} {'max diff':>9}")
        for label, t_np, t_nb, diff in bench_size(n_q, n_p, args.repeat):
            print(f"  {label:<12} {t_np:9.3f} {t_nb:9.3f} {t_np / t_nb:9.2f} {diff:9.1e}")
        t_d, t_m = bench_rhs(n_q, n_p, args.repeat)
        print(f"  density rhs {t_d:.2f} ms, momentum rhs {t_m:.2f} ms ({_accel.backend()})")


if __name__ == "__main__":
    main()
