"""Check the finite-difference solver against the closed-form benchmark.

Benchmark 1 has a known solution, so the ``psi`` trace from the solver can
be compared with the exact one on ``[0, 0.002]``.  The scheme is first
order in time on smooth solutions; the benchmark behaves like ``t**nu``
near zero, so small ``nu`` converges slowly.  At ``nu = 0.2`` the lagged
memory term makes the scheme unstable on this grid.

    python demos/03_direct_solver.py
"""

import numpy as np

from fracid.directsim import solve_direct
from fracid.problems import example1_direct_config, example1_truth

if __name__ == "__main__":
    print(f"{'nu':>4} {'max |psi_h - psi|':>20}")
    for nu in (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9):
        psi, _ = example1_truth(nu)
        try:
            _, trace = solve_direct(example1_direct_config(nu, nx=64, nt=512, horizon=0.002))
            err = float(np.abs(trace.values - psi(trace.times)).max())
            print(f"{nu:4.1f} {err:20.3e}")
        except ArithmeticError as exc:
            print(f"{nu:4.1f} {'failed: ' + str(exc):>20}")
