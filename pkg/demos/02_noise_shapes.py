"""How the shape of the noise affects the leading-order estimate.

First- and second-type noise vanish at ``t = 0`` at least as fast as the
leading power, so the step-1 estimate stays close to ``nu1``.  Third-type
noise carries a constant offset that the step-1 formula cannot separate
from the signal, and the estimate drifts.

    python demos/02_noise_shapes.py
"""

from fracid.cli import NU_VALUES, experiment_rows

if __name__ == "__main__":
    errors = {}
    for kind in ("ftn", "stn", "ttn"):
        header, rows = experiment_rows(1, kind)
        k = header.index("err_nu1_bar")
        errors[kind] = [r[k] for r in rows]
    print(f"{'nu1':>5} {'FTN':>10} {'STN':>10} {'TTN':>10}")
    for i, nu in enumerate(NU_VALUES):
        print(f"{nu:5.1f} " + " ".join(f"{errors[k][i]:10.5f}" for k in ("ftn", "stn", "ttn")))
