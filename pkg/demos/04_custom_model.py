"""Identify orders for a model written directly with the library objects.

The model is ``0.5 D^nu1 u - rho2 D^nu2 u - u_xx = g`` with ``rho2``
unknown.  The data are manufactured: ``psi = 0.1 + t**0.45`` and the
space-integrated source is built so that the equation holds exactly with
``nu2 = 0.2`` and ``rho2 = 0.3``.  A small relative perturbation is added.

    python demos/04_custom_model.py
"""

import numpy as np

from fracid import (
    UNKNOWN_CONSTANT,
    UNKNOWN_LEAD,
    UNKNOWN_SECOND,
    FDOType,
    ModelSpec,
    Observation,
    OperatorSpec,
    PowerSeries,
    Term,
    caputo_series,
    default_times,
    identify_pipeline,
)

NU1, NU2, RHO2, PSI0 = 0.45, 0.2, 0.3, 0.1

if __name__ == "__main__":
    psi = PowerSeries([(PSI0, 0.0), (1.0, NU1)])
    gbar = caputo_series(psi, NU1) * 0.5 - caputo_series(psi, NU2) * RHO2
    op = OperatorSpec(
        FDOType.I,
        (Term(UNKNOWN_LEAD, PowerSeries.constant(0.5)), Term(UNKNOWN_SECOND, UNKNOWN_CONSTANT, -1.0)),
    )
    model = ModelSpec(op, PSI0, gbar)

    t = default_times()
    values = psi(t) * (1.0 + 1e-6 * np.sin(7.0 * t / t[-1]))
    est = identify_pipeline(Observation(t, values, PSI0), model)

    print(f"nu1  {est.nu1:.6f}  (true {NU1})")
    print(f"nu2  {est.nu_second:.6f}  (true {NU2})")
    print(f"rho2 {est.rho:.6f}  (true {RHO2})")
    print("status", est.status)
