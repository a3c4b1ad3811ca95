"""Entrained periodic solutions and gain of entrainment for bilinear systems.

Thin Python surface over the C++ core: build a model, wrap a periodic input
in a :class:`PeriodicControl`, call :func:`solve_periodic`, and feed the
solution to the sensitivity / gain-of-entrainment routines.
"""

from ._core import (
    BilinearSystem,
    GoeReport,
    InadmissibleControlError,
    MasterSystem,
    NoConvergenceError,
    NotHurwitzError,
    NotIrreducibleError,
    PeriodicControl,
    PeriodicSolution,
    SingularMonodromyError,
    average_output,
    build_example_linear,
    build_example_pavlov,
    build_example_scalar,
    build_master,
    build_rfm,
    contraction_scan,
    dgamma_apply,
    dgamma_constant,
    goe_exact,
    goe_first_order,
    goe_kernel,
    matrix_measure,
    optimal_constant_direction,
    optimal_direction_sign,
    project_zero_mean,
    solve_periodic,
)

__all__ = [
    "BilinearSystem",
    "GoeReport",
    "InadmissibleControlError",
    "MasterSystem",
    "NoConvergenceError",
    "NotHurwitzError",
    "NotIrreducibleError",
    "PeriodicControl",
    "PeriodicSolution",
    "SingularMonodromyError",
    "average_output",
    "build_example_linear",
    "build_example_pavlov",
    "build_example_scalar",
    "build_master",
    "build_rfm",
    "contraction_scan",
    "dgamma_apply",
    "dgamma_constant",
    "goe_exact",
    "goe_first_order",
    "goe_kernel",
    "matrix_measure",
    "optimal_constant_direction",
    "optimal_direction_sign",
    "project_zero_mean",
    "solve_periodic",
]
