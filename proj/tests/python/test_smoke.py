import math

import numpy as np
import pytest

entrain = pytest.importorskip("entrain")


def test_rfm_steady_state():
    sys = entrain.build_rfm(2)
    u = entrain.PeriodicControl.constant(1.0, np.ones(3))
    sol = entrain.solve_periodic(sys, u)
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    assert sol.gamma0 == pytest.approx([phi, 1.0 - phi], abs=1e-9)
    assert sol.nondegenerate
    assert sol.spectral_radius < 1.0


def test_pavlov_goe_matches_closed_form():
    sys = entrain.build_example_pavlov()
    T = 2.0 * math.pi
    base = entrain.PeriodicControl.constant(T, np.zeros(1)).with_prefix_channel(1.0)
    du = entrain.PeriodicControl.harmonic(
        T, np.zeros(1), np.array([0.5]), 1.0
    ).with_prefix_channel(0.0)
    report = entrain.goe_exact(sys, base, du)
    assert report.goe == pytest.approx(0.0625, abs=1e-6)
    assert report.first_order_prediction == pytest.approx(0.0, abs=1e-8)


def test_scalar_derivative_is_zero():
    sys = entrain.build_example_scalar()
    u = entrain.PeriodicControl.harmonic(2.0, np.ones(1), np.array([0.4]), math.pi)
    du = entrain.PeriodicControl.harmonic(2.0, np.zeros(1), np.array([0.3]), math.pi)
    sol = entrain.solve_periodic(sys, u, x_init=np.array([1.0]))
    assert abs(sol.gamma0[0]) < 1e-10
    assert np.linalg.norm(entrain.dgamma_apply(sys, sol, du)) < 1e-10


def test_master_stationary_distribution():
    ms = entrain.build_master(2)
    rates = np.zeros(4)
    rates[ms.channel(0, 1)] = 2.0
    rates[ms.channel(1, 0)] = 1.0
    sol = entrain.solve_periodic(ms.system, entrain.PeriodicControl.constant(1.0, rates))
    z = ms.to_probability(sol.gamma0)
    assert z == pytest.approx([1.0 / 3.0, 2.0 / 3.0], abs=1e-9)


def test_kernel_pairs_with_first_order():
    sys = entrain.build_rfm(2)
    u = entrain.PeriodicControl.harmonic(
        1.0, np.ones(3), np.full(3, 0.2), 2.0 * math.pi
    )
    sol = entrain.solve_periodic(sys, u)
    t, K = entrain.goe_kernel(sys, sol)
    du = entrain.PeriodicControl.harmonic(
        1.0, np.zeros(3), np.array([0.1, -0.2, 0.15]), 2.0 * math.pi
    )
    paired = np.trapezoid([K[i] @ du(ti) for i, ti in enumerate(t)], t) / 1.0
    assert paired == pytest.approx(entrain.goe_first_order(sys, sol, du), abs=1e-4)


def test_matrix_measure():
    A = np.array([[-2.0, 1.0], [1.0, -2.0]])
    assert entrain.matrix_measure(A, "l1") == pytest.approx(-1.0)
