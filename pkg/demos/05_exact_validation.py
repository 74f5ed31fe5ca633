#!/usr/bin/env python3
"""Exact small-system simulation versus the Gaussian approximation.

Three cross-checks of the covariance machinery against exact state-vector
evolution of N_A spin-1/2 atoms and an N_L-photon two-mode field:

  1. one Faraday pass: probe quadrature variance (1 + xi)/2,
  2. the full double pass: spin variance (1 + xi^2 + 2 xi)/2,
  3. one-axis twisting at N_A = 100 against the eraser closed form,
     plus the analytic twisted-state moments as an independent oracle.

All deviations shrink as the system grows (the Gaussian description is the
large-N limit).
"""

from squeezekit import exact, zeta_qe

print("1) Faraday pass: Var(X_L) against the Gaussian value (1 + xi)/2")
print(f"{'xi':>6} {'N':>5} {'exact':>10} {'gaussian':>10} {'rel err':>9}")
for xi in (0.25, 0.5, 1.0):
    for n in (20, 40):
        chi = exact.chi_for_coupling(xi, n, n)
        state = exact.evolve_faraday_exact(exact.coherent_state(n, n), chi)
        got = exact.light_moments(state)["var_xl"]
        hpa = (1 + xi) / 2
        print(f"{xi:6.2f} {n:5d} {got:10.5f} {hpa:10.5f} {abs(got - hpa) / hpa:9.3%}")

print("\n2) Double pass: Var(X_A) against (1 + xi^2 + 2 xi)/2")
print(f"{'xi':>6} {'N':>5} {'exact':>10} {'gaussian':>10} {'rel err':>9}")
for xi in (0.25,):
    for n in (20, 40, 80):
        chi = exact.chi_for_coupling(xi, n, n)
        state = exact.double_pass_exact(exact.coherent_state(n, n), chi)
        got = exact.spin_moments(state)["var_y"] / (n / 2)
        hpa = (1 + xi**2 + 2 * xi) / 2
        print(f"{xi:6.2f} {n:5d} {got:10.5f} {hpa:10.5f} {abs(got - hpa) / hpa:9.3%}")

print("\n3) One-axis twisting at shear strength xi = 2")
xi = 2.0
print(f"{'N':>5} {'exact zeta':>11} {'shear form':>11} {'rel err':>9}")
for n in (25, 50, 100, 200):
    mu = exact.twist_for_coupling(xi, n)
    state = exact.one_axis_twist_exact(exact.coherent_state(n, 0), mu)
    got = exact.min_transverse_variance(state) / (n / 4)
    print(f"{n:5d} {got:11.5f} {zeta_qe(xi):11.5f} {abs(got - zeta_qe(xi)) / zeta_qe(xi):9.3%}")

print("\n   analytic twisted-state moments vs exact evolution (both exact):")
for n, mu in [(30, 0.11), (100, 0.04)]:
    state = exact.one_axis_twist_exact(exact.coherent_state(n, 0), mu)
    sim = exact.min_transverse_variance(state)
    ana = exact.ku_variance(n, mu)
    print(f"   N = {n:3d}, mu = {mu}: exact {sim:.10f}, analytic {ana:.10f}, "
          f"diff {abs(sim - ana):.2e}")
