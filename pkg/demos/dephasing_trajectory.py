"""Integrate the measure-coupled dephasing equation for a GHZ state.

The damping rate of every off-diagonal element is lambda * phi(rho), so
the state slows its own collapse down as the measure decays. For GHZ
under site-projector dephasing the whole evolution reduces to a single
scalar ODE for the surviving coherence c(t):

    dc/dt = -lambda * phi(c) * c,   phi(c) = 2 - H2((1 + c) / 2)

which this script integrates alongside the full matrix run as a check.

Run:  python3 demos/dephasing_trajectory.py
"""

import math

from qphi import CouplingSpec, IntegratorConfig, LindbladBasis, evolve
from qphi.states import ghz

LAM = 1.0
T_END = 5.0


def h2(p):
    out = 0.0
    for x in (p, 1.0 - p):
        if x > 0.0:
            out -= x * math.log2(x)
    return out


def scalar_reference(t_end, dt=1e-5):
    c = 1.0
    for _ in range(int(round(t_end / dt))):
        f = lambda x: -LAM * (2.0 - h2((1.0 + x) / 2.0)) * x
        k1 = f(c)
        k2 = f(c + 0.5 * dt * k1)
        k3 = f(c + 0.5 * dt * k2)
        k4 = f(c + dt * k3)
        c += dt / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
    return c


def main():
    config = IntegratorConfig(
        dt=1e-3, t_end=T_END, phi_refresh_stride=10, record_stride=500
    )
    record = evolve(
        ghz(3),
        None,
        LindbladBasis.site_projectors(8),
        CouplingSpec(kind="diagonal_linear", lam=LAM),
        config,
    )

    print("GHZ(3) under measure-coupled dephasing (lambda = 1)")
    print(f"steps: {config.n_steps}, measure refreshed every "
          f"{config.phi_refresh_stride} steps")
    print(f"max trace drift: {record.max_trace_drift:.2e}\n")
    print(f"{'t':>6} {'phi (bits)':>12} {'coherence':>12} {'purity':>10}")
    for t, phi, coh, pur in zip(
        record.times, record.phi_series, record.coherence_series, record.purity_series
    ):
        print(f"{t:6.2f} {phi:12.6f} {coh:12.6f} {pur:10.6f}")

    print("\nThe measure falls from 2 toward 1: the fully dephased GHZ")
    print("mixture still carries one bit of classical correlation per cut.")

    ref = scalar_reference(T_END)
    got = record.coherence_series[-1]
    print(f"\nscalar-ODE reference c({T_END:g}) = {ref:.6e}")
    print(f"matrix run             c({T_END:g}) = {got:.6e}")
    print(f"relative difference: {abs(got - ref) / ref:.2e}")
    print("(the small gap is the 10-step rate-refresh window)")


if __name__ == "__main__":
    main()
