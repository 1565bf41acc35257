"""Eulerian method-of-lines reference solver for the nonlocal form.

Valid only before wave breaking; used to cross-validate the characteristic
pipeline on smooth windows.  Centered second-order differences, the same
exponential-kernel scan as the characteristic solver (here with the
translation-invariant measure dx), and fixed-step RK4.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import BlowupError, NumericsError
from .kernels import exp_kernel_split
from .model import FluxModel

BLOWUP_GUARD = 1e3


@dataclass
class EulerianState:
    t: float
    x: np.ndarray
    u: np.ndarray
    rho: np.ndarray

    @property
    def dx(self) -> float:
        return float(self.x[1] - self.x[0])

    def copy(self) -> "EulerianState":
        return replace(self, u=self.u.copy(), rho=self.rho.copy())


def make_state(initial, n: int) -> EulerianState:
    """Sample Eulerian initial data on a uniform grid over its window."""
    a, b = initial.window
    x = np.linspace(a, b, n)
    return EulerianState(t=0.0, x=x,
                         u=np.asarray(initial.u(x), dtype=float),
                         rho=np.asarray(initial.rho(x), dtype=float))


def nonlocal_P(state: EulerianState, model: FluxModel):
    """(P, Px) by the two-pass kernel scan in x."""
    ux = np.gradient(state.u, state.dx)
    q = (model.g(state.u) + 0.5 * model.f2(state.u) * ux ** 2
         + 0.5 * state.rho ** 2)
    A, B = exp_kernel_split(state.x, q, state.dx)
    return 0.5 * (A + B), 0.5 * (B - A), ux


def oracle_rhs(state: EulerianState, model: FluxModel):
    """Time derivatives (du, drho) of the nonlocal-form system."""
    P, Px, ux = nonlocal_P(state, model)
    rhox = np.gradient(state.rho, state.dx)
    f1u = model.f1(state.u)
    du = -f1u * ux - Px
    drho = -f1u * rhox - (0.5 + 0.5 * model.f2(state.u)) * state.rho * ux
    if not (np.all(np.isfinite(du)) and np.all(np.isfinite(drho))):
        raise NumericsError("non-finite Eulerian time derivative")
    return du, drho


def step_rk4(state: EulerianState, model: FluxModel, dt: float) -> EulerianState:
    def bump(s, du, drho, h):
        return replace(s, t=s.t + h, u=s.u + h * du, rho=s.rho + h * drho)

    k1 = oracle_rhs(state, model)
    k2 = oracle_rhs(bump(state, *k1, dt / 2.0), model)
    k3 = oracle_rhs(bump(state, *k2, dt / 2.0), model)
    k4 = oracle_rhs(bump(state, *k3, dt), model)
    du = (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]) / 6.0
    drho = (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]) / 6.0
    return replace(state, t=state.t + dt,
                   u=state.u + dt * du, rho=state.rho + dt * drho)


def eulerian_energy(state: EulerianState) -> float:
    ux = np.gradient(state.u, state.dx)
    return float(np.trapezoid(state.u ** 2 + ux ** 2 + state.rho ** 2,
                              dx=state.dx))


def oracle_integrate(state: EulerianState, model: FluxModel, t_end: float,
                     dt: float, output_times=None,
                     blowup_guard: float = BLOWUP_GUARD):
    """RK4 march with a slope guard signaling the approach to breaking."""
    if output_times is None:
        output_times = [t_end]
    output_times = sorted(float(tq) for tq in output_times)
    out = []
    current = state
    tiny = 1e-12 * max(1.0, abs(t_end))
    for target in output_times:
        while current.t < target - tiny:
            slope = np.max(np.abs(np.gradient(current.u, current.dx)))
            if slope > blowup_guard:
                raise BlowupError(
                    f"slope {slope:.3g} exceeds the pre-breaking guard "
                    f"{blowup_guard:.3g} at t={current.t:.6g}; the Eulerian "
                    "reference solver cannot continue past breaking")
            span = min(dt, target - current.t)
            current = step_rk4(current, model, span)
        snap = current.copy()
        snap.t = target
        out.append(snap)
        current = snap
    return out
