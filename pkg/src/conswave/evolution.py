"""Semi-linear evolution in characteristic coordinates, integrated with RK4.

The right side is bounded except for the tan(w/2) factor in the density
equation; that factor is clamped, and steps are subdivided while any node
carrying density sits close to the breaking angle.  w is kept unwrapped so
trajectories pass smoothly through breaking.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .errors import IntegrationError, NumericsError
from .kernels import compute_P_Px
from .lagrangian import LagrangianState
from .model import FluxModel

TAN_MAX = 1e8
SUBSTEP_COS_THRESHOLD = 1e-4
MAX_SUBSTEP_DEPTH = 10


@dataclass(frozen=True)
class TimeDerivative:
    du: np.ndarray
    drho: np.ndarray
    dw: np.ndarray
    dv: np.ndarray
    dx: np.ndarray


def rhs(state: LagrangianState, model: FluxModel,
        tan_clamp: float = TAN_MAX) -> TimeDerivative:
    """Evolution laws for (u, rho, w, v) plus the characteristic speed."""
    fields = compute_P_Px(state, model)
    u, rho, w, v = state.u, state.rho, state.w, state.v
    c2 = np.cos(w / 2.0) ** 2
    s2 = 1.0 - c2
    sinw = np.sin(w)
    gu = model.g(u)
    f2u = model.f2(u)
    tan_half = np.clip(np.tan(w / 2.0), -tan_clamp, tan_clamp)
    du = -fields.Px
    drho = -(0.5 + 0.5 * f2u) * rho * tan_half
    dw = 2.0 * (gu - fields.P + 0.5 * rho ** 2) * c2 - f2u * s2
    dv = (gu - fields.P + 0.5 * f2u + 0.5 * rho ** 2) * v * sinw
    dx = model.f1(u)
    for name, arr in (("du", du), ("drho", drho), ("dw", dw), ("dv", dv), ("dx", dx)):
        bad = np.flatnonzero(~np.isfinite(arr))
        if bad.size:
            raise NumericsError(f"non-finite {name} at node {bad[0]}")
    return TimeDerivative(du=du, drho=drho, dw=dw, dv=dv, dx=dx)


def _axpy(state: LagrangianState, deriv: TimeDerivative, dt: float) -> LagrangianState:
    return replace(
        state,
        t=state.t + dt,
        u=state.u + dt * deriv.du,
        rho=state.rho + dt * deriv.drho,
        w=state.w + dt * deriv.dw,
        v=state.v + dt * deriv.dv,
        x=state.x + dt * deriv.dx,
    )


def step_rk4(state: LagrangianState, model: FluxModel, dt: float,
             tan_clamp: float = TAN_MAX) -> LagrangianState:
    """One classical fourth-order step of size dt."""
    if dt <= 0:
        raise IntegrationError(f"dt must be positive, got {dt}")
    k1 = rhs(state, model, tan_clamp)
    k2 = rhs(_axpy(state, k1, dt / 2.0), model, tan_clamp)
    k3 = rhs(_axpy(state, k2, dt / 2.0), model, tan_clamp)
    k4 = rhs(_axpy(state, k3, dt), model, tan_clamp)
    new = replace(
        state,
        t=state.t + dt,
        u=state.u + dt / 6.0 * (k1.du + 2 * k2.du + 2 * k3.du + k4.du),
        rho=state.rho + dt / 6.0 * (k1.drho + 2 * k2.drho + 2 * k3.drho + k4.drho),
        w=state.w + dt / 6.0 * (k1.dw + 2 * k2.dw + 2 * k3.dw + k4.dw),
        v=state.v + dt / 6.0 * (k1.dv + 2 * k2.dv + 2 * k3.dv + k4.dv),
        x=state.x + dt / 6.0 * (k1.dx + 2 * k2.dx + 2 * k3.dx + k4.dx),
    )
    for name, arr in (("u", new.u), ("rho", new.rho), ("w", new.w),
                      ("v", new.v), ("x", new.x)):
        if not np.all(np.isfinite(arr)):
            raise NumericsError(f"non-finite {name} after step to T={new.t}")
    if np.any(new.v <= 0.0):
        raise IntegrationError(
            f"v lost positivity at T={new.t}; reduce dt (min v = {new.v.min()})")
    return new


def _needs_substep(state: LagrangianState, cos_threshold: float) -> bool:
    near = np.abs(np.cos(state.w / 2.0)) < cos_threshold
    return bool(np.any(near & (np.abs(state.rho) > 0.0)))


def _advance(state, model, dt, tan_clamp, cos_threshold, depth=0):
    if depth < MAX_SUBSTEP_DEPTH and _needs_substep(state, cos_threshold):
        half = dt / 2.0
        mid = _advance(state, model, half, tan_clamp, cos_threshold, depth + 1)
        return _advance(mid, model, half, tan_clamp, cos_threshold, depth + 1)
    return step_rk4(state, model, dt, tan_clamp)


def integrate(state: LagrangianState, model: FluxModel, t_end: float, dt: float,
              output_times=None, callback=None,
              tan_clamp: float = TAN_MAX,
              substep_cos_threshold: float = SUBSTEP_COS_THRESHOLD):
    """March to t_end, landing exactly on each output time.

    Returns the list of states at the output times (default: just t_end).
    ``callback(state)`` runs at each output time, including t=0 when it is
    requested as an output time.
    """
    if t_end < state.t:
        raise IntegrationError("t_end precedes the state's time")
    if output_times is None:
        output_times = [t_end]
    output_times = sorted(float(tq) for tq in output_times)
    out = []
    current = state
    tiny = 1e-12 * max(1.0, abs(t_end))
    for target in output_times:
        while current.t < target - tiny:
            span = min(dt, target - current.t)
            current = _advance(current, model, span, tan_clamp,
                               substep_cos_threshold)
        snapshot = current.copy()
        snapshot.t = target
        out.append(snapshot)
        if callback is not None:
            callback(snapshot)
        current = snapshot
    return out
