"""Nonlocal source terms P, Px via linear-time exponential-kernel scans.

The kernel exponent is the increment of the cumulative measure
xi(Z) = integral of v cos^2(w/2), never a position, so plateaus are handled
exactly.  Each cell integrates the kernel exactly against piecewise-linear
source data; the O(N) path propagates the result by forward/backward
recurrences, the O(N^2) oracle expands the same cell model against directly
evaluated kernel factors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from .errors import NumericsError
from .lagrangian import LagrangianState
from .model import FluxModel


@dataclass(frozen=True)
class NonlocalFields:
    """Cumulative measure and the source terms on the Z grid."""

    xi: np.ndarray
    P: np.ndarray
    Px: np.ndarray


@njit(cache=True)
def _moments(a):
    """(m0, m1) with m0 = int_0^1 e^{-a t} dt, m1 = int_0^1 t e^{-a t} dt."""
    if a < 1e-4:
        m0 = 1.0 - a / 2.0 + a * a / 6.0 - a * a * a / 24.0
        m1 = 0.5 - a / 3.0 + a * a / 8.0 - a * a * a / 30.0
    else:
        ea = np.exp(-a)
        m0 = (1.0 - ea) / a
        m1 = (1.0 - (1.0 + a) * ea) / (a * a)
    return m0, m1


@njit(cache=True)
def _scan(xi, h, dz):
    """Forward/backward half-line integrals of the kernel against h.

    A[i] integrates over Z' <= Z_i with kernel e^{-(xi_i - xi(Z'))},
    B[i] over Z' >= Z_i with kernel e^{-(xi(Z') - xi_i)}.
    """
    n = xi.shape[0]
    A = np.zeros(n)
    B = np.zeros(n)
    for i in range(1, n):
        a = xi[i] - xi[i - 1]
        m0, m1 = _moments(a)
        cell = dz * (h[i - 1] * m1 + h[i] * (m0 - m1))
        A[i] = A[i - 1] * np.exp(-a) + cell
    for i in range(n - 2, -1, -1):
        a = xi[i + 1] - xi[i]
        m0, m1 = _moments(a)
        cell = dz * (h[i] * (m0 - m1) + h[i + 1] * m1)
        B[i] = B[i + 1] * np.exp(-a) + cell
    return A, B


def exp_kernel_split(xi, h, dz):
    """O(N) half-line kernel integrals (A, B); see ``_scan``."""
    xi = np.ascontiguousarray(xi, dtype=np.float64)
    h = np.ascontiguousarray(h, dtype=np.float64)
    return _scan(xi, h, float(dz))


def exp_kernel_split_direct(xi, h, dz):
    """O(N^2) expansion of the same cell model; the correctness oracle."""
    xi = np.asarray(xi, dtype=float)
    h = np.asarray(h, dtype=float)
    n = xi.size
    a = np.diff(xi)
    ea = np.exp(-a)
    m0 = np.where(a < 1e-4,
                  1.0 - a / 2 + a ** 2 / 6 - a ** 3 / 24,
                  (1.0 - ea) / np.where(a == 0, 1.0, a))
    m1 = np.where(a < 1e-4,
                  0.5 - a / 3 + a ** 2 / 8 - a ** 3 / 30,
                  (1.0 - (1.0 + a) * ea) / np.where(a == 0, 1.0, a ** 2))
    # cell integral referenced to its right node (forward) / left node (backward)
    fwd = dz * (h[:-1] * m1 + h[1:] * (m0 - m1))
    bwd = dz * (h[:-1] * (m0 - m1) + h[1:] * m1)
    K = np.exp(-np.abs(xi[:, None] - xi[None, :]))
    A = np.zeros(n)
    B = np.zeros(n)
    idx = np.arange(n)
    # A_i = sum_{cells j<=i} e^{-(xi_i - xi_j)} * fwd_j, cell j ending at node j
    WA = K[:, 1:] * (idx[None, 1:] <= idx[:, None])
    A = WA @ fwd
    # B_i = sum_{cells j>=i} e^{-(xi_j - xi_i)} * bwd_j, cell j starting at node j
    WB = K[:, :-1] * (idx[None, :-1] >= idx[:, None])
    B = WB @ bwd
    return A, B


def cumulative_measure(state: LagrangianState) -> np.ndarray:
    """xi(Z): trapezoid accumulation of v cos^2(w/2) from the left edge."""
    dens = state.v * np.cos(state.w / 2.0) ** 2
    xi = np.zeros_like(dens)
    np.cumsum((dens[:-1] + dens[1:]) * (state.grid.dz / 2.0), out=xi[1:])
    return xi


def source_density(state: LagrangianState, model: FluxModel) -> np.ndarray:
    """Kernel source (g(u) cos^2 + f''(u)/2 sin^2 + rho^2/2 cos^2) * v."""
    c2 = np.cos(state.w / 2.0) ** 2
    s2 = 1.0 - c2
    return (model.g(state.u) * c2 + 0.5 * model.f2(state.u) * s2
            + 0.5 * state.rho ** 2 * c2) * state.v


def compute_P_Px(state: LagrangianState, model: FluxModel) -> NonlocalFields:
    """P and Px on the Z grid by the linear-time two-pass recurrence."""
    xi = cumulative_measure(state)
    h = source_density(state, model)
    bad = np.flatnonzero(~np.isfinite(h))
    if bad.size:
        raise NumericsError(f"non-finite source density at node {bad[0]}")
    A, B = exp_kernel_split(xi, h, state.grid.dz)
    return NonlocalFields(xi=xi, P=0.5 * (A + B), Px=0.5 * (B - A))


def compute_P_Px_direct(state: LagrangianState, model: FluxModel) -> NonlocalFields:
    """Brute-force O(N^2) evaluation; oracle for ``compute_P_Px``."""
    xi = cumulative_measure(state)
    h = source_density(state, model)
    bad = np.flatnonzero(~np.isfinite(h))
    if bad.size:
        raise NumericsError(f"non-finite source density at node {bad[0]}")
    A, B = exp_kernel_split_direct(xi, h, state.grid.dz)
    return NonlocalFields(xi=xi, P=0.5 * (A + B), Px=0.5 * (B - A))


def truncation_padding(e0: float, v_minus: float, tol: float) -> float:
    """Window margin beyond the data support needed for kernel truncation.

    Distance at which the decay envelope min(1, e^{E0 - v^- |eta|/2}) drops
    below tol.
    """
    if v_minus <= 0:
        raise NumericsError("v_minus must be positive")
    if tol >= 1.0:
        return 2.0 * e0 / v_minus
    return 2.0 * (e0 + np.log(1.0 / tol)) / v_minus
