"""Initial data, the energy coordinate map, and the characteristic-grid state.

The unknowns live on a uniform grid in the energy coordinate Z, obtained by
integrating the initial energy density 1 + ux^2 in x.  ``ZMap`` tabulates the
monotone map Z(x) densely, interpolates it monotonically and inverts it by
Newton iteration (the slope is >= 1, so the inversion is well conditioned).
Outside the data window the fields are extended by zero, which makes the map
linear with unit slope there.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy import integrate
from scipy.interpolate import PchipInterpolator

from .errors import ConfigurationError, DataError

EDGE_TOL = 1e-8


@dataclass(frozen=True)
class InitialData:
    """Eulerian initial profiles on a truncation window.

    ``u``, ``ux`` and ``rho`` are vectorized callables of x; ``kinks`` lists
    x positions where ux jumps (the callables must return the one-sided
    average there).
    """

    u: Callable
    ux: Callable
    rho: Callable
    window: tuple
    kind: str = "custom"
    kinks: tuple = ()

    def validate(self, edge_tol: float = EDGE_TOL) -> None:
        a, b = self.window
        xs = np.linspace(a, b, 2001)
        for name, fn in (("u", self.u), ("ux", self.ux), ("rho", self.rho)):
            vals = np.asarray(fn(xs), dtype=float)
            if not np.all(np.isfinite(vals)):
                raise DataError(f"initial {name} has non-finite samples")
        if max(abs(float(self.u(a))), abs(float(self.u(b)))) > edge_tol:
            raise DataError("u does not decay at the window edges")


@dataclass(frozen=True)
class LagrangianGrid:
    """Uniform node set in the energy coordinate."""

    z_min: float
    z_max: float
    n: int
    z: np.ndarray = field(init=False, repr=False)
    dz: float = field(init=False)

    def __post_init__(self):
        if self.n < 16:
            raise ConfigurationError(f"grid needs at least 16 nodes, got {self.n}")
        if not self.z_max > self.z_min:
            raise ConfigurationError("empty Z window")
        z = np.linspace(self.z_min, self.z_max, self.n)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "dz", float(z[1] - z[0]))


@dataclass
class LagrangianState:
    """Unknowns (u, rho, w, v) plus the characteristic position x at time T."""

    t: float
    u: np.ndarray
    rho: np.ndarray
    w: np.ndarray
    v: np.ndarray
    x: np.ndarray
    grid: LagrangianGrid
    kink_nodes: tuple = ()

    def copy(self) -> "LagrangianState":
        return replace(
            self,
            u=self.u.copy(), rho=self.rho.copy(), w=self.w.copy(),
            v=self.v.copy(), x=self.x.copy(),
        )


# ---------------------------------------------------------------------------
# preset initial data


def zero_data(window=(-20.0, 20.0)) -> InitialData:
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return InitialData(u=zero, ux=zero, rho=zero, window=window, kind="zero")


def gaussian_data(amp_u=0.5, amp_rho=0.0, center=0.0, width=1.0,
                  window=(-20.0, 20.0)) -> InitialData:
    def u(x):
        s = (np.asarray(x, dtype=float) - center) / width
        return amp_u * np.exp(-s ** 2)

    def ux(x):
        s = (np.asarray(x, dtype=float) - center) / width
        return -2.0 * s / width * amp_u * np.exp(-s ** 2)

    def rho(x):
        s = (np.asarray(x, dtype=float) - center) / width
        return amp_rho * np.exp(-s ** 2)

    return InitialData(u=u, ux=ux, rho=rho, window=window, kind="gaussian")


def peakon_data(c=1.0, center=0.0, window=(-25.0, 25.0)) -> InitialData:
    def u(x):
        return c * np.exp(-np.abs(np.asarray(x, dtype=float) - center))

    def ux(x):
        s = np.asarray(x, dtype=float) - center
        # sign(0) = 0 gives the one-sided average at the crest
        return -np.sign(s) * c * np.exp(-np.abs(s))

    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return InitialData(u=u, ux=ux, rho=zero, window=window, kind="peakon",
                       kinks=(center,))


def peakon_antipeakon_data(c=1.0, half_sep=1.0, window=(-30.0, 30.0)) -> InitialData:
    """Peakon of height c at -half_sep and antipeakon at +half_sep.

    The pair approaches, collides at the origin and re-emerges; the
    antisymmetry u(-x) = -u(x) is preserved by the flow.
    """
    xl, xr = -half_sep, half_sep

    def u(x):
        x = np.asarray(x, dtype=float)
        return c * (np.exp(-np.abs(x - xl)) - np.exp(-np.abs(x - xr)))

    def ux(x):
        x = np.asarray(x, dtype=float)
        return c * (-np.sign(x - xl) * np.exp(-np.abs(x - xl))
                    + np.sign(x - xr) * np.exp(-np.abs(x - xr)))

    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))
    return InitialData(u=u, ux=ux, rho=zero, window=window,
                       kind="peakon_antipeakon", kinks=(xl, xr))


def dambreak_rho_data(height=1.0, x_left=-5.0, x_right=5.0, smoothing=0.5,
                      window=(-30.0, 30.0)) -> InitialData:
    """Quiescent u with a tanh-smoothed density dam of the given height.

    The dam is a smoothed indicator of [x_left, x_right] so that rho decays
    at the window edges and the truncation analysis applies.
    """
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))

    def rho(x):
        x = np.asarray(x, dtype=float)
        return 0.5 * height * (np.tanh((x - x_left) / smoothing)
                               - np.tanh((x - x_right) / smoothing))

    return InitialData(u=zero, ux=zero, rho=rho, window=window, kind="dambreak_rho")


def from_file(path, window=None) -> InitialData:
    """CSV initial data with header ``x,u,rho`` and strictly increasing x.

    The derivative is taken by centered differences on the supplied grid;
    profiles are zero outside the tabulated range.
    """
    xs, us, rs = [], [], []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [c.strip() for c in header[:3]] != ["x", "u", "rho"]:
            raise DataError(f"{path}: expected header 'x,u,rho'")
        for row in reader:
            if not row:
                continue
            try:
                xs.append(float(row[0])); us.append(float(row[1])); rs.append(float(row[2]))
            except (ValueError, IndexError) as exc:
                raise DataError(f"{path}: bad row {row!r}") from exc
    x = np.asarray(xs); uu = np.asarray(us); rr = np.asarray(rs)
    if x.size < 3:
        raise DataError(f"{path}: need at least 3 samples")
    if not np.all(np.diff(x) > 0):
        raise DataError(f"{path}: x column must be strictly increasing")
    if not (np.all(np.isfinite(uu)) and np.all(np.isfinite(rr))):
        raise DataError(f"{path}: non-finite samples")
    dux = np.gradient(uu, x)
    if window is None:
        window = (float(x[0]), float(x[-1]))

    def u(q):
        return np.interp(np.asarray(q, dtype=float), x, uu, left=0.0, right=0.0)

    def ux(q):
        return np.interp(np.asarray(q, dtype=float), x, dux, left=0.0, right=0.0)

    def rho(q):
        return np.interp(np.asarray(q, dtype=float), x, rr, left=0.0, right=0.0)

    return InitialData(u=u, ux=ux, rho=rho, window=window, kind="from_file")


INITIAL_PRESETS = ("zero", "gaussian", "peakon", "peakon_antipeakon",
                   "dambreak_rho", "from_file")


# ---------------------------------------------------------------------------
# energy and the coordinate map


def energy_e0(initial: InitialData) -> float:
    """Quadrature of u^2 + ux^2 + rho^2 over the window."""
    initial.validate()
    a, b = initial.window

    def density(x):
        return initial.u(x) ** 2 + initial.ux(x) ** 2 + initial.rho(x) ** 2

    pts = [k for k in initial.kinks if a < k < b] or None
    val, _ = integrate.quad(density, a, b, points=pts, limit=400, epsabs=1e-12)
    return float(val)


class ZMap:
    """Monotone map Z(x) = integral_0^x (1 + ux^2) and its inverse.

    Built from a dense tabulation on the window; extended linearly with unit
    slope outside it (zero-extended data).  ``inverse`` refines a monotone
    interpolation guess with Newton steps against the forward interpolant,
    so round trips close to ~1e-12.
    """

    def __init__(self, initial: InitialData, resolution: int = 200_001):
        a, b = initial.window
        xs = np.linspace(a, b, resolution)
        extra = [p for p in (0.0, *initial.kinks) if a < p < b]
        xs = np.unique(np.concatenate([xs, np.asarray(extra, dtype=float)]))
        # midpoint increments: kinks are tabulation nodes, so the integrand
        # is never sampled where its a.e. value differs from the limits
        mids = 0.5 * (xs[:-1] + xs[1:])
        slope_mid = 1.0 + np.asarray(initial.ux(mids), dtype=float) ** 2
        if not np.all(np.isfinite(slope_mid)):
            raise DataError("non-finite ux in Z-map tabulation")
        zs = np.concatenate([[0.0], np.cumsum(slope_mid * np.diff(xs))])
        # normalize so Z(0) = 0, using the unit-slope extension if 0 is
        # outside the window
        if xs[0] <= 0.0 <= xs[-1]:
            zs -= np.interp(0.0, xs, zs)
        elif 0.0 < xs[0]:
            zs -= zs[0] - xs[0]
        else:
            zs -= zs[-1] - xs[-1]
        self.x_tab, self.z_tab = xs, zs
        self._fwd = PchipInterpolator(xs, zs)
        self._dfwd = self._fwd.derivative()
        self.x_window = (float(xs[0]), float(xs[-1]))
        self.z_window = (float(zs[0]), float(zs[-1]))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        lo, hi = self.x_window
        zlo, zhi = self.z_window
        inside = self._fwd(np.clip(x, lo, hi))
        return np.where(x < lo, zlo + (x - lo),
                        np.where(x > hi, zhi + (x - hi), inside))

    def inverse(self, z):
        z = np.asarray(z, dtype=float)
        zlo, zhi = self.z_window
        lo, hi = self.x_window
        zc = np.clip(z, zlo, zhi)
        x = np.interp(zc, self.z_tab, self.x_tab)
        for _ in range(4):
            x = np.clip(x - (self._fwd(x) - zc) / self._dfwd(x), lo, hi)
        return np.where(z < zlo, lo + (z - zlo),
                        np.where(z > zhi, hi + (z - zhi), x))


def build_z_map(initial: InitialData, resolution: int = 200_001) -> ZMap:
    return ZMap(initial, resolution=resolution)


def grid_for(initial: InitialData, n: int, zmap: ZMap | None = None,
             align_kinks: bool = True) -> LagrangianGrid:
    """Uniform Z grid covering the image of the data window.

    When the data has slope kinks, the grid is phase-shifted (and its
    spacing nudged, for kink pairs) so the kinks fall mid-cell: every node
    is then a smooth point of the fields, which keeps the quadratures and
    identities second-order.  The node count may differ from ``n`` by a few.
    """
    zmap = zmap or ZMap(initial)
    zlo, zhi = zmap.z_window
    if not (align_kinks and initial.kinks):
        return LagrangianGrid(z_min=zlo, z_max=zhi, n=n)
    zk = np.sort(np.atleast_1d(zmap(np.asarray(initial.kinks, dtype=float))))
    dz = (zhi - zlo) / (n - 1)
    if zk.size >= 2 and zk[-1] > zk[0]:
        span = zk[-1] - zk[0]
        dz = span / max(1, round(span / dz))
    j = np.ceil((zk[0] - zlo) / dz - 0.5)
    z_min = zk[0] - (j + 0.5) * dz
    count = int(np.ceil((zhi - z_min) / dz - 1e-12)) + 1
    return LagrangianGrid(z_min=float(z_min),
                          z_max=float(z_min + (count - 1) * dz), n=count)


def init_state(initial: InitialData, grid: LagrangianGrid,
               zmap: ZMap | None = None) -> LagrangianState:
    """Transform the Eulerian profiles to the characteristic unknowns at T=0."""
    zmap = zmap or ZMap(initial)
    zlo, zhi = zmap.z_window
    if grid.z_min > zlo + 1e-9 or grid.z_max < zhi - 1e-9:
        raise ConfigurationError(
            f"grid window [{grid.z_min}, {grid.z_max}] does not cover the "
            f"data image [{zlo}, {zhi}]")
    x = np.asarray(zmap.inverse(grid.z), dtype=float)
    u = np.asarray(initial.u(x), dtype=float)
    rho = np.asarray(initial.rho(x), dtype=float)
    w = 2.0 * np.arctan(np.asarray(initial.ux(x), dtype=float))
    v = np.ones_like(x)
    kink_nodes: tuple = ()
    if initial.kinks:
        kz = np.atleast_1d(zmap(np.asarray(initial.kinks, dtype=float)))
        nodes: set[int] = set()
        for zk in kz:
            k0 = int(np.clip(np.floor((zk - grid.z_min) / grid.dz), 0, grid.n - 2))
            nodes.update((k0, k0 + 1))
        kink_nodes = tuple(sorted(nodes))
    return LagrangianState(t=0.0, u=u, rho=rho, w=w, v=v, x=x, grid=grid,
                           kink_nodes=kink_nodes)
