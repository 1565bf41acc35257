"""Flux pair (f, g) with exact polynomial derivatives and antiderivatives.

Every concrete equation handled by the solver is a choice of two polynomial
fluxes.  Derivatives are taken symbolically on the coefficient vectors, so
all downstream identities see exact values rather than finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial

from .errors import ConfigurationError

PRESETS = (
    "camassa_holm",
    "hyperelastic_rod",
    "constantin_lannes",
    "two_component_ch",
    "custom_polynomial",
)


@dataclass(frozen=True)
class FluxModel:
    """Immutable flux pair and its derived polynomials.

    ``f``, ``g`` are the fluxes; ``f1``..``f3`` are f', f'', f''', ``g1`` is
    g'; ``F``, ``G`` antidifferentiate f and g from 0; ``H`` integrates
    2 g(s) + f''(s) s^2 from 0.
    """

    preset_id: str
    f: Polynomial
    g: Polynomial
    k: float = 0.0
    f1: Polynomial = field(init=False)
    f2: Polynomial = field(init=False)
    f3: Polynomial = field(init=False)
    g1: Polynomial = field(init=False)
    F: Polynomial = field(init=False)
    G: Polynomial = field(init=False)
    H: Polynomial = field(init=False)

    def __post_init__(self):
        if self.g.coef[0] != 0.0:
            raise ConfigurationError(
                f"g must vanish at 0, got constant term {self.g.coef[0]!r}"
            )
        object.__setattr__(self, "f1", self.f.deriv())
        object.__setattr__(self, "f2", self.f.deriv(2))
        object.__setattr__(self, "f3", self.f.deriv(3))
        object.__setattr__(self, "g1", self.g.deriv())
        object.__setattr__(self, "F", self.f.integ(lbnd=0))
        object.__setattr__(self, "G", self.g.integ(lbnd=0))
        usq = Polynomial([0.0, 0.0, 1.0])
        object.__setattr__(self, "H", (2 * self.g + self.f2 * usq).integ(lbnd=0))


def make_preset(preset_id: str, k: float = 0.0,
                f_coeffs=None, g_coeffs=None) -> FluxModel:
    """Build a named flux model.

    ``k`` is the dispersion parameter, used by the presets that take one.
    ``custom_polynomial`` takes ascending coefficient lists for f and g.
    """
    if not np.isfinite(k):
        raise ConfigurationError(f"dispersion parameter k must be finite, got {k}")
    if preset_id in ("camassa_holm", "two_component_ch"):
        f = Polynomial([0.0, 0.0, 0.5])
        g = Polynomial([0.0, k, 1.0])
    elif preset_id == "hyperelastic_rod":
        f = Polynomial([0.0, 0.0, k / 2.0])
        g = Polynomial([0.0, 0.0, 1.5])
    elif preset_id == "constantin_lannes":
        f = Polynomial([0.0, -1.0, -7.0])
        g = Polynomial([0.0, 2.0, 10.0, -2.0, 3.0])
    elif preset_id == "custom_polynomial":
        if f_coeffs is None or g_coeffs is None:
            raise ConfigurationError("custom_polynomial requires f_coeffs and g_coeffs")
        f = Polynomial(np.asarray(f_coeffs, dtype=float))
        g = Polynomial(np.asarray(g_coeffs, dtype=float))
    else:
        raise ConfigurationError(f"unknown preset {preset_id!r}; known: {PRESETS}")
    return FluxModel(preset_id=preset_id, f=f, g=g, k=float(k))


def eval_H(model: FluxModel, u) -> float:
    """Energy-flux antiderivative H(u), exact for the polynomial fluxes."""
    return model.H(u)


def check_derivatives(model: FluxModel, sample_points, tol: float = 1e-6,
                      h: float = 1e-5) -> dict:
    """Central-difference consistency report for every derivative pair.

    Returns a dict with per-pair max residuals and an overall ``passed``
    flag (all residuals <= tol, scale-adjusted as |r| <= tol*(1+|next|*h)).
    """
    if tol <= 0:
        raise ConfigurationError("tol must be positive")
    pts = np.asarray(sample_points, dtype=float)
    if not np.all(np.isfinite(pts)):
        raise ConfigurationError("sample points must be finite")

    def cd(fun, x):
        return (fun(x + h) - fun(x - h)) / (2 * h)

    pairs = {
        "f1": (model.f, model.f1, model.f2),
        "f2": (model.f1, model.f2, model.f3),
        "f3": (model.f2, model.f3, model.f3.deriv()),
        "g1": (model.g, model.g1, model.g1.deriv()),
        "F": (model.F, model.f, model.f1),
        "G": (model.G, model.g, model.g1),
        "H": (model.H, lambda u: 2 * model.g(u) + model.f2(u) * u ** 2, model.H.deriv(2)),
    }
    residuals = {}
    ok = True
    for name, (fun, deriv, curv) in pairs.items():
        r = np.abs(deriv(pts) - cd(fun, pts))
        allowed = tol * (1.0 + np.abs(curv(pts)) * h)
        residuals[name] = float(np.max(r))
        ok = ok and bool(np.all(r <= allowed))
    return {"residuals": residuals, "passed": ok, "tol": tol, "h": h}
