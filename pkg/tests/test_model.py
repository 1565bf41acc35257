"""Flux model presets, derivatives, and antiderivatives."""

import numpy as np
import pytest

from conswave.errors import ConfigurationError
from conswave.model import PRESETS, FluxModel, check_derivatives, eval_H, make_preset


@pytest.mark.parametrize("preset", sorted(PRESETS))
def test_g_vanishes_at_zero(preset):
    kwargs = {}
    if preset == "custom_polynomial":
        kwargs = {"f_coeffs": [0.0, 0.0, 0.5], "g_coeffs": [0.0, 1.0, 2.0]}
    model = make_preset(preset, k=1.0, **kwargs)
    assert model.g(0.0) == 0.0


def test_camassa_holm_closed_forms():
    model = make_preset("camassa_holm", k=0.0)
    assert model.f(2.0) == pytest.approx(2.0)
    assert model.f2(2.0) == pytest.approx(1.0)
    assert model.g(2.0) == pytest.approx(4.0)


def test_constantin_lannes_closed_forms():
    model = make_preset("constantin_lannes")
    assert model.f(1.0) == pytest.approx(-8.0)
    assert model.g(1.0) == pytest.approx(13.0)


@pytest.mark.parametrize("k, u, expected", [
    (0.0, 0.0, 0.0),
    (0.0, 2.0, 8.0),   # H(u) = u^3 when g = u^2, f'' = 1
    (1.0, 2.0, 12.0),  # H(u) = u^2 + u^3 when g = u + u^2
])
def test_eval_H_camassa_holm(k, u, expected):
    model = make_preset("camassa_holm", k=k)
    assert eval_H(model, u) == pytest.approx(expected, abs=1e-12)


def test_antiderivatives_vanish_at_zero():
    model = make_preset("constantin_lannes")
    for anti in (model.F, model.G, model.H):
        assert anti(0.0) == 0.0


def test_hyperelastic_rod_matches_ch_quadratic_part():
    rod = make_preset("hyperelastic_rod", k=1.0)
    ch = make_preset("camassa_holm", k=1.0)
    pts = np.linspace(-2.0, 2.0, 9)
    np.testing.assert_allclose(rod.f(pts), ch.f(pts))
    np.testing.assert_allclose(rod.f1(pts), ch.f1(pts))


@pytest.mark.parametrize("preset", ["camassa_holm", "constantin_lannes",
                                    "two_component_ch", "hyperelastic_rod"])
def test_check_derivatives_passes(preset):
    model = make_preset(preset, k=1.0)
    report = check_derivatives(model, np.arange(-2.0, 2.5, 0.5), tol=1e-6)
    assert report["passed"]
    assert all(np.isfinite(v) for v in report["residuals"].values())


def test_check_derivatives_flags_inconsistency():
    base = make_preset("camassa_holm")
    broken = FluxModel(preset_id="custom_polynomial", f=base.f,
                       g=base.g + 0.0)
    # sabotage: replace g' with a wrong polynomial after construction
    object.__setattr__(broken, "g1", base.g1 + 1.0)
    report = check_derivatives(broken, [-1.0, 0.0, 1.0], tol=1e-6)
    assert not report["passed"]


def test_custom_polynomial_rejects_nonzero_g0():
    with pytest.raises(ConfigurationError):
        make_preset("custom_polynomial", f_coeffs=[0.0, 0.0, 0.5],
                    g_coeffs=[1.0, 1.0])


def test_unknown_preset_rejected():
    with pytest.raises(ConfigurationError):
        make_preset("no_such_model")


def test_H_derivative_identity():
    model = make_preset("two_component_ch", k=0.5)
    pts = np.linspace(-1.5, 1.5, 13)
    lhs = model.H.deriv()(pts)
    rhs = 2.0 * model.g(pts) + model.f2(pts) * pts ** 2
    np.testing.assert_allclose(lhs, rhs, atol=1e-12)
