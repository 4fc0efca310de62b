"""Named initial profiles and ready-made configurations.

All presets live in the small-variation regime: background at
(v, u, p) = (1, 0, 1) so T = 2.5 and the Arrhenius rate phi(T) ~ 1.12
stays well above the configured floor phi_lower = 0.5.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError
from .fronts import PiecewiseConstant
from .gas import GasParams, GasState
from .reaction import SchemeConfig, suggest_lambda_hat

__all__ = ["background_state", "make_profile", "preset_profile", "make_config"]


def background_state(params: GasParams, v=1.0, u=0.0, p=1.0, Y=0.0) -> GasState:
    e = p * v / (params.gamma - 1.0)
    return GasState(v, u, e + 0.5 * u * u, Y)


def _states_from_primitive(params, v, u, p, Y):
    e = p * v / (params.gamma - 1.0)
    E = e + 0.5 * u * u
    return np.stack([v, u, E, Y], axis=-1)


def bump_profile(params: GasParams, n=241, half_width=6.0, u_amp=0.015,
                 y_amp=0.01, y_center=0.5, y_width=1.0) -> PiecewiseConstant:
    """Smooth velocity bump with a compact reactant pocket, sampled on a grid."""
    xs = np.linspace(-half_width, half_width, n)
    centers = np.concatenate([[xs[0] - 1.0], 0.5 * (xs[:-1] + xs[1:]), [xs[-1] + 1.0]])
    v = np.ones_like(centers)
    u = u_amp * np.exp(-(centers**2))
    p = np.ones_like(centers)
    y = y_amp * np.exp(-(((centers - y_center) / y_width) ** 2))
    y[np.abs(centers - y_center) > 3.0 * y_width] = 0.0
    y[0] = y[-1] = 0.0
    return PiecewiseConstant(xs, _states_from_primitive(params, v, u, p, y))


def riemann_profile(params: GasParams, left=None, right=None) -> PiecewiseConstant:
    l = left if left is not None else background_state(params)
    r = right if right is not None else background_state(params, v=1.03, p=0.97)
    return PiecewiseConstant(np.array([0.0]), np.array([l.as_tuple(), r.as_tuple()]))


def sod_reactive_profile(params: GasParams, scale=1.0) -> PiecewiseConstant:
    """Small-amplitude Sod-style tube with reactant on the driver side."""
    left = background_state(params, v=1.0, p=1.0 + 0.02 * scale, Y=0.01 * scale)
    right = background_state(params, v=1.0 + 0.03 * scale, p=1.0 - 0.02 * scale, Y=0.0)
    return PiecewiseConstant(np.array([0.0]), np.array([left.as_tuple(), right.as_tuple()]))


def single_shock_profile(params: GasParams, family=3, q=-0.02, y_level=0.01,
                         x0=0.0) -> PiecewiseConstant:
    """Exact elementary shock in a uniform reactant bath."""
    from .gas import hugoniot_curve

    left = background_state(params, Y=y_level)
    right = hugoniot_curve(family, q, left, params)
    return PiecewiseConstant(np.array([x0]), np.array([left.as_tuple(), right.as_tuple()]))


_PRESETS = {
    "bump": bump_profile,
    "riemann": riemann_profile,
    "sod_reactive": sod_reactive_profile,
    "single_shock": single_shock_profile,
}


def preset_profile(name: str, params: GasParams, **kw) -> PiecewiseConstant:
    if name not in _PRESETS:
        raise ValidationError(f"unknown preset {name!r}; have {sorted(_PRESETS)}")
    return _PRESETS[name](params, **kw)


def make_profile(spec: dict, params: GasParams) -> PiecewiseConstant:
    """Profile from a config mapping: either a preset or explicit segments."""
    if "preset" in spec:
        kw = {k: v for k, v in spec.items() if k != "preset"}
        return preset_profile(spec["preset"], params, **kw)
    if "segments" in spec:
        seg = spec["segments"]
        return PiecewiseConstant(np.array(seg["breaks"], dtype=float),
                                 np.array(seg["states"], dtype=float))
    raise ValidationError("initial data needs a 'preset' or 'segments' entry")


def make_config(epsilon: float, profile: PiecewiseConstant = None,
                params: GasParams = None, **overrides) -> SchemeConfig:
    """Scheme configuration with the NP speed derived from the data."""
    params = params if params is not None else GasParams()
    if "lambda_hat" in overrides:
        lam = overrides.pop("lambda_hat")
    else:
        if profile is not None:
            states = [GasState(*row) for row in profile.values]
        else:
            states = [background_state(params)]
        lam = suggest_lambda_hat(states, params)
    return SchemeConfig(epsilon=epsilon, lambda_hat=lam, gas=params, **overrides)
