"""Fractional-step scheme: reaction source operator and the composed flow.

The approximate flow alternates the homogeneous front-tracking operator
S over strips of length eps with the explicit reaction update

    E <- E + q Y phi(T) dt,     Y <- Y (1 - phi(T) dt),

applied per constant piece, and stops reacting after N = ceil(1/eps^2)
steps.  Reaction never creates fronts; the off-curve content it deposits
on existing fronts is released into elementary waves by the tracking
module once it exceeds the configured threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import StepTooLarge, ValidationError
from .fronts import FrontSolution
from .gas import (
    GasParams,
    GasState,
    lagrangian_sound_speed,
    reaction_rate,
    state_norm,
    temperature,
)
from .tracking import (
    _front_speed,
    _gas_front_strength,
    conservation_step,
    resolve_pending,
)

__all__ = ["SchemeConfig", "DomainSpec", "reaction_step", "evolve", "domain_check"]


@dataclass(frozen=True)
class SchemeConfig:
    """All scheme parameters; kappa3 = C_glimm * kappa2 is enforced."""

    epsilon: float
    lambda_hat: float
    gas: GasParams = field(default_factory=GasParams)
    rho: float = None
    delta_r: float = None
    release_threshold: float = None
    generation_cap: int = None
    M: float = 10.0
    C_glimm: float = 10.0
    kappa: tuple = (2.2, 0.05, 0.5, 8.0)
    phi_lower: float = 0.5
    phi_upper: float = 2.0
    B_const: float = 2.0
    B_star: float = 0.05
    epsilon_cap: float = 0.5
    event_budget: int = 500_000
    tv_limit: float = 0.5

    def __post_init__(self):
        if self.epsilon <= 0.0:
            raise ValidationError("epsilon must be positive")
        eps = self.epsilon
        if self.rho is None:
            object.__setattr__(self, "rho", eps * eps)
        if self.delta_r is None:
            object.__setattr__(self, "delta_r", eps)
        if self.release_threshold is None:
            # linear in eps: reaction-created content held on a front stays
            # O(eps) while the number of release events stays O(1/eps)
            object.__setattr__(self, "release_threshold", 0.05 * eps)
        if self.generation_cap is None:
            object.__setattr__(self, "generation_cap", max(1, math.ceil(math.log2(1.0 / eps))))
        if abs(self.kappa[2] - self.C_glimm * self.kappa[1]) > 1e-14 * self.kappa[2]:
            raise ValidationError("kappa3 must equal C_glimm * kappa2")
        if not (0.0 < self.phi_lower <= self.phi_upper):
            raise ValidationError("need 0 < phi_lower <= phi_upper")
        if eps * self.phi_upper >= 0.5:
            raise ValidationError("epsilon * phi_upper must stay below 1/2")
        if self.M < 1.0:
            raise ValidationError("Y-wave weight M must be at least 1")

    @property
    def n_reaction_steps(self) -> int:
        return math.ceil(1.0 / (self.epsilon * self.epsilon))

    def with_epsilon(self, eps: float) -> "SchemeConfig":
        return replace(
            self, epsilon=eps, rho=None, delta_r=None, release_threshold=None,
            generation_cap=None,
        )


def suggest_lambda_hat(states, params: GasParams, margin: float = 1.1) -> float:
    """NP speed: margin times the largest characteristic speed of the data."""
    fastest = max(lagrangian_sound_speed(s, params) for s in states)
    return margin * fastest


@dataclass(frozen=True)
class DomainSpec:
    """Invariant-domain budgets around the background Riemann state."""

    left_background: GasState
    right_background: GasState
    epsilon_cap: float
    B_const: float
    B_star: float
    phi_lower: float

    @classmethod
    def from_config(cls, cfg: SchemeConfig, left: GasState, right: GasState):
        return cls(left, right, cfg.epsilon_cap, cfg.B_const, cfg.B_star, cfg.phi_lower)

    def eps_t(self, t: float) -> float:
        rate = self.B_const * self.B_star * self.epsilon_cap / self.phi_lower
        return self.epsilon_cap * math.exp(rate * (1.0 - math.exp(-self.phi_lower * t)))

    @property
    def eps_inf(self) -> float:
        rate = self.B_const * self.B_star * self.epsilon_cap / self.phi_lower
        return self.epsilon_cap * math.exp(rate)

    def y_budget(self, t: float) -> float:
        return self.B_star * self.epsilon_cap * math.exp(-self.phi_lower * t)


# ---------------------------------------------------------------------------
# reaction operator
# ---------------------------------------------------------------------------


def _react_state(s: GasState, dt: float, params: GasParams) -> GasState:
    T = temperature(s, params)
    phi = reaction_rate(T, params)
    if dt * phi >= 1.0:
        raise StepTooLarge(f"dt*phi(T) = {dt * phi:.3g} >= 1")
    if s.Y == 0.0:
        return s  # bitwise identity off the reacting region
    return GasState(
        s.v,
        s.u,
        s.E + params.q_heat * s.Y * phi * dt,
        s.Y * (1.0 - phi * dt),
    )


def reaction_step(sol: FrontSolution, dt: float, params: GasParams) -> FrontSolution:
    """Pointwise linearized reaction update over a span dt.

    Front positions are unchanged and no fronts are created; strengths and
    speeds are recomputed from the updated side states.
    """
    out = sol.copy()
    cache = {}

    def react(s):
        key = id(s)
        if key not in cache:
            cache[key] = _react_state(s, dt, params)
        return cache[key]

    out.left_background = react(sol.left_background)
    out.right_background = react(sol.right_background)
    for f, old in zip(out.fronts, sol.fronts):
        f.left_state = react(old.left_state)
        f.right_state = react(old.right_state)
        if f.left_state is old.left_state and f.right_state is old.right_state:
            continue  # nothing reacted here; keep metadata bit-exact
        if f.family in ("1", "3"):
            q = _gas_front_strength(f.family, f.left_state, f.right_state, params)
            f.strength = abs(q)
            f.speed = _front_speed(f.family, f.kind, f.left_state, f.right_state,
                                   params, fallback=f.speed)
        elif f.family == "2":
            f.strength = abs(f.right_state.v - f.left_state.v)
        elif f.family == "Y":
            f.strength = abs(f.right_state.Y - f.left_state.Y)
        else:
            f.strength = state_norm(f.left_state, f.right_state)
    return out


def evolve(initial: FrontSolution, t: float, cfg: SchemeConfig, sample_cb=None,
           event_cb=None) -> FrontSolution:
    """Composed approximate flow over a span t, treated as a fresh run.

    Alternates conservation strips of length eps with reaction updates at
    the strip ends, stopping the reaction after N = ceil(1/eps^2) steps,
    and finishes with a partial conservation strip.  `sample_cb(tag, k,
    sol)` is invoked with tags "pre_reaction" and "post_reaction" around
    every reaction time (the post snapshot has pending waves released).
    """
    if t < 0.0:
        raise ValidationError("horizon must be nonnegative")
    params = cfg.gas
    eps = cfg.epsilon
    k = min(int(math.floor(t / eps + 1e-9)), cfg.n_reaction_steps)
    sol = initial
    for j in range(1, k + 1):
        sol = conservation_step(sol, eps, cfg, params, event_cb)
        if sample_cb is not None:
            sample_cb("pre_reaction", j, sol)
        sol = reaction_step(sol, eps, params)
        sol = resolve_pending(sol, cfg, params, event_cb)
        if sample_cb is not None:
            sample_cb("post_reaction", j, sol)
    rest = t - k * eps
    if rest > 1e-12 * max(1.0, t):
        sol = conservation_step(sol, rest, cfg, params, event_cb)
    elif sol is initial:
        sol = conservation_step(sol, 0.0, cfg, params, event_cb)
    return sol


def domain_check(sol: FrontSolution, t: float, spec: DomainSpec, cfg: SchemeConfig) -> dict:
    """Report whether a snapshot sits inside the time-t invariant domain."""
    from .functionals import glimm_F

    f_value = glimm_F(sol, cfg)
    y_inf = sol.y_sup()
    eps_budget = spec.eps_t(t)
    y_budget = spec.y_budget(t)
    return {
        "F_value": f_value,
        "Y_inf": y_inf,
        "epsilon_budget": eps_budget,
        "y_budget": y_budget,
        "member": bool(f_value < eps_budget and y_inf < y_budget),
    }
