"""Gas dynamics core for the 3x3 Lagrangian Euler system with a passive reactant.

State is (v, u, E, Y): specific volume, velocity, total energy per unit mass
and reactant mass fraction.  Closure is the ideal gamma-law written in
(v, e) variables,

    e = E - u^2/2,   p = (gamma - 1) e / v,   T = e / c,

with an Arrhenius reaction rate  phi(T) = T^alpha exp(-beta/T).  The
characteristic speeds of the homogeneous flux (-u, p, p*u, 0) are
(-C, 0, +C, 0) with C = sqrt(gamma p / v), the Lagrangian sound speed.

This module provides the exact Riemann solver, the one-parameter wave
curves through a base state (shock branch on one side, rarefaction on the
other, contact for the middle family), and the inverse problem of
decomposing the gap between two nearby states into wave-curve coordinates
(q1, q2, q3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NoConvergence, NoSolution

__all__ = [
    "GasParams",
    "GasState",
    "Wave",
    "WaveFan",
    "pressure",
    "internal_energy",
    "temperature",
    "reaction_rate",
    "rate_slope",
    "eigenvalues",
    "lagrangian_sound_speed",
    "curve_tangents",
    "left_duals",
    "hugoniot_curve",
    "solve_riemann",
    "decompose_q",
    "source_terms",
]


@dataclass(frozen=True)
class GasParams:
    """Thermodynamic and kinetic constants (gamma-law gas, Arrhenius rate)."""

    gamma: float = 1.4
    c: float = 1.0
    q_heat: float = 1.0
    alpha: float = 1.0
    beta: float = 2.0

    def __post_init__(self):
        if self.gamma <= 1.0:
            raise DomainError("adiabatic constant must exceed 1")
        if self.c <= 0.0 or self.q_heat <= 0.0:
            raise DomainError("specific heat and binding energy must be positive")
        if self.alpha <= 0.0 or self.beta <= 0.0:
            raise DomainError("rate exponents must be positive")


class GasState:
    """One constant state (v, u, E, Y).  Immutable by convention."""

    __slots__ = ("v", "u", "E", "Y")

    def __init__(self, v: float, u: float, E: float, Y: float = 0.0):
        self.v = float(v)
        self.u = float(u)
        self.E = float(E)
        self.Y = float(Y)

    def validate(self) -> "GasState":
        if not (self.v > 0.0):
            raise DomainError(f"specific volume must be positive, got {self.v}")
        if self.E - 0.5 * self.u * self.u <= 0.0:
            raise DomainError("internal energy must be positive")
        if not (-1e-12 <= self.Y <= 1.0 + 1e-12):
            raise DomainError(f"mass fraction out of [0, 1]: {self.Y}")
        return self

    def as_tuple(self):
        return (self.v, self.u, self.E, self.Y)

    def gas_part(self):
        return (self.v, self.u, self.E)

    def __repr__(self):
        return f"GasState(v={self.v!r}, u={self.u!r}, E={self.E!r}, Y={self.Y!r})"

    def __eq__(self, other):
        return (
            isinstance(other, GasState)
            and self.v == other.v
            and self.u == other.u
            and self.E == other.E
            and self.Y == other.Y
        )

    def __hash__(self):
        return hash(self.as_tuple())


def state_norm(a: GasState, b: GasState) -> float:
    """Euclidean distance between two states in (v, u, E, Y)."""
    return math.sqrt(
        (a.v - b.v) ** 2 + (a.u - b.u) ** 2 + (a.E - b.E) ** 2 + (a.Y - b.Y) ** 2
    )


def gas_norm(a: GasState, b: GasState) -> float:
    """Euclidean distance restricted to the gas part (v, u, E)."""
    return math.sqrt((a.v - b.v) ** 2 + (a.u - b.u) ** 2 + (a.E - b.E) ** 2)


def internal_energy(s: GasState) -> float:
    e = s.E - 0.5 * s.u * s.u
    if e <= 0.0:
        raise DomainError("internal energy must be positive")
    return e


def pressure(s: GasState, p: GasParams) -> float:
    if s.v <= 0.0:
        raise DomainError("specific volume must be positive")
    return (p.gamma - 1.0) * internal_energy(s) / s.v


def temperature(s: GasState, p: GasParams) -> float:
    return internal_energy(s) / p.c


def reaction_rate(T: float, p: GasParams) -> float:
    """Arrhenius rate T^alpha * exp(-beta/T); positive and increasing for T > 0."""
    if T <= 0.0:
        raise DomainError("temperature must be positive")
    return T ** p.alpha * math.exp(-p.beta / T)


def rate_slope(T: float, p: GasParams) -> float:
    """d/dT of the Arrhenius rate."""
    return reaction_rate(T, p) * (p.alpha / T + p.beta / (T * T))


def source_terms(s: GasState, p: GasParams) -> tuple[float, float, float, float]:
    """Right-hand side G(U) = (0, 0, q*Y*phi(T), -Y*phi(T))."""
    r = s.Y * reaction_rate(temperature(s, p), p)
    return (0.0, 0.0, p.q_heat * r, -r)


def lagrangian_sound_speed(s: GasState, p: GasParams) -> float:
    return math.sqrt(p.gamma * pressure(s, p) / s.v)


def eigenvalues(s: GasState, p: GasParams) -> tuple[float, float, float, float]:
    """(lambda_1, lambda_2, lambda_3, lambda_4) = (-C, 0, +C, 0)."""
    C = lagrangian_sound_speed(s, p)
    return (-C, 0.0, C, 0.0)


# ---------------------------------------------------------------------------
# wave curves
# ---------------------------------------------------------------------------
#
# Families 1 and 3 are parameterized by a signed scalar q with unit tangent
# at q = 0; q > 0 is the rarefaction branch, q < 0 the shock branch.  The
# underlying coordinate along either curve is the pressure of the connected
# state:
#
#   family 1:  p(q) = p0 - q / a1(base)          (rarefaction has p < p0)
#   family 3:  p(q) = p0 + q / a3(base)          (rarefaction has p > p0)
#
# where a_i = |dState/dp| at the base point, so |dH_i/dq| = 1 at q = 0.
# The base state is always the state on the LEFT of the wave.  Family 2 is
# the contact locus parameterized by the jump in v.


def _curve_dstate_dp(family: int, s: GasState, p: GasParams):
    """Derivative of the wave curve w.r.t. pressure at the base point."""
    p0 = pressure(s, p)
    a0 = math.sqrt(p.gamma * p0 * s.v)  # Eulerian sound speed sqrt(gamma p v)
    dv = -s.v / (p.gamma * p0)
    du = a0 / (p.gamma * p0)
    if family == 1:
        du = -du
    dE = s.v / p.gamma + s.u * du
    return (dv, du, dE)


def curve_tangents(s: GasState, p: GasParams):
    """Tangent vectors of H_1, H_2, H_3 at q = 0.

    Families 1 and 3 are unit vectors along (1, C, -p + C u) and
    (-1, C, p + C u); family 2 is the unnormalized contact direction
    (1, 0, p/(gamma-1)) matching the v-jump parameterization.
    """
    out = []
    for fam in (1, 2, 3):
        if fam == 2:
            out.append((1.0, 0.0, pressure(s, p) / (p.gamma - 1.0)))
            continue
        dv, du, dE = _curve_dstate_dp(fam, s, p)
        norm = math.sqrt(dv * dv + du * du + dE * dE)
        sign = -1.0 if fam == 1 else 1.0
        out.append((sign * dv / norm, sign * du / norm, sign * dE / norm))
    return tuple(out)


def _inv3(m):
    """Closed-form inverse of a 3x3 matrix given as rows of tuples."""
    (a, b, c), (d, e, f), (g, h, i) = m
    det = a * (e * i - f * h) - b * (d * i - f * g) + c * (d * h - e * g)
    if det == 0.0:
        raise DomainError("singular tangent basis")
    inv_det = 1.0 / det
    return (
        ((e * i - f * h) * inv_det, (c * h - b * i) * inv_det, (b * f - c * e) * inv_det),
        ((f * g - d * i) * inv_det, (a * i - c * g) * inv_det, (c * d - a * f) * inv_det),
        ((d * h - e * g) * inv_det, (b * g - a * h) * inv_det, (a * e - b * d) * inv_det),
    )


def left_duals(s: GasState, p: GasParams):
    """Rows l_i with l_i . t_j = delta_ij for the curve tangents t_j."""
    t1, t2, t3 = curve_tangents(s, p)
    cols = ((t1[0], t2[0], t3[0]), (t1[1], t2[1], t3[1]), (t1[2], t2[2], t3[2]))
    return _inv3(cols)


def _hugoniot_v(pstar: float, v0: float, p0: float, gamma: float) -> float:
    gm, gp = gamma - 1.0, gamma + 1.0
    return v0 * (gm * pstar + gp * p0) / (gp * pstar + gm * p0)


def _isentrope_v(pstar: float, v0: float, p0: float, gamma: float) -> float:
    return v0 * (p0 / pstar) ** (1.0 / gamma)


def _u_shift_shock(pstar: float, v0: float, p0: float, gamma: float) -> float:
    A = 2.0 * v0 / (gamma + 1.0)
    B = (gamma - 1.0) / (gamma + 1.0) * p0
    return (pstar - p0) * math.sqrt(A / (pstar + B))


def _u_shift_rarefaction(pstar: float, p0: float, a0: float, gamma: float) -> float:
    z = (gamma - 1.0) / (2.0 * gamma)
    return 2.0 * a0 / (gamma - 1.0) * ((pstar / p0) ** z - 1.0)


def _u_shift(pstar: float, v0: float, p0: float, a0: float, gamma: float) -> float:
    """Velocity shift f(p; anchor) with the outer-anchor branch rule p > p0 => shock."""
    if pstar > p0:
        return _u_shift_shock(pstar, v0, p0, gamma)
    return _u_shift_rarefaction(pstar, p0, a0, gamma)


def _state_on_curve(family: int, pstar: float, base: GasState, p: GasParams) -> GasState:
    """State connected to `base` (left of the wave) at pressure pstar."""
    p0 = pressure(base, p)
    a0 = math.sqrt(p.gamma * p0 * base.v)
    if pstar <= 0.0:
        raise DomainError("wave curve left the admissible region (p <= 0)")
    # viewed from the state left of the wave: family 1 shocks have p > p0,
    # family 3 shocks have p < p0
    shock = pstar > p0 if family == 1 else pstar < p0
    if shock:
        v = _hugoniot_v(pstar, base.v, p0, p.gamma)
        f = _u_shift_shock(pstar, base.v, p0, p.gamma)
    else:
        v = _isentrope_v(pstar, base.v, p0, p.gamma)
        f = _u_shift_rarefaction(pstar, p0, a0, p.gamma)
    # family 1 slows the flow as p rises, family 3 speeds it up
    u = base.u - f if family == 1 else base.u + f
    e = pstar * v / (p.gamma - 1.0)
    return GasState(v, u, e + 0.5 * u * u, base.Y)


def hugoniot_curve(family: int, q: float, base: GasState, p: GasParams) -> GasState:
    """Point H_family(q)(base) on the wave curve through `base`.

    Families 1 and 3: full wave curve (shock for q < 0, rarefaction for
    q > 0) with |dH/dq| = 1 at q = 0.  Family 2: contact locus with q the
    jump in v (pressure and velocity unchanged).  Y is carried unchanged.
    """
    if family == 2:
        v = base.v + q
        if v <= 0.0:
            raise DomainError("contact curve left the admissible region (v <= 0)")
        p0 = pressure(base, p)
        e = p0 * v / (p.gamma - 1.0)
        return GasState(v, base.u, e + 0.5 * base.u * base.u, base.Y)
    if family not in (1, 3):
        raise ValueError(f"family must be 1, 2 or 3, got {family}")
    if q == 0.0:
        return GasState(base.v, base.u, base.E, base.Y)
    dv, du, dE = _curve_dstate_dp(family, base, p)
    scale = math.sqrt(dv * dv + du * du + dE * dE)
    p0 = pressure(base, p)
    pstar = p0 - q / scale if family == 1 else p0 + q / scale
    return _state_on_curve(family, pstar, base, p)


def curve_parameter(family: int, base: GasState, other_p: float, p: GasParams) -> float:
    """Signed parameter q such that the curve point has pressure other_p."""
    p0 = pressure(base, p)
    dv, du, dE = _curve_dstate_dp(family, base, p)
    scale = math.sqrt(dv * dv + du * du + dE * dE)
    return scale * (p0 - other_p) if family == 1 else scale * (other_p - p0)


# ---------------------------------------------------------------------------
# exact Riemann solver
# ---------------------------------------------------------------------------


@dataclass
class Wave:
    """One elementary wave of the self-similar fan."""

    family: int  # 1, 2 or 3
    kind: str  # "shock", "rarefaction" or "contact"
    left: GasState
    right: GasState
    speed_lo: float
    speed_hi: float
    q: float  # signed wave-curve parameter (v-jump for the contact)

    @property
    def strength(self) -> float:
        return abs(self.q)


@dataclass
class WaveFan:
    """Ordered solution of a Riemann problem; empty for equal data."""

    left: GasState
    right: GasState
    waves: list
    middle_pressure: float
    middle_velocity: float

    def sample(self, xi: float, p: GasParams) -> GasState:
        """State at similarity coordinate xi = x/t (Y jumps at xi = 0)."""
        state = self.left
        for w in self.waves:
            if xi < w.speed_lo:
                return state
            if xi <= w.speed_hi and w.kind == "rarefaction":
                return _rarefaction_interior(w, xi, p)
            if xi <= w.speed_hi:
                # on a contact/shock line; take the right limit
                state = w.right
                continue
            state = w.right
        return state


def _rarefaction_interior(w: Wave, xi: float, p: GasParams) -> GasState:
    """State inside a rarefaction fan at similarity coordinate xi."""
    anchor = w.left if w.family == 1 else w.right
    p0 = pressure(anchor, p)
    K = p0 * anchor.v ** p.gamma
    a0 = math.sqrt(p.gamma * p0 * anchor.v)
    v = (p.gamma * K / (xi * xi)) ** (1.0 / (p.gamma + 1.0))
    pst = K * v ** (-p.gamma)
    a = math.sqrt(p.gamma * pst * v)
    if w.family == 1:
        u = anchor.u + 2.0 / (p.gamma - 1.0) * (a0 - a)
        Y = anchor.Y
    else:
        u = anchor.u + 2.0 / (p.gamma - 1.0) * (a - a0)
        Y = anchor.Y
    e = pst * v / (p.gamma - 1.0)
    return GasState(v, u, e + 0.5 * u * u, Y)


def _pressure_fn(pstar, vl, pl, al, vr, pr, ar, du, gamma):
    return (
        _u_shift(pstar, vl, pl, al, gamma)
        + _u_shift(pstar, vr, pr, ar, gamma)
        + du
    )


def _pressure_fn_slope(pstar, v0, p0, a0, gamma):
    if pstar > p0:
        A = 2.0 * v0 / (gamma + 1.0)
        B = (gamma - 1.0) / (gamma + 1.0) * p0
        root = math.sqrt(A / (pstar + B))
        return root * (1.0 - 0.5 * (pstar - p0) / (pstar + B))
    z = (gamma - 1.0) / (2.0 * gamma)
    return a0 / (gamma * p0) * (pstar / p0) ** (z - 1.0)


def _solve_middle_pressure(left: GasState, right: GasState, p: GasParams, tol=1e-12):
    """Newton iteration with bisection fallback on the pressure function."""
    g = p.gamma
    pl, pr = pressure(left, p), pressure(right, p)
    al = math.sqrt(g * pl * left.v)
    ar = math.sqrt(g * pr * right.v)
    du = right.u - left.u
    if 2.0 / (g - 1.0) * (al + ar) <= du:
        raise NoSolution("pressure function has no positive root (vacuum)")

    def f(x):
        return _pressure_fn(x, left.v, pl, al, right.v, pr, ar, du, g)

    # linearized (acoustic) guess, floored away from zero
    zl = math.sqrt(g * pl / left.v)
    zr = math.sqrt(g * pr / right.v)
    guess = (zr * pl + zl * pr - zl * zr * du) / (zl + zr)
    pk = max(guess, 1e-8 * min(pl, pr))
    for _ in range(60):
        fk = f(pk)
        dfk = _pressure_fn_slope(pk, left.v, pl, al, g) + _pressure_fn_slope(
            pk, right.v, pr, ar, g
        )
        step = fk / dfk
        pn = pk - step
        if pn <= 0.0:
            pn = 0.5 * pk
        if abs(pn - pk) <= tol * max(1.0, pn):
            return pn
        pk = pn
    # bisection fallback: f is increasing with f(0+) < 0
    lo = 1e-14 * min(pl, pr)
    hi = max(pl, pr)
    while f(hi) < 0.0:
        hi *= 2.0
        if hi > 1e16:
            raise NoSolution("pressure bracket expansion failed")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, hi):
            return 0.5 * (lo + hi)
    raise NoSolution("pressure iteration did not converge")


def _shock_speed(family: int, left: GasState, right: GasState, p: GasParams) -> float:
    dp = pressure(right, p) - pressure(left, p)
    dv = right.v - left.v
    s2 = -dp / dv
    if s2 <= 0.0:
        raise DomainError("invalid shock data (non-real speed)")
    s = math.sqrt(s2)
    return -s if family == 1 else s


def solve_riemann(left: GasState, right: GasState, p: GasParams, tol=1e-12) -> WaveFan:
    """Exact self-similar solution of the Riemann problem (left | right).

    The 2-family wave sits at speed zero and carries both the contact jump
    in (v, E) at constant (p, u) and the passive Y jump.  Zero-strength
    waves are omitted; equal data yields an empty fan.
    """
    left.validate()
    right.validate()
    if left == right:
        return WaveFan(left, right, [], pressure(left, p), left.u)

    pl, pr = pressure(left, p), pressure(right, p)
    pstar = _solve_middle_pressure(left, right, p, tol)
    # snap to a one-sided wave when the root lands on an input pressure
    if abs(pstar - pl) <= 1e-13 * pl:
        pstar = pl
    if abs(pstar - pr) <= 1e-13 * pr:
        pstar = pr
    al = math.sqrt(p.gamma * pl * left.v)
    ar = math.sqrt(p.gamma * pr * right.v)
    ustar = 0.5 * (left.u + right.u) + 0.5 * (
        _u_shift(pstar, right.v, pr, ar, p.gamma)
        - _u_shift(pstar, left.v, pl, al, p.gamma)
    )

    waves = []
    # 1-wave from the left state
    if pstar != pl:
        mid_l = _state_on_curve(1, pstar, left, p)
        mid_l = GasState(mid_l.v, ustar, mid_l.E - 0.5 * mid_l.u**2 + 0.5 * ustar**2, left.Y)
        q1 = curve_parameter(1, left, pstar, p)
        if pstar > pl:
            s = _shock_speed(1, left, mid_l, p)
            waves.append(Wave(1, "shock", left, mid_l, s, s, q1))
        else:
            lo = -lagrangian_sound_speed(left, p)
            hi = -lagrangian_sound_speed(mid_l, p)
            waves.append(Wave(1, "rarefaction", left, mid_l, lo, hi, q1))
    else:
        mid_l = GasState(left.v, ustar, left.E - 0.5 * left.u**2 + 0.5 * ustar**2, left.Y)

    # 3-wave anchored on the right state
    if pstar != pr:
        vr_star = (
            _hugoniot_v(pstar, right.v, pr, p.gamma)
            if pstar > pr
            else _isentrope_v(pstar, right.v, pr, p.gamma)
        )
        e = pstar * vr_star / (p.gamma - 1.0)
        mid_r = GasState(vr_star, ustar, e + 0.5 * ustar**2, right.Y)
        q3 = curve_parameter(3, mid_r, pr, p)
        if pstar > pr:
            s = _shock_speed(3, mid_r, right, p)
            waves3 = Wave(3, "shock", mid_r, right, s, s, q3)
        else:
            lo = lagrangian_sound_speed(mid_r, p)
            hi = lagrangian_sound_speed(right, p)
            waves3 = Wave(3, "rarefaction", mid_r, right, lo, hi, q3)
    else:
        mid_r = GasState(right.v, ustar, right.E - 0.5 * right.u**2 + 0.5 * ustar**2, right.Y)
        waves3 = None

    # 2-family wave at speed zero (contact and/or Y jump)
    if mid_l.v != mid_r.v or left.Y != right.Y:
        lstate = GasState(mid_l.v, ustar, mid_l.E, left.Y)
        rstate = GasState(mid_r.v, ustar, mid_r.E, right.Y)
        waves.append(Wave(2, "contact", lstate, rstate, 0.0, 0.0, mid_r.v - mid_l.v))

    if waves3 is not None:
        waves.append(waves3)

    # rebuild exact state continuity through the chain with bit-exact ends
    chain = [left]
    for w in waves:
        chain.append(w.right)
    chain[-1] = right
    fixed = []
    for i, w in enumerate(waves):
        fixed.append(
            Wave(w.family, w.kind, chain[i], chain[i + 1], w.speed_lo, w.speed_hi, w.q)
        )
    fan = WaveFan(left, right, fixed, pstar, ustar)
    return fan


# ---------------------------------------------------------------------------
# wave-curve coordinates between two states
# ---------------------------------------------------------------------------


def _compose(q1: float, q2: float, q3: float, base: GasState, p: GasParams) -> GasState:
    return hugoniot_curve(3, q3, hugoniot_curve(2, q2, hugoniot_curve(1, q1, base, p), p), p)


def decompose_q(U1: GasState, U2: GasState, p: GasParams, tol=1e-12, max_iter=50):
    """Solve H3(q3) o H2(q2) o H1(q1) (U1) = U2 on the gas components.

    Newton iteration with a finite-difference Jacobian, started from the
    projection of U2 - U1 onto the dual basis of the curve tangents at U1.
    Raises NoConvergence after `max_iter` iterations.
    """
    d = (U2.v - U1.v, U2.u - U1.u, U2.E - U1.E)
    if d == (0.0, 0.0, 0.0):
        return (0.0, 0.0, 0.0)
    scale = max(1.0, abs(U1.v), abs(U1.E), abs(U2.v), abs(U2.E))
    l1, l2, l3 = left_duals(U1, p)
    q = [
        l1[0] * d[0] + l1[1] * d[1] + l1[2] * d[2],
        l2[0] * d[0] + l2[1] * d[1] + l2[2] * d[2],
        l3[0] * d[0] + l3[1] * d[1] + l3[2] * d[2],
    ]

    def residual(qv):
        s = _compose(qv[0], qv[1], qv[2], U1, p)
        return (s.v - U2.v, s.u - U2.u, s.E - U2.E)

    h = 1e-7
    for _ in range(max_iter):
        r = residual(q)
        rn = math.sqrt(r[0] ** 2 + r[1] ** 2 + r[2] ** 2)
        if rn <= tol * scale:
            return (q[0], q[1], q[2])
        cols = []
        for i in range(3):
            qp = list(q)
            qm = list(q)
            qp[i] += h
            qm[i] -= h
            rp = residual(qp)
            rm = residual(qm)
            cols.append(tuple((rp[k] - rm[k]) / (2.0 * h) for k in range(3)))
        rows = tuple(tuple(cols[j][i] for j in range(3)) for i in range(3))
        inv = _inv3(rows)
        for i in range(3):
            q[i] -= inv[i][0] * r[0] + inv[i][1] * r[1] + inv[i][2] * r[2]
    raise NoConvergence(
        f"wave-curve decomposition stalled at residual {rn:.3e} (tol {tol * scale:.3e})"
    )
