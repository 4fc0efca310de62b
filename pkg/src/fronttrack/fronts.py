"""Piecewise-constant solutions and their traveling discontinuities.

A FrontSolution is a time-stamped, position-sorted list of fronts between
two constant background states.  Families:

    "1", "3"  genuinely nonlinear gas waves (shock or rarefaction piece)
    "2"       contact discontinuity, speed exactly zero
    "Y"       reactant jump, speed exactly zero, gas components continuous
    "NP"      non-physical bookkeeping front at the fixed speed lambda_hat
    "J"       raw jump from sampled initial data, not yet resolved into
              elementary waves (the first conservation step resolves it)

Positions are non-decreasing; co-located fronts are allowed only for the
speed-zero stack (contact stored left of the reactant jump).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .gas import GasState, state_norm

__all__ = [
    "Front",
    "FrontSolution",
    "PiecewiseConstant",
    "approximate_initial_data",
    "l1_distance",
    "total_variation",
]

FAMILY_RANK = {"1": 1, "2": 2, "Y": 2, "3": 3, "NP": 4}

# fixed order for co-located speed-zero fronts: contact left of Y-front
TIE_ORDER = {"2": 0, "Y": 1}


@dataclass
class Front:
    """One traveling discontinuity."""

    id: int
    family: str
    position: float
    speed: float
    left_state: GasState
    right_state: GasState
    strength: float
    generation: int = 0
    kind: str = ""

    def tie_rank(self) -> int:
        return TIE_ORDER.get(self.family, 2)

    def is_physical(self) -> bool:
        return self.family in ("1", "2", "3")

    def sort_key(self):
        return (self.position, self.tie_rank(), self.id)


@dataclass
class FrontSolution:
    """Snapshot of the piecewise-constant solution at one time."""

    time: float
    fronts: list
    left_background: GasState
    right_background: GasState
    crossing_registry: dict = field(default_factory=dict)
    next_id: int = 0

    # -- construction helpers -------------------------------------------

    def allocate_id(self) -> int:
        i = self.next_id
        self.next_id = i + 1
        return i

    def copy(self) -> "FrontSolution":
        return FrontSolution(
            self.time,
            [
                Front(
                    f.id,
                    f.family,
                    f.position,
                    f.speed,
                    f.left_state,
                    f.right_state,
                    f.strength,
                    f.generation,
                    f.kind,
                )
                for f in self.fronts
            ],
            self.left_background,
            self.right_background,
            {k: list(v) for k, v in self.crossing_registry.items()},
            self.next_id,
        )

    # -- piecewise access ------------------------------------------------

    def piece_states(self) -> list:
        """States of the constant pieces, left background first."""
        out = [self.left_background]
        for f in self.fronts:
            out.append(f.right_state)
        return out

    def breakpoints(self) -> list:
        return [f.position for f in self.fronts]

    def state_at(self, x: float, side: int = +1) -> GasState:
        """Piece state at x; side=-1 takes the left limit at a front."""
        state = self.left_background
        for f in self.fronts:
            if f.position < x or (side > 0 and f.position == x):
                state = f.right_state
            else:
                break
        return state

    def to_piecewise(self) -> "PiecewiseConstant":
        values = np.array([s.as_tuple() for s in self.piece_states()])
        return PiecewiseConstant(np.array(self.breakpoints(), dtype=float), values)

    def y_sup(self) -> float:
        return max(abs(s.Y) for s in self.piece_states())

    def validate(self) -> "FrontSolution":
        prev_x = -math.inf
        prev_speed = -math.inf
        prev_rank = -1
        state = self.left_background
        for f in self.fronts:
            if f.position < prev_x:
                raise ValidationError("front positions out of order")
            if f.position == prev_x:
                # co-located fronts must separate in list order; the
                # speed-zero stack keeps the contact left of the Y-front
                if f.speed < prev_speed:
                    raise ValidationError("co-located fronts in wrong speed order")
                if f.speed == prev_speed and f.tie_rank() < prev_rank:
                    raise ValidationError("co-located fronts in wrong tie order")
            if f.left_state.as_tuple() != state.as_tuple():
                raise ValidationError(
                    f"state chain broken before front {f.id} at x={f.position}"
                )
            state = f.right_state
            prev_x, prev_speed, prev_rank = f.position, f.speed, f.tie_rank()
        if state.as_tuple() != self.right_background.as_tuple():
            raise ValidationError("rightmost state does not match background")
        return self

    def record_crossing(self, y_front_id: int, crosser_id: int, strength: float):
        self.crossing_registry.setdefault(y_front_id, []).append((crosser_id, strength))


class PiecewiseConstant:
    """Vector-valued step function: values[j] on (breaks[j-1], breaks[j])."""

    __slots__ = ("breaks", "values")

    def __init__(self, breaks, values):
        self.breaks = np.asarray(breaks, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if self.values.ndim == 1:
            self.values = self.values[:, None]
        if len(self.values) != len(self.breaks) + 1:
            raise ValidationError("need exactly one more value than breakpoints")

    def __call__(self, x: float):
        j = np.searchsorted(self.breaks, x, side="right")
        return self.values[j]

    def jumps(self):
        return np.diff(self.values, axis=0)

    def total_variation(self) -> float:
        if len(self.breaks) == 0:
            return 0.0
        return float(np.linalg.norm(self.jumps(), axis=1).sum())


def _merged_breaks(a: PiecewiseConstant, b: PiecewiseConstant):
    return np.unique(np.concatenate([a.breaks, b.breaks]))


def l1_distance(a, b) -> float:
    """Exact L1 distance between two piecewise-constant functions.

    Accepts PiecewiseConstant or FrontSolution arguments.  The functions
    must agree outside the hull of their breakpoints, otherwise the
    distance is infinite.
    """
    pa = a.to_piecewise() if isinstance(a, FrontSolution) else a
    pb = b.to_piecewise() if isinstance(b, FrontSolution) else b
    if not np.array_equal(pa.values[0], pb.values[0]) or not np.array_equal(
        pa.values[-1], pb.values[-1]
    ):
        tail = max(
            float(np.linalg.norm(pa.values[0] - pb.values[0])),
            float(np.linalg.norm(pa.values[-1] - pb.values[-1])),
        )
        if tail > 0.0:
            return math.inf
    breaks = _merged_breaks(pa, pb)
    if len(breaks) == 0:
        return 0.0
    mids = 0.5 * (breaks[:-1] + breaks[1:])
    ja = np.searchsorted(pa.breaks, mids, side="right")
    jb = np.searchsorted(pb.breaks, mids, side="right")
    diff = pa.values[ja] - pb.values[jb]
    widths = np.diff(breaks)
    return float((np.linalg.norm(diff, axis=1) * widths).sum())


def total_variation(obj) -> float:
    pc = obj.to_piecewise() if isinstance(obj, FrontSolution) else obj
    return pc.total_variation()


def window_integral(sol: FrontSolution, lo: float, hi: float):
    """Componentwise exact integral of the state over [lo, hi]."""
    pc = sol.to_piecewise()
    breaks = np.concatenate([[lo], pc.breaks[(pc.breaks > lo) & (pc.breaks < hi)], [hi]])
    mids = 0.5 * (breaks[:-1] + breaks[1:])
    j = np.searchsorted(pc.breaks, mids, side="right")
    widths = np.diff(breaks)
    return (pc.values[j] * widths[:, None]).sum(axis=0)


# ---------------------------------------------------------------------------
# initial data approximation
# ---------------------------------------------------------------------------


def _greedy_coarsen(breaks, values, budget: float):
    """Merge pieces into their left neighbor, cheapest first, within budget.

    Each merge replaces one piece's value by its left neighbor's, which
    never increases total variation; the L1 cost of all merges stays below
    `budget`.
    """
    breaks = list(breaks)
    values = [np.asarray(v, dtype=float) for v in values]
    spent = 0.0
    while len(breaks) > 0:
        widths = []
        for j in range(1, len(values)):
            lo = breaks[j - 1]
            hi = breaks[j] if j < len(breaks) else None
            if hi is None:
                widths.append(math.inf)  # the right tail cannot be absorbed
            else:
                widths.append(hi - lo)
        costs = []
        for j in range(1, len(values)):
            jump = float(np.linalg.norm(values[j] - values[j - 1]))
            costs.append(0.0 if jump == 0.0 else jump * widths[j - 1])
        order = sorted(range(len(costs)), key=lambda i: costs[i])
        best = None
        for i in order:
            if costs[i] == 0.0:
                best = i
                break
            if spent + costs[i] <= budget:
                best = i
            break
        if best is None:
            break
        spent += costs[best]
        j = best + 1
        del values[j]
        del breaks[j - 1]
    return breaks, values, spent


def approximate_initial_data(profile: PiecewiseConstant, eps: float, cfg) -> FrontSolution:
    """Piecewise-constant approximation of sampled initial data.

    Keeps all jumps inside [-1/eps, 1/eps], does not increase total
    variation, and stays within L1 distance eps of the input there.  Jumps
    are stored as raw "J" fronts; the first conservation step resolves each
    of them with the Riemann solver.
    """
    tv = profile.total_variation()
    if tv > cfg.tv_limit:
        raise ValidationError(
            f"total variation {tv:.4g} exceeds configured limit {cfg.tv_limit:.4g}"
        )
    ymax = float(np.max(np.abs(profile.values[:, 3]))) if len(profile.values) else 0.0
    if ymax > 1.0 + 1e-12 or float(np.min(profile.values[:, 3])) < -1e-12:
        raise ValidationError("reactant fraction out of [0, 1]")

    # exterior jumps collapse onto the window boundary: total variation
    # cannot increase and nothing changes inside the window
    span = 1.0 / eps
    breaks = []
    values = [profile.values[0]]
    if (profile.breaks <= -span).any():
        breaks.append(-span)
        values.append(profile(-span))
    for i in np.nonzero(np.abs(profile.breaks) < span)[0]:
        breaks.append(float(profile.breaks[i]))
        values.append(profile.values[i + 1])
    if (profile.breaks >= span).any():
        breaks.append(span)
        values.append(profile.values[-1])

    breaks, values, _ = _greedy_coarsen(breaks, values, 0.5 * eps)

    sol = FrontSolution(
        0.0,
        [],
        GasState(*values[0]),
        GasState(*values[-1]),
    )
    for j, x in enumerate(breaks):
        left = GasState(*values[j])
        right = GasState(*values[j + 1])
        if left.as_tuple() == right.as_tuple():
            continue
        sol.fronts.append(
            Front(
                sol.allocate_id(),
                "J",
                float(x),
                0.0,
                left,
                right,
                state_norm(left, right),
                0,
                "jump",
            )
        )
    # chain continuity: reuse each front's right state object
    state = sol.left_background
    for f in sol.fronts:
        f.left_state = state
        state = f.right_state
    return sol.validate()
