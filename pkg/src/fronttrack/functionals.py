"""Wave-strength bookkeeping and the Lyapunov distance functional.

V sums front strengths (reactant jumps weighted by M), Q is the
interaction potential over approaching pairs, and F = V + C*Q is the
modified Glimm functional.  The distance between two snapshots is

    Phi = sum_i integral (|q_i(x)| + kappa1 |Y1 - Y2|) W_i(x) dx

with q(x) the wave-curve coordinates of the pointwise gap, and weights
W_i built from one-sided strength sums A_i, the interaction potentials of
both solutions, and a decaying reaction budget B(t).

Tagged reactant terms in Q use the crossing registry: a Y-front counts as
coupled to a front once they approach or have crossed, which keeps Q
continuous through the (exact) crossing itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .fronts import Front, FrontSolution, l1_distance
from .gas import decompose_q

__all__ = [
    "FunctionalReport",
    "QPairLedger",
    "wave_strength_V",
    "approaching",
    "interaction_Q",
    "glimm_F",
    "q_field",
    "weight_A",
    "weight_B",
    "lyapunov_phi",
]

_RANK = {"1": 1, "2": 2, "Y": 2, "3": 3}


@dataclass
class FunctionalReport:
    """One row of the diagnostics series; mirrors the CSV schema."""

    time: float
    event: str
    V_U: float = 0.0
    Q_U: float = 0.0
    F_U: float = 0.0
    V_V: float = 0.0
    Q_V: float = 0.0
    F_V: float = 0.0
    Phi: float = 0.0
    L1: float = 0.0
    Yinf_U: float = 0.0
    Yinf_V: float = 0.0

    COLUMNS = (
        "time", "event", "V_U", "Q_U", "F_U", "V_V", "Q_V", "F_V",
        "Phi", "L1", "Yinf_U", "Yinf_V",
    )

    def row(self):
        return [getattr(self, c) for c in self.COLUMNS]


@dataclass
class QPairLedger:
    """Term-by-term record of the interaction potential.

    `pairs` holds approaching direct products (a_id, b_id, value);
    `single_tags` holds coupled (front, Y-front) products (a_id, y_id,
    value); `tag_pairs` holds qualifying reactant pairs (y_id, y_id',
    value), present exactly when some approaching direct pair couples to
    both.  NP-side terms carry is_np flags inside the id tuples.
    """

    pairs: list = field(default_factory=list)
    single_tags: list = field(default_factory=list)
    tag_pairs: list = field(default_factory=list)
    direct: float = 0.0
    single_tag: float = 0.0
    tag_tag: float = 0.0

    @property
    def total(self) -> float:
        return self.direct + self.single_tag + self.tag_tag


def _front_weight(f: Front) -> float:
    if f.family == "Y":
        return 0.0
    return f.strength


def wave_strength_V(sol: FrontSolution, cfg) -> float:
    """Total strength: physical + non-physical + M-weighted reactant jumps."""
    total = 0.0
    for f in sol.fronts:
        if f.family == "Y":
            total += cfg.M * f.strength
        elif f.family == "J":
            total += f.strength
        else:
            total += f.strength
    return total


def approaching(a: Front, b: Front) -> bool:
    """Whether the pair (a left of b) will interact.

    Order 1 < {2, Y} < 3 for physical families; non-physical fronts are the
    fastest and approach anything physical ahead of them, except that
    Y-wave/NP pairs never count.
    """
    fa, fb = a.family, b.family
    if "J" in (fa, fb):
        return False
    if fa == "NP" and fb == "NP":
        return False
    if (fa == "NP" and fb == "Y") or (fa == "Y" and fb == "NP"):
        return False
    if fa == "NP":
        return True
    if fb == "NP":
        return False
    ra, rb = _RANK[fa], _RANK[fb]
    if ra > rb:
        return True
    if ra < rb:
        return False
    if fa in ("1", "3") and fa == fb:
        return a.kind == "shock" or b.kind == "shock"
    return False


def _coupled_y_sets(sol: FrontSolution):
    """For every non-Y front, the Y-fronts coupled to it.

    A Y-front is coupled to a front once they approach or have crossed
    (the registry records crossings), so coupling is unchanged through the
    crossing itself and the potential stays continuous there.
    """
    y_order = {}
    y_fronts = {}
    for f in sol.fronts:
        if f.family == "Y":
            y_order[f.id] = len(y_order)
            y_fronts[f.id] = f
    crossed = {}
    for y_id, events in sol.crossing_registry.items():
        if y_id not in y_fronts:
            continue
        for crosser_id, _ in events:
            crossed.setdefault(crosser_id, set()).add(y_id)
    coupled = {}
    for i, f in enumerate(sol.fronts):
        if f.family in ("Y", "J"):
            continue
        ids = set(crossed.get(f.id, ()))
        for j, g in enumerate(sol.fronts):
            if g.family != "Y" or g.id in ids:
                continue
            if j < i and approaching(g, f):
                ids.add(g.id)
            elif j > i and approaching(f, g):
                ids.add(g.id)
        coupled[f.id] = ids
    return coupled, y_fronts, y_order


def interaction_Q(sol: FrontSolution, cfg):
    """Interaction potential and its term ledger.

    Three term shapes: products of approaching front strengths, products
    of a front strength with the M-weighted strength of a coupled Y-front,
    and products of two M-weighted Y-strengths, the latter included
    exactly when some approaching pair couples to both reactant jumps.
    """
    ledger = QPairLedger()
    fronts = [f for f in sol.fronts if f.family not in ("Y", "J")]
    if len(sol.fronts) < 2:
        return 0.0, ledger
    coupled, y_fronts, y_order = _coupled_y_sets(sol)

    def mask_of(ids):
        m = 0
        for y in ids:
            m |= 1 << y_order[y]
        return m

    masks = {fid: mask_of(ids) for fid, ids in coupled.items()}
    weight_by_id = {f.id: _front_weight(f) for f in fronts}
    for fid, ids in coupled.items():
        w = weight_by_id.get(fid, 0.0)
        for y in ids:
            val = w * cfg.M * y_fronts[y].strength
            if val:
                ledger.single_tags.append((fid, y, val))
                ledger.single_tag += val

    mask_pairs = set()
    n = len(fronts)
    for i in range(n):
        a = fronts[i]
        wa = _front_weight(a)
        for j in range(i + 1, n):
            b = fronts[j]
            if not approaching(a, b):
                continue
            wb = _front_weight(b)
            direct = wa * wb
            if direct:
                ledger.pairs.append((a.id, b.id, direct))
                ledger.direct += direct
                ma, mb = masks.get(a.id, 0), masks.get(b.id, 0)
                if ma and mb:
                    mask_pairs.add((ma, mb))

    if mask_pairs:
        inv_order = {v: k for k, v in y_order.items()}
        seen = set()
        for ma, mb in mask_pairs:
            for i in _bits(ma):
                for j in _bits(mb):
                    if i != j:
                        seen.add((min(i, j), max(i, j)))
        for i, j in sorted(seen):
            da = y_fronts[inv_order[i]].strength
            db = y_fronts[inv_order[j]].strength
            val = cfg.M * da * cfg.M * db
            ledger.tag_pairs.append((inv_order[i], inv_order[j], val))
            ledger.tag_tag += val
    return ledger.total, ledger


def _bits(mask):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def glimm_F(sol: FrontSolution, cfg) -> float:
    q, _ = interaction_Q(sol, cfg)
    return wave_strength_V(sol, cfg) + cfg.C_glimm * q


# ---------------------------------------------------------------------------
# pointwise wave-curve coordinates between two snapshots
# ---------------------------------------------------------------------------


@dataclass
class QField:
    """Piecewise-constant q(x) and reactant gap on the merged partition."""

    breaks: np.ndarray       # merged breakpoints, length m
    q: np.ndarray            # (m+1, 3) signed wave-curve coordinates
    dy: np.ndarray           # (m+1,) Y1 - Y2 per piece
    states_u: list
    states_v: list


def q_field(solU: FrontSolution, solV: FrontSolution, params) -> QField:
    if abs(solU.time - solV.time) > 1e-12 * max(1.0, abs(solU.time)):
        raise ValidationError("snapshots must be at equal times")
    bu = solU.breakpoints()
    bv = solV.breakpoints()
    breaks = np.unique(np.array(bu + bv, dtype=float))
    su = solU.piece_states()
    sv = solV.piece_states()
    iu = np.searchsorted(np.array(bu, dtype=float), breaks, side="right")
    iv = np.searchsorted(np.array(bv, dtype=float), breaks, side="right")
    idx_u = np.concatenate([[0], iu])
    idx_v = np.concatenate([[0], iv])
    m = len(breaks)
    q = np.zeros((m + 1, 3))
    dy = np.zeros(m + 1)
    states_u, states_v = [], []
    cache = {}
    for p in range(m + 1):
        a = su[idx_u[p]]
        b = sv[idx_v[p]]
        states_u.append(a)
        states_v.append(b)
        dy[p] = a.Y - b.Y
        key = (id(a), id(b))
        if key not in cache:
            if a.gas_part() == b.gas_part():
                cache[key] = (0.0, 0.0, 0.0)
            else:
                cache[key] = decompose_q(a, b, params)
        q[p] = cache[key]
    return QField(breaks, q, dy, states_u, states_v)


def weight_B(t: float, y1_init_inf: float, y2_init_inf: float, eps: float,
             phi_lower: float, n_steps: int) -> float:
    """Tail sum of the decaying reaction budget over the truncated grid."""
    j0 = int(math.floor(t / eps + 1e-12)) + 1
    if j0 > n_steps:
        return 0.0
    r = math.exp(-phi_lower * eps)
    geo = (r**j0 - r ** (n_steps + 1)) / (1.0 - r)
    return (y1_init_inf + y2_init_inf) * eps * geo


def _gas_front_arrays(sol: FrontSolution):
    pos, fam, strength = [], [], []
    y_total = 0.0
    for f in sol.fronts:
        if f.family in ("1", "2", "3"):
            pos.append(f.position)
            fam.append(int(f.family))
            strength.append(f.strength)
        elif f.family == "Y":
            y_total += f.strength
    return (
        np.array(pos, dtype=float),
        np.array(fam, dtype=int),
        np.array(strength, dtype=float),
        y_total,
    )


class _SideSums:
    """Prefix machinery for the one-sided strength sums A_i."""

    def __init__(self, solU, solV, cfg):
        pu, fu, su, yu = _gas_front_arrays(solU)
        pv, fv, sv, yv = _gas_front_arrays(solV)
        self.cfg = cfg
        self.m_delta = cfg.M * (yu + yv)
        self.pos = np.concatenate([pu, pv])
        self.fam = np.concatenate([fu, fv])
        self.strength = np.concatenate([su, sv])
        self.which = np.concatenate([np.zeros(len(pu), int), np.ones(len(pv), int)])
        order = np.argsort(self.pos, kind="stable")
        self.pos = self.pos[order]
        self.fam = self.fam[order]
        self.strength = self.strength[order]
        self.which = self.which[order]
        # cumulative strengths by family and by (family, solution)
        self.cum = {}
        for k in (1, 2, 3):
            mask = self.fam == k
            self.cum[k] = np.cumsum(np.where(mask, self.strength, 0.0))
            for w in (0, 1):
                mask2 = mask & (self.which == w)
                self.cum[(k, w)] = np.cumsum(np.where(mask2, self.strength, 0.0))

    def _left_of(self, key, x):
        i = np.searchsorted(self.pos, x, side="left")
        c = self.cum[key]
        return float(c[i - 1]) if i > 0 else 0.0

    def _total(self, key):
        c = self.cum[key]
        return float(c[-1]) if len(c) else 0.0

    def a_weight(self, i: int, x: float, q_i: float) -> float:
        if i == 2:
            behind = self._left_of(3, x)
            ahead = self._total(1) - self._left_of(1, x)
            return behind + ahead + self.m_delta
        total = self.m_delta
        if i == 1:
            total += self._left_of(2, x) + self._left_of(3, x)
        else:  # i == 3
            total += (self._total(1) - self._left_of(1, x)) + (
                self._total(2) - self._left_of(2, x)
            )
        if q_i < 0.0:
            total += self._left_of((i, 0), x)
            total += self._total((i, 1)) - self._left_of((i, 1), x)
        else:
            total += self._left_of((i, 1), x)
            total += self._total((i, 0)) - self._left_of((i, 0), x)
        return total


def weight_A(i: int, x: float, solU: FrontSolution, solV: FrontSolution,
             q_at_x, cfg) -> float:
    """One-sided strength sum A_i at a point x away from front positions."""
    sums = _SideSums(solU, solV, cfg)
    q_i = q_at_x[i - 1] if i in (1, 3) else 0.0
    return sums.a_weight(i, x, q_i)


def lyapunov_phi(solU: FrontSolution, solV: FrontSolution, cfg,
                 y_init_norms=(0.0, 0.0), event: str = "free"):
    """Weighted wave-coordinate distance between two snapshots.

    Returns (Phi, FunctionalReport).  The snapshots must share their
    background states; the integral is exact over the merged partition.
    """
    if (
        solU.left_background.as_tuple() != solV.left_background.as_tuple()
        or solU.right_background.as_tuple() != solV.right_background.as_tuple()
    ):
        raise ValidationError("snapshots must share background states")
    params = cfg.gas
    fld = q_field(solU, solV, params)
    qu, ledger_u = interaction_Q(solU, cfg)
    qv, ledger_v = interaction_Q(solV, cfg)
    vu = wave_strength_V(solU, cfg)
    vv = wave_strength_V(solV, cfg)
    k1, k2, k3, k4 = cfg.kappa
    b_t = weight_B(solU.time, y_init_norms[0], y_init_norms[1], cfg.epsilon,
                   cfg.phi_lower, cfg.n_reaction_steps)
    base = 1.0 + k3 * (qu + qv) + k4 * b_t

    m = len(fld.breaks)
    phi = 0.0
    if m == 0:
        widths = np.array([])
    else:
        widths = np.diff(fld.breaks)
    sums = _SideSums(solU, solV, cfg)
    for p in range(m + 1):
        point_mass = sum(abs(fld.q[p])) + abs(fld.dy[p])
        if p == 0 or p == m:
            if point_mass > 1e-13:
                return math.inf, None
            continue
        if point_mass == 0.0:
            continue
        width = widths[p - 1]
        if width == 0.0:
            continue
        x = 0.5 * (fld.breaks[p - 1] + fld.breaks[p])
        contrib = 0.0
        for i in (1, 2, 3):
            w_i = base + k2 * sums.a_weight(i, x, fld.q[p][i - 1])
            contrib += (abs(fld.q[p][i - 1]) + k1 * abs(fld.dy[p])) * w_i
        phi += contrib * width

    report = FunctionalReport(
        time=solU.time,
        event=event,
        V_U=vu, Q_U=qu, F_U=vu + cfg.C_glimm * qu,
        V_V=vv, Q_V=qv, F_V=vv + cfg.C_glimm * qv,
        Phi=phi,
        L1=l1_distance(solU, solV),
        Yinf_U=solU.y_sup(),
        Yinf_V=solV.y_sup(),
    )
    return phi, report
