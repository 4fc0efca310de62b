"""Event-driven evolution of the homogeneous system (operator S).

Between collisions every front translates at its fixed speed.  Collisions
are resolved either accurately (exact Riemann solution between the outer
states, rarefactions split into fans of small jumps) or by the simplified
solver (outgoing fronts keep the incoming families and strengths, one
non-physical front at speed lambda_hat carries the residual).

Two auxiliary mechanisms keep the front list meaningful:

* raw "J" jumps from sampled initial data are resolved into elementary
  fans before any motion (the initial Riemann problems of front tracking);
* fronts whose side states have drifted off their wave curve (the reaction
  step shifts states pointwise) are re-resolved once the off-curve content
  exceeds a threshold, so reaction-created waves surface as real fronts.
"""

from __future__ import annotations

import heapq
import math

from .errors import CollisionCascade, ValidationError
from .fronts import Front, FrontSolution
from .gas import (
    GasState,
    curve_parameter,
    decompose_q,
    gas_norm,
    hugoniot_curve,
    lagrangian_sound_speed,
    pressure,
    solve_riemann,
    state_norm,
)

__all__ = ["next_collision", "resolve_interaction", "conservation_step", "resolve_pending"]


def _with_Y(s: GasState, y: float) -> GasState:
    return GasState(s.v, s.u, s.E, y)


def _front_speed(family, kind, left, right, params, fallback=0.0):
    """Propagation speed for a front with the given side states."""
    if family in ("2", "Y"):
        return 0.0
    if kind == "shock":
        dp = pressure(right, params) - pressure(left, params)
        dv = right.v - left.v
        s2 = -dp / dv if dv != 0.0 else -1.0
        if s2 > 0.0:
            s = math.sqrt(s2)
            return -s if family == "1" else s
        return fallback
    lam_l = lagrangian_sound_speed(left, params)
    lam_r = lagrangian_sound_speed(right, params)
    mean = 0.5 * (lam_l + lam_r)
    return -mean if family == "1" else mean


def _gas_front_strength(family, left, right, params):
    """Wave-curve parameter of the front's own family for its actual jump."""
    q = curve_parameter(int(family), left, pressure(right, params), params)
    return q


# ---------------------------------------------------------------------------
# fan conversion
# ---------------------------------------------------------------------------


def _fan_to_fronts(fan, x, alloc, cfg, params, generation_of, y_front_id=None,
                   contact_id=None):
    """Convert a WaveFan into fronts at position x.

    Rarefactions are split into jumps of wave-curve parameter <= delta_r.
    `generation_of(family)` supplies the generation for each family.
    Optional ids let a persisting Y-front or contact keep its identity.
    """
    out = []
    for w in fan.waves:
        if abs(w.speed_lo) >= cfg.lambda_hat or abs(w.speed_hi) >= cfg.lambda_hat:
            raise ValidationError(
                "wave speed reached lambda_hat; increase the NP speed in the config"
            )
        fam = str(w.family)
        if w.family == 2:
            mid = _with_Y(w.right, w.left.Y)
            if w.right.v != w.left.v:
                fid = contact_id if contact_id is not None else alloc()
                out.append(
                    Front(fid, "2", x, 0.0, w.left, mid, abs(w.q),
                          generation_of("2"), "contact")
                )
            else:
                mid = w.left
            if w.right.Y != w.left.Y:
                fid = y_front_id if y_front_id is not None else alloc()
                out.append(
                    Front(fid, "Y", x, 0.0, mid, w.right,
                          abs(w.right.Y - w.left.Y), generation_of("Y"), "ywave")
                )
            continue
        gen = generation_of(fam)
        if w.kind == "shock":
            out.append(
                Front(alloc(), fam, x, w.speed_lo, w.left, w.right, abs(w.q),
                      gen, "shock")
            )
            continue
        # rarefaction: split the parameter span into pieces <= delta_r
        m = max(1, math.ceil(w.q / cfg.delta_r))
        states = [w.left]
        for j in range(1, m):
            states.append(hugoniot_curve(w.family, w.q * j / m, w.left, params))
        states.append(w.right)
        lam = [lagrangian_sound_speed(s, params) for s in states]
        if w.family == 1:
            lam = [-v for v in lam]
        for j in range(m):
            out.append(
                Front(alloc(), fam, x, 0.5 * (lam[j] + lam[j + 1]), states[j],
                      states[j + 1], w.q / m, gen, "rarefaction")
            )
    # defensive ordering: clamp vanishing speed inversions from roundoff
    for i in range(1, len(out)):
        if out[i].speed < out[i - 1].speed:
            if out[i].speed < out[i - 1].speed - 1e-9:
                raise ValidationError("outgoing fan speeds out of order")
            out[i].speed = out[i - 1].speed
    return out


def _replay_front(f: Front, anchor: GasState, params) -> GasState:
    """Right state when the front's jump is re-applied at a new left state.

    Gas waves are rebuilt on their wave curve; everything else (contacts,
    reactant jumps, non-physical fronts) keeps its raw jump so that held
    off-curve content is not silently swept into the residual.
    """
    dy = f.right_state.Y - f.left_state.Y
    if f.family in ("1", "3"):
        s = hugoniot_curve(int(f.family), _signed_q(f, params), anchor, params)
        return _with_Y(s, anchor.Y + dy)
    if f.family == "Y":
        return _with_Y(anchor, anchor.Y + dy)
    return GasState(
        anchor.v + (f.right_state.v - f.left_state.v),
        anchor.u + (f.right_state.u - f.left_state.u),
        anchor.E + (f.right_state.E - f.left_state.E),
        anchor.Y + dy,
    )


def _signed_q(f: Front, params) -> float:
    if f.family in ("1", "3"):
        return _gas_front_strength(f.family, f.left_state, f.right_state, params)
    return f.strength


# ---------------------------------------------------------------------------
# interaction solvers
# ---------------------------------------------------------------------------


def _interaction_measure(incoming) -> float:
    best = 0.0
    for i, a in enumerate(incoming):
        for b in incoming[i + 1 :]:
            best = max(best, a.strength * b.strength)
    return best


def _max_generation(incoming) -> int:
    return max(f.generation for f in incoming)


def resolve_interaction(incoming, cfg, params, alloc=None, registry=None):
    """Outgoing fronts for a group of fronts meeting at one point.

    `incoming` is ordered left to right (pre-collision order).  Returns the
    outgoing fronts, ordered left to right; their positions are copied
    from the meeting point.  `alloc` allocates fresh ids; `registry`
    collects (y_front_id, crosser_id, strength) crossing records.
    """
    if len(incoming) < 2:
        raise ValidationError("an interaction needs at least two fronts")
    if alloc is None:
        counter = [max(f.id for f in incoming) + 1]

        def alloc():
            counter[0] += 1
            return counter[0]

    x = incoming[0].position
    U_L = incoming[0].left_state
    U_R = incoming[-1].right_state
    families = [f.family for f in incoming]
    max_gen = _max_generation(incoming)

    # transparent raw crossings: a single mover through a pure Y-front, or
    # a non-physical front through anything stationary or through a single
    # gas front (the NP carries bookkeeping error and exchanges no mass)
    movers = [f for f in incoming if f.speed != 0.0]
    if len(movers) == 1 and "J" not in families:
        mover = movers[0]
        rest = [f for f in incoming if f is not mover]
        transparent = (
            mover.family == "NP"
            or all(f.family == "Y" for f in rest)
        )
        if transparent:
            return _transparent_crossing(mover, rest, U_L, U_R, x, registry)
    if len(movers) == 2 and any(f.family == "NP" for f in movers) and all(
        f.family in ("NP", "1", "3") for f in movers
    ) and len(incoming) == 2:
        np_front = next(f for f in movers if f.family == "NP")
        other = next(f for f in movers if f is not np_front)
        return _transparent_crossing(np_front, [other], U_L, U_R, x, registry)

    simplified = (
        _interaction_measure(incoming) < cfg.rho or max_gen > cfg.generation_cap
    )
    can_simplify = all(f.family in ("1", "2", "3", "Y", "NP") for f in incoming)
    if simplified and can_simplify:
        return _simplified_interaction(incoming, U_L, U_R, x, cfg, params, alloc, registry)
    return _accurate_interaction(incoming, U_L, U_R, x, cfg, params, alloc, registry)


def _transparent_crossing(mover, rest, U_L, U_R, x, registry):
    """Raw pass-through: every front keeps its own state jump and identity.

    Exact for any mover over a pure Y-front (the gas ignores Y) and the
    bookkeeping convention for non-physical fronts, which exchange no mass
    with what they overtake.
    """
    incoming = sorted([mover] + rest, key=lambda f: (f.speed, f.tie_rank(), f.id))
    out = []
    state = U_L
    for k, f in enumerate(incoming):
        if k == len(incoming) - 1:
            right = U_R  # telescoping is exact up to summation order
        else:
            right = GasState(
                state.v + (f.right_state.v - f.left_state.v),
                state.u + (f.right_state.u - f.left_state.u),
                state.E + (f.right_state.E - f.left_state.E),
                state.Y + (f.right_state.Y - f.left_state.Y),
            )
        out.append(Front(f.id, f.family, x, f.speed, state, right, f.strength,
                         f.generation, f.kind))
        state = right
    if registry is not None and mover.family in ("1", "3", "NP"):
        for f in rest:
            if f.family == "Y":
                registry.append((f.id, mover.id, mover.strength))
    return out


def _post_collision_order(incoming):
    """Incoming fronts reordered as they separate after the collision."""
    rank = {"1": 0, "2": 1, "Y": 2, "3": 3, "NP": 4}
    return sorted(incoming, key=lambda f: (rank[f.family], f.speed))


def _simplified_interaction(incoming, U_L, U_R, x, cfg, params, alloc, registry):
    """Same outgoing families and strengths, one NP front for the residual."""
    order = _post_collision_order(incoming)
    # merge same-family genuinely nonlinear pairs into a single front
    merged = []
    for f in order:
        if merged and f.family in ("1", "3") and merged[-1][0] == f.family:
            merged[-1][1].append(f)
        else:
            merged.append([f.family, [f]])

    out = []
    state = U_L
    np_carry = None
    for fam, group in merged:
        if fam == "NP":
            np_carry = group  # re-emitted at the end, fastest
            continue
        if fam in ("1", "3"):
            q = sum(_signed_q(f, params) for f in group)
            dy = sum(f.right_state.Y - f.left_state.Y for f in group)
            right = _with_Y(hugoniot_curve(int(fam), q, state, params), state.Y + dy)
            kind = "shock" if q < 0 else "rarefaction"
            speed = _front_speed(fam, kind, state, right, params,
                                 fallback=group[0].speed)
            keep = max(group, key=lambda f: f.strength)
            out.append(Front(keep.id, fam, x, speed, state, right, abs(q),
                             keep.generation, kind))
        elif fam == "2":
            f = group[0]
            right = _replay_front(f, state, params)
            out.append(Front(f.id, "2", x, 0.0, state, right, f.strength,
                             f.generation, "contact"))
        else:  # Y
            f = group[0]
            right = _replay_front(f, state, params)
            out.append(Front(f.id, "Y", x, 0.0, state, right, f.strength,
                             f.generation, "ywave"))
        state = out[-1].right_state

    residual = state_norm(state, U_R)
    if residual > 1e-15 * max(1.0, abs(U_R.E)) or np_carry is not None:
        np_id = np_carry[0].id if np_carry else alloc()
        np_gen = np_carry[0].generation if np_carry else _max_generation(incoming) + 1
        out.append(Front(np_id, "NP", x, cfg.lambda_hat, state, U_R,
                         state_norm(state, U_R), np_gen, "np"))
    elif residual > 0.0:
        # absorb a vanishing mismatch into the last outgoing jump
        if out:
            last = out[-1]
            out[-1] = Front(last.id, last.family, x, last.speed, last.left_state,
                            U_R, last.strength, last.generation, last.kind)

    # register Y-front crossings
    if registry is not None:
        yf = next((f for f in incoming if f.family == "Y"), None)
        if yf is not None:
            for f in out:
                if f.family in ("1", "3", "NP") and f.id != yf.id:
                    registry.append((yf.id, f.id, f.strength))
    return out


def _accurate_interaction(incoming, U_L, U_R, x, cfg, params, alloc, registry):
    fan = solve_riemann(U_L, U_R, params)
    max_gen = _max_generation(incoming)
    in_families = {f.family for f in incoming}

    def generation_of(fam):
        return max_gen if fam in in_families else max_gen + 1

    y_id = next((f.id for f in incoming if f.family == "Y"), None)
    c_id = next((f.id for f in incoming if f.family == "2"), None)
    out = _fan_to_fronts(fan, x, alloc, cfg, params, generation_of,
                         y_front_id=y_id, contact_id=c_id)
    if registry is not None and y_id is not None:
        for f in out:
            if f.family in ("1", "3", "NP"):
                registry.append((y_id, f.id, f.strength))
    return out


# ---------------------------------------------------------------------------
# pending resolution (raw jumps and off-curve fronts)
# ---------------------------------------------------------------------------


def _off_curve_measure(group, params):
    """Cheap estimate of the non-elementary content of a co-located group."""
    U_L = group[0].left_state
    U_R = group[-1].right_state
    fams = [f.family for f in group]
    if "J" in fams:
        return math.inf
    if "NP" in fams:
        return 0.0  # NP fronts own their error budget
    if all(f in ("2", "Y") for f in fams):
        cand = hugoniot_curve(2, U_R.v - U_L.v, U_L, params)
        return gas_norm(cand, U_R)
    if len(group) == 1 and fams[0] in ("1", "3"):
        f = group[0]
        q = _gas_front_strength(f.family, U_L, U_R, params)
        cand = hugoniot_curve(int(f.family), q, U_L, params)
        return gas_norm(cand, U_R) + abs(U_R.Y - U_L.Y)
    return math.inf  # unexpected grouping: always resolve


def resolve_pending(sol: FrontSolution, cfg, params, event_cb=None) -> FrontSolution:
    """Resolve raw jumps and off-curve fronts into elementary fans.

    Raw "J" fronts are always replaced by their Riemann fan.  Other fronts
    (and co-located speed-zero stacks) are re-resolved when their off-curve
    content exceeds cfg.release_threshold.  Returns a new solution at the
    same time; idempotent on clean snapshots.
    """
    out = sol.copy()
    fronts = out.fronts
    groups = []
    i = 0
    while i < len(fronts):
        j = i + 1
        while j < len(fronts) and fronts[j].position == fronts[i].position and (
            fronts[j].speed == 0.0 and fronts[i].speed == 0.0
        ):
            j += 1
        groups.append((i, j))
        i = j

    new_fronts = []
    changed = False
    for i, j in groups:
        group = fronts[i:j]
        off = _off_curve_measure(group, params)
        if off <= cfg.release_threshold:
            new_fronts.extend(group)
            continue
        changed = True
        x = group[0].position
        U_L = group[0].left_state
        U_R = group[-1].right_state
        fan = solve_riemann(U_L, U_R, params)
        fams = {f.family for f in group}
        base_gen = max(f.generation for f in group)

        def generation_of(fam, fams=fams, base_gen=base_gen):
            if "J" in fams:
                return 0
            return base_gen if fam in fams else base_gen + 1

        y_id = next((f.id for f in group if f.family == "Y"), None)
        c_id = next((f.id for f in group if f.family == "2"), None)
        emitted = _fan_to_fronts(fan, x, out.allocate_id, cfg, params,
                                 generation_of, y_front_id=y_id, contact_id=c_id)
        new_fronts.extend(emitted)
        if event_cb is not None:
            event_cb("release", out.time, group, emitted)

    if not changed:
        return out
    out.fronts = new_fronts
    _rechain(out)
    return out


def _rechain(sol: FrontSolution):
    """Restore exact state continuity along the front list."""
    state = sol.left_background
    for f in sol.fronts:
        f.left_state = state
        state = f.right_state


# ---------------------------------------------------------------------------
# collision scheduling
# ---------------------------------------------------------------------------


class _Node:
    __slots__ = ("front", "A", "prev", "next", "version", "alive")

    def __init__(self, front, t_ref):
        self.front = front
        self.A = front.position - front.speed * t_ref
        self.prev = None
        self.next = None
        self.version = 0
        self.alive = True

    def pos(self, t):
        return self.A + self.front.speed * t


def _hit_time(a: _Node, b: _Node):
    ds = a.front.speed - b.front.speed
    if ds <= 0.0:
        return None
    return (b.A - a.A) / ds


def next_collision(sol: FrontSolution):
    """Earliest future meeting of adjacent fronts, or None.

    Returns (absolute time, [front ids]) for the earliest pairwise
    intersection; simultaneous parties at the same point are all listed.
    """
    fronts = sol.fronts
    best = None
    for a, b in zip(fronts, fronts[1:]):
        ds = a.speed - b.speed
        if ds <= 0.0:
            continue
        dt = (b.position - a.position) / ds
        if dt < 0.0:
            continue
        if best is None or dt < best[0]:
            best = (dt, [a.id, b.id])
    if best is None:
        return None
    return (sol.time + best[0], best[1])


def conservation_step(sol: FrontSolution, dt: float, cfg, params, event_cb=None) -> FrontSolution:
    """Advance the homogeneous evolution by dt, resolving collisions in order.

    Starts by resolving raw or off-curve jumps (the Riemann problems of the
    current piecewise-constant data), then runs the causal event loop.
    """
    if dt < 0.0:
        raise ValidationError("dt must be nonnegative")
    work = resolve_pending(sol, cfg, params, event_cb)
    if dt == 0.0:
        return work

    t0 = work.time
    t_end = t0 + dt
    nodes = [_Node(f, t0) for f in work.fronts]
    for i in range(len(nodes)):
        if i > 0:
            nodes[i].prev = nodes[i - 1]
        if i < len(nodes) - 1:
            nodes[i].next = nodes[i + 1]
    head = nodes[0] if nodes else None

    heap = []
    seq = 0

    def push_pair(a, b, t_now):
        nonlocal seq
        if a is None or b is None:
            return
        t = _hit_time(a, b)
        if t is None or t < t_now - 1e-13 or t > t_end:
            return
        seq += 1
        heapq.heappush(heap, (t, a.pos(t), seq, a, b, a.version, b.version))

    for a, b in zip(nodes, nodes[1:]):
        push_pair(a, b, t0)

    events = 0
    registry = []
    t_now = t0
    while heap:
        t, x, _, a, b, va, vb = heapq.heappop(heap)
        if not (a.alive and b.alive) or a.version != va or b.version != vb:
            continue
        if a.next is not b:
            continue
        t_now = max(t_now, t)
        events += 1
        if events > cfg.event_budget:
            raise CollisionCascade(f"event budget {cfg.event_budget} exceeded")

        postol = 1e-11 * max(1.0, abs(x))
        cluster = [a, b]
        n = a.prev
        while n is not None and abs(n.pos(t) - x) <= postol:
            cluster.insert(0, n)
            n = n.prev
        n = b.next
        while n is not None and abs(n.pos(t) - x) <= postol:
            cluster.append(n)
            n = n.next

        incoming = []
        for node in cluster:
            f = node.front
            incoming.append(
                Front(f.id, f.family, node.pos(t), f.speed, f.left_state,
                      f.right_state, f.strength, f.generation, f.kind)
            )
        outgoing = resolve_interaction(incoming, cfg, params, work.allocate_id, registry)
        if event_cb is not None:
            event_cb("interaction", t, incoming, outgoing)

        left_n = cluster[0].prev
        right_n = cluster[-1].next
        for node in cluster:
            node.alive = False
            node.version += 1
        new_nodes = []
        for f in outgoing:
            f.position = x
            node = _Node(f, 0.0)
            node.A = x - f.speed * t
            new_nodes.append(node)
        chain = ([left_n] if left_n else []) + new_nodes + ([right_n] if right_n else [])
        for u, v in zip(chain, chain[1:]):
            u.next = v
            v.prev = u
        if right_n is None and chain:
            chain[-1].next = None
        if left_n is None:
            head = new_nodes[0] if new_nodes else right_n
            if head is not None:
                head.prev = None
        if left_n is not None:
            left_n.version += 1
        if right_n is not None:
            right_n.version += 1
        if left_n is not None and new_nodes:
            push_pair(left_n, new_nodes[0], t)
            if left_n.prev is not None:
                push_pair(left_n.prev, left_n, t)
        if right_n is not None and new_nodes:
            push_pair(new_nodes[-1], right_n, t)
            if right_n.next is not None:
                push_pair(right_n, right_n.next, t)
        if left_n is not None and right_n is not None and not new_nodes:
            push_pair(left_n, right_n, t)
        for u, v in zip(new_nodes, new_nodes[1:]):
            push_pair(u, v, t)

    out_fronts = []
    node = head
    while node is not None:
        f = node.front
        f.position = node.pos(t_end)
        out_fronts.append(f)
        node = node.next

    result = FrontSolution(
        t_end,
        out_fronts,
        work.left_background,
        work.right_background,
        work.crossing_registry,
        work.next_id,
    )
    for y_id, f_id, s in registry:
        result.record_crossing(y_id, f_id, s)
    _rechain(result)
    return result
