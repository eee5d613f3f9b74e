"""Asynchronous execution of the protocol under a seeded adversarial scheduler.

The scheduler repeatedly draws one in-flight envelope uniformly at random
from the pool and delivers it, which realizes the fair-delivery assumption
(every sent message is eventually received) while exercising arbitrary
interleavings across seeds.  Byzantine nodes never run the protocol: they
inject scripted forgeries into the pool and silently drop whatever they
receive.  The run terminates when the pool is empty and all injections are
spent; the send-once discipline of the protocol bounds total traffic, so
termination is structural.

The transport records the true sender of every envelope (nodes know their
neighbors and cannot be impersonated), but scripted bodies may carry any
source, payload, or zone id.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

from .protocol import AuthMessage, StandardMessage, init_node, on_standard, try_exit
from .topology import Topology
from .zones import ZoneSet


@dataclass(frozen=True)
class ByzantineAction:
    """One scripted injection: broadcast ``body`` to all neighbors.

    ``at_step`` is the delivery count at which the envelopes join the pool
    (0 = before any delivery); ``repeat`` clones the broadcast.
    """

    body: object
    at_step: int = 0
    repeat: int = 1


@dataclass(frozen=True)
class ByzantineScript:
    node: int
    actions: tuple[ByzantineAction, ...]


@dataclass
class Trace:
    """Everything observable about one run."""

    seed: int
    byz: frozenset[int]
    truth: dict[int, object]           # source -> nominal payload (m0 for correct nodes)
    deliveries: list | None            # (frm, to, body) per step, None if not recorded
    accept_log: list                   # (step, node, s, m)
    final_states: list                 # NodeState per node, None at Byzantine positions
    std_sent: int = 0
    auth_sent: int = 0
    malformed: int = 0
    steps: int = 0


def run(topo: Topology, zs: ZoneSet, byz: Iterable[int] = (),
        scripts: Sequence[ByzantineScript] = (), seed: int = 0, *,
        payloads: Sequence | None = None, record_deliveries: bool = True) -> Trace:
    """Execute one full protocol run to quiescence and return its trace.

    ``payloads[p]`` is node p's broadcast value (default: its linear index;
    also used as the nominal truth for Byzantine sources when auditing).
    Identical inputs produce a bit-identical trace.
    """
    import random

    n = topo.n
    byz_set = frozenset(byz)
    for b in byz_set:
        if not (0 <= b < n):
            raise ValueError(f"unknown Byzantine node index {b}")
    for sc in scripts:
        if sc.node not in byz_set:
            raise ValueError(f"script attached to correct node {sc.node}")
    if payloads is None:
        payloads = range(n)
    truth = {p: payloads[p] for p in range(n)}

    nbrs = topo.neighbors
    n_zones = zs.n_ctr
    borders = zs.borders
    # force construction outside the loop (cached on the zone set afterwards)
    zs.edge_requirements

    pool: list = []
    std_sent = 0
    auth_sent = 0

    states: list = [None] * n
    for p in range(n):
        if p in byz_set:
            continue
        st, bodies = init_node(p, truth[p], zs.by_border[p])
        states[p] = st
        for body in bodies:
            if len(body) == 2:
                std_sent += len(nbrs[p])
            else:
                auth_sent += len(nbrs[p])
            for q in nbrs[p]:
                pool.append((p, q, body))

    # Scripted injections, ordered by (at_step, script order, action order).
    injections: list = []
    for sc in scripts:
        for act in sc.actions:
            if not isinstance(act.body, tuple) or len(act.body) not in (2, 3):
                raise ValueError("script bodies must be standard or authorization messages")
            if len(act.body) == 3 and not isinstance(act.body[2], int):
                raise ValueError("authorization zone ids are integers")
            for _ in range(max(1, act.repeat)):
                injections.append((act.at_step, len(injections), sc.node, act.body))
    injections.sort(key=lambda e: (e[0], e[1]))

    rng = random.Random(seed)
    rnd = rng.random
    log: list | None = [] if record_deliveries else None
    accept_log: list = []
    malformed = 0
    step = 0
    inj_i = 0
    n_inj = len(injections)

    while True:
        while inj_i < n_inj and injections[inj_i][0] <= step:
            _, _, frm, body = injections[inj_i]
            inj_i += 1
            if len(body) == 2:
                std_sent += len(nbrs[frm])
            else:
                auth_sent += len(nbrs[frm])
            for q in nbrs[frm]:
                pool.append((frm, q, body))
        npool = len(pool)
        if not npool:
            if inj_i < n_inj:
                step = injections[inj_i][0]
                continue
            break

        i = int(rnd() * npool)
        if i == npool:  # fp edge when rnd() rounds up
            i = npool - 1
        env = pool[i]
        last = pool.pop()
        if i < npool - 1:
            pool[i] = last
        if log is not None:
            log.append(env)
        frm, to, body = env
        st = states[to]
        if st is None:
            step += 1
            continue  # Byzantine receiver: drop silently

        if len(body) == 3:
            # DIFF, inlined for speed; tests pin this loop against a
            # reference runner that goes through protocol.on_auth only.
            z = body[2]
            if z < 0 or z >= n_zones:
                malformed += 1
                step += 1
                continue
            key = (body[0], body[1])
            held = st.auth.get(key)
            if held is not None and z in held:
                step += 1
                continue
            border = borders[z]
            if frm not in border:
                step += 1
                continue
            if held is None:
                st.auth[key] = {z}
            else:
                held.add(z)
            if to in border:
                to_nbrs = nbrs[to]
                auth_sent += len(to_nbrs)
                for q in to_nbrs:
                    pool.append((to, q, body))
                if key in st.wait:
                    _, out, accepted = try_exit(st, zs, focus=key)
                else:
                    step += 1
                    continue
            else:
                step += 1
                continue
        else:
            on_standard(st, body, frm)
            _, out, accepted = try_exit(st, zs, focus=body)
        if accepted:
            for k in accepted:
                accept_log.append((step, to, k[0], k[1]))
            to_nbrs = nbrs[to]
            deg = len(to_nbrs)
            for b2 in out:
                if len(b2) == 2:
                    std_sent += deg
                else:
                    auth_sent += deg
                for q in to_nbrs:
                    pool.append((to, q, b2))
        step += 1

    return Trace(seed=seed, byz=byz_set, truth=truth, deliveries=log,
                 accept_log=accept_log, final_states=states,
                 std_sent=std_sent, auth_sent=auth_sent,
                 malformed=malformed, steps=step)


def message_counts(trace: Trace) -> tuple[int, int]:
    """(standard, authorization) messages sent, counting one per envelope."""
    return trace.std_sent, trace.auth_sent


def check_safety(trace: Trace, claimed_safe: Iterable[int]) -> list:
    """Acceptances of false messages by nodes claimed safe.

    A message (s, m) is false when m differs from s's nominal payload
    (``trace.truth``); for Byzantine sources that nominal value is the
    configured one.  Returns (step, node, s, m) tuples, empty when the claim
    holds on this trace.
    """
    safe = set(claimed_safe)
    truth = trace.truth
    return [
        (step, node, s, m)
        for (step, node, s, m) in trace.accept_log
        if node in safe and truth.get(s) != m
    ]


def default_forging_scripts(topo: Topology, zs: ZoneSet, byz: Iterable[int],
                            rng) -> list[ByzantineScript]:
    """Standard adversary: each Byzantine node forges payloads for a random
    correct victim and for an adjacent correct victim, and backs each forgery
    with authorization messages for every zone whose border it sits on (the
    only zones where receivers would believe it)."""
    byz_set = frozenset(byz)
    correct = [p for p in range(topo.n) if p not in byz_set]
    scripts = []
    for b in sorted(byz_set):
        victims = []
        if correct:
            victims.append(rng.choice(correct))
        for q in topo.neighbors[b]:
            if q not in byz_set:
                if q not in victims:
                    victims.append(q)
                break
        actions = []
        for s in victims:
            fake = topo.n + s  # never equal to any nominal payload
            actions.append(ByzantineAction(StandardMessage(s, fake)))
            actions.extend(
                ByzantineAction(AuthMessage(s, fake, z)) for z in zs.by_border[b]
            )
        if actions:
            scripts.append(ByzantineScript(node=b, actions=tuple(actions)))
    return scripts


def export_trace(trace: Trace, topo: Topology, zs: ZoneSet, fp: IO[str]) -> None:
    """Write the trace as line-delimited JSON events.

    Delivery events carry step, from, to, kind (std/auth), s, m and -- for
    authorizations -- the structured zone key (or the raw id when a forged id
    does not resolve).  Acceptance events follow the delivery that caused
    them.  Requires a trace recorded with ``record_deliveries=True``.
    """
    if trace.deliveries is None:
        raise ValueError("trace was run without delivery recording")
    coord = topo.coord
    acc_by_step: dict[int, list] = {}
    for step, node, s, m in trace.accept_log:
        acc_by_step.setdefault(step, []).append((node, s, m))
    dumps = json.dumps
    for step, (frm, to, body) in enumerate(trace.deliveries):
        ev = {
            "step": step,
            "from": list(coord(frm)),
            "to": list(coord(to)),
            "kind": "std" if len(body) == 2 else "auth",
            "s": list(coord(body[0])) if 0 <= body[0] < topo.n else body[0],
            "m": body[1],
        }
        if len(body) == 3:
            z = body[2]
            ev["z"] = list(zs.zones[z].key) if isinstance(z, int) and 0 <= z < zs.n_ctr else z
        fp.write(dumps(ev, separators=(",", ":")) + "\n")
        for node, s, m in acc_by_step.get(step, ()):
            ev2 = {
                "step": step,
                "kind": "accept",
                "node": list(coord(node)),
                "s": list(coord(s)) if 0 <= s < topo.n else s,
                "m": m,
            }
            fp.write(dumps(ev2, separators=(",", ":")) + "\n")
