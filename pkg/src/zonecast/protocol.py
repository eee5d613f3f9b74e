"""Per-node state machine for the control-zone broadcast protocol.

Four phases, all local to one node:

* INIT   -- broadcast the node's own payload, plus authorizations for every
            zone whose border the node sits on.
* ENTER  -- a received standard message (s, m) parks in ``wait`` until the
            required authorizations arrive (or is ignored if already accepted).
* DIFF   -- a received authorization (s, m, z) is stored when its sender is a
            border member of z, and relayed onward by border members of z.
* EXIT   -- a waiting (s, m) relayed by neighbor q is accepted once every zone
            that has q in its core and p on its border (and does not contain
            the source s in its core) has delivered its authorization.

Transition functions update the given NodeState in place and return it
together with the message bodies to broadcast to *all* neighbors; fanning
bodies out into per-edge envelopes is the simulator's job.  Given the same
delivery sequence they reproduce identical states, which is what the replay
and determinism tests pin down.

A node emits each standard message at most once (single acceptance) and each
authorization at most once per (s, m, z): every send records the
authorization in ``auth`` first, and both DIFF and EXIT consult it before
sending.  This is what bounds total traffic and guarantees quiescence.
Authorizations are relayed only by border members of the zone; receivers
ignore authorizations arriving from non-members, so wider relaying could
never change any node's state, it would only inflate traffic past the
order-W message budget.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, NamedTuple

from .zones import ZoneSet

Payload = Any

_NOTHING: tuple = ()


class StandardMessage(NamedTuple):
    """Claim that source s initially broadcast payload m."""

    s: int
    m: Payload


class AuthMessage(NamedTuple):
    """Authorization for (s, m) to exit the core of zone z."""

    s: int
    m: Payload
    z: int


Body = "StandardMessage | AuthMessage"


@dataclass(slots=True)
class NodeState:
    """Protocol state owned by one correct node.

    ``wait`` and ``auth`` are indexed by the (s, m) pair: ``wait[(s, m)]`` is
    the set of neighbors that relayed the still-unaccepted message (the
    (s, m, q) triples of the wait set), ``auth[(s, m)]`` the set of zone ids
    whose authorization has been stored.  ``acc`` holds accepted (s, m) pairs.
    """

    p: int
    m0: Payload
    my_ctr: tuple[int, ...]
    wait: dict[tuple, set[int]] = field(default_factory=dict)
    auth: dict[tuple, set[int]] = field(default_factory=dict)
    acc: set[tuple] = field(default_factory=set)

    def has_auth(self, s: int, m: Payload, z: int) -> bool:
        zones = self.auth.get((s, m))
        return zones is not None and z in zones

    def auth_triples(self) -> set[tuple]:
        return {(s, m, z) for (s, m), zones in self.auth.items() for z in zones}

    def wait_triples(self) -> set[tuple]:
        return {(s, m, q) for (s, m), senders in self.wait.items() for q in senders}


def init_node(p: int, m0: Payload, my_ctr) -> tuple[NodeState, list]:
    """INIT: accept own payload, emit it plus one authorization per own zone."""
    ctr = tuple(sorted(my_ctr))
    own = StandardMessage(p, m0)
    state = NodeState(p=p, m0=m0, my_ctr=ctr, acc={own})
    out: list = [own]
    if ctr:
        state.auth[own] = set(ctr)
        out.extend(AuthMessage(p, m0, z) for z in ctr)
    return state, out


def on_standard(state: NodeState, msg: StandardMessage, q: int) -> NodeState:
    """ENTER: ignore already-accepted messages, otherwise park (s, m, q) in wait."""
    if msg not in state.acc:
        senders = state.wait.get(msg)
        if senders is None:
            state.wait[msg] = {q}
        else:
            senders.add(q)
    return state


def on_auth(state: NodeState, msg: AuthMessage, q: int, zs: ZoneSet) -> tuple[NodeState, tuple]:
    """DIFF: store a fresh authorization from a border member of its zone.

    Returns the bodies to broadcast: the same authorization when this node is
    itself on the zone's border, nothing otherwise.
    """
    s, m, z = msg
    zones = state.auth.get((s, m))
    if zones is not None and z in zones:
        return state, _NOTHING
    border = zs.borders[z]
    if q not in border:
        return state, _NOTHING
    if zones is None:
        state.auth[(s, m)] = {z}
    else:
        zones.add(z)
    if state.p in border:
        return state, (msg,)
    return state, _NOTHING


def _exit_ready(state: NodeState, zs: ZoneSet, key: tuple, senders: set[int]) -> bool:
    ereq = zs.edge_requirements
    cores = zs.cores
    held = state.auth.get(key)
    s = key[0]
    p = state.p
    for q in senders:
        gating = ereq.get((p, q))
        if not gating:
            return True
        for z in gating:
            if (held is None or z not in held) and s not in cores[z]:
                break
        else:
            return True
    return False


def _accept(state: NodeState, key: tuple, out: list) -> None:
    state.acc.add(key)
    del state.wait[key]
    s, m = key
    out.append(StandardMessage(s, m))
    if state.my_ctr:
        held = state.auth.get(key)
        if held is None:
            held = state.auth[key] = set()
        for z in state.my_ctr:
            if z not in held:
                held.add(z)
                out.append(AuthMessage(s, m, z))


def try_exit(state: NodeState, zs: ZoneSet, focus: tuple | None = None
             ) -> tuple[NodeState, list, list]:
    """EXIT: accept every waiting message whose authorization condition holds.

    With ``focus=(s, m)`` only that pair is re-evaluated -- sufficient after a
    single ENTER/DIFF step, because accepting one pair never changes the exit
    condition of another (it depends only on ``auth`` entries of the same
    pair).  Without focus, scans all waiting pairs to a fixpoint.

    Returns (state, bodies to broadcast, newly accepted pairs).  Acceptance
    emits the standard message once plus any not-yet-sent authorizations for
    the node's own zones.
    """
    out: list = []
    accepted: list = []
    if focus is not None:
        senders = state.wait.get(focus)
        if senders is not None and _exit_ready(state, zs, focus, senders):
            _accept(state, focus, out)
            accepted.append(focus)
        return state, out, accepted
    changed = True
    while changed:
        changed = False
        for key in list(state.wait):
            senders = state.wait[key]
            if _exit_ready(state, zs, key, senders):
                _accept(state, key, out)
                accepted.append(key)
                changed = True
    return state, out, accepted
