"""Analyses of global types and type configurations.

The centre piece is the inductive balancing check: a sound,
necessarily incomplete test that every message ever queued is also
read and that queue growth between recurrences of a type stays
harmless.  Supporting judgments: depth and boundedness of types,
weight of a message, readability and deep readability of queues, the
type-indexed queue equivalence, and the agreement between a type and
the queue growth it produces.

Balancing is undecidable (queue machines embed into it), so the main
entry points answer Accept, with a reusable derivation, or Unknown.
"""

from __future__ import annotations

from typing import Optional

from mpst.terms import (
    END,
    IN,
    OUT,
    GNode,
    Msg,
    Queue,
    bisimilar,
    players,
    reachable_nodes,
)

INF = float("inf")


# ---------------------------------------------------------------------------
# depth and boundedness


def _avoid_depth(node, p, memo, gray):
    # longest run of moves before p gets to move; INF when some
    # maximal path avoids p altogether
    if node.kind == END:
        return INF
    if node.player == p:
        return 0
    nid = id(node)
    if nid in memo:
        return memo[nid]
    if nid in gray:
        # a cycle avoiding p; everything on it has unbounded paths
        return INF
    gray.add(nid)
    val = 1 + max(_avoid_depth(c, p, memo, gray)
                  for c in node.branches.values())
    gray.discard(nid)
    memo[nid] = val
    return val


def depth(g: GNode, p: str):
    """How long p can be kept waiting in g; 0 when p plays no part."""
    if p not in players(g):
        return 0
    return 1 + _avoid_depth(g, p, {}, set())


def bounded_witness(g: GNode) -> Optional[dict]:
    """None when bounded, else a subterm and participant with
    infinite depth."""
    for sub in reachable_nodes(g):
        for p in sorted(players(sub)):
            if depth(sub, p) == INF:
                return {"participant": p, "subterm": sub}
    return None


def bounded(g: GNode) -> bool:
    """Every participant of every subterm waits boundedly long."""
    return bounded_witness(g) is None


# ---------------------------------------------------------------------------
# weight of a message


def _weight(node, msg, memo, gray):
    if node.kind == END:
        return INF
    if (node.kind == IN and (node.sender, node.receiver) == msg.channel
            and msg.label in node.branches):
        return 0
    nid = id(node)
    if nid in memo:
        return memo[nid]
    if nid in gray:
        return INF
    gray.add(nid)
    val = 1 + max(_weight(c, msg, memo, gray)
                  for c in node.branches.values())
    gray.discard(nid)
    memo[nid] = val
    return val


def weight(msg: Msg, g: GNode):
    """Longest wait until ``msg`` can be read; INF if some path never
    reads it."""
    return _weight(g, msg, {}, set())


# ---------------------------------------------------------------------------
# readability


def read(g: GNode, queue: Queue) -> bool:
    """Can every message of the queue be read on every path of g?

    An input choice whose channel head matches one of its labels
    consumes the head in all branches; other nodes pass the queue on
    unchanged.  The empty queue is always readable, a leftover at End
    never is.
    """
    memo = {}

    def go(node, q):
        if q.is_empty:
            return True
        if node.kind == END:
            return False
        key = (id(node), q.key())
        if key in memo:
            return memo[key]
        # a revisit with the same queue makes no progress
        memo[key] = False
        if node.kind == IN:
            chan = (node.sender, node.receiver)
            head = q.head(*chan)
            if head is not None and head in node.branches:
                _, rest = q.pop(*chan)
                res = all(go(c, rest) for c in node.branches.values())
            else:
                res = all(go(c, q) for c in node.branches.values())
        else:
            res = all(go(c, q) for c in node.branches.values())
        memo[key] = res
        return res

    return go(g, queue)


def dread(g: GNode, queue: Queue) -> bool:
    """Deep readability: the queue stays readable wherever g goes.

    The queue is carried unchanged into every branch until the type
    ends, which demands emptiness, or a type already seen recurs, at
    which point plain readability has to close the loop.
    """
    memo = {}

    def go(node, theta):
        if node.kind == END:
            return queue.is_empty
        key = (id(node), theta)
        if key in memo:
            return memo[key]
        memo[key] = False
        if id(node) in theta and read(node, queue):
            res = True
        else:
            grown = theta | {id(node)}
            res = all(go(c, grown) for c in node.branches.values())
        memo[key] = res
        return res

    return go(g, frozenset())


# ---------------------------------------------------------------------------
# type-indexed queue equivalence


class ChannelMismatch(ValueError):
    pass


def indistinguishable(m1: Msg, m2: Msg, g: GNode) -> bool:
    """Whether g reacts the same way to reading m1 or m2.

    Both labels must occur in g, and every input choice on their
    channel must either offer neither or offer both with bisimilar
    continuations.
    """
    if m1.channel != m2.channel:
        raise ChannelMismatch(f"{m1} and {m2} travel on different channels")
    occurring = {lab for n in reachable_nodes(g) for lab in n.branches}
    if m1.label not in occurring or m2.label not in occurring:
        return False
    for node in reachable_nodes(g):
        if node.kind != IN or (node.sender, node.receiver) != m1.channel:
            continue
        offered = {m1.label, m2.label} & set(node.branches)
        if not offered:
            continue
        if offered != {m1.label, m2.label}:
            return False
        if not bisimilar(node.branches[m1.label], node.branches[m2.label]):
            return False
    return True


def queue_equiv_g(q1: Queue, q2: Queue, g: GNode) -> bool:
    """Queue equivalence extended with replacement of messages that g
    cannot tell apart; per channel, positionwise."""
    if q1.channels() != q2.channels():
        return False
    for chan in q1.channels():
        lanes = zip(q1.labels(*chan), q2.labels(*chan))
        if len(q1.labels(*chan)) != len(q2.labels(*chan)):
            return False
        for a, b in lanes:
            if a == b:
                continue
            if not indistinguishable(Msg(chan[0], a, chan[1]),
                                     Msg(chan[0], b, chan[1]), g):
                return False
    return True


# ---------------------------------------------------------------------------
# agreement


def agree(g: GNode, queue: Queue, mod_g: bool = False) -> bool:
    """Messages in the queue can be exchanged with the outputs of g.

    At an output, the label appended behind the queue must be able to
    move to the front, up to the equivalence indexed by the branch
    continuation; the front message moves out of the way exactly when
    the continuation cannot distinguish the two.  ``mod_g`` lets the
    recurrence check match queues up to that same equivalence instead
    of equality.
    """

    def matches(node, q, hyps):
        for hnode, hq in hyps:
            if hnode is not node:
                continue
            if hq == q or (mod_g and queue_equiv_g(hq, q, node)):
                return True
        return False

    def go(node, q, hyps):
        if node.kind == END:
            return True
        if matches(node, q, hyps):
            return True
        grown = hyps + ((node, q),)
        if node.kind == IN:
            return all(go(c, q, grown) for c in node.branches.values())
        chan = (node.sender, node.receiver)
        for lab, child in node.branches.items():
            head = q.head(*chan)
            if head is None:
                qi = q
            else:
                if head != lab and not indistinguishable(
                        Msg(chan[0], head, chan[1]),
                        Msg(chan[0], lab, chan[1]), child):
                    return False
                _, rest = q.pop(*chan)
                qi = rest.push(chan[0], lab, chan[1])
            if not go(child, qi, grown):
                return False
        return True

    return go(g, queue, ())


# ---------------------------------------------------------------------------
# the ok judgment and inductive balancing


def split_suffix(prefix: Queue, whole: Queue) -> Optional[Queue]:
    """The suffix with ``whole = prefix . suffix``, channel by
    channel, or None when ``prefix`` is not a prefix of ``whole``."""
    lanes = {}
    for chan in prefix.channels():
        want = prefix.labels(*chan)
        have = whole.labels(*chan)
        if have[:len(want)] != want:
            return None
        lanes[chan] = have[len(want):]
    for chan in whole.channels():
        if chan not in lanes:
            lanes[chan] = whole.labels(*chan)
    return Queue(lanes)


def ok(g: GNode, hyp_queue: Queue, queue: Queue, weak: bool = False,
       mod_g: bool = False) -> Optional[Queue]:
    """Whether closing a loop from ``hyp_queue`` to ``queue`` is safe.

    The queue may only have grown by a suffix that agrees with g and,
    unless ``weak``, that is deeply readable while the old part stays
    readable.  Returns the suffix when all conditions hold.
    """
    suffix = split_suffix(hyp_queue, queue)
    if suffix is None:
        return None
    if not agree(g, suffix, mod_g):
        return None
    if not weak:
        if not dread(g, suffix):
            return None
        if not read(g, hyp_queue):
            return None
    return suffix


class Accept:
    """A successful balancing check with its derivation tree."""

    def __init__(self, derivation: dict):
        self.derivation = derivation

    def __repr__(self):
        return f"Accept({self.derivation['rule']})"


class Unknown:
    """The inductive check could not confirm balancing."""

    def __repr__(self):
        return "Unknown()"


def _inductive(g, queue, weak, max_revisits, mod_g):
    def go(node, q, hyps):
        if node.kind == END:
            if q.is_empty:
                return {"rule": "ib-End", "type": node, "queue": q}
            return None
        for hnode, hq in hyps:
            if hnode is not node:
                continue
            suffix = ok(node, hq, q, weak, mod_g)
            if suffix is not None:
                return {"rule": "ib-Cycle", "type": node, "queue": q,
                        "hypothesis_queue": hq, "suffix": suffix}
        expansions = sum(1 for hnode, _ in hyps if hnode is node)
        if expansions > max_revisits:
            return None
        grown = hyps + ((node, q),)
        if not weak and not read(node, q):
            return None
        if node.kind == OUT:
            chan = (node.sender, node.receiver)
            branches = {}
            for lab, child in node.branches.items():
                sub = go(child, q.push(chan[0], lab, chan[1]), grown)
                if sub is None:
                    return None
                branches[lab] = sub
            return {"rule": "ib-Out", "type": node, "queue": q,
                    "branches": branches}
        chan = (node.sender, node.receiver)
        head = q.head(*chan)
        if head is None or head not in node.branches:
            return None
        _, rest = q.pop(*chan)
        sub = go(node.branches[head], rest, grown)
        if sub is None:
            return None
        return {"rule": "ib-In", "type": node, "queue": q,
                "label": head, "branch": sub}

    derivation = go(g, queue, ())
    if derivation is None:
        return Unknown()
    return Accept(derivation)


def balanced_inductive(g: GNode, queue: Queue, max_revisits: int = 1,
                       mod_g: bool = False):
    """Sound check that the configuration is balanced.

    Loops close against an earlier visit of the same type when the
    queue grew by an agreeable, deeply readable suffix; a node may be
    unfolded past its first visit ``max_revisits`` times before the
    check gives up with Unknown.
    """
    return _inductive(g, queue, weak=False, max_revisits=max_revisits,
                      mod_g=mod_g)


def weakly_balanced_inductive(g: GNode, queue: Queue, max_revisits: int = 1,
                              mod_g: bool = False):
    """Like :func:`balanced_inductive` without the readability
    premises: messages may stay unread, growth must still agree."""
    return _inductive(g, queue, weak=True, max_revisits=max_revisits,
                      mod_g=mod_g)
