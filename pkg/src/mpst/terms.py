"""Regular term graphs for global types and process types.

Types with recursion are represented as (possibly cyclic) graphs of
nodes.  A node is either ``end`` or a choice carrying a branch map from
labels to child nodes; the branch map may be filled in after
construction, which is how back edges are tied.  Once a graph has been
hashed or compared it must not be mutated further.

Equality of types is bisimilarity.  Every node can produce a canonical
key via partition refinement of its reachable subgraph; two nodes are
bisimilar exactly when their keys coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

END = "end"
OUT = "out"
IN = "in"


# ---------------------------------------------------------------------------
# nodes


class GNode:
    """A node of a global type.

    ``out`` is an output choice ``p q ! {l_i; G_i}``, ``in`` an input
    choice ``p q ? {l_i; G_i}``; in both cases ``sender`` is p and
    ``receiver`` is q.  The participant moving first is the sender of
    an output and the receiver of an input.
    """

    __slots__ = ("kind", "sender", "receiver", "branches", "_key")

    def __init__(self, kind: str, sender: Optional[str] = None,
                 receiver: Optional[str] = None,
                 branches: Optional[dict] = None):
        if kind not in (END, OUT, IN):
            raise ValueError(f"unknown node kind {kind!r}")
        if kind != END:
            if not sender or not receiver:
                raise ValueError("choice nodes need a sender and a receiver")
            if sender == receiver:
                raise ValueError(f"self-communication {sender!r} -> {receiver!r}")
        self.kind = kind
        self.sender = sender
        self.receiver = receiver
        self.branches = {} if branches is None else dict(branches)
        self._key = None

    @property
    def player(self) -> Optional[str]:
        """The participant that moves at this node."""
        if self.kind == OUT:
            return self.sender
        if self.kind == IN:
            return self.receiver
        return None

    def _local_sig(self):
        if self.kind == END:
            return ("g", END)
        return ("g", self.kind, self.sender, self.receiver,
                tuple(sorted(self.branches)))

    def _bare_clone(self) -> "GNode":
        return GNode(self.kind, self.sender, self.receiver)

    def key(self):
        if self._key is None:
            self._key = _canonical_key(self)
        return self._key

    def __repr__(self):
        if self.kind == END:
            return "<G end>"
        mark = "!" if self.kind == OUT else "?"
        labs = ",".join(sorted(self.branches))
        return f"<G {self.sender}{self.receiver}{mark}{{{labs}}}>"


class PNode:
    """A node of a process type: ``end``, ``partner ! choice`` or
    ``partner ? choice``."""

    __slots__ = ("kind", "partner", "branches", "_key")

    def __init__(self, kind: str, partner: Optional[str] = None,
                 branches: Optional[dict] = None):
        if kind not in (END, OUT, IN):
            raise ValueError(f"unknown node kind {kind!r}")
        if kind != END and not partner:
            raise ValueError("choice nodes need a partner")
        self.kind = kind
        self.partner = partner
        self.branches = {} if branches is None else dict(branches)
        self._key = None

    def _local_sig(self):
        if self.kind == END:
            return ("p", END)
        return ("p", self.kind, self.partner, tuple(sorted(self.branches)))

    def _bare_clone(self) -> "PNode":
        return PNode(self.kind, self.partner)

    def key(self):
        if self._key is None:
            self._key = _canonical_key(self)
        return self._key

    def __repr__(self):
        if self.kind == END:
            return "<P end>"
        mark = "!" if self.kind == OUT else "?"
        labs = ",".join(sorted(self.branches))
        return f"<P {self.partner}{mark}{{{labs}}}>"


def gend() -> GNode:
    return GNode(END)


def gout(sender: str, receiver: str, branches: Optional[dict] = None) -> GNode:
    return GNode(OUT, sender, receiver, branches)


def gin(sender: str, receiver: str, branches: Optional[dict] = None) -> GNode:
    return GNode(IN, sender, receiver, branches)


def pend() -> PNode:
    return PNode(END)


def pout(partner: str, branches: Optional[dict] = None) -> PNode:
    return PNode(OUT, partner, branches)


def pin(partner: str, branches: Optional[dict] = None) -> PNode:
    return PNode(IN, partner, branches)


# ---------------------------------------------------------------------------
# bisimilarity


def reachable_nodes(root) -> list:
    """All nodes reachable from ``root``, root first, in a fixed order."""
    seen = {}
    stack = [root]
    while stack:
        node = stack.pop()
        if id(node) in seen:
            continue
        seen[id(node)] = node
        for lab in sorted(node.branches, reverse=True):
            stack.append(node.branches[lab])
    return list(seen.values())


def _refine(nodes: list) -> dict:
    """Partition refinement; returns a map id(node) -> block index.

    Two nodes land in the same block exactly when they are bisimilar.
    """
    sigs = {}
    for n in nodes:
        sigs[id(n)] = n._local_sig()
    index = {}
    block = {}
    for n in nodes:
        block[id(n)] = index.setdefault(sigs[id(n)], len(index))
    while True:
        index = {}
        nxt = {}
        for n in nodes:
            sig = (block[id(n)],
                   tuple((lab, block[id(n.branches[lab])])
                         for lab in sorted(n.branches)))
            nxt[id(n)] = index.setdefault(sig, len(index))
        if nxt == block:
            return block
        block = nxt


def _canonical_key(root):
    nodes = reachable_nodes(root)
    block = _refine(nodes)
    rep = {}
    for n in nodes:
        rep.setdefault(block[id(n)], n)
    # number the blocks by a depth-first walk of the quotient graph,
    # taking branches in label order, so the key only depends on the
    # graph up to bisimilarity
    number = {}
    order = []
    stack = [block[id(root)]]
    while stack:
        b = stack.pop()
        if b in number:
            continue
        number[b] = len(number)
        order.append(b)
        n = rep[b]
        for lab in sorted(n.branches, reverse=True):
            stack.append(block[id(n.branches[lab])])
    entries = []
    for b in order:
        n = rep[b]
        entries.append((n._local_sig(),
                        tuple((lab, number[block[id(n.branches[lab])]])
                              for lab in sorted(n.branches))))
    return tuple(entries)


def bisimilar(a, b) -> bool:
    return a.key() == b.key()


def minimize(root):
    """The quotient of ``root`` by bisimilarity, as a fresh graph."""
    nodes = reachable_nodes(root)
    block = _refine(nodes)
    rep = {}
    for n in nodes:
        rep.setdefault(block[id(n)], n)
    fresh = {b: n._bare_clone() for b, n in rep.items()}
    for b, n in rep.items():
        for lab, child in n.branches.items():
            fresh[b].branches[lab] = fresh[block[id(child)]]
    return fresh[block[id(root)]]


def subterms(root) -> list:
    """One representative per bisimilarity class of subterm of ``root``."""
    nodes = reachable_nodes(root)
    block = _refine(nodes)
    picked = {}
    for n in nodes:
        picked.setdefault(block[id(n)], n)
    return list(picked.values())


def players(g: GNode) -> set:
    """Participants taking part in some communication of ``g``."""
    return {n.player for n in reachable_nodes(g) if n.kind != END}


# ---------------------------------------------------------------------------
# communications and messages


@dataclass(frozen=True)
class Comm:
    """A single communication: output ``p->q!l`` or input ``p->q?l``."""

    kind: str
    sender: str
    receiver: str
    label: str

    @property
    def play(self) -> str:
        """The participant performing this communication."""
        return self.sender if self.kind == OUT else self.receiver

    @property
    def sort_key(self):
        # outputs before inputs, then by label and channel; used as the
        # default tie-break when simulating
        return (0 if self.kind == OUT else 1, self.label,
                self.sender, self.receiver)

    def __str__(self):
        mark = "!" if self.kind == OUT else "?"
        return f"{self.sender}->{self.receiver}{mark}{self.label}"

    @classmethod
    def parse(cls, text: str) -> "Comm":
        for mark, kind in (("!", OUT), ("?", IN)):
            if mark in text:
                chan, _, label = text.partition(mark)
                sender, arrow, receiver = chan.partition("->")
                if arrow and sender and receiver and label:
                    return cls(kind, sender.strip(), receiver.strip(),
                               label.strip())
        raise ValueError(f"cannot parse communication {text!r}")


@dataclass(frozen=True)
class Msg:
    """A message ``sender->receiver:label`` travelling in a queue."""

    sender: str
    label: str
    receiver: str

    @property
    def channel(self):
        return (self.sender, self.receiver)

    def __str__(self):
        return f"{self.sender}->{self.receiver}:{self.label}"


def comms(g: GNode) -> set:
    """The communications occurring syntactically in ``g``."""
    out = set()
    for n in reachable_nodes(g):
        if n.kind == END:
            continue
        for lab in n.branches:
            out.add(Comm(n.kind, n.sender, n.receiver, lab))
    return out


# ---------------------------------------------------------------------------
# queues


class Queue:
    """An immutable message queue, one FIFO lane per ordered channel.

    Equality and hashing see queues up to the structural equivalence:
    messages on different channels commute and empty lanes are
    invisible, so two queues are equal exactly when every channel
    carries the same label sequence.
    """

    __slots__ = ("_chans",)

    def __init__(self, chans: Optional[dict] = None):
        lanes = {}
        if chans:
            for chan, labels in chans.items():
                labels = tuple(labels)
                if labels:
                    lanes[chan] = labels
        self._chans = lanes

    @classmethod
    def from_msgs(cls, msgs: Iterable[Msg]) -> "Queue":
        lanes = {}
        for m in msgs:
            lanes.setdefault(m.channel, []).append(m.label)
        return cls(lanes)

    @property
    def is_empty(self) -> bool:
        return not self._chans

    def labels(self, sender: str, receiver: str) -> tuple:
        return self._chans.get((sender, receiver), ())

    def channels(self) -> list:
        return sorted(self._chans)

    def head(self, sender: str, receiver: str) -> Optional[str]:
        lane = self._chans.get((sender, receiver))
        return lane[0] if lane else None

    def push(self, sender: str, label: str, receiver: str) -> "Queue":
        lanes = dict(self._chans)
        lanes[(sender, receiver)] = lanes.get((sender, receiver), ()) + (label,)
        return Queue(lanes)

    def push_front(self, sender: str, label: str, receiver: str) -> "Queue":
        lanes = dict(self._chans)
        lanes[(sender, receiver)] = (label,) + lanes.get((sender, receiver), ())
        return Queue(lanes)

    def pop(self, sender: str, receiver: str):
        """Remove the head of a channel; returns ``(label, rest)``."""
        lane = self._chans.get((sender, receiver))
        if not lane:
            raise LookupError(f"empty channel {sender}->{receiver}")
        lanes = dict(self._chans)
        lanes[(sender, receiver)] = lane[1:]
        return lane[0], Queue(lanes)

    def pop_last(self, sender: str, receiver: str):
        """Remove the last message of a channel; returns ``(label, rest)``."""
        lane = self._chans.get((sender, receiver))
        if not lane:
            raise LookupError(f"empty channel {sender}->{receiver}")
        lanes = dict(self._chans)
        lanes[(sender, receiver)] = lane[:-1]
        return lane[-1], Queue(lanes)

    def messages(self) -> list:
        """All messages, channels in sorted order, FIFO within each."""
        out = []
        for chan in sorted(self._chans):
            for lab in self._chans[chan]:
                out.append(Msg(chan[0], lab, chan[1]))
        return out

    def key(self):
        return tuple(sorted(self._chans.items()))

    def __len__(self):
        return sum(len(v) for v in self._chans.values())

    def __eq__(self, other):
        return isinstance(other, Queue) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        inner = ", ".join(str(m) for m in self.messages())
        return f"[{inner}]"


# ---------------------------------------------------------------------------
# networks


class Network:
    """A finite map from participants to process types.

    Terminated components are dropped, so a network equals the empty
    one exactly when every participant has ended.
    """

    __slots__ = ("_procs",)

    def __init__(self, procs: Optional[dict] = None):
        kept = {}
        if procs:
            for name, proc in procs.items():
                if proc.kind != END:
                    kept[name] = proc
        self._procs = kept

    @property
    def is_empty(self) -> bool:
        return not self._procs

    def players(self) -> set:
        return set(self._procs)

    def get(self, name: str) -> PNode:
        proc = self._procs.get(name)
        return proc if proc is not None else pend()

    def items(self) -> Iterator:
        return iter(sorted(self._procs.items()))

    def with_comp(self, name: str, proc: PNode) -> "Network":
        procs = dict(self._procs)
        procs[name] = proc
        return Network(procs)

    def without(self, name: str) -> "Network":
        procs = dict(self._procs)
        procs.pop(name, None)
        return Network(procs)

    def key(self):
        return tuple(sorted((name, proc.key())
                            for name, proc in self._procs.items()))

    def __contains__(self, name):
        return name in self._procs

    def __len__(self):
        return len(self._procs)

    def __eq__(self, other):
        return isinstance(other, Network) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        inner = " | ".join(f"{name}:{proc!r}" for name, proc in self.items())
        return f"<Net {inner or 'end'}>"
