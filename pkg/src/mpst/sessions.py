"""Asynchronous session semantics.

A session is a network side by side with a queue.  Outputs append to
the queue and never block; inputs read the head of their channel and
block until it carries an expected label.  On top of single steps the
module offers a lockstep round, where every participant able to move
performs one communication, and a bounded liveness check over all
lockstep schedules.
"""

from __future__ import annotations

import enum
import itertools
import random
from dataclasses import dataclass
from typing import Iterable, Optional

from mpst.terms import Comm, IN, Network, OUT, Queue


class _Sentinel:
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name

    def __repr__(self):
        return self.name


NOT_ENABLED = _Sentinel("NOT_ENABLED")
NOT_LIVE = _Sentinel("NOT_LIVE")


class Classification(enum.Enum):
    LIVE = "live"
    TERMINATED = "terminated"
    DEADLOCKED = "deadlocked"


@dataclass(frozen=True)
class Session:
    net: Network
    queue: Queue

    def key(self):
        return (self.net.key(), self.queue.key())


# ---------------------------------------------------------------------------
# single steps


def step_session(session: Session, comm: Comm):
    """Perform one communication, or NOT_ENABLED."""
    player = comm.play
    proc = session.net.get(player)
    if proc.kind != comm.kind or comm.label not in proc.branches:
        return NOT_ENABLED
    cont = proc.branches[comm.label]
    if comm.kind == OUT:
        if proc.partner != comm.receiver:
            return NOT_ENABLED
        return Session(session.net.with_comp(player, cont),
                       session.queue.push(player, comm.label, comm.receiver))
    if proc.partner != comm.sender:
        return NOT_ENABLED
    if session.queue.head(comm.sender, player) != comm.label:
        return NOT_ENABLED
    _, rest = session.queue.pop(comm.sender, player)
    return Session(session.net.with_comp(player, cont), rest)


def enabled(session: Session) -> set:
    """All communications the session can do right now."""
    found = set()
    for name, proc in session.net.items():
        if proc.kind == OUT:
            for lab in proc.branches:
                found.add(Comm(OUT, name, proc.partner, lab))
        elif proc.kind == IN:
            head = session.queue.head(proc.partner, name)
            if head is not None and head in proc.branches:
                found.add(Comm(IN, proc.partner, name, head))
    return found


def classify(session: Session) -> Classification:
    if session.net.is_empty and session.queue.is_empty:
        return Classification.TERMINATED
    if enabled(session):
        return Classification.LIVE
    return Classification.DEADLOCKED


def deadlock_info(session: Session) -> dict:
    """What each blocked participant waits for and what sits unread."""
    blocked = {}
    for name, proc in session.net.items():
        if proc.kind == IN:
            head = session.queue.head(proc.partner, name)
            if head is None or head not in proc.branches:
                blocked[name] = {
                    "from": proc.partner,
                    "expects": sorted(proc.branches),
                    "head": head,
                }
    unread = [str(m) for m in session.queue.messages()]
    return {"blocked": blocked, "unread": unread}


# ---------------------------------------------------------------------------
# lockstep rounds


class ChoicePolicy:
    """Resolves which of several enabled communications to take."""

    def choose(self, options: list, player: Optional[str] = None) -> Comm:
        raise NotImplementedError


class MinLabelPolicy(ChoicePolicy):
    """Deterministic default: outputs first, then least label."""

    def choose(self, options, player=None):
        return min(options, key=lambda c: c.sort_key)


class RandomPolicy(ChoicePolicy):
    def __init__(self, seed: Optional[int] = None):
        self.rng = random.Random(seed)

    def choose(self, options, player=None):
        return self.rng.choice(sorted(options, key=lambda c: c.sort_key))


class ScriptMismatch(Exception):
    pass


class ScriptPolicy(ChoicePolicy):
    """Replays a fixed list of communications, in choice order."""

    def __init__(self, script: Iterable[Comm]):
        self.script = list(script)
        self.at = 0

    def choose(self, options, player=None):
        if self.at >= len(self.script):
            raise ScriptMismatch(f"script ended, still offered "
                                 f"{[str(o) for o in options]}")
        want = self.script[self.at]
        if want not in options:
            raise ScriptMismatch(
                f"script expects {want}, but the session offers "
                f"{[str(o) for o in options]}")
        self.at += 1
        return want


def _options_by_player(session: Session) -> dict:
    by_player = {}
    for comm in enabled(session):
        by_player.setdefault(comm.play, []).append(comm)
    return {p: sorted(cs, key=lambda c: c.sort_key)
            for p, cs in by_player.items()}


def lockstep(session: Session, policy: ChoicePolicy = None):
    """One round where every participant able to move moves once.

    Returns ``(delta, session)`` or NOT_LIVE when nobody can move.  The
    result does not depend on the application order: each chosen
    communication touches its own component, appends preserve other
    channels' heads, and each channel is read by one participant only.
    """
    policy = policy or MinLabelPolicy()
    options = _options_by_player(session)
    if not options:
        return NOT_LIVE
    chosen = []
    for player in sorted(options):
        chosen.append(policy.choose(options[player], player))
    current = session
    for comm in chosen:
        current = step_session(current, comm)
        assert current is not NOT_ENABLED, f"{comm} lost enabledness"
    return frozenset(chosen), current


@dataclass(frozen=True)
class TraceStep:
    step: int
    delta: frozenset
    session: Session


def simulate(session: Session, policy: ChoicePolicy = None,
             max_steps: int = 20, lockstep_rounds: bool = False):
    """Iterate until quiescence or ``max_steps``.

    By default one communication happens per step, chosen by the
    policy among everything enabled.  With ``lockstep_rounds`` each
    step is a whole round instead.
    """
    policy = policy or MinLabelPolicy()
    for index in range(max_steps):
        if lockstep_rounds:
            result = lockstep(session, policy)
            if result is NOT_LIVE:
                return
            delta, session = result
        else:
            options = sorted(enabled(session), key=lambda c: c.sort_key)
            if not options:
                return
            comm = policy.choose(options)
            session = step_session(session, comm)
            assert session is not NOT_ENABLED
            delta = frozenset({comm})
        yield TraceStep(index + 1, delta, session)


# ---------------------------------------------------------------------------
# liveness over all schedules


class LivenessMode(enum.Enum):
    # every participant stuck on an input is eventually served
    INPUT_ENABLING = "input-enabling"
    # every message in the queue is eventually read
    QUEUE_CONSUMING = "queue-consuming"


@dataclass(frozen=True)
class Verified:
    pass


@dataclass(frozen=True)
class CounterexampleTrace:
    trace: tuple


@dataclass(frozen=True)
class HorizonExceeded:
    horizon: int


def _cycle_ok(mode, sessions, deltas) -> bool:
    """Check the fairness obligations on one lasso cycle."""
    if mode is LivenessMode.INPUT_ENABLING:
        waiting = {name
                   for s in sessions
                   for name, proc in s.net.items() if proc.kind == IN}
        served = {c.play for d in deltas for c in d if c.kind == IN}
        return waiting <= served
    busy = {chan for s in sessions for chan in s.queue.channels()}
    read = {(c.sender, c.receiver)
            for d in deltas for c in d if c.kind == IN}
    return busy <= read


def _completion_ok(mode, session: Session) -> bool:
    if mode is LivenessMode.INPUT_ENABLING:
        return session.net.is_empty
    return session.queue.is_empty


def check_liveness(session: Session, horizon: int = 50,
                   mode: LivenessMode = LivenessMode.INPUT_ENABLING):
    """Explore every lockstep schedule up to ``horizon`` rounds.

    A schedule either completes, closes a lasso whose cycle is checked
    for the mode's obligations, or runs past the horizon.  Any failed
    obligation yields the offending trace; otherwise the result is
    Verified, weakened to HorizonExceeded if some schedule was cut off.
    """
    truncated = False

    def walk(path_sessions, path_deltas):
        nonlocal truncated
        current = path_sessions[-1]
        options = _options_by_player(current)
        if not options:
            if _completion_ok(mode, current):
                return None
            return tuple(zip(path_deltas, path_sessions[1:]))
        if len(path_deltas) >= horizon:
            truncated = True
            return None
        players = sorted(options)
        for combo in itertools.product(*(options[p] for p in players)):
            delta = frozenset(combo)
            nxt = current
            for comm in combo:
                nxt = step_session(nxt, comm)
            if nxt in path_sessions:
                at = path_sessions.index(nxt)
                cycle_sessions = path_sessions[at:]
                cycle_deltas = path_deltas[at:] + [delta]
                if not _cycle_ok(mode, cycle_sessions, cycle_deltas):
                    return tuple(zip(path_deltas + [delta],
                                     path_sessions[1:] + [nxt]))
                continue
            bad = walk(path_sessions + [nxt], path_deltas + [delta])
            if bad is not None:
                return bad
        return None

    bad = walk([session], [])
    if bad is not None:
        return CounterexampleTrace(bad)
    if truncated:
        return HorizonExceeded(horizon)
    return Verified()
