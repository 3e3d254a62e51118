"""Executes a program's behaviour against a service family.

Each step performs the current node's action on the service named by its
focus and follows the branch the reply selects.  Termination yields the
delivered boolean and the final family.  Divergence is reported only
when proven: deadlock, a missing focus, a Divergent reply, or a repeated
(node, family-state) configuration.  Loops that keep growing the state
exhaust their fuel instead; the evaluator never claims a divergence it
cannot prove.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Union

from .program import Program
from .services import (
    Reply,
    ServiceFamily,
    empty_family,
    family_key,
    format_family,
    service_step,
)
from .threads import DEADLOCK, PostCond, RegularThread, StopFalse, StopTrue, Tau, extract

DEFAULT_FUEL = 10**6


class DivergenceCause(enum.Enum):
    DEADLOCK = "deadlock"
    MISSING_FOCUS = "missing-focus"
    REPLY_D = "reply-d"
    CYCLE = "cycle"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Converged:
    reply: bool
    family: ServiceFamily
    steps: int


@dataclass(frozen=True)
class ProvenDivergent:
    cause: DivergenceCause
    steps: int


@dataclass(frozen=True)
class FuelExhausted:
    steps: int


Outcome = Union[Converged, ProvenDivergent, FuelExhausted]


def _as_thread(x: Program | RegularThread) -> RegularThread:
    return x if isinstance(x, RegularThread) else extract(x)


def run(
    x: Program | RegularThread,
    family: ServiceFamily,
    fuel: int = DEFAULT_FUEL,
    trace: list[str] | None = None,
) -> Outcome:
    """Small-step execution; deterministic and monotone in fuel."""
    if fuel < 1:
        raise ValueError("fuel must be at least 1")
    thread = _as_thread(x)
    entries = dict(family.entries)
    current = thread.root
    steps = 0
    seen: set = set()
    while True:
        node = thread.nodes[current]
        if isinstance(node, StopTrue):
            return Converged(True, ServiceFamily(entries), steps)
        if isinstance(node, StopFalse):
            return Converged(False, ServiceFamily(entries), steps)
        if not isinstance(node, PostCond):
            return ProvenDivergent(DivergenceCause.DEADLOCK, steps)
        configuration = (current, family_key(entries))
        if configuration in seen:
            return ProvenDivergent(DivergenceCause.CYCLE, steps)
        if steps >= fuel:
            return FuelExhausted(steps)
        seen.add(configuration)
        if isinstance(node.action, Tau):
            steps += 1
            if trace is not None:
                trace.append(
                    f"pc={current} action=tau reply=T state={format_family(entries)}"
                )
            current = node.then_ref
            continue
        focus = node.action.focus
        service = entries.get(focus)
        if service is None:
            return ProvenDivergent(DivergenceCause.MISSING_FOCUS, steps)
        reply, successor = service_step(service, node.action.method)
        if reply is Reply.DIVERGENT:
            return ProvenDivergent(DivergenceCause.REPLY_D, steps)
        entries[focus] = successor
        steps += 1
        if trace is not None:
            trace.append(
                f"pc={current} action={node.action} reply={reply} state={format_family(entries)}"
            )
        current = node.then_ref if reply is Reply.TRUE else node.else_ref


def reply(
    x: Program | RegularThread, family: ServiceFamily, fuel: int = DEFAULT_FUEL
) -> Reply | None:
    """Boolean delivered at termination, Divergent on proven divergence,
    None when the fuel ran out first."""
    outcome = run(x, family, fuel)
    if isinstance(outcome, Converged):
        return Reply.from_bool(outcome.reply)
    if isinstance(outcome, ProvenDivergent):
        return Reply.DIVERGENT
    return None


def apply(
    x: Program | RegularThread, family: ServiceFamily, fuel: int = DEFAULT_FUEL
) -> ServiceFamily | None:
    """Family after running x against it; the empty family on proven
    divergence; None when the fuel ran out first."""
    outcome = run(x, family, fuel)
    if isinstance(outcome, Converged):
        return outcome.family
    if isinstance(outcome, ProvenDivergent):
        return empty_family()
    return None


def converges(
    x: Program | RegularThread, family: ServiceFamily, fuel: int = DEFAULT_FUEL
) -> bool | None:
    """True on termination, False on proven divergence, None if unknown."""
    outcome = run(x, family, fuel)
    if isinstance(outcome, Converged):
        return True
    if isinstance(outcome, ProvenDivergent):
        return False
    return None
