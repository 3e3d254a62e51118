"""Halting-problem lab.

Machinery around the question whether a program over a tape unit can
decide, given an encoded program and an input on its own tape, whether
that program halts on that input:

* ``swap``/``f2d``: termination-behaviour transforms (exchange the
  terminators; turn False-termination into divergence),
* ``decide_halting_dup``: a real decision procedure for programs over
  the duplication unit (every dup reply is True, so halting reduces to
  a finite control-flow check),
* ``halting_op_step``: a computable halting oracle over the otherwise
  empty unit, with ``decide_halting_empty_ext`` as its decision core,
* ``diag_solver``/``diag_interpreter``: diagonal program constructors
  that defeat any claimed solver or total interpreter drawn from the
  program class it is supposed to cover,
* ``validate_solver``/``check_interpreter``: refuters that evaluate a
  candidate on its own diagonal and report a replayable witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

from .machine import (
    DEFAULT_FUEL,
    Converged,
    DivergenceCause,
    FuelExhausted,
    Outcome,
    ProvenDivergent,
    run,
)
from .program import (
    BasicInstruction,
    BwdJump,
    FwdJump,
    NegTest,
    NOT_AN_ENCODING,
    Plain,
    PosTest,
    Program,
    TERM_FALSE,
    TERM_TRUE,
    TermFalse,
    TermTrue,
    decode,
    encode,
    enumerate_programs,
    render,
)
from .services import Reply, ServiceFamily, UnitService, service_step, singleton_family
from .threads import PostCond, RegularThread, StopFalse, StopTrue, Tau, extract
from .units import (
    FunctionalUnit,
    MethodOperation,
    TapeState,
    at_left,
    dup_unit,
    format_tape,
    interface,
    parse_tape,
)


class NotDupProgramError(ValueError):
    pass


class NotHaltingProgramError(ValueError):
    pass


class PositionOutOfRangeError(ValueError):
    pass


class HypothesisViolationError(ValueError):
    pass


# --- termination-behaviour transforms -------------------------------------


def swap(x: Program) -> Program:
    """Exchange !t and !f everywhere; an involution."""
    out = []
    for u in x:
        if isinstance(u, TermTrue):
            out.append(TERM_FALSE)
        elif isinstance(u, TermFalse):
            out.append(TERM_TRUE)
        else:
            out.append(u)
    return Program(tuple(out))


def f2d(x: Program) -> Program:
    """Replace every !f by #0: termination with False becomes deadlock."""
    return Program(tuple(FwdJump(0) if isinstance(u, TermFalse) else u for u in x))


# --- pure control-flow convergence ----------------------------------------


def _control_flow_converges(x: Program) -> bool:
    """Convergence of a program containing only jumps and terminators."""
    k = len(x)
    i = 1
    seen: set[int] = set()
    while True:
        if not 1 <= i <= k:
            return False
        if i in seen:
            return False
        u = x.at(i)
        if isinstance(u, (TermTrue, TermFalse)):
            return True
        if isinstance(u, FwdJump):
            seen.add(i)
            i += u.offset
        elif isinstance(u, BwdJump):
            seen.add(i)
            i = max(i - u.offset, 0)
        else:
            raise AssertionError(f"basic instruction left in control-flow program: {u!r}")


def _check_single_method(x: Program, method: str, focus: str, error: type) -> None:
    for u in x:
        if isinstance(u, (Plain, PosTest, NegTest)):
            if u.action.focus != focus or u.action.method != method:
                raise error(f"{u.action} is not {focus}.{method}")


# --- halting over the duplication unit (decidable) -------------------------


def decide_halting_dup(x: Program, state: TapeState | None = None, focus: str = "f") -> bool:
    """Decide whether a program over the duplication unit halts.

    The dup reply is True on every state, so each occurrence can be
    replaced by the jump to its True-successor (plain and positive tests
    continue with the next instruction, negative tests skip one) and the
    remaining control flow checked finitely.  The answer does not depend
    on the tape state, which is accepted only for interface symmetry.
    """
    _check_single_method(x, "dup", focus, NotDupProgramError)
    out = []
    for u in x:
        if isinstance(u, (Plain, PosTest)):
            out.append(FwdJump(1))
        elif isinstance(u, NegTest):
            out.append(FwdJump(2))
        else:
            out.append(u)
    return _control_flow_converges(Program(tuple(out)))


# --- halting over the empty unit extended with a halting oracle ------------


def _first_application_position(x: Program) -> int | None:
    """Position of the basic instruction the jump chase from position 1
    reaches, or None if execution deadlocks or terminates first."""
    k = len(x)
    i = 1
    seen: set[int] = set()
    while True:
        if not 1 <= i <= k or i in seen:
            return None
        u = x.at(i)
        if isinstance(u, FwdJump):
            seen.add(i)
            i += u.offset
        elif isinstance(u, BwdJump):
            seen.add(i)
            i = max(i - u.offset, 0)
        elif isinstance(u, (TermTrue, TermFalse)):
            return None
        else:
            return i


def leads_to_first_application(x: Program, i: int) -> bool:
    """Whether the occurrence at position i is the first basic
    instruction execution reaches (by jump chasing from position 1)."""
    if not 1 <= i <= len(x):
        raise PositionOutOfRangeError(f"position {i} not in 1..{len(x)}")
    if not isinstance(x.at(i), (Plain, PosTest, NegTest)):
        raise ValueError(f"position {i} holds no basic instruction")
    return _first_application_position(x) == i


def _successor_offset(u: Plain | PosTest | NegTest, reply: bool) -> int:
    if isinstance(u, Plain):
        return 1
    if isinstance(u, PosTest):
        return 1 if reply else 2
    return 2 if reply else 1


def _replace_halting(x: Program, first_reply: bool) -> Program:
    """Rewrite halting occurrences into reply-successor jumps over two
    copies of the program.

    The first application sees the original state and replies
    ``first_reply``; it also resets the tape, so every later application
    replies False, including re-executions of the same occurrence (a
    loop back to the first occurrence behaves differently the second
    time).  The first copy therefore handles execution before any
    application and jumps into the second copy at the matching position
    when one happens; the second copy resolves every occurrence as
    False.  Jumps that leave the program in the original keep deadlocking
    in the copies.
    """
    k = len(x)
    before = []
    for position, u in enumerate(x, start=1):
        if isinstance(u, (Plain, PosTest, NegTest)):
            before.append(FwdJump(k + _successor_offset(u, first_reply)))
        elif isinstance(u, FwdJump) and position + u.offset > k:
            before.append(FwdJump(0))
        else:
            before.append(u)
    after = []
    for position, u in enumerate(x, start=1):
        if isinstance(u, (Plain, PosTest, NegTest)):
            after.append(FwdJump(_successor_offset(u, False)))
        elif isinstance(u, BwdJump) and u.offset >= position:
            after.append(FwdJump(0))
        else:
            after.append(u)
    return Program(tuple(before + after))


def _is_halting_program(y: Program, focus: str = "f") -> bool:
    return all(
        u.action.focus == focus and u.action.method == "halting"
        for u in y
        if isinstance(u, (Plain, PosTest, NegTest))
    )


@lru_cache(maxsize=None)
def _decide_given_first_reply(y: Program, first_reply: bool) -> bool:
    return _control_flow_converges(_replace_halting(y, first_reply))


@lru_cache(maxsize=None)
def _halting_reply(content: str) -> bool:
    """Reply of the halting operation on a tape with this content: True
    iff the part before the first ':' encodes a halting-unit program
    that halts on the rest."""
    cut = content.find(":")
    if cut < 0:
        return False
    y = decode(content[:cut])
    if y is NOT_AN_ENCODING or not _is_halting_program(y):
        return False
    rest = content[cut + 1 :]
    return _decide_given_first_reply(y, _halting_reply(rest))


def decide_halting_empty_ext(x: Program, state: TapeState, focus: str = "f") -> bool:
    """Decide whether a program over the halting-extended empty unit
    halts on the given state, by induction on the number of ':' in it.

    Only the first halting application sees the original state; every
    application resets the tape to empty, where the reply is False, so
    every later application resolves as False and the rest is a finite
    control-flow check over the two-copy rewriting.
    """
    _check_single_method(x, "halting", focus, NotHaltingProgramError)
    return _decide_given_first_reply(x, _halting_reply(state.content))


def halting_op_step(state: TapeState) -> tuple[bool, TapeState]:
    """The halting oracle as a method operation: reply per
    ``decide_halting_empty_ext`` on the decoded tape content, and reset
    the tape to empty."""
    return _halting_reply(state.content), TapeState("", "")


_HALTING_EMPTY = FunctionalUnit(
    "halting-empty",
    "tape",
    {"halting": MethodOperation("halting", halting_op_step)},
    format_tape,
    parse_tape,
)


def halting_empty_unit() -> FunctionalUnit:
    return _HALTING_EMPTY


# --- diagonal constructions -------------------------------------------------


def _dup_prefixed(x: Program, focus: str = "f") -> Program:
    return Program((Plain(BasicInstruction(focus, "dup")),) + x.instructions)


def diag_interpreter(x: Program) -> Program:
    """Diagonal input for an interpreter candidate: f.dup ; swap(x)."""
    return _dup_prefixed(swap(x))


def diag_solver(x: Program) -> Program:
    """Diagonal witness against a solver candidate: f.dup ; f2d(swap(x))."""
    return _dup_prefixed(f2d(swap(x)))


def diag_solver_alt(x: Program) -> Program:
    """Second construction: f2d(swap(f.dup ; x)).  Extensionally the same
    program as :func:`diag_solver`, since the transforms fix f.dup."""
    return f2d(swap(_dup_prefixed(x)))


# --- total evaluation for declared-constant replies -------------------------


def run_total(x: Program | RegularThread, family: ServiceFamily) -> Outcome:
    """Run to a definite outcome when every method involved has a declared
    state-independent reply.

    Then each node has a fixed successor, so revisiting a node closes an
    infinite loop: divergence is proven by pigeonhole instead of fuel.
    """
    thread = x if isinstance(x, RegularThread) else extract(x)
    for node in thread.nodes.values():
        if isinstance(node, PostCond) and isinstance(node.action, BasicInstruction):
            service = family.entries.get(node.action.focus)
            if isinstance(service, UnitService):
                op = service.unit.operations.get(node.action.method)
                if op is not None and op.constant_reply is None:
                    raise ValueError(
                        f"{node.action} has no declared constant reply; use run()"
                    )
    entries = dict(family.entries)
    current = thread.root
    steps = 0
    visited: set = set()
    while True:
        node = thread.nodes[current]
        if isinstance(node, StopTrue):
            return Converged(True, ServiceFamily(entries), steps)
        if isinstance(node, StopFalse):
            return Converged(False, ServiceFamily(entries), steps)
        if not isinstance(node, PostCond):
            return ProvenDivergent(DivergenceCause.DEADLOCK, steps)
        if current in visited:
            return ProvenDivergent(DivergenceCause.CYCLE, steps)
        visited.add(current)
        if isinstance(node.action, Tau):
            steps += 1
            current = node.then_ref
            continue
        service = entries.get(node.action.focus)
        if service is None:
            return ProvenDivergent(DivergenceCause.MISSING_FOCUS, steps)
        reply, successor = service_step(service, node.action.method)
        if reply is Reply.DIVERGENT:
            return ProvenDivergent(DivergenceCause.REPLY_D, steps)
        op = service.unit.operations[node.action.method]
        if (reply is Reply.TRUE) != op.constant_reply:
            raise AssertionError(f"declared constant reply violated by {node.action}")
        entries[node.action.focus] = successor
        steps += 1
        current = node.then_ref if reply is Reply.TRUE else node.else_ref


def _methods_constant(x: Program, unit: FunctionalUnit) -> bool:
    ops = unit.operations
    return all(
        ops[u.action.method].constant_reply is not None
        for u in x
        if isinstance(u, (Plain, PosTest, NegTest))
    )


def _proving_run(x: Program, unit: FunctionalUnit, state: TapeState, fuel: int, focus: str) -> Outcome:
    family = singleton_family(focus, UnitService(unit, state))
    if _methods_constant(x, unit):
        return run_total(x, family)
    return run(x, family, fuel)


# --- solver validation -------------------------------------------------------


@dataclass(frozen=True)
class HaltingInstance:
    unit: FunctionalUnit
    program_methods: frozenset[str]


def dup_instance() -> HaltingInstance:
    return HaltingInstance(dup_unit(), frozenset({"dup"}))


@dataclass(frozen=True)
class RefutedByDivergence:
    witness_state: TapeState
    steps: int


@dataclass(frozen=True)
class RefutedByWrongReply:
    witness_program: Program
    witness_state: TapeState
    claimed: bool
    actual: bool
    steps: int


@dataclass(frozen=True)
class NotRefuted:
    budget: int


SolverVerdict = RefutedByDivergence | RefutedByWrongReply | NotRefuted


def _check_instance(x: Program, inst: HaltingInstance, focus: str) -> None:
    if "dup" not in interface(inst.unit):
        raise HypothesisViolationError("instance unit has no dup operation")
    if "dup" not in inst.program_methods:
        raise HypothesisViolationError("dup not among the instance's program methods")
    for u in x:
        if isinstance(u, (Plain, PosTest, NegTest)):
            if u.action.focus != focus:
                raise HypothesisViolationError(f"{u.action} uses a foreign focus")
            if u.action.method not in interface(inst.unit):
                raise HypothesisViolationError(f"{u.action.method!r} not in the unit interface")


def validate_solver(
    x: Program,
    inst: HaltingInstance | None = None,
    fuel: int = DEFAULT_FUEL,
    form: str = "first",
    focus: str = "f",
) -> SolverVerdict:
    """Try to refute a claimed halting solver by its own diagonal.

    Builds y = f.dup ; f2d(swap(x)), runs the candidate on ``|ybar:ybar``
    and y on ``|ybar``: a total solver must converge on the former and
    its reply must match the observed convergence of the latter.  A
    NotRefuted verdict only means the budget ran out, never correctness.
    """
    if inst is None:
        inst = dup_instance()
    _check_instance(x, inst, focus)
    builder = {"first": diag_solver, "second": diag_solver_alt}[form]
    y = builder(x)
    ybar = encode(y)
    diagonal_state = at_left(f"{ybar}:{ybar}")
    y_state = at_left(ybar)
    out_x = _proving_run(x, inst.unit, diagonal_state, fuel, focus)
    if isinstance(out_x, ProvenDivergent):
        return RefutedByDivergence(diagonal_state, out_x.steps)
    if isinstance(out_x, FuelExhausted):
        return NotRefuted(fuel)
    out_y = _proving_run(y, inst.unit, y_state, fuel, focus)
    if isinstance(out_y, FuelExhausted):
        return NotRefuted(fuel)
    actual = isinstance(out_y, Converged)
    if out_x.reply == actual:
        return NotRefuted(fuel)
    return RefutedByWrongReply(y, y_state, out_x.reply, actual, out_x.steps + out_y.steps)


def replay_verdict(
    x: Program,
    verdict: SolverVerdict,
    inst: HaltingInstance | None = None,
    fuel: int = DEFAULT_FUEL,
    focus: str = "f",
) -> bool:
    """Re-run the evaluator on a verdict's witness and confirm the
    recorded discrepancy reappears."""
    if inst is None:
        inst = dup_instance()
    if isinstance(verdict, NotRefuted):
        return True
    if isinstance(verdict, RefutedByDivergence):
        out = _proving_run(x, inst.unit, verdict.witness_state, fuel, focus)
        return isinstance(out, ProvenDivergent)
    y = verdict.witness_program
    ybar = encode(y)
    out_x = _proving_run(x, inst.unit, at_left(f"{ybar}:{ybar}"), fuel, focus)
    out_y = _proving_run(y, inst.unit, verdict.witness_state, fuel, focus)
    if isinstance(out_x, (FuelExhausted, ProvenDivergent)) or isinstance(out_y, FuelExhausted):
        return False
    return out_x.reply == verdict.claimed and isinstance(out_y, Converged) == verdict.actual


def verdict_record(candidate: Program, verdict: SolverVerdict) -> dict:
    """Stable, serialisable record of a solver verdict."""
    record = {
        "candidate": render(candidate),
        "verdict": None,
        "witnessProgram": None,
        "witnessState": None,
        "claimed": None,
        "actual": None,
        "steps": None,
    }
    if isinstance(verdict, RefutedByDivergence):
        record.update(
            verdict="refuted-by-divergence",
            witnessState=format_tape(verdict.witness_state),
            steps=verdict.steps,
        )
    elif isinstance(verdict, RefutedByWrongReply):
        record.update(
            verdict="refuted-by-wrong-reply",
            witnessProgram=render(verdict.witness_program),
            witnessState=format_tape(verdict.witness_state),
            claimed="T" if verdict.claimed else "F",
            actual="yes" if verdict.actual else "no",
            steps=verdict.steps,
        )
    else:
        record.update(verdict="not-refuted", steps=verdict.budget)
    return record


# --- interpreter checking ----------------------------------------------------


@dataclass(frozen=True)
class SampleCheck:
    program: Program
    state: TapeState
    status: str
    detail: str = ""


@dataclass(frozen=True)
class InterpreterReport:
    candidate: Program
    samples: tuple[SampleCheck, ...]
    diagonal: SampleCheck
    passed: bool


def _check_sample(
    x: Program, inst: HaltingInstance, y: Program, word: str, fuel: int, focus: str
) -> SampleCheck:
    y_state = at_left(word)
    out_y = _proving_run(y, inst.unit, y_state, fuel, focus)
    if isinstance(out_y, FuelExhausted):
        return SampleCheck(y, y_state, "unknown", "sample did not resolve")
    if isinstance(out_y, ProvenDivergent):
        return SampleCheck(y, y_state, "skipped-divergent", "sample program diverges")
    x_state = at_left(f"{encode(y)}:{word}")
    out_x = _proving_run(x, inst.unit, x_state, fuel, focus)
    if isinstance(out_x, FuelExhausted):
        return SampleCheck(y, y_state, "unknown", "candidate did not resolve")
    if isinstance(out_x, ProvenDivergent):
        return SampleCheck(y, y_state, "fail-convergence", "candidate diverges on encoded input")
    if out_x.reply != out_y.reply:
        return SampleCheck(
            y, y_state, "fail-reply", f"candidate={out_x.reply} sample={out_y.reply}"
        )
    if out_x.family != out_y.family:
        return SampleCheck(y, y_state, "fail-apply", "final families differ")
    return SampleCheck(y, y_state, "ok")


def check_interpreter(
    x: Program,
    inst: HaltingInstance | None = None,
    samples: Sequence[tuple[Program, TapeState]] = (),
    fuel: int = DEFAULT_FUEL,
    focus: str = "f",
) -> InterpreterReport:
    """Check interpreter-style agreement on samples and on the diagonal.

    For each sample (y, v) with y converging: the candidate must converge on
    the tape holding y's encoding and v, leave the same final family and
    deliver the same reply.  The diagonal probe uses y0 = f.dup;swap(x)
    on its own encoding; a candidate passes only if every check is
    conclusive and agrees.
    """
    if inst is None:
        inst = dup_instance()
    _check_instance(x, inst, focus)
    checks = []
    for y, v in samples:
        for u in y:
            if isinstance(u, (Plain, PosTest, NegTest)) and u.action.method not in inst.program_methods:
                raise HypothesisViolationError(f"sample uses {u.action.method!r}")
        checks.append(_check_sample(x, inst, y, v.content, fuel, focus))
    y0 = diag_interpreter(x)
    diagonal = _check_sample(x, inst, y0, encode(y0), fuel, focus)
    passed = diagonal.status == "ok" and all(c.status == "ok" for c in checks)
    return InterpreterReport(x, tuple(checks), diagonal, passed)


def report_record(report: InterpreterReport) -> dict:
    def one(check: SampleCheck) -> dict:
        return {
            "program": render(check.program),
            "state": format_tape(check.state),
            "status": check.status,
            "detail": check.detail,
        }

    return {
        "candidate": render(report.candidate),
        "samples": [one(c) for c in report.samples],
        "diagonal": one(report.diagonal),
        "passed": report.passed,
    }


# --- exhaustive sweeps --------------------------------------------------------


def sweep_dup_decider(max_len: int) -> dict:
    """Compare the dup decision procedure against total evaluation on all
    dup programs up to the given length and three tape states."""
    states = (at_left(""), at_left("1"), at_left("10:1"))
    unit = dup_unit()
    agree = 0
    disagreements = []
    for x in enumerate_programs({"dup"}, max_len):
        decided = decide_halting_dup(x)
        oracle_answers = []
        for state in states:
            out = run_total(x, singleton_family("f", UnitService(unit, state)))
            oracle_answers.append(isinstance(out, Converged))
        if all(answer == decided for answer in oracle_answers):
            agree += 1
        else:
            disagreements.append(
                {"program": render(x), "decider": decided, "oracle": oracle_answers}
            )
    return {"suite": "dup-decider", "agree": agree, "disagree": len(disagreements), "counterexamples": disagreements[:10]}


def bit_blocks(max_len: int) -> list[str]:
    """All bit strings of length 0..max_len."""
    blocks = [""]
    frontier = [""]
    for _ in range(max_len):
        frontier = [b + c for b in frontier for c in "01"]
        blocks += frontier
    return blocks


def _halting_words(segment_max: int) -> list[str]:
    blocks = bit_blocks(segment_max)
    return blocks + [f"{a}:{b}" for a in blocks for b in blocks]


def sweep_empty_halting(max_len: int, segment_max: int = 2, fuel: int = 10_000) -> dict:
    """Compare the halting decision procedure against direct bounded
    evaluation with the halting service, over all programs up to the
    given length and all inputs with at most one ':'."""
    unit = halting_empty_unit()
    agree = 0
    disagreements = []
    for y in enumerate_programs({"halting"}, max_len):
        for word in _halting_words(segment_max):
            state = at_left(word)
            decided = decide_halting_empty_ext(y, state)
            out = run(y, singleton_family("f", UnitService(unit, state)), fuel)
            observed = isinstance(out, Converged) if not isinstance(out, FuelExhausted) else None
            if observed is not None and observed == decided:
                agree += 1
            else:
                disagreements.append(
                    {"program": render(y), "state": format_tape(state), "decider": decided, "evaluation": observed}
                )
    return {"suite": "empty-halting", "agree": agree, "disagree": len(disagreements), "counterexamples": disagreements[:10]}


def sweep_diagonal(max_len: int, fuel: int = DEFAULT_FUEL) -> dict:
    """Validate that every candidate solver up to the given length is
    refuted under both diagonal constructions."""
    refuted = 0
    not_refuted = []
    for x in enumerate_programs({"dup"}, max_len):
        verdicts = [validate_solver(x, fuel=fuel, form=form) for form in ("first", "second")]
        if any(isinstance(v, NotRefuted) for v in verdicts):
            not_refuted.append(render(x))
        else:
            refuted += 1
    return {"suite": "diagonal", "refuted": refuted, "not-refuted": len(not_refuted), "counterexamples": not_refuted[:10]}
