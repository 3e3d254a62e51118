"""Instruction sequences with boolean termination.

A program is a non-empty sequence of primitive instructions, numbered from 1:

    f.m     plain basic instruction: ask the service named f to process
            method m, then continue with the next instruction whatever
            the reply is
    +f.m    positive test: continue with the next instruction on reply
            True, skip one instruction on False
    -f.m    negative test: same, with the roles of the replies swapped
    #l      jump forward to the l-th next instruction (#0 deadlocks)
    \\#l     jump backward to the l-th previous instruction (\\#0 deadlocks)
    !t      terminate delivering True
    !f      terminate delivering False

The canonical text form joins instructions with ";" and no whitespace.
``encode``/``decode`` give the injective bit-sequence form used when a
program is written onto a tape as input for another program: the ASCII
bytes of the canonical text, each emitted most significant bit first.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence, Union

_FOCUS_RE = re.compile(r"[a-z][a-z0-9]*\Z")
# Method names may carry colon-separated selector segments, e.g. "write:0".
_METHOD_RE = re.compile(r"[a-z][a-z0-9]*(?::[a-z0-9]+)*\Z")
_COUNT_RE = re.compile(r"(?:0|[1-9][0-9]*)\Z")


class ProgramSyntaxError(ValueError):
    """Malformed program text; ``position`` is the 0-based character offset."""

    def __init__(self, message: str, position: int = 0):
        super().__init__(f"{message} (at character {position})")
        self.position = position


class EmptyProgramError(ProgramSyntaxError):
    """Program text contains no instructions."""


@dataclass(frozen=True)
class BasicInstruction:
    focus: str
    method: str

    def __post_init__(self):
        if not _FOCUS_RE.match(self.focus):
            raise ValueError(f"bad focus {self.focus!r}")
        if not _METHOD_RE.match(self.method):
            raise ValueError(f"bad method name {self.method!r}")

    def __str__(self) -> str:
        return f"{self.focus}.{self.method}"


@dataclass(frozen=True)
class Plain:
    action: BasicInstruction


@dataclass(frozen=True)
class PosTest:
    action: BasicInstruction


@dataclass(frozen=True)
class NegTest:
    action: BasicInstruction


@dataclass(frozen=True)
class FwdJump:
    offset: int

    def __post_init__(self):
        if self.offset < 0:
            raise ValueError("jump counter must be a natural number")


@dataclass(frozen=True)
class BwdJump:
    offset: int

    def __post_init__(self):
        if self.offset < 0:
            raise ValueError("jump counter must be a natural number")


@dataclass(frozen=True)
class TermTrue:
    pass


@dataclass(frozen=True)
class TermFalse:
    pass


TERM_TRUE = TermTrue()
TERM_FALSE = TermFalse()

Instruction = Union[Plain, PosTest, NegTest, FwdJump, BwdJump, TermTrue, TermFalse]


@dataclass(frozen=True)
class Program:
    """A non-empty tuple of primitive instructions; positions are 1-based."""

    instructions: tuple[Instruction, ...]

    def __post_init__(self):
        if not self.instructions:
            raise EmptyProgramError("program has no instructions")

    def __len__(self) -> int:
        return len(self.instructions)

    def __iter__(self) -> Iterator[Instruction]:
        return iter(self.instructions)

    def at(self, position: int) -> Instruction:
        """Instruction at a 1-based position."""
        return self.instructions[position - 1]

    def __str__(self) -> str:
        return render(self)


def make(*instructions: Instruction) -> Program:
    return Program(tuple(instructions))


def _render_one(u: Instruction) -> str:
    if isinstance(u, Plain):
        return str(u.action)
    if isinstance(u, PosTest):
        return f"+{u.action}"
    if isinstance(u, NegTest):
        return f"-{u.action}"
    if isinstance(u, FwdJump):
        return f"#{u.offset}"
    if isinstance(u, BwdJump):
        return f"\\#{u.offset}"
    if isinstance(u, TermTrue):
        return "!t"
    if isinstance(u, TermFalse):
        return "!f"
    raise TypeError(f"not an instruction: {u!r}")


def render(x: Program) -> str:
    """Canonical text: instructions joined by ';', no whitespace."""
    return ";".join(_render_one(u) for u in x)


def _parse_basic(token: str, position: int) -> BasicInstruction:
    focus, dot, method = token.partition(".")
    if not dot or not _FOCUS_RE.match(focus) or not _METHOD_RE.match(method):
        raise ProgramSyntaxError(f"bad instruction {token!r}", position)
    return BasicInstruction(focus, method)


def _parse_one(token: str, position: int) -> Instruction:
    if token == "!t":
        return TERM_TRUE
    if token == "!f":
        return TERM_FALSE
    if token.startswith("\\#"):
        if not _COUNT_RE.match(token[2:]):
            raise ProgramSyntaxError(f"bad jump counter in {token!r}", position)
        return BwdJump(int(token[2:]))
    if token.startswith("#"):
        if not _COUNT_RE.match(token[1:]):
            raise ProgramSyntaxError(f"bad jump counter in {token!r}", position)
        return FwdJump(int(token[1:]))
    if token.startswith("+"):
        return PosTest(_parse_basic(token[1:], position))
    if token.startswith("-"):
        return NegTest(_parse_basic(token[1:], position))
    return Plain(_parse_basic(token, position))


def parse(text: str) -> Program:
    """Parse canonical program text; inverse of :func:`render`."""
    body = text.strip()
    if not body:
        raise EmptyProgramError("program has no instructions")
    instructions = []
    offset = 0
    for token in body.split(";"):
        if not token:
            raise ProgramSyntaxError("empty instruction slot", offset)
        instructions.append(_parse_one(token, offset))
        offset += len(token) + 1
    return Program(tuple(instructions))


class NotAnEncoding:
    """Result of decoding a bit string that encodes no program."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "NOT_AN_ENCODING"


NOT_AN_ENCODING = NotAnEncoding()


def encode(x: Program) -> str:
    """Injective bit-string form: MSB-first ASCII bytes of the rendering."""
    return "".join(format(byte, "08b") for byte in render(x).encode("ascii"))


def decode(bits: str) -> Program | NotAnEncoding:
    """Inverse of :func:`encode` on its image; NOT_AN_ENCODING elsewhere."""
    if len(bits) % 8 != 0 or any(c not in "01" for c in bits):
        return NOT_AN_ENCODING
    values = [int(bits[i : i + 8], 2) for i in range(0, len(bits), 8)]
    if any(v > 0x7F for v in values):
        return NOT_AN_ENCODING
    try:
        return parse(bytes(values).decode("ascii"))
    except ProgramSyntaxError:
        return NOT_AN_ENCODING


def instruction_alphabet(
    methods: Iterable[str],
    *,
    focus: str = "f",
    fwd_offsets: Sequence[int],
    bwd_offsets: Sequence[int],
) -> list[Instruction]:
    letters: list[Instruction] = []
    for m in sorted(methods):
        action = BasicInstruction(focus, m)
        letters += [Plain(action), PosTest(action), NegTest(action)]
    letters += [TERM_TRUE, TERM_FALSE]
    letters += [FwdJump(l) for l in fwd_offsets]
    letters += [BwdJump(l) for l in bwd_offsets]
    return letters


def enumerate_programs(
    methods: Iterable[str],
    max_len: int,
    *,
    focus: str = "f",
    fwd_offsets: Sequence[int] | None = None,
    bwd_offsets: Sequence[int] | None = None,
) -> Iterator[Program]:
    """All programs over the given methods, lengths 1..max_len.

    Jump counters default to 0..max_len+1; larger counters behave like an
    out-of-range jump of that direction, so the default range covers every
    semantically distinct instruction at these lengths.
    """
    if fwd_offsets is None:
        fwd_offsets = range(max_len + 2)
    if bwd_offsets is None:
        bwd_offsets = range(max_len + 2)
    letters = instruction_alphabet(
        methods, focus=focus, fwd_offsets=fwd_offsets, bwd_offsets=bwd_offsets
    )
    for k in range(1, max_len + 1):
        for combo in itertools.product(letters, repeat=k):
            yield Program(combo)
