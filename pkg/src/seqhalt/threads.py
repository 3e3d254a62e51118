"""Regular threads: the behaviours programs exhibit under execution.

A thread performs basic actions one at a time; after each action the
environment's boolean reply selects how it continues.  The constants are
deadlock (D), termination with True (S+) and termination with False (S-);
the one composite form is the postconditional node ``x <| a |> y``:
perform ``a``, continue as ``x`` on reply True and as ``y`` on False.
The internal action tau always receives reply True, so a tau node's else
branch is semantically identified with its then branch.

``extract`` turns a program into its behaviour graph by resolving jumps
transparently: a position outside the program, a 0-jump, or a cyclic jump
chain all yield deadlock.  ``project`` cuts a thread off after a given
number of actions; two regular threads are equal exactly when all finite
projections agree, which ``bisimilar`` decides by partition refinement.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Union

from .program import (
    BasicInstruction,
    BwdJump,
    FwdJump,
    NegTest,
    Plain,
    PosTest,
    Program,
    TermFalse,
    TermTrue,
)


@dataclass(frozen=True)
class Tau:
    def __str__(self) -> str:
        return "tau"


TAU = Tau()

Action = Union[BasicInstruction, Tau]

NodeId = Union[int, str]


@dataclass(frozen=True)
class Deadlock:
    def __str__(self) -> str:
        return "D"


@dataclass(frozen=True)
class StopTrue:
    def __str__(self) -> str:
        return "S+"


@dataclass(frozen=True)
class StopFalse:
    def __str__(self) -> str:
        return "S-"


DEADLOCK = Deadlock()
STOP_TRUE = StopTrue()
STOP_FALSE = StopFalse()


@dataclass(frozen=True)
class PostCond:
    action: Action
    then_ref: NodeId
    else_ref: NodeId


ThreadNode = Union[Deadlock, StopTrue, StopFalse, PostCond]


@dataclass(frozen=True)
class RegularThread:
    """A finite, closed system of thread equations with a root node."""

    nodes: Mapping[NodeId, ThreadNode]
    root: NodeId

    def __post_init__(self):
        if self.root not in self.nodes:
            raise ValueError(f"root {self.root!r} is not a node")
        for ref, node in self.nodes.items():
            if isinstance(node, PostCond):
                for target in (node.then_ref, node.else_ref):
                    if target not in self.nodes:
                        raise ValueError(f"node {ref!r} references missing {target!r}")

    def states(self) -> int:
        return len(self.nodes)


def constant_thread(node: ThreadNode) -> RegularThread:
    """The one-node thread D, S+ or S-."""
    return RegularThread({str(node): node}, str(node))


_TERMINAL_IDS = {"D": DEADLOCK, "S+": STOP_TRUE, "S-": STOP_FALSE}


def _resolve(x: Program, i: int) -> NodeId:
    """Chase jumps from position i to a basic instruction or terminal."""
    k = len(x)
    seen: set[int] = set()
    while True:
        if not 1 <= i <= k:
            return "D"
        if i in seen:
            return "D"
        u = x.at(i)
        if isinstance(u, FwdJump):
            seen.add(i)
            i += u.offset
        elif isinstance(u, BwdJump):
            seen.add(i)
            i = max(i - u.offset, 0)
        elif isinstance(u, TermTrue):
            return "S+"
        elif isinstance(u, TermFalse):
            return "S-"
        else:
            return i


def extract(x: Program) -> RegularThread:
    """Behaviour graph of a program: one node per reachable basic
    instruction plus the terminals it reaches."""
    root = _resolve(x, 1)
    nodes: dict[NodeId, ThreadNode] = {}
    todo = [root]
    while todo:
        ref = todo.pop()
        if ref in nodes:
            continue
        if isinstance(ref, str):
            nodes[ref] = _TERMINAL_IDS[ref]
            continue
        u = x.at(ref)
        if isinstance(u, Plain):
            succ = _resolve(x, ref + 1)
            node = PostCond(u.action, succ, succ)
        elif isinstance(u, PosTest):
            node = PostCond(u.action, _resolve(x, ref + 1), _resolve(x, ref + 2))
        elif isinstance(u, NegTest):
            node = PostCond(u.action, _resolve(x, ref + 2), _resolve(x, ref + 1))
        else:  # unreachable: _resolve never lands on jumps or terminators
            raise AssertionError(f"resolver stopped on {u!r}")
        nodes[ref] = node
        todo += [node.then_ref, node.else_ref]
    return RegularThread(nodes, root)


@dataclass(frozen=True)
class TreeNode:
    action: Action
    then_branch: "FiniteThread"
    else_branch: "FiniteThread"


FiniteThread = Union[Deadlock, StopTrue, StopFalse, TreeNode]


def project(depth: int, t: RegularThread | FiniteThread) -> FiniteThread:
    """The depth-n approximation: cut off after n actions.

    Depth 0 is deadlock; terminals are fixed points; a postconditional
    recurses with depth-1 on both branches (tau nodes are normalised so
    the else branch equals the then branch).
    """
    if depth < 0:
        raise ValueError("depth must be a natural number")
    if isinstance(t, RegularThread):

        def go(ref: NodeId, n: int) -> FiniteThread:
            node = t.nodes[ref]
            if n == 0:
                return DEADLOCK
            if isinstance(node, PostCond):
                then_branch = go(node.then_ref, n - 1)
                if isinstance(node.action, Tau):
                    return TreeNode(node.action, then_branch, then_branch)
                return TreeNode(node.action, then_branch, go(node.else_ref, n - 1))
            return node

        return go(t.root, depth)

    def go_tree(node: FiniteThread, n: int) -> FiniteThread:
        if n == 0:
            return DEADLOCK
        if isinstance(node, TreeNode):
            then_branch = go_tree(node.then_branch, n - 1)
            if isinstance(node.action, Tau):
                return TreeNode(node.action, then_branch, then_branch)
            return TreeNode(node.action, then_branch, go_tree(node.else_branch, n - 1))
        return node

    return go_tree(t, depth)


def _normalised_refs(node: PostCond) -> tuple[NodeId, NodeId]:
    if isinstance(node.action, Tau):
        return node.then_ref, node.then_ref
    return node.then_ref, node.else_ref


def bisimilar(t1: RegularThread, t2: RegularThread) -> bool:
    """Behavioural equality of two regular threads (tau-normalised)."""
    nodes: dict[tuple[str, NodeId], ThreadNode] = {}
    for tag, t in (("a", t1), ("b", t2)):
        for ref, node in t.nodes.items():
            nodes[(tag, ref)] = node

    def base(node: ThreadNode):
        if isinstance(node, PostCond):
            return ("post", node.action)
        return (str(node),)

    block = _canonical({key: base(node) for key, node in nodes.items()})
    while True:
        signature = {}
        for key, node in nodes.items():
            if isinstance(node, PostCond):
                tag = key[0]
                then_ref, else_ref = _normalised_refs(node)
                signature[key] = (block[key], block[(tag, then_ref)], block[(tag, else_ref)])
            else:
                signature[key] = (block[key],)
        refined = _canonical(signature)
        if refined == block:
            return block[("a", t1.root)] == block[("b", t2.root)]
        block = refined


def _canonical(signature: dict) -> dict:
    numbering: dict = {}
    out = {}
    for key in sorted(signature, key=str):
        sig = signature[key]
        if sig not in numbering:
            numbering[sig] = len(numbering)
        out[key] = numbering[sig]
    return out


def projections_agree(t1: RegularThread, t2: RegularThread, depth: int) -> bool:
    """Whether project(n, t1) == project(n, t2) for every n <= depth.

    Computed without materialising the trees (they grow exponentially);
    agreement at the maximal depth implies agreement at all smaller ones.
    """
    memo: dict[tuple[NodeId, NodeId, int], bool] = {}

    def go(r1: NodeId, r2: NodeId, n: int) -> bool:
        if n == 0:
            return True
        key = (r1, r2, n)
        if key in memo:
            return memo[key]
        n1, n2 = t1.nodes[r1], t2.nodes[r2]
        if isinstance(n1, PostCond) != isinstance(n2, PostCond):
            result = False
        elif not isinstance(n1, PostCond):
            result = type(n1) is type(n2)
        elif n1.action != n2.action:
            result = False
        else:
            a_then, a_else = _normalised_refs(n1)
            b_then, b_else = _normalised_refs(n2)
            result = go(a_then, b_then, n - 1) and go(a_else, b_else, n - 1)
        memo[key] = result
        return result

    return go(t1.root, t2.root, depth)


def format_thread(t: RegularThread) -> str:
    """Debug dump, one line per node; not a stability-guaranteed format."""
    lines = [f"root: {t.root}"]
    for ref in sorted(t.nodes, key=str):
        node = t.nodes[ref]
        if isinstance(node, PostCond):
            lines.append(f"{ref}: {node.action} ? {node.then_ref} : {node.else_ref}")
        else:
            lines.append(f"{ref}: {node}")
    return "\n".join(lines)
