"""Labelled transitions.

Moves are computed structurally with scope extrusion handled by open/close,
which yields the same transitions as closing the rules under structural
congruence.  Inputs are first produced as abstractions (channel, binder,
body) and only instantiated at the top, so communications never depend on the
input universe.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Union

from .congruence import canonicalize
from .parser import format_name, format_process
from .syntax import (
    UNIT,
    In,
    Out,
    Par,
    Process,
    Rep,
    Res,
    Success,
    Sum,
    all_names,
    fresh_name,
    free_names,
    substitute,
)

__all__ = [
    "TauLabel",
    "FreeInput",
    "FreeOutput",
    "BoundOutput",
    "Label",
    "TAU",
    "Step",
    "Trace",
    "Move",
    "moves",
    "transitions",
    "tau_transitions",
    "max_executions",
    "label_perm",
    "label_text",
    "label_record",
    "fresh_input_name",
]


# ---------------------------------------------------------------- labels


@dataclass(frozen=True)
class TauLabel:
    kind = "tau"

    @property
    def names(self) -> frozenset[str]:
        return frozenset()


@dataclass(frozen=True)
class FreeInput:
    channel: str
    obj: str
    kind = "in"

    @property
    def names(self) -> frozenset[str]:
        return frozenset((self.channel, self.obj))


@dataclass(frozen=True)
class FreeOutput:
    channel: str
    obj: str
    kind = "out"

    @property
    def names(self) -> frozenset[str]:
        return frozenset((self.channel, self.obj))


@dataclass(frozen=True)
class BoundOutput:
    channel: str
    obj: str
    kind = "bout"

    @property
    def names(self) -> frozenset[str]:
        return frozenset((self.channel, self.obj))


Label = Union[TauLabel, FreeInput, FreeOutput, BoundOutput]
TAU = TauLabel()

_KIND_ORDER = {"tau": 0, "out": 1, "bout": 2, "in": 3}


def label_text(label: Label) -> str:
    if isinstance(label, TauLabel):
        return "tau"
    chan = format_name(label.channel)
    obj = "" if label.obj == UNIT else format_name(label.obj)
    if isinstance(label, FreeInput):
        return f"{chan}?{obj}"
    if isinstance(label, FreeOutput):
        return f"{chan}!{obj}"
    return f"{chan}!({obj})"


def label_record(label: Label) -> dict:
    if isinstance(label, TauLabel):
        return {"kind": "tau", "channel": None, "object": None}
    return {"kind": label.kind, "channel": label.channel, "object": label.obj}


def label_sort_key(label: Label) -> tuple:
    if isinstance(label, TauLabel):
        return (0, "", "")
    return (_KIND_ORDER[label.kind], label.channel, label.obj)


def label_perm(sigma, label: Label) -> Label:
    """Apply a name permutation (callable or mapping) to a label."""
    image = _image(sigma)
    if isinstance(label, TauLabel):
        return label
    return type(label)(image(label.channel), image(label.obj))


def _image(sigma) -> Callable[[str], str]:
    if callable(sigma):
        return sigma
    return lambda name: sigma.get(name, name)


# ---------------------------------------------------------------- raw moves


@dataclass(frozen=True)
class Move:
    """A transition before input instantiation.

    ``kind`` is ``"tau"``, ``"out"`` or ``"in"``.  For outputs ``obj`` is the
    sent name and ``bound`` marks scope extrusion; for inputs ``obj`` is the
    binder, free in ``target``.  ``parts`` holds the parallel-tree paths of
    the leaves that took part.
    """

    kind: str
    target: Process
    parts: frozenset
    channel: str = ""
    obj: str = ""
    bound: bool = False

    def instantiate(self, name: str) -> Process:
        return substitute(self.target, {self.obj: name})


def moves(p: Process, avoid: Iterable[str] = ()) -> list[Move]:
    """All moves of ``p``; fresh names are chosen outside ``avoid`` and the names of ``p``."""
    used = set(avoid) | all_names(p) | {UNIT}
    return _moves(p, (), used)


def _moves(p: Process, path: tuple, used: set[str]) -> list[Move]:
    if isinstance(p, Sum):
        parts = frozenset((path,))
        out = []
        for guard, cont in p.branches:
            if isinstance(guard, Out):
                out.append(Move("out", cont, parts, guard.channel, guard.obj))
            elif isinstance(guard, In):
                binder = fresh_name(guard.binder, used)
                used.add(binder)
                body = substitute(cont, {guard.binder: binder})
                out.append(Move("in", body, parts, guard.channel, binder))
            else:
                out.append(Move("tau", cont, parts))
        return out
    if isinstance(p, Par):
        left = _moves(p.left, path + (0,), used)
        right = _moves(p.right, path + (1,), used)
        out = [_lift(m, lambda t: Par(t, p.right), p.right, used) for m in left]
        out += [_lift(m, lambda t: Par(p.left, t), p.left, used) for m in right]
        for o in left:
            for i in right:
                if o.kind == "out" and i.kind == "in" and o.channel == i.channel:
                    out.append(_comm(o, i, p.right, lambda a, b: Par(a, b), used))
        for o in right:
            for i in left:
                if o.kind == "out" and i.kind == "in" and o.channel == i.channel:
                    out.append(_comm(o, i, p.left, lambda a, b: Par(b, a), used))
        return out
    if isinstance(p, Res):
        out = []
        for m in _moves(p.body, path, used):
            if m.kind == "tau":
                out.append(Move("tau", Res(p.name, m.target), m.parts))
            elif m.channel == p.name:
                continue
            elif m.kind == "out" and m.obj == p.name:
                out.append(Move("out", m.target, m.parts, m.channel, m.obj, bound=True))
            else:
                out.append(Move(m.kind, Res(p.name, m.target), m.parts, m.channel, m.obj, m.bound))
        return out
    if isinstance(p, Rep):
        parts = frozenset((path,))
        single = _moves(p.body, path, used)
        out = [Move(m.kind, Par(m.target, p), parts, m.channel, m.obj, m.bound) for m in single]
        for o in single:
            for i in single:
                if o.kind == "out" and i.kind == "in" and o.channel == i.channel:
                    # P | !P where the left copy sends and the unfolded copy receives, and vice versa
                    out.append(_replace_parts(_comm(o, i, p, lambda a, b: Par(a, Par(b, p)), used), parts))
                    out.append(_replace_parts(_comm(o, i, p, lambda a, b: Par(b, Par(a, p)), used), parts))
        return out
    if isinstance(p, Success):
        return []
    raise TypeError(f"not a process: {p!r}")


def _replace_parts(m: Move, parts: frozenset) -> Move:
    return Move(m.kind, m.target, parts, m.channel, m.obj, m.bound)


def _lift(m: Move, wrap, other: Process, used: set[str]) -> Move:
    if m.kind == "out" and m.bound and m.obj in other.fn:
        new = fresh_name(m.obj, used)
        used.add(new)
        return Move("out", wrap(substitute(m.target, {m.obj: new})), m.parts, m.channel, new, True)
    return Move(m.kind, wrap(m.target), m.parts, m.channel, m.obj, m.bound)


def _comm(o: Move, i: Move, receiver_side: Process, combine, used: set[str]) -> Move:
    parts = o.parts | i.parts
    if not o.bound:
        return Move("tau", combine(o.target, i.instantiate(o.obj)), parts)
    name = o.obj
    sender = o.target
    if name in all_names(receiver_side):
        name = fresh_name(name, used)
        used.add(name)
        sender = substitute(sender, {o.obj: name})
    return Move("tau", Res(name, combine(sender, i.instantiate(name))), parts)


def move_label(m: Move, obj: str | None = None) -> Label:
    if m.kind == "tau":
        return TAU
    if m.kind == "out":
        return BoundOutput(m.channel, m.obj) if m.bound else FreeOutput(m.channel, m.obj)
    return FreeInput(m.channel, obj)


# ---------------------------------------------------------------- steps


@dataclass(frozen=True)
class Step:
    label: Label
    target: Process
    participants: frozenset[int]

    def sort_key(self) -> tuple:
        return (label_sort_key(self.label), tuple(sorted(self.participants)), format_process(self.target))

    def record(self, index: int) -> dict:
        return {
            "index": index,
            "label": label_record(self.label),
            "participants": sorted(self.participants),
            "target": format_process(self.target),
        }


def leaf_paths(p: Process) -> list[tuple]:
    """Paths of the leaves of the top-level parallel tree, left to right."""
    out: list[tuple] = []

    def walk(q: Process, path: tuple) -> None:
        while isinstance(q, Res):
            q = q.body
        if isinstance(q, Par):
            walk(q.left, path + (0,))
            walk(q.right, path + (1,))
        else:
            out.append(path)

    walk(p, ())
    return out


def fresh_input_name(p: Process, universe: Iterable[str] = ()) -> str:
    return fresh_name("c", all_names(p) | set(universe))


def transitions(p: Process, universe: Iterable[str] | None = None) -> list[Step]:
    """Every step of ``p`` with canonicalized targets, sorted deterministically.

    Free inputs receive each name of ``universe`` (default: the free names of
    ``p``) plus one canonical fresh name.
    """
    universe = set(free_names(p) if universe is None else universe)
    index = {path: k for k, path in enumerate(leaf_paths(p))}
    fresh = fresh_input_name(p, universe)
    received = sorted(universe - {UNIT}) + [fresh]
    steps = set()
    for m in moves(p, universe):
        participants = frozenset(index[path] for path in m.parts)
        if m.kind == "in":
            for name in received:
                steps.add(Step(FreeInput(m.channel, name), canonicalize(m.instantiate(name)), participants))
        else:
            steps.add(Step(move_label(m), canonicalize(m.target), participants))
    return sorted(steps, key=Step.sort_key)


def tau_transitions(p: Process) -> list[Step]:
    index = {path: k for k, path in enumerate(leaf_paths(p))}
    steps = {
        Step(TAU, canonicalize(m.target), frozenset(index[path] for path in m.parts))
        for m in moves(p)
        if m.kind == "tau"
    }
    return sorted(steps, key=Step.sort_key)


# ---------------------------------------------------------------- executions


@dataclass(frozen=True)
class Trace:
    start: Process
    steps: tuple[Step, ...]
    truncated: bool = False
    lasso: bool = False

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(s.label for s in self.steps)

    @property
    def end(self) -> Process:
        return self.steps[-1].target if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)

    def records(self) -> list[dict]:
        return [s.record(k) for k, s in enumerate(self.steps)]


def max_executions(
    p: Process,
    depth: int,
    tau_only: bool = False,
    modulo_congruence: bool = True,
    universe: Iterable[str] = (),
) -> list[Trace]:
    """All maximal executions of length at most ``depth``.

    Executions cut by the depth bound are returned with ``truncated`` set;
    revisiting a state already on the current path ends the trace as a lasso
    (also ``truncated``, since it extends to an infinite execution).
    """
    if depth < 0:
        raise ValueError("depth must be non-negative")
    extra = set(universe)
    start = canonicalize(p)
    found: dict = {}

    def successors(state: Process) -> list[Step]:
        if tau_only:
            return tau_transitions(state)
        return transitions(state, free_names(state) | extra)

    def key(steps: tuple[Step, ...]):
        if modulo_congruence:
            return tuple((s.label, s.target) for s in steps)
        return steps

    def walk(state: Process, steps: tuple[Step, ...], seen: frozenset) -> None:
        succ = successors(state)
        if not succ:
            found.setdefault(key(steps), Trace(p, steps))
            return
        if len(steps) >= depth:
            found.setdefault(key(steps), Trace(p, steps, truncated=True))
            return
        for step in succ:
            if step.target in seen:
                found.setdefault(key(steps + (step,)), Trace(p, steps + (step,), truncated=True, lasso=True))
                continue
            walk(step.target, steps + (step,), seen | {step.target})

    walk(start, (), frozenset((start,)))
    return sorted(found.values(), key=lambda t: [s.sort_key() for s in t.steps])
