"""Networks ``(nu x~)(P0 | ... | Pn-1)`` stepped component by component."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

from .lts import TAU, BoundOutput, FreeInput, FreeOutput, Label, label_sort_key, label_record, moves
from .parser import format_process
from .syntax import UNIT, Par, Process, Res, all_names, fresh_name, free_names, par_chain, restrict, substitute

__all__ = ["NetState", "NetStep", "net_steps", "network_of"]


@dataclass(frozen=True)
class NetState:
    restricted: tuple[str, ...]
    components: tuple[Process, ...]
    provenance: Optional[object] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "restricted", tuple(self.restricted))
        object.__setattr__(self, "components", tuple(self.components))

    def __len__(self) -> int:
        return len(self.components)

    def flatten(self) -> Process:
        return restrict(self.restricted, par_chain(self.components))

    def names(self) -> frozenset[str]:
        out = set(self.restricted)
        for comp in self.components:
            out |= all_names(comp)
        return frozenset(out)

    def free_names(self) -> frozenset[str]:
        out: set[str] = set()
        for comp in self.components:
            out |= free_names(comp)
        return frozenset(out - set(self.restricted))

    def replace(self, updates: dict[int, Process], restricted: Iterable[str] | None = None) -> "NetState":
        comps = list(self.components)
        for k, q in updates.items():
            comps[k] = q
        return NetState(self.restricted if restricted is None else tuple(restricted), tuple(comps))

    def text(self) -> str:
        body = " | ".join(f"[{format_process(c)}]" for c in self.components)
        if self.restricted:
            return f"new {','.join(self.restricted)} in {body}"
        return body

    def record(self) -> dict:
        return {"restricted": list(self.restricted), "components": [format_process(c) for c in self.components]}


@dataclass(frozen=True)
class NetStep:
    """One step of a network, attributed to the components that took part.

    For communications ``sender`` and ``receiver`` are component indices and
    ``obj`` is the name that travelled (``bound`` if its scope was closed).
    """

    label: Label
    participants: frozenset[int]
    source: NetState
    target: NetState
    sender: Optional[int] = None
    receiver: Optional[int] = None
    channel: Optional[str] = None
    obj: Optional[str] = None
    bound: bool = False

    def sort_key(self) -> tuple:
        comm = (self.sender if self.sender is not None else -1, self.receiver if self.receiver is not None else -1)
        return (
            label_sort_key(self.label),
            tuple(sorted(self.participants)),
            comm,
            tuple(format_process(c) for c in self.target.components),
            self.target.restricted,
        )

    def record(self, index: int) -> dict:
        return {
            "index": index,
            "label": label_record(self.label),
            "participants": sorted(self.participants),
            "target": format_process(self.target.flatten()),
        }


def network_of(p: Process, degree: int | None = None) -> NetState:
    """Read a process as a network.

    Top-level restrictions become the restricted tuple.  With ``degree`` the
    right spine of ``|`` is cut into that many components; without it every
    leaf of the top-level parallel tree is a component.
    """
    restricted = []
    while isinstance(p, Res):
        restricted.append(p.name)
        p = p.body
    if degree is not None:
        comps = []
        while len(comps) < degree - 1 and isinstance(p, Par):
            comps.append(p.left)
            p = p.right
        comps.append(p)
        if len(comps) != degree:
            raise ValueError(f"term has fewer than {degree} parallel components")
        return NetState(tuple(restricted), tuple(comps))
    comps = []

    def walk(q: Process) -> None:
        if isinstance(q, Par):
            walk(q.left)
            walk(q.right)
        else:
            comps.append(q)

    walk(p)
    return NetState(tuple(restricted), tuple(comps))


def net_steps(state: NetState, universe: Iterable[str] | None = None, avoid: Iterable[str] = ()) -> list[NetStep]:
    """All steps of ``state``.

    Free inputs receive the names of ``universe`` (default: the network's free
    names) and one fresh name.  Names extruded from a component are renamed
    to primed variants when they already occur elsewhere in the network, so
    bound names shared by symmetric copies never clash with free ones.
    """
    universe = set(state.free_names() if universe is None else universe) - {UNIT}
    avoid = set(avoid)
    restricted = set(state.restricted)
    everything = state.names() | universe | avoid | {UNIT}
    comp_names = [all_names(c) for c in state.components]
    fresh_in = fresh_name("c", everything)
    received = sorted(universe - restricted) + [fresh_in]
    all_moves = [moves(c, everything) for c in state.components]
    steps: list[NetStep] = []

    def others(m: int) -> set[str]:
        out = set(restricted) | universe | avoid
        for j, names in enumerate(comp_names):
            if j != m:
                out |= names
        return out

    for m, ms in enumerate(all_moves):
        for mv in ms:
            if mv.kind == "tau":
                steps.append(NetStep(TAU, frozenset((m,)), state, state.replace({m: mv.target})))
                continue
            if mv.channel in restricted:
                continue
            if mv.kind == "out":
                target, obj = mv.target, mv.obj
                if mv.bound:
                    target, obj = _extrude(mv, others(m), everything)
                    label: Label = BoundOutput(mv.channel, obj)
                    new_restricted = state.restricted
                elif obj in restricted:
                    label = BoundOutput(mv.channel, obj)
                    new_restricted = tuple(x for x in state.restricted if x != obj)
                else:
                    label = FreeOutput(mv.channel, obj)
                    new_restricted = state.restricted
                steps.append(NetStep(label, frozenset((m,)), state, state.replace({m: target}, new_restricted)))
            else:
                for name in received:
                    steps.append(
                        NetStep(FreeInput(mv.channel, name), frozenset((m,)), state, state.replace({m: mv.instantiate(name)}))
                    )
    for m, ms in enumerate(all_moves):
        for o in ms:
            if o.kind != "out":
                continue
            for k, ks in enumerate(all_moves):
                if k == m:
                    continue
                for i in ks:
                    if i.kind != "in" or i.channel != o.channel:
                        continue
                    if o.bound:
                        sent, obj = _extrude(o, others(m), everything)
                        target = state.replace({m: sent, k: i.instantiate(obj)}, state.restricted + (obj,))
                    else:
                        obj = o.obj
                        target = state.replace({m: o.target, k: i.instantiate(obj)})
                    steps.append(
                        NetStep(TAU, frozenset((m, k)), state, target, sender=m, receiver=k,
                                channel=o.channel, obj=obj, bound=o.bound)
                    )
    return sorted(steps, key=NetStep.sort_key)


def _extrude(mv, clash: set[str], everything: frozenset | set) -> tuple[Process, str]:
    if mv.obj not in clash:
        return mv.target, mv.obj
    new = fresh_name(mv.obj, set(everything) | clash | all_names(mv.target))
    return substitute(mv.target, {mv.obj: new}), new
