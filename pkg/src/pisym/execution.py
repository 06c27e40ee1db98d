"""Symmetric executions of symmetric networks.

A *round* takes a symmetric network through ``n`` steps back to a symmetric
network.  In separate choice every first step can be completed to a round by
letting the other copies mimic it (:func:`mimic_round`), which yields a
symmetric execution by repetition (:func:`find_symmetric_execution`).  The
other functions check executions independently of how they were built.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Optional

from .congruence import canonicalize
from .lts import TAU, BoundOutput, FreeInput, FreeOutput, Label, Step, TauLabel, label_record, label_text, transitions
from .network import NetState, NetStep, net_steps
from .parser import format_process, parse
from .symmetry import (
    NotSymmetric,
    Permutation,
    PermutationError,
    SymmetryError,
    SymNet,
    apply_perm,
    recognize_symmetric,
    symmetric_label_sequence,
    symnet_from_state,
)
from .syntax import UNIT, In, Out, Par, Process, Rep, Res, Success, Sum, all_names, free_names, fresh_name, is_separate, rename_free, substitute
from .verdict import Fails, Holds, Unknown, Verdict

log = logging.getLogger(__name__)

__all__ = [
    "NotSeparateError",
    "MimicryError",
    "InvalidStepError",
    "SubdivisionError",
    "Round",
    "SymExecution",
    "Validation",
    "Counterexample",
    "enabled_steps",
    "mimic_round",
    "find_symmetric_execution",
    "validate_symmetric_execution",
    "no_symmetric_execution",
    "confluence_square",
    "confluence_pairs",
    "subdivide",
    "execution_from_records",
]

TERMINATED, TRUNCATED = "terminated", "truncated"


class NotSeparateError(ValueError):
    """The construction only applies to separate-choice terms."""


class MimicryError(RuntimeError):
    """No mimicking steps restore symmetry.  For separate choice this should never happen."""


class InvalidStepError(ValueError):
    pass


class SubdivisionError(ValueError):
    pass


@dataclass(frozen=True)
class Round:
    """``n`` steps from one symmetric network to the next.

    ``label_names`` is the restricted tuple against which bound-output
    counterparts are judged: the previous restricted names, extended by the
    alpha-converted family when a copy extruded one of its own bound names.
    """

    labels: tuple[Label, ...]
    steps: tuple[NetStep, ...]
    end: SymNet
    label_names: tuple[str, ...]

    @property
    def sigma(self) -> Permutation:
        return self.end.sigma

    @property
    def restricted(self) -> tuple[str, ...]:
        return self.end.restricted

    @property
    def intermediate(self) -> tuple[NetState, ...]:
        return tuple(s.target for s in self.steps[:-1])

    def record(self, index: int) -> dict:
        return {
            "record": "round",
            "round": index,
            "labels": [label_record(l) for l in self.labels],
            "sigma": [list(p) for p in self.sigma.pairs],
            "sigma_text": self.sigma.text(),
            "x_tilde": list(self.restricted),
            "label_names": list(self.label_names),
            "end": format_process(self.end.flatten()),
        }


def _step_record(step: NetStep, index: int, round_index: int) -> dict:
    return {
        "record": "step",
        "index": index,
        "round": round_index,
        "label": label_record(step.label),
        "text": label_text(step.label),
        "participants": sorted(step.participants),
        "sender": step.sender,
        "receiver": step.receiver,
        "channel": step.channel,
        "object": step.obj,
        "bound": step.bound,
        "target": {
            "restricted": list(step.target.restricted),
            "components": [format_process(c, explicit=True) for c in step.target.components],
        },
    }


@dataclass(frozen=True)
class SymExecution:
    start: SymNet
    rounds: tuple[Round, ...]
    status: str
    lasso: Optional[int] = None

    @property
    def steps(self) -> tuple[NetStep, ...]:
        return tuple(s for r in self.rounds for s in r.steps)

    @property
    def labels(self) -> tuple[Label, ...]:
        return tuple(s.label for s in self.steps)

    @property
    def end(self) -> SymNet:
        return self.rounds[-1].end if self.rounds else self.start

    def records(self) -> list[dict]:
        """Line-delimited structured form; :func:`execution_from_records` reads it back."""
        start = self.start
        out: list[dict] = [{
            "record": "start",
            "seed": format_process(start.seed, explicit=True),
            "degree": start.degree,
            "sigma": [list(p) for p in start.sigma.pairs],
            "x_tilde": list(start.restricted),
            "network": format_process(start.flatten()),
        }]
        k = 0
        for r, rnd in enumerate(self.rounds):
            for step in rnd.steps:
                out.append(_step_record(step, k, r))
                k += 1
            out.append(rnd.record(r))
        out.append({"record": "status", "status": self.status, "lasso": self.lasso, "rounds": len(self.rounds)})
        return out

    def describe(self) -> str:
        lines = [f"start  {format_process(self.start.flatten())}   sigma={self.start.sigma.text()}"]
        for r, rnd in enumerate(self.rounds):
            for step in rnd.steps:
                parts = ",".join(map(str, sorted(step.participants)))
                lines.append(f"  --{label_text(step.label)}--> [{parts}]  {step.target.text()}")
            lines.append(f"round {r + 1}: symmetric, sigma={rnd.sigma.text()}, x~=({','.join(rnd.restricted)})")
        tail = self.status if self.lasso is None else f"{self.status} (revisits the state after round {self.lasso})"
        lines.append(tail)
        return "\n".join(lines)


@dataclass(frozen=True)
class Validation:
    ok: bool
    round: Optional[int] = None
    step: Optional[int] = None
    reason: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class Counterexample:
    process: Process
    out_step: Step
    in_step: Step
    reason: str

    def __bool__(self) -> bool:
        return False


_LABELS = {"in": FreeInput, "out": FreeOutput, "bout": BoundOutput}


def _label_from(rec: dict) -> Label:
    if rec["kind"] == "tau":
        return TAU
    return _LABELS[rec["kind"]](rec["channel"], rec["object"])


def execution_from_records(records: Iterable[dict]) -> SymExecution:
    """Rebuild a :class:`SymExecution` from :meth:`SymExecution.records` output (for replay)."""
    records = list(records)
    head = records[0]
    if head.get("record") != "start":
        raise ValueError("first record must be the start record")
    n = head["degree"]
    sigma = Permutation.from_mapping(dict(map(tuple, head["sigma"])), n)
    from .symmetry import build_symmetric

    start = build_symmetric(parse(head["seed"]), n, sigma, tuple(head["x_tilde"]))
    state = start.state
    rounds: list[Round] = []
    pending: list[NetStep] = []
    status, lasso = TRUNCATED, None
    for rec in records[1:]:
        kind = rec.get("record")
        if kind == "step":
            tgt = rec["target"]
            target = NetState(tuple(tgt["restricted"]), tuple(parse(c) for c in tgt["components"]))
            pending.append(NetStep(
                _label_from(rec["label"]), frozenset(rec["participants"]), state, target,
                rec["sender"], rec["receiver"], rec["channel"], rec["object"], rec["bound"],
            ))
            state = target
        elif kind == "round":
            sig = Permutation.from_mapping(dict(map(tuple, rec["sigma"])), n)
            end = symnet_from_state(state, sig)
            if isinstance(end, NotSymmetric):
                end = SymNet(state.components[0], n, state.restricted, sig, state.components)
            labels = tuple(_label_from(l) for l in rec["labels"])
            rounds.append(Round(labels, tuple(pending), end, tuple(rec["label_names"])))
            pending = []
        elif kind == "status":
            status, lasso = rec["status"], rec.get("lasso")
    return SymExecution(start, tuple(rounds), status, lasso)


# ---------------------------------------------------------------- mimicry


def enabled_steps(net: SymNet) -> list[NetStep]:
    """Steps considered for the first move of a round, in deterministic order.

    The environment only sends names fixed by sigma (plus a fresh one), since
    a received name is not renamed in the counterparts.
    """
    fixed = {a for a in net.state.free_names() if net.sigma(a) == a}
    return net_steps(net.state, fixed, avoid=net.sigma.support)


def _received(label: Label) -> set[str]:
    return {label.obj} if isinstance(label, FreeInput) else set()


def _check_step(net: SymNet, first: NetStep) -> None:
    universe = set(net.state.free_names()) | _received(first.label)
    for step in net_steps(net.state, universe, avoid=net.sigma.support):
        if step.label == first.label and step.target == first.target and step.participants == first.participants:
            return
    raise InvalidStepError("first step is not a step of the network")


def _extend(sigma: Permutation, family: list[str]) -> Permutation:
    mapping = sigma.as_dict()
    n = sigma.degree
    for t, name in enumerate(family):
        mapping[name] = family[(t + 1) % n]
    return Permutation.from_mapping(mapping, n)


def mimic_round(net: SymNet, first: NetStep) -> Round:
    """Complete ``first`` to a round by letting the other copies mimic it."""
    if not is_separate(net.seed):
        raise NotSeparateError("mimicry needs a separate-choice seed")
    _check_step(net, first)
    if len(first.participants) == 1:
        return _mimic_single(net, first)
    return _mimic_comm(net, first)


def _mimic_single(net: SymNet, first: NetStep) -> Round:
    n, sigma = net.degree, net.sigma
    (i,) = first.participants
    mu = first.label
    head = first.target.components[i]
    local = isinstance(mu, BoundOutput) and mu.obj not in net.restricted
    expected = symmetric_label_sequence(mu, n, sigma, net.restricted)
    family = [mu.obj] if local else []
    state, steps = first.target, [first]
    for j in range(1, n):
        k = (i + j) % n
        s_j = sigma.power(j)
        try:
            want = apply_perm(s_j, head)
        except SymmetryError as exc:
            raise MimicryError(f"copy {k} cannot mirror the first step: {exc}") from exc
        universe = set(state.free_names()) | _received(expected[j])
        chosen = None
        for step in net_steps(state, universe, avoid=sigma.support | set(family)):
            if step.participants != {k}:
                continue
            if local:
                lab = step.label
                if not (isinstance(lab, BoundOutput) and lab.channel == s_j(mu.channel) and lab.obj not in net.restricted):
                    continue
                if step.target.components[k] != rename_free(want, {mu.obj: lab.obj}):
                    continue
            elif step.label != expected[j] or step.target.components[k] != want:
                continue
            chosen = step
            break
        if chosen is None:
            raise MimicryError(f"copy {k} has no step mirroring {label_text(mu)}")
        steps.append(chosen)
        state = chosen.target
        if local:
            family.append(chosen.label.obj)
    new_sigma = _extend(sigma, family) if local else sigma
    label_names = net.restricted + tuple(family) if local else net.restricted
    return _finish(net, steps, state, new_sigma, label_names)


def _comm_order(n: int, s: int, d: int) -> list[int]:
    """Senders of the mimicking communications ``m -> m+d``.

    Walking each cycle of ``i -> i+d`` backwards makes every copy send
    before it receives, except where the cycle is entered.
    """
    order, covered = [], {s}
    m = (s - d) % n
    while m != s:
        order.append(m)
        covered.add(m)
        m = (m - d) % n
    for c in range(n):
        m = (s + c) % n
        while m not in covered:
            order.append(m)
            covered.add(m)
            m = (m - d) % n
    return order


def _mimic_comm(net: SymNet, first: NetStep) -> Round:
    n, sigma = net.degree, net.sigma
    s, r = first.sender, first.receiver
    d = (r - s) % n
    order = _comm_order(n, s, d)

    def search(state: NetState, idx: int, steps: list[NetStep], family: dict[int, str]) -> Optional[Round]:
        if idx == len(order):
            fam = [family[t] for t in range(n)] if first.bound else []
            new_sigma = _extend(sigma, fam) if first.bound else sigma
            try:
                return _finish(net, steps, state, new_sigma, net.restricted)
            except MimicryError:
                return None
        m = order[idx]
        q = (m + d) % n
        t = (m - s) % n
        s_t = sigma.power(t)
        for step in net_steps(state, (), avoid=sigma.support | set(family.values())):
            if step.sender != m or step.receiver != q or step.bound != first.bound:
                continue
            if step.channel != s_t(first.channel):
                continue
            if not first.bound and step.obj != s_t(first.obj):
                continue
            fam = {**family, t: step.obj} if first.bound else family
            found = search(step.target, idx + 1, steps + [step], fam)
            if found is not None:
                return found
        return None

    result = search(first.target, 0, [first], {0: first.obj} if first.bound else {})
    if result is None:
        raise MimicryError(f"no mimicking communications restore symmetry after copy {s} sent to copy {r}")
    return result


def _finish(net: SymNet, steps: list[NetStep], state: NetState, sigma: Permutation, label_names) -> Round:
    end = symnet_from_state(state, sigma)
    if isinstance(end, NotSymmetric):
        raise MimicryError(f"round does not end symmetric: {end.reason}")
    labels = tuple(s.label for s in steps)
    if list(labels) != symmetric_label_sequence(labels[0], net.degree, sigma, label_names):
        raise MimicryError("round labels are not a symmetric sequence")
    return Round(labels, tuple(steps), end, tuple(label_names))


def find_symmetric_execution(net: SymNet, max_rounds: int = 64) -> SymExecution:
    """Greedy symmetric execution: least enabled step, then mimicry, until stuck or out of budget."""
    if not is_separate(net.seed):
        raise NotSeparateError("symmetric executions are only guaranteed for separate choice")
    current = net
    rounds: list[Round] = []
    seen = {canonicalize(net.flatten()): 0}
    while True:
        steps = enabled_steps(current)
        if not steps:
            return SymExecution(net, tuple(rounds), TERMINATED)
        if len(rounds) >= max_rounds:
            return SymExecution(net, tuple(rounds), TRUNCATED)
        rnd = mimic_round(current, steps[0])
        rounds.append(rnd)
        current = rnd.end
        key = canonicalize(current.flatten())
        if key in seen:
            log.debug("state after round %d revisits round %d", len(rounds), seen[key])
            return SymExecution(net, tuple(rounds), TRUNCATED, lasso=seen[key])
        seen[key] = len(rounds)


# ---------------------------------------------------------------- validation


def replays(source: Process, label: Label, target: Process) -> bool:
    """True iff ``source --label--> target`` is a transition up to congruence (and alpha on bound outputs)."""
    universe = set(free_names(source)) | (set(label.names) - {UNIT})
    want = canonicalize(target)
    for step in transitions(source, universe):
        if step.label == label and step.target == want:
            return True
        if (
            isinstance(label, BoundOutput)
            and isinstance(step.label, BoundOutput)
            and step.label.channel == label.channel
            and label.obj not in free_names(source)
        ):
            # compare the abstractions opened by the two extruded names
            pivot = fresh_name("e", all_names(source) | all_names(target) | all_names(step.target))
            if canonicalize(substitute(target, {label.obj: pivot})) == canonicalize(
                substitute(step.target, {step.label.obj: pivot})
            ):
                return True
    return False


def validate_symmetric_execution(e: SymExecution) -> Validation:
    start = e.start
    n = start.degree
    seed = recognize_symmetric(start.state, start.sigma)
    if isinstance(seed, NotSymmetric) or seed != start.seed:
        return Validation(False, 0, None, "start is not the symmetric network it claims to be")
    prev = start
    for r, rnd in enumerate(e.rounds):
        if len(rnd.steps) != n:
            return Validation(False, r, None, f"round has {len(rnd.steps)} steps, expected {n}")
        state = prev.state
        for k, step in enumerate(rnd.steps):
            if step.source != state:
                return Validation(False, r, k, "step does not start where the previous one ended")
            if len(step.participants) not in (1, 2) or (len(step.participants) == 2 and not isinstance(step.label, TauLabel)):
                return Validation(False, r, k, "bad participant set")
            if not replays(state.flatten(), step.label, step.target.flatten()):
                return Validation(False, r, k, "step does not replay")
            state = step.target
        if state != rnd.end.state:
            return Validation(False, r, n - 1, "round end differs from the last step's target")
        sigma = rnd.sigma
        if sigma.degree != n or not sigma.extends(prev.sigma):
            return Validation(False, r, None, "sigma does not extend the previous symmetry relation")
        seed = recognize_symmetric(rnd.end.state, sigma)
        if isinstance(seed, NotSymmetric) or seed != rnd.end.seed:
            return Validation(False, r, None, "round does not end in a symmetric network")
        labels = tuple(s.label for s in rnd.steps)
        if labels != rnd.labels:
            return Validation(False, r, None, "recorded labels differ from the steps")
        extruded = {l.obj for l in labels if isinstance(l, BoundOutput)}
        extra = set(rnd.label_names) - set(prev.restricted)
        if not set(prev.restricted) <= set(rnd.label_names) or not extra <= extruded:
            return Validation(False, r, None, "label scope is neither the restricted names nor their extension")
        if list(labels) != symmetric_label_sequence(labels[0], n, sigma, rnd.label_names):
            return Validation(False, r, None, "labels are not a symmetric sequence")
        prev = rnd.end
    if e.status == TERMINATED and transitions(prev.flatten()):
        return Validation(False, len(e.rounds), None, "execution claims to terminate but the end can still move")
    if e.status not in (TERMINATED, TRUNCATED):
        return Validation(False, None, None, f"unknown status {e.status!r}")
    return Validation(True)


# ---------------------------------------------------------------- refutation


def _align(p: Process, q: Process, f: dict[str, str], bound: frozenset = frozenset()) -> bool:
    """Match ``q`` against ``p`` with free names renamed by ``f`` (extended in place)."""

    def name(a: str, b: str) -> bool:
        if a in bound or b in bound or a == UNIT or b == UNIT:
            return a == b
        if a in f:
            return f[a] == b
        f[a] = b
        return True

    if type(p) is not type(q):
        return False
    if isinstance(p, Sum):
        if len(p.branches) != len(q.branches):
            return False
        for (g, c), (h, e) in zip(p.branches, q.branches):
            if type(g) is not type(h):
                return False
            if isinstance(g, Out):
                if not (name(g.channel, h.channel) and name(g.obj, h.obj) and _align(c, e, f, bound)):
                    return False
            elif isinstance(g, In):
                if g.binder != h.binder or not name(g.channel, h.channel):
                    return False
                if not _align(c, e, f, bound | {g.binder}):
                    return False
            elif not _align(c, e, f, bound):
                return False
        return True
    if isinstance(p, Par):
        return _align(p.left, q.left, f, bound) and _align(p.right, q.right, f, bound)
    if isinstance(p, Res):
        return p.name == q.name and _align(p.body, q.body, f, bound | {p.name})
    if isinstance(p, Rep):
        return _align(p.body, q.body, f, bound)
    return isinstance(p, Success)


def _infer_sigma(prev: Permutation, labels: list[Label], state: NetState, avoid: Iterable[str]) -> Optional[Permutation]:
    """The unique-up-to-padding extension of ``prev`` under which ``state`` and ``labels`` are symmetric."""
    n = prev.degree
    f = prev.as_dict()
    for i in range(n):
        if not _align(state.components[i], state.components[(i + 1) % n], f):
            return None
    for j in range(n):
        a, b = labels[j], labels[(j + 1) % n]
        if isinstance(a, TauLabel) or isinstance(b, TauLabel):
            if not (isinstance(a, TauLabel) and isinstance(b, TauLabel)):
                return None
            continue
        if isinstance(a, FreeInput) != isinstance(b, FreeInput):
            return None
        if f.setdefault(a.channel, b.channel) != b.channel:
            return None
        if isinstance(a, FreeInput):
            if a.obj != b.obj:
                return None
        elif a.obj == UNIT or b.obj == UNIT:
            if a.obj != b.obj:
                return None
        elif f.setdefault(a.obj, b.obj) != b.obj:
            return None
    f = {a: b for a, b in f.items() if a != b}
    if len(set(f.values())) != len(f):
        return None
    # close open chains into cycles whose length divides n, padding with fresh names
    used = set(avoid) | set(f) | set(f.values())
    for start in [a for a in f if a not in f.values()]:
        chain = [start]
        while chain[-1] in f:
            chain.append(f[chain[-1]])
        length = next((L for L in range(len(chain), n + 1) if n % L == 0), None)
        if length is None:
            return None
        while len(chain) < length:
            pad = fresh_name("s", used)
            used.add(pad)
            f[chain[-1]] = pad
            chain.append(pad)
        f[chain[-1]] = start
    try:
        sigma = Permutation.from_mapping(f, n)
    except (PermutationError, SymmetryError):
        return None
    if isinstance(recognize_symmetric(state, sigma), NotSymmetric):
        return None
    return sigma


def _check_round(prev: SymNet, steps: list[NetStep]) -> Round | str:
    n = prev.degree
    labels = [s.label for s in steps]
    end_state = steps[-1].target
    sigma = _infer_sigma(prev.sigma, labels, end_state, end_state.names())
    if sigma is None:
        if _infer_sigma(prev.sigma, [TAU] * n, end_state, end_state.names()) is None:
            return "does not end in a symmetric network"
        return "ends symmetric but its labels are not counterparts of each other"
    family = tuple(sorted(sigma.support - prev.sigma.support))
    for names in (prev.restricted, prev.restricted + family):
        if labels == symmetric_label_sequence(labels[0], n, sigma, names):
            end = symnet_from_state(end_state, sigma)
            return Round(tuple(labels), tuple(steps), end, names)
    return "labels of the round are not a symmetric sequence"


@dataclass(frozen=True)
class Refutation:
    steps: tuple[NetStep, ...]
    round: int
    reason: str

    def text(self) -> str:
        labels = " ".join(label_text(s.label) for s in self.steps)
        return f"{labels or '(empty)'}: round {self.round + 1} {self.reason}"


def no_symmetric_execution(net: SymNet, depth: int = 512) -> Verdict:
    """Exhaustively decide whether every execution of ``net`` breaks symmetry.

    Holds carries one refuted prefix per class of executions (up to
    congruence); Fails carries a symmetric execution; Unknown means the depth
    bound cut a prefix that was still symmetric.
    """
    n = net.degree
    refuted: dict = {}
    found: list[SymExecution] = []
    cut = [False]

    def refute(steps: list[NetStep], r: int, reason: str) -> None:
        key = tuple((s.label, canonicalize(s.target.flatten())) for s in steps)
        refuted.setdefault(key, Refutation(tuple(steps), r, reason))

    def walk(prev: SymNet, state: NetState, steps: list[NetStep], rounds: list[Round], spent: frozenset) -> None:
        if found:
            return
        k = len(steps)
        if k and k % n == 0:
            rnd = _check_round(prev, steps[-n:])
            if isinstance(rnd, str):
                refute(steps, len(rounds), rnd)
                return
            rounds = rounds + [rnd]
            prev = rnd.end
        # extruded names stay spent even if they vanish, so every run picks distinct ones
        succ = net_steps(state, avoid=net.sigma.support | spent)
        if not succ:
            if k % n == 0:
                found.append(SymExecution(net, tuple(rounds), TERMINATED))
            else:
                refute(steps, len(rounds), f"execution stops after {k} steps, not a multiple of {n}")
            return
        if k >= depth:
            cut[0] = True
            return
        for step in succ:
            extruded = {step.obj} if step.bound else set()
            if isinstance(step.label, BoundOutput):
                extruded.add(step.label.obj)
            walk(prev, step.target, steps + [step], rounds, spent | extruded)

    walk(net, net.state, [], [], frozenset())
    if found:
        return Fails(found[0], "a symmetric execution exists")
    if cut[0]:
        return Unknown(f"depth bound {depth} reached on a still-symmetric prefix")
    witnesses = sorted(refuted.values(), key=lambda w: [s.sort_key() for s in w.steps])
    return Holds(tuple(witnesses), f"all {len(witnesses)} execution classes break symmetry")


# ---------------------------------------------------------------- confluence


def confluence_square(p: Process, out_step: Step, in_step: Step, force: bool = False) -> Process | Counterexample:
    """Close an output step and an input step of ``p`` to a common successor."""
    if not force and not is_separate(p):
        raise NotSeparateError("confluence is only claimed for separate choice (pass force to check anyway)")
    out_label, in_label = out_step.label, in_step.label
    if not isinstance(out_label, (FreeOutput, BoundOutput)) or not isinstance(in_label, FreeInput):
        raise ValueError("need an output step and an input step")
    universe = set(free_names(p)) | (set(out_label.names) | set(in_label.names)) - {UNIT}
    via_out = {
        s.target
        for s in transitions(out_step.target, universe | free_names(out_step.target))
        if s.label == in_label
    }
    via_in = set()
    for s in transitions(in_step.target, universe | free_names(in_step.target)):
        if s.label == out_label:
            via_in.add(s.target)
        elif isinstance(out_label, BoundOutput) and isinstance(s.label, BoundOutput) and s.label.channel == out_label.channel:
            via_in.add(canonicalize(substitute(s.target, {s.label.obj: out_label.obj})))
    common = via_out & via_in
    if common:
        return min(common, key=format_process)
    return Counterexample(p, out_step, in_step, "the two steps do not commute")


def confluence_pairs(p: Process, force: bool = False, universe: Iterable[str] | None = None):
    """Check every (output, input) pair of steps of ``p``; yields ``(out, in, result)``."""
    steps = transitions(p, universe)
    outs = [s for s in steps if isinstance(s.label, (FreeOutput, BoundOutput))]
    ins = [s for s in steps if isinstance(s.label, FreeInput)]
    for o in outs:
        for i in ins:
            yield o, i, confluence_square(p, o, i, force=force)


# ---------------------------------------------------------------- subdivision


def _unbound(label: Label) -> Label:
    return FreeOutput(label.channel, label.obj) if isinstance(label, BoundOutput) else label


def _label_in_round(label: Label, round_labels: tuple[Label, ...], fresh: set[str]) -> bool:
    """``label`` or its unbound variant occurs in the round; extruded names count up to renaming."""
    for other in round_labels:
        if label == other or _unbound(label) == _unbound(other):
            return True
        if (
            isinstance(label, (FreeOutput, BoundOutput))
            and isinstance(other, (FreeOutput, BoundOutput))
            and label.channel == other.channel
            and label.obj in fresh
            and other.obj in fresh
        ):
            return True
    return False


def subdivide(e: SymExecution, n_sub: int) -> SymExecution:
    """Replay ``e`` on the first ``n_sub`` copies, which form a symmetric network of their own."""
    net = e.start
    n = net.degree
    if not 0 < n_sub < n or n % n_sub or not net.sigma.power(n_sub).is_identity():
        raise SubdivisionError(f"sigma^{n_sub} is not the identity for a proper divisor {n_sub} of {n}")
    comps = net.components[:n_sub]
    inside = set().union(*(free_names(c) for c in comps))
    restricted = tuple(x for x in net.restricted if x in inside)
    sub = symnet_from_state(NetState(restricted, comps), net.sigma.with_degree(n_sub))
    if isinstance(sub, NotSymmetric):
        raise SubdivisionError(sub.reason)
    start, current = sub, sub
    original_free = set(net.state.free_names())
    rounds: list[Round] = []
    for r, rnd in enumerate(e.rounds):
        fresh = set().union(*(l.names for l in rnd.labels)) - original_free - {UNIT}
        chosen = None
        candidates = enabled_steps(current)
        candidates.sort(key=lambda s: (s.label != rnd.labels[0], s.sort_key()))
        for step in candidates:
            if not _label_in_round(step.label, rnd.labels, fresh | (set(step.label.names) - original_free - {UNIT})):
                continue
            try:
                attempt = mimic_round(current, step)
            except MimicryError:
                continue
            extra = set().union(*(l.names for l in attempt.labels)) - original_free - {UNIT}
            if all(_label_in_round(l, rnd.labels, fresh | extra) for l in attempt.labels):
                chosen = attempt
                break
        if chosen is None:
            raise SubdivisionError(f"round {r + 1} has no counterpart on the subnetwork")
        rounds.append(chosen)
        current = chosen.end
        original_free |= fresh
    status = e.status
    if status == TERMINATED and enabled_steps(current):
        raise SubdivisionError("subnetwork can still move after the original execution terminated")
    return SymExecution(start, tuple(rounds), status)
