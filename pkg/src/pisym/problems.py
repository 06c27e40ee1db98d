"""Problem predicates on networks and the bundled example networks."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable, Optional

from .lts import FreeOutput, Step, Trace, tau_transitions, transitions
from .network import NetState, NetStep, net_steps, network_of
from .congruence import canonicalize, congruent
from .parser import parse
from .symmetry import Permutation, SymNet, build_symmetric
from .syntax import Par, Process, Res, Success, free_names, is_separate
from .verdict import Fails, Holds, Unknown, Verdict

__all__ = [
    "LeaderElectionSpec",
    "LeaderElectionSpecError",
    "Emission",
    "solves_leader_election",
    "must_succeed",
    "has_step",
    "has_top_success",
    "Fixture",
    "fixtures",
    "fixture",
    "fixture_text",
    "FIXTURE_FILES",
]

INDEXED, LEADER_SLAVE = "indexed", "leader_slave"


class LeaderElectionSpecError(ValueError):
    pass


@dataclass(frozen=True)
class LeaderElectionSpec:
    mode: str = INDEXED
    out_channel: str = "out"
    leader_channel: str = "leader"
    slave_channel: str = "slave"

    @classmethod
    def indexed(cls, out_channel: str = "out") -> "LeaderElectionSpec":
        return cls(INDEXED, out_channel=out_channel)

    @classmethod
    def leader_slave(cls, leader_channel: str = "leader", slave_channel: str = "slave") -> "LeaderElectionSpec":
        return cls(LEADER_SLAVE, leader_channel=leader_channel, slave_channel=slave_channel)

    @property
    def channels(self) -> frozenset[str]:
        if self.mode == INDEXED:
            return frozenset((self.out_channel,))
        if self.mode == LEADER_SLAVE:
            return frozenset((self.leader_channel, self.slave_channel))
        raise LeaderElectionSpecError(f"unknown mode {self.mode!r}")


@dataclass(frozen=True)
class Emission:
    component: int
    channel: str
    value: str


def _as_network(net) -> NetState:
    if isinstance(net, NetState):
        return net
    if isinstance(net, SymNet):
        return net.state
    return network_of(net)


def _check_spec(state: NetState, spec: LeaderElectionSpec) -> None:
    channels = spec.channels
    hidden = channels & set(state.restricted)
    if hidden:
        raise LeaderElectionSpecError(f"observation channel(s) {sorted(hidden)} are restricted in the network")
    for k, comp in enumerate(state.components):
        clash = channels & comp.bn
        if clash:
            raise LeaderElectionSpecError(f"component {k} binds observation channel(s) {sorted(clash)}")


def _elected(emissions: list[Emission], n: int, spec: LeaderElectionSpec) -> Optional[str]:
    """None if ``emissions`` elect a leader, else why not."""
    per: dict[int, list[Emission]] = {k: [] for k in range(n)}
    for e in emissions:
        per[e.component].append(e)
    missing = [k for k, es in per.items() if len(es) == 0]
    if missing:
        return f"component(s) {missing} never announce"
    repeated = [k for k, es in per.items() if len(es) > 1]
    if repeated:
        return f"component(s) {repeated} announce more than once"
    if spec.mode == INDEXED:
        values = {es[0].value for es in per.values()}
        if len(values) != 1:
            return f"components disagree on the leader: {sorted(values)}"
        return None
    leaders = [k for k, es in per.items() if es[0].channel == spec.leader_channel]
    if len(leaders) != 1:
        return f"{len(leaders)} components announce themselves as leader"
    return None


def solves_leader_election(net, spec: LeaderElectionSpec, depth: int = 512) -> Verdict:
    """Every maximal run of internal steps and announcements elects exactly one leader.

    Each component must announce exactly once.  In indexed mode all
    announcements on ``out_channel`` carry the same value; in leader/slave mode
    exactly one component announces on the leader channel and the rest on the
    slave channel.  Inputs from the environment are not part of the runs.
    """
    state = _as_network(net)
    _check_spec(state, spec)
    n = len(state.components)
    channels = spec.channels
    cut = [False]
    witness: list = []

    def allowed(step: NetStep) -> bool:
        lab = step.label
        if lab.kind == "tau":
            return True
        return isinstance(lab, FreeOutput) and lab.channel in channels

    def key(s: NetState):
        return (s.restricted, s.components)

    def walk(s: NetState, steps: tuple[NetStep, ...], emissions: list[Emission], path: dict) -> None:
        if witness:
            return
        succ = [st for st in net_steps(s, ()) if allowed(st)]
        if not succ:
            reason = _elected(emissions, n, spec)
            if reason is not None:
                witness.append((steps, reason))
            return
        if len(steps) >= depth:
            cut[0] = True
            return
        for st in succ:
            em = list(emissions)
            if st.label.kind == "out":
                (k,) = st.participants
                em.append(Emission(k, st.label.channel, st.label.obj))
                if sum(e.component == k for e in em) > 1:
                    # no extension of this run can repair a second announcement
                    witness.append((steps + (st,), f"component(s) [{k}] announce more than once"))
                    return
            k2 = key(st.target)
            if k2 in path:
                # the run can loop forever; announcements on the loop repeat
                loop_emits = len(em) > path[k2]
                reason = "announcements repeat on a cycle" if loop_emits else _elected(em, n, spec)
                if reason is not None:
                    witness.append((steps + (st,), f"infinite run: {reason}"))
                    return
                continue
            walk(st.target, steps + (st,), em, {**path, k2: len(em)})
            if witness:
                return

    walk(state, (), [], {key(state): 0})
    if witness:
        steps, reason = witness[0]
        return Fails(steps, reason)
    if cut[0]:
        return Unknown(f"depth bound {depth} reached")
    return Holds(reason="every maximal run elects one leader")


# ---------------------------------------------------------------- must-success


def has_top_success(p: Process) -> bool:
    """An unguarded success reachable through parallel composition and restriction only."""
    if isinstance(p, Success):
        return True
    if isinstance(p, Par):
        return has_top_success(p.left) or has_top_success(p.right)
    if isinstance(p, Res):
        return has_top_success(p.body)
    return False


def must_succeed(p: Process, depth: int = 512) -> Verdict:
    """Every maximal run of internal steps reaches a top-level success."""
    start = canonicalize(p)
    failure: list[Trace] = []
    cut = [False]

    def walk(q: Process, steps: tuple[Step, ...], seen: frozenset) -> None:
        if failure or has_top_success(q):
            return
        succ = tau_transitions(q)
        if not succ:
            failure.append(Trace(p, steps))
            return
        if len(steps) >= depth:
            cut[0] = True
            return
        for step in succ:
            if step.target in seen:
                if not has_top_success(step.target):
                    failure.append(Trace(p, steps + (step,), truncated=True, lasso=True))
                    return
                continue
            walk(step.target, steps + (step,), seen | {step.target})

    walk(start, (), frozenset((start,)))
    if failure:
        trace = failure[0]
        why = "a run loops without success" if trace.lasso else "a run gets stuck without success"
        return Fails(trace, why)
    if cut[0]:
        return Unknown(f"depth bound {depth} reached")
    return Holds(reason="every maximal run reaches success")


def has_step(p: Process, tau_only: bool = True) -> bool:
    if tau_only:
        return bool(tau_transitions(p))
    return bool(transitions(p, free_names(p)))


# ---------------------------------------------------------------- fixtures


FIXTURE_FILES = (
    "indexed-election.pi",
    "indexed-election-seed.pi",
    "mixed-pair.pi",
    "mixed-pair-seed.pi",
    "leader-slave.pi",
    "leader-slave-seed.pi",
    "success-pair.pi",
    "success-seed.pi",
    "step-pair.pi",
    "step-seed.pi",
)


def fixture_text(filename: str) -> str:
    return resources.files("pisym").joinpath("data").joinpath(filename).read_text(encoding="utf-8")


def _load(filename: str) -> Process:
    return parse(fixture_text(filename))


@dataclass(frozen=True)
class Fixture:
    """A bundled network with the answers the predicates are expected to give.

    ``expected`` maps a check name to a verdict kind (``"holds"``/``"fails"``),
    a boolean or a count; :meth:`evaluate` computes the same map.
    """

    name: str
    network: NetState
    expected: dict[str, Any]
    component: Process
    symnet: Optional[SymNet] = None
    description: str = ""
    checks: dict[str, Callable[[], Any]] = field(default_factory=dict, compare=False, repr=False)

    def evaluate(self) -> dict[str, Any]:
        return {k: self.checks[k]() for k in self.expected}


def _two_copies(seed_file: str, net_file: str, cycles: str, restricted: tuple[str, ...]) -> tuple[Process, SymNet]:
    seed = _load(seed_file)
    sym = build_symmetric(seed, 2, Permutation.from_cycles(cycles, 2), restricted)
    whole = _load(net_file)
    if not congruent(whole, sym.flatten()):
        raise AssertionError(f"{net_file} is not the symmetric network built from {seed_file}")
    return seed, sym


def _indexed_election() -> Fixture:
    seed, sym = _two_copies("indexed-election-seed.pi", "indexed-election.pi", "(x y)", ())
    return Fixture(
        "indexed-election", sym.state, {"is_separate": True, "leader_election": "holds"}, seed, sym,
        "two symmetric copies that still elect a leader by index",
        {
            "is_separate": lambda: is_separate(sym.flatten()),
            "leader_election": lambda: solves_leader_election(sym.state, LeaderElectionSpec.indexed("out")).kind,
        },
    )


def _mixed_pair() -> Fixture:
    from .execution import no_symmetric_execution
    from .lts import max_executions

    seed, sym = _two_copies("mixed-pair-seed.pi", "mixed-pair.pi", "(x y)('1' '2')", ("x", "y"))
    return Fixture(
        "mixed-pair", sym.state,
        {"is_separate": False, "no_symmetric_execution": "holds", "max_executions": 2},
        seed, sym,
        "mixed choice breaks the initial symmetry in every run",
        {
            "is_separate": lambda: is_separate(sym.flatten()),
            "no_symmetric_execution": lambda: no_symmetric_execution(sym).kind,
            "max_executions": lambda: len(max_executions(sym.flatten(), 8)),
        },
    )


def _leader_slave() -> Fixture:
    seed, sym = _two_copies("leader-slave-seed.pi", "leader-slave.pi", "", ())
    return Fixture(
        "leader-slave", sym.state, {"is_separate": False, "leader_election": "holds"}, seed, sym,
        "leader/slave election by a mixed choice",
        {
            "is_separate": lambda: is_separate(seed),
            "leader_election": lambda: solves_leader_election(sym.state, LeaderElectionSpec.leader_slave()).kind,
        },
    )


def _success_pair() -> Fixture:
    seed, sym = _two_copies("success-seed.pi", "success-pair.pi", "", ())
    return Fixture(
        "success-pair", sym.state, {"must_succeed": "holds", "must_succeed_component": "fails"}, seed, sym,
        "success is guaranteed only by the pair",
        {
            "must_succeed": lambda: must_succeed(sym.flatten()).kind,
            "must_succeed_component": lambda: must_succeed(seed).kind,
        },
    )


def _step_pair() -> Fixture:
    seed, sym = _two_copies("step-seed.pi", "step-pair.pi", "", ())
    return Fixture(
        "step-pair", sym.state, {"has_step": True, "has_step_component": False}, seed, sym,
        "the pair can make an internal step, a single copy cannot",
        {
            "has_step": lambda: has_step(sym.flatten(), tau_only=True),
            "has_step_component": lambda: has_step(seed, tau_only=True),
        },
    )


def fixtures() -> list[Fixture]:
    return [_indexed_election(), _mixed_pair(), _leader_slave(), _success_pair(), _step_pair()]


def fixture(name: str) -> Fixture:
    for f in fixtures():
        if f.name == name:
            return f
    raise KeyError(name)
