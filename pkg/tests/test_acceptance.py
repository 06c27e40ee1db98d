"""Acceptance criteria, one test each.

Every test prints a single ``PASS``/``FAIL`` line with what it measured and
how long it took.  Run ``pytest tests/test_acceptance.py -v`` or, for the
lines alone, ``python3 tests/test_acceptance.py``.  ``PISYM_SEED`` picks the
random corpus (default 0).
"""

from __future__ import annotations

import functools
import random
import sys
import time
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from oracles import transfers  # noqa: E402

from pisym.congruence import congruent  # noqa: E402
from pisym.execution import (  # noqa: E402
    Counterexample,
    confluence_pairs,
    find_symmetric_execution,
    no_symmetric_execution,
    subdivide,
    validate_symmetric_execution,
)
from pisym.generators import FREE_NAMES, random_process, random_symnet, seed_from_env  # noqa: E402
from pisym.lts import BoundOutput, FreeOutput, label_text, max_executions, transitions  # noqa: E402
from pisym.parser import format_process, parse  # noqa: E402
from pisym.problems import (  # noqa: E402
    LeaderElectionSpec,
    fixture,
    fixture_text,
    fixtures,
    solves_leader_election,
)
from pisym.symmetry import NotSymmetric, recognize_symmetric  # noqa: E402
from pisym.syntax import NIL, OK, UNIT, In, Out, Par, Res, Sum, freshen, is_separate  # noqa: E402

SEED = seed_from_env(0)
CORPUS_SIZE = 500


def report(number: int, ok: bool, summary: str, elapsed: float, limit: float | None) -> None:
    timing = f"{elapsed:.2f}s" + (f" (limit {limit:g}s)" if limit is not None else "")
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {summary} [{timing}]"
    capture = _capture[0]
    if capture is not None:
        with capture.disabled():
            print("\n" + line)
    else:
        print(line)


_capture: list = [None]


@pytest.fixture(autouse=True)
def _uncaptured(capsys):
    _capture[0] = capsys
    yield
    _capture[0] = None


def timed(number: int, limit: float | None):
    """Run the body, print its line and fail on a false result or a blown time limit."""

    def wrap(body):
        @functools.wraps(body)
        def run(*args, **kwargs):
            start = time.perf_counter()
            ok, summary = body(*args, **kwargs)
            elapsed = time.perf_counter() - start
            in_time = limit is None or elapsed < limit
            report(number, ok and in_time, summary if in_time else f"{summary}; too slow", elapsed, limit)
            assert ok, summary
            assert in_time, f"took {elapsed:.2f}s, limit {limit}s"

        return run

    return wrap


@functools.lru_cache(maxsize=None)
def separate_corpus(seed: int = SEED, size: int = CORPUS_SIZE):
    rng = random.Random(seed)
    return tuple(random_symnet(rng, budget=6, degrees=(2, 3)) for _ in range(size))


def _p(*branches):
    return Sum(tuple(branches))


# ---------------------------------------------------------------- 1


@timed(1, 1.0)
def test_mixed_choice_breaks_symmetry():
    net = fixture("mixed-pair").symnet
    runs = max_executions(net.flatten(), 16)
    traces = sorted(tuple(label_text(l) for l in r.labels) for r in runs)
    ends = {format_process(r.end) for r in runs}
    expected = [("tau", "'1'!", "'1'!"), ("tau", "'2'!", "'2'!")]
    v = no_symmetric_execution(net)
    ok = traces == expected and ends == {"0 | 0"} and not any(r.truncated for r in runs)
    ok = ok and v.holds and len(v.witness) == 2
    return ok, f"{len(runs)} maximal executions {traces}, ending in {sorted(ends)}; refutation {v.kind} with {len(v.witness or ())} witnesses"


# ---------------------------------------------------------------- 2


@timed(2, 300.0)
def test_separate_networks_keep_symmetry():
    nets = separate_corpus()
    valid = extruding = 0
    failures = []
    for k, net in enumerate(nets):
        try:
            e = find_symmetric_execution(net)
        except Exception as exc:  # any construction failure counts against the criterion
            failures.append((k, repr(exc)))
            continue
        if validate_symmetric_execution(e):
            valid += 1
        else:
            failures.append((k, validate_symmetric_execution(e).reason))
        extruding += any(isinstance(l, BoundOutput) for l in e.labels)
    share = extruding / len(nets)
    ok = len(nets) >= 500 and valid == len(nets) and share >= 0.2
    return ok, f"{valid}/{len(nets)} symmetric executions validate, {share:.0%} extrude a bound name, failures {failures[:3]}"


# ---------------------------------------------------------------- 3


@timed(3, 120.0)
def test_output_and_input_steps_commute():
    rng = random.Random(SEED + 3)
    pairs = violations = 0
    for _ in range(500):
        p = freshen(random_process(rng, 6))
        assert is_separate(p)
        for _, _, res in confluence_pairs(p):
            pairs += 1
            violations += isinstance(res, Counterexample)
    mixed = parse("x!u.a! + z?(w).b!")
    forced = [r for _, _, r in confluence_pairs(mixed, force=True) if isinstance(r, Counterexample)]
    ok = violations == 0 and pairs > 0 and len(forced) >= 1
    return ok, f"500 processes, {pairs} output/input pairs, {violations} violations; forced mixed choice gives {len(forced)} violations"


# ---------------------------------------------------------------- 4


@timed(4, 1.0)
def test_indexed_election():
    fx = fixture("indexed-election")
    net = fx.symnet
    le = solves_leader_election(net, LeaderElectionSpec.indexed("out"))
    separate = is_separate(net.flatten())
    e = find_symmetric_execution(net)
    boundaries = [rnd.end.state for rnd in e.rounds]
    symmetric = all(
        not isinstance(recognize_symmetric(s, rnd.sigma), NotSymmetric) for s, rnd in zip(boundaries, e.rounds)
    )
    ok = le.holds and separate and symmetric and bool(validate_symmetric_execution(e)) and len(e.rounds) >= 1
    return ok, (
        f"leader election {le.kind}, separate {separate}, {len(e.rounds)} rounds "
        f"({' '.join(label_text(l) for l in e.labels)}), every round boundary symmetric {symmetric}"
    )


# ---------------------------------------------------------------- 5


@timed(5, 1.0)
def test_impossibility_fixtures():
    from pisym.problems import has_step, must_succeed

    ls = fixture("leader-slave")
    sp = fixture("success-pair")
    st = fixture("step-pair")
    le = solves_leader_election(ls.symnet, LeaderElectionSpec.leader_slave())
    pair = must_succeed(sp.symnet.flatten())
    single = must_succeed(sp.component)
    step_pair = has_step(st.symnet.flatten(), tau_only=True)
    step_single = has_step(st.component, tau_only=True)
    verdicts = [le, pair, single]
    ok = le.holds and pair.holds and single.fails and step_pair and not step_single
    ok = ok and not any(v.unknown for v in verdicts)
    return ok, (
        f"leader/slave {le.kind}; must-succeed pair {pair.kind}, component {single.kind}; "
        f"internal step pair {step_pair}, component {step_single}"
    )


# ---------------------------------------------------------------- 6


def _unbound(label):
    return FreeOutput(label.channel, label.obj) if isinstance(label, BoundOutput) else label


def _shape(label, known):
    """The label with bound-output demoted and names unknown to the original network blanked."""
    label = _unbound(label)
    if label.kind == "tau":
        return label
    return (label.kind, label.channel if label.channel in known else "*", label.obj if label.obj in known else "*")


@timed(6, 60.0)
def test_identity_pairs_subdivide():
    nets = [n for n in separate_corpus() if n.degree == 2 and n.sigma.is_identity()]
    good = 0
    bad = []
    for k, net in enumerate(nets):
        e = find_symmetric_execution(net)
        try:
            sub = subdivide(e, 1)
        except Exception as exc:
            bad.append((k, repr(exc)))
            continue
        known = set(net.state.free_names())
        fits = len(sub.rounds) == len(e.rounds) and all(
            _shape(l, known) in {_shape(o, known) for o in orig.labels}
            for rnd, orig in zip(sub.rounds, e.rounds)
            for l in rnd.labels
        )
        if validate_symmetric_execution(sub) and fits:
            good += 1
        else:
            bad.append((k, "labels" if not fits else "invalid"))
    ok = len(nets) > 0 and good == len(nets)
    return ok, f"{good}/{len(nets)} identity degree-2 networks subdivide to one validating copy, failures {bad[:3]}"


# ---------------------------------------------------------------- 7


@timed(7, None)
def test_steps_transfer_along_permutations():
    rng = random.Random(SEED + 7)
    triples = violations = 0
    while triples < 500:
        p = freshen(random_process(rng, 5, separate=False, replication=rng.random() < 0.2))
        image = list(FREE_NAMES)
        rng.shuffle(image)
        rename = dict(zip(FREE_NAMES, image))
        for step in transitions(p):
            triples += 1
            violations += not transfers(p, rename, step)
    return violations == 0, f"{triples} (process, permutation, step) triples, {violations} violations"


# ---------------------------------------------------------------- 8

CITED = {
    "mixed-pair.pi": Res("x", Res("y", Par(
        _p((Out("x"), _p((Out("1"), NIL))), (In("y", "b"), _p((Out("2"), NIL)))),
        _p((Out("y"), _p((Out("2"), NIL))), (In("x", "b"), _p((Out("1"), NIL)))),
    ))),
    "indexed-election.pi": Par(
        Par(_p((Out("x"), NIL)), _p((In("x", "b"), _p((Out("out", "1"), NIL))), (In("y", "b"), _p((Out("out", "2"), NIL))))),
        Par(_p((Out("y"), NIL)), _p((In("y", "b"), _p((Out("out", "1"), NIL))), (In("x", "b"), _p((Out("out", "2"), NIL))))),
    ),
    "leader-slave.pi": Par(*[_p((In("a", "b"), _p((Out("slave"), NIL))), (Out("a"), _p((Out("leader"), NIL))))] * 2),
    "success-pair.pi": Par(*[_p((In("a", "b"), NIL), (Out("a"), OK))] * 2),
    "step-pair.pi": Par(*[_p((In("a", "b"), NIL), (Out("a", UNIT), NIL))] * 2),
}


@timed(8, None)
def test_parser_round_trip():
    rng = random.Random(SEED + 8)
    total = good = 0
    for _ in range(1000):
        p = random_process(rng, rng.randint(0, 8), separate=rng.random() < 0.5, replication=rng.random() < 0.3)
        total += 1
        good += congruent(parse(format_process(p)), p)
    files = {name: congruent(parse(fixture_text(name)), term) for name, term in CITED.items()}
    ok = good == total and all(files.values())
    return ok, f"{good}/{total} terms round-trip; fixture files match their terms: {files}"


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
