"""``pisym``: command-line front end.

Exit codes: 0 holds/true/success, 1 fails/false, 2 unknown, 64 usage error,
65 unreadable or ill-formed term, 70 internal failure of a construction.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .congruence import canonicalize
from .execution import (
    MimicryError,
    NotSeparateError,
    confluence_pairs,
    find_symmetric_execution,
    no_symmetric_execution,
    subdivide,
    validate_symmetric_execution,
)
from .lts import label_record, label_text, max_executions, tau_transitions, transitions
from .network import network_of
from .parser import ParseError, format_process, parse
from .problems import (
    FIXTURE_FILES,
    LeaderElectionSpec,
    LeaderElectionSpecError,
    fixture_text,
    fixtures,
    has_step,
    must_succeed,
    solves_leader_election,
)
from .symmetry import NotSymmetric, Permutation, PermutationError, SymmetryError, SymNet, build_symmetric, symnet_from_state
from .syntax import WellformednessError, bound_names, free_names, is_separate
from .verdict import Verdict

log = logging.getLogger("pisym")

EXIT_OK, EXIT_FALSE, EXIT_UNKNOWN = 0, 1, 2
EXIT_USAGE, EXIT_DATA, EXIT_SOFTWARE = 64, 65, 70

DEFAULT_ROUNDS, DEFAULT_STEPS = 64, 512


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# ---------------------------------------------------------------- input helpers


def read_term_text(path: str) -> str:
    """Read a term file; ``-`` is stdin.  A missing file named like a bundled example falls back to it."""
    if path == "-":
        return sys.stdin.read()
    p = Path(path)
    if p.exists():
        return p.read_text(encoding="utf-8")
    if p.name in FIXTURE_FILES:
        log.info("%s not found, using the bundled %s", path, p.name)
        return fixture_text(p.name)
    raise UsageError(f"no such file: {path}")


def load_term(path: str):
    return parse(read_term_text(path))


def _names(text: str | None) -> tuple[str, ...]:
    if not text:
        return ()
    return tuple(n.strip().strip("'") for n in text.replace(";", ",").split(",") if n.strip())


def _symnet(args) -> SymNet:
    """A symmetric network from ``--seed`` (built) or from a network file (recognized)."""
    perm = Permutation.from_cycles(args.perm or "", None)
    if args.seed:
        if not args.degree:
            raise UsageError("--degree is required with --seed")
        return build_symmetric(load_term(args.seed), args.degree, perm, _names(args.nu))
    if not args.file:
        raise UsageError("give a network file or --seed")
    term = load_term(args.file)
    if args.degree is not None:
        candidates = [args.degree]
    else:
        # without --degree, take the most components under which the term is symmetric
        leaves = len(network_of(term).components)
        candidates = [d for d in range(leaves, 0, -1) if d % perm.order() == 0]
    failure = None
    for degree in candidates:
        try:
            state = network_of(term, degree)
        except ValueError:
            continue
        sigma = Permutation(perm.pairs, degree)
        net = symnet_from_state(state, sigma)
        if not isinstance(net, NotSymmetric):
            return net
        failure = failure or (sigma, net)
    if failure is None:
        raise SymmetryError(f"no degree fits the permutation {perm.text()}")
    sigma, net = failure
    raise SymmetryError(f"network is not symmetric under {sigma.text()}: {net.reason}")


class Out:
    """Human-readable lines or line-delimited JSON records."""

    def __init__(self, as_json: bool, stream=None):
        self.json = as_json
        self.stream = stream or sys.stdout

    def text(self, line: str = "") -> None:
        if not self.json:
            print(line, file=self.stream)

    def record(self, rec: dict) -> None:
        if self.json:
            print(json.dumps(rec, ensure_ascii=False, sort_keys=True), file=self.stream)

    def verdict(self, predicate: str, v: Verdict, depth: int | None = None) -> int:
        self.text(f"{predicate}: {v}")
        rec = {"record": "verdict", "predicate": predicate, "verdict": v.kind, "reason": v.reason, "depth": depth}
        if v.fails:
            rec["witness"] = _witness_labels(v.witness)
        self.record(rec)
        return v.exit_code


def _witness_labels(witness) -> list[dict] | None:
    """Labels of a failing run, whichever shape the witness has."""
    steps = getattr(witness, "steps", witness)
    if not isinstance(steps, (tuple, list)):
        return None
    return [{**label_record(s.label), "participants": sorted(s.participants)} for s in steps]


# ---------------------------------------------------------------- commands


def cmd_parse(args, out: Out) -> int:
    p = load_term(args.file)
    out.text(format_process(p))
    out.text(f"  free names:  {', '.join(sorted(free_names(p))) or '-'}")
    out.text(f"  bound names: {', '.join(sorted(bound_names(p))) or '-'}")
    out.text(f"  separate choice: {'yes' if is_separate(p) else 'no'}")
    out.text(f"  canonical form: {format_process(canonicalize(p))}")
    out.record({
        "record": "term",
        "term": format_process(p),
        "explicit": format_process(p, explicit=True),
        "canonical": format_process(canonicalize(p)),
        "free_names": sorted(free_names(p)),
        "bound_names": sorted(bound_names(p)),
        "separate": is_separate(p),
    })
    return EXIT_OK


def cmd_steps(args, out: Out) -> int:
    p = load_term(args.file)
    if args.tau:
        steps = tau_transitions(p)
    else:
        steps = transitions(p, set(free_names(p)) | set(_names(args.universe)))
    for k, s in enumerate(steps):
        parts = ",".join(map(str, sorted(s.participants)))
        out.text(f"--{label_text(s.label)}--> [{parts}]  {format_process(s.target)}")
        out.record({"record": "step", **s.record(k)})
    out.text(f"{len(steps)} step(s)")
    return EXIT_OK if steps else EXIT_FALSE


def cmd_run(args, out: Out) -> int:
    p = load_term(args.file)
    depth = args.depth if args.depth is not None else DEFAULT_STEPS
    traces = max_executions(p, depth, tau_only=args.tau, modulo_congruence=args.modulo_congruence, universe=_names(args.universe))
    truncated = False
    for k, t in enumerate(traces):
        labels = " . ".join(label_text(l) for l in t.labels) or "(no steps)"
        tail = " (loops)" if t.lasso else " (cut by depth)" if t.truncated else ""
        out.text(f"#{k + 1}: {labels}  ->  {format_process(t.end)}{tail}")
        out.record({
            "record": "execution",
            "index": k,
            "labels": [label_record(l) for l in t.labels],
            "steps": t.records(),
            "end": format_process(t.end),
            "truncated": t.truncated,
            "lasso": t.lasso,
        })
        truncated |= t.truncated and not t.lasso
    out.text(f"{len(traces)} maximal execution(s)" + (" modulo structural congruence" if args.modulo_congruence else ""))
    return EXIT_UNKNOWN if truncated else EXIT_OK


def cmd_sym_build(args, out: Out) -> int:
    net = _symnet(args)
    out.text(format_process(net.flatten()))
    out.text(f"  degree {net.degree}, sigma {net.sigma.text()}, restricted ({', '.join(net.restricted)})")
    for i, c in enumerate(net.components):
        out.text(f"  [{i}] {format_process(c)}")
    out.record({
        "record": "symnet",
        "network": format_process(net.flatten()),
        "seed": format_process(net.seed, explicit=True),
        "degree": net.degree,
        "sigma": [list(p) for p in net.sigma.pairs],
        "x_tilde": list(net.restricted),
        "components": [format_process(c) for c in net.components],
    })
    return EXIT_OK


def cmd_sym_exec(args, out: Out) -> int:
    net = _symnet(args)
    rounds = args.depth if args.depth is not None else DEFAULT_ROUNDS
    e = find_symmetric_execution(net, rounds)
    ok = validate_symmetric_execution(e)
    out.text(e.describe())
    out.text(f"validated: {'yes' if ok else 'NO (' + ok.reason + ')'}")
    for rec in e.records():
        out.record(rec)
    if not ok:
        return EXIT_SOFTWARE
    return EXIT_OK if e.status == "terminated" or e.lasso is not None else EXIT_UNKNOWN


def cmd_sym_refute(args, out: Out) -> int:
    net = _symnet(args)
    depth = args.depth if args.depth is not None else DEFAULT_STEPS
    v = no_symmetric_execution(net, depth)
    if v.holds:
        for w in v.witness:
            out.text(f"  refuted: {w.text()}")
            out.record({
                "record": "refutation",
                "labels": [label_record(s.label) for s in w.steps],
                "round": w.round,
                "reason": w.reason,
                "end": format_process(w.steps[-1].target.flatten()) if w.steps else format_process(net.flatten()),
            })
    elif v.fails:
        out.text(v.witness.describe())
        for rec in v.witness.records():
            out.record(rec)
    return out.verdict("no symmetric execution", v, depth)


def cmd_check_le(args, out: Out) -> int:
    term = load_term(args.file)
    state = network_of(term, args.degree)
    if args.mode == "indexed":
        spec = LeaderElectionSpec.indexed(args.out_channel)
    else:
        spec = LeaderElectionSpec.leader_slave(args.leader, args.slave)
    depth = args.depth if args.depth is not None else DEFAULT_STEPS
    v = solves_leader_election(state, spec, depth)
    if v.fails:
        labels = " . ".join(label_text(s.label) for s in v.witness)
        out.text(f"  counterexample run: {labels or '(no steps)'}")
        out.record({"record": "counterexample", "labels": [label_record(s.label) for s in v.witness]})
    return out.verdict(f"leader election ({args.mode}, {len(state.components)} components)", v, depth)


def cmd_check_success(args, out: Out) -> int:
    p = load_term(args.file)
    depth = args.depth if args.depth is not None else DEFAULT_STEPS
    v = must_succeed(p, depth)
    if v.fails:
        labels = " . ".join(label_text(l) for l in v.witness.labels)
        out.text(f"  counterexample run: {labels or '(no steps)'} -> {format_process(v.witness.end)}")
        out.record({"record": "counterexample", "steps": v.witness.records()})
    return out.verdict("must succeed", v, depth)


def cmd_check_step(args, out: Out) -> int:
    p = load_term(args.file)
    tau_only = not args.visible
    result = has_step(p, tau_only=tau_only)
    kind = "internal step" if tau_only else "step"
    out.text(f"{kind}: {'yes' if result else 'no'}")
    out.record({"record": "has_step", "tau_only": tau_only, "result": result})
    return EXIT_OK if result else EXIT_FALSE


def cmd_confluence(args, out: Out) -> int:
    p = load_term(args.file)
    universe = set(free_names(p)) | set(_names(args.universe))
    total = bad = 0
    for o, i, r in confluence_pairs(p, force=args.force, universe=universe):
        total += 1
        if r:
            out.text(f"  {label_text(o.label)} / {label_text(i.label)}: closes at {format_process(r)}")
        else:
            bad += 1
            out.text(f"  {label_text(o.label)} / {label_text(i.label)}: VIOLATION ({r.reason})")
        out.record({
            "record": "square",
            "output": label_record(o.label),
            "input": label_record(i.label),
            "closes": bool(r),
            "common": format_process(r) if r else None,
        })
    out.text(f"{total} pair(s), {bad} violation(s)" + (" (vacuous)" if not total else ""))
    return EXIT_FALSE if bad else EXIT_OK


def cmd_subdivide(args, out: Out) -> int:
    net = _symnet(args)
    rounds = args.depth if args.depth is not None else DEFAULT_ROUNDS
    e = find_symmetric_execution(net, rounds)
    sub = subdivide(e, args.into)
    ok = validate_symmetric_execution(sub)
    out.text(f"original ({net.degree} copies): {' '.join(label_text(l) for l in e.labels) or '(no steps)'}")
    out.text(sub.describe())
    out.text(f"validated: {'yes' if ok else 'NO (' + ok.reason + ')'}")
    for rec in sub.records():
        out.record(rec)
    return EXIT_OK if ok else EXIT_SOFTWARE


def cmd_fixtures(args, out: Out) -> int:
    if args.export:
        target = Path(args.export)
        target.mkdir(parents=True, exist_ok=True)
        for name in FIXTURE_FILES:
            (target / name).write_text(fixture_text(name), encoding="utf-8")
        out.text(f"wrote {len(FIXTURE_FILES)} files to {target}")
    all_ok = True
    for f in fixtures():
        got = f.evaluate()
        ok = got == f.expected
        all_ok &= ok
        out.text(f"{f.name:16} {'ok ' if ok else 'BAD'} {f.description}")
        for key, want in f.expected.items():
            out.text(f"         {key}: {got[key]} (expected {want})")
        out.record({"record": "fixture", "name": f.name, "expected": f.expected, "observed": got, "ok": ok})
    return EXIT_OK if all_ok else EXIT_FALSE


def cmd_demo_separation(args, out: Out) -> int:
    import random

    from .generators import random_symnet, seed_from_env

    net = next(f for f in fixtures() if f.name == "mixed-pair").symnet
    out.text("Mixed choice: " + format_process(net.flatten()) + f"   sigma={net.sigma.text()}")
    traces = max_executions(net.flatten(), 8)
    for t in traces:
        out.text("  run: " + " . ".join(label_text(l) for l in t.labels) + f"  ->  {format_process(t.end)}")
    v = no_symmetric_execution(net)
    for w in v.witness or ():
        out.text(f"  refuted: {w.text()}")
    out.text(f"  every run breaks the symmetry: {v}")
    out.record({"record": "mixed", "runs": len(traces), "verdict": v.kind})
    seed = seed_from_env(0)
    rng = random.Random(seed)
    out.text(f"Separate choice (random symmetric networks, seed {seed}):")
    found = 0
    for _ in range(args.samples):
        sample = random_symnet(rng)
        e = find_symmetric_execution(sample)
        ok = bool(validate_symmetric_execution(e))
        found += ok
        out.text(f"  {format_process(sample.flatten())}  sigma={sample.sigma.text()}: "
                 f"{len(e.rounds)} symmetric round(s), {e.status}, {'valid' if ok else 'INVALID'}")
        out.record({"record": "separate", "network": format_process(sample.flatten()), "rounds": len(e.rounds), "valid": ok})
    out.text(f"{found}/{args.samples} separate-choice networks keep their symmetry; the mixed one cannot.")
    return EXIT_OK if v.holds and found == args.samples else EXIT_FALSE


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="pisym", description="Symmetric networks in the pi-calculus with mixed and separate choice.")
    parser.add_argument("--version", action="version", version=f"pisym {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def command(name, func, help_text, file=True, net=False):
        p = sub.add_parser(name, help=help_text, description=help_text)
        if file:
            p.add_argument("file", nargs="?" if net else None, help="term file ('-' for stdin)")
        p.add_argument("--json", action="store_true", help="line-delimited JSON records")
        p.add_argument("--depth", type=int, help=f"exploration budget (default {DEFAULT_ROUNDS} rounds / {DEFAULT_STEPS} steps)")
        if net:
            p.add_argument("--seed", help="seed process file; the network is built from it")
            p.add_argument("--degree", type=int, help="number of copies")
            p.add_argument("--perm", default="", help="symmetry relation in cycle notation, e.g. \"(x y)(1 2)\"")
            p.add_argument("--nu", default="", help="comma-separated restricted names")
        p.set_defaults(func=func)
        return p

    command("parse", cmd_parse, "parse a term and print its normal forms")
    p = command("steps", cmd_steps, "list the transitions of a term")
    p.add_argument("--tau", action="store_true", help="internal steps only")
    p.add_argument("--universe", help="extra names the environment may send")
    p = command("run", cmd_run, "enumerate maximal executions")
    p.add_argument("--tau", action="store_true", help="internal steps only")
    p.add_argument("--modulo-congruence", action=argparse.BooleanOptionalAction, default=True,
                   help="identify executions up to structural congruence (default on)")
    p.add_argument("--universe", help="extra names the environment may send")
    command("sym-build", cmd_sym_build, "build or recognize a symmetric network", net=True)
    command("sym-exec", cmd_sym_exec, "construct a symmetric execution (separate choice)", net=True)
    command("sym-refute", cmd_sym_refute, "check that every execution breaks symmetry", net=True)
    p = command("check-le", cmd_check_le, "check leader election")
    p.add_argument("--mode", choices=("indexed", "leader-slave"), default="indexed")
    p.add_argument("--degree", type=int, help="cut the term into this many components (default: every parallel leaf)")
    p.add_argument("--out-channel", default="out")
    p.add_argument("--leader", default="leader")
    p.add_argument("--slave", default="slave")
    command("check-success", cmd_check_success, "check that every internal run reaches ok")
    p = command("check-step", cmd_check_step, "check whether a step exists (internal steps by default)")
    p.add_argument("--tau", action="store_true", help="internal steps only (the default)")
    p.add_argument("--visible", action="store_true", help="count visible steps as well")
    p = command("confluence", cmd_confluence, "check that output and input steps commute")
    p.add_argument("--force", action="store_true", help="allow mixed choice to exhibit violations")
    p.add_argument("--universe", help="extra names the environment may send")
    p = command("subdivide", cmd_subdivide, "split a symmetric execution onto a subnetwork", net=True)
    p.add_argument("--into", type=int, required=True, help="degree of the subnetwork")
    p = command("fixtures", cmd_fixtures, "evaluate the bundled example networks", file=False)
    p.add_argument("--export", metavar="DIR", help="also write the example term files to DIR")
    p = command("demo-separation", cmd_demo_separation, "contrast mixed and separate choice", file=False)
    p.add_argument("--samples", type=int, default=5)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    out = Out(args.json)
    try:
        return args.func(args, out)
    except UsageError as exc:
        print(f"pisym: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ParseError as exc:
        print(f"pisym: parse error at {exc}", file=sys.stderr)
        return EXIT_DATA
    except (WellformednessError, SymmetryError, PermutationError, LeaderElectionSpecError, NotSeparateError, ValueError) as exc:
        print(f"pisym: {exc}", file=sys.stderr)
        return EXIT_DATA
    except MimicryError as exc:
        print(f"pisym: construction failed: {exc}", file=sys.stderr)
        return EXIT_SOFTWARE


if __name__ == "__main__":
    sys.exit(main())
