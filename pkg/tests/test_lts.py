import random

import pytest
from hypothesis import given

from pisym.congruence import canonicalize, congruent
from pisym.generators import FREE_NAMES, random_process
from pisym.lts import (
    TAU,
    BoundOutput,
    FreeInput,
    FreeOutput,
    label_perm,
    label_record,
    label_text,
    max_executions,
    tau_transitions,
    transitions,
)
from pisym.parser import format_process, parse
from pisym.symmetry import Permutation
from pisym.syntax import NIL, freshen

from conftest import seeds
from oracles import step_key, transfers

MIXED_PAIR = "new x,y in (x!.'1'! + y?.'2'! | y!.'2'! + x?.'1'!)"


def _labels(p, universe=None):
    return {label_text(s.label) for s in transitions(p, universe)}


def test_inactive_and_success_have_no_steps():
    assert transitions(NIL) == []
    assert transitions(parse("ok")) == []


def test_mixed_pair_has_two_internal_steps():
    steps = transitions(parse(MIXED_PAIR))
    assert [s.label for s in steps] == [TAU, TAU]
    assert {s.participants for s in steps} == {frozenset({0, 1})}
    assert {format_process(s.target) for s in steps} == {"'1'! | '1'!", "'2'! | '2'!"}


def test_restricted_object_is_extruded():
    (step,) = transitions(parse("new y in x!y"))
    assert step.label == BoundOutput("x", "y")
    assert step.target == NIL


def test_restricted_channel_blocks():
    assert transitions(parse("new x in x!u")) == []


def test_input_receives_free_names_and_one_fresh_name():
    got = sorted((s.label.obj, format_process(s.target)) for s in transitions(parse("x?(z).z!u")))
    assert got == [("c", "c!u"), ("u", "u!u"), ("x", "x!u")]


def test_input_universe_is_extendable():
    assert "x?w" in _labels(parse("x?(z).z!u"), {"x", "u", "w"})


def test_communication_substitutes():
    steps = [s for s in transitions(parse("x!u | x?(z).z!w")) if s.label == TAU]
    assert len(steps) == 1
    assert congruent(steps[0].target, parse("0 | u!w"))


def test_close_keeps_scope():
    (step,) = [s for s in transitions(parse("(new k in x!k.k!) | x?(z).z?")) if s.label == TAU]
    assert congruent(step.target, parse("new k in (k! | k?)"))


def test_extrusion_avoids_captured_names():
    (step,) = [s for s in transitions(parse("(new k in x!k) | k′!"), set()) if s.label.kind == "bout"]
    assert step.label.kind == "bout" and step.label.obj not in {"x", "k′"}


def test_tau_prefix():
    (step,) = transitions(parse("tau.a!"))
    assert step.label == TAU and step.target == parse("a!")


def test_replication_unfolds():
    steps = tau_transitions(parse("rep a! | a?.b!"))
    assert len(steps) == 1
    assert congruent(steps[0].target, parse("(0 | rep a!) | b!"))


@pytest.mark.parametrize(
    "text, count",
    [("a? + a!", 0), ("(a? + a!) | (a? + a!)", 1), ("a! | a? | a?", 2), ("x!u | x?(z).z!w", 1), ("new x in (x! | x?)", 1)],
)
def test_internal_step_counts(text, count):
    assert len(tau_transitions(parse(text))) == count


def test_mixed_pair_executions():
    runs = max_executions(parse(MIXED_PAIR), 8)
    assert sorted(tuple(label_text(l) for l in r.labels) for r in runs) == [
        ("tau", "'1'!", "'1'!"),
        ("tau", "'2'!", "'2'!"),
    ]
    assert all(r.end == NIL or format_process(r.end) in {"0 | 0", "0"} for r in runs)
    assert not any(r.truncated for r in runs)


def test_without_congruence_quotient_more_executions_survive():
    p = parse("a! | b!")
    assert len(max_executions(p, 4)) == 2
    assert len(max_executions(p, 4, modulo_congruence=False)) == 2


def test_depth_bound_truncates():
    (run,) = max_executions(parse("a!.b!.c!"), 2)
    assert run.truncated and len(run) == 2


def test_unbounded_replication_is_truncated():
    runs = max_executions(parse("rep tau.0"), 10, tau_only=True)
    assert len(runs) == 1 and runs[0].truncated and len(runs[0]) == 10


def test_negative_depth():
    with pytest.raises(ValueError):
        max_executions(NIL, -1)


def test_label_perm():
    swap = Permutation.from_cycles("(x y)")
    assert label_perm(swap, BoundOutput("x", "y")) == BoundOutput("y", "x")
    assert label_perm(swap, FreeInput("z", "x")) == FreeInput("z", "y")
    assert label_perm({"x": "u"}, FreeOutput("x", "x")) == FreeOutput("u", "u")
    assert label_perm(swap, TAU) == TAU


def test_label_text_and_record():
    assert label_text(FreeOutput("out", "1")) == "out!'1'"
    assert label_text(BoundOutput("x", "k")) == "x!(k)"
    assert label_text(FreeInput("x", "u")) == "x?u"
    assert label_record(FreeOutput("a", "()"))["kind"] == "out"


def test_transitions_are_deterministic():
    p = parse("x!u | x?(z).z!w | new k in y!k")
    assert transitions(p) == transitions(p)
    assert [s.sort_key() for s in transitions(p)] == sorted(s.sort_key() for s in transitions(p))


def _random_renaming(rng):
    names = list(FREE_NAMES)
    image = names[:]
    rng.shuffle(image)
    return dict(zip(names, image))


@given(seeds)
def test_steps_transfer_along_name_permutations(seed):
    rng = random.Random(seed)
    p = freshen(random_process(rng, 5, separate=False))
    rename = _random_renaming(rng)
    for step in transitions(p):
        assert transfers(p, rename, step)


@given(seeds)
def test_congruent_terms_have_the_same_steps(seed):
    rng = random.Random(seed)
    p = freshen(random_process(rng, 5, separate=False))
    universe = set(FREE_NAMES)
    left = {step_key(s) for s in transitions(p, universe)}
    right = {step_key(s) for s in transitions(canonicalize(p), universe)}
    assert left == right


def test_network_steps_tell_pairings_apart():
    # as (label, target, participants) triples both pairings coincide; the sender separates them
    from pisym.network import net_steps, network_of

    assert len(tau_transitions(parse("(a? + a!) | (a? + a!)"))) == 1
    taus = [s for s in net_steps(network_of(parse("(a? + a!) | (a? + a!)"))) if s.label == TAU]
    assert sorted((s.sender, s.receiver) for s in taus) == [(0, 1), (1, 0)]
