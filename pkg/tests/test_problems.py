import pytest

from pisym.network import NetState, network_of
from pisym.parser import parse
from pisym.problems import (
    FIXTURE_FILES,
    LeaderElectionSpec,
    LeaderElectionSpecError,
    fixture,
    fixture_text,
    fixtures,
    has_step,
    has_top_success,
    must_succeed,
    solves_leader_election,
)
from pisym.symmetry import Permutation, build_symmetric
from pisym.syntax import NIL

INDEXED = LeaderElectionSpec.indexed()
LEADER_SLAVE = LeaderElectionSpec.leader_slave()


def _pair(text):
    return build_symmetric(parse(text), 2, Permutation.identity(2))


class TestLeaderElection:
    def test_indexed_election_by_local_races(self):
        net = build_symmetric(parse("x! | (x?.out!'1' + y?.out!'2')"), 2, Permutation.from_cycles("(x y)"))
        v = solves_leader_election(net, INDEXED)
        assert v.holds and v.exit_code == 0

    def test_leader_slave_by_mixed_choice(self):
        assert solves_leader_election(_pair("a?.slave! + a!.leader!"), LEADER_SLAVE).holds

    def test_silent_network_fails(self):
        v = solves_leader_election(network_of(parse("0 | 0")), INDEXED)
        assert v.fails and "never announce" in v.reason

    def test_disagreement(self):
        v = solves_leader_election(network_of(parse("out!'1' | out!'2'")), INDEXED)
        assert v.fails and "disagree" in v.reason

    def test_two_leaders(self):
        v = solves_leader_election(network_of(parse("leader! | leader!")), LEADER_SLAVE)
        assert v.fails and "2 components" in v.reason

    def test_repeated_announcement(self):
        v = solves_leader_election(network_of(parse("out!'1'.out!'1' | out!'1'")), INDEXED)
        assert v.fails and "more than once" in v.reason

    def test_some_run_fails(self):
        # either copy can win the race, but a run where both take the slave role exists
        net = network_of(parse("(a!.leader! + b?.slave!) | (a?.slave! + b!.leader!) | (a?.slave!)"))
        assert solves_leader_election(net, LEADER_SLAVE).fails

    def test_endless_announcements(self):
        v = solves_leader_election(network_of(parse("rep out!'1' | out!'1'")), INDEXED, depth=6)
        assert v.fails

    def test_depth_bound(self):
        v = solves_leader_election(network_of(parse("rep tau.0 | out!'1'")), INDEXED, depth=3)
        assert v.unknown and v.exit_code == 2

    def test_swapping_roles_of_components(self):
        a = network_of(parse("x! | (x?.out!'1' + y?.out!'2') | y! | (y?.out!'1' + x?.out!'2')"), 2)
        b = NetState(a.restricted, tuple(reversed(a.components)))
        assert solves_leader_election(a, INDEXED).kind == solves_leader_election(b, INDEXED).kind

    def test_invalid_observation_setup(self):
        with pytest.raises(LeaderElectionSpecError):
            solves_leader_election(network_of(parse("new out in out!")), INDEXED)
        with pytest.raises(LeaderElectionSpecError):
            solves_leader_election(network_of(parse("a?(out).0")), INDEXED)
        with pytest.raises(LeaderElectionSpecError):
            LeaderElectionSpec("plurality").channels


class TestSuccess:
    def test_top_level_marker(self):
        assert has_top_success(parse("new k in (k! | ok)"))
        assert not has_top_success(parse("tau.ok"))

    def test_pair_must_succeed(self):
        assert must_succeed(parse("(a?.0 + a!.ok) | (a?.0 + a!.ok)")).holds

    def test_single_copy_is_stuck(self):
        v = must_succeed(parse("a?.0 + a!.ok"))
        assert v.fails and v.exit_code == 1 and len(v.witness) == 0

    def test_a_failing_branch(self):
        v = must_succeed(parse("tau.ok + tau.0"))
        assert v.fails

    def test_already_successful(self):
        assert must_succeed(parse("ok | a!")).holds


class TestStep:
    def test_internal_step(self):
        assert has_step(parse("(a? + a!) | (a? + a!)"))
        assert not has_step(parse("a? + a!"))

    def test_visible_steps(self):
        assert has_step(parse("a? + a!"), tau_only=False)
        assert not has_step(NIL, tau_only=False)


class TestFixtures:
    @pytest.mark.parametrize("name", ["indexed-election", "mixed-pair", "leader-slave", "success-pair", "step-pair"])
    def test_expected_answers(self, name):
        fx = fixture(name)
        assert fx.evaluate() == fx.expected

    def test_files_are_bundled_and_parse(self):
        for f in FIXTURE_FILES:
            parse(fixture_text(f))

    def test_files_hold_the_cited_terms(self):
        from pisym.congruence import congruent

        cited = {
            "mixed-pair.pi": "new x,y in (x!.'1'! + y?.'2'! | y!.'2'! + x?.'1'!)",
            "indexed-election.pi": "(x! | x?.out!'1' + y?.out!'2') | (y! | y?.out!'1' + x?.out!'2')",
            "leader-slave.pi": "(a?.slave! + a!.leader!) | (a?.slave! + a!.leader!)",
            "success-pair.pi": "(a?.0 + a!.ok) | (a?.0 + a!.ok)",
            "step-pair.pi": "(a? + a!) | (a? + a!)",
        }
        for f, text in cited.items():
            assert congruent(parse(fixture_text(f)), parse(text)), f

    def test_names_are_unique(self):
        names = [f.name for f in fixtures()]
        assert len(set(names)) == len(names) == 5
        with pytest.raises(KeyError):
            fixture("nope")


def test_inactive_networks_fail_everything():
    net = network_of(parse("0 | 0"))
    assert solves_leader_election(net, INDEXED).fails
    assert solves_leader_election(net, LEADER_SLAVE).fails
    assert must_succeed(parse("0 | 0")).fails
