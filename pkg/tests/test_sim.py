import random

import pytest

from fleetwarden.agent import (
    Agent,
    AgentConfig,
    AgentSources,
    DedupeJournal,
    ScriptedInputSource,
    ScriptedProcessSource,
    ScriptedTrafficSource,
    SimulatedCrash,
    SimulatedPlatform,
    parse_trace,
)
from fleetwarden.clock import FakeClock
from fleetwarden.ledger import CommandEntry, CommandKind, CommandState, MemoryLedger
from fleetwarden.sim import (
    Predicate,
    ScenarioError,
    SimTrace,
    TraceStep,
    assert_sequence,
    command_conservation,
    lab_scenario,
    run_scenario,
    scenario_from_mapping,
    seq7_predicates,
    seq7_scenario,
    suspicious_scenario,
)

TARGET = "lab1-pc07"


@pytest.fixture(scope="module")
def seq7_trace():
    return run_scenario(seq7_scenario())


class TestSeq7:
    def test_eight_steps_in_order(self, seq7_trace):
        result = assert_sequence(seq7_trace, seq7_predicates(TARGET))
        assert result.ok, f"diverged at: {result.first_unmatched}"

    def test_target_left_active_section(self, seq7_trace):
        views = seq7_trace.steps_of("LIST_DISPLAYED")
        assert TARGET in views[0].detail["active"]
        assert TARGET not in views[-1].detail["active"]
        assert views[-1].detail["rows"] == 3  # row still listed, just not active

    def test_exactly_one_shutdown_invocation(self, seq7_trace):
        assert seq7_trace.invocations[TARGET] == ["SHUTDOWN"]
        assert seq7_trace.invocations["lab1-pc05"] == []

    def test_conservation(self, seq7_trace):
        assert command_conservation(seq7_trace) == []


class TestDeterminism:
    def test_seq7_byte_identical(self):
        first = run_scenario(seq7_scenario()).serialize()
        second = run_scenario(seq7_scenario()).serialize()
        assert first == second

    def test_suspicious_byte_identical(self):
        first = run_scenario(suspicious_scenario(seed=3)).serialize()
        second = run_scenario(suspicious_scenario(seed=3)).serialize()
        assert first == second

    def test_different_seeds_differ(self):
        first = run_scenario(suspicious_scenario(seed=3)).serialize()
        second = run_scenario(suspicious_scenario(seed=4)).serialize()
        assert first != second


class TestCausality:
    def test_steps_time_ordered(self, seq7_trace):
        times = [step.at for step in seq7_trace.steps]
        assert times == sorted(times)

    def test_execution_never_precedes_issue(self, seq7_trace):
        issued_at = {s.detail["command_id"]: s.at for s in seq7_trace.steps_of("ACTION_ISSUED")}
        for step in seq7_trace.steps_of("COMMAND_EXECUTED"):
            assert step.at >= issued_at[step.detail["command_id"]]


class TestAssertSequence:
    def test_empty_predicates_vacuous(self, seq7_trace):
        assert assert_sequence(seq7_trace, []).ok

    def test_shuffled_fails_at_first_divergence(self, seq7_trace):
        predicates = seq7_predicates(TARGET)
        shuffled = [predicates[5], predicates[0]]  # execution before startup
        result = assert_sequence(SimTrace(scenario_name="x", steps=[seq7_trace.steps[0]]),
                                 shuffled)
        assert not result.ok
        assert result.first_unmatched == predicates[5].name

    def test_reports_first_unmatched(self):
        trace = SimTrace(scenario_name="x", steps=[TraceStep(0.0, "A", {})])
        result = assert_sequence(
            trace,
            [Predicate("sees A", lambda s: s.kind == "A"),
             Predicate("sees B", lambda s: s.kind == "B")],
        )
        assert not result.ok
        assert result.matched == 1
        assert result.first_unmatched == "sees B"


class TestScenarioLoading:
    def test_builtin_mapping(self):
        scenario = scenario_from_mapping({"builtin": "seq7"})
        assert scenario.name == "seq7"

    def test_unknown_builtin(self):
        with pytest.raises(ScenarioError):
            scenario_from_mapping({"builtin": "nope"})

    def test_full_mapping(self):
        scenario = scenario_from_mapping(
            {
                "name": "tiny",
                "duration": 60,
                "machines": [{"agent": "pc-a", "trace": "0 input\n30 input\n"}],
                "admin": [{"at": 5, "action": "view"}],
            }
        )
        trace = run_scenario(scenario)
        assert trace.steps_of("LIST_DISPLAYED")

    def test_empty_scenario_runs_empty(self):
        scenario = scenario_from_mapping({"name": "void", "duration": 10})
        trace = run_scenario(scenario)
        assert trace.steps_of("STARTUP_RETRIEVAL")
        assert trace.invocations == {}

    def test_bad_admin_time(self):
        with pytest.raises(ScenarioError):
            scenario_from_mapping(
                {"name": "x", "duration": 10, "admin": [{"at": 99, "action": "view"}]}
            )


class TestLabScenario:
    def test_victims_match_brute_force_replay(self):
        scenario = lab_scenario(seed=8)
        trace = run_scenario(scenario)
        victims = set()
        for machine in scenario.machines:
            t = 0.0
            while t <= scenario.duration:
                if t - machine.world.last_input_at(t) >= scenario.policy.idle_threshold_seconds:
                    victims.add(machine.agent_id)
                    break
                t += scenario.heartbeat_period
        logged_off = {
            agent: kinds.count("LOGOFF")
            for agent, kinds in trace.invocations.items()
            if kinds.count("LOGOFF")
        }
        assert set(logged_off) == victims
        assert all(count == 1 for count in logged_off.values())
        assert command_conservation(trace) == []

    def test_fleet_composition(self):
        scenario = lab_scenario(seed=8)
        crt = sum(1 for m in scenario.machines if m.display_class == "CRT")
        assert (crt, len(scenario.machines) - crt) == (47, 63)


class TestSuspiciousScenario:
    def test_exactly_38_of_180_flagged(self):
        trace = run_scenario(suspicious_scenario(seed=9))
        view = trace.controller.fleet_view()
        assert len(view.rows) == 180
        assert len(view.flagged()) == 38


ALL_KINDS = [CommandKind.SHUTDOWN, CommandKind.RESTART, CommandKind.LOGOFF, CommandKind.HIBERNATE]
FAULT_POINTS = ["before_claim", "after_claim", "after_invoke", "after_done", "after_transition"]


def crash_replay_trial(seed: int) -> None:
    """One randomized poll/crash/replay interleaving; asserts the exactly-once contract."""
    rng = random.Random(seed)
    clock = FakeClock(0.0)
    ledger = MemoryLedger()
    journal = DedupeJournal()  # stands in for the persisted journal file
    platform = SimulatedPlatform()
    world = parse_trace("0 input\n")
    config = AgentConfig(agent_id="pc-a").validate()

    kinds = rng.sample(ALL_KINDS, rng.randint(1, 3))  # distinct kinds attribute invocations
    commands = []
    for i, kind in enumerate(kinds):
        command = CommandEntry(f"cmd-{i}", "pc-a", kind, issued_at=float(i), expires_at=300.0 + i)
        ledger.append(command)
        commands.append(command)

    crash_plan: dict[str, str] = {}

    def faults(point: str, command_id: str) -> None:
        if crash_plan.get("point") == point:
            crash_plan.clear()
            raise SimulatedCrash()

    def make_agent() -> Agent:
        return Agent(
            config=config,
            ledger=ledger.for_author("pc-a"),
            clock=clock,
            sources=AgentSources(
                input=ScriptedInputSource(world, clock),
                processes=ScriptedProcessSource(world, clock),
                traffic=ScriptedTrafficSource(world, clock),
            ),
            platform=platform,
            journal=journal,
            faults=faults,
        )

    agent = make_agent()
    for _ in range(rng.randint(1, 6)):
        clock.advance(rng.choice([0.0, 1.0, 5.0, 30.0]))
        if rng.random() < 0.6:
            crash_plan["point"] = rng.choice(FAULT_POINTS)
        try:
            agent.poll_tick()
        except SimulatedCrash:
            agent = make_agent()  # replay after restart, journal survives
        crash_plan.clear()
    clock.advance(10.0)
    try:
        agent.poll_tick()  # final resolution pass, no faults armed
    except SimulatedCrash:  # pragma: no cover
        pass
    clock.set_time(10_000.0)
    ledger.expire_overdue(clock.now())

    current = ledger.current_commands()
    for command in commands:
        state = current[command.command_id].state
        invocations = platform.count(command.kind)
        assert invocations <= 1, (seed, command.kind, state)
        if state is CommandState.EXECUTED:
            assert invocations == 1, (seed, command.kind)
        if state is CommandState.EXPIRED:
            assert invocations == 0, (seed, command.kind)
        assert state is not CommandState.PENDING, (seed, command.kind)


class TestExactlyOnce:
    def test_randomized_interleavings(self):
        for seed in range(200):
            crash_replay_trial(seed)
