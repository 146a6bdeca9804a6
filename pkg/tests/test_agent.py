import random

import pytest
from hypothesis import given, strategies as st

from fleetwarden.agent import (
    Agent,
    AgentConfig,
    AgentSources,
    DedupeJournal,
    FileJournal,
    ScriptedInputSource,
    ScriptedProcessSource,
    ScriptedTrafficSource,
    SimulatedCrash,
    SimulatedPlatform,
    SourceUnavailable,
    determine_status,
    parse_trace,
    sample_activity,
    sample_processes,
    sample_traffic,
)
from fleetwarden.agent.daemon import CRASH_NOTE
from fleetwarden.clock import FakeClock
from fleetwarden.ledger import (
    CommandEntry,
    CommandKind,
    CommandState,
    LedgerUnavailableError,
    MemoryLedger,
    ProcessInfo,
    Status,
    TrafficCounters,
)


class FixedInput:
    def __init__(self, at):
        self.at = at

    def last_input_at(self):
        if self.at is None:
            raise SourceUnavailable("down")
        return self.at


class FixedProcs:
    def __init__(self, procs):
        self.procs = procs

    def processes(self):
        if self.procs is None:
            raise SourceUnavailable("down")
        return self.procs


class FixedTraffic:
    def __init__(self, counters):
        self.counters_value = counters

    def counters(self):
        if self.counters_value is None:
            raise SourceUnavailable("down")
        return self.counters_value


class TestSampleActivity:
    def test_instantaneous_input(self):
        assert sample_activity(1000.0, FixedInput(1000.0)).idle_seconds == 0

    def test_arithmetic(self):
        sample = sample_activity(1600.0, FixedInput(1000.0))
        assert sample.idle_seconds == 1600 - 1000

    def test_future_input_clamped(self):
        assert sample_activity(1000.0, FixedInput(1005.0)).idle_seconds == 0

    def test_source_failure_fails_busy(self):
        sample = sample_activity(1000.0, FixedInput(None))
        assert sample.idle_seconds == 0
        assert sample.degraded


class TestDetermineStatus:
    def test_zero_idle_is_busy(self):
        assert determine_status(0, 600) is Status.BUSY

    def test_threshold_boundary_inclusive(self):
        # The ten-minute inactivity period completing is the trigger.
        assert determine_status(600, 600) is Status.IDLE

    def test_just_below_hour_threshold(self):
        assert determine_status(3599, 3600) is Status.BUSY

    @given(st.integers(0, 10**6), st.integers(1, 10**6), st.integers(0, 10**4))
    def test_monotone_in_idle(self, idle, threshold, extra):
        if determine_status(idle, threshold) is Status.IDLE:
            assert determine_status(idle + extra, threshold) is Status.IDLE

    def test_rejects_bad_arguments(self):
        with pytest.raises(ValueError):
            determine_status(10, 0)
        with pytest.raises(ValueError):
            determine_status(-1, 10)


class TestSampleProcesses:
    def test_passthrough_sorted(self):
        procs, degraded = sample_processes(
            FixedProcs([ProcessInfo("editor", 40), ProcessInfo("calc", 12)])
        )
        assert [p.name for p in procs] == ["calc", "editor"]
        assert not degraded

    def test_duplicate_pid_first_wins(self):
        procs, _ = sample_processes(
            FixedProcs([ProcessInfo("first", 12), ProcessInfo("second", 12)])
        )
        assert procs == (ProcessInfo("first", 12),)

    def test_empty(self):
        assert sample_processes(FixedProcs([])) == ((), False)

    def test_failure_degraded(self):
        procs, degraded = sample_processes(FixedProcs(None))
        assert procs == () and degraded

    def test_cap_at_256(self):
        many = [ProcessInfo(f"p{i:04d}", i + 1) for i in range(300)]
        procs, _ = sample_processes(FixedProcs(many))
        assert len(procs) == 256


class TestSampleTraffic:
    def test_passthrough(self):
        sample = sample_traffic(FixedTraffic(TrafficCounters(1500, 0, 0, 0)), TrafficCounters(1000, 0, 0, 0))
        assert sample.counters.rx_bytes == 1500
        assert not sample.reset

    def test_reset_detected(self):
        sample = sample_traffic(FixedTraffic(TrafficCounters(200, 0, 0, 0)), TrafficCounters(1500, 0, 0, 0))
        assert sample.counters.rx_bytes == 200
        assert sample.reset

    def test_first_read_reported_as_is(self):
        sample = sample_traffic(FixedTraffic(TrafficCounters(123, 45, 6, 7)), None)
        assert sample.counters == TrafficCounters(123, 45, 6, 7)
        assert not sample.reset

    def test_failure_repeats_previous(self):
        prev = TrafficCounters(10, 20, 1, 2)
        sample = sample_traffic(FixedTraffic(None), prev)
        assert sample.counters == prev
        assert sample.degraded


def make_agent(clock, ledger, trace_text="0 input\n", agent_id="pc-a", threshold=600,
               platform=None, journal=None, faults=None):
    world = parse_trace(trace_text)
    config = AgentConfig(agent_id=agent_id, idle_threshold_seconds=threshold).validate()
    return Agent(
        config=config,
        ledger=ledger,
        clock=clock,
        sources=AgentSources(
            input=ScriptedInputSource(world, clock),
            processes=ScriptedProcessSource(world, clock),
            traffic=ScriptedTrafficSource(world, clock),
        ),
        platform=platform or SimulatedPlatform(),
        journal=journal,
        faults=faults,
    )


class FlakyLedger(MemoryLedger):
    def __init__(self):
        super().__init__()
        self.down = False

    def _append_record(self, record):
        if self.down:
            raise LedgerUnavailableError("down")
        return super()._append_record(record)


class TestHeartbeat:
    def test_seq_increments(self):
        clock, ledger = FakeClock(), MemoryLedger()
        agent = make_agent(clock, ledger)
        first = agent.heartbeat_tick()
        clock.advance(30)
        second = agent.heartbeat_tick()
        assert (first.seq, second.seq) == (0, 1)

    def test_status_follows_threshold(self):
        clock, ledger = FakeClock(), MemoryLedger()
        agent = make_agent(clock, ledger, trace_text="100 input\n", threshold=600)
        clock.set_time(712.0)  # idle 612 >= 600
        entry = agent.heartbeat_tick()
        assert entry.status is Status.IDLE
        assert entry.idle_seconds == 612

    def test_buffered_retry_preserves_order(self):
        clock = FakeClock()
        ledger = FlakyLedger()
        agent = make_agent(clock, ledger)
        agent.heartbeat_tick()
        ledger.down = True
        for _ in range(3):
            clock.advance(30)
            agent.heartbeat_tick()
        assert len(ledger.read_status_history("pc-a")) == 1
        ledger.down = False
        clock.advance(30)
        agent.heartbeat_tick()
        delivered = ledger.read_status_history("pc-a")
        assert [e.seq for e in delivered] == [0, 1, 2, 3, 4]

    def test_buffer_bounded_drops_oldest(self):
        clock = FakeClock()
        ledger = FlakyLedger()
        ledger.down = True
        agent = make_agent(clock, ledger)
        for _ in range(150):
            clock.advance(30)
            agent.heartbeat_tick()
        ledger.down = False
        clock.advance(30)
        agent.heartbeat_tick()
        delivered = ledger.read_status_history("pc-a")
        assert len(delivered) == 100
        # newest survive; oldest beyond the cap were dropped
        assert delivered[-1].seq == 150

    def test_first_idle_tick_matches_trace_replay(self):
        # Oracle: brute-force replay over the scripted input trace.
        rng = random.Random(42)
        for _ in range(25):
            inputs = sorted(rng.sample(range(0, 5000), rng.randint(1, 12)))
            trace = "".join(f"{t} input\n" for t in inputs)
            threshold = rng.choice([60, 300, 600])
            period = rng.choice([10, 30])
            clock = FakeClock()
            agent = make_agent(clock, MemoryLedger(), trace_text=trace, threshold=threshold)
            ticks = [t for t in range(0, 6001, period)]
            first_idle = None
            for t in ticks:
                clock.set_time(float(t))
                entry = agent.heartbeat_tick()
                if entry.status is Status.IDLE and first_idle is None:
                    first_idle = t
            expected = None
            for t in ticks:
                last = max((i for i in inputs if i <= t), default=0)
                if t - last >= threshold:
                    expected = t
                    break
            assert first_idle == expected


def issue(ledger, cid, target="pc-a", kind=CommandKind.SHUTDOWN, issued=0.0, expires=300.0):
    cmd = CommandEntry(cid, target, kind, issued_at=issued, expires_at=expires)
    ledger.append(cmd)
    return cmd


class TestPollAndExecute:
    def test_single_shutdown(self):
        clock, ledger = FakeClock(10.0), MemoryLedger()
        platform = SimulatedPlatform()
        agent = make_agent(clock, ledger, platform=platform)
        issue(ledger, "cmd-1")
        executed = agent.poll_tick()
        assert executed == ["cmd-1"]
        assert platform.count(CommandKind.SHUTDOWN) == 1
        assert ledger.current_commands()["cmd-1"].state is CommandState.EXECUTED
        assert not agent.powered_on

    def test_other_target_untouched(self):
        clock, ledger = FakeClock(10.0), MemoryLedger()
        platform = SimulatedPlatform()
        agent = make_agent(clock, ledger, platform=platform)
        issue(ledger, "cmd-1", target="pc-b", kind=CommandKind.RESTART)
        assert agent.poll_tick() == []
        assert platform.count() == 0

    def test_repeated_poll_executes_once(self):
        clock, ledger = FakeClock(10.0), MemoryLedger()
        platform = SimulatedPlatform()
        agent = make_agent(clock, ledger, platform=platform)
        issue(ledger, "cmd-1", kind=CommandKind.LOGOFF)
        agent.poll_tick()
        agent.poll_tick()
        assert platform.count(CommandKind.LOGOFF) == 1

    def test_failed_platform_action(self):
        clock, ledger = FakeClock(10.0), MemoryLedger()
        platform = SimulatedPlatform(fail_kinds={CommandKind.RESTART})
        agent = make_agent(clock, ledger, platform=platform)
        issue(ledger, "cmd-1", kind=CommandKind.RESTART)
        assert agent.poll_tick() == []
        current = ledger.current_commands()["cmd-1"]
        assert current.state is CommandState.FAILED
        assert "failure" in current.result_note

    def test_crash_before_invoke_never_executes(self, tmp_path):
        clock, ledger = FakeClock(10.0), MemoryLedger()
        platform = SimulatedPlatform()
        journal = FileJournal(tmp_path / "journal.log")

        def faults(point, cid):
            if point == "after_claim":
                raise SimulatedCrash()

        agent = make_agent(clock, ledger, platform=platform, journal=journal, faults=faults)
        issue(ledger, "cmd-1", kind=CommandKind.LOGOFF)
        with pytest.raises(SimulatedCrash):
            agent.poll_tick()
        assert platform.count() == 0
        # replay after restart: journal says claimed; fail safe, no invocation
        replay = make_agent(clock, ledger, platform=platform,
                            journal=FileJournal(tmp_path / "journal.log"))
        replay.poll_tick()
        assert platform.count() == 0
        current = ledger.current_commands()["cmd-1"]
        assert current.state is CommandState.FAILED
        assert current.result_note == CRASH_NOTE

    def test_crash_after_invoke_completes_on_replay(self, tmp_path):
        clock, ledger = FakeClock(10.0), MemoryLedger()
        platform = SimulatedPlatform()
        journal = FileJournal(tmp_path / "journal.log")

        def faults(point, cid):
            if point == "after_done":
                raise SimulatedCrash()

        agent = make_agent(clock, ledger, platform=platform, journal=journal, faults=faults)
        issue(ledger, "cmd-1", kind=CommandKind.LOGOFF)
        with pytest.raises(SimulatedCrash):
            agent.poll_tick()
        assert platform.count(CommandKind.LOGOFF) == 1
        replay = make_agent(clock, ledger, platform=platform,
                            journal=FileJournal(tmp_path / "journal.log"))
        executed = replay.poll_tick()
        assert executed == ["cmd-1"]
        assert platform.count(CommandKind.LOGOFF) == 1  # still exactly one
        assert ledger.current_commands()["cmd-1"].state is CommandState.EXECUTED

    def test_heartbeats_stop_after_shutdown(self):
        clock, ledger = FakeClock(10.0), MemoryLedger()
        agent = make_agent(clock, ledger)
        agent.heartbeat_tick()
        issue(ledger, "cmd-1", kind=CommandKind.SHUTDOWN)
        agent.poll_tick()
        clock.advance(30)
        assert agent.heartbeat_tick() is None
        assert len(ledger.read_status_history("pc-a")) == 1

    def test_restart_resets_seq(self):
        clock, ledger = FakeClock(10.0), MemoryLedger()
        agent = make_agent(clock, ledger)
        agent.heartbeat_tick()
        clock.advance(30)
        agent.heartbeat_tick()
        issue(ledger, "cmd-1", kind=CommandKind.RESTART, issued=40.0, expires=340.0)
        clock.advance(30)
        agent.poll_tick()
        clock.advance(30)
        entry = agent.heartbeat_tick()
        assert entry.seq == 0

    def test_expired_command_not_executed(self):
        clock, ledger = FakeClock(1000.0), MemoryLedger()
        platform = SimulatedPlatform()
        agent = make_agent(clock, ledger, platform=platform)
        issue(ledger, "cmd-1", issued=0.0, expires=300.0)
        assert agent.poll_tick() == []
        assert platform.count() == 0
        assert ledger.current_commands()["cmd-1"].state is CommandState.EXPIRED
