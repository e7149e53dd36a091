import unittest

from nebbsim.core.mechanism import Mechanism
from nebbsim.diagnostics.invariants import check_invariants
from nebbsim.diagnostics.report import ViolationKind
from nebbsim.engine import SimConfig, figure6_scenario, run, simulate, split_bypass_scenario, zero_load_probe
from nebbsim.engine.simulation import Scenario, ScriptedPacket
from nebbsim.logging import LogConfig, LogLevel, get_logger, init_logging, reset_logging
from nebbsim.router.arbiters import SaInputMode
from nebbsim.topology.shape import TopologyKind

PROBE = SimConfig(k=4, concentration=1, cycles=200, warmup_fraction=0.0)


class ZeroLoadTests(unittest.TestCase):
    def tearDown(self):
        reset_logging()

    def test_single_flit_bypasses_every_router(self):
        latency, hops = zero_load_probe(PROBE, 0, 15, 1)
        self.assertEqual(latency, 17)
        self.assertEqual(hops, {"injection": 1, "buffered": 0, "bypassed_wh": 6, "bypassed_vct": 0})

    def test_single_flit_latency_is_the_same_for_every_mechanism(self):
        for mechanism in Mechanism:
            with self.subTest(mechanism=mechanism.value):
                latency, hops = zero_load_probe(PROBE.with_overrides(mechanism=mechanism), 0, 15, 1)
                self.assertEqual(latency, 17)
                self.assertEqual(hops["buffered"], 0)

    def test_five_flit_hybrid(self):
        latency, hops = zero_load_probe(PROBE, 0, 15, 5)
        self.assertEqual(latency, 21)
        self.assertEqual(hops["injection"], 5)
        self.assertEqual(hops["bypassed_wh"], 30)
        self.assertEqual(hops["buffered"], 0)

    def test_five_flit_cut_through(self):
        for mechanism in (Mechanism.VCT_BASELINE, Mechanism.NEBB_VCT):
            with self.subTest(mechanism=mechanism.value):
                latency, hops = zero_load_probe(PROBE.with_overrides(mechanism=mechanism), 0, 15, 5)
                self.assertEqual(latency, 21)
                self.assertEqual(hops["bypassed_vct"], 30)
                self.assertEqual(hops["bypassed_wh"], 0)

    def test_neighbour(self):
        latency, _ = zero_load_probe(PROBE, 0, 1, 1)
        self.assertEqual(latency, 7)


class Figure6Tests(unittest.TestCase):
    def tearDown(self):
        reset_logging()

    def test_lock_until_tail_deadlocks(self):
        scenario = figure6_scenario(SaInputMode.LOCK_UNTIL_TAIL)
        report, network = simulate(scenario.config, scenario)
        self.assertTrue(report.aborted)
        self.assertIn(ViolationKind.DEADLOCK, [v.kind for v in report.violations])
        self.assertLess(len(network.completions), 7)

    def test_demote_on_stall_drains(self):
        scenario = figure6_scenario(SaInputMode.DEMOTE_ON_STALL)
        report, network = simulate(scenario.config, scenario)
        self.assertFalse(report.aborted)
        self.assertEqual(len(network.completions), 7)
        self.assertEqual(network.flits_ejected, 14)


class RunTests(unittest.TestCase):
    def tearDown(self):
        reset_logging()

    def test_same_config_same_report(self):
        config = SimConfig(k=4, concentration=1, cycles=1500, load=0.08, seed=7)
        first = run(config).to_dict()
        second = run(config).to_dict()
        self.assertEqual(first, second)
        self.assertTrue(first["log_digest"])

    def test_seed_changes_traffic(self):
        config = SimConfig(k=4, concentration=1, cycles=1000, load=0.08, seed=7)
        self.assertNotEqual(run(config).log_digest, run(config.with_overrides(seed=8)).log_digest)

    def test_report_fields(self):
        report = run(SimConfig(k=4, concentration=1, cycles=1000, load=0.05, seed=3, drain_cycles=300))
        self.assertEqual(report.phases, {"warmup_end": 200, "measure_end": 1000, "drain_end": 1300})
        self.assertEqual(report.rng, "PCG64")
        self.assertGreater(report.packets_measured, 0)
        self.assertGreater(report.throughput, 0.0)
        self.assertLess(report.throughput, 0.1)
        self.assertFalse(report.saturated)
        self.assertEqual(sum(report.latency_histogram), report.packets_measured)
        self.assertEqual(len(report.per_router), 16)

    def test_zero_load_run_is_empty(self):
        report = run(SimConfig(k=2, concentration=1, cycles=100, load=0.0))
        self.assertTrue(report.empty)
        self.assertFalse(report.aborted)

    def test_scripted_packets(self):
        config = PROBE.with_overrides(load=0.0)
        scenario = Scenario("two", config, injections=[ScriptedPacket(0, 0, 15, 1), ScriptedPacket(10, 3, 12, 1)])
        report, network = simulate(config, scenario)
        self.assertFalse(report.aborted)
        self.assertEqual(sorted(network.completions.values()), [17, 17])


class SplitBypassTests(unittest.TestCase):
    def setUp(self):
        init_logging(LogConfig(min_level=LogLevel.CRITICAL, color_output=False))

    def tearDown(self):
        reset_logging()

    def test_unsafe_bypass_interleaves(self):
        scenario = split_bypass_scenario(unsafe=True)
        report, _ = simulate(scenario.config, scenario)
        self.assertTrue(report.aborted)
        interleaved = [v for v in report.violations if v.kind is ViolationKind.INTERLEAVING]
        self.assertEqual([v.router for v in interleaved], [1])

    def test_buffering_behind_the_idle_packet_is_clean(self):
        scenario = split_bypass_scenario(unsafe=False)
        report, network = simulate(scenario.config, scenario)
        self.assertFalse(report.aborted)
        self.assertEqual(report.violations, [])
        self.assertEqual(network.cycle, scenario.config.cycles)
        self.assertEqual(check_invariants(network, network.cycle), [])

    def test_stuck_packets_are_reported_by_age(self):
        scenario = split_bypass_scenario(unsafe=False)
        config = scenario.config.with_overrides(cycles=250, age_warning=30)
        report, _ = simulate(config, scenario)
        self.assertFalse(report.aborted)
        stalled = [e for e in get_logger("watchdog").entries if e.operation == "packet_stalled"]
        self.assertEqual(len({e.state["packet"] for e in stalled}), 3)
        self.assertEqual({e.cycle for e in stalled}, {100})


class HighLoadTests(unittest.TestCase):
    """Lock-holding VCT bypasses on the default 8x8 c=4 mesh near and at saturation."""

    def setUp(self):
        init_logging(LogConfig(min_level=LogLevel.CRITICAL, color_output=False))

    def tearDown(self):
        reset_logging()

    def _run(self, mechanism, load):
        report = run(SimConfig(cycles=2000, warmup_fraction=0.25, seed=3, load=load, mechanism=mechanism))
        self.assertFalse(report.aborted, [str(v) for v in report.violations])
        return report

    def test_hybrid_throughput_follows_load_below_saturation(self):
        report = self._run(Mechanism.NEBB_HYBRID, 0.08)
        self.assertAlmostEqual(report.throughput, report.offered_load, delta=0.1 * report.offered_load)

    def test_hybrid_keeps_moving_at_saturation(self):
        report = self._run(Mechanism.NEBB_HYBRID, 0.10)
        self.assertGreaterEqual(report.throughput, 0.75 * report.offered_load)

    def test_locking_mechanisms_never_deadlock(self):
        for mechanism in (Mechanism.NEBB_HYBRID, Mechanism.NEBB_VCT):
            for load in (0.10, 0.14):
                with self.subTest(mechanism=mechanism.value, load=load):
                    self.assertGreater(self._run(mechanism, load).flits_ejected, 0)


class TrendTests(unittest.TestCase):
    """Same seed, same traffic; only the bypass mechanism differs."""

    def setUp(self):
        init_logging(LogConfig(min_level=LogLevel.CRITICAL, color_output=False))

    def tearDown(self):
        reset_logging()

    def _reports(self, load, mechanisms, cycles=1500):
        base = SimConfig(cycles=cycles, warmup_fraction=0.3, seed=21, load=load)
        reports = {m: run(base.with_overrides(mechanism=m)) for m in mechanisms}
        for mechanism, report in reports.items():
            self.assertFalse(report.aborted, (mechanism.value, [str(v) for v in report.violations]))
        return reports

    def test_nebb_buffers_fewer_flits_before_saturation(self):
        reports = self._reports(0.04, (Mechanism.WH_BASELINE_ARB, Mechanism.NEBB_WH, Mechanism.NEBB_HYBRID))
        baseline = reports[Mechanism.WH_BASELINE_ARB].buffered_flit_ratio
        self.assertGreater(baseline, 0.0)
        for mechanism in (Mechanism.NEBB_WH, Mechanism.NEBB_HYBRID):
            with self.subTest(mechanism=mechanism.value):
                self.assertLessEqual(reports[mechanism].buffered_flit_ratio, baseline)

    def test_hybrid_saturates_no_lower(self):
        reports = self._reports(0.14, (Mechanism.NEBB_WH, Mechanism.NEBB_VCT, Mechanism.NEBB_HYBRID))
        hybrid = reports[Mechanism.NEBB_HYBRID].throughput
        for mechanism in (Mechanism.NEBB_WH, Mechanism.NEBB_VCT):
            with self.subTest(mechanism=mechanism.value):
                self.assertGreaterEqual(hybrid, 0.9 * reports[mechanism].throughput)

    def test_measured_load_matches_configured_load(self):
        for load in (0.05, 0.08):
            with self.subTest(load=load):
                report = self._reports(load, (Mechanism.NEBB_HYBRID,), cycles=2000)[Mechanism.NEBB_HYBRID]
                self.assertAlmostEqual(report.offered_load, load, delta=0.05 * load)


class CheckedRunTests(unittest.TestCase):
    """Runs with every per-cycle checker on."""

    def setUp(self):
        init_logging(LogConfig(min_level=LogLevel.CRITICAL, color_output=False))

    def tearDown(self):
        reset_logging()

    def _assert_clean(self, config):
        report = run(config.with_overrides(check=True))
        self.assertFalse(report.aborted, [str(v) for v in report.violations])
        self.assertEqual(report.violations, [])
        self.assertGreater(report.packets_measured, 0)

    def test_mesh_all_mechanisms(self):
        for mechanism in Mechanism:
            with self.subTest(mechanism=mechanism.value):
                self._assert_clean(SimConfig(k=4, concentration=1, cycles=600, load=0.03,
                                             seed=11, mechanism=mechanism))

    def test_default_mesh_all_mechanisms_and_loads(self):
        for mechanism in Mechanism:
            for load in (0.03, 0.08, 0.14):
                with self.subTest(mechanism=mechanism.value, load=load):
                    self._assert_clean(SimConfig(cycles=600, load=load, seed=17, mechanism=mechanism))

    def test_torus(self):
        for mechanism in (Mechanism.NEBB_HYBRID, Mechanism.NEBB_VCT, Mechanism.EMPTY_VC, Mechanism.WH_BASELINE):
            with self.subTest(mechanism=mechanism.value):
                self._assert_clean(SimConfig(topology=TopologyKind.TORUS, k=4, concentration=1, cycles=600,
                                             load=0.03, seed=5, mechanism=mechanism))

    def test_ring_single_flit(self):
        self._assert_clean(SimConfig(topology=TopologyKind.RING, k=4, concentration=1, cycles=600,
                                     load=0.03, seed=2, packet_sizes=(1,)))


if __name__ == "__main__":
    unittest.main()
