import json
import unittest

from nebbsim.analysis.metrics import MetricsCollector, Phases
from nebbsim.core.flit import PacketDescriptor, segment_packet
from nebbsim.core.mechanism import Mechanism
from nebbsim.core.ports import Direction
from nebbsim.diagnostics import DeadlockWatchdog, ViolationKind, ViolationLog, ViolationRecord, scan_queue
from nebbsim.diagnostics.invariants import check_credit_conservation, check_invariants, check_lock_exclusivity
from nebbsim.diagnostics.watchdog import AGE_SCAN_INTERVAL, watchdog
from nebbsim.engine.network import Network
from nebbsim.logging import LogConfig, LogLevel, get_logger, init_logging, reset_logging
from nebbsim.router.buffers import BufferKind, BufferOrganization, BypassMode, InputBuffer
from nebbsim.router.pipeline import RouterParams
from nebbsim.topology.shape import NetworkShape, TopologyKind

X_PLUS, X_MINUS, Y_PLUS = Direction.X_PLUS.value, Direction.X_MINUS.value, Direction.Y_PLUS.value


def _packet(pid, size):
    return segment_packet(PacketDescriptor(pid, 0, 1, size, 0))


def _network(k=2):
    shape = NetworkShape(TopologyKind.MESH, k, 1)
    params = RouterParams(Mechanism.NEBB_HYBRID, 2, BufferOrganization(BufferKind.SHARED, 12), max_packet_size=5)
    metrics = MetricsCollector(Phases.from_run(100, 0.0), shape.nodes, shape.routers)
    return Network(shape, params, metrics)


class _StubRouter:
    def __init__(self, router_id, waits, inputs=None):
        self.id = router_id
        self._waits = waits
        self.inputs = inputs or {}

    def wait_for(self):
        return self._waits


class ScanQueueTests(unittest.TestCase):
    def test_tail_then_whole_packets(self):
        leftover = _packet(1, 3)[1:]
        queue = leftover + _packet(2, 2) + _packet(3, 1)
        self.assertIsNone(scan_queue(queue))

    def test_interleaved_heads(self):
        a = _packet(1, 3)
        b = _packet(2, 2)
        message = scan_queue([a[0], b[0], a[1], a[2]])
        self.assertIsNotNone(message)
        self.assertIn("behind unfinished packet 1", message)

    def test_out_of_order_body(self):
        a = _packet(1, 4)
        self.assertIn("out of order", scan_queue([a[0], a[2], a[1], a[3]]))

    def test_orphan_body_later_in_queue(self):
        a = _packet(1, 1)
        b = _packet(2, 3)
        self.assertIn("no head", scan_queue([a[0], b[1]]))

    def test_empty_queue(self):
        self.assertIsNone(scan_queue([]))


class WatchdogTests(unittest.TestCase):
    def test_fires_once_after_horizon(self):
        dog = DeadlockWatchdog(horizon=10)
        routers = [_StubRouter(0, []), _StubRouter(1, ["input 1 vc0 waits on output 0 vc1"])]
        fired = []
        for cycle in range(30):
            record = watchdog(cycle, 0, 4, dog, routers)
            if record is not None:
                fired.append(record)
        self.assertEqual(len(fired), 1)
        record = fired[0]
        self.assertEqual(record.cycle, 10)
        self.assertIs(record.kind, ViolationKind.DEADLOCK)
        self.assertIn("R1: input 1 vc0 waits on output 0 vc1", record.detail)
        self.assertNotIn("R0", record.detail)

    def test_progress_resets(self):
        dog = DeadlockWatchdog(horizon=5)
        for cycle in range(20):
            self.assertFalse(dog.observe(cycle, 1 if cycle % 4 == 0 else 0, 3))

    def test_idle_network_never_fires(self):
        dog = DeadlockWatchdog(horizon=2)
        self.assertFalse(any(dog.observe(c, 0, 0) for c in range(10)))

    def test_horizon_must_be_positive(self):
        with self.assertRaises(ValueError):
            DeadlockWatchdog(horizon=0)
        with self.assertRaises(ValueError):
            DeadlockWatchdog(horizon=10, age_limit=0)


class PacketAgeTests(unittest.TestCase):
    def setUp(self):
        init_logging(LogConfig(min_level=LogLevel.CRITICAL, color_output=False))
        buf = InputBuffer(BufferOrganization(BufferKind.PRIVATE, 4), 2)
        for flit in _packet(4, 3):
            buf.queues[1].append(flit)
        self.routers = [_StubRouter(0, []), _StubRouter(3, [], inputs={X_MINUS: buf})]

    def tearDown(self):
        reset_logging()

    def test_stalled_packet_is_reported_once(self):
        dog = DeadlockWatchdog(horizon=1000, age_limit=50)
        self.assertEqual(dog.scan_ages(40, self.routers), [])
        self.assertEqual(dog.scan_ages(60, self.routers), [4])
        self.assertEqual(dog.scan_ages(90, self.routers), [])
        entries = [e for e in get_logger("watchdog").entries if e.operation == "packet_stalled"]
        self.assertEqual(len(entries), 1)
        self.assertEqual(entries[0].cycle, 60)
        self.assertEqual(entries[0].state["packet"], 4)
        self.assertEqual(entries[0].state["router"], 3)
        self.assertEqual(entries[0].state["vc"], 1)
        self.assertEqual(entries[0].state["age"], 60)

    def test_scans_only_on_the_interval(self):
        dog = DeadlockWatchdog(horizon=1000, age_limit=10)
        watchdog(AGE_SCAN_INTERVAL - 1, 1, 3, dog, self.routers)
        self.assertEqual(dog.stale, set())
        watchdog(AGE_SCAN_INTERVAL, 1, 3, dog, self.routers)
        self.assertEqual(dog.stale, {4})

    def test_disabled_without_limit(self):
        dog = DeadlockWatchdog(horizon=1000)
        self.assertEqual(dog.scan_ages(10_000, self.routers), [])


class CheckerTests(unittest.TestCase):
    """The checkers on a hand-corrupted 2x2 mesh."""

    def setUp(self):
        init_logging(LogConfig(min_level=LogLevel.CRITICAL, color_output=False))
        self.network = _network()

    def tearDown(self):
        reset_logging()

    def _kinds(self, records):
        return [r.kind for r in records]

    def test_idle_network_is_clean(self):
        self.assertEqual(check_invariants(self.network, 0), [])

    def test_ledger_claiming_a_missing_flit(self):
        self.network.routers[0].ledgers[X_PLUS].consumed[1] = 2
        records = check_credit_conservation(self.network, 7)
        self.assertEqual(self._kinds(records), [ViolationKind.CREDIT_OVERFLOW])
        self.assertEqual(records[0].router, 0)
        self.assertEqual(records[0].cycle, 7)
        self.assertIn("vc1", records[0].detail)

    def test_flit_without_a_debit(self):
        flit = segment_packet(PacketDescriptor(1, 0, 1, 1, 0))[0]
        self.network.routers[1].inputs[X_MINUS].queues[0].append(flit)
        records = check_credit_conservation(self.network, 3)
        self.assertEqual(self._kinds(records), [ViolationKind.CREDIT_NEGATIVE])
        self.assertEqual(records[0].router, 0)
        self.assertIn(ViolationKind.CREDIT_NEGATIVE, self._kinds(check_invariants(self.network, 3)))

    def test_single_lock_with_its_bypass_is_clean(self):
        router = self.network.routers[0]
        a = PacketDescriptor(1, 2, 1, 5, 0)
        router.inputs[Y_PLUS].vc_states[0].activate(a, X_PLUS, 0, BypassMode.VCT)
        router.locked[X_PLUS] = a.id
        self.assertEqual(check_lock_exclusivity(router, 0), [])

    def test_two_bypasses_on_one_locked_output(self):
        router = self.network.routers[0]
        a = PacketDescriptor(1, 2, 1, 5, 0)
        b = PacketDescriptor(2, 0, 1, 5, 0)
        router.inputs[Y_PLUS].vc_states[0].activate(a, X_PLUS, 0, BypassMode.VCT)
        router.inputs[4].vc_states[0].activate(b, X_PLUS, 1, BypassMode.VCT)
        router.locked[X_PLUS] = a.id
        records = check_lock_exclusivity(router, 5)
        self.assertEqual(self._kinds(records), [ViolationKind.HYBRID_LOCK])
        self.assertIn("[1, 2]", records[0].detail)

    def test_one_packet_holding_two_outputs(self):
        router = self.network.routers[0]
        a = PacketDescriptor(1, 0, 3, 5, 0)
        router.inputs[4].vc_states[0].activate(a, X_PLUS, 0, BypassMode.VCT)
        router.locked[X_PLUS] = a.id
        router.locked[Y_PLUS] = a.id
        records = check_lock_exclusivity(router, 5)
        self.assertEqual(self._kinds(records), [ViolationKind.HYBRID_LOCK, ViolationKind.HYBRID_LOCK])
        self.assertIn("holds 2 outputs", records[0].detail)


class ViolationLogTests(unittest.TestCase):
    def test_one_record_per_kind_and_router(self):
        log = ViolationLog()
        first = ViolationRecord(5, 2, ViolationKind.CREDIT_NEGATIVE, "vc0")
        self.assertTrue(log.add(first))
        self.assertFalse(log.add(ViolationRecord(9, 2, ViolationKind.CREDIT_NEGATIVE, "vc1")))
        self.assertTrue(log.add(ViolationRecord(9, 3, ViolationKind.CREDIT_NEGATIVE, "vc1")))
        self.assertTrue(log.add(ViolationRecord(9, 2, ViolationKind.FLIT_LOSS, "gone")))
        self.assertEqual(len(log.records), 3)
        summary = log.compute_summary()
        self.assertEqual(summary["by_kind"], {"CreditNegative": 2, "FlitLoss": 1})
        self.assertEqual(summary["first_cycle"], 5)
        self.assertEqual(str(first), "[cycle 5] CreditNegative at router 2: vc0")
        exported = json.loads(log.to_json())
        self.assertEqual(exported["summary"]["total"], 3)
        self.assertEqual(exported["records"][0]["kind"], "CreditNegative")


if __name__ == "__main__":
    unittest.main()
