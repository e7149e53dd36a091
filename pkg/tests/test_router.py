import unittest

from nebbsim.analysis.metrics import MetricsCollector, Phases
from nebbsim.core.flit import PacketDescriptor, segment_packet
from nebbsim.core.lookahead import LaPriority, make_lookahead
from nebbsim.core.mechanism import Mechanism
from nebbsim.core.ports import Direction
from nebbsim.engine.network import Network
from nebbsim.logging import LogConfig, LogLevel, init_logging, reset_logging
from nebbsim.router.buffers import BufferKind, BufferOrganization, BypassMode
from nebbsim.router.pipeline import LaPriorityMode, RouterParams
from nebbsim.topology.shape import NetworkShape, TopologyKind

X_PLUS, X_MINUS = Direction.X_PLUS.value, Direction.X_MINUS.value
LOCAL = 4


def _network(mechanism=Mechanism.NEBB_HYBRID, **params):
    shape = NetworkShape(TopologyKind.MESH, 3, 1)
    router_params = RouterParams(mechanism, 2, BufferOrganization(BufferKind.SHARED, 12),
                                 max_packet_size=5, **params)
    metrics = MetricsCollector(Phases.from_run(100, 0.0), shape.nodes, shape.routers)
    return Network(shape, router_params, metrics)


class LookaheadPriorityTests(unittest.TestCase):
    """
    Router 1 of a 3x3 mesh: a single-flit lookahead from X- and a buffered
    single-flit head at the local port both want X+ in the same cycle.
    """

    def setUp(self):
        init_logging(LogConfig(min_level=LogLevel.CRITICAL, color_output=False))

    def tearDown(self):
        reset_logging()

    def _contend(self, cycle, **params):
        network = _network(**params)
        router = network.routers[1]
        buffered = segment_packet(PacketDescriptor(1, 1, 2, 1, 0))[0]
        router.inputs[LOCAL].push(0, buffered, router.id)
        buffered.arrival_cycle = 0
        network.sync_credit_views()
        passing = segment_packet(PacketDescriptor(2, 0, 2, 1, 0))[0]
        la = make_lookahead(passing, X_PLUS, 0, None, vct_mode=False, in_port=X_MINUS)
        router.step(cycle, [], [la])
        return router, buffered

    def _assert_lookahead_won(self, router, buffered):
        self.assertEqual(router.setups[X_MINUS].packet_id, 2)
        self.assertEqual(router.latched, [])
        self.assertIs(router.inputs[LOCAL].front(0), buffered)

    def _assert_flit_won(self, router, buffered):
        self.assertNotIn(X_MINUS, router.setups)
        self.assertEqual([l.flit for l in router.latched], [buffered])
        self.assertEqual(router.latched[0].out_port, X_PLUS)
        self.assertIsNone(router.inputs[LOCAL].front(0))

    def test_lookaheads_first_by_default(self):
        self._assert_lookahead_won(*self._contend(1))

    def test_flits_first(self):
        self._assert_flit_won(*self._contend(1, la_priority=LaPriorityMode.FLITS))

    def test_threshold_lets_an_old_head_through(self):
        self._assert_flit_won(*self._contend(10, la_threshold=5))

    def test_threshold_not_reached(self):
        self._assert_lookahead_won(*self._contend(3, la_threshold=5))


class UpstreamReservationTests(unittest.TestCase):
    """
    A 5-flit head reaches router 1 while the X- vc0 it arrives on still holds
    another packet, so NEBB-Hybrid takes it by VCT and locks X+.
    """

    def setUp(self):
        init_logging(LogConfig(min_level=LogLevel.CRITICAL, color_output=False))
        self.network = _network()
        self.router = self.network.routers[1]
        waiting = segment_packet(PacketDescriptor(1, 0, 4, 1, 0))[0]
        self.router.inputs[X_MINUS].push(0, waiting, self.router.id)
        waiting.arrival_cycle = 1
        self.network.sync_credit_views()
        self.upstream = self.network.routers[0].ledgers[X_PLUS]
        self.head = segment_packet(PacketDescriptor(2, 0, 2, 5, 0))[0]
        self.upstream.debit(0, packet_id=2)

    def tearDown(self):
        reset_logging()

    def _step(self):
        la = make_lookahead(self.head, X_PLUS, 0, None, vct_mode=False, in_port=X_MINUS)
        self.router.step(1, [], [la])

    def test_vct_bypass_prepays_the_rest_upstream(self):
        self._step()
        self.assertEqual(self.router.locked, {X_PLUS: 2})
        state = self.router.inputs[X_MINUS].vc_states[0]
        self.assertIs(state.bypass_mode, BypassMode.VCT)
        self.assertEqual(self.upstream.outstanding(0), 6)
        self.assertEqual(self.upstream.prepaid(0), 4)
        self.assertEqual(self.router.ledgers[X_PLUS].outstanding(state.out_vc), 5)
        for _ in range(4):
            self.upstream.debit(0, packet_id=2)
        self.assertEqual(self.upstream.prepaid(0), 0)
        self.assertEqual(self.upstream.outstanding(0), 6)

    def test_no_vct_bypass_when_the_rest_cannot_be_prepaid(self):
        self.upstream.consumed[1] = 8
        self._step()
        self.assertEqual(self.router.locked, {})
        self.assertNotIn(X_MINUS, self.router.setups)
        self.assertFalse(self.router.inputs[X_MINUS].vc_states[0].active)
        self.assertEqual(self.upstream.consumed, [2, 8])
        self.assertEqual(self.router.ledgers[X_PLUS].consumed, [0, 0])

    def test_max_priority_lookahead(self):
        la = make_lookahead(self.head, X_PLUS, 0, 0, vct_mode=True, in_port=X_MINUS)
        self.assertIs(la.priority, LaPriority.MAX)


if __name__ == "__main__":
    unittest.main()
