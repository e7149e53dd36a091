import unittest

from nebbsim.core.errors import ConfigurationError
from nebbsim.topology.shape import NetworkShape, TopologyKind
from nebbsim.traffic.patterns import (
    TrafficPattern,
    TrafficSpec,
    address_bits,
    bit_reverse,
    permutation_destination,
    transpose,
    uniform_destination,
)
from nebbsim.traffic.source import TrafficGenerator, zero_load_latency


class PatternTests(unittest.TestCase):
    def test_bit_reversal_and_transpose(self):
        self.assertEqual(bit_reverse(0b0001, 4), 0b1000)
        self.assertEqual(bit_reverse(0b0110, 4), 0b0110)
        self.assertEqual(transpose(0b0001, 4), 0b0100)
        self.assertEqual(transpose(0b1101, 4), 0b0111)

    def test_fixed_points_generate_nothing(self):
        self.assertIsNone(permutation_destination(TrafficPattern.BIT_REVERSAL, 0, 16))
        self.assertEqual(permutation_destination(TrafficPattern.TRANSPOSE, 1, 16), 4)

    def test_power_of_two_required(self):
        with self.assertRaises(ConfigurationError):
            address_bits(12)
        with self.assertRaises(ConfigurationError):
            transpose(1, 3)

    def test_uniform_never_picks_the_source(self):
        for i in range(100):
            dest = uniform_destination(5, 16, i / 100)
            self.assertNotEqual(dest, 5)
            self.assertTrue(0 <= dest < 16)

    def test_hotspot_draw(self):
        spec = TrafficSpec(pattern=TrafficPattern.HOTSPOT, hotspot_fraction=0.5)
        self.assertIn(spec.destination(3, 256, 0.99, 0.1), (0, 15, 240, 255))
        self.assertEqual(spec.destination(0, 256, 0.0, 0.1), 15)

    def test_parse(self):
        self.assertIs(TrafficPattern.parse("bit-reversal"), TrafficPattern.BIT_REVERSAL)
        self.assertIs(TrafficPattern.parse("Transpose"), TrafficPattern.TRANSPOSE)
        with self.assertRaises(ConfigurationError):
            TrafficPattern.parse("tornado")


class TrafficSpecTests(unittest.TestCase):
    def test_bimodal_mix(self):
        spec = TrafficSpec(injection_rate=0.09, packet_sizes=(1, 5), single_flit_ratio=0.8)
        self.assertAlmostEqual(spec.mean_packet_size, 1.8)
        self.assertAlmostEqual(spec.packet_probability, 0.05)
        self.assertEqual(spec.size_for(0.79), 1)
        self.assertEqual(spec.size_for(0.8), 5)

    def test_validation(self):
        with self.assertRaises(ConfigurationError):
            TrafficSpec(injection_rate=1.5)
        with self.assertRaises(ConfigurationError):
            TrafficSpec(packet_sizes=(1, 2, 3))


class SourceTests(unittest.TestCase):
    def _trace(self, seed, cycles=300):
        spec = TrafficSpec(injection_rate=0.2, seed=seed)
        generator = TrafficGenerator(spec, 16)
        return [p.to_dict() for c in range(cycles) for p in generator.next_injections(c)]

    def test_same_seed_same_traffic(self):
        first = self._trace(3)
        self.assertTrue(first)
        self.assertEqual(first, self._trace(3))
        self.assertNotEqual(first, self._trace(4))

    def test_ids_unique_and_sources_valid(self):
        trace = self._trace(5)
        ids = [p["id"] for p in trace]
        self.assertEqual(len(ids), len(set(ids)))
        for packet in trace:
            self.assertNotEqual(packet["source"], packet["destination"])
            self.assertIn(packet["size"], (1, 5))

    def test_zero_rate_is_silent(self):
        generator = TrafficGenerator(TrafficSpec(injection_rate=0.0), 16)
        self.assertEqual(generator.next_injections(0), [])
        self.assertEqual(generator.take_id(), 0)


class ZeroLoadTests(unittest.TestCase):
    def test_single_flit_uniform_on_a_2x2_mesh(self):
        shape = NetworkShape(TopologyKind.MESH, 2)
        spec = TrafficSpec(packet_sizes=(1,))
        self.assertAlmostEqual(zero_load_latency(shape, spec), 5 + 2 * 4 / 3)

    def test_serialization_adds_mean_size(self):
        shape = NetworkShape(TopologyKind.MESH, 2)
        single = zero_load_latency(shape, TrafficSpec(packet_sizes=(1,)))
        bimodal = zero_load_latency(shape, TrafficSpec(packet_sizes=(1, 5)))
        self.assertAlmostEqual(bimodal - single, 0.8)


if __name__ == "__main__":
    unittest.main()
