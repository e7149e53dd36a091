import os
import tempfile
import unittest

from nebbsim.core.errors import ConfigurationError
from nebbsim.core.mechanism import Mechanism
from nebbsim.engine.config import SimConfig, load_config_file, parse_bool
from nebbsim.router.arbiters import SaInputMode
from nebbsim.router.buffers import BufferKind, BufferOrganization
from nebbsim.router.flow_control import DeadlockRule
from nebbsim.topology.shape import TopologyKind
from nebbsim.traffic.patterns import TrafficPattern


class OverrideTests(unittest.TestCase):
    def test_strings_are_parsed(self):
        config = SimConfig().with_overrides(
            topology="torus", mechanism="nebb-wh", buffer="private:6", packet_sizes="1,5",
            load="0.08", check="yes", la_threshold="off", sa_input_mode="lock",
            deadlock_rule="fbfc-l",
        )
        self.assertIs(config.topology, TopologyKind.TORUS)
        self.assertIs(config.mechanism, Mechanism.NEBB_WH)
        self.assertEqual(config.buffer, BufferOrganization(BufferKind.PRIVATE, 6))
        self.assertEqual(config.packet_sizes, (1, 5))
        self.assertAlmostEqual(config.load, 0.08)
        self.assertTrue(config.check)
        self.assertIsNone(config.la_threshold)
        self.assertIs(config.sa_input_mode, SaInputMode.LOCK_UNTIL_TAIL)
        self.assertIs(config.deadlock_rule, DeadlockRule.FBFC_L)

    def test_dashed_keys_and_typed_values(self):
        config = SimConfig().with_overrides(**{"warmup-fraction": 0.5, "seed": 9})
        self.assertEqual(config.warmup_fraction, 0.5)
        self.assertEqual(config.seed, 9)

    def test_unknown_key(self):
        with self.assertRaises(ConfigurationError) as ctx:
            SimConfig().with_overrides(radix="4")
        self.assertIn("radix", str(ctx.exception))

    def test_bad_value_names_the_key(self):
        with self.assertRaises(ConfigurationError) as ctx:
            SimConfig().with_overrides(cycles="many")
        self.assertIn("cycles", str(ctx.exception))
        with self.assertRaises(ConfigurationError):
            SimConfig().with_overrides(pattern="tornado")

    def test_parse_bool(self):
        self.assertTrue(parse_bool("On"))
        self.assertFalse(parse_bool("0"))
        with self.assertRaises(ConfigurationError):
            parse_bool("maybe")

    def test_to_dict_is_flat(self):
        exported = SimConfig().to_dict()
        self.assertEqual(exported["deadlock_rule"], "auto")
        self.assertEqual(exported["mechanism"], "NEBB-Hybrid")
        self.assertEqual(exported["buffer"], "shared:12")
        self.assertEqual(exported["packet_sizes"], "1,5")
        self.assertEqual(exported["topology"], "mesh")
        rebuilt = SimConfig.from_mapping({k: str(v) for k, v in exported.items() if v is not None})
        self.assertEqual(rebuilt, SimConfig())


class DeadlockRuleTests(unittest.TestCase):
    def _rule(self, topology, mechanism):
        return SimConfig(topology=topology, k=4, concentration=1, mechanism=mechanism).resolved_deadlock_rule

    def test_auto_rules(self):
        self.assertIs(self._rule(TopologyKind.MESH, Mechanism.NEBB_HYBRID), DeadlockRule.NONE)
        self.assertIs(self._rule(TopologyKind.TORUS, Mechanism.NEBB_HYBRID), DeadlockRule.FBFC_L)
        self.assertIs(self._rule(TopologyKind.TORUS, Mechanism.NEBB_WH), DeadlockRule.FBFC_L)
        self.assertIs(self._rule(TopologyKind.TORUS, Mechanism.NEBB_VCT), DeadlockRule.BUBBLE)
        self.assertIs(self._rule(TopologyKind.RING, Mechanism.VCT_BASELINE), DeadlockRule.BUBBLE)
        self.assertIs(self._rule(TopologyKind.TORUS, Mechanism.EMPTY_VC), DeadlockRule.DATELINE)

    def test_auto_defaults_validate(self):
        for mechanism in Mechanism:
            for topology in TopologyKind:
                SimConfig(topology=topology, k=4, concentration=1, mechanism=mechanism).validate()


class ValidationTests(unittest.TestCase):
    def test_empty_vc_with_fbfc(self):
        config = SimConfig(topology=TopologyKind.TORUS, k=4, mechanism=Mechanism.EMPTY_VC,
                           deadlock_rule=DeadlockRule.FBFC_L)
        with self.assertRaises(ConfigurationError) as ctx:
            config.validate()
        self.assertIn("FBFC", str(ctx.exception))

    def test_wrap_rule_on_mesh(self):
        with self.assertRaises(ConfigurationError):
            SimConfig(deadlock_rule=DeadlockRule.FBFC_L).validate()

    def test_nebb_vct_needs_bubble_on_torus(self):
        with self.assertRaises(ConfigurationError):
            SimConfig(topology=TopologyKind.TORUS, k=4, mechanism=Mechanism.NEBB_VCT,
                      deadlock_rule=DeadlockRule.FBFC_L).validate()

    def test_bubble_needs_two_packets_of_room(self):
        config = SimConfig(topology=TopologyKind.TORUS, k=4, mechanism=Mechanism.NEBB_VCT,
                           buffer=BufferOrganization(BufferKind.SHARED, 8))
        with self.assertRaises(ConfigurationError) as ctx:
            config.validate()
        self.assertIn("bubble", str(ctx.exception))

    def test_fbfc_needs_packet_plus_one(self):
        config = SimConfig(topology=TopologyKind.RING, k=4, concentration=1,
                           buffer=BufferOrganization(BufferKind.PRIVATE, 5))
        with self.assertRaises(ConfigurationError):
            config.validate()

    def test_cut_through_needs_room_for_a_packet(self):
        config = SimConfig(mechanism=Mechanism.VCT_BASELINE, buffer=BufferOrganization(BufferKind.PRIVATE, 4))
        with self.assertRaises(ConfigurationError):
            config.validate()

    def test_permutation_needs_power_of_two(self):
        config = SimConfig(k=3, concentration=1, pattern=TrafficPattern.BIT_REVERSAL)
        with self.assertRaises(ConfigurationError):
            config.validate()

    def test_shared_buffer_smaller_than_vc_count(self):
        with self.assertRaises(ConfigurationError):
            SimConfig(vcs=4, buffer=BufferOrganization(BufferKind.SHARED, 3)).validate()

    def test_invalid_scalars(self):
        for overrides in ({"k": 1}, {"cycles": 0}, {"warmup_fraction": 1.0}, {"seed": -1},
                          {"link_latency": 2}, {"vcs": 0}, {"load": 2.0}):
            with self.subTest(overrides=overrides):
                with self.assertRaises(ConfigurationError):
                    SimConfig(**overrides).validate()


class ConfigFileTests(unittest.TestCase):
    def test_load_file(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "torus.cfg")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write("# 4x4 torus\ntopology = torus\nk = 4\n\npacket-sizes = 1,5  # bimodal\n")
            values = load_config_file(path)
        self.assertEqual(values, {"topology": "torus", "k": "4", "packet_sizes": "1,5"})
        config = SimConfig.from_mapping(values)
        self.assertIs(config.topology, TopologyKind.TORUS)
        self.assertEqual(config.k, 4)

    def test_bad_lines(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "bad.cfg")
            with open(path, "w", encoding="utf-8") as handle:
                handle.write("topology torus\n")
            with self.assertRaises(ConfigurationError) as ctx:
                load_config_file(path)
            self.assertIn(":1:", str(ctx.exception))
            with open(path, "w", encoding="utf-8") as handle:
                handle.write("radix = 4\n")
            with self.assertRaises(ConfigurationError):
                load_config_file(path)

    def test_missing_file(self):
        with self.assertRaises(ConfigurationError):
            load_config_file("/nonexistent/nebbsim.cfg")


if __name__ == "__main__":
    unittest.main()
