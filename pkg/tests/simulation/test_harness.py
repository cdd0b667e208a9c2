# SPDX-FileCopyrightText: Copyright (c) 2025 The fdsic authors. All rights reserved.
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import math
import unittest
from pathlib import Path

import numpy as np
import pandas as pd

from fdsic.cancellers.matched_filter import LearnedMf
from fdsic.config import get_config
from fdsic.simulation import harness
from fdsic.simulation.harness import PacketResult


CONFIGS_DIR: Path = Path(__file__).parents[2] / "configs"


def _small_config(**args):
    opts: list[tuple[str, str]] = [("SIM.PROGRESS", "False")] + list(args.pop("opts", []))
    return get_config({"n": 64, "packets": 2, "jobs": 1, "opts": opts, **args})


class TestPacketRandomness(unittest.TestCase):

    def test_packet_rngs_depend_on_seed_and_packet_only(self) -> None:
        a: list[np.random.Generator] = harness.packet_rngs(7, 3)
        b: list[np.random.Generator] = harness.packet_rngs(7, 3)
        self.assertEqual(len(a), harness.STREAMS_NUM)
        for x, y in zip(a, b):
            self.assertEqual(x.integers(1 << 30), y.integers(1 << 30))
        draws: set[int] = {int(g.integers(1 << 30)) for g in harness.packet_rngs(7, 4)}
        self.assertEqual(len(draws), harness.STREAMS_NUM)
        self.assertNotEqual(harness.packet_rngs(7, 3)[0].integers(1 << 30),
                            harness.packet_rngs(8, 3)[0].integers(1 << 30))

    def test_simulate_bursts_is_reproducible(self) -> None:
        config = _small_config()
        a: harness.PacketBursts = harness.simulate_bursts(config, 1)
        b: harness.PacketBursts = harness.simulate_bursts(config, 1)
        np.testing.assert_array_equal(a.eta_data.data, b.eta_data.data)
        np.testing.assert_array_equal(a.s_pilot.data, b.s_pilot.data)
        self.assertEqual(len(a.s_data), 64)
        self.assertEqual(len(a.s_pilot), 128)
        self.assertFalse(np.array_equal(a.s_data.data, harness.simulate_bursts(config, 2).s_data.data))


class TestRunPacket(unittest.TestCase):

    def test_representable_interference_is_cancelled_exactly(self) -> None:
        config = get_config({"cfg": str(CONFIGS_DIR / "exactness.yaml")})
        for packet in range(3):
            result: PacketResult = harness.run_packet(config, packet)
            self.assertEqual(result.failed, ())
            self.assertLess(result.residual_db["hammerstein"], -80)

    def test_oversampled_pulse_breaks_exactness(self) -> None:
        config = get_config({"cfg": str(CONFIGS_DIR / "exactness.yaml"), "m": 8, "lg": 4,
                             "opts": [("LINK.PULSE", "rrc")]})
        result: PacketResult = harness.run_packet(config, 0)
        self.assertGreater(result.residual_db["hammerstein"], -40)

    def test_clean_symbol_rate_link_is_cancelled_by_both(self) -> None:
        config = get_config({"m": 1, "lg": 1, "opts": [
            ("LINK.PULSE", "delta"), ("PA.MODEL", "linear"), ("CHANNEL.TYPE", "delta"),
            ("NOISE.SNR_DB", "inf")
        ]})
        for packet in range(2):
            result: PacketResult = harness.run_packet(config, packet)
            self.assertLess(result.residual_db["hammerstein"], -80)
            self.assertLess(result.residual_db["learned_mf"], -80)

    def test_cancellation_reduces_interference(self) -> None:
        config = _small_config()
        for packet in range(2):
            result: PacketResult = harness.run_packet(config, packet)
            self.assertTrue(math.isfinite(result.pre_cancel_si_db))
            self.assertTrue(math.isfinite(result.papr_db))
            self.assertEqual(result.exceeding_bound, ())
            for method in ("hammerstein", "learned_mf"):
                self.assertLess(result.residual_db[method], result.pre_cancel_si_db)

    def test_levels_share_the_data_symbols_reference(self) -> None:
        config = _small_config(method="hammerstein", opts=[
            ("PA.MODEL", "linear"), ("CHANNEL.TYPE", "delta"), ("NOISE.SNR_DB", "inf")
        ])
        result: PacketResult = harness.run_packet(config, 0)
        # The RRC cascade is Nyquist, so the received symbols are the data symbols.
        self.assertAlmostEqual(result.pre_cancel_si_db, 0.0, delta=0.1)

    def test_exceeding_bound(self) -> None:
        result: PacketResult = PacketResult(0, {"hammerstein": 3.0, "learned_mf": 7.0}, 0.5)
        self.assertEqual(result.exceeding_bound, ("learned_mf",))
        failed: PacketResult = PacketResult(0, {"hammerstein": math.nan}, 0.5, ("hammerstein",))
        self.assertEqual(failed.exceeding_bound, ())

    def test_failed_fit_is_reported(self) -> None:
        # 16 pilots cannot determine the 32 coefficients of the learned MF.
        config = _small_config(np=16)
        result: PacketResult = harness.run_packet(config, 0)
        self.assertEqual(result.failed, ("learned_mf",))
        self.assertTrue(math.isnan(result.residual_db["learned_mf"]))
        self.assertTrue(math.isfinite(result.residual_db["hammerstein"]))
        self.assertAlmostEqual(harness.failed_fraction([result]), 0.5)

    def test_fit_packet_mf(self) -> None:
        mf: LearnedMf = harness.fit_packet_mf(_small_config(), 0)
        self.assertEqual(mf.g1.size, 32)
        np.testing.assert_array_equal(mf.g1, harness.fit_packet_mf(_small_config(), 0).g1)


class TestRunPackets(unittest.TestCase):

    def test_parallel_run_matches_serial_run(self) -> None:
        serial: list[PacketResult] = harness.run_packets(_small_config(packets=4))
        parallel: list[PacketResult] = harness.run_packets(_small_config(packets=4, jobs=2))
        self.assertEqual([r.packet_index for r in parallel], [0, 1, 2, 3])
        self.assertEqual(serial, parallel)

    def test_packets_do_not_depend_on_the_packet_count(self) -> None:
        short: list[PacketResult] = harness.run_packets(_small_config(packets=2))
        long: list[PacketResult] = harness.run_packets(_small_config(packets=3))
        self.assertEqual(short, long[:2])


class TestTables(unittest.TestCase):

    def setUp(self) -> None:
        self.results: list[PacketResult] = [
            PacketResult(0, {"hammerstein": -10.0, "learned_mf": -30.0}, 0.5, (), 9.0),
            PacketResult(1, {"hammerstein": -20.0, "learned_mf": math.nan}, 0.4,
                         ("learned_mf",), 10.0),
        ]

    def test_summarize(self) -> None:
        summary: dict[str, dict[str, float]] = harness.summarize(self.results,
                                                                 ("hammerstein", "learned_mf"))
        self.assertAlmostEqual(summary["hammerstein"]["mean_residual_db"], -12.596, delta=1e-3)
        self.assertEqual(summary["learned_mf"]["n_packets"], 1)
        self.assertEqual(summary["learned_mf"]["n_failed"], 1)
        self.assertAlmostEqual(harness.failed_fraction(self.results), 0.25)

    def test_packet_table(self) -> None:
        table: pd.DataFrame = harness.packet_table(self.results, ("hammerstein", "learned_mf"))
        self.assertEqual(list(table.columns), harness.TRACE_COLUMNS)
        self.assertEqual(len(table), 4)
        self.assertEqual(list(table["method"]), ["hammerstein", "learned_mf"] * 2)

    def test_summary_table_gain(self) -> None:
        summary: dict[str, dict[str, float]] = harness.summarize(self.results,
                                                                 ("hammerstein", "learned_mf"))
        table: pd.DataFrame = harness.summary_table(summary, "snr", 0.0, 5)
        self.assertEqual(list(table.columns), harness.SWEEP_COLUMNS)
        self.assertAlmostEqual(float(table["gain_db"].iloc[0]), -12.596 + 30.0, delta=1e-3)
        self.assertEqual(set(table["seed"]), {5})

    def test_summary_table_of_one_method_has_no_gain(self) -> None:
        summary: dict[str, dict[str, float]] = harness.summarize(self.results, ("hammerstein",))
        table: pd.DataFrame = harness.summary_table(summary, "none", "", 0)
        self.assertTrue(math.isnan(float(table["gain_db"].iloc[0])))


class TestSweep(unittest.TestCase):

    def test_sweep_rows(self) -> None:
        result: harness.SweepResult = harness.sweep(_small_config(), "snr", [0.0, 10.0])
        self.assertEqual(list(result.summary.columns), harness.SWEEP_COLUMNS)
        self.assertEqual(len(result.summary), 4)
        self.assertEqual(list(result.summary["value"]), [0.0, 0.0, 10.0, 10.0])
        self.assertEqual(set(result.summary["param"]), {"snr"})

    def test_sweep_of_integer_parameter(self) -> None:
        result: harness.SweepResult = harness.sweep(_small_config(method="hammerstein"),
                                                    "lg", [2.0, 3.0])
        self.assertEqual(len(result.summary), 2)
        self.assertTrue((result.summary["n_packets"] == 2).all())

    def test_sweep_validates_every_point(self) -> None:
        with self.assertRaises(ValueError):
            harness.sweep(_small_config(), "m", [0])

    def test_unknown_parameter(self) -> None:
        with self.assertRaises(ValueError):
            harness.sweep(_small_config(), "rolloff", [0.25])

    def test_sweep_is_reproducible(self) -> None:
        a: harness.SweepResult = harness.sweep(_small_config(), "ibo", [3.0])
        b: harness.SweepResult = harness.sweep(_small_config(), "ibo", [3.0])
        pd.testing.assert_frame_equal(a.summary, b.summary)


class TestResidualTrends(unittest.TestCase):
    """Orderings and trends of the mean residual SI, at reduced packet counts."""

    @staticmethod
    def _config(packets: int, **args):
        opts: list[tuple[str, str]] = [("SIM.PROGRESS", "False")]
        return get_config({"packets": packets, "jobs": 1, "opts": opts, **args})

    @staticmethod
    def _means(config, parameter: str, values: list[float]) -> dict[tuple[float, str], float]:
        summary: pd.DataFrame = harness.sweep(config, parameter, values).summary
        return {(r["value"], r["method"]): r["mean_residual_db"] for _, r in summary.iterrows()}

    def test_learned_mf_below_hammerstein_across_snr(self) -> None:
        means: dict[tuple[float, str], float] = self._means(self._config(60), "snr", [0.0, 21.0])
        for snr_db in (0.0, 21.0):
            self.assertLess(means[(snr_db, "learned_mf")], means[(snr_db, "hammerstein")] - 3)
        self.assertLess(means[(21.0, "learned_mf")], means[(0.0, "learned_mf")] - 2)
        self.assertLess(means[(21.0, "hammerstein")], means[(0.0, "hammerstein")])

    def test_learned_mf_overfits_long_spans(self) -> None:
        # At L_g = 16 the M·L_g coefficients equal the number of pilots.
        means: dict[tuple[float, str], float] = self._means(
            self._config(20, method="learned_mf"), "lg", [4.0, 16.0]
        )
        self.assertGreater(means[(16.0, "learned_mf")], means[(4.0, "learned_mf")] + 2)

    def test_methods_are_close_at_symbol_rate(self) -> None:
        config = self._config(60, cfg=str(CONFIGS_DIR / "m1_equivalence.yaml"))
        summary: dict[str, dict[str, float]] = harness.summarize(
            harness.run_packets(config), ("hammerstein", "learned_mf")
        )
        self.assertLessEqual(abs(summary["hammerstein"]["mean_residual_db"]
                                 - summary["learned_mf"]["mean_residual_db"]), 3)

    def test_residual_bound_holds_for_every_packet(self) -> None:
        results: list[PacketResult] = harness.run_packets(self._config(60))
        self.assertEqual([r.packet_index for r in results if r.exceeding_bound], [])


if __name__ == '__main__':
    unittest.main()
