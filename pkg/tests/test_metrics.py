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

import numpy as np

from fdsic import metrics
from fdsic.metrics import ResidualMetrics, BerMetrics


class TestDbConversions(unittest.TestCase):

    def test_to_db(self) -> None:
        self.assertAlmostEqual(metrics.to_db(0.1), -10.0, delta=1e-12)
        self.assertAlmostEqual(metrics.to_db(1.0), 0.0, delta=1e-12)
        self.assertTrue(math.isfinite(metrics.to_db(0.0)))
        np.testing.assert_allclose(metrics.to_db(np.array([1.0, 100.0])), np.array([0.0, 20.0]))

    def test_interior(self) -> None:
        x: np.ndarray = np.arange(10)
        np.testing.assert_array_equal(metrics.interior(x, 2), np.arange(2, 8))
        np.testing.assert_array_equal(metrics.interior(x, 0), x)
        np.testing.assert_array_equal(metrics.interior(x, 5), x)

    def test_residual_ratio(self) -> None:
        reference: np.ndarray = np.ones(10)
        residual: np.ndarray = np.full(10, 0.1)
        residual[0] = 100.0
        self.assertAlmostEqual(metrics.residual_ratio(residual, reference, edge=1), 0.01)
        with self.assertRaises(ValueError):
            metrics.residual_ratio(residual, np.zeros(10))


class TestTheory(unittest.TestCase):

    def test_q_function(self) -> None:
        self.assertAlmostEqual(float(metrics.q_function(0.0)), 0.5, delta=1e-15)
        self.assertAlmostEqual(float(metrics.q_function(1.0)), 0.158655253931457, delta=1e-12)

    def test_bpsk_ber_theory(self) -> None:
        self.assertAlmostEqual(float(metrics.bpsk_ber_theory(0.0)), 0.0786496035251426,
                               delta=1e-12)
        self.assertLess(float(metrics.bpsk_ber_theory(10.0)), 1e-5)

    def test_ber_confidence_interval(self) -> None:
        low, high = metrics.ber_confidence_interval(50, 1000)
        self.assertLess(low, 0.05)
        self.assertGreater(high, 0.05)
        low, high = metrics.ber_confidence_interval(0, 1000)
        self.assertEqual(low, 0.0)
        self.assertGreater(high, 0.0)
        with self.assertRaises(ValueError):
            metrics.ber_confidence_interval(0, 0)


class TestResidualMetrics(unittest.TestCase):

    def test_means_are_taken_in_linear_domain(self) -> None:
        residual_metrics: ResidualMetrics = ResidualMetrics(("hammerstein", "learned_mf"))
        residual_metrics.update("hammerstein", -10.0)
        residual_metrics.update("hammerstein", -20.0)
        residual_metrics.update("learned_mf", -30.0)

        res: dict[str, dict[str, float]] = residual_metrics.compute()
        self.assertAlmostEqual(res["hammerstein"]["mean_residual_db"], -12.596, delta=1e-3)
        self.assertAlmostEqual(res["hammerstein"]["std_residual_db"], 5.0, delta=1e-9)
        self.assertEqual(res["hammerstein"]["n_packets"], 2)
        self.assertAlmostEqual(res["learned_mf"]["mean_residual_db"], -30.0, delta=1e-9)

    def test_failed_fits_are_counted_apart(self) -> None:
        residual_metrics: ResidualMetrics = ResidualMetrics(("learned_mf",))
        residual_metrics.update("learned_mf", math.nan)
        res: dict[str, dict[str, float]] = residual_metrics.compute()
        self.assertEqual(res["learned_mf"]["n_failed"], 1)
        self.assertEqual(res["learned_mf"]["n_packets"], 0)
        self.assertTrue(math.isnan(res["learned_mf"]["mean_residual_db"]))

        residual_metrics.update("learned_mf", -20.0)
        res = residual_metrics.compute()
        self.assertEqual((res["learned_mf"]["n_packets"], res["learned_mf"]["n_failed"]), (1, 1))

    def test_reset(self) -> None:
        residual_metrics: ResidualMetrics = ResidualMetrics(("hammerstein",))
        residual_metrics.update("hammerstein", -10.0)
        residual_metrics.reset()
        self.assertEqual(residual_metrics.compute()["hammerstein"]["n_packets"], 0)


class TestBerMetrics(unittest.TestCase):

    def test_counts(self) -> None:
        ber_metrics: BerMetrics = BerMetrics(("reference", "learned_mf"))
        self.assertEqual(ber_metrics.update("reference", np.array([0, 1, 1, 0]),
                                            np.array([0, 1, 0, 0])), 0.25)
        ber_metrics.update("reference", np.zeros(4), np.zeros(4))

        res: dict[str, dict[str, float]] = ber_metrics.compute()
        self.assertEqual(res["reference"]["errors"], 1)
        self.assertEqual(res["reference"]["bits_counted"], 8)
        self.assertAlmostEqual(res["reference"]["ber"], 0.125)
        self.assertTrue(math.isnan(res["learned_mf"]["ber"]))

    def test_shapes_should_match(self) -> None:
        with self.assertRaises(ValueError):
            BerMetrics(("reference",)).update("reference", np.zeros(3), np.zeros(4))


if __name__ == '__main__':
    unittest.main()
