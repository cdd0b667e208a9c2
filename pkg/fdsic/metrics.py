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
from typing import Union

import numpy as np
from scipy import special, stats


# Power floor that keeps the dB conversion finite for exact cancellation.
POWER_FLOOR: float = 1e-300


def to_db(ratio: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    res = 10 * np.log10(np.maximum(ratio, POWER_FLOOR))
    return float(res) if np.ndim(res) == 0 else res


def interior(x: np.ndarray, edge: int) -> np.ndarray:
    """Drops `edge` symbols at both ends of a block, where filter transients live.

    Blocks too short to keep an interior are returned unchanged.
    """
    x = np.asarray(getattr(x, "data", x))
    if edge <= 0 or x.size <= 2 * edge:
        return x
    return x[edge:x.size - edge]


def residual_ratio(residual: np.ndarray, reference: np.ndarray, edge: int = 0) -> float:
    """Linear ratio Σ|ε|² / Σ|r|² over the interior symbols."""
    eps: np.ndarray = interior(residual, edge)
    ref: np.ndarray = interior(reference, edge)
    ref_energy: float = float(np.sum(np.abs(ref) ** 2))
    if ref_energy <= 0:
        raise ValueError("Reference sequence has no energy.")
    return float(np.sum(np.abs(eps) ** 2)) / ref_energy


def q_function(x: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    return 0.5 * special.erfc(np.asarray(x) / math.sqrt(2))


def bpsk_ber_theory(snr_db: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """BPSK error probability Q(sqrt(2·Es/N0)) over AWGN."""
    return q_function(np.sqrt(2 * 10 ** (np.asarray(snr_db, dtype=np.float64) / 10)))


def ber_confidence_interval(errors: int, bits: int, confidence: float = 0.95) -> tuple[float, float]:
    """Clopper-Pearson interval of a bit error rate."""
    if bits <= 0:
        raise ValueError(f"Number of bits should be positive, got {bits}.")
    ci = stats.binomtest(errors, bits).proportion_ci(confidence_level=confidence,
                                                     method="exact")
    return float(ci.low), float(ci.high)


class ResidualMetrics:
    """Accumulates per-packet residual SI ratios of several cancellation methods.

    Means are taken over the linear ratios and converted to dB afterwards.
    """

    def __init__(self, methods: tuple[str, ...]) -> None:
        self.methods: tuple[str, ...] = methods
        self.ratios: dict[str, list[float]] = {}
        self.failed: dict[str, int] = {}
        self.reset()

    def reset(self) -> None:
        self.ratios = {m: [] for m in self.methods}
        self.failed = {m: 0 for m in self.methods}

    def update(self, method: str, residual_db: float) -> float:
        """Adds the residual of a packet. A NaN residual marks a failed fit.

        :return: The residual of the packet in dB.
        """
        if math.isnan(residual_db):
            self.failed[method] += 1
        else:
            self.ratios[method].append(10 ** (residual_db / 10))
        return residual_db

    def compute(self) -> dict[str, dict[str, float]]:
        """Computes the mean and the std of the residuals in dB, per method.

        :return: A dictionary mapping each method to `mean_residual_db`, `std_residual_db`,
            `n_packets` and `n_failed`.
        """
        res: dict[str, dict[str, float]] = {}
        for method in self.methods:
            ratios: np.ndarray = np.asarray(self.ratios[method])
            if ratios.size > 0:
                mean_db: float = to_db(float(np.mean(ratios)))
                std_db: float = float(np.std(to_db(ratios)))
            else:
                mean_db = std_db = math.nan
            res[method] = {
                "mean_residual_db": mean_db,
                "std_residual_db": std_db,
                "n_packets": int(ratios.size),
                "n_failed": self.failed[method],
            }
        return res


class BerMetrics:
    """Counts bit errors of several detection methods."""

    def __init__(self, methods: tuple[str, ...]) -> None:
        self.methods: tuple[str, ...] = methods
        self.errors: dict[str, int] = {}
        self.bits: dict[str, int] = {}
        self.reset()

    def reset(self) -> None:
        self.errors = {m: 0 for m in self.methods}
        self.bits = {m: 0 for m in self.methods}

    def update(self, method: str, detected: np.ndarray, transmitted: np.ndarray) -> float:
        detected = np.asarray(detected)
        transmitted = np.asarray(transmitted)
        if detected.shape != transmitted.shape:
            raise ValueError(f"Shapes differ: {detected.shape} != {transmitted.shape}.")
        errors: int = int(np.count_nonzero(detected != transmitted))
        self.errors[method] += errors
        self.bits[method] += detected.size
        return errors / detected.size if detected.size > 0 else math.nan

    def compute(self) -> dict[str, dict[str, float]]:
        res: dict[str, dict[str, float]] = {}
        for method in self.methods:
            bits: int = self.bits[method]
            res[method] = {
                "ber": self.errors[method] / bits if bits > 0 else math.nan,
                "bits_counted": bits,
                "errors": self.errors[method],
            }
        return res
