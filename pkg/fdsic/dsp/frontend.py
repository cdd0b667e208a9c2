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

"""Baseband-equivalent front-end impairments: PA nonlinearity, multipath and AWGN."""
import dataclasses
import math
from collections.abc import Sequence
from typing import Optional

import numpy as np
from scipy import optimize

from fdsic.dsp.filters import SampleStream, FirTaps, fir_convolve, measure_power


# Power ratio of the 3 dB compression point.
COMPRESSION_RATIO_3DB: float = 10 ** (-3 / 10)


@dataclasses.dataclass(frozen=True)
class RappPaModel:
    """AM/AM-only Rapp amplifier.

    out = g·x / (1 + (|g·x| / A)^(2σ))^(1 / (2σ)), with σ the smoothness, A the
    saturation amplitude and g the input gain derived from the input back-off.
    """
    smoothness: float = 2.0
    sat_amplitude: float = 1.0
    input_gain: float = 1.0

    def __post_init__(self) -> None:
        if self.smoothness <= 0:
            raise ValueError(f"Rapp smoothness should be positive, got {self.smoothness}.")
        if self.sat_amplitude <= 0:
            raise ValueError(f"Saturation amplitude should be positive, got {self.sat_amplitude}.")
        if self.input_gain < 0:
            raise ValueError(f"Input gain should be non-negative, got {self.input_gain}.")


@dataclasses.dataclass(frozen=True)
class MultipathChannel:
    """Sample-spaced interference channel h[k] of L_h·M taps with unit power."""
    taps: np.ndarray
    span_symbols: int

    def __post_init__(self) -> None:
        taps: np.ndarray = np.asarray(self.taps, dtype=np.complex128).reshape(-1)
        if self.span_symbols < 1 or taps.size % self.span_symbols != 0:
            raise ValueError(f"{taps.size} taps cannot span {self.span_symbols} symbols.")
        power: float = float(np.sum(np.abs(taps) ** 2))
        if abs(power - 1.0) > 1e-9:
            raise ValueError(f"Channel taps should have unit power, got {power}.")
        object.__setattr__(self, "taps", taps)

    @property
    def oversampling(self) -> int:
        return self.taps.size // self.span_symbols

    def as_fir(self) -> FirTaps:
        return FirTaps(self.taps, self.span_symbols, self.oversampling)


@dataclasses.dataclass(frozen=True)
class NoiseSpec:
    """Circularly-symmetric white Gaussian noise at a given SNR before the MF.

    :ivar snr_db: Signal power over noise power, in dB. +inf disables the noise.
    :ivar stream_id: Id of the random stream the noise is drawn from.
    :ivar reference_power: Signal power the SNR refers to. When None, the power of the
        stream the noise is added to is measured.
    """
    snr_db: float
    stream_id: int = 0
    reference_power: Optional[float] = None


def rapp_amplify(x: SampleStream, pa: RappPaModel) -> SampleStream:
    v: np.ndarray = pa.input_gain * x.data
    two_sigma: float = 2 * pa.smoothness
    out: np.ndarray = v / (1 + (np.abs(v) / pa.sat_amplitude) ** two_sigma) ** (1 / two_sigma)
    return SampleStream(out, x.oversampling)


def polynomial_amplify(x: SampleStream, coeffs: Sequence[complex]) -> SampleStream:
    """Odd-order memoryless polynomial PA: out = Σ_ℓ a_ℓ · x·|x|^(2ℓ).

    :param x: PA input.
    :param coeffs: Coefficients of the degrees 1, 3, 5, ... in that order.
    """
    if len(coeffs) == 0:
        raise ValueError("At least the linear coefficient should be provided.")
    magnitude_sq: np.ndarray = np.abs(x.data) ** 2
    out: np.ndarray = np.zeros_like(x.data)
    for order, a in enumerate(coeffs):
        out += a * x.data * magnitude_sq ** order
    return SampleStream(out, x.oversampling)


def compression_point_3db(pa: RappPaModel) -> float:
    """Input power of the Rapp curve where the output lies 3 dB below the linear extrapolation.

    The gain is not applied, i.e. the power refers to the amplitude |g·x| seen by the
    AM/AM curve. It is solved by bisection to 1e-9 relative accuracy or better.
    """
    two_sigma: float = 2 * pa.smoothness
    target: float = math.sqrt(COMPRESSION_RATIO_3DB)

    def amplitude_gain_excess(a: float) -> float:
        return (1 + (a / pa.sat_amplitude) ** two_sigma) ** (-1 / two_sigma) - target

    amplitude: float = optimize.bisect(
        amplitude_gain_excess,
        1e-9 * pa.sat_amplitude,
        1e3 * pa.sat_amplitude,
        xtol=1e-15 * pa.sat_amplitude,
        rtol=1e-12,
        maxiter=500
    )
    return amplitude ** 2


def set_ibo(pa: RappPaModel, ibo_db: float, ref_input_power: float) -> RappPaModel:
    """Returns a copy of the PA whose input gain backs the mean input power off by `ibo_db`.

    :param pa: The amplifier to configure.
    :param ibo_db: Input back-off from the 3 dB compression point, in dB. +inf yields a
        zero input gain.
    :param ref_input_power: Mean power of the stream that will drive the PA.
    """
    if ref_input_power <= 0:
        raise ValueError(f"Reference input power should be positive, got {ref_input_power}.")
    if math.isinf(ibo_db) and ibo_db > 0:
        return dataclasses.replace(pa, input_gain=0.0)
    target_power: float = compression_point_3db(pa) * 10 ** (-ibo_db / 10)
    return dataclasses.replace(pa, input_gain=math.sqrt(target_power / ref_input_power))


def draw_channel(
    rng: np.random.Generator,
    span_symbols: int,
    oversampling: int
) -> MultipathChannel:
    """Draws L_h·M i.i.d. CN(0, 1) taps with a uniform profile, normalized to unit power."""
    if span_symbols < 1 or oversampling < 1:
        raise ValueError(f"Invalid channel dimensions: span_symbols={span_symbols}, "
                         f"oversampling={oversampling}")
    taps_num: int = span_symbols * oversampling
    taps: np.ndarray = (rng.standard_normal(taps_num)
                        + 1j * rng.standard_normal(taps_num)) / math.sqrt(2)
    taps /= np.linalg.norm(taps)
    return MultipathChannel(taps, span_symbols)


def delta_channel(
    span_symbols: int = 1,
    oversampling: int = 1,
    mode: str = "aligned"
) -> MultipathChannel:
    """Single path placed so that `apply_channel` in the same mode is an identity.

    That is the group-delay index (M·L_h - 1) // 2 in "aligned" mode, the first tap in
    "causal" mode.
    """
    taps: np.ndarray = np.zeros(span_symbols * oversampling, dtype=np.complex128)
    taps[(taps.size - 1) // 2 if mode == "aligned" else 0] = 1.0
    return MultipathChannel(taps, span_symbols)


def apply_channel(x: SampleStream, h: MultipathChannel, mode: str = "aligned") -> SampleStream:
    """y[k] = (x ∗ h)[k + d], truncated to len(x) samples.

    In the default "aligned" mode d = ⌊(len(h) - 1) / 2⌋, so the paths spread around the
    symbol instants and symbol n keeps its energy in the observation window starting at
    sample nM. "causal" sets d = 0: the first tap is the earliest path and no future
    symbol reaches sample k.
    """
    return fir_convolve(x, h.as_fir(), mode=mode)


def add_awgn(x: SampleStream, spec: NoiseSpec, rng: np.random.Generator) -> SampleStream:
    """Adds complex Gaussian noise of variance P / 10^(snr_db / 10) per sample."""
    if math.isinf(spec.snr_db) and spec.snr_db > 0:
        return x
    reference: float = (spec.reference_power if spec.reference_power is not None
                        else measure_power(x.data))
    variance: float = reference / 10 ** (spec.snr_db / 10)
    noise: np.ndarray = math.sqrt(variance / 2) * (
        rng.standard_normal(len(x)) + 1j * rng.standard_normal(len(x))
    )
    return SampleStream(x.data + noise, x.oversampling)
