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

"""Complex discrete-time signal primitives of the baseband link.

Symbols live at rate 1/T_sym (index n), signals at rate M/T_sym (index k). All the
functions of this module are pure and deterministic.
"""
import dataclasses
from typing import Optional

import numpy as np


__author__: str = "fdsic authors"
__version__: str = "1.0.0"
__revision__: int = 1


@dataclasses.dataclass(frozen=True)
class SymbolBlock:
    """A complex sequence at symbol rate."""
    data: np.ndarray

    def __post_init__(self) -> None:
        data: np.ndarray = np.asarray(self.data, dtype=np.complex128).reshape(-1)
        if data.size == 0:
            raise ValueError("A symbol block should contain at least one symbol.")
        object.__setattr__(self, "data", data)

    def __len__(self) -> int:
        return self.data.size


@dataclasses.dataclass(frozen=True)
class SampleStream:
    """A complex sequence at sample rate M/T_sym."""
    data: np.ndarray
    oversampling: int = 1

    def __post_init__(self) -> None:
        data: np.ndarray = np.asarray(self.data, dtype=np.complex128).reshape(-1)
        if data.size == 0:
            raise ValueError("A sample stream should contain at least one sample.")
        if self.oversampling < 1:
            raise ValueError(f"Invalid oversampling factor: {self.oversampling}")
        object.__setattr__(self, "data", data)

    def __len__(self) -> int:
        return self.data.size


@dataclasses.dataclass(frozen=True)
class FirTaps:
    """FIR coefficients spanning `span_symbols` symbols at `oversampling` samples per symbol.

    Complex taps are allowed, since a learned matched filter is complex in general.
    """
    coeffs: np.ndarray
    span_symbols: int
    oversampling: int

    def __post_init__(self) -> None:
        if self.span_symbols < 1 or self.oversampling < 1:
            raise ValueError(f"Invalid filter dimensions: span_symbols={self.span_symbols}, "
                             f"oversampling={self.oversampling}")
        coeffs: np.ndarray = np.asarray(self.coeffs, dtype=np.complex128).reshape(-1)
        if coeffs.size != self.span_symbols * self.oversampling:
            raise ValueError(f"Expected {self.span_symbols * self.oversampling} taps, "
                             f"got {coeffs.size}.")
        object.__setattr__(self, "coeffs", coeffs)

    def __len__(self) -> int:
        return self.coeffs.size

    def reversed(self) -> "FirTaps":
        """Returns the time-reversed (and conjugated) filter, i.e. the matched filter."""
        return FirTaps(np.conj(self.coeffs[::-1]), self.span_symbols, self.oversampling)


def rrc_taps(rolloff: float, span_symbols: int, oversampling: int) -> FirTaps:
    """Designs a unit-energy root-raised-cosine pulse.

    The M·L_g taps are symmetric around index (M·L_g - 1) / 2. The singular points
    t = 0 and t = ±T/(4β) are evaluated by their analytic limits.

    :param rolloff: Roll-off factor β in (0, 1].
    :param span_symbols: Filter span L_g in symbols.
    :param oversampling: Samples per symbol M.
    :return: Real-valued taps stored as complex, normalized so that Σ|c|² = 1.
    """
    if not 0.0 < rolloff <= 1.0:
        raise ValueError(f"Roll-off factor should lie in (0, 1], got {rolloff}.")
    if span_symbols < 1 or oversampling < 1:
        raise ValueError(f"Invalid filter dimensions: span_symbols={span_symbols}, "
                         f"oversampling={oversampling}")

    taps_num: int = span_symbols * oversampling
    # Time in symbol periods.
    t: np.ndarray = (np.arange(taps_num) - (taps_num - 1) / 2) / oversampling
    beta: float = rolloff

    at_zero: np.ndarray = np.isclose(t, 0.0, rtol=0.0, atol=1e-12)
    at_singular: np.ndarray = np.isclose(np.abs(t), 1 / (4 * beta), rtol=0.0, atol=1e-12)
    regular: np.ndarray = ~(at_zero | at_singular)

    taps: np.ndarray = np.empty(taps_num, dtype=np.float64)
    tr: np.ndarray = t[regular]
    taps[regular] = (
        (np.sin(np.pi * tr * (1 - beta)) + 4 * beta * tr * np.cos(np.pi * tr * (1 + beta)))
        / (np.pi * tr * (1 - (4 * beta * tr) ** 2))
    )
    taps[at_zero] = 1 - beta + 4 * beta / np.pi
    taps[at_singular] = beta / np.sqrt(2) * (
        (1 + 2 / np.pi) * np.sin(np.pi / (4 * beta))
        + (1 - 2 / np.pi) * np.cos(np.pi / (4 * beta))
    )
    taps /= np.linalg.norm(taps)

    return FirTaps(taps.astype(np.complex128), span_symbols, oversampling)


def delta_taps(span_symbols: int = 1, oversampling: int = 1) -> FirTaps:
    """A unit impulse placed at the group-delay index (M·L_g - 1) // 2."""
    coeffs: np.ndarray = np.zeros(span_symbols * oversampling, dtype=np.complex128)
    coeffs[(coeffs.size - 1) // 2] = 1.0
    return FirTaps(coeffs, span_symbols, oversampling)


def upsample(s: SymbolBlock, oversampling: int) -> SampleStream:
    """Inserts M - 1 zeros after each symbol: out[k] = s[k/M] when M | k, else 0."""
    if oversampling < 1:
        raise ValueError(f"Invalid oversampling factor: {oversampling}")
    out: np.ndarray = np.zeros(len(s) * oversampling, dtype=np.complex128)
    out[::oversampling] = s.data
    return SampleStream(out, oversampling)


def downsample(x: SampleStream, oversampling: int, phase: int = 0) -> SymbolBlock:
    """Keeps every M-th sample starting from `phase`: out[n] = x[nM + phase]."""
    if oversampling < 1:
        raise ValueError(f"Invalid oversampling factor: {oversampling}")
    if not 0 <= phase < oversampling:
        raise ValueError(f"Downsampling phase should lie in [0, {oversampling}), got {phase}.")
    return SymbolBlock(x.data[phase::oversampling])


def fir_convolve(x: SampleStream, f: FirTaps, mode: str = "full") -> SampleStream:
    """Linear convolution of a stream with FIR taps.

    Supported modes:
        - "full": the complete convolution, len(x) + len(f) - 1 samples.
        - "aligned": the group delay ⌊(len(f) - 1) / 2⌋ is trimmed and len(x) samples are
            kept, so that cascades of symmetric filters preserve symbol timing.
        - "causal": the first len(x) samples, i.e. the response of a causal system that
            starts at rest.
    """
    full: np.ndarray = np.convolve(x.data, f.coeffs)
    if mode == "full":
        out: np.ndarray = full
    elif mode == "aligned":
        delay: int = (len(f) - 1) // 2
        out = full[delay:delay + len(x)]
    elif mode == "causal":
        out = full[:len(x)]
    else:
        raise ValueError(f"Unsupported convolution mode: {mode}")
    return SampleStream(out, x.oversampling)


def pulse_shape(s: SymbolBlock, g: FirTaps) -> SampleStream:
    """x[k] = Σ_n s[n] g_T[k - nM], the full convolution of N·M + M·L_g - 1 samples."""
    return fir_convolve(upsample(s, g.oversampling), g, mode="full")


def cascade_phase(g_t: FirTaps, g_r: FirTaps) -> int:
    """Sampling phase that maps symbol n of a pulse-shaped stream to MF output n."""
    return (len(g_t) - 1 + len(g_r) - 1) // 2


def matched_filter(
    y: SampleStream,
    g: FirTaps,
    phase: int,
    n_symbols: Optional[int] = None
) -> SymbolBlock:
    """Filters with g and keeps every M-th sample: r[n] = Σ_m y[m] g[nM + phase - m].

    :param y: Received stream.
    :param g: Receive filter taps. Its oversampling factor defines M.
    :param phase: Index of the full convolution where symbol 0 is read. For a stream
        produced by `pulse_shape`, `cascade_phase(g_t, g)` aligns symbol n in to symbol n out.
    :param n_symbols: Number of output symbols. When omitted, all the symbol instants
        covered by the full convolution are returned.
    """
    if phase < 0:
        raise ValueError(f"Sampling phase should be non-negative, got {phase}.")
    full: np.ndarray = np.convolve(y.data, g.coeffs)
    out: np.ndarray = full[phase::g.oversampling]
    if n_symbols is not None:
        if n_symbols > out.size:
            out = np.concatenate([out, np.zeros(n_symbols - out.size, dtype=np.complex128)])
        out = out[:n_symbols]
    return SymbolBlock(out)


def measure_power(x: np.ndarray) -> float:
    """Mean power of a complex sequence."""
    x = np.asarray(getattr(x, "data", x))
    if x.size == 0:
        raise ValueError("Cannot measure the power of an empty sequence.")
    return float(np.mean(np.abs(x) ** 2))


def measure_papr_db(x: np.ndarray) -> float:
    """Peak-to-average power ratio in dB."""
    x = np.asarray(getattr(x, "data", x))
    power: np.ndarray = np.abs(x) ** 2
    return float(10 * np.log10(np.max(power) / measure_power(x)))
