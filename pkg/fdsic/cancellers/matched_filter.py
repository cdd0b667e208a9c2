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

"""SI canceller with a learned matched filter.

The MF coefficients g₁ are fitted by least squares so that the MF output reproduces
the known transmitted symbols. Cancellation then reduces to subtracting the transmitted
symbols, with no regeneration stage.
"""
import dataclasses
import pathlib
from typing import Any, Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from fdsic import data_utils
from fdsic.dsp import lsq
from fdsic.dsp.filters import SymbolBlock, SampleStream, FirTaps


__author__: str = "fdsic authors"
__version__: str = "1.0.0"
__revision__: int = 1


@dataclasses.dataclass(frozen=True)
class LearnedMf:
    """Learned MF of M·L_g complex coefficients, applied to observation rows of the received stream."""
    g1: np.ndarray
    oversampling: int
    span_symbols: int

    def __post_init__(self) -> None:
        g1: np.ndarray = np.asarray(self.g1, dtype=np.complex128).reshape(-1)
        if g1.size != self.oversampling * self.span_symbols:
            raise ValueError(f"Expected {self.oversampling * self.span_symbols} coefficients, "
                             f"got {g1.size}.")
        object.__setattr__(self, "g1", g1)

    def as_pulse(self) -> FirTaps:
        """Pulse-shaping taps for the remote transmitter, the pulse this MF is matched to.

        In row form the conventional MF of a pulse g_T has coefficients conj(g_T), so the
        pulse matched to g₁ is conj(g₁).
        """
        return FirTaps(np.conj(self.g1), self.span_symbols, self.oversampling)


def build_observation_matrix(
    eta: SampleStream,
    n_symbols: int,
    oversampling: int,
    span_symbols: int
) -> np.ndarray:
    """Builds the N × M·L_g matrix whose row n is [η[nM], η[nM+1], ..., η[nM + M·L_g - 1]].

    Rows overrunning the end of the stream are completed with zeros.
    """
    width: int = oversampling * span_symbols
    if n_symbols < 1:
        raise ValueError(f"At least one row is required, got {n_symbols}.")
    if len(eta) < width:
        raise ValueError(f"Stream of {len(eta)} samples is too short for a single "
                         f"observation row of {width} samples.")
    needed: int = (n_symbols - 1) * oversampling + width
    data: np.ndarray = eta.data[:needed]
    if data.size < needed:
        data = np.concatenate([data, np.zeros(needed - data.size, dtype=np.complex128)])
    return np.array(sliding_window_view(data, width)[::oversampling])


def fit_mf(
    eta_pilot: SampleStream,
    s_pilot: SymbolBlock,
    oversampling: int,
    span_symbols: int,
    ridge: float = 0.0
) -> LearnedMf:
    """LS estimate g₁ = argmin ‖E·g₁ - s‖ over the pilot block."""
    e: np.ndarray = build_observation_matrix(eta_pilot, len(s_pilot), oversampling, span_symbols)
    g1: np.ndarray = lsq.solve_ls(e, s_pilot.data, ridge=ridge)
    return LearnedMf(g1, oversampling, span_symbols)


def apply_mf(eta: SampleStream, mf: LearnedMf, n_symbols: Optional[int] = None) -> SymbolBlock:
    """Symbol n is the inner product of observation row n with g₁.

    :param eta: Received stream.
    :param mf: The learned MF.
    :param n_symbols: Number of symbols to produce. When omitted, every row fully
        covered by the stream is produced.
    """
    if n_symbols is None:
        n_symbols = (len(eta) - mf.g1.size) // mf.oversampling + 1
    e: np.ndarray = build_observation_matrix(eta, n_symbols, mf.oversampling, mf.span_symbols)
    return SymbolBlock(e @ mf.g1)


def cancel_known(lambda_rx: SymbolBlock, s_known: SymbolBlock) -> SymbolBlock:
    """Subtracts the known transmitted symbols from the MF output."""
    if len(lambda_rx) != len(s_known):
        raise ValueError(f"Block lengths differ: {len(lambda_rx)} != {len(s_known)}.")
    return SymbolBlock(lambda_rx.data - s_known.data)


def write_mf_csv(
    mf: LearnedMf,
    output_file: Optional[pathlib.Path],
    header: Optional[list[str]] = None
) -> None:
    """Exports g₁ as `index,real,imag` rows, to stdout when no file is given."""
    rows: list[dict[str, Any]] = [
        {"index": i, "real": repr(float(c.real)), "imag": repr(float(c.imag))}
        for i, c in enumerate(mf.g1)
    ]
    data_utils.write_csv_file(rows, output_file, fieldnames=["index", "real", "imag"],
                              delimiter=",", header_lines=header)


def read_mf_csv(path: pathlib.Path, oversampling: int, span_symbols: int) -> LearnedMf:
    """Imports g₁ written by `write_mf_csv`."""
    rows: list[dict[str, Any]] = data_utils.read_csv_file(path, delimiter=",")
    rows = sorted(rows, key=lambda r: int(r["index"]))
    g1: np.ndarray = np.array([complex(float(r["real"]), float(r["imag"])) for r in rows])
    return LearnedMf(g1, oversampling, span_symbols)


class LearnedMfCanceller:
    """Receiver whose MF is fitted on the pilots; cancellation subtracts the known symbols."""

    name: str = "learned_mf"

    def __init__(self, oversampling: int, span_symbols: int, ridge: float = 0.0) -> None:
        self.oversampling: int = oversampling
        self.span_symbols: int = span_symbols
        self.ridge: float = ridge
        self.mf: Optional[LearnedMf] = None

    def receive(self, eta: SampleStream, n_symbols: int) -> SymbolBlock:
        if self.mf is None:
            raise RuntimeError("The canceller should be trained before use.")
        return apply_mf(eta, self.mf, n_symbols)

    def train(self, s_pilot: SymbolBlock, eta_pilot: SampleStream) -> None:
        self.mf = fit_mf(eta_pilot, s_pilot, self.oversampling, self.span_symbols,
                         ridge=self.ridge)

    def residual(self, s_data: SymbolBlock, eta_data: SampleStream) -> SymbolBlock:
        return cancel_known(self.receive(eta_data, len(s_data)), s_data)

    def center_gain(self, tx: np.ndarray, delay: int = 0) -> complex:
        """Gain of the main symbol tap from a transmit response `tx` to this receiver.

        :param delay: Index of `tx` that lines up with the symbol instant.
        """
        if self.mf is None:
            raise RuntimeError("The canceller should be trained before use.")
        tx = np.asarray(tx)[delay:]
        overlap: int = min(tx.size, self.mf.g1.size)
        return complex(np.sum(self.mf.g1[:overlap] * tx[:overlap]))
