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

"""Conventional SI canceller based on an odd-order memory polynomial (Hammerstein model).

The receiver keeps the conventional matched filter g_R. During the pilot phase the
stacked coefficients q are fitted by least squares from the known pilot symbols to the
MF output. During the data phase the interference symbols are regenerated from the
transmitted symbols and subtracted.
"""
import dataclasses
from typing import Optional

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from fdsic.dsp import lsq
from fdsic.dsp.filters import SymbolBlock, SampleStream, FirTaps, matched_filter


@dataclasses.dataclass(frozen=True)
class HammersteinConfig:
    """Structure of the model.

    :ivar degree: Maximum odd polynomial degree P.
    :ivar memory: FIR memory L_q, in symbols.
    """
    degree: int = 3
    memory: int = 4

    def __post_init__(self) -> None:
        if self.degree < 1 or self.degree % 2 == 0:
            raise ValueError(f"Polynomial degree should be an odd integer >= 1, got {self.degree}.")
        if self.memory < 1:
            raise ValueError(f"Memory length should be >= 1, got {self.memory}.")

    @property
    def basis_per_tap(self) -> int:
        return (self.degree + 1) // 2

    @property
    def coefficients_num(self) -> int:
        return self.memory * self.basis_per_tap


@dataclasses.dataclass(frozen=True)
class HammersteinModel:
    q: np.ndarray
    config: HammersteinConfig

    def __post_init__(self) -> None:
        q: np.ndarray = np.asarray(self.q, dtype=np.complex128).reshape(-1)
        if q.size != self.config.coefficients_num:
            raise ValueError(f"Expected {self.config.coefficients_num} coefficients, "
                             f"got {q.size}.")
        object.__setattr__(self, "q", q)


def _basis(windows: np.ndarray, cfg: HammersteinConfig) -> np.ndarray:
    # Even powers |s|^(p-1) for p = 1, 3, ..., P along a new trailing axis.
    exponents: np.ndarray = 2 * np.arange(cfg.basis_per_tap)
    return windows[..., None] * np.abs(windows)[..., None] ** exponents


def basis_row(s_window: np.ndarray, cfg: HammersteinConfig) -> np.ndarray:
    """Basis functions s[n-ℓ]·|s[n-ℓ]|^(p-1), tap-major and degree-minor.

    :param s_window: The symbols s[n], s[n-1], ..., s[n-L_q+1].
    """
    s_window = np.asarray(s_window, dtype=np.complex128).reshape(-1)
    if s_window.size != cfg.memory:
        raise ValueError(f"Window length should be {cfg.memory}, got {s_window.size}.")
    return _basis(s_window, cfg).reshape(-1)


def build_regressor(s: SymbolBlock, cfg: HammersteinConfig) -> np.ndarray:
    """Builds the N × L_q·(P+1)/2 regressor whose row n is the basis row ending at s[n].

    Symbols before the start of the block are taken as zeros.
    """
    if len(s) < cfg.memory:
        raise ValueError(f"At least {cfg.memory} symbols are required, got {len(s)}.")
    padded: np.ndarray = np.concatenate([np.zeros(cfg.memory - 1, dtype=np.complex128), s.data])
    windows: np.ndarray = sliding_window_view(padded, cfg.memory)[:, ::-1]
    return _basis(windows, cfg).reshape(len(s), -1)


def fit(
    s_pilot: SymbolBlock,
    lambda_pilot: SymbolBlock,
    cfg: HammersteinConfig,
    ridge: float = 0.0
) -> HammersteinModel:
    """LS fit of q from the known pilot symbols to the received pilot symbols."""
    if len(s_pilot) != len(lambda_pilot):
        raise ValueError(f"Pilot lengths differ: {len(s_pilot)} != {len(lambda_pilot)}.")
    q: np.ndarray = lsq.solve_ls(build_regressor(s_pilot, cfg), lambda_pilot.data, ridge=ridge)
    return HammersteinModel(q, cfg)


def regenerate(model: HammersteinModel, s_data: SymbolBlock) -> SymbolBlock:
    """Estimates the interference symbols r̂ = S·q of a data block."""
    return SymbolBlock(build_regressor(s_data, model.config) @ model.q)


def cancel(lambda_rx: SymbolBlock, r_hat: SymbolBlock) -> SymbolBlock:
    if len(lambda_rx) != len(r_hat):
        raise ValueError(f"Block lengths differ: {len(lambda_rx)} != {len(r_hat)}.")
    return SymbolBlock(lambda_rx.data - r_hat.data)


class HammersteinCanceller:
    """Receiver with the conventional MF followed by Hammerstein regeneration."""

    name: str = "hammerstein"

    def __init__(
        self,
        cfg: HammersteinConfig,
        g_r: FirTaps,
        phase: int,
        ridge: float = 0.0
    ) -> None:
        self.cfg: HammersteinConfig = cfg
        self.g_r: FirTaps = g_r
        self.phase: int = phase
        self.ridge: float = ridge
        self.model: Optional[HammersteinModel] = None

    def receive(self, eta: SampleStream, n_symbols: int) -> SymbolBlock:
        return matched_filter(eta, self.g_r, self.phase, n_symbols)

    def train(self, s_pilot: SymbolBlock, eta_pilot: SampleStream) -> None:
        lambda_pilot: SymbolBlock = self.receive(eta_pilot, len(s_pilot))
        self.model = fit(s_pilot, lambda_pilot, self.cfg, ridge=self.ridge)

    def residual(self, s_data: SymbolBlock, eta_data: SampleStream) -> SymbolBlock:
        if self.model is None:
            raise RuntimeError("The canceller should be trained before use.")
        lambda_rx: SymbolBlock = self.receive(eta_data, len(s_data))
        return cancel(lambda_rx, regenerate(self.model, s_data))

    def center_gain(self, tx: np.ndarray, delay: int = 0) -> complex:
        """Gain of the main symbol tap from a transmit response `tx` to this receiver.

        :param delay: Index of `tx` that lines up with the symbol instant.
        """
        cascade: np.ndarray = np.convolve(np.asarray(tx), self.g_r.coeffs)
        index: int = self.phase + delay
        return complex(cascade[index]) if index < cascade.size else 0j
