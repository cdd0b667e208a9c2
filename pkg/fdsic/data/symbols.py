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

import numpy as np

from fdsic.dsp.filters import SymbolBlock, measure_power


QPSK_POINTS: np.ndarray = np.array([1 + 1j, -1 + 1j, -1 - 1j, 1 - 1j]) / math.sqrt(2)


def gen_ofdm_like_symbols(rng: np.random.Generator, n: int) -> SymbolBlock:
    """Time-domain block of an OFDM symbol with N QPSK subcarriers, scaled to unit mean power.

    The block has a Gaussian-like envelope, with a PAPR of about 8 to 13 dB.
    """
    if n < 1 or n & (n - 1) != 0:
        raise ValueError(f"Block length should be a power of two, got {n}.")
    subcarriers: np.ndarray = QPSK_POINTS[rng.integers(0, QPSK_POINTS.size, size=n)]
    block: np.ndarray = np.fft.ifft(subcarriers)
    block /= math.sqrt(measure_power(block))
    return SymbolBlock(block)


def gen_bpsk_symbols(rng: np.random.Generator, n: int) -> tuple[SymbolBlock, np.ndarray]:
    """Draws N equiprobable bits and maps them to ±1 symbols (bit 1 → -1).

    :return: The symbols and the transmitted bits.
    """
    if n < 1:
        raise ValueError(f"Block length should be positive, got {n}.")
    bits: np.ndarray = rng.integers(0, 2, size=n, dtype=np.int8)
    return SymbolBlock(1.0 - 2.0 * bits), bits
