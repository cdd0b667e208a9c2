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

"""Composition of the transmit chain of the full-duplex node from a config."""
import functools
import math
from typing import Callable

import numpy as np

from fdsic.dsp import filters, frontend
from fdsic.dsp.filters import FirTaps, SampleStream, SymbolBlock


Amplifier = Callable[[SampleStream], SampleStream]


def build_pulse(config) -> FirTaps:
    pulse: str = config.LINK.PULSE
    if pulse == "rrc":
        g_t: FirTaps = filters.rrc_taps(config.LINK.ROLLOFF, config.LINK.SPAN_SYMBOLS,
                                        config.LINK.OVERSAMPLING)
    elif pulse == "delta":
        g_t = filters.delta_taps(config.LINK.SPAN_SYMBOLS, config.LINK.OVERSAMPLING)
    else:
        raise RuntimeError(f"Unsupported pulse shape: {pulse}")
    return g_t


def nominal_stream_power(g_t: FirTaps) -> float:
    """Mean power of a stream pulse-shaped with `g_t` from unit-power symbols."""
    return float(np.sum(np.abs(g_t.coeffs) ** 2)) / g_t.oversampling


def _identity(x: SampleStream) -> SampleStream:
    return x


def build_amplifier(config, g_t: FirTaps) -> Amplifier:
    """The PA of the node as a stream-to-stream callable.

    The Rapp input gain is fixed from the nominal power of the pulse-shaped stream, so
    every burst of a configuration sees the same PA operating point.
    """
    model: str = config.PA.MODEL
    ibo_db: float = config.PA.IBO_DB
    if model == "linear" or (model == "rapp" and math.isinf(ibo_db) and ibo_db > 0):
        amplifier: Amplifier = _identity
    elif model == "rapp":
        pa: frontend.RappPaModel = frontend.set_ibo(
            frontend.RappPaModel(smoothness=config.PA.SMOOTHNESS,
                                 sat_amplitude=config.PA.SATURATION),
            ibo_db,
            nominal_stream_power(g_t)
        )
        amplifier = functools.partial(frontend.rapp_amplify, pa=pa)
    elif model == "polynomial":
        amplifier = functools.partial(frontend.polynomial_amplify,
                                      coeffs=list(config.PA.POLY_COEFFS))
    else:
        raise RuntimeError(f"Unsupported PA model: {model}")
    return amplifier


def build_channel(config, rng: np.random.Generator) -> frontend.MultipathChannel:
    channel_type: str = config.CHANNEL.TYPE
    if channel_type == "rayleigh":
        h: frontend.MultipathChannel = frontend.draw_channel(
            rng, config.CHANNEL.SPAN_SYMBOLS, config.LINK.OVERSAMPLING
        )
    elif channel_type == "delta":
        h = frontend.delta_channel(config.CHANNEL.SPAN_SYMBOLS, config.LINK.OVERSAMPLING,
                                   config.CHANNEL.MODE)
    else:
        raise RuntimeError(f"Unsupported channel type: {channel_type}")
    return h


def transmit_si(
    s: SymbolBlock,
    g_t: FirTaps,
    amplifier: Amplifier,
    h: frontend.MultipathChannel,
    mode: str = "aligned"
) -> SampleStream:
    """Noiseless SI at the receiver input: s → g_T → PA → h.

    :param mode: Channel timing, see `frontend.apply_channel`.
    """
    return frontend.apply_channel(amplifier(filters.pulse_shape(s, g_t)), h, mode=mode)


def sum_streams(*streams: SampleStream) -> SampleStream:
    """Sample-wise sum of streams, the shorter ones completed with trailing zeros."""
    length: int = max(len(x) for x in streams)
    out: np.ndarray = np.zeros(length, dtype=np.complex128)
    for x in streams:
        out[:len(x)] += x.data
    return SampleStream(out, streams[0].oversampling)
