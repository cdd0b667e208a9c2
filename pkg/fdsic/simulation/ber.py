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

"""Two-node BER experiment.

Node 1 is full duplex: it trains its canceller on its own pilot burst, then receives BPSK
data from node 2 while transmitting. In the Hammerstein mode node 2 shapes its pulses with
g_T and node 1 keeps the conventional MF. In the learned mode node 2 shapes its pulses with
the g₁ fitted by node 1, which node 1 also uses as its MF. The optional reference mode is a
conventional link without SI.
"""
import functools
import logging
import math
from collections.abc import Sequence
from typing import Any, Optional

import numpy as np
import pandas as pd
import yacs.config

from fdsic import metrics
from fdsic.cancellers import Canceller, build_canceller
from fdsic.config import selected_methods
from fdsic.data import gen_bpsk_symbols, gen_ofdm_like_symbols
from fdsic.dsp import SingularSystemError
from fdsic.dsp import frontend
from fdsic.dsp.filters import (
    FirTaps, SampleStream, SymbolBlock, cascade_phase, matched_filter, measure_power, pulse_shape
)
from fdsic.simulation import chain
from fdsic.simulation.harness import (
    CHANNEL_STREAM, NOISE_STREAM, SOI_STREAM, SYMBOLS_STREAM, map_packets, packet_rngs
)


REFERENCE_METHOD: str = "reference"
BER_COLUMNS: list[str] = ["snr_db", "method", "ber", "bits_counted", "seed", "ber_low", "ber_high",
                          "theory_ber"]

# (snr index, method, detected bits, transmitted bits)
Detection = tuple[int, str, np.ndarray, np.ndarray]


def _unit_power_tx(taps: np.ndarray, oversampling: int) -> np.ndarray:
    """Scales transmit taps so that a stream of unit-power symbols has unit mean power."""
    return taps * math.sqrt(oversampling / float(np.sum(np.abs(taps) ** 2)))


def _detect(eps: SymbolBlock, gain: complex, edge: int) -> np.ndarray:
    # Bit 1 maps to -1.
    decision: np.ndarray = np.real(metrics.interior(eps.data, edge) * np.conj(gain))
    return (decision < 0).astype(np.int8)


def _noise(length: int, oversampling: int, snr_db: float, seed: np.random.SeedSequence) -> SampleStream:
    # Same seed for every SNR point, so the curves share their noise realizations.
    return frontend.add_awgn(SampleStream(np.zeros(length), oversampling),
                             frontend.NoiseSpec(snr_db, stream_id=NOISE_STREAM,
                                                reference_power=1.0),
                             np.random.default_rng(seed))


def run_ber_packet(
    config: yacs.config.CfgNode,
    snr_grid: Sequence[float],
    methods: Sequence[str],
    packet_index: int
) -> list[Detection]:
    rngs: list[np.random.Generator] = packet_rngs(config.SIM.SEED, packet_index)
    noise_seeds: list[np.random.SeedSequence] = np.random.SeedSequence(
        config.SIM.SEED, spawn_key=(packet_index, NOISE_STREAM)
    ).spawn(2)
    m: int = config.LINK.OVERSAMPLING
    edge: int = config.LINK.SPAN_SYMBOLS

    g_t: FirTaps = chain.build_pulse(config)
    g_r: FirTaps = g_t.reversed()
    amplifier: chain.Amplifier = chain.build_amplifier(config, g_t)
    h = chain.build_channel(config, rngs[CHANNEL_STREAM])
    h_desired: Optional[frontend.MultipathChannel] = None
    if config.BER.DESIRED_CHANNEL == "rayleigh":
        h_desired = frontend.draw_channel(rngs[SOI_STREAM], config.CHANNEL.SPAN_SYMBOLS, m)

    s_pilot: SymbolBlock = gen_ofdm_like_symbols(rngs[SYMBOLS_STREAM], config.LINK.N_PILOT)
    s_data: SymbolBlock = gen_ofdm_like_symbols(rngs[SYMBOLS_STREAM], config.LINK.N_DATA)
    b_data, bits = gen_bpsk_symbols(rngs[SOI_STREAM], config.LINK.N_DATA)
    if not config.BER.INJECT_SI:
        # Node 1 stays silent during the data burst.
        s_data = SymbolBlock(np.zeros(len(s_data)))
    mode: str = config.CHANNEL.MODE
    si_pilot: SampleStream = chain.transmit_si(s_pilot, g_t, amplifier, h, mode)
    si_data: SampleStream = chain.transmit_si(s_data, g_t, amplifier, h, mode)
    # SI has unit power at the receiver input. The scale is fixed by the pilot burst.
    si_scale: float = 1 / math.sqrt(measure_power(si_pilot))
    si_pilot = SampleStream(si_scale * si_pilot.data, m)
    si_data = SampleStream(si_scale * si_data.data, m)
    transmitted: np.ndarray = metrics.interior(bits, edge)

    # The desired channel shares the timing of the SI one. In aligned mode the symbol
    # instant sits `desired_delay` samples into the transmit response.
    desired_delay: int = 0
    if h_desired is not None and mode == "aligned":
        desired_delay = (len(h_desired.taps) - 1) // 2

    def desired_response(tx_taps: np.ndarray) -> np.ndarray:
        return tx_taps if h_desired is None else np.convolve(tx_taps, h_desired.taps)

    def receive_soi(tx_taps: np.ndarray) -> SampleStream:
        shaped: SampleStream = pulse_shape(b_data, FirTaps(tx_taps, len(tx_taps) // m, m))
        if h_desired is None:
            return shaped
        return frontend.apply_channel(shaped, h_desired, mode)

    detections: list[Detection] = []
    for snr_index, snr_db in enumerate(snr_grid):
        pilot_noise: SampleStream = _noise(len(si_pilot), m, snr_db, noise_seeds[0])
        eta_pilot: SampleStream = chain.sum_streams(si_pilot, pilot_noise)

        for method in methods:
            if method == REFERENCE_METHOD:
                tx: np.ndarray = _unit_power_tx(g_t.coeffs, m)
                soi: SampleStream = receive_soi(tx)
                eta: SampleStream = chain.sum_streams(
                    soi, _noise(len(soi), m, snr_db, noise_seeds[1])
                )
                rx: SymbolBlock = matched_filter(eta, g_r, cascade_phase(g_t, g_r), len(b_data))
                gain: complex = complex(np.convolve(desired_response(tx), g_r.coeffs)
                                        [cascade_phase(g_t, g_r) + desired_delay])
                detections.append((snr_index, method, _detect(rx, gain, edge), transmitted))
                continue

            canceller: Canceller = build_canceller(config, method, g_t, g_r)
            try:
                canceller.train(s_pilot, eta_pilot)
            except SingularSystemError:
                continue
            tx_taps: np.ndarray = (g_t.coeffs if method == "hammerstein"
                                   else canceller.mf.as_pulse().coeffs)
            tx = _unit_power_tx(tx_taps, m)
            soi = receive_soi(tx)
            eta = chain.sum_streams(si_data, soi)
            eta = chain.sum_streams(eta, _noise(len(eta), m, snr_db, noise_seeds[1]))
            eps: SymbolBlock = canceller.residual(s_data, eta)
            gain = canceller.center_gain(desired_response(tx), desired_delay)
            detections.append((snr_index, method, _detect(eps, gain, edge), transmitted))

    return detections


def run_ber(
    config: yacs.config.CfgNode,
    snr_grid: Optional[Sequence[float]] = None,
    modulation: str = "bpsk",
    methods: Optional[Sequence[str]] = None,
    logger: Optional[logging.Logger] = None
) -> pd.DataFrame:
    """BER of each method over an SNR grid, BER.PACKETS packets per point.

    :param snr_grid: Desired signal power over noise power at the receiver input, in dB.
        Defaults to BER.SNR_GRID.
    :param methods: Methods to evaluate. Defaults to the SIM.METHOD selection, followed
        by the reference link when BER.REFERENCE is set.
    :return: A table with the columns snr_db, method, ber, bits_counted and seed, followed
        by the 95 % Clopper-Pearson bounds of the BER and the BPSK error rate of a link
        without SI at Es/N0 = SNR·M, the MF collecting M samples per symbol.
    """
    if modulation != "bpsk":
        raise ValueError(f"Unsupported modulation: {modulation}")
    if snr_grid is None:
        snr_grid = list(config.BER.SNR_GRID)
    if methods is None:
        methods = list(selected_methods(config))
        if config.BER.REFERENCE:
            methods.append(REFERENCE_METHOD)
    methods = tuple(methods)

    packets: list[list[Detection]] = map_packets(
        config, functools.partial(run_ber_packet, config, tuple(snr_grid), methods),
        config.BER.PACKETS, "BER packets"
    )
    counters: list[metrics.BerMetrics] = [metrics.BerMetrics(methods) for _ in snr_grid]
    for detections in packets:
        for snr_index, method, detected, transmitted in detections:
            counters[snr_index].update(method, detected, transmitted)

    rows: list[dict[str, Any]] = []
    for snr_db, counter in zip(snr_grid, counters):
        esn0_db: float = snr_db + 10 * math.log10(config.LINK.OVERSAMPLING)
        theory: float = float(metrics.bpsk_ber_theory(esn0_db))
        for method, stats in counter.compute().items():
            ci_low, ci_high = (metrics.ber_confidence_interval(int(stats["errors"]),
                                                              int(stats["bits_counted"]))
                               if stats["bits_counted"] > 0 else (math.nan, math.nan))
            rows.append({"snr_db": snr_db, "method": method, "ber": stats["ber"],
                         "bits_counted": stats["bits_counted"], "seed": config.SIM.SEED,
                         "ber_low": ci_low, "ber_high": ci_high, "theory_ber": theory})
            if logger is not None:
                logger.info(f"BER | SNR {snr_db} dB (Es/N0 {esn0_db:.2f} dB) | {method} | "
                            f"{stats['ber']:.3e} [{ci_low:.3e}, {ci_high:.3e}] over "
                            f"{stats['bits_counted']} bits | no-SI theory {theory:.3e}")
    return pd.DataFrame(rows, columns=BER_COLUMNS)
