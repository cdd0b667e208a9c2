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

"""Packet-level Monte Carlo engine of the residual SI experiments.

Each packet carries a pilot burst, used to fit the cancellers, and an independent data
burst on which the residual SI is measured. Both bursts cross the same PA and channel.
"""
import concurrent.futures
import dataclasses
import functools
import logging
import math
import os
import sys
from collections.abc import Sequence
from typing import Any, Optional

import numpy as np
import pandas as pd
import yacs.config
from tqdm import tqdm

from fdsic import metrics
from fdsic.cancellers import build_cancellers
from fdsic.cancellers.matched_filter import LearnedMf, LearnedMfCanceller
from fdsic.config import METHODS, selected_methods, set_key, validate_config
from fdsic.data import gen_ofdm_like_symbols
from fdsic.dsp import SingularSystemError
from fdsic.dsp.filters import (
    FirTaps, SampleStream, SymbolBlock, cascade_phase, matched_filter, measure_papr_db
)
from fdsic.dsp.frontend import NoiseSpec, add_awgn
from fdsic.simulation import chain


# Order of the child random streams spawned for every packet.
CHANNEL_STREAM: int = 0
SYMBOLS_STREAM: int = 1
NOISE_STREAM: int = 2
SOI_STREAM: int = 3
STREAMS_NUM: int = 4

# Config keys of the parameters that can be swept, with their command line aliases.
SWEEP_PARAMETERS: dict[str, str] = {
    "snr_db": "NOISE.SNR_DB",
    "snr": "NOISE.SNR_DB",
    "L_g": "LINK.SPAN_SYMBOLS",
    "lg": "LINK.SPAN_SYMBOLS",
    "M": "LINK.OVERSAMPLING",
    "m": "LINK.OVERSAMPLING",
    "ibo_db": "PA.IBO_DB",
    "ibo": "PA.IBO_DB",
}
_INTEGER_KEYS: tuple[str, ...] = ("LINK.SPAN_SYMBOLS", "LINK.OVERSAMPLING")

# Largest residual, in dB above the received level before cancellation, of a sane packet.
RESIDUAL_BOUND_DB: float = 6.0

SWEEP_COLUMNS: list[str] = ["param", "value", "method", "mean_residual_db", "std_residual_db",
                            "gain_db", "n_packets", "n_failed", "seed"]
TRACE_COLUMNS: list[str] = ["packet", "method", "residual_db", "pre_cancel_si_db", "papr_db"]


@dataclasses.dataclass(frozen=True)
class PacketResult:
    """Outcome of one packet.

    Every level is relative to the power of the transmitted data symbols, the same
    reference for all the methods, so the difference of two residuals is the ratio of
    their residual SI powers.

    :ivar residual_db: Residual SI power after cancellation, per method. NaN for a method
        whose fit failed.
    :ivar pre_cancel_si_db: Received SI plus noise power at the conventional MF output
        before cancellation.
    :ivar failed: Methods whose LS fit was rank deficient.
    :ivar papr_db: PAPR of the data block.
    """
    packet_index: int
    residual_db: dict[str, float]
    pre_cancel_si_db: float
    failed: tuple[str, ...] = ()
    papr_db: float = math.nan

    @property
    def exceeding_bound(self) -> tuple[str, ...]:
        """Methods whose residual lies more than RESIDUAL_BOUND_DB above the received level."""
        return tuple(m for m, r in self.residual_db.items()
                     if r > self.pre_cancel_si_db + RESIDUAL_BOUND_DB)


@dataclasses.dataclass(frozen=True)
class PacketBursts:
    s_pilot: SymbolBlock
    eta_pilot: SampleStream
    s_data: SymbolBlock
    eta_data: SampleStream
    g_t: FirTaps
    g_r: FirTaps


@dataclasses.dataclass(frozen=True)
class SweepResult:
    parameter: str
    values: tuple[float, ...]
    summary: pd.DataFrame


def packet_rngs(master_seed: int, packet_index: int) -> list[np.random.Generator]:
    """Independent random streams of a packet, derived only from (master seed, packet)."""
    seed_seq: np.random.SeedSequence = np.random.SeedSequence(master_seed,
                                                               spawn_key=(packet_index,))
    return [np.random.default_rng(s) for s in seed_seq.spawn(STREAMS_NUM)]


def simulate_bursts(config: yacs.config.CfgNode, packet_index: int) -> PacketBursts:
    """Generates the pilot and data bursts received by the full-duplex node."""
    rngs: list[np.random.Generator] = packet_rngs(config.SIM.SEED, packet_index)

    g_t: FirTaps = chain.build_pulse(config)
    g_r: FirTaps = g_t.reversed()
    amplifier: chain.Amplifier = chain.build_amplifier(config, g_t)
    h = chain.build_channel(config, rngs[CHANNEL_STREAM])

    s_pilot: SymbolBlock = gen_ofdm_like_symbols(rngs[SYMBOLS_STREAM], config.LINK.N_PILOT)
    s_data: SymbolBlock = gen_ofdm_like_symbols(rngs[SYMBOLS_STREAM], config.LINK.N_DATA)
    si_pilot: SampleStream = chain.transmit_si(s_pilot, g_t, amplifier, h, config.CHANNEL.MODE)
    si_data: SampleStream = chain.transmit_si(s_data, g_t, amplifier, h, config.CHANNEL.MODE)

    noise: NoiseSpec = NoiseSpec(config.NOISE.SNR_DB, stream_id=NOISE_STREAM)
    eta_pilot: SampleStream = add_awgn(si_pilot, noise, rngs[NOISE_STREAM])
    eta_data: SampleStream = add_awgn(si_data, noise, rngs[NOISE_STREAM])

    return PacketBursts(s_pilot, eta_pilot, s_data, eta_data, g_t, g_r)


def run_packet(config: yacs.config.CfgNode, packet_index: int) -> PacketResult:
    """Trains every selected canceller on the pilot burst and measures it on the data burst."""
    bursts: PacketBursts = simulate_bursts(config, packet_index)
    edge: int = config.LINK.SPAN_SYMBOLS
    n: int = len(bursts.s_data)

    conventional_rx: SymbolBlock = matched_filter(
        bursts.eta_data, bursts.g_r, cascade_phase(bursts.g_t, bursts.g_r), n
    )
    pre_cancel_db: float = metrics.to_db(
        metrics.residual_ratio(conventional_rx.data, bursts.s_data.data, edge)
    )

    residual_db: dict[str, float] = {}
    failed: list[str] = []
    for canceller in build_cancellers(config, bursts.g_t, bursts.g_r):
        try:
            canceller.train(bursts.s_pilot, bursts.eta_pilot)
        except SingularSystemError:
            residual_db[canceller.name] = math.nan
            failed.append(canceller.name)
            continue
        eps: SymbolBlock = canceller.residual(bursts.s_data, bursts.eta_data)
        residual_db[canceller.name] = metrics.to_db(
            metrics.residual_ratio(eps.data, bursts.s_data.data, edge)
        )

    return PacketResult(packet_index, residual_db, pre_cancel_db, tuple(failed),
                        measure_papr_db(bursts.s_data))


def fit_packet_mf(config: yacs.config.CfgNode, packet_index: int) -> LearnedMf:
    """The learned MF fitted on the pilot burst of a packet."""
    bursts: PacketBursts = simulate_bursts(config, packet_index)
    canceller: LearnedMfCanceller = build_cancellers(
        _with_method(config, "learned_mf"), bursts.g_t, bursts.g_r
    )[0]
    canceller.train(bursts.s_pilot, bursts.eta_pilot)
    return canceller.mf


def jobs_num(config: yacs.config.CfgNode) -> int:
    return config.SIM.JOBS if config.SIM.JOBS > 0 else (os.cpu_count() or 1)


def map_packets(
    config: yacs.config.CfgNode,
    worker: Any,
    packets: int,
    desc: str
) -> list[Any]:
    """Evaluates `worker(packet_index)` over all packets, in packet order.

    Runs in a process pool when more than one job is configured.
    """
    show_progress: bool = config.SIM.PROGRESS and sys.stderr.isatty()
    jobs: int = min(jobs_num(config), packets)
    if jobs <= 1:
        return [worker(i) for i in tqdm(range(packets), desc, unit="packet",
                                        disable=not show_progress)]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as executor:
        chunksize: int = max(1, packets // (4 * jobs))
        return list(tqdm(executor.map(worker, range(packets), chunksize=chunksize),
                         desc, total=packets, unit="packet", disable=not show_progress))


def run_packets(
    config: yacs.config.CfgNode,
    logger: Optional[logging.Logger] = None
) -> list[PacketResult]:
    results: list[PacketResult] = map_packets(
        config, functools.partial(run_packet, config), config.SIM.PACKETS, "Packets"
    )
    if logger is not None:
        failed: int = sum(len(r.failed) for r in results)
        logger.info(f"Packets: {len(results)} | Failed fits: {failed}")
        for r in results:
            for method in r.exceeding_bound:
                logger.warning(f"Packet {r.packet_index} | {method} | residual "
                               f"{r.residual_db[method]:.2f} dB exceeds the received level "
                               f"{r.pre_cancel_si_db:.2f} dB by more than {RESIDUAL_BOUND_DB} dB")
    return results


def summarize(results: Sequence[PacketResult], methods: Sequence[str]) -> dict[str, dict[str, float]]:
    residuals: metrics.ResidualMetrics = metrics.ResidualMetrics(tuple(methods))
    for r in results:
        for method in methods:
            residuals.update(method, r.residual_db[method])
    return residuals.compute()


def failed_fraction(results: Sequence[PacketResult]) -> float:
    attempts: int = sum(len(r.residual_db) for r in results)
    return sum(len(r.failed) for r in results) / attempts if attempts > 0 else 0.0


def packet_table(results: Sequence[PacketResult], methods: Sequence[str]) -> pd.DataFrame:
    """One row per (packet, method)."""
    rows: list[dict[str, Any]] = [
        {
            "packet": r.packet_index,
            "method": method,
            "residual_db": r.residual_db[method],
            "pre_cancel_si_db": r.pre_cancel_si_db,
            "papr_db": r.papr_db,
        }
        for r in results for method in methods
    ]
    return pd.DataFrame(rows, columns=TRACE_COLUMNS)


def summary_table(
    summary: dict[str, dict[str, float]],
    parameter: str,
    value: Any,
    seed: int
) -> pd.DataFrame:
    gain_db: float = math.nan
    if all(m in summary for m in METHODS):
        gain_db = (summary["hammerstein"]["mean_residual_db"]
                   - summary["learned_mf"]["mean_residual_db"])
    rows: list[dict[str, Any]] = [
        {"param": parameter, "value": value, "method": method, **stats,
         "gain_db": gain_db, "seed": seed}
        for method, stats in summary.items()
    ]
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def sweep(
    config: yacs.config.CfgNode,
    parameter: str,
    values: Sequence[float],
    logger: Optional[logging.Logger] = None
) -> SweepResult:
    """Runs SIM.PACKETS independent packets for every value of a parameter.

    :param parameter: One of snr_db, L_g, M, ibo_db or their aliases snr, lg, m, ibo.
    """
    if parameter not in SWEEP_PARAMETERS:
        raise ValueError(f"Unsupported sweep parameter: {parameter}. "
                         f"Supported: {', '.join(SWEEP_PARAMETERS)}")
    key: str = SWEEP_PARAMETERS[parameter]

    tables: list[pd.DataFrame] = []
    for value in values:
        point_config: yacs.config.CfgNode = _with_value(config, key, value)
        validate_config(point_config)
        results: list[PacketResult] = run_packets(point_config)
        methods: tuple[str, ...] = selected_methods(point_config)
        summary: dict[str, dict[str, float]] = summarize(results, methods)
        table: pd.DataFrame = summary_table(summary, parameter, value, config.SIM.SEED)
        tables.append(table)
        if logger is not None:
            for _, row in table.iterrows():
                logger.info(f"Sweep | {parameter}={value} | {row['method']} | "
                            f"residual: {row['mean_residual_db']:.3f} dB | "
                            f"failed: {row['n_failed']}")

    return SweepResult(parameter, tuple(values), pd.concat(tables, ignore_index=True))


def _with_value(config: yacs.config.CfgNode, key: str, value: Any) -> yacs.config.CfgNode:
    config = config.clone()
    config.defrost()
    set_key(config, key, int(value) if key in _INTEGER_KEYS else float(value))
    config.freeze()
    return config


def _with_method(config: yacs.config.CfgNode, method: str) -> yacs.config.CfgNode:
    config = config.clone()
    config.defrost()
    config.SIM.METHOD = method
    config.freeze()
    return config
