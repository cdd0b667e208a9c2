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

import logging
import math
from collections.abc import Callable
from pathlib import Path
from typing import Any, Optional

import click
import numpy as np
import pandas as pd
from yacs.config import CfgNode

from fdsic import complexity
from fdsic import data_utils
from fdsic.cancellers.matched_filter import write_mf_csv
from fdsic.config import get_config, validate_config, config_header_lines, selected_methods
from fdsic.dsp import SingularSystemError
from fdsic.logger import create_logger
from fdsic.simulation import harness
from fdsic.simulation.ber import run_ber


logger: Optional[logging.Logger] = None

# Largest tolerated fraction of failed fits before a run exits with an error.
MAX_FAILED_FRACTION: float = 1e-3
AVERAGING_NOTE: str = ("mean_residual_db = 10*log10(mean of per-packet linear residual ratios); "
                       "first and last L_g symbols of each block excluded")
DB_COLUMNS: tuple[str, ...] = ("residual_db", "pre_cancel_si_db", "papr_db", "mean_residual_db",
                               "std_residual_db", "gain_db")
SINGLE_COLUMNS: list[str] = harness.TRACE_COLUMNS + [
    c for c in harness.SWEEP_COLUMNS if c not in harness.TRACE_COLUMNS
]


def config_options(f: Callable) -> Callable:
    """Options shared by the commands that build a config."""
    options: list[Callable] = [
        click.option("--cfg", "--config", "cfg",
                     type=click.Path(exists=True, dir_okay=False, path_type=Path),
                     help="YAML config file. Its values override the defaults."),
        click.option("--n", type=int, help="Data symbols per packet."),
        click.option("--np", type=int, help="Pilot symbols per packet."),
        click.option("--m", type=int, help="Samples per symbol."),
        click.option("--lg", type=int, help="Pulse-shaping filter span in symbols."),
        click.option("--lq", type=int, help="Hammerstein memory in symbols."),
        click.option("--p", type=int, help="Maximum odd polynomial degree."),
        click.option("--rolloff", type=float),
        click.option("--snr-db", type=float, help="SI over noise power before the MF."),
        click.option("--ibo-db", type=float, help="Input back-off of the PA."),
        click.option("--smoothness", type=float, help="Smoothness factor of the Rapp PA."),
        click.option("--channel-span", type=int, help="SI channel span in symbols."),
        click.option("--packets", type=int, help="Number of packets."),
        click.option("--seed", type=int, help="Master seed."),
        click.option("--method", type=click.Choice(["hammerstein", "learned_mf", "both"])),
        click.option("--jobs", type=int,
                     help="Worker processes. 0 uses all the available cores."),
        click.option("--output", type=click.Path(file_okay=False, path_type=Path),
                     help="Directory where the log file is written."),
        click.option("--tag", type=str, help="Tag of experiment."),
        click.option("--opt", "extra_options", type=(str, str), multiple=True,
                     help="Config KEY VALUE pair, e.g. --opt PA.MODEL polynomial."),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def out_option(f: Callable) -> Callable:
    return click.option("--out", type=click.Path(dir_okay=False, path_type=Path),
                        help="Output csv file. Defaults to stdout.")(f)


@click.group()
def cli() -> None:
    pass


@cli.command()
@config_options
@out_option
def single(out: Optional[Path], **config_args: Any) -> None:
    """Residual SI of every packet at a single operating point."""
    config: CfgNode = _load_config(config_args)
    methods: tuple[str, ...] = selected_methods(config)

    results: list[harness.PacketResult] = harness.run_packets(config, logger)
    summary: dict[str, dict[str, float]] = harness.summarize(results, methods)
    papr: np.ndarray = np.array([r.papr_db for r in results])
    logger.info(f"PAPR of the data blocks | mean: {np.mean(papr):.3f} dB | "
                f"95th percentile: {np.percentile(papr, 95):.3f} dB")
    for method, stats in summary.items():
        logger.info(f"Single | {method} | residual: {stats['mean_residual_db']:.3f} dB | "
                    f"packets: {stats['n_packets']} | failed: {stats['n_failed']}")

    rows: list[dict[str, Any]] = (
        _format_rows(harness.packet_table(results, methods))
        + _format_rows(harness.summary_table(summary, "none", "", config.SIM.SEED), "summary")
    )
    data_utils.write_csv_file(rows, out, fieldnames=SINGLE_COLUMNS,
                              header_lines=_header_lines(config))
    _exit_on_failures(harness.failed_fraction(results))


@cli.command()
@config_options
@out_option
@click.option("--param", "parameter", required=True,
              type=click.Choice(sorted(harness.SWEEP_PARAMETERS)),
              help="Swept parameter.")
@click.option("--values", "values_spec", required=True,
              help="Either START:STEP:STOP, with STOP included, or a comma-separated list.")
def sweep(parameter: str, values_spec: str, out: Optional[Path], **config_args: Any) -> None:
    """Mean residual SI of every method over the values of a parameter."""
    config: CfgNode = _load_config(config_args)
    try:
        values: list[float] = parse_values(values_spec)
    except ValueError as e:
        raise click.BadParameter(str(e), param_hint="--values")

    try:
        result: harness.SweepResult = harness.sweep(config, parameter, values, logger)
    except ValueError as e:
        raise click.UsageError(str(e))
    data_utils.write_csv_file(_format_rows(result.summary), out,
                              fieldnames=harness.SWEEP_COLUMNS,
                              header_lines=_header_lines(config))
    failed: int = int(result.summary["n_failed"].sum())
    attempted: int = failed + int(result.summary["n_packets"].sum())
    _exit_on_failures(failed / attempted if attempted > 0 else 0.0)


@cli.command()
@config_options
@out_option
@click.option("--snr-grid", type=str,
              help="Desired signal over noise power in dB, as START:STEP:STOP or a "
                   "comma-separated list. Defaults to BER.SNR_GRID.")
@click.option("--reference", is_flag=True, help="Also evaluate a link without SI.")
def ber(
    snr_grid: Optional[str],
    reference: bool,
    out: Optional[Path],
    **config_args: Any
) -> None:
    """BER of the two-node link with each cancellation method."""
    packets: Optional[int] = config_args.pop("packets")
    extra: list[tuple[str, str]] = list(config_args.pop("extra_options"))
    if packets is not None:
        extra.append(("BER.PACKETS", str(packets)))
    if reference:
        extra.append(("BER.REFERENCE", "True"))
    config: CfgNode = _load_config({**config_args, "packets": None, "extra_options": extra})

    grid: Optional[list[float]] = None
    if snr_grid is not None:
        try:
            grid = parse_values(snr_grid)
        except ValueError as e:
            raise click.BadParameter(str(e), param_hint="--snr-grid")

    table: pd.DataFrame = run_ber(config, grid, logger=logger)
    rows: list[dict[str, Any]] = table.to_dict("records")
    for r in rows:
        for k in ("ber", "ber_low", "ber_high", "theory_ber"):
            r[k] = f"{r[k]:.6e}"
    data_utils.write_csv_file(rows, out, fieldnames=list(table.columns),
                              header_lines=_header_lines(config))


@cli.command(name="complexity")
@config_options
@out_option
@click.option("--a1-span", type=click.Choice(["memory", "pulse"]), default="memory",
              show_default=True,
              help="Span in the LS terms of the Hammerstein training count.")
def complexity_command(a1_span: str, out: Optional[Path], **config_args: Any) -> None:
    """Real-multiplication counts of both methods."""
    config: CfgNode = _load_config(config_args)
    c: complexity.ComplexityInput = complexity.ComplexityInput.from_config(config)
    data_utils.write_csv_file(
        complexity.complexity_table(c, span=a1_span), out,
        fieldnames=["method", "phase", "multiplications"],
        header_lines=[f"schema_version: {data_utils.SCHEMA_VERSION}",
                      f"note: {complexity.COUNTS_NOTE}",
                      f"N={c.n} M={c.oversampling} L_g={c.span_symbols} "
                      f"L_q={c.memory} P={c.degree}"]
    )


@cli.command(name="export-mf")
@config_options
@out_option
@click.option("--packet-index", type=int, default=0, show_default=True,
              help="Packet whose pilot burst is used for the fit.")
def export_mf(packet_index: int, out: Optional[Path], **config_args: Any) -> None:
    """Fits the learned MF on the pilots of a packet and exports its coefficients."""
    config: CfgNode = _load_config(config_args)
    try:
        mf = harness.fit_packet_mf(config, packet_index)
    except SingularSystemError as e:
        raise click.ClickException(f"Learned MF fit failed: {e}")
    logger.info(f"Learned MF of packet {packet_index}: {mf.g1.size} coefficients")
    write_mf_csv(mf, out, header=_header_lines(config) + [f"packet_index: {packet_index}"])


def parse_values(spec: str) -> list[float]:
    """Parses START:STEP:STOP (STOP included) or a comma-separated list of numbers."""
    if ":" in spec:
        parts: list[str] = spec.split(":")
        if len(parts) != 3:
            raise ValueError(f"Expected START:STEP:STOP, got {spec}.")
        start, step, stop = (float(p) for p in parts)
        if step <= 0 or stop < start:
            raise ValueError(f"Invalid range: {spec}.")
        count: int = int(math.floor((stop - start) / step + 1e-9)) + 1
        return [start + i * step for i in range(count)]
    values: list[float] = [float(v) for v in spec.split(",") if v.strip()]
    if not values:
        raise ValueError("No values provided.")
    return values


def _load_config(config_args: dict[str, Any]) -> CfgNode:
    args: dict[str, Any] = {k: v for k, v in config_args.items() if k != "extra_options"}
    args["cfg"] = str(args["cfg"]) if args.get("cfg") is not None else None
    args["output"] = str(args["output"]) if args.get("output") is not None else None
    args["opts"] = config_args.get("extra_options", ())
    try:
        config: CfgNode = get_config(args)
        validate_config(config)
    except (ValueError, KeyError, AssertionError) as e:
        raise click.UsageError(f"Invalid configuration: {e}")

    global logger
    logger = create_logger(config.OUTPUT or None)
    logger.info(config.dump())
    return config


def _header_lines(config: CfgNode) -> list[str]:
    return [f"schema_version: {data_utils.SCHEMA_VERSION}",
            f"master_seed: {config.SIM.SEED}",
            f"averaging: {AVERAGING_NOTE}"] + config_header_lines(config)


def _format_rows(table: pd.DataFrame, packet: Optional[str] = None) -> list[dict[str, Any]]:
    rows: list[dict[str, Any]] = []
    for r in table.to_dict("records"):
        r = {k: v for k, v in r.items() if not _is_missing(v) or k in DB_COLUMNS}
        for k in DB_COLUMNS:
            if k in r:
                r[k] = f"{r[k]:.3f}"
        if packet is not None:
            r["packet"] = packet
        rows.append(r)
    return rows


def _is_missing(value: Any) -> bool:
    return value is None or (isinstance(value, float) and math.isnan(value))


def _exit_on_failures(fraction: float) -> None:
    if fraction >= MAX_FAILED_FRACTION:
        logger.error(f"Failed fits: {100 * fraction:.2f}% of the attempts")
        raise click.exceptions.Exit(1)


if __name__ == '__main__':
    cli()
