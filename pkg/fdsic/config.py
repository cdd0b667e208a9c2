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

import os
from typing import Optional, Any

import yaml
from yacs.config import CfgNode as CN

from fdsic.complexity import ComplexityInput, equal_complexity_span

_C = CN()

# Base config files
_C.BASE = ['']

# -----------------------------------------------------------------------------
# Link settings
# -----------------------------------------------------------------------------
_C.LINK = CN()
# Number of data symbols per packet (N). Should be a power of two.
_C.LINK.N_DATA = 128
# Number of pilot symbols per packet (N^(p)). Should be a power of two.
_C.LINK.N_PILOT = 128
# Samples per symbol (M)
_C.LINK.OVERSAMPLING = 8
# Span of the pulse-shaping filter in symbols (L_g)
_C.LINK.SPAN_SYMBOLS = 4
# Roll-off factor of the root-raised-cosine pulse
_C.LINK.ROLLOFF = 0.35
# Pulse shape of the transmitter (rrc, delta)
_C.LINK.PULSE = 'rrc'

# -----------------------------------------------------------------------------
# Power amplifier settings
# -----------------------------------------------------------------------------
_C.PA = CN()
# PA model (rapp, polynomial, linear)
_C.PA.MODEL = 'rapp'
# Smoothness factor of the Rapp model
_C.PA.SMOOTHNESS = 2.0
# Saturation amplitude of the Rapp model
_C.PA.SATURATION = 1.0
# Input back-off from the 3 dB compression point, in dB. .inf selects a linear PA.
_C.PA.IBO_DB = 5.0
# Coefficients of the odd degrees 1, 3, 5, ... of the polynomial PA
_C.PA.POLY_COEFFS = [1.0, -0.05]

# -----------------------------------------------------------------------------
# Interference channel settings
# -----------------------------------------------------------------------------
_C.CHANNEL = CN()
# Channel type (rayleigh, delta)
_C.CHANNEL.TYPE = 'rayleigh'
# Channel length in symbols (L_h)
_C.CHANNEL.SPAN_SYMBOLS = 4
# Timing of the channel (aligned, causal). "aligned" trims half of its span, "causal"
# keeps the first tap as the earliest path
_C.CHANNEL.MODE = 'aligned'

# -----------------------------------------------------------------------------
# Noise settings
# -----------------------------------------------------------------------------
_C.NOISE = CN()
# SI power over noise power before the receiver MF, in dB. .inf disables the noise.
_C.NOISE.SNR_DB = 0.0

# -----------------------------------------------------------------------------
# Hammerstein canceller settings
# -----------------------------------------------------------------------------
_C.HAMMERSTEIN = CN()
# FIR memory in symbols (L_q)
_C.HAMMERSTEIN.MEMORY = 4
# Maximum odd polynomial degree (P)
_C.HAMMERSTEIN.DEGREE = 3

# -----------------------------------------------------------------------------
# Learned MF canceller settings
# -----------------------------------------------------------------------------
_C.MF = CN()
# Span of the learned MF in symbols. 0 uses LINK.SPAN_SYMBOLS.
_C.MF.SPAN_SYMBOLS = 0
# When True, the span is the largest one that keeps the runtime multiplications at most
# equal to the ones of the Hammerstein canceller. Overrides MF.SPAN_SYMBOLS.
_C.MF.EQUAL_COMPLEXITY = False

# -----------------------------------------------------------------------------
# Least-squares settings
# -----------------------------------------------------------------------------
_C.LSQ = CN()
# Tikhonov weight of the LS fits. 0 disables the regularization.
_C.LSQ.RIDGE = 0.0

# -----------------------------------------------------------------------------
# Monte Carlo settings
# -----------------------------------------------------------------------------
_C.SIM = CN()
# Number of independent packets per operating point
_C.SIM.PACKETS = 500
# Master seed from which the random streams of every packet are derived
_C.SIM.SEED = 0
# Cancellers to evaluate (hammerstein, learned_mf, both)
_C.SIM.METHOD = 'both'
# Number of worker processes. 0 uses all the available cores.
_C.SIM.JOBS = 0
# Show a progress bar over the packets
_C.SIM.PROGRESS = True

# -----------------------------------------------------------------------------
# BER experiment settings
# -----------------------------------------------------------------------------
_C.BER = CN()
# SNR of the desired signal at the input of the receiver, in dB
_C.BER.SNR_GRID = [0.0, 2.0, 4.0, 6.0, 8.0, 10.0, 12.0]
# Number of packets per SNR point
_C.BER.PACKETS = 840
# When False, the full-duplex node stays silent during the data burst
_C.BER.INJECT_SI = True
# Channel of the desired link (flat, rayleigh)
_C.BER.DESIRED_CHANNEL = 'flat'
# Also evaluate a conventional link without SI
_C.BER.REFERENCE = False

# -----------------------------------------------------------------------------
# Misc
# -----------------------------------------------------------------------------
# Path to output folder. The log file is written there when non-empty.
_C.OUTPUT = ''
# Tag of experiment, overwritten by command line argument
_C.TAG = 'default'

METHODS: tuple[str, ...] = ("hammerstein", "learned_mf")
# Keys that do not affect the produced numbers and are left out of the csv headers.
_NON_RESULT_KEYS: tuple[str, ...] = ("SIM.JOBS", "SIM.PROGRESS", "OUTPUT")

# Command line flags mapped to config keys.
_ARGS_TO_KEYS: dict[str, str] = {
    "n": "LINK.N_DATA",
    "np": "LINK.N_PILOT",
    "m": "LINK.OVERSAMPLING",
    "lg": "LINK.SPAN_SYMBOLS",
    "lq": "HAMMERSTEIN.MEMORY",
    "p": "HAMMERSTEIN.DEGREE",
    "rolloff": "LINK.ROLLOFF",
    "snr_db": "NOISE.SNR_DB",
    "ibo_db": "PA.IBO_DB",
    "smoothness": "PA.SMOOTHNESS",
    "channel_span": "CHANNEL.SPAN_SYMBOLS",
    "packets": "SIM.PACKETS",
    "seed": "SIM.SEED",
    "method": "SIM.METHOD",
    "jobs": "SIM.JOBS",
    "output": "OUTPUT",
    "tag": "TAG",
}


def _update_config_from_file(config, cfg_file):
    config.defrost()
    with open(cfg_file, 'r') as f:
        yaml_cfg = yaml.load(f, Loader=yaml.FullLoader) or {}

    for cfg in yaml_cfg.setdefault('BASE', ['']):
        if cfg:
            _update_config_from_file(
                config, os.path.join(os.path.dirname(cfg_file), cfg)
            )
    config.merge_from_file(cfg_file)
    config.freeze()


def set_key(config: CN, key: str, value: Any) -> None:
    """Sets a dotted key of an unfrozen config, e.g. `set_key(config, "LINK.N_DATA", 64)`."""
    node: CN = config
    *parents, leaf = key.split(".")
    for p in parents:
        node = node[p]
    if leaf not in node:
        raise KeyError(f"Non-existent config key: {key}")
    old: Any = node[leaf]
    if isinstance(old, float) and isinstance(value, int):
        value = float(value)
    node[leaf] = value


def get_key(config: CN, key: str) -> Any:
    node: Any = config
    for part in key.split("."):
        node = node[part]
    return node


def _decode_option(value: str) -> Any:
    # Infinite values are not python literals.
    if value.strip().lower() in ("inf", ".inf", "+inf", "+.inf"):
        return float("inf")
    return value


def update_config(config, args):
    if args.get("cfg"):
        _update_config_from_file(config, args["cfg"])

    config.defrost()
    if "opts" in args:
        options: list[Any] = []
        for (k, v) in args["opts"]:
            options.append(k)
            options.append(_decode_option(v))
        # yacs decodes the remaining string values as python literals.
        config.merge_from_list(options)

    def _check_args(name):
        if name in args and args[name] is not None:
            return True
        return False

    # merge from specific arguments
    for name, key in _ARGS_TO_KEYS.items():
        if _check_args(name):
            set_key(config, key, args[name])

    config.freeze()


def validate_config(config: CN) -> None:
    """Rejects invalid parameter combinations before any computation.

    :raises ValueError: Naming the offending parameter.
    """
    for key in ("LINK.N_DATA", "LINK.N_PILOT", "LINK.OVERSAMPLING", "LINK.SPAN_SYMBOLS",
                "HAMMERSTEIN.MEMORY", "HAMMERSTEIN.DEGREE", "CHANNEL.SPAN_SYMBOLS",
                "SIM.PACKETS", "BER.PACKETS"):
        if int(get_key(config, key)) < 1:
            raise ValueError(f"{key} should be a positive integer, got {get_key(config, key)}.")
    for key in ("LINK.N_DATA", "LINK.N_PILOT"):
        n: int = get_key(config, key)
        if n & (n - 1) != 0:
            raise ValueError(f"{key} should be a power of two, got {n}.")
    if config.HAMMERSTEIN.DEGREE % 2 == 0:
        raise ValueError(f"HAMMERSTEIN.DEGREE should be odd, got {config.HAMMERSTEIN.DEGREE}.")
    if not 0.0 < config.LINK.ROLLOFF <= 1.0:
        raise ValueError(f"LINK.ROLLOFF should lie in (0, 1], got {config.LINK.ROLLOFF}.")
    if config.LINK.PULSE not in ("rrc", "delta"):
        raise ValueError(f"Unsupported LINK.PULSE: {config.LINK.PULSE}")
    if config.PA.MODEL not in ("rapp", "polynomial", "linear"):
        raise ValueError(f"Unsupported PA.MODEL: {config.PA.MODEL}")
    if config.PA.SMOOTHNESS <= 0 or config.PA.SATURATION <= 0:
        raise ValueError("PA.SMOOTHNESS and PA.SATURATION should be positive.")
    if config.CHANNEL.TYPE not in ("rayleigh", "delta"):
        raise ValueError(f"Unsupported CHANNEL.TYPE: {config.CHANNEL.TYPE}")
    if config.CHANNEL.MODE not in ("aligned", "causal"):
        raise ValueError(f"Unsupported CHANNEL.MODE: {config.CHANNEL.MODE}")
    if config.BER.DESIRED_CHANNEL not in ("flat", "rayleigh"):
        raise ValueError(f"Unsupported BER.DESIRED_CHANNEL: {config.BER.DESIRED_CHANNEL}")
    if config.SIM.METHOD not in METHODS + ("both",):
        raise ValueError(f"Unsupported SIM.METHOD: {config.SIM.METHOD}")
    if config.SIM.JOBS < 0:
        raise ValueError(f"SIM.JOBS should be non-negative, got {config.SIM.JOBS}.")
    if config.MF.SPAN_SYMBOLS < 0:
        raise ValueError(f"MF.SPAN_SYMBOLS should be non-negative, got {config.MF.SPAN_SYMBOLS}.")
    if config.LSQ.RIDGE < 0:
        raise ValueError(f"LSQ.RIDGE should be non-negative, got {config.LSQ.RIDGE}.")

    if "learned_mf" in selected_methods(config) and config.LSQ.RIDGE == 0:
        width: int = config.LINK.OVERSAMPLING * learned_mf_span(config)
        if config.LINK.N_PILOT < width:
            raise ValueError(f"LINK.N_PILOT ({config.LINK.N_PILOT}) should be at least M·L_g "
                             f"({width}) for the learned MF fit.")
    if "hammerstein" in selected_methods(config) and config.LSQ.RIDGE == 0:
        columns: int = config.HAMMERSTEIN.MEMORY * (config.HAMMERSTEIN.DEGREE + 1) // 2
        if config.LINK.N_PILOT < columns:
            raise ValueError(f"LINK.N_PILOT ({config.LINK.N_PILOT}) should be at least "
                             f"{columns} for the Hammerstein fit.")


def selected_methods(config: CN) -> tuple[str, ...]:
    return METHODS if config.SIM.METHOD == "both" else (config.SIM.METHOD,)


def learned_mf_span(config: CN) -> int:
    """Span of the learned MF in symbols."""
    if config.MF.EQUAL_COMPLEXITY:
        return equal_complexity_span(ComplexityInput.from_config(config))
    return config.MF.SPAN_SYMBOLS if config.MF.SPAN_SYMBOLS > 0 else config.LINK.SPAN_SYMBOLS


def config_header_lines(config: CN) -> list[str]:
    """The resolved config as csv header lines, without the keys that do not affect results."""
    config = config.clone()
    config.defrost()
    for key in _NON_RESULT_KEYS:
        *parents, leaf = key.split(".")
        node: CN = config
        for p in parents:
            node = node[p]
        node.pop(leaf, None)
    return ["config:"] + [f"  {line}" for line in config.dump().splitlines()]


def get_config(args: Optional[dict[str, Any]] = None):
    """Get a yacs CfgNode object with default values."""
    # Return a clone so that the defaults will not be altered
    # This is for the "local variable" use pattern
    config = _C.clone()
    update_config(config, args or {})

    return config
