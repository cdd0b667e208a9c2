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

"""Real-multiplication counts of the two cancellers.

The counts are analytical evaluations of the normal-equation formulation of both LS
fits, not measurements of this implementation (which solves the fits by QR).
"""
import dataclasses
from typing import Any

import yacs.config


COUNTS_NOTE: str = ("analytical real-multiplication counts of the normal-equation "
                    "formulation; the fits themselves are solved by QR")


@dataclasses.dataclass(frozen=True)
class ComplexityInput:
    n: int
    oversampling: int
    span_symbols: int
    memory: int
    degree: int

    def __post_init__(self) -> None:
        for name in ("n", "oversampling", "span_symbols", "memory", "degree"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} should be a positive integer, got {getattr(self, name)}.")
        if self.degree % 2 == 0:
            raise ValueError(f"Polynomial degree should be odd, got {self.degree}.")

    @property
    def basis_per_tap(self) -> int:
        return (self.degree + 1) // 2

    @property
    def mf_length(self) -> int:
        return self.oversampling * self.span_symbols

    @staticmethod
    def from_config(config: yacs.config.CfgNode) -> "ComplexityInput":
        return ComplexityInput(
            n=config.LINK.N_DATA,
            oversampling=config.LINK.OVERSAMPLING,
            span_symbols=config.LINK.SPAN_SYMBOLS,
            memory=config.HAMMERSTEIN.MEMORY,
            degree=config.HAMMERSTEIN.DEGREE
        )


def runtime_hammerstein(c: ComplexityInput) -> int:
    """MF filtering plus regeneration of N symbols: 2N(ML_g + 1) + 6N·P̃·L_q."""
    return 2 * c.n * (c.mf_length + 1) + 6 * c.n * c.basis_per_tap * c.memory


def runtime_proposed(c: ComplexityInput) -> int:
    """MF filtering only: 2N(ML_g + 1)."""
    return 2 * c.n * (c.mf_length + 1)


def training_hammerstein(c: ComplexityInput, span: str = "memory") -> int:
    """MF filtering of the pilots plus the LS fit of P̃·k coefficients.

    :param span: "memory" uses k = L_q in the LS terms. "pulse" uses k = L_g instead,
        the variant where the pulse span appears in place of the memory length.
    """
    if span == "memory":
        k: int = c.basis_per_tap * c.memory
    elif span == "pulse":
        k = c.basis_per_tap * c.span_symbols
    else:
        raise ValueError(f"Unsupported span variant: {span}")
    return 2 * c.n * (c.mf_length + 1) + 2 * c.n * k * (4 * k + 3) + 4 * k ** 3


def training_proposed(c: ComplexityInput) -> int:
    """LS fit of the M·L_g MF coefficients: 4N(2(ML_g)² + ML_g) + 4(ML_g)³."""
    w: int = c.mf_length
    return 4 * c.n * (2 * w ** 2 + w) + 4 * w ** 3


def equal_complexity_span(c: ComplexityInput) -> int:
    """Largest learned-MF span whose runtime count does not exceed the Hammerstein one."""
    return c.span_symbols + (3 * c.basis_per_tap * c.memory) // c.oversampling


def complexity_table(c: ComplexityInput, span: str = "memory") -> list[dict[str, Any]]:
    return [
        {"method": "hammerstein", "phase": "runtime", "multiplications": runtime_hammerstein(c)},
        {"method": "learned_mf", "phase": "runtime", "multiplications": runtime_proposed(c)},
        {"method": "hammerstein", "phase": "training",
         "multiplications": training_hammerstein(c, span=span)},
        {"method": "learned_mf", "phase": "training", "multiplications": training_proposed(c)},
    ]
