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

from typing import Union

from fdsic.cancellers.hammerstein import HammersteinCanceller, HammersteinConfig
from fdsic.cancellers.matched_filter import LearnedMfCanceller
from fdsic.config import learned_mf_span, selected_methods
from fdsic.dsp.filters import FirTaps, cascade_phase


Canceller = Union[HammersteinCanceller, LearnedMfCanceller]


def build_canceller(config, method: str, g_t: FirTaps, g_r: FirTaps) -> Canceller:
    ridge: float = config.LSQ.RIDGE
    if method == "hammerstein":
        canceller = HammersteinCanceller(
            HammersteinConfig(degree=config.HAMMERSTEIN.DEGREE, memory=config.HAMMERSTEIN.MEMORY),
            g_r,
            cascade_phase(g_t, g_r),
            ridge=ridge
        )
    elif method == "learned_mf":
        canceller = LearnedMfCanceller(config.LINK.OVERSAMPLING, learned_mf_span(config),
                                       ridge=ridge)
    else:
        raise RuntimeError(f"Unsupported cancellation method: {method}")
    return canceller


def build_cancellers(config, g_t: FirTaps, g_r: FirTaps) -> list[Canceller]:
    """Untrained cancellers of the methods selected by SIM.METHOD, in a fixed order."""
    return [build_canceller(config, method, g_t, g_r) for method in selected_methods(config)]
