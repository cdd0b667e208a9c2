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
from scipy import linalg


# Relative threshold on the diagonal of R below which a column is considered dependent.
RANK_TOLERANCE: float = 1e-12


class SingularSystemError(RuntimeError):
    """Raised when a least-squares system has not full column rank."""

    def __init__(self, column: int, message: str = "") -> None:
        self.column: int = column
        super().__init__(message or f"Rank-deficient system at column {column}.")


def solve_ls(a: np.ndarray, b: np.ndarray, ridge: float = 0.0) -> np.ndarray:
    """Solves min ‖A·x - b‖₂ over complex x with a column-pivoted QR factorization.

    :param a: Design matrix of shape (rows, cols), with rows >= cols.
    :param b: Target vector of length rows.
    :param ridge: Optional Tikhonov weight λ, minimizing ‖A·x - b‖² + λ‖x‖² instead.

    :return: The solution vector of length cols.

    :raises SingularSystemError: When A has fewer rows than columns or when a diagonal
        entry of R falls below 1e-12·‖A‖. The error carries the index of the
        first dependent column of A.
    """
    a = np.asarray(a, dtype=np.complex128)
    b = np.asarray(b, dtype=np.complex128).reshape(-1)
    if a.ndim != 2:
        raise ValueError(f"Design matrix should be 2-dimensional, got shape {a.shape}.")
    rows, cols = a.shape
    if b.size != rows:
        raise ValueError(f"Target length {b.size} does not match the {rows} matrix rows.")
    if ridge < 0:
        raise ValueError(f"Ridge weight should be non-negative, got {ridge}.")
    if ridge > 0:
        a = np.vstack([a, math.sqrt(ridge) * np.eye(cols, dtype=np.complex128)])
        b = np.concatenate([b, np.zeros(cols, dtype=np.complex128)])
    elif rows < cols:
        raise SingularSystemError(rows, f"Under-determined system: {rows} rows, {cols} columns.")

    q, r, perm = linalg.qr(a, mode="economic", pivoting=True)
    tolerance: float = RANK_TOLERANCE * float(np.linalg.norm(a))
    dependent: np.ndarray = np.flatnonzero(np.abs(np.diag(r)) <= tolerance)
    if dependent.size > 0:
        raise SingularSystemError(int(perm[dependent[0]]))

    z: np.ndarray = linalg.solve_triangular(r, q.conj().T @ b)
    x: np.ndarray = np.empty(cols, dtype=np.complex128)
    x[perm] = z
    return x
