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

import csv
import io
import pathlib
import sys
from typing import Any, Optional, TextIO, Union


# Version of the layout of the csv files written by the command line tools.
SCHEMA_VERSION: int = 1
COMMENT_PREFIX: str = "#"


def read_csv_file(
    path: pathlib.Path,
    delimiter: str = ","
) -> list[dict[str, Any]]:
    """Reads a csv file into a list of dicts, skipping the `#` header lines."""
    with path.open("r") as f:
        lines: list[str] = [line for line in f if not line.startswith(COMMENT_PREFIX)]
    reader = csv.DictReader(lines, delimiter=delimiter)
    contents: list[dict[str, Any]] = [row for row in reader]
    return contents


def write_csv_file(
    data: list[dict[str, Any]],
    output_file: Union[pathlib.Path, TextIO, None],
    fieldnames: Optional[list[str]] = None,
    delimiter: str = ",",
    header_lines: Optional[list[str]] = None
) -> None:
    """Writes dict rows to a csv file, to a text stream, or to stdout when no file is given.

    :param header_lines: Lines emitted before the csv header, each prefixed with `#`.
    """
    if fieldnames is None:
        fieldnames = list(data[0].keys())
    if isinstance(output_file, pathlib.Path):
        with output_file.open("w", newline="") as f:
            _write_rows(f, data, fieldnames, delimiter, header_lines)
    else:
        _write_rows(output_file if output_file is not None else sys.stdout,
                    data, fieldnames, delimiter, header_lines)


def format_csv(
    data: list[dict[str, Any]],
    fieldnames: Optional[list[str]] = None,
    header_lines: Optional[list[str]] = None
) -> str:
    buffer: io.StringIO = io.StringIO()
    write_csv_file(data, buffer, fieldnames=fieldnames, header_lines=header_lines)
    return buffer.getvalue()


def _write_rows(
    f: TextIO,
    data: list[dict[str, Any]],
    fieldnames: list[str],
    delimiter: str,
    header_lines: Optional[list[str]]
) -> None:
    for line in header_lines or []:
        f.write(f"{COMMENT_PREFIX} {line}\n")
    writer: csv.DictWriter = csv.DictWriter(f, fieldnames=fieldnames, delimiter=delimiter,
                                            lineterminator="\n")
    writer.writeheader()
    for r in data:
        writer.writerow(r)
