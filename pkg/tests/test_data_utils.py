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

import io
import tempfile
import unittest
from pathlib import Path

from fdsic import data_utils


class TestCsvFiles(unittest.TestCase):

    def test_format_csv(self) -> None:
        text: str = data_utils.format_csv(
            [{"method": "hammerstein", "value": 1}, {"method": "learned_mf"}],
            fieldnames=["method", "value"],
            header_lines=["schema_version: 1", "master_seed: 0"]
        )
        self.assertEqual(text, "# schema_version: 1\n# master_seed: 0\n"
                               "method,value\nhammerstein,1\nlearned_mf,\n")

    def test_fieldnames_default_to_first_row(self) -> None:
        text: str = data_utils.format_csv([{"b": 1, "a": 2}])
        self.assertEqual(text.splitlines()[0], "b,a")

    def test_written_file_is_read_back_without_header(self) -> None:
        rows: list[dict] = [{"packet": "0", "residual_db": "-21.500"},
                            {"packet": "1", "residual_db": "-19.250"}]
        with tempfile.TemporaryDirectory() as tmp_dir:
            path: Path = Path(tmp_dir) / "results.csv"
            data_utils.write_csv_file(rows, path, fieldnames=["packet", "residual_db"],
                                      header_lines=["config:", "  SIM:"])
            self.assertEqual(data_utils.read_csv_file(path), rows)

    def test_write_to_stream(self) -> None:
        buffer: io.StringIO = io.StringIO()
        data_utils.write_csv_file([{"x": 1}], buffer, delimiter=";", fieldnames=["x"])
        self.assertEqual(buffer.getvalue(), "x\n1\n")


if __name__ == '__main__':
    unittest.main()
