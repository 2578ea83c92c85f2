import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mhdlimit.csvio import (
    constants_summary_table,
    constants_table,
    diagnostics_table,
    format_value,
    read_csv,
    sweep_table,
    write_csv,
)
from mhdlimit.inequalities import ConstantReport
from mhdlimit.littlewood_paley import BesovIndex


class TestFormat:
    @pytest.mark.parametrize("x,text", [(1, "1"), (True, "1"), (np.int64(5), "5"), (0.1, "0.10000000000000001"),
                                        (math.nan, "nan"), (math.inf, "inf"), (-math.inf, "-inf"),
                                        ("slope", "slope"), (np.float64(2.5), "2.5")])
    def test_values(self, x, text):
        assert format_value(x) == text

    @given(st.floats(allow_nan=False, allow_infinity=False))
    def test_float_round_trip(self, x):
        assert float(format_value(x)) == x


class TestFiles:
    def test_write_read(self, tmp_path):
        p = write_csv(tmp_path / "a.csv", ["a", "b"], [[1, 0.5], ["x", math.nan]])
        assert open(p).read() == "a,b\n1,0.5\nx,nan\n"
        assert read_csv(p) == (["a", "b"], [["1", "0.5"], ["x", "nan"]])

    def test_empty_file(self, tmp_path):
        (tmp_path / "e.csv").write_text("")
        with pytest.raises(ValueError, match="header"):
            read_csv(tmp_path / "e.csv")


class TestTables:
    def test_diagnostics(self):
        header, rows = diagnostics_table({"t": [0.0, 1.0], "energy": [2.0, 1.5], "other": [9, 9]})
        assert header == ["t", "energy"] and rows == [[0.0, 2.0], [1.0, 1.5]]

    def test_sweep_footer(self):
        class Rec:
            norm, lower_norm = "H^2.5", "H^1.5"
            parameters, errors, lower_errors = [0.1, 0.05], [2.0, 1.0], [1.0, 0.5]
            slope, lower_slope = 1.0, 1.0
            extra = {"B^2.1_4,2": [3.0, 1.5]}
            extra_slopes = {"B^2.1_4,2": 1.0}
        header, rows = sweep_table(Rec())
        assert header == ["parameter", "error_H^2.5", "error_H^1.5", "error_B^2.1_4,2"]
        assert rows[-1] == ["slope", 1.0, 1.0, 1.0] and len(rows) == 3

    def test_constants(self):
        rep = ConstantReport("product", BesovIndex(1.5))
        rep.add(0, 32, 0.5)
        rep.add(0, 64, 0.5)
        rep.skip(1, 32)
        assert constants_table([rep])[1] == [["product", 0, 32, 0.5], ["product", 0, 64, 0.5]]
        header, rows = constants_summary_table([rep])
        assert rows[0] == ["product", 1.5, 2.0, 2.0, 32, 0.5, 1.0, 1]
