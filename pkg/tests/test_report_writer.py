"""
Tests for CSV and JSON report emission.
"""

import json
import math

import numpy as np
import pytest

from pentropy_lab.components.rigidity_scanner import TowerRigidityRow
from pentropy_lab.models.entropy import EntropyMethod, EntropyProfile, EntropyRow, ProgressionSchedule, RowError
from pentropy_lab.models.limits import AdmissibleModel, FitResult, KappaRow, RigidityReport
from pentropy_lab.services.report_writer import ReportWriter, csv_text, format_number, json_text
from pentropy_lab.utils.error_handling import LabError


class TestFormatting:
    """Test number formatting."""

    def test_twelve_significant_digits(self):
        assert format_number(math.log(2)) == "0.69314718056"
        assert format_number(1 / 3) == "0.333333333333"

    def test_integers_and_flags(self):
        assert format_number(7) == "7"
        assert format_number(np.int64(7)) == "7"
        assert format_number(True) == "true"
        assert format_number(None) == ""

    def test_small_values_use_exponent(self):
        assert format_number(1e-15) == "1e-15"

    def test_csv_uses_unix_newlines(self):
        text = csv_text(["a", "b"], [(1, 0.5)])
        assert text == "a,b\n1,0.5\n"

    def test_json_rounds_and_sorts(self):
        text = json_text({"b": 1 / 3, "a": [True, None]})
        assert text == '{\n  "a": [\n    true,\n    null\n  ],\n  "b": 0.333333333333\n}\n'


class TestReportWriter:
    """Test report files."""

    def test_profile(self, tmp_path):
        profile = EntropyProfile("S", "xi", math.log(2))
        profile.rows.append(EntropyRow(2, 2, 2 * math.log(2), math.log(2), EntropyMethod.ANALYTIC))
        profile.rows.append(EntropyRow(1, 1, math.log(2), math.log(2), EntropyMethod.ANALYTIC))
        profile.errors.append(RowError(3, "size_cap", "too many intervals"))
        writer = ReportWriter(str(tmp_path))
        csv_path, errors_path = writer.write_profile(profile)

        lines = csv_path.read_text().splitlines()
        assert lines[0] == "j,L,H_join,h_j,method,stderr"
        assert lines[1] == "1,1,0.69314718056,0.69314718056,analytic,"
        assert lines[2].startswith("2,2,1.38629436112,")
        assert json.loads(errors_path.read_text()) == {
            "errors": [{"j": 3, "code": "size_cap", "message": "too many intervals"}]
        }
        assert writer.written == [csv_path, errors_path]

    def test_schedule_with_witness(self, tmp_path):
        schedule = ProgressionSchedule.tabulated({1: 1, 2: 4})
        path = ReportWriter(str(tmp_path)).write_schedule(schedule, {"index": 1, "system": "S", "j": 3})
        payload = json.loads(path.read_text())
        assert payload == {"j": [1, 2], "L": [1, 4], "witness": {"index": 1, "system": "S", "j": 3}}

    def test_correlations_long_format(self, tmp_path):
        path = ReportWriter(str(tmp_path)).write_correlations({2: [0.5, 0.25], 1: [0.1, 0.0]})
        assert path.read_text() == "m,pair,correlation\n1,0,0.1\n1,1,0\n2,0,0.5\n2,1,0.25\n"

    def test_kappa(self, tmp_path):
        path = ReportWriter(str(tmp_path)).write_kappa([KappaRow(3, 1.0, 0.0)])
        assert path.read_text() == "m,kappa,residual\n3,1,0\n"

    def test_fits(self, tmp_path):
        fit = FitResult(AdmissibleModel(0.25, {0: 0.75}), residual=1e-13, m=4)
        path = ReportWriter(str(tmp_path)).write_fits([fit])
        payload = json.loads(path.read_text())
        assert payload["fits"][0]["coefficients"] == {"0": 0.75}
        assert payload["fits"][0]["degenerate"] is False

    def test_separation(self, tmp_path):
        writer = ReportWriter(str(tmp_path))
        payload = json.loads(writer.write_separation(0.1, [(0, True), (3, False)]).read_text())
        assert payload == {
            "holds": False,
            "r": 0.1,
            "rows": [{"n": 0, "separated": True}, {"n": 3, "separated": False}],
        }
        assert json.loads(writer.write_separation(0.1, []).read_text())["holds"] is False

    def test_rigidity(self, tmp_path):
        report = RigidityReport(j=1, N=2, witness_m=2, c=0.5, test_sets=["[0,0.5)"], m_cap=10, correlations=[0.3])
        path = ReportWriter(str(tmp_path)).write_rigidity([report])
        entry = json.loads(path.read_text())["reports"][0]
        assert entry["N"] == 2
        assert entry["m_cap"] == 10
        assert entry["test_sets"] == ["[0,0.5)"]

    def test_heights_and_tower_rigidity(self, tmp_path):
        writer = ReportWriter(str(tmp_path))
        heights = writer.write_heights([1, 4, 13])
        assert heights.read_text() == "n,height\n1,1\n2,4\n3,13\n"
        rows = writer.write_tower_rigidity([TowerRigidityRow(2, 4, 0.5, 0.25)])
        assert rows.read_text().splitlines()[1] == "2,4,0.5,0.25,0.5"

    def test_unwritable_directory(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("x")
        with pytest.raises(LabError, match="Cannot write report"):
            ReportWriter(str(blocker / "sub")).write_kappa([])
