"""
CSV and JSON report emission.

Numbers are printed with 12 significant digits and '.' as the decimal
separator; identical results give identical bytes.
"""

import csv
import io
import json
import math
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple

from ..components.mc_oracle import OracleRow
from ..components.rigidity_scanner import TowerRigidityRow
from ..models.entropy import EntropyProfile, ProgressionSchedule
from ..models.limits import FingerprintRow, FitResult, KappaRow, RigidityReport, ThetaRow
from ..utils.error_handling import LabError
from ..utils.logging import get_logger

logger = get_logger("reports")

PROFILE_HEADER = ["j", "L", "H_join", "h_j", "method", "stderr"]
CORRELATION_HEADER = ["m", "pair", "correlation"]
KAPPA_HEADER = ["m", "kappa", "residual"]
THETA_HEADER = ["m", "theta_distance"]
FINGERPRINT_HEADER = [
    "m",
    "n",
    "measure",
    "forward",
    "backward",
    "target_forward",
    "target_backward",
    "discriminating",
]
HEIGHTS_HEADER = ["n", "height"]
TOWER_RIGIDITY_HEADER = ["n", "height", "measure", "correlation", "ratio"]
ORACLE_HEADER = ["j", "L", "exact", "estimate", "stderr", "passed"]


def format_number(value: Any) -> str:
    """One CSV cell."""
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float) or hasattr(value, "__float__"):
        number = float(value)
        if math.isnan(number):
            return "nan"
        return f"{number:.12g}"
    return str(value)


def _rounded(obj: Any) -> Any:
    """Floats rounded to 12 significant digits, recursively."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, (int, str)):
        return obj
    if isinstance(obj, dict):
        return {str(key): _rounded(value) for key, value in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_rounded(value) for value in obj]
    return float(f"{float(obj):.12g}")


def csv_text(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_number(value) for value in row])
    return buffer.getvalue()


def json_text(obj: Any) -> str:
    return json.dumps(_rounded(obj), indent=2, sort_keys=True) + "\n"


def fit_as_dict(fit: FitResult) -> Dict[str, Any]:
    return {
        "m": fit.m,
        "a": fit.model.a,
        "coefficients": {str(i): w for i, w in sorted(fit.model.coefficients.items())},
        "residual": fit.residual,
        "degenerate": fit.degenerate,
    }


def rigidity_as_dict(report: RigidityReport) -> Dict[str, Any]:
    out = report.as_dict()
    out["m_cap"] = report.m_cap
    out["test_sets"] = list(report.test_sets)
    out["correlations"] = list(report.correlations)
    return out


class ReportWriter:
    """Writes experiment reports into one output directory."""

    def __init__(self, output_dir: str):
        self.output_dir = Path(output_dir)
        self.written: List[Path] = []

    def _write(self, name: str, text: str) -> Path:
        path = self.output_dir / name
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            with open(path, "w", encoding="utf-8", newline="") as f:
                f.write(text)
        except OSError as e:
            raise LabError(f"Cannot write report {path}: {e}", {"path": str(path)}) from e
        self.written.append(path)
        logger.info("Report written", extra={"path": str(path), "bytes": len(text)})
        return path

    def write_csv(self, name: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
        return self._write(name, csv_text(header, rows))

    def write_json(self, name: str, obj: Any) -> Path:
        return self._write(name, json_text(obj))

    def write_profile(self, profile: EntropyProfile) -> List[Path]:
        rows = [
            (row.j, row.L, row.H_join, row.h_j, row.method.value, row.stderr)
            for row in sorted(profile.rows, key=lambda r: r.j)
        ]
        errors = [
            {"j": error.j, "code": error.code, "message": error.message}
            for error in sorted(profile.errors, key=lambda e: e.j)
        ]
        return [
            self.write_csv("profile.csv", PROFILE_HEADER, rows),
            self.write_json("profile_errors.json", {"errors": errors}),
        ]

    def write_schedule(
        self, schedule: ProgressionSchedule, witness: Optional[Dict[str, Any]] = None
    ) -> Path:
        payload: Dict[str, Any] = dict(schedule.as_dict())
        if witness is not None:
            payload["witness"] = witness
        return self.write_json("schedule.json", payload)

    def write_correlations(self, table: Dict[int, List[float]]) -> Path:
        rows = [
            (m, pair, value)
            for m in sorted(table)
            for pair, value in enumerate(table[m])
        ]
        return self.write_csv("correlations.csv", CORRELATION_HEADER, rows)

    def write_kappa(self, rows: Sequence[KappaRow]) -> Path:
        return self.write_csv(
            "kappa.csv", KAPPA_HEADER, [(r.m, r.kappa, r.residual) for r in rows]
        )

    def write_theta(self, rows: Sequence[ThetaRow]) -> Path:
        return self.write_csv(
            "theta.csv", THETA_HEADER, [(r.m, r.theta_distance) for r in rows]
        )

    def write_fits(self, fits: Sequence[FitResult]) -> Path:
        return self.write_json("fits.json", {"fits": [fit_as_dict(fit) for fit in fits]})

    def write_separation(self, r: float, rows: Sequence[Tuple[int, bool]]) -> Path:
        """Per scanned n, whether some later m is farther than r from Theta."""
        return self.write_json(
            "separation.json",
            {
                "r": r,
                "rows": [{"n": n, "separated": flag} for n, flag in rows],
                "holds": bool(rows) and all(flag for _, flag in rows),
            },
        )

    def write_fingerprint(self, rows: Sequence[FingerprintRow]) -> Path:
        return self.write_csv(
            "fingerprint.csv",
            FINGERPRINT_HEADER,
            [
                (
                    r.m,
                    r.n,
                    r.measure,
                    r.forward,
                    r.backward,
                    r.target_forward,
                    r.target_backward,
                    r.discriminating,
                )
                for r in rows
            ],
        )

    def write_rigidity(self, reports: Sequence[RigidityReport]) -> Path:
        return self.write_json(
            "rigidity.json", {"reports": [rigidity_as_dict(report) for report in reports]}
        )

    def write_heights(self, heights: Sequence[int]) -> Path:
        return self.write_csv(
            "heights.csv", HEIGHTS_HEADER, [(n, h) for n, h in enumerate(heights, start=1)]
        )

    def write_tower_rigidity(self, rows: Sequence[TowerRigidityRow]) -> Path:
        return self.write_csv(
            "tower_rigidity.csv",
            TOWER_RIGIDITY_HEADER,
            [(r.n, r.height, r.measure, r.correlation, r.ratio) for r in rows],
        )

    def write_oracle(self, rows: Sequence[OracleRow]) -> Path:
        return self.write_csv(
            "oracle.csv",
            ORACLE_HEADER,
            [(r.j, r.L, r.exact, r.estimate, r.stderr, r.passed) for r in rows],
        )
