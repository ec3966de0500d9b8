"""
Experiment orchestrator for the P-entropy laboratory.

Independent rows (one j, one m, one tower stage) run on a thread pool;
results are gathered in input order and written by a single writer, so the
worker count never changes the output bytes.
"""

import asyncio
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, TypeVar

from .components.admissible_fitter import fit_admissible, kappa_scan
from .components.correlation_engine import (
    correlation_table,
    fingerprint_family,
    separation_holds,
    set_measure,
    theta_scan,
)
from .components.entropy_calculator import p_entropy_profile
from .components.mc_oracle import OracleRow, mc_entropy_check
from .components.rigidity_scanner import TowerRigidityRow, rigidity_profile, tower_rigidity
from .components.schedule_finder import schedule_finder
from .interfaces import IReportWriter
from .models.config import ExperimentConfig
from .models.entropy import EntropyProfile, ProgressionSchedule
from .models.limits import FitResult, KappaRow, RigidityReport, ThetaRow
from .models.systems import Cylinder, MeasurableSet, SymbolicShift, Tower
from .services.descriptor_loader import (
    Experiment,
    load_experiment,
    schedule_family,
    schedule_partitions,
)
from .services.report_writer import ReportWriter
from .utils.error_handling import (
    ErrorCategory,
    ErrorSeverity,
    LabError,
    RigidityExhaustedError,
    ScheduleExhaustedError,
    SizeCapError,
    ValidationError,
    get_error_tracker,
    with_error_handling,
)
from .utils.logging import get_logger

T = TypeVar("T")
R = TypeVar("R")

_ROW_ERRORS = {"size_cap": SizeCapError, "validation": ValidationError}


class ExperimentOrchestrator:
    """
    Runs one experiment subcommand end to end: build the domain objects,
    fan rows out to the worker pool, write the reports.
    """

    def __init__(
        self,
        config: ExperimentConfig,
        writer: Optional[IReportWriter] = None,
        workers: Optional[int] = None,
    ):
        """
        Initialize the orchestrator.

        Args:
            config: Validated experiment configuration
            writer: Report writer; defaults to one on config.output_dir
            workers: Worker count; defaults to config.workers
        """
        self.logger = get_logger("orchestrator")
        self.config = config
        self.workers = workers or config.workers
        self.writer: IReportWriter = writer or ReportWriter(config.output_dir)
        self.error_tracker = get_error_tracker()
        self._experiment: Optional[Experiment] = None

    @property
    def experiment(self) -> Experiment:
        if self._experiment is None:
            self._experiment = load_experiment(self.config)
        return self._experiment

    async def run(self, command: str) -> Any:
        """Dispatch a subcommand."""
        handlers: Dict[str, Callable[[], Any]] = {
            "pentropy": self.run_pentropy,
            "schedule": self.run_schedule,
            "scan": self.run_scan,
            "tower": self.run_tower,
            "oracle": self.run_oracle,
        }
        if command not in handlers:
            raise ValidationError([f"Unknown command {command!r}"])
        self.logger.info(
            "Experiment started", extra={"command": command, "workers": self.workers}
        )
        result = await handlers[command]()
        self.logger.info(
            "Experiment finished",
            extra={"command": command, "reports": [str(p) for p in self.writer.written]},
        )
        return result

    async def _map(
        self, func: Callable[[T], R], items: Sequence[T], return_exceptions: bool = False
    ) -> List[Any]:
        """Apply func to every item on the pool; results keep input order."""
        loop = asyncio.get_running_loop()
        with ThreadPoolExecutor(max_workers=self.workers) as executor:
            futures = [loop.run_in_executor(executor, func, item) for item in items]
            return await asyncio.gather(*futures, return_exceptions=return_exceptions)

    def _interval_or_shift(self, command: str):
        system = self.experiment.system
        if isinstance(system, Tower):
            raise ValidationError([f"{command} needs an interval exchange or a Bernoulli shift"])
        return system

    async def run_pentropy(self) -> EntropyProfile:
        """Profile of (j, L(j), H_join, h_j) over j_set."""
        experiment = self.experiment
        system = self._interval_or_shift("pentropy")
        xi = experiment.partition
        constants = self.config.constants
        j_set = list(self.config.j_set or [])

        def row(j: int) -> EntropyProfile:
            return p_entropy_profile(
                system,
                xi,
                experiment.schedule,
                [j],
                method=experiment.method,
                sampling=experiment.sampling,
                size_cap=constants.size_cap,
            )

        parts = await self._map(row, j_set)
        profile = EntropyProfile(
            system=system.describe(),
            partition=xi.describe(),
            partition_entropy=parts[0].partition_entropy,
        )
        for part in parts:
            profile.rows.extend(part.rows)
            profile.errors.extend(part.errors)
        self.writer.write_profile(profile)

        if profile.errors:
            first = profile.errors[0]
            error_class = _ROW_ERRORS.get(first.code, LabError)
            messages = [f"j={e.j}: {e.message}" for e in profile.errors]
            if error_class is ValidationError:
                raise ValidationError(messages)
            raise error_class(
                f"{len(profile.errors)} profile row(s) failed", {"rows": messages}
            )
        return profile

    async def run_schedule(self) -> ProgressionSchedule:
        """Tabulated L(j) for the family; partial table and witness on failure."""
        experiment = self.experiment
        family = schedule_family(experiment)
        if any(isinstance(member, Tower) for member in family):
            raise ValidationError(["schedule family members must be IETs or Bernoulli shifts"])
        xi_list = schedule_partitions(experiment)
        constants = self.config.constants
        j_set = sorted(set(self.config.j_set or []))

        @with_error_handling("entropy.schedule")
        def one(j: int) -> ProgressionSchedule:
            return schedule_finder(family, xi_list, [j], constants.L_cap, constants.size_cap)

        results = await self._map(one, j_set, return_exceptions=True)
        table: Dict[int, int] = {}
        failure: Optional[BaseException] = None
        for j, result in zip(j_set, results):
            if isinstance(result, BaseException):
                failure = failure or result
                continue
            table.update(result.table)

        witness = None
        if isinstance(failure, ScheduleExhaustedError):
            witness = {
                "index": failure.witness_index,
                "system": failure.witness,
                "j": failure.j,
            }
        schedule = ProgressionSchedule(table=dict(sorted(table.items())))
        self.writer.write_schedule(schedule, witness)

        if failure is not None:
            if isinstance(failure, Exception):
                raise failure
            raise LabError(str(failure))
        return schedule

    async def run_scan(self) -> Dict[str, Any]:
        """Correlations, kappa, theta distances, fits, fingerprints, rigidity."""
        experiment = self.experiment
        system = experiment.system
        constants = self.config.constants
        m_values = self.config.m_values()
        pairs = experiment.test_pairs
        if not pairs:
            raise ValidationError(["scan needs at least one test pair"])
        fingerprint_sets = (
            self._fingerprint_sets(system, experiment) if self.config.times else []
        )

        @with_error_handling("limits")
        def scan_one(m: int) -> Tuple[List[float], List[KappaRow], ThetaRow, FitResult]:
            correlations = correlation_table(system, pairs, [m])[m]
            kappa = kappa_scan(system, [m], pairs, constants.kappa_threshold)
            theta = theta_scan(system, [m], pairs)[0]
            fit = fit_admissible(system, m, self.config.support, pairs)
            return correlations, kappa, theta, fit

        rows = await self._map(scan_one, m_values)
        table = {m: row[0] for m, row in zip(m_values, rows)}
        kappa_rows = [k for row in rows for k in row[1]]
        theta_rows = [row[2] for row in rows]
        fits = [row[3] for row in rows]

        self.writer.write_correlations(table)
        self.writer.write_kappa(kappa_rows)
        self.writer.write_theta(theta_rows)
        self.writer.write_fits(fits)
        separation = self._separation(theta_rows)
        self.writer.write_separation(constants.theta_r, separation)

        results: Dict[str, Any] = {
            "correlations": table,
            "kappa": kappa_rows,
            "theta": theta_rows,
            "fits": fits,
            "separation": separation,
        }
        if self.config.times:
            fingerprints = fingerprint_family(system, fingerprint_sets, self.config.times)
            self.writer.write_fingerprint(fingerprints)
            results["fingerprint"] = fingerprints
        if self.config.rigidity_j:
            reports = rigidity_profile(
                system,
                experiment.test_sets,
                constants.c,
                list(self.config.rigidity_j),
                constants.m_cap,
            )
            self.writer.write_rigidity(reports)
            results["rigidity"] = reports
            self._raise_if_exhausted(reports)
        return results

    def _separation(self, theta_rows: Sequence[ThetaRow]) -> List[Tuple[int, bool]]:
        # n runs over the scanned m below the largest, plus one step before the first
        scanned = sorted({row.m for row in theta_rows})
        if not scanned:
            return []
        r = self.config.constants.theta_r
        checked = [scanned[0] - 1] + scanned[:-1]
        return [(n, separation_holds(theta_rows, r=r, n=n)) for n in checked]

    def _fingerprint_sets(self, system, experiment: Experiment) -> List[Any]:
        if self.config.test_sets is not None:
            sets = list(experiment.test_sets)
            problems = []
            for index, A in enumerate(sets):
                measure = set_measure(system, A)
                if not 0 < measure < 1:
                    problems.append(
                        f"test_sets[{index}] has measure {float(measure):g}; "
                        "fingerprints need 0 < mu(A) < 1"
                    )
            if problems:
                raise ValidationError(problems)
            return sets
        if isinstance(system, SymbolicShift):
            sets = [Cylinder((0,)), Cylinder((0, 0))]
        else:
            sets = [
                MeasurableSet.interval(Fraction(0), Fraction(1, 2)),
                MeasurableSet.interval(Fraction(0), Fraction(1, 3)),
            ]
        return [A for A in sets if 0 < set_measure(system, A) < 1]

    def _raise_if_exhausted(self, reports: Sequence[RigidityReport]) -> None:
        exhausted = [report.j for report in reports if report.exhausted]
        if not exhausted:
            return
        self.error_tracker.record_error(
            component="limits.rigidity",
            category=ErrorCategory.CAP_EXHAUSTION,
            severity=ErrorSeverity.MEDIUM,
            message="Rigidity scan exhausted m_cap",
            context={"j": exhausted},
        )
        raise RigidityExhaustedError(
            f"No m <= m_cap={self.config.constants.m_cap} passes the rigidity test",
            {"j": exhausted, "c": self.config.constants.c},
        )

    async def run_tower(self) -> Tuple[List[int], List[TowerRigidityRow]]:
        """Heights h_1..h_final and rigidity at the heights."""
        recipe = self.experiment.recipe
        if recipe is None:
            raise ValidationError(["tower needs a 'rankone' system"])
        heights = recipe.heights(recipe.final_stage)
        stages = list(self.config.tower_stages or range(1, recipe.final_stage))

        @with_error_handling("limits.rigidity")
        def stage(n: int) -> TowerRigidityRow:
            return tower_rigidity(recipe, [n])[0]

        rows = await self._map(stage, stages)
        self.writer.write_heights(heights)
        self.writer.write_tower_rigidity(rows)
        return heights, rows

    async def run_oracle(self) -> List[OracleRow]:
        """Exact join entropy against the Monte Carlo estimate, per j."""
        experiment = self.experiment
        system = self._interval_or_shift("oracle")
        xi = experiment.partition
        sampling = experiment.sampling
        k = self.config.constants.agreement_k

        @with_error_handling("mcoracle")
        def check(j: int) -> OracleRow:
            return mc_entropy_check(
                system, xi, j, experiment.schedule.length(j), sampling.for_task(j), k
            )

        rows = await self._map(check, list(self.config.j_set or []))
        self.writer.write_oracle(rows)
        failed = [row.j for row in rows if not row.passed]
        if failed:
            self.logger.warning(
                "Monte Carlo estimate disagrees with the exact value",
                extra={"j": failed, "k": k},
            )
        return rows
