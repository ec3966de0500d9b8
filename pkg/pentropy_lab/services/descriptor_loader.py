"""
Turns validated config descriptors into domain objects.

Every builder collects its problems instead of stopping at the first, so a
config with several bad descriptors is rejected with one report.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, TypeVar, Union

import numpy as np

from ..components import iet_engine, rank_one
from ..components.correlation_engine import (
    default_cylinder_sets,
    default_test_pairs,
    default_test_sets,
)
from ..models.config import (
    BernoulliDescriptor,
    ExperimentConfig,
    IETDescriptor,
    PartitionDescriptor,
    RandomIETDescriptor,
    RankOneDescriptor,
    RotationDescriptor,
    ScheduleRule,
    SetDescriptor,
)
from ..models.entropy import EntropyMethod, ProgressionSchedule
from ..models.partition import CylinderPartition, IntervalPartition
from ..models.sampling import SampleConfig
from ..models.systems import (
    Cylinder,
    IntervalExchange,
    MeasurableSet,
    RankOneRecipe,
    RankOneStage,
    SymbolicShift,
    Tower,
)
from ..utils.arithmetic import parse_number
from ..utils.error_handling import LabError, ValidationError
from ..utils.logging import get_logger

logger = get_logger("config")

LabSystem = Union[IntervalExchange, SymbolicShift, Tower]
LabPartition = Union[IntervalPartition, CylinderPartition]
TestSetLike = Union[MeasurableSet, Cylinder]

# dyadic xi_1, xi_2, xi_3 when a schedule config names no partitions
DEFAULT_SCHEDULE_DEPTHS = (1, 2, 3)

T = TypeVar("T")


@dataclass
class Experiment:
    """Domain objects of one experiment, ready for the engines."""

    config: ExperimentConfig
    system: Optional[LabSystem] = None
    family: List[LabSystem] = field(default_factory=list)
    partition: Optional[LabPartition] = None
    partitions: List[LabPartition] = field(default_factory=list)
    schedule: ProgressionSchedule = field(default_factory=ProgressionSchedule)
    test_sets: List[TestSetLike] = field(default_factory=list)
    test_pairs: List[tuple] = field(default_factory=list)
    method: Optional[EntropyMethod] = None
    sampling: Optional[SampleConfig] = None

    @property
    def recipe(self) -> Optional[RankOneRecipe]:
        return self.system.recipe if isinstance(self.system, Tower) else None


def build_system(descriptor) -> LabSystem:
    """Build a system; raises ValueError or LabError on bad parameters."""
    if isinstance(descriptor, IETDescriptor):
        return IntervalExchange(tuple(descriptor.lengths), tuple(descriptor.permutation))
    if isinstance(descriptor, RotationDescriptor):
        return iet_engine.rotation(descriptor.alpha)
    if isinstance(descriptor, BernoulliDescriptor):
        return SymbolicShift(tuple(parse_number(p) for p in descriptor.probs))
    if isinstance(descriptor, RankOneDescriptor):
        recipe = RankOneRecipe(
            tuple(RankOneStage(stage.r, tuple(stage.spacers)) for stage in descriptor.stages)
        )
        return rank_one.final_tower(recipe)
    if isinstance(descriptor, RandomIETDescriptor):
        return iet_engine.random_iet(descriptor.d, np.random.default_rng(descriptor.seed))
    raise ValueError(f"Unknown system descriptor {type(descriptor).__name__}")


def build_partition(descriptor: PartitionDescriptor) -> LabPartition:
    if descriptor.cylinder is not None:
        return CylinderPartition(descriptor.cylinder)
    if descriptor.dyadic is not None:
        return IntervalPartition.dyadic(descriptor.dyadic)
    return IntervalPartition(tuple(descriptor.breakpoints))


def build_schedule(rule: ScheduleRule) -> ProgressionSchedule:
    if rule.rule == "table":
        return ProgressionSchedule.tabulated(rule.table)
    if rule.rule == "constant":
        schedule = ProgressionSchedule.constant(rule.length)
    else:
        schedule = ProgressionSchedule.linear(rule.slope, rule.intercept)
    schedule.validate()
    return schedule


def build_test_set(descriptor: SetDescriptor) -> TestSetLike:
    if descriptor.word is not None:
        return Cylinder(tuple(descriptor.word), descriptor.position)
    return MeasurableSet.from_intervals(descriptor.intervals)


class DescriptorLoader:
    """Builds an Experiment from a validated ExperimentConfig."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self.errors: List[str] = []

    def _attempt(self, label: str, build: Callable[[], T]) -> Optional[T]:
        try:
            return build()
        except ValidationError as e:
            self.errors.extend(f"{label}: {message}" for message in e.messages)
        except (LabError, ValueError, KeyError) as e:
            self.errors.append(f"{label}: {e}")
        return None

    def load(self) -> Experiment:
        """
        Build every descriptor present in the config.

        Raises:
            ValidationError: Listing every descriptor that failed.
        """
        config = self.config
        self.errors = []
        experiment = Experiment(config=config)

        if config.system is not None:
            experiment.system = self._attempt("system", lambda: build_system(config.system))
        for index, descriptor in enumerate(config.family):
            member = self._attempt(f"family[{index}]", lambda d=descriptor: build_system(d))
            if member is not None:
                experiment.family.append(member)

        if config.partition is not None:
            experiment.partition = self._attempt(
                "partition", lambda: build_partition(config.partition)
            )
        elif isinstance(experiment.system, SymbolicShift):
            experiment.partition = CylinderPartition(1)
        for index, descriptor in enumerate(config.partitions):
            xi = self._attempt(f"partitions[{index}]", lambda d=descriptor: build_partition(d))
            if xi is not None:
                experiment.partitions.append(xi)

        schedule = self._attempt("schedule", lambda: build_schedule(config.schedule))
        if schedule is not None:
            experiment.schedule = schedule

        experiment.test_sets = self._test_sets(experiment.system)
        experiment.test_pairs = self._test_pairs(experiment.system, experiment.test_sets)

        if config.method is not None:
            experiment.method = EntropyMethod(config.method)
        experiment.sampling = self._attempt(
            "sampling", lambda: self._sampling(config.samples, config.seed)
        )

        if self.errors:
            raise ValidationError(self.errors)
        logger.debug(
            "Descriptors loaded",
            extra={
                "system": experiment.system.describe() if experiment.system else None,
                "family": len(experiment.family),
                "test_sets": len(experiment.test_sets),
            },
        )
        return experiment

    @staticmethod
    def _sampling(samples: int, seed: int) -> SampleConfig:
        sampling = SampleConfig(samples, seed)
        sampling.validate()
        return sampling

    def _test_sets(self, system: Optional[LabSystem]) -> List[TestSetLike]:
        if self.config.test_sets is None:
            if isinstance(system, SymbolicShift):
                return list(default_cylinder_sets())
            return list(default_test_sets())

        sets: List[TestSetLike] = []
        for index, descriptor in enumerate(self.config.test_sets):
            built = self._attempt(
                f"test_sets[{index}]", lambda d=descriptor: build_test_set(d)
            )
            if built is None:
                continue
            if isinstance(system, SymbolicShift) != isinstance(built, Cylinder):
                kind = "cylinder" if isinstance(system, SymbolicShift) else "interval"
                self.errors.append(f"test_sets[{index}]: this system takes {kind} test sets")
                continue
            sets.append(built)
        return sets

    def _test_pairs(
        self, system: Optional[LabSystem], sets: Sequence[TestSetLike]
    ) -> List[tuple]:
        if self.config.test_pairs is None:
            if self.config.test_sets is not None:
                return [(A, B) for A in sets for B in sets]
            if isinstance(system, SymbolicShift):
                return [(A, B) for A in sets for B in sets]
            return default_test_pairs()

        pairs = []
        for index, (a, b) in enumerate(self.config.test_pairs):
            if not (0 <= a < len(sets) and 0 <= b < len(sets)):
                self.errors.append(
                    f"test_pairs[{index}]: indices ({a}, {b}) outside 0..{len(sets) - 1}"
                )
                continue
            pairs.append((sets[a], sets[b]))
        return pairs


def load_experiment(config: ExperimentConfig) -> Experiment:
    return DescriptorLoader(config).load()


def schedule_family(experiment: Experiment) -> List[LabSystem]:
    """The family of a schedule run; a lone system is a family of one."""
    if experiment.family:
        return list(experiment.family)
    return [experiment.system] if experiment.system is not None else []


def schedule_partitions(experiment: Experiment) -> List[LabPartition]:
    """xi_1, xi_2, ...: explicit list, else the single partition, else dyadic depths 1..3."""
    if experiment.partitions:
        return list(experiment.partitions)
    if isinstance(experiment.partition, IntervalPartition):
        return [experiment.partition]
    return [IntervalPartition.dyadic(depth) for depth in DEFAULT_SCHEDULE_DEPTHS]
