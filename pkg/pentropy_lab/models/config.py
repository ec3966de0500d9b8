"""
Experiment configuration models.

Configs are validated with pydantic so that every schema violation is
reported at once, before any computation starts.
"""

from typing import Annotated, Dict, List, Literal, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, PositiveInt, model_validator

Number = Union[int, float, str]

COMMANDS = ("pentropy", "schedule", "scan", "tower", "oracle")


class _Descriptor(BaseModel):
    model_config = ConfigDict(extra="forbid")


class IETDescriptor(_Descriptor):
    type: Literal["iet"]
    lengths: List[Number] = Field(min_length=1)
    permutation: List[int] = Field(min_length=1)


class RotationDescriptor(_Descriptor):
    """alpha may be a float, a "p/q" string (exact) or "golden"."""

    type: Literal["rotation"]
    alpha: Number


class BernoulliDescriptor(_Descriptor):
    type: Literal["bernoulli"]
    probs: List[Number] = Field(min_length=2)


class StageDescriptor(_Descriptor):
    r: int = Field(ge=2)
    spacers: List[Annotated[int, Field(ge=0)]]

    @model_validator(mode="after")
    def _spacer_count(self) -> "StageDescriptor":
        if len(self.spacers) != self.r:
            raise ValueError(f"stage with r={self.r} needs {self.r} spacer counts")
        return self


class RankOneDescriptor(_Descriptor):
    type: Literal["rankone"]
    stages: List[StageDescriptor] = Field(min_length=1)


class RandomIETDescriptor(_Descriptor):
    type: Literal["random_iet"]
    d: PositiveInt
    seed: int = Field(default=0, ge=0)


SystemDescriptor = Annotated[
    Union[
        IETDescriptor,
        RotationDescriptor,
        BernoulliDescriptor,
        RankOneDescriptor,
        RandomIETDescriptor,
    ],
    Field(discriminator="type"),
]


class PartitionDescriptor(_Descriptor):
    """Exactly one of breakpoints, dyadic depth or cylinder depth."""

    breakpoints: Optional[List[Number]] = None
    dyadic: Optional[Annotated[int, Field(ge=0)]] = None
    cylinder: Optional[PositiveInt] = None

    @model_validator(mode="after")
    def _exactly_one(self) -> "PartitionDescriptor":
        given = [
            name
            for name in ("breakpoints", "dyadic", "cylinder")
            if getattr(self, name) is not None
        ]
        if len(given) != 1:
            raise ValueError(
                "partition needs exactly one of 'breakpoints', 'dyadic', 'cylinder'"
            )
        return self


class ScheduleRule(_Descriptor):
    """L(j) = slope * j + intercept, a constant length, or a table."""

    rule: Literal["linear", "constant", "table"] = "linear"
    slope: Annotated[int, Field(ge=0)] = 1
    intercept: int = 0
    length: Optional[PositiveInt] = None
    table: Dict[int, PositiveInt] = Field(default_factory=dict)

    @model_validator(mode="after")
    def _complete(self) -> "ScheduleRule":
        if self.rule == "constant" and self.length is None:
            raise ValueError("constant schedule needs 'length'")
        if self.rule == "table" and not self.table:
            raise ValueError("table schedule needs a non-empty 'table'")
        return self


class SetDescriptor(_Descriptor):
    """An interval set [[a, b], ...] or a cylinder word at a position."""

    intervals: Optional[List[Tuple[Number, Number]]] = None
    word: Optional[List[Annotated[int, Field(ge=0)]]] = None
    position: int = 0

    @model_validator(mode="after")
    def _exactly_one(self) -> "SetDescriptor":
        if (self.intervals is None) == (self.word is None):
            raise ValueError("test set needs exactly one of 'intervals' or 'word'")
        if self.word is not None and not self.word:
            raise ValueError("cylinder word cannot be empty")
        return self


class RangeDescriptor(_Descriptor):
    start: int
    stop: int
    step: PositiveInt = 1

    def values(self) -> List[int]:
        return list(range(self.start, self.stop + 1, self.step))


class Constants(_Descriptor):
    c: float = Field(default=0.5, gt=0, lt=1)
    kappa_threshold: float = Field(default=1e-6, ge=0)
    theta_r: float = Field(default=0.1, ge=0)
    size_cap: PositiveInt = 10**7
    L_cap: PositiveInt = 4096
    m_cap: PositiveInt = 1000
    agreement_k: float = Field(default=3.0, gt=0)


class ExperimentConfig(_Descriptor):
    """One experiment; which fields are required depends on the subcommand."""

    system: Optional[SystemDescriptor] = None
    family: List[SystemDescriptor] = Field(default_factory=list)
    partition: Optional[PartitionDescriptor] = None
    partitions: List[PartitionDescriptor] = Field(default_factory=list)
    schedule: ScheduleRule = Field(default_factory=ScheduleRule)
    j_set: Optional[List[PositiveInt]] = Field(default=None, min_length=1)
    m_range: Optional[Union[List[int], RangeDescriptor]] = None
    times: List[Tuple[int, int]] = Field(default_factory=list)
    test_sets: Optional[List[SetDescriptor]] = None
    test_pairs: Optional[List[Tuple[int, int]]] = None
    support: List[int] = Field(default_factory=lambda: [0])
    rigidity_j: Optional[List[PositiveInt]] = Field(default=None, min_length=1)
    tower_stages: Optional[List[PositiveInt]] = Field(default=None, min_length=1)
    constants: Constants = Field(default_factory=Constants)
    method: Optional[Literal["exact", "analytic", "montecarlo"]] = None
    samples: PositiveInt = 100_000
    seed: int = Field(default=0, ge=0, lt=2**64)
    workers: PositiveInt = 1
    output_dir: str = "results"
    log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"] = "WARNING"
    log_dir: Optional[str] = None

    def m_values(self) -> List[int]:
        if self.m_range is None:
            return []
        if isinstance(self.m_range, RangeDescriptor):
            return self.m_range.values()
        return list(self.m_range)

    def requirements(self, command: str) -> List[str]:
        """Fields a subcommand needs that this config lacks."""
        missing: List[str] = []
        if command == "pentropy":
            missing += self._need("system", "j_set")
            missing += self._partition_need()
        elif command == "schedule":
            if not self.family and self.system is None:
                missing.append("schedule needs 'family' (or 'system')")
            missing += self._need("j_set")
        elif command == "scan":
            missing += self._need("system")
            if not self.m_values():
                missing.append("scan needs a non-empty 'm_range'")
        elif command == "tower":
            if self.system is None or self.system.type != "rankone":
                missing.append("tower needs a 'rankone' system")
        elif command == "oracle":
            missing += self._need("system", "j_set")
            missing += self._partition_need()
        else:
            missing.append(f"unknown command {command!r}")
        return missing

    def _partition_need(self) -> List[str]:
        # Bernoulli shifts default to the generating partition
        if self.partition is None and (self.system is None or self.system.type != "bernoulli"):
            return ["missing required field 'partition'"]
        return []

    def _need(self, *names: str) -> List[str]:
        return [f"missing required field '{name}'" for name in names if getattr(self, name) is None]
