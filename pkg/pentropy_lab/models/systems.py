"""
Measure-preserving system models: interval exchanges, Bernoulli shifts,
rank-one recipes and towers, and interval sets of [0, 1).
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, List, Sequence, Tuple

import numpy as np

from ..utils.arithmetic import (
    EXTENDED,
    TOLERANCE,
    Scalar,
    all_exact,
    as_array,
    coerce,
    to_extended,
    tolerance_for,
)


@dataclass(frozen=True)
class IntervalExchange:
    """
    A piecewise translation of [0, 1).

    ``lengths[i]`` is the length of the i-th domain block (left to right);
    ``permutation[i]`` is the 1-based position of that block in the image.
    Rotations are the d = 2 case with permutation (2, 1).
    """

    lengths: Tuple[Scalar, ...]
    permutation: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lengths", coerce(self.lengths))
        object.__setattr__(self, "permutation", tuple(int(p) for p in self.permutation))
        self.validate()

    def validate(self) -> bool:
        """Validate lengths, permutation and the image tiling."""
        d = len(self.lengths)
        if d == 0:
            raise ValueError("Interval exchange needs at least one subinterval")

        if len(self.permutation) != d:
            raise ValueError(
                f"Permutation has {len(self.permutation)} entries for {d} subintervals"
            )

        if any(length <= 0 for length in self.lengths):
            raise ValueError("All subinterval lengths must be strictly positive")

        total = sum(self.lengths)
        if self.exact:
            if total != 1:
                raise ValueError(f"Subinterval lengths sum to {total}, not 1")
        elif abs(total - 1) > TOLERANCE:
            raise ValueError(f"Subinterval lengths sum to {float(total)!r}, not 1")

        if sorted(self.permutation) != list(range(1, d + 1)):
            raise ValueError(f"Permutation {self.permutation} is not a bijection of 1..{d}")

        # image blocks, sorted by position, must tile [0, 1)
        tol = tolerance_for(self.exact)
        ends = sorted(
            (s + length, s)
            for s, length in zip(self.image_starts, self.lengths)
        )
        cursor = 0
        for end, start in ends:
            if abs(start - cursor) > tol:
                raise ValueError("Image subintervals do not tile [0, 1)")
            cursor = end
        if abs(cursor - 1) > tol:
            raise ValueError("Image subintervals do not cover [0, 1)")

        return True

    @cached_property
    def exact(self) -> bool:
        return all_exact(self.lengths)

    @property
    def d(self) -> int:
        return len(self.lengths)

    @cached_property
    def starts(self) -> Tuple[Scalar, ...]:
        """Left endpoints of the domain blocks."""
        out: List[Scalar] = []
        cursor = self.lengths[0] * 0
        for length in self.lengths:
            out.append(cursor)
            cursor = cursor + length
        return tuple(out)

    @cached_property
    def image_starts(self) -> Tuple[Scalar, ...]:
        """Left endpoint of the image of each domain block."""
        by_position = sorted(range(self.d), key=lambda i: self.permutation[i])
        out: List[Scalar] = [self.lengths[0] * 0] * self.d
        cursor = self.lengths[0] * 0
        for i in by_position:
            out[i] = cursor
            cursor = cursor + self.lengths[i]
        return tuple(out)

    @cached_property
    def offsets(self) -> Tuple[Scalar, ...]:
        """Translation applied on each domain block."""
        return tuple(t - s for s, t in zip(self.starts, self.image_starts))

    @cached_property
    def start_array(self) -> np.ndarray:
        return as_array(self.starts, self.exact)

    @cached_property
    def offset_array(self) -> np.ndarray:
        return as_array(self.offsets, self.exact)

    @property
    def is_identity(self) -> bool:
        return self.d == 1

    def describe(self) -> str:
        lengths = ", ".join(f"{float(v):.6g}" for v in self.lengths)
        return f"IET(d={self.d}, lengths=[{lengths}], permutation={list(self.permutation)})"


@dataclass(frozen=True)
class SymbolicShift:
    """Bernoulli shift on k symbols with product measure."""

    probabilities: Tuple[Scalar, ...]

    def __post_init__(self):
        object.__setattr__(self, "probabilities", tuple(self.probabilities))
        self.validate()

    @property
    def alphabet_size(self) -> int:
        return len(self.probabilities)

    def validate(self) -> bool:
        if self.alphabet_size < 2:
            raise ValueError("Bernoulli shift needs an alphabet of at least 2 symbols")
        if any(p <= 0 for p in self.probabilities):
            raise ValueError("Symbol probabilities must be strictly positive")
        if abs(float(sum(self.probabilities)) - 1.0) > TOLERANCE:
            raise ValueError("Symbol probabilities must sum to 1")
        return True

    def describe(self) -> str:
        probs = ", ".join(f"{float(p):.6g}" for p in self.probabilities)
        return f"Bernoulli([{probs}])"


@dataclass(frozen=True)
class Cylinder:
    """The set {x : x[position + t] = word[t] for all t}."""

    word: Tuple[int, ...]
    position: int = 0

    def __post_init__(self):
        object.__setattr__(self, "word", tuple(int(s) for s in self.word))
        if not self.word:
            raise ValueError("Cylinder word cannot be empty")

    def shifted(self, m: int) -> "Cylinder":
        """The image T^m C under the left shift."""
        return Cylinder(self.word, self.position - m)

    def coordinates(self) -> Iterable[Tuple[int, int]]:
        for t, symbol in enumerate(self.word):
            yield self.position + t, symbol


@dataclass(frozen=True)
class RankOneStage:
    """One cutting-and-stacking step: r columns, spacers above each column."""

    cuts: int
    spacers: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "spacers", tuple(self.spacers))

    def validate(self) -> bool:
        if not isinstance(self.cuts, int) or self.cuts < 2:
            raise ValueError(f"Cut count must be an integer >= 2, got {self.cuts!r}")
        if len(self.spacers) != self.cuts:
            raise ValueError(
                f"Stage with {self.cuts} cuts needs {self.cuts} spacer counts, "
                f"got {len(self.spacers)}"
            )
        for s in self.spacers:
            if not isinstance(s, int) or s < 0:
                raise ValueError(f"Spacer counts must be nonnegative integers, got {s!r}")
        return True

    @property
    def spacer_total(self) -> int:
        return sum(self.spacers)


@dataclass(frozen=True)
class RankOneRecipe:
    """Cut and spacer counts per stage of a rank-one construction."""

    stages: Tuple[RankOneStage, ...]

    def __post_init__(self):
        object.__setattr__(self, "stages", tuple(self.stages))

    def validate(self) -> bool:
        if not self.stages:
            raise ValueError("Rank-one recipe needs at least one stage")
        for index, stage in enumerate(self.stages, start=1):
            try:
                stage.validate()
            except ValueError as e:
                raise ValueError(f"Stage {index}: {e}") from e
        return True

    @classmethod
    def uniform(cls, cuts: int, spacers: Sequence[int], count: int) -> "RankOneRecipe":
        return cls(tuple(RankOneStage(cuts, tuple(spacers)) for _ in range(count)))

    @classmethod
    def chacon(cls, count: int) -> "RankOneRecipe":
        return cls.uniform(3, (0, 1, 0), count)

    @property
    def final_stage(self) -> int:
        return len(self.stages) + 1

    def heights(self, n: int) -> List[int]:
        """h_1..h_n from h_1 = 1 and h_{k+1} = r_k h_k + sum_i s_{k,i}."""
        heights = [1]
        for stage in self.stages[: n - 1]:
            heights.append(stage.cuts * heights[-1] + stage.spacer_total)
        return heights

    def describe(self) -> str:
        return f"RankOne({len(self.stages)} stages)"


@dataclass(frozen=True)
class Tower:
    """
    Stage-n tower of a rank-one construction.

    ``levels`` lists the h_n level intervals bottom to top; the tower map
    translates level i onto level i + 1 and is undefined on the top level.
    """

    stage: int
    height: int
    level_width: Fraction
    levels: Tuple[Tuple[Fraction, Fraction], ...]
    residual_mass: Fraction
    recipe: RankOneRecipe = field(repr=False, compare=False)

    def validate(self) -> bool:
        if self.height != len(self.levels):
            raise ValueError("Tower height does not match its level count")
        if self.height * self.level_width > 1:
            raise ValueError("Tower mass exceeds 1")
        for a, b in self.levels:
            if b - a != self.level_width:
                raise ValueError("Tower levels must have equal width")
            if a < 0 or b > 1:
                raise ValueError("Tower levels must lie in [0, 1)")
        if self.residual_mass != 1 - self.height * self.level_width:
            raise ValueError("Residual mass inconsistent with tower mass")
        return True

    @property
    def mass(self) -> Fraction:
        return self.height * self.level_width

    @cached_property
    def sorted_levels(self) -> Tuple[np.ndarray, np.ndarray]:
        """Level start points in increasing order and the level index of each."""
        starts = np.array([a for a, _ in self.levels], dtype=object)
        order = np.argsort(starts, kind="stable")
        return starts[order], order

    @property
    def exact(self) -> bool:
        return True

    def describe(self) -> str:
        return f"Tower(stage={self.stage}, height={self.height})"


@dataclass(frozen=True)
class MeasurableSet:
    """A finite union of disjoint half-open subintervals of [0, 1)."""

    intervals: Tuple[Tuple[Scalar, Scalar], ...]

    def __post_init__(self):
        flat = coerce([v for iv in self.intervals for v in iv])
        object.__setattr__(
            self, "intervals", tuple(zip(flat[0::2], flat[1::2]))
        )
        self.validate()

    def validate(self) -> bool:
        previous_end = None
        for a, b in self.intervals:
            if not (0 <= a < b <= 1):
                raise ValueError(
                    f"Interval [{float(a)}, {float(b)}) is not a nonempty subinterval of [0, 1)"
                )
            if previous_end is not None and a < previous_end:
                raise ValueError("Intervals must be sorted and pairwise disjoint")
            previous_end = b
        return True

    @classmethod
    def from_intervals(
        cls, intervals: Iterable[Tuple[Scalar, Scalar]], tol: float = 0
    ) -> "MeasurableSet":
        """Normalize: drop empty pieces, sort, merge overlapping or touching."""
        raw = [tuple(iv) for iv in intervals]
        flat = coerce([v for iv in raw for v in iv])
        pieces = sorted(
            (a, b) for a, b in zip(flat[0::2], flat[1::2]) if b - a > tol
        )
        merged: List[List[Scalar]] = []
        for a, b in pieces:
            if merged and a - merged[-1][1] <= tol:
                if b > merged[-1][1]:
                    merged[-1][1] = b
            else:
                merged.append([a, b])
        return cls(tuple((a, b) for a, b in merged))

    @classmethod
    def interval(cls, a, b) -> "MeasurableSet":
        return cls(((a, b),))

    @classmethod
    def empty(cls) -> "MeasurableSet":
        return cls(())

    @classmethod
    def full(cls) -> "MeasurableSet":
        return cls(((0, 1),))

    @property
    def exact(self) -> bool:
        return all(all_exact(iv) for iv in self.intervals)

    @property
    def measure(self) -> Scalar:
        total = Fraction(0) if self.exact else EXTENDED(0)
        for a, b in self.intervals:
            total = total + (b - a)
        return total

    def in_mode(self, exact: bool) -> "MeasurableSet":
        """The same set with endpoints in the requested number mode."""
        if exact == self.exact:
            return self
        if exact:
            raise ValueError("Cannot convert extended-precision endpoints to exact mode")
        return MeasurableSet(
            tuple((to_extended(a), to_extended(b)) for a, b in self.intervals)
        )

    def contains(self, x) -> bool:
        return any(a <= x < b for a, b in self.intervals)

    def describe(self) -> str:
        parts = " u ".join(f"[{float(a):.6g},{float(b):.6g})" for a, b in self.intervals)
        return parts or "empty"
