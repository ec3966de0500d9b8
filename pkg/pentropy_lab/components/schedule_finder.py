"""
Zero-entropy schedule finder.

For every j the finder picks, per family member S, the least L with
h_j(S, xi_i, j, L) < 1/j for every xi_i with i < j, and merges the members
by taking the largest such L. A member whose h_j stays at or above 1/j up
to the L cap is reported as a positive-P-entropy witness.
"""

from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..models.entropy import ProgressionSchedule
from ..models.partition import CylinderPartition, IntervalPartition
from ..models.systems import IntervalExchange, SymbolicShift
from ..utils.error_handling import LabError, ScheduleExhaustedError, ValidationError
from ..utils.logging import get_logger
from . import bernoulli
from .refiner import DEFAULT_SIZE_CAP, join_entropy_prefixes

logger = get_logger("entropy.schedule")

FamilyMember = Union[IntervalExchange, SymbolicShift]


class _Curves:
    """Cached h_j curves (L = 1..len) per (member, partition, j)."""

    def __init__(
        self,
        family: Sequence[FamilyMember],
        xi_list: Sequence[IntervalPartition],
        size_cap: int,
    ):
        self.family = family
        self.xi_list = xi_list
        self.size_cap = size_cap
        self._cache: Dict[Tuple[int, int, int], np.ndarray] = {}

    def curve(self, member: int, xi: int, j: int, length: int) -> np.ndarray:
        key = (member, xi, j)
        cached = self._cache.get(key)
        if cached is not None and len(cached) >= length:
            return cached[:length]
        system = self.family[member]
        Ls = np.arange(1, length + 1)
        if isinstance(system, SymbolicShift):
            # generating partition; analytic and constant in L
            H = bernoulli.join_entropy(system, j, length)
            values = np.full(length, H / length)
        else:
            values = join_entropy_prefixes(
                system, self.xi_list[xi], j, length, self.size_cap
            ) / Ls
        self._cache[key] = values
        return values

    def passing(self, member: int, j: int, length: int) -> np.ndarray:
        """Mask over L = 1..length where every xi_i (i < j) satisfies h < 1/j."""
        mask = np.ones(length, dtype=bool)
        for xi in range(min(j - 1, len(self.xi_list))):
            mask &= self.curve(member, xi, j, length) < 1.0 / j
        return mask


def _describe(system: FamilyMember) -> str:
    return system.describe()


def _check_family(
    family: Sequence[FamilyMember], xi_list: Sequence[IntervalPartition]
) -> None:
    errors = []
    if not family:
        errors.append("Schedule family must not be empty")
    if not xi_list:
        errors.append("Schedule needs at least one partition xi_1")
    for index, system in enumerate(family):
        if not isinstance(system, (IntervalExchange, SymbolicShift)):
            errors.append(
                f"Family member {index} ({type(system).__name__}) is not supported"
            )
    for index, xi in enumerate(xi_list):
        if isinstance(xi, CylinderPartition):
            errors.append(f"Partition {index + 1} must be an interval partition")
    if errors:
        raise ValidationError(errors)


def minimal_length(curves: _Curves, member: int, j: int, L_cap: int) -> int:
    """Least L <= L_cap meeting the bound for one member, by doubling."""
    if j == 1 or not curves.xi_list:
        return 1
    length = 1
    while True:
        length = min(length, L_cap)
        mask = curves.passing(member, j, length)
        hits = np.flatnonzero(mask)
        if hits.size:
            return int(hits[0]) + 1
        if length >= L_cap:
            break
        length *= 2

    system = curves.family[member]
    raise ScheduleExhaustedError(
        f"h_j of family member {member} stays >= 1/{j} up to L_cap={L_cap}; "
        f"{_describe(system)} witnesses positive P-entropy",
        witness_index=member,
        witness=_describe(system),
        j=j,
    )


def length_for_j(
    family: Sequence[FamilyMember],
    xi_list: Sequence[IntervalPartition],
    j: int,
    L_cap: int,
    size_cap: int = DEFAULT_SIZE_CAP,
    curves: Optional[_Curves] = None,
) -> int:
    """
    L(j): the largest per-member minimum, raised if needed until every
    member passes at the common length.
    """
    curves = curves or _Curves(family, xi_list, size_cap)
    per_member = [minimal_length(curves, k, j, L_cap) for k in range(len(family))]
    length = max(per_member)

    if j > 1 and not _all_pass(curves, j, length):
        length = _common_length(curves, j, length, L_cap, per_member)

    logger.debug("Schedule length found", extra={"j": j, "L": length, "members": per_member})
    return length


def _all_pass(curves: _Curves, j: int, length: int) -> bool:
    return all(
        bool(curves.passing(k, j, length)[length - 1]) for k in range(len(curves.family))
    )


def _common_length(
    curves: _Curves, j: int, start: int, L_cap: int, per_member: Sequence[int]
) -> int:
    """Least L >= start where every member passes at once."""
    hi = start
    while hi < L_cap:
        hi = min(2 * hi, L_cap)
        joint = np.ones(hi, dtype=bool)
        for k in range(len(curves.family)):
            joint &= curves.passing(k, j, hi)
        hits = np.flatnonzero(joint[start - 1 :])
        if hits.size:
            return start + int(hits[0])
    worst = int(np.argmax(per_member))
    raise ScheduleExhaustedError(
        f"No common L <= {L_cap} satisfies every family member at j={j}",
        witness_index=worst,
        witness=_describe(curves.family[worst]),
        j=j,
    )


def schedule_finder(
    family: Sequence[FamilyMember],
    xi_list: Sequence[IntervalPartition],
    j_range: Sequence[int],
    L_cap: int,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> ProgressionSchedule:
    """Tabulated schedule over ``j_range``; re-checked before it is returned."""
    _check_family(family, xi_list)
    if not j_range:
        raise ValidationError(["j_range must not be empty"])
    if L_cap < 1:
        raise ValidationError(["L_cap must be at least 1"])

    curves = _Curves(family, xi_list, size_cap)
    table = {
        int(j): length_for_j(family, xi_list, int(j), L_cap, size_cap, curves)
        for j in j_range
    }
    schedule = ProgressionSchedule.tabulated(table)

    failures = recheck(curves, schedule)
    if failures:
        raise LabError(
            "Schedule re-check failed", {"failures": [list(f) for f in failures[:10]]}
        )
    logger.info(
        "Schedule found",
        extra={"j_max": max(table), "L_max": max(table.values()), "members": len(family)},
    )
    return schedule


def recheck(curves: _Curves, schedule: ProgressionSchedule) -> List[Tuple[int, int, int]]:
    """(j, member, xi index) triples violating h_j < 1/j at the scheduled L."""
    failures = []
    for j, length in schedule.table.items():
        for member in range(len(curves.family)):
            for xi in range(min(j - 1, len(curves.xi_list))):
                if curves.curve(member, xi, j, length)[length - 1] >= 1.0 / j:
                    failures.append((j, member, xi + 1))
    return failures


def verify_schedule(
    family: Sequence[FamilyMember],
    xi_list: Sequence[IntervalPartition],
    schedule: ProgressionSchedule,
    size_cap: int = DEFAULT_SIZE_CAP,
) -> List[Tuple[int, int, int]]:
    """Independent re-check of a schedule against a family."""
    return recheck(_Curves(family, xi_list, size_cap), schedule)
