"""
Interval exchange engine: evaluation, inversion, composition and powers.

All operations are pure; they return new IntervalExchange objects. Exact
(Fraction) mode is used whenever both operands are exact.
"""

import bisect
import warnings
from fractions import Fraction
from typing import Optional

import numpy as np

from ..models.systems import IntervalExchange
from ..utils.arithmetic import (
    EXTENDED,
    Scalar,
    as_array,
    frac_part,
    merge_sorted,
    parse_number,
    to_extended,
    tolerance_for,
)
from ..utils.logging import get_logger

logger = get_logger("systems.iet")

_BELOW_ONE = np.nextafter(EXTENDED(1), EXTENDED(0))


class BreakpointDegeneracyWarning(UserWarning):
    """Two breakpoints coincided within tolerance and their cells were merged."""


def warn_degenerate(count: int, operation: str) -> None:
    """Emit the degeneracy warning through logging and warnings."""
    if count <= 0:
        return
    logger.warning(
        "Breakpoints coincided within tolerance; cells merged",
        extra={"operation": operation, "merged": count},
    )
    warnings.warn(
        f"{operation}: {count} breakpoint(s) coincided within tolerance and were merged",
        BreakpointDegeneracyWarning,
        stacklevel=3,
    )


def identity(exact: bool = True) -> IntervalExchange:
    one = Fraction(1) if exact else EXTENDED(1)
    return IntervalExchange((one,), (1,))


def rotation(alpha) -> IntervalExchange:
    """x -> x + alpha mod 1 as a 2-interval exchange."""
    a = frac_part(parse_number(alpha))
    if a == 0:
        return identity(isinstance(a, Fraction))
    return IntervalExchange((1 - a, a), (2, 1))


def random_iet(
    d: int, rng: np.random.Generator, irreducible: bool = True
) -> IntervalExchange:
    """Dirichlet lengths and a uniformly drawn (irreducible) permutation."""
    if d < 1:
        raise ValueError("An interval exchange needs d >= 1")
    lengths = rng.dirichlet(np.ones(d))
    lengths = [to_extended(v) for v in lengths]
    lengths[-1] = EXTENDED(1) - sum(lengths[:-1], EXTENDED(0))
    while True:
        permutation = tuple(int(p) + 1 for p in rng.permutation(d))
        if not irreducible or d == 1 or _is_irreducible(permutation):
            return IntervalExchange(tuple(lengths), permutation)


def _is_irreducible(permutation) -> bool:
    d = len(permutation)
    return all(set(permutation[:k]) != set(range(1, k + 1)) for k in range(1, d))


def from_cells(
    starts: np.ndarray, translations: np.ndarray, exact: bool
) -> IntervalExchange:
    """
    Build an exchange from sorted domain cell starts (first 0) and the
    translation on each cell; adjacent cells with equal translation merge.
    """
    tol = tolerance_for(exact)
    keep = np.ones(len(starts), dtype=bool)
    if len(starts) > 1:
        jumps = np.abs(translations[1:] - translations[:-1])
        keep[1:] = np.asarray(jumps > tol, dtype=bool)
    starts = starts[keep]
    translations = translations[keep]

    one = Fraction(1) if exact else EXTENDED(1)
    ends = np.append(starts[1:], np.array([one], dtype=starts.dtype))
    lengths = ends - starts
    image_starts = starts + translations
    order = np.argsort(image_starts, kind="stable")
    positions = np.empty(len(order), dtype=int)
    positions[order] = np.arange(1, len(order) + 1)
    return IntervalExchange(tuple(lengths), tuple(int(p) for p in positions))


def _check_point(x) -> None:
    if not 0 <= x < 1:
        raise ValueError(f"Point {x!r} lies outside [0, 1)")


def apply(system: IntervalExchange, x) -> Scalar:
    """Image of a single point."""
    _check_point(x)
    exact = system.exact and isinstance(x, (Fraction, int))
    if not exact:
        x = to_extended(x)
    i = bisect.bisect_right(system.starts, x) - 1
    offset = system.offsets[i] if exact else to_extended(system.offsets[i])
    y = x + offset
    if not exact:
        y = min(max(y, EXTENDED(0)), _BELOW_ONE)
    return y


def apply_many(system: IntervalExchange, points: np.ndarray) -> np.ndarray:
    """Vectorized image of an array of points in [0, 1)."""
    exact = system.exact and points.dtype == object
    starts = system.start_array if exact else as_array(system.starts, False)
    offsets = system.offset_array if exact else as_array(system.offsets, False)
    if not exact and points.dtype != EXTENDED:
        points = points.astype(EXTENDED)
    idx = np.searchsorted(starts, points, side="right") - 1
    out = points + offsets[idx]
    if not exact:
        out = np.clip(out, EXTENDED(0), _BELOW_ONE)
    return out


def discontinuities(system: IntervalExchange) -> np.ndarray:
    """Interior domain breakpoints."""
    return system.start_array[1:]


def invert(system: IntervalExchange) -> IntervalExchange:
    """The inverse exchange; combinatorial, so no rounding occurs."""
    d = system.d
    lengths = [None] * d
    permutation = [0] * d
    for i, position in enumerate(system.permutation):
        lengths[position - 1] = system.lengths[i]
        permutation[position - 1] = i + 1
    return IntervalExchange(tuple(lengths), tuple(permutation))


def compose(f: IntervalExchange, g: IntervalExchange) -> IntervalExchange:
    """f o g (apply g first)."""
    exact = f.exact and g.exact
    tol = tolerance_for(exact)

    g_starts = as_array(g.starts, exact)
    f_starts = as_array(f.starts, exact)
    # g^{-1}(0) is always a start of g
    pulled = apply_many(invert(g), f_starts[1:]) if f.d > 1 else f_starts[:0]
    cuts, merged = merge_sorted(np.concatenate([g_starts, pulled]), tol)
    warn_degenerate(merged, "compose")

    one = Fraction(1) if exact else EXTENDED(1)
    ends = np.append(cuts[1:], np.array([one], dtype=cuts.dtype))
    mids = (cuts + ends) / 2
    g_offsets = as_array(g.offsets, exact)
    f_offsets = as_array(f.offsets, exact)
    t_g = g_offsets[np.searchsorted(g_starts, mids, side="right") - 1]
    moved = mids + t_g
    t_f = f_offsets[np.searchsorted(f_starts, moved, side="right") - 1]

    result = from_cells(cuts, t_g + t_f, exact)
    logger.debug(
        "Composed exchanges",
        extra={"d_f": f.d, "d_g": g.d, "d_result": result.d},
    )
    return result


def power(system: IntervalExchange, m: int) -> IntervalExchange:
    """T^m by binary composition; negative m uses the inverse."""
    m = int(m)
    if m == 0:
        return identity(system.exact)
    if m < 0:
        return power(invert(system), -m)

    result: Optional[IntervalExchange] = None
    base = system
    while m:
        if m & 1:
            result = base if result is None else compose(base, result)
        m >>= 1
        if m:
            base = compose(base, base)
    return result


def is_close(a: IntervalExchange, b: IntervalExchange, tol: float = 1e-12) -> bool:
    """Same permutation and lengths within ``tol``."""
    if a.d != b.d or a.permutation != b.permutation:
        return False
    return all(
        abs(to_extended(x) - to_extended(y)) <= tol for x, y in zip(a.lengths, b.lengths)
    )
