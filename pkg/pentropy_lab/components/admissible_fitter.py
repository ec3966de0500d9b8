"""
Admissible-model fitting.

Finds nonnegative weights (a, a_i) summing to one that minimize the largest
deviation between observed correlations at time m and the model prediction
a mu(A)mu(B) + sum_i a_i mu(T^i A & B). The problem is a small linear
program in epigraph form, solved with HiGHS; ties are broken toward the
lexicographically smallest weight vector.
"""

from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import linprog

from ..models.limits import AdmissibleModel, FitResult, KappaRow
from ..utils.error_handling import LabError, ValidationError
from ..utils.logging import get_logger
from .correlation_engine import System, TestPair, correlation, set_measure

logger = get_logger("limits")

SOLVER_TOLERANCE = 1e-9
_HIGHS_OPTIONS = {
    "primal_feasibility_tolerance": 1e-10,
    "dual_feasibility_tolerance": 1e-10,
}


def _solve(
    cost: np.ndarray,
    A_ub: np.ndarray,
    b_ub: np.ndarray,
    A_eq: np.ndarray,
    b_eq: np.ndarray,
    bounds: List[Tuple[float, Optional[float]]],
) -> np.ndarray:
    result = linprog(
        cost,
        A_ub=A_ub,
        b_ub=b_ub,
        A_eq=A_eq,
        b_eq=b_eq,
        bounds=bounds,
        method="highs",
        options=_HIGHS_OPTIONS,
    )
    if result.status != 0:
        raise LabError(f"Admissible fit failed: {result.message}", {"status": result.status})
    return result.x


def _polish(
    observed: np.ndarray, features: np.ndarray, weights: np.ndarray
) -> np.ndarray:
    """Least-squares refit on the active weights; kept only if it is no worse."""
    active = weights > SOLVER_TOLERANCE
    if not active.any():
        return weights
    system = np.vstack([features[:, active], np.ones((1, int(active.sum())))])
    # a rank-deficient refit would not respect the tie-break
    if np.linalg.matrix_rank(system) < system.shape[1]:
        return weights
    target = np.append(observed, 1.0)
    refined, *_ = np.linalg.lstsq(system, target, rcond=None)
    if np.any(refined < -SOLVER_TOLERANCE):
        return weights
    candidate = np.zeros_like(weights)
    candidate[active] = np.clip(refined, 0.0, None)
    candidate /= candidate.sum()
    old = np.max(np.abs(observed - features @ weights))
    new = np.max(np.abs(observed - features @ candidate))
    return candidate if new <= old else weights


def fit_admissible_values(
    observed: Sequence[float],
    features: np.ndarray,
    support: Sequence[int],
    m: int = 0,
) -> FitResult:
    """
    Fit given data directly. ``features`` has one row per test pair and
    columns (mu(A)mu(B), mu(T^i A & B) for i in support).
    """
    observed = np.asarray(observed, dtype=float)
    features = np.asarray(features, dtype=float)
    support = tuple(sorted(set(int(i) for i in support)))
    P, K = features.shape
    if P == 0:
        raise ValidationError(["Admissible fit needs at least one test pair"])
    if K != len(support) + 1 or observed.shape != (P,):
        raise ValidationError(["Feature matrix does not match observations and support"])

    # variables: K weights then the epigraph bound t
    ones = np.ones((P, 1))
    A_ub = np.vstack([np.hstack([features, -ones]), np.hstack([-features, -ones])])
    b_ub = np.concatenate([observed, -observed])
    A_eq = np.append(np.ones(K), 0.0).reshape(1, -1)
    b_eq = np.array([1.0])
    bounds: List[Tuple[float, Optional[float]]] = [(0.0, None)] * (K + 1)

    cost = np.zeros(K + 1)
    cost[-1] = 1.0
    x = _solve(cost, A_ub, b_ub, A_eq, b_eq, bounds)
    t_star = float(x[-1])

    # lexicographic tie-break among optimal weight vectors
    bounds[-1] = (0.0, t_star + SOLVER_TOLERANCE)
    for k in range(K):
        cost = np.zeros(K + 1)
        cost[k] = 1.0
        x = _solve(cost, A_ub, b_ub, A_eq, b_eq, bounds)
        value = max(float(x[k]), 0.0)
        bounds[k] = (max(value - SOLVER_TOLERANCE, 0.0), value + SOLVER_TOLERANCE)

    weights = np.clip(x[:K], 0.0, None)
    weights /= weights.sum()
    weights = _polish(observed, features, weights)
    residual = float(np.max(np.abs(observed - features @ weights)))

    degenerate = K > 1 and bool(
        np.all(np.abs(features - features[:, :1]) <= SOLVER_TOLERANCE)
    )
    if degenerate:
        logger.warning(
            "Degenerate test family: every model column predicts the same values",
            extra={"m": m, "support": list(support)},
        )

    model = AdmissibleModel(
        a=float(weights[0]),
        coefficients={i: float(w) for i, w in zip(support, weights[1:])},
    )
    return FitResult(model=model, residual=residual, m=m, degenerate=degenerate)


def feature_matrix(
    system: System, support: Sequence[int], test_pairs: Sequence[TestPair]
) -> np.ndarray:
    """Model columns for each pair: product of measures, then correlations at i."""
    support = sorted(set(int(i) for i in support))
    rows = []
    for A, B in test_pairs:
        product = set_measure(system, A) * set_measure(system, B)
        rows.append([product] + [correlation(system, A, B, i) for i in support])
    return np.array(rows, dtype=float).reshape(len(test_pairs), len(support) + 1)


def fit_admissible(
    system: System,
    m: int,
    support: Sequence[int],
    test_pairs: Sequence[TestPair],
    features: Optional[np.ndarray] = None,
) -> FitResult:
    """Best admissible model explaining the time-m correlations."""
    if not test_pairs:
        raise ValidationError(["Admissible fit needs at least one test pair"])
    if features is None:
        features = feature_matrix(system, support, test_pairs)
    observed = [correlation(system, A, B, m) for A, B in test_pairs]
    return fit_admissible_values(observed, features, support, m)


def kappa_scan(
    system: System,
    m_range: Iterable[int],
    test_pairs: Sequence[TestPair],
    threshold: float,
) -> List[KappaRow]:
    """Times whose support-{0} fit has residual <= threshold, with kappa = a."""
    m_values = list(m_range)
    if not m_values:
        raise ValidationError(["m_range must not be empty"])
    features = feature_matrix(system, (0,), test_pairs)
    rows = []
    for m in m_values:
        fit = fit_admissible(system, m, (0,), test_pairs, features)
        if fit.residual <= threshold:
            rows.append(KappaRow(m=m, kappa=fit.kappa, residual=fit.residual))
    logger.info(
        "Kappa scan finished",
        extra={"times": len(m_values), "rows": len(rows), "threshold": threshold},
    )
    return rows
