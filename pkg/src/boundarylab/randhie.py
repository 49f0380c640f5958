"""Loading, validation, and design construction for the RAND Health
Insurance Experiment rare-event illustration.

The data set is not bundled; callers supply a CSV whose header contains
at least the six base predictors and the poor-health outcome.  The
validator pins the published shape: 20,190 rows with 302 events.
"""

import csv
from pathlib import Path

import numpy as np

from .errors import DataValidationError

__all__ = ["BASE_COLUMNS", "OUTCOME_COLUMN", "EXPECTED_ROWS",
           "EXPECTED_EVENTS", "load_data", "validate_data",
           "standardize", "quadratic_design"]

BASE_COLUMNS = ("lncoins", "idp", "lpi", "fmde", "physlm", "disea")
OUTCOME_COLUMN = "hlthp"
EXPECTED_ROWS = 20_190
EXPECTED_EVENTS = 302


def load_data(path) -> tuple[np.ndarray, np.ndarray]:
    """Read the base covariates and outcome from a header CSV.

    Extra columns are ignored.  Returns ``(X, y)`` with X of shape
    (rows, 6) in BASE_COLUMNS order.
    """
    path = Path(path)
    if not path.exists():
        raise DataValidationError(f"data file not found: {path}")
    needed = BASE_COLUMNS + (OUTCOME_COLUMN,)
    rows_x, rows_y = [], []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in needed if c not in header]
        if missing:
            raise DataValidationError(
                f"missing columns {missing}; expected a header CSV with at "
                f"least {list(needed)}")
        for line_no, record in enumerate(reader, start=2):
            try:
                rows_x.append([float(record[c]) for c in BASE_COLUMNS])
                outcome = float(record[OUTCOME_COLUMN])
            except (TypeError, ValueError) as exc:
                raise DataValidationError(
                    f"non-numeric value on line {line_no}: {exc}") from None
            if outcome not in (0.0, 1.0):
                raise DataValidationError(
                    f"{OUTCOME_COLUMN} must be 0/1, got {outcome} on "
                    f"line {line_no}")
            rows_y.append(outcome)
    if not rows_y:
        raise DataValidationError("data file contains no rows")
    return np.asarray(rows_x), np.asarray(rows_y)


def validate_data(path) -> dict:
    """Load and check the published row/event counts; returns a summary."""
    X, y = load_data(path)
    rows = X.shape[0]
    events = int(y.sum())
    if rows != EXPECTED_ROWS:
        raise DataValidationError(
            f"expected {EXPECTED_ROWS} rows, found {rows}")
    if events != EXPECTED_EVENTS:
        raise DataValidationError(
            f"expected {EXPECTED_EVENTS} events, found {events}")
    return {
        "rows": rows,
        "events": events,
        "prevalence": events / rows,
        "columns": list(BASE_COLUMNS) + [OUTCOME_COLUMN],
    }


def standardize(X: np.ndarray) -> np.ndarray:
    """Center and scale each column on the full data before subsampling."""
    means = X.mean(axis=0)
    sds = X.std(axis=0)
    degenerate = np.nonzero(sds == 0.0)[0]
    if degenerate.size:
        raise DataValidationError(
            f"zero-variance column(s) at positions {degenerate.tolist()}; "
            "cannot standardize")
    return (X - means) / sds


def quadratic_design(Xs: np.ndarray) -> np.ndarray:
    """Standardized base columns plus squares and pairwise products.

    For six base columns this yields 6 + 6 + 15 = 27 predictors, ordered
    as bases, squares, then products with i < j lexicographic.
    """
    d = Xs.shape[1]
    blocks = [Xs, Xs ** 2]
    for i in range(d):
        for j in range(i + 1, d):
            blocks.append((Xs[:, i] * Xs[:, j])[:, None])
    return np.hstack(blocks)
