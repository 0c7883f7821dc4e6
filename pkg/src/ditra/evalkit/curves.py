# evalkit/curves.py
import logging
from typing import Sequence

import numpy as np

from ditra.errors import DomainError

# 0.00, 0.05, ..., 1.00 and 0, 1, ..., 50 px
SUCCESS_THRESHOLDS = np.arange(21) / 20
PRECISION_THRESHOLDS = np.arange(51, dtype=np.float64)
PRECISION_AT = 20


def success_curve(ious: Sequence[float]) -> np.ndarray:
    """Fraction of frames whose IoU is strictly above each threshold."""
    ious = np.asarray(ious, dtype=np.float64)
    if ious.size == 0:
        logging.warning("Empty IoU trace, success curve is all zeros")
        return np.zeros(SUCCESS_THRESHOLDS.size)
    if np.any(~np.isfinite(ious)) or np.any(ious < 0) or np.any(ious > 1):
        error_msg = "IoU values must lie in [0, 1]"
        logging.error(error_msg)
        raise DomainError(error_msg)
    return (ious[None, :] > SUCCESS_THRESHOLDS[:, None]).mean(axis=1)


def precision_curve(errors: Sequence[float]) -> np.ndarray:
    """Fraction of frames whose centre error is at most each threshold; inf counts as a miss."""
    errors = np.asarray(errors, dtype=np.float64)
    if errors.size == 0:
        logging.warning("Empty centre-error trace, precision curve is all zeros")
        return np.zeros(PRECISION_THRESHOLDS.size)
    if np.any(np.isnan(errors)) or np.any(errors < 0):
        error_msg = "Centre errors must be non-negative"
        logging.error(error_msg)
        raise DomainError(error_msg)
    return (errors[None, :] <= PRECISION_THRESHOLDS[:, None]).mean(axis=1)


def auc(curve: Sequence[float]) -> float:
    return float(np.mean(curve))


def precision_at(curve: Sequence[float], threshold: int = PRECISION_AT) -> float:
    return float(curve[threshold])
