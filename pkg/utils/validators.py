import math
from typing import Iterable, List, Sequence

import numpy as np

from utils.errors import DuplicateLabelError, NonFiniteError, InputError

RESERVED_LABELS = ("omega", "beta")


def normalize_label(label) -> str:
    """Normalizes a symbol label (string, stripped)."""
    if label is None:
        return ""
    return str(label).strip()


def is_valid_label(label: str) -> bool:
    """Checks if a label can be used as a CSV column next to omega/beta."""
    if not label or len(label) > 255:
        return False
    if label.lower() in RESERVED_LABELS:
        return False
    # Commas/newlines would break the sweep CSV header
    return not any(c in label for c in ',\n\r"')


def validate_labels(labels: Iterable) -> List[str]:
    """Normalize labels and reject blanks, reserved names and duplicates."""
    cleaned = [normalize_label(label) for label in labels]
    for label in cleaned:
        if not is_valid_label(label):
            raise InputError(f"Invalid label: {label!r}")
    seen = set()
    for label in cleaned:
        if label in seen:
            raise DuplicateLabelError(f"Duplicate label: {label!r}")
        seen.add(label)
    return cleaned


def as_finite_array(values: Sequence, name: str) -> np.ndarray:
    """Convert to a float64 vector, rejecting NaN/inf entries."""
    try:
        arr = np.asarray([float(v) for v in values], dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise NonFiniteError(f"{name} must be numeric: {e}") from e
    if not np.all(np.isfinite(arr)):
        raise NonFiniteError(f"{name} contains non-finite entries")
    return arr


def ensure_finite_scalar(value, name: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError) as e:
        raise NonFiniteError(f"{name} must be a number") from e
    if not math.isfinite(value):
        raise NonFiniteError(f"{name} must be finite, got {value}")
    return value
