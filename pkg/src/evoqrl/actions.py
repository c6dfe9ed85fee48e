"""Masked greedy action selection shared by every agent type."""
from __future__ import annotations

import numpy as np


def normalize_values(values: np.ndarray) -> np.ndarray:
    """Min-max scale the last axis onto [0, 1]; a constant row maps to all ones."""
    v = np.asarray(values, dtype=np.float64)
    lo = v.min(axis=-1, keepdims=True)
    span = v.max(axis=-1, keepdims=True) - lo
    flat = span == 0.0
    scaled = (v - lo) / np.where(flat, 1.0, span)
    return np.where(flat, 1.0, scaled)


def select_actions(values, mask) -> np.ndarray:
    """Row-wise :func:`select_action` for a ``(batch, n_actions)`` block."""
    v = np.atleast_2d(np.asarray(values, dtype=np.float64))
    m = np.atleast_2d(np.asarray(mask, dtype=bool))
    if v.shape != m.shape:
        raise ValueError(f"values shape {v.shape} does not match mask shape {m.shape}")
    if v.shape[-1] == 0 or not m.any(axis=-1).all():
        raise ValueError("every row needs at least one legal action")
    scores = np.where(m, normalize_values(v) * m, -np.inf)
    # argmax returns the first maximum, so ties go to the lowest legal index
    return np.argmax(scores, axis=-1)


def select_action(values, mask) -> int:
    """Greedy action after min-max normalization and masking.

    Ties break toward the lowest index; if every legal normalized value is 0
    the lowest legal index wins. Raises ``ValueError`` for an all-false mask.
    """
    v = np.asarray(values, dtype=np.float64)
    m = np.asarray(mask, dtype=bool)
    if v.ndim != 1 or v.shape != m.shape:
        raise ValueError("values and mask must be 1-D sequences of equal length")
    return int(select_actions(v[None], m[None])[0])
