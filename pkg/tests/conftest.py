"""Shared test helpers: dense materialization of linear maps."""

import numpy as np
import pytest


def materialize_forward(op):
    """Dense matrix of op.forward by probing with basis vectors."""
    n = int(np.prod(op.in_shape))
    cols = []
    for i in range(n):
        e = np.zeros(n)
        e[i] = 1.0
        cols.append(np.ravel(op.forward(e.reshape(op.in_shape))))
    return np.stack(cols, axis=1)


def materialize_composed(base, frame):
    """Dense matrix of image-operator `base` applied after frame synthesis."""
    d = frame.coefficient_length
    cols = []
    for i in range(d):
        e = np.zeros(d)
        e[i] = 1.0
        cols.append(np.ravel(base.forward(frame.synthesis(e))))
    return np.stack(cols, axis=1)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
