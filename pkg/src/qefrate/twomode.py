"""Built-in two-mode oscillator example.

Four system variables (two position-momentum pairs) driven by six field
channels, with a dense drift and a positive definite cost weight.  The
commutation matrix is recovered from the realizability identity and comes
out as half the paired-block antisymmetric structure, as expected for two
canonical pairs.  The matrices are stored to the four decimals they are
defined with, so derived residual tolerances account for that truncation.
"""

from __future__ import annotations

import numpy as np

from .model import StateSpace, from_state_space

__all__ = ["TWO_MODE_A", "TWO_MODE_B", "TWO_MODE_WEIGHT", "two_mode_example"]

TWO_MODE_A = np.array([
    [-5.8100, -1.6357,  0.2062, -3.1331],
    [ 4.0006,  0.1377,  5.3578, -0.5514],
    [ 1.1223, -3.0351, -5.7830,  4.4308],
    [ 2.7957, -0.8671, -2.2443, -0.0737],
])

TWO_MODE_B = np.array([
    [-0.4698,  0.5026,  1.9107, -1.0020,  1.8676, -1.0523],
    [ 0.8036, -0.0727, -1.9520,  2.4997, -1.2066, -0.7074],
    [-0.1061, -0.1776,  0.9175, -0.3621, -0.2116,  2.3771],
    [-2.2158, -1.3753, -1.2109, -0.8576,  0.3423,  1.1991],
])

TWO_MODE_WEIGHT = np.array([
    [ 3.2123,  3.5111,  1.3912, -1.8097],
    [ 3.5111, 10.6258,  3.7561, -3.7850],
    [ 1.3912,  3.7561,  3.3244, -0.5456],
    [-1.8097, -3.7850, -0.5456,  1.9349],
])


def two_mode_example() -> StateSpace:
    """Validated state space of the embedded two-mode model."""
    return from_state_space(TWO_MODE_A, TWO_MODE_B, TWO_MODE_WEIGHT)
