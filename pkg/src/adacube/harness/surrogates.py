"""
Analytic stand-ins for a simulated robot: a planar three-link arm whose joint angles
are perturbed by the Gaussian input z; the outputs are the end-effector coordinates
and their squares.
"""

from typing import Callable, Dict

import numpy as np

LINKS = (1.0, 0.8, 0.6)
REST_ANGLES = (0.3, 0.5, -0.4)
ANGLE_SCALE = 0.25


def end_effector(z) -> np.ndarray:
    """(x, y) of the arm tip for joint perturbations z in R^3."""
    z = np.asarray(z, dtype=float).reshape(3)
    angles = np.cumsum(np.asarray(REST_ANGLES) + ANGLE_SCALE * z)
    links = np.asarray(LINKS)
    return np.array([np.sum(links * np.cos(angles)), np.sum(links * np.sin(angles))])


SURROGATES: Dict[str, Callable[[np.ndarray], float]] = {
    "z1": lambda z: float(end_effector(z)[0]),
    "z2": lambda z: float(end_effector(z)[1]),
    "z1_sq": lambda z: float(end_effector(z)[0] ** 2),
    "z2_sq": lambda z: float(end_effector(z)[1] ** 2),
}
