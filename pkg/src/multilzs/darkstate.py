"""Dark state of a qubit coupled to two degenerate TLSs.

Basis: |1 g g>, |0 e g>, |0 g e>. Both TLS excitations sit at zero energy;
``omega`` is the qubit detuning from them.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class DarkSystem:
    omega: float
    omega1: float
    omega2: float

    def __post_init__(self):
        for name in ("omega", "omega1", "omega2"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega1 == 0.0 and self.omega2 == 0.0:
            raise ValueError("at least one coupling must be non-zero")


def hd_matrix(omega: float, omega1: float, omega2: float) -> np.ndarray:
    """The three-level matrix for any couplings, zero included."""
    h = np.zeros((3, 3))
    h[0, 0] = omega
    h[0, 1] = h[1, 0] = 0.5 * omega1
    h[0, 2] = h[2, 0] = 0.5 * omega2
    return h


def build_hd(sys: DarkSystem) -> np.ndarray:
    return hd_matrix(sys.omega, sys.omega1, sys.omega2)


def dark_state(sys: DarkSystem) -> np.ndarray:
    """``(0, omega2, -omega1) / norm``, sign fixed so the second entry is >= 0."""
    norm = math.hypot(sys.omega1, sys.omega2)
    v = np.array([0.0, sys.omega2, -sys.omega1]) / norm
    if v[1] < 0.0:
        v = -v
    # -0.0 would print as a signed zero
    return v + 0.0


@dataclass(frozen=True)
class DarkSpectrum:
    omega_axis: np.ndarray
    levels: np.ndarray  # (sample, 3), ascending
    dark_index: np.ndarray  # column of the flat branch per sample


def spectrum_vs_detuning(omega1: float, omega2: float, omega_axis) -> DarkSpectrum:
    """Eigenvalues of the three-level problem along a detuning sweep.

    The dark level is exactly zero for every detuning. The two bright levels
    are the roots of ``x**2 - omega x - (omega1**2 + omega2**2) / 4``; they
    are computed in closed form so the flat branch stays at 0.0 exactly
    instead of at eigensolver round-off.
    """
    w = np.asarray(omega_axis, dtype=float)
    if w.ndim != 1 or w.size < 1:
        raise ValueError("omega_axis must be a non-empty 1-D array")
    steps = np.diff(w)
    if not (np.all(steps > 0) or np.all(steps < 0)):
        raise ValueError("omega_axis must be strictly monotone")
    DarkSystem(0.0, omega1, omega2)
    g2 = 0.25 * (omega1**2 + omega2**2)
    root = np.sqrt(0.25 * w**2 + g2)
    lower = 0.5 * w - root
    upper = 0.5 * w + root
    levels = np.column_stack([lower, np.zeros_like(w), upper])
    return DarkSpectrum(w, levels, np.ones(w.size, dtype=int))
