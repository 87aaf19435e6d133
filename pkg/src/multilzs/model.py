"""System description and triangle-pulse geometry shared by both engines.

Energies are angular frequencies in rad/ns with hbar = 1, times are in ns.
The qubit diabatic energy is ``slope * drive_value(t)``; the drive starts and
ends at zero detuning, below the lowest TLS.

Diabatic basis ordering used everywhere: index 0 is the qubit-excited state
``|1 g...g>``, index ``i`` (1-based) is the state with TLS ``i`` excited.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

TWO_PI = 2.0 * np.pi

#: relative tolerance below which an anticrossing at the pulse peak counts as
#: not traversed
TURNING_POINT_RTOL = 1e-9


def mhz_to_rad_per_ns(f_mhz):
    """Linear frequency in MHz to angular frequency in rad/ns."""
    return TWO_PI * 1e-3 * np.asarray(f_mhz, dtype=float)


def rad_per_ns_to_mhz(w):
    return np.asarray(w, dtype=float) / (TWO_PI * 1e-3)


class NotTraversedError(ValueError):
    """The pulse never reaches the requested anticrossing."""


@dataclass(frozen=True)
class SystemSpec:
    """Qubit coupled to ``N`` two-level systems.

    Parameters
    ----------
    epsilon : sequence of float
        TLS energies in rad/ns, strictly increasing and positive.
    delta : sequence of float
        Qubit-TLS couplings in rad/ns (half the anticrossing gap).
    slope : float
        Scale from drive units to qubit detuning.
    """

    epsilon: tuple
    delta: tuple
    slope: float = 1.0

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilon)
        dlt = tuple(float(d) for d in self.delta)
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "delta", dlt)
        object.__setattr__(self, "slope", float(self.slope))
        if len(eps) < 1:
            raise ValueError("at least one TLS is required")
        if len(eps) != len(dlt):
            raise ValueError(f"{len(eps)} TLS energies but {len(dlt)} couplings")
        if not all(np.isfinite(eps)) or not all(np.isfinite(dlt)):
            raise ValueError("TLS energies and couplings must be finite")
        if eps[0] <= 0.0:
            raise ValueError("TLS energies must be positive (drive baseline is 0)")
        if any(b <= a for a, b in zip(eps, eps[1:])):
            raise ValueError("TLS energies must be strictly increasing")
        if any(d < 0.0 for d in dlt):
            raise ValueError("couplings must be non-negative")
        if not (np.isfinite(self.slope) and self.slope > 0.0):
            raise ValueError("slope must be positive and finite")

    @property
    def n_tls(self) -> int:
        return len(self.epsilon)

    @classmethod
    def from_mhz(cls, epsilon_mhz, delta_mhz, slope=1.0):
        return cls(
            tuple(mhz_to_rad_per_ns(epsilon_mhz)),
            tuple(mhz_to_rad_per_ns(delta_mhz)),
            slope,
        )


@dataclass(frozen=True)
class TrianglePulse:
    """Symmetric triangle: 0 at t=0 and t=width, ``amplitude`` at width/2."""

    amplitude: float
    width: float

    def __post_init__(self):
        if not (np.isfinite(self.amplitude) and self.amplitude > 0.0):
            raise ValueError(f"amplitude must be positive, got {self.amplitude}")
        if not (np.isfinite(self.width) and self.width > 0.0):
            raise ValueError(f"width must be positive, got {self.width}")


@dataclass(frozen=True)
class PathDescriptor:
    """One interference path.

    ``index`` i <= N reflects at anticrossing i; ``index`` N+1 follows the
    qubit line throughout. ``phase`` is such that the path contributes
    ``amplitude**2 * exp(-1j * phase)`` to the return amplitude.
    """

    index: int
    amplitude: float
    phase: float

    def __post_init__(self):
        if not (-1e-12 <= self.amplitude <= 1.0 + 1e-12):
            raise ValueError(f"path amplitude {self.amplitude} outside [0, 1]")


@dataclass
class PatternGrid:
    """Return probabilities on a (amplitude, width) grid.

    ``values[i, j]`` belongs to ``a_axis[i]`` and ``t_axis[j]``.
    """

    values: np.ndarray
    t_axis: np.ndarray
    a_axis: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.t_axis = np.asarray(self.t_axis, dtype=float)
        self.a_axis = np.asarray(self.a_axis, dtype=float)
        if self.values.shape != (self.a_axis.size, self.t_axis.size):
            raise ValueError(
                f"values shape {self.values.shape} does not match axes "
                f"({self.a_axis.size}, {self.t_axis.size})"
            )
        check_axis(self.t_axis, "t_axis")
        check_axis(self.a_axis, "a_axis")
        if self.values.size and (
            np.nanmin(self.values) < -1e-9 or np.nanmax(self.values) > 1 + 1e-9
        ):
            raise ValueError("pattern values must be probabilities in [0, 1]")


def check_axis(axis, name="axis"):
    axis = np.asarray(axis, dtype=float)
    if axis.ndim != 1 or axis.size < 1:
        raise ValueError(f"{name} must be a non-empty 1-D array")
    if not np.all(np.isfinite(axis)):
        raise ValueError(f"{name} must be finite")
    if np.any(np.diff(axis) <= 0):
        raise ValueError(f"{name} must be strictly increasing")
    return axis


def drive_value(pulse: TrianglePulse, t):
    """Triangle waveform at time ``t`` (scalar or array), in drive units."""
    t_arr = np.asarray(t, dtype=float)
    T = pulse.width
    if np.any(t_arr < 0.0) or np.any(t_arr > T):
        raise ValueError(f"t outside [0, {T}]")
    out = pulse.amplitude * np.where(t_arr <= 0.5 * T, 2.0 * t_arr / T, 2.0 - 2.0 * t_arr / T)
    return float(out) if out.ndim == 0 else out


def is_traversed(sys: SystemSpec, pulse: TrianglePulse, n: int) -> bool:
    """True when the peak detuning passes anticrossing ``n`` (1-based)."""
    return sys.slope * pulse.amplitude > sys.epsilon[n - 1] * (1.0 + TURNING_POINT_RTOL)


def traversed_count(sys: SystemSpec, pulse: TrianglePulse) -> int:
    """Number of anticrossings reached; they are always the lowest ones."""
    return sum(is_traversed(sys, pulse, n) for n in range(1, sys.n_tls + 1))


def crossing_times(sys: SystemSpec, pulse: TrianglePulse, n: int):
    """Times at which anticrossing ``n`` is passed on the way up and down."""
    if not 1 <= n <= sys.n_tls:
        raise IndexError(f"anticrossing index {n} outside 1..{sys.n_tls}")
    if not is_traversed(sys, pulse, n):
        raise NotTraversedError(f"anticrossing {n} is not reached by this pulse")
    t_n = sys.epsilon[n - 1] * pulse.width / (2.0 * sys.slope * pulse.amplitude)
    return t_n, pulse.width - t_n


def existing_paths(sys: SystemSpec, pulse: TrianglePulse) -> list[int]:
    """Indices of the paths present for this pulse (reflecting ones + N+1)."""
    m = traversed_count(sys, pulse)
    return list(range(1, m + 1)) + [sys.n_tls + 1]


def path_energy(sys: SystemSpec, pulse: TrianglePulse, i: int, t):
    """Diabatic energy followed by path ``i`` at time ``t``."""
    if i not in existing_paths(sys, pulse):
        raise ValueError(f"path {i} does not exist for this pulse")
    qubit = sys.slope * np.asarray(drive_value(pulse, t))
    if i == sys.n_tls + 1:
        return float(qubit) if qubit.ndim == 0 else qubit
    t_in, t_out = crossing_times(sys, pulse, i)
    t_arr = np.asarray(t, dtype=float)
    out = np.where((t_arr >= t_in) & (t_arr <= t_out), sys.epsilon[i - 1], qubit)
    return float(out) if out.ndim == 0 else out


def lens_area(peak, level, width):
    """Area between the triangle ``peak * tri(t)`` and a flat ``level`` above it.

    Zero when the level is not below the peak.
    """
    peak = np.asarray(peak, dtype=float)
    excess = np.clip(peak - level, 0.0, None)
    return width * excess**2 / (2.0 * peak)


def dynamical_phases(epsilon: Sequence[float], slope, amplitude, width, n_traversed):
    """Closed-form phase integrals of all paths, vectorised over the pulse.

    Returns an array with a leading axis of length ``n_traversed + 1``: rows
    0..m-1 are the reflecting paths, the last row is the qubit path.
    ``amplitude`` and ``width`` broadcast against each other.
    """
    peak = slope * np.asarray(amplitude, dtype=float)
    width = np.asarray(width, dtype=float)
    qubit = 0.5 * peak * width
    rows = [qubit - lens_area(peak, epsilon[k], width) for k in range(n_traversed)]
    rows.append(qubit * np.ones_like(peak * width))
    return np.stack(np.broadcast_arrays(*rows))


def adiabatic_phase_rates(sys: SystemSpec, peak: float, nodes: int = 64) -> np.ndarray:
    """Phase per unit pulse width of every path, following adiabatic levels.

    On a triangle pulse each ramp maps time linearly onto the qubit energy
    ``q``, so a path phase is ``width / peak * int_0^peak lambda(q) dq`` with
    ``lambda`` the instantaneous eigenvalue the path rides on. The integral
    is done by Gauss-Legendre quadrature on pieces split at the TLS levels.
    Row order matches :func:`dynamical_phases`.
    """
    eps = np.asarray(sys.epsilon)
    m = int(np.sum(peak > eps * (1.0 + TURNING_POINT_RTOL)))
    edges = np.concatenate([[0.0], eps[:m], [peak]])
    x, w = np.polynomial.legendre.leggauss(nodes)
    lo, hi = edges[:-1, None], edges[1:, None]
    q = (0.5 * (hi - lo) * x + 0.5 * (hi + lo)).ravel()
    wq = (0.5 * (hi - lo) * w).ravel()
    n = eps.size + 1
    h = np.zeros((q.size, n, n))
    h[:, 0, 0] = q
    h[:, 0, 1:] = h[:, 1:, 0] = sys.delta
    h[:, np.arange(1, n), np.arange(1, n)] = eps
    lam = np.linalg.eigvalsh(h)
    rows = np.arange(q.size)
    # qubit line: index = number of TLS levels already below it
    below = np.sum(q[:, None] > eps[None, :], axis=1)
    rates = []
    for k in range(m):
        # after reflecting, the path stays on TLS k, which has k levels under it
        idx = np.where(q < eps[k], below, k)
        rates.append(np.dot(wq, lam[rows, idx]) / peak)
    rates.append(np.dot(wq, lam[rows, below]) / peak)
    return np.array(rates)


def path_phases(sys: SystemSpec, pulse: TrianglePulse, stokes: bool = False) -> list[float]:
    """Accumulated phase of every existing path, ordered by path index.

    The dynamical part is the exact integral of :func:`path_energy` over the
    pulse. With ``stokes=True`` the phase jumps of the Landau-Zener gates met
    along the path are added, so that path ``i`` enters the return amplitude
    as ``A_i**2 * exp(-1j * phase_i)``.
    """
    m = traversed_count(sys, pulse)
    phases = dynamical_phases(sys.epsilon, sys.slope, pulse.amplitude, pulse.width, m)
    phases = [float(p) for p in phases]
    if stokes:
        # late import: impulse depends on this module
        from .impulse import gate_phase_offsets, sweep_rate

        offsets = gate_phase_offsets(
            np.asarray(sys.delta[:m]), sweep_rate(sys.slope, pulse.amplitude, pulse.width)
        )
        phases = [p + float(o) for p, o in zip(phases, offsets)]
    return phases
