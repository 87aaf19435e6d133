"""Direct integration of the driven qubit + N TLS Schroedinger equation."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import kernels
from .model import PatternGrid, SystemSpec, TrianglePulse, check_axis, drive_value
from .parallel import map_rows

#: bound on dt * (largest energy scale), in rad
MAX_STEP_PHASE = 0.1
NORM_TOL = 1e-8
STEP_NORM_TOL = 1e-12


class StepSizeError(ValueError):
    """Requested time step is too coarse for the energy scales involved."""


class NormDriftError(RuntimeError):
    """The propagated state lost normalisation."""

    def __init__(self, step, drift):
        self.step = step
        self.drift = drift
        super().__init__(f"norm drift {drift:.3e} at step {step}")


@dataclass(frozen=True)
class HamiltonianFrame:
    matrix: np.ndarray
    basis: tuple


@dataclass(frozen=True)
class StateVector:
    amplitudes: np.ndarray
    n_steps: int
    dt: float
    norm_drift: float
    max_step_drift: float

    @property
    def return_probability(self) -> float:
        return float(abs(self.amplitudes[0]) ** 2)


def basis_labels(n_tls):
    labels = ["1" + "g" * n_tls]
    for i in range(n_tls):
        labels.append("0" + "".join("e" if j == i else "g" for j in range(n_tls)))
    return tuple(labels)


def arrow_matrix(qubit, eps, delta):
    eps = np.asarray(eps, dtype=float)
    n = eps.size + 1
    h = np.zeros((n, n))
    h[0, 0] = qubit
    h[0, 1:] = h[1:, 0] = delta
    h[np.arange(1, n), np.arange(1, n)] = eps
    return h


def build_hamiltonian(sys: SystemSpec, pulse: TrianglePulse, t: float) -> HamiltonianFrame:
    """Hamiltonian at time ``t`` in the diabatic basis (rad/ns)."""
    qubit = sys.slope * drive_value(pulse, t)
    return HamiltonianFrame(
        arrow_matrix(qubit, sys.epsilon, sys.delta).astype(complex), basis_labels(sys.n_tls)
    )


def energy_scale(sys: SystemSpec, pulse: TrianglePulse) -> float:
    return max(sys.epsilon[-1], sys.slope * pulse.amplitude, max(sys.delta))


def default_dt(sys: SystemSpec, pulse: TrianglePulse) -> float:
    return min(0.02 / energy_scale(sys, pulse), pulse.width / 2000.0)


def _resolve_dt(dt_policy, sys, pulse):
    if dt_policy is None or dt_policy == "auto":
        return default_dt(sys, pulse)
    if callable(dt_policy):
        return float(dt_policy(sys, pulse))
    return float(dt_policy)


def _run(qubit_diag, eps, delta, dt, psi0, backend=None):
    evolve = kernels.get_evolver(backend)
    psi, bad_step, max_step = evolve(
        np.ascontiguousarray(qubit_diag, dtype=float),
        np.ascontiguousarray(eps, dtype=float),
        np.ascontiguousarray(delta, dtype=float),
        float(dt),
        np.asarray(psi0, dtype=complex),
        STEP_NORM_TOL,
    )
    drift = abs(float(np.linalg.norm(psi)) - 1.0)
    if bad_step >= 0 or drift > NORM_TOL:
        raise NormDriftError(bad_step if bad_step >= 0 else len(qubit_diag) - 1, max(drift, max_step))
    return psi, drift, max_step


def propagate(sys: SystemSpec, pulse: TrianglePulse, dt=None, backend=None) -> StateVector:
    """Evolve ``|1 g..g>`` over one pulse with exact midpoint step unitaries.

    ``dt`` is an upper bound; the actual step divides the pulse width evenly.
    """
    dt_max = _resolve_dt(dt, sys, pulse)
    if not dt_max > 0.0:
        raise StepSizeError(f"time step must be positive, got {dt_max}")
    if dt_max * energy_scale(sys, pulse) > MAX_STEP_PHASE:
        raise StepSizeError(
            f"dt={dt_max:.4g} ns too coarse: dt * energy scale must stay <= {MAX_STEP_PHASE}"
        )
    n_steps = max(1, math.ceil(pulse.width / dt_max - 1e-9))
    step = pulse.width / n_steps
    t_mid = (np.arange(n_steps) + 0.5) * step
    qubit = sys.slope * drive_value(pulse, t_mid)
    psi0 = np.zeros(sys.n_tls + 1, dtype=complex)
    psi0[0] = 1.0
    psi, drift, max_step = _run(qubit, sys.epsilon, sys.delta, step, psi0, backend)
    return StateVector(psi, n_steps, step, drift, max_step)


def single_passage_check(delta: float, nu: float, window=None, backend=None) -> float:
    """Transmitted population after a linear sweep from ``-window`` to ``+window``.

    The state starts on the lower adiabatic level and the result is its
    overlap with the upper one at the end, i.e. the population that stayed on
    the diabatic line. Projecting on bare states instead leaves a ripple of
    order ``delta / window`` that is larger than the quantity being checked.
    The default window is 40 times the larger of the coupling and the
    intrinsic energy scale ``sqrt(nu)``.
    """
    if nu <= 0.0:
        raise ValueError("sweep rate must be positive")
    if delta < 0.0:
        raise ValueError("coupling must be non-negative")
    if window is None:
        window = 40.0 * max(delta, math.sqrt(nu))
    if window < 20.0 * delta or window <= 0.0:
        raise ValueError(f"window {window} must be at least 20 * delta = {20 * delta}")
    span = 2.0 * window / nu
    dt_max = min(0.02 / max(window, delta), span / 2000.0)
    n_steps = math.ceil(span / dt_max - 1e-9)
    step = span / n_steps
    detuning = -window + nu * (np.arange(n_steps) + 0.5) * step
    _, start = np.linalg.eigh(arrow_matrix(-window, [0.0], [delta]))
    _, end = np.linalg.eigh(arrow_matrix(window, [0.0], [delta]))
    psi, _, _ = _run(detuning, [0.0], [delta], step, start[:, 0].astype(complex), backend)
    return float(abs(np.vdot(end[:, 1], psi)) ** 2)


def pattern_sweep_numeric(sys: SystemSpec, t_axis, a_axis, dt_policy=None, workers=1, backend=None) -> PatternGrid:
    """Numerically propagated return probability on every grid cell."""
    t_axis = check_axis(t_axis, "t_axis")
    a_axis = check_axis(a_axis, "a_axis")
    tasks = [(sys, a, t_axis, dt_policy, backend) for a in a_axis]
    rows = map_rows(_numeric_row, tasks, workers)
    return PatternGrid(
        np.clip(np.vstack(rows), 0.0, 1.0),
        t_axis,
        a_axis,
        {"engine": "numeric", "dt_policy": _policy_label(dt_policy), "backend": backend or kernels.BACKEND},
    )


def _policy_label(dt_policy):
    if dt_policy is None or dt_policy == "auto":
        return "auto"
    if callable(dt_policy):
        return getattr(dt_policy, "__name__", "callable")
    return f"fixed:{float(dt_policy):.9g}"


def _numeric_row(args):
    sys, a, t_axis, dt_policy, backend = args
    return np.array(
        [propagate(sys, TrianglePulse(a, t), dt_policy, backend).return_probability for t in t_axis]
    )
