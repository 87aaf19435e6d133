"""Adiabatic-impulse model of a triangle-driven multi-anticrossing chain.

Each anticrossing acts as a beam splitter: on a traversal the qubit line
either continues (transmission, amplitude ``sqrt(P_LZ)``) or the state
follows the flat TLS line (reflection, amplitude ``sqrt(1 - P_LZ)``). The
return amplitude after one pulse is a sum over ``N + 1`` paths.

Two routes compute it:

* :func:`cascade_evolve` multiplies full ``(N+1)``-dimensional gate
  embeddings and free propagators (transfer-matrix reference);
* :func:`return_probability` evaluates the closed-form path sum.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import loggamma

from .model import (
    PathDescriptor,
    PatternGrid,
    SystemSpec,
    TrianglePulse,
    check_axis,
    adiabatic_phase_rates,
    crossing_times,
    dynamical_phases,
    existing_paths,
    traversed_count,
)

# Stirling tail of the Stokes phase is used above this adiabatic parameter,
# where the closed form loses digits to cancellation
_STOKES_SERIES_MIN = 50.0


def sweep_rate(slope, amplitude, width):
    """Rate of change of the qubit-TLS detuning on either ramp."""
    return 2.0 * slope * np.asarray(amplitude, dtype=float) / np.asarray(width, dtype=float)


def adiabatic_parameter(delta, nu):
    delta = np.asarray(delta, dtype=float)
    nu = np.asarray(nu, dtype=float)
    if np.any(nu <= 0.0):
        raise ValueError("sweep rate must be positive")
    if np.any(delta < 0.0):
        raise ValueError("coupling must be non-negative")
    return delta**2 / nu


def lz_probability(delta, nu):
    """Asymptotic Landau-Zener transition probability ``exp(-2 pi delta^2 / nu)``."""
    out = np.exp(-2.0 * np.pi * adiabatic_parameter(delta, nu))
    return float(out) if out.ndim == 0 else out


def stokes_phase(adiabatic_param):
    """Stokes phase, pi/4 in the sudden limit falling to 0 adiabatically."""
    d = np.asarray(adiabatic_param, dtype=float)
    if np.any(d < 0.0) or np.any(np.isnan(d)):
        raise ValueError("adiabatic parameter must be non-negative")
    out = np.empty_like(d)
    zero = d == 0.0
    big = d >= _STOKES_SERIES_MIN
    mid = ~(zero | big)
    out[zero] = np.pi / 4
    dm = d[mid]
    out[mid] = np.pi / 4 + dm * (np.log(dm) - 1.0) + loggamma(1.0 - 1j * dm).imag
    db = d[big]
    out[big] = 1.0 / (12.0 * db) + 1.0 / (360.0 * db**3) + 1.0 / (1260.0 * db**5)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class LzGateParams:
    p_lz: float
    stokes_phase: float
    adiabatic_param: float

    def __post_init__(self):
        if not 0.0 <= self.p_lz <= 1.0:
            raise ValueError(f"p_lz={self.p_lz} outside [0, 1]")
        if self.adiabatic_param < 0.0:
            raise ValueError("adiabatic parameter must be non-negative")
        if not -1e-12 <= self.stokes_phase <= np.pi / 4 + 1e-12:
            raise ValueError(f"stokes phase {self.stokes_phase} outside [0, pi/4]")

    @classmethod
    def from_sweep(cls, delta: float, nu: float) -> "LzGateParams":
        d = float(adiabatic_parameter(delta, nu))
        return cls(float(np.exp(-2.0 * np.pi * d)), float(stokes_phase(d)), d)


def lz_gate(params: LzGateParams, reverse: bool = False) -> np.ndarray:
    """2x2 impulse gate in the adiabatic basis (lower, upper branch).

    Diagonal entries keep the branch (probability ``1 - P_LZ``), off-diagonal
    ones jump between branches. ``reverse`` gives the gate for a sweep in the
    opposite direction, whose branch-jump amplitude changes sign.
    """
    c = np.sqrt(1.0 - params.p_lz)
    s = -np.sqrt(params.p_lz) if reverse else np.sqrt(params.p_lz)
    phi = params.stokes_phase - np.pi / 2
    return np.array(
        [[c * np.exp(-1j * phi), 1j * s], [1j * s, c * np.exp(1j * phi)]],
        dtype=complex,
    )


def _diabatic_gate(params: LzGateParams, upward: bool, stokes: bool) -> np.ndarray:
    """Gate on the diabatic pair (qubit, TLS), ``G[out, in]``.

    Going up the qubit line starts on the lower branch and leaves on the
    upper one; going down it is the other way round. Without Stokes phases
    the gate is a real rotation with the same transmission/reflection moduli.
    """
    if stokes:
        u = lz_gate(params, reverse=not upward)
        # adiabatic index of (qubit, TLS) before and after the crossing
        before, after = ((0, 1), (1, 0)) if upward else ((1, 0), (0, 1))
        return u[np.ix_(after, before)]
    t = np.sqrt(params.p_lz)
    r = np.sqrt(1.0 - params.p_lz)
    sign = 1.0 if upward else -1.0
    return np.array([[t, -sign * r], [sign * r, t]], dtype=complex)


def _qubit_phase_integral(peak: float, width: float, t: float) -> float:
    """Integral of the qubit energy ``peak * tri(t)`` from 0 to ``t``."""
    half = 0.5 * width
    if t <= half:
        return peak * t * t / width
    return peak * width / 4.0 + peak * (2.0 * (t - half) - (t * t - half * half) / width)


def cascade_evolve(sys: SystemSpec, pulse: TrianglePulse, stokes: bool = True) -> np.ndarray:
    """Full-state impulse evolution over one pulse, starting from the qubit.

    Returns the final amplitudes over the ``N + 1`` diabatic states.
    """
    n = sys.n_tls
    m = traversed_count(sys, pulse)
    peak = sys.slope * pulse.amplitude
    nu = float(sweep_rate(sys.slope, pulse.amplitude, pulse.width))
    levels = np.asarray(sys.epsilon)
    events = []
    for k in range(1, m + 1):
        t_up, t_down = crossing_times(sys, pulse, k)
        params = LzGateParams.from_sweep(sys.delta[k - 1], nu)
        events.append((t_up, k, _diabatic_gate(params, True, stokes)))
        events.append((t_down, k, _diabatic_gate(params, False, stokes)))
    events.sort(key=lambda e: e[0])

    psi = np.zeros(n + 1, dtype=complex)
    psi[0] = 1.0
    t_prev, f_prev = 0.0, 0.0
    for t_event, k, gate in events + [(pulse.width, None, None)]:
        f_now = _qubit_phase_integral(peak, pulse.width, t_event)
        psi[0] *= np.exp(-1j * (f_now - f_prev))
        psi[1:] *= np.exp(-1j * levels * (t_event - t_prev))
        t_prev, f_prev = t_event, f_now
        if gate is not None:
            pair = [0, k]
            psi[pair] = gate @ psi[pair]
    return psi


def gate_phase_offsets(delta_traversed, nu):
    """Phase added to each path by the gates it meets (reflecting paths, then qubit path).

    A path reflecting at anticrossing ``i`` stays on the lower branch on both
    passages and picks up ``exp(-2i (phi_S - pi/2))``; the jump amplitudes of
    an upward and a downward transmission cancel in phase. The result is the
    extra ``phase`` in ``exp(-1j * phase)``; ``nu`` may be an array and the
    path axis is the leading one.
    """
    delta_traversed = np.asarray(delta_traversed, dtype=float)
    nu = np.asarray(nu, dtype=float)
    rows = []
    for d in delta_traversed:
        phi_s = stokes_phase(adiabatic_parameter(d, nu))
        rows.append(2.0 * np.asarray(phi_s) - np.pi)
    rows.append(np.zeros(nu.shape))
    return np.stack(np.broadcast_arrays(*rows))


def _transmissions(sys: SystemSpec, m: int, nu):
    """sqrt(P_LZ) per traversed anticrossing, shape (m,) + nu.shape."""
    nu = np.asarray(nu, dtype=float)
    if m == 0:
        return np.empty((0,) + nu.shape)
    delta = np.asarray(sys.delta[:m]).reshape((m,) + (1,) * nu.ndim)
    return np.sqrt(lz_probability(delta, nu[None, ...]))


def _amplitudes(t):
    """Output amplitudes of all paths from transmission amplitudes ``t`` (leading axis)."""
    m = t.shape[0]
    r = np.sqrt(np.clip(1.0 - t**2, 0.0, None))
    out = []
    carried = np.ones(t.shape[1:])
    for k in range(m):
        out.append(carried * r[k])
        carried = carried * t[k]
    out.append(carried)
    return np.stack(out)


def path_amplitudes(
    sys: SystemSpec, pulse: TrianglePulse, stokes: bool = True, phases: str = "diabatic"
) -> list[PathDescriptor]:
    """Amplitude and phase of each existing path, ordered by index."""
    m = traversed_count(sys, pulse)
    nu = sweep_rate(sys.slope, pulse.amplitude, pulse.width)
    amps = _amplitudes(_transmissions(sys, m, nu))
    ph = _row_phases(sys, m, pulse.amplitude, np.asarray(pulse.width), stokes, phases)
    return [
        PathDescriptor(idx, float(a), float(p))
        for idx, a, p in zip(existing_paths(sys, pulse), amps, ph)
    ]


PHASE_MODELS = ("diabatic", "adiabatic")


def _check_phase_model(phases):
    if phases not in PHASE_MODELS:
        raise ValueError(f"phase model must be one of {PHASE_MODELS}, got {phases!r}")


def _row_phases(sys, m, amplitude, widths, stokes, phases="diabatic"):
    _check_phase_model(phases)
    nu = sweep_rate(sys.slope, amplitude, widths)
    if phases == "diabatic":
        out = dynamical_phases(sys.epsilon, sys.slope, amplitude, widths, m)
        if stokes:
            out = out + gate_phase_offsets(sys.delta[:m], nu)
        return out
    rates = adiabatic_phase_rates(sys, sys.slope * amplitude)
    out = rates.reshape((-1,) + (1,) * np.ndim(widths)) * np.asarray(widths)
    if stokes:
        # adiabatic energies already hold the level repulsion, only the
        # non-analytic part of the gate phase is left
        for k, d in enumerate(sys.delta[:m]):
            out[k] = out[k] - 2.0 * stokes_phase(adiabatic_parameter(d, nu))
    return out


def interference_sum(weights, phases):
    """Probability from squared path amplitudes and phases (path axis first).

    Diagonal terms plus twice every pairwise ``cos`` term.
    """
    total = np.sum(weights**2, axis=0)
    n_paths = weights.shape[0]
    for i in range(n_paths):
        for j in range(i):
            total = total + 2.0 * weights[i] * weights[j] * np.cos(phases[i] - phases[j])
    return np.clip(total, 0.0, 1.0)


def row_probability(
    sys: SystemSpec, amplitude: float, widths, stokes: bool = True, phases: str = "diabatic"
) -> np.ndarray:
    """Return probability at one drive amplitude for an array of pulse widths.

    ``phases`` picks the energies the paths accumulate phase on: the bare
    ``diabatic`` lines (closed form) or the ``adiabatic`` levels (quadrature).
    """
    _check_phase_model(phases)
    widths = np.atleast_1d(np.asarray(widths, dtype=float))
    m = traversed_count(sys, TrianglePulse(amplitude, float(widths[0])))
    if m == 0:
        return np.ones_like(widths)
    nu = sweep_rate(sys.slope, amplitude, widths)
    weights = _amplitudes(_transmissions(sys, m, nu)) ** 2
    return interference_sum(weights, _row_phases(sys, m, amplitude, widths, stokes, phases))


def return_probability(
    sys: SystemSpec, pulse: TrianglePulse, stokes: bool = True, phases: str = "diabatic"
) -> float:
    """Probability of finding the qubit excited again after one pulse."""
    return float(row_probability(sys, pulse.amplitude, [pulse.width], stokes, phases)[0])


def two_tls_probability(sys: SystemSpec, pulse: TrianglePulse, stokes: bool = True) -> float:
    """Explicit six-term return probability for a qubit with two TLSs."""
    if sys.n_tls != 2:
        raise ValueError(f"two-TLS formula needs N=2, got N={sys.n_tls}")
    paths = path_amplitudes(sys, pulse, stokes)
    if len(paths) != 3:
        from .model import NotTraversedError

        raise NotTraversedError("both anticrossings must be traversed")
    nu = float(sweep_rate(sys.slope, pulse.amplitude, pulse.width))
    sin1, sin2 = (np.sqrt(lz_probability(d, nu)) for d in sys.delta)
    cos1, cos2 = np.sqrt(1.0 - sin1**2), np.sqrt(1.0 - sin2**2)
    phi_1 = paths[0].phase - paths[1].phase
    phi_2 = paths[1].phase - paths[2].phase
    p = (
        cos1**4
        + sin1**4 * cos2**4
        + sin1**4 * sin2**4
        + 2 * sin1**2 * cos2**2 * cos1**2 * np.cos(phi_1)
        + 2 * sin1**4 * sin2**2 * cos2**2 * np.cos(phi_2)
        + 2 * sin1**2 * sin2**2 * cos1**2 * np.cos(phi_1 + phi_2)
    )
    return float(np.clip(p, 0.0, 1.0))


def pattern_sweep(
    sys: SystemSpec, t_axis, a_axis, stokes: bool = True, workers: int = 1, phases: str = "diabatic"
) -> PatternGrid:
    """Closed-form return probability on every (amplitude, width) cell."""
    _check_phase_model(phases)
    t_axis = check_axis(t_axis, "t_axis")
    a_axis = check_axis(a_axis, "a_axis")
    from .parallel import map_rows

    rows = map_rows(_analytic_row, [(sys, a, t_axis, stokes, phases) for a in a_axis], workers)
    return PatternGrid(
        np.vstack(rows), t_axis, a_axis, {"engine": "analytic", "stokes": stokes, "phases": phases}
    )


def _analytic_row(args):
    sys, a, t_axis, stokes, phases = args
    return row_probability(sys, a, t_axis, stokes, phases)
