"""Fourier analysis of patterns along the pulse-width axis.

For two TLSs the return probability is a constant plus three cosines in the
pulse width, one per pair of paths, so each amplitude column of the
transform shows up to three ridges (arcs) at closed-form frequencies.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .impulse import lz_probability, sweep_rate
from .model import PatternGrid, SystemSpec, TURNING_POINT_RTOL

_UNIFORM_RTOL = 1e-6


def dft_series(series) -> np.ndarray:
    """``sum_j x_j exp(-2 pi i j k / n)`` for every bin ``k``."""
    x = np.asarray(series, dtype=float)
    if x.ndim != 1:
        raise ValueError("series must be one-dimensional")
    if x.size < 2:
        raise ValueError(f"series needs at least 2 samples, got {x.size}")
    return np.fft.fft(x)


@dataclass(frozen=True)
class FtMap:
    magnitudes: np.ndarray  # (bin, amplitude)
    k_axis: np.ndarray
    a_axis: np.ndarray
    meta: dict

    def __post_init__(self):
        if self.magnitudes.shape != (self.k_axis.size, self.a_axis.size):
            raise ValueError("magnitudes must have shape (len(k_axis), len(a_axis))")
        if np.any(self.magnitudes < 0.0):
            raise ValueError("magnitudes must be non-negative")

    @property
    def bin_width(self) -> float:
        return float(self.k_axis[1] - self.k_axis[0])


def uniform_step(axis) -> float:
    axis = np.asarray(axis, dtype=float)
    steps = np.diff(axis)
    if steps.size == 0 or np.any(np.abs(steps - steps[0]) > _UNIFORM_RTOL * abs(steps[0])):
        raise ValueError("t_axis must be uniformly spaced")
    return float(steps[0])


def ft_map(grid: PatternGrid, window: bool = False) -> FtMap:
    """Magnitude of the DFT of each amplitude row, DC removed.

    With ``window`` a Hann taper is applied; the row mean is then taken with
    the window weights so that bin 0 still vanishes.
    """
    step = uniform_step(grid.t_axis)
    n = grid.t_axis.size
    rows = np.asarray(grid.values, dtype=float)
    if window:
        w = np.hanning(n + 2)[1:-1]
        mean = rows @ w / w.sum()
        rows = (rows - mean[:, None]) * w
    else:
        rows = rows - rows.mean(axis=1, keepdims=True)
    spec = np.abs(np.fft.rfft(rows, axis=1)).T
    k_axis = 2.0 * np.pi * np.arange(spec.shape[0]) / (n * step)
    meta = dict(grid.meta)
    meta["window"] = "hann" if window else "none"
    return FtMap(spec, k_axis, np.array(grid.a_axis, dtype=float), meta)


@dataclass(frozen=True)
class ArcPrediction:
    a_axis: np.ndarray
    k1: np.ndarray
    k2: np.ndarray
    k3: np.ndarray
    k2_alt: np.ndarray  # same arc written with the level spacing in place of eps_2
    b0: np.ndarray
    b1: np.ndarray
    b2: np.ndarray
    b3: np.ndarray

    def arcs(self):
        return {"k1": (self.k1, self.b1), "k2": (self.k2, self.b2), "k3": (self.k3, self.b3)}


def arc_weights(p1, p2):
    """Constant and cosine weights of the two-TLS return probability."""
    s1, s2 = np.asarray(p1), np.asarray(p2)
    c1, c2 = 1.0 - s1, 1.0 - s2
    b0 = c1**2 + s1**2 * c2**2 + s1**2 * s2**2
    b1 = 2.0 * s1 * c2 * c1
    b2 = 2.0 * s1**2 * s2 * c2
    b3 = 2.0 * s1 * s2 * c1
    return b0, b1, b2, b3


def arc_frequencies(e1, e2, peak):
    """Pulse-width frequencies of the path-pair phases, for ``peak = s A``.

    Returns ``(k1, k2, k2_alt)``: ``k1`` between the two reflecting paths,
    ``k2`` between the upper reflecting path and the qubit path, and
    ``k2_alt``, the second arc written with the level spacing in place of the
    upper level. The two forms of ``k2`` agree when ``e1 = 0``.
    """
    peak = np.asarray(peak, dtype=float)
    e12 = e2 - e1
    k1 = e12 - (e1 + e2) * e12 / (2.0 * peak)
    k2 = (peak - e2) ** 2 / (2.0 * peak)
    k2_alt = (peak - e12) ** 2 / (2.0 * peak)
    return k1, k2, k2_alt


def predict_arcs(sys: SystemSpec, a_axis, t_axis) -> ArcPrediction:
    """Arc frequencies and weights for a qubit with two TLSs.

    The weights depend on the pulse width through the sweep rate; they are
    averaged over ``t_axis``. Amplitudes that do not pass the upper level
    are dropped.
    """
    if sys.n_tls != 2:
        raise ValueError(f"arc formulas need N=2, got N={sys.n_tls}")
    e1, e2 = sys.epsilon
    a = np.asarray(a_axis, dtype=float)
    a = a[sys.slope * a > e2 * (1.0 + TURNING_POINT_RTOL)]
    t = np.asarray(t_axis, dtype=float)
    k1, k2, k2_alt = arc_frequencies(e1, e2, sys.slope * a)
    nu = sweep_rate(sys.slope, a[:, None], t[None, :])
    p1 = lz_probability(sys.delta[0], nu)
    p2 = lz_probability(sys.delta[1], nu)
    b = [w.mean(axis=1) for w in arc_weights(p1, p2)]
    return ArcPrediction(a, k1, k2, k1 + k2, k2_alt, *b)


@dataclass(frozen=True)
class RidgePoint:
    amplitude: float
    k: float
    magnitude: float


def extract_ridges(fmap: FtMap, threshold: float = 0.2, min_bin: int = 2) -> list[RidgePoint]:
    """Local maxima of each column above ``threshold`` times its maximum.

    Bins below ``min_bin`` are ignored: the weights drift with the pulse
    width through the sweep rate, and that slow background leaks into the
    first bin even after the mean is removed. Peak positions are refined by
    a parabola through the three bins around the maximum. Sorted by
    amplitude, then frequency.
    """
    if not 0.0 < threshold < 1.0:
        raise ValueError("threshold must lie in (0, 1)")
    if min_bin < 1:
        raise ValueError("min_bin must be at least 1")
    mags = fmap.magnitudes
    dk = fmap.bin_width
    out = []
    for j, amp in enumerate(fmap.a_axis):
        col = mags[:, j]
        top = col[min_bin:].max(initial=0.0)
        if top <= 0.0:
            continue
        mid = col[1:-1]
        peaks = np.nonzero((mid > col[:-2]) & (mid >= col[2:]) & (mid >= threshold * top))[0] + 1
        peaks = peaks[peaks >= min_bin]
        for i in peaks:
            lo, c, hi = col[i - 1], col[i], col[i + 1]
            curv = lo - 2.0 * c + hi
            shift = 0.5 * (lo - hi) / curv if curv != 0.0 else 0.0
            out.append(RidgePoint(float(amp), float(fmap.k_axis[i] + shift * dk), float(c)))
    return out


def ridges_by_column(points, a_axis):
    """Group ridge frequencies by amplitude sample; points at other amplitudes are skipped."""
    cols = {float(a): [] for a in a_axis}
    for p in points:
        if p.amplitude in cols:
            cols[p.amplitude].append(p.k)
    return cols


def match_arcs(points, pred: ArcPrediction, bin_width, arcs=("k1", "k2", "k3")) -> np.ndarray:
    """``out[j, i]``: some ridge at amplitude ``pred.a_axis[j]`` lies within one
    bin of arc ``arcs[i]``."""
    cols = ridges_by_column(points, pred.a_axis)
    table = pred.arcs()
    out = np.zeros((pred.a_axis.size, len(arcs)), dtype=bool)
    for j, amp in enumerate(pred.a_axis):
        found = np.asarray(cols[float(amp)])
        for i, name in enumerate(arcs):
            k = table[name][0][j]
            out[j, i] = found.size > 0 and np.min(np.abs(found - k)) <= bin_width
    return out


def resolvable(pred: ArcPrediction, bin_width, arcs=("k1", "k2", "k3"), min_sep=2.0) -> np.ndarray:
    """Columns where the listed arcs sit at least ``min_sep`` bins apart from
    each other and from zero frequency."""
    table = pred.arcs()
    ks = np.vstack([np.zeros(pred.a_axis.size)] + [table[a][0] for a in arcs])
    gaps = np.diff(np.sort(ks, axis=0), axis=0)
    return np.all(gaps >= min_sep * bin_width, axis=0)
