"""Parameter sets of the four two-TLS interference panels.

TLS levels at 200 and 400 MHz above the drive baseline, unit slope; the
couplings select which of the three arcs dominate the Fourier map.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import SystemSpec

LEVELS_MHZ = (200.0, 400.0)


@dataclass(frozen=True)
class Panel:
    name: str
    coupling_mhz: tuple
    arcs: tuple  # arcs that carry the pattern
    ft_t_range: tuple  # pulse widths [ns] where that dominance holds

    def system(self) -> SystemSpec:
        return SystemSpec.from_mhz(LEVELS_MHZ, self.coupling_mhz)


PANELS = {
    # strong upper coupling: below ~40 ns the upper anticrossing still leaks
    # and the k2 weight exceeds 0.05; from 40 ns on it stays under 0.03
    "A": Panel("A", (10.0, 60.0), ("k1",), (40.0, 139.0)),
    "B": Panel("B", (1.0, 10.0), ("k2",), (1.0, 100.0)),
    "C": Panel("C", (10.0, 1.0), ("k3",), (1.0, 100.0)),
    "D": Panel("D", (17.0, 17.0), ("k1", "k2", "k3"), (1.0, 100.0)),
}


def default_axes(sys: SystemSpec, n_t=200, n_a=200, t_range=(1.0, 100.0)):
    """Pulse widths [ns] and drive amplitudes [rad/ns] of the default sweep.

    ``s * A`` runs from half the lowest TLS level to three times the highest.
    """
    t_axis = np.linspace(t_range[0], t_range[1], n_t)
    a_axis = np.linspace(0.5 * sys.epsilon[0], 3.0 * sys.epsilon[-1], n_a) / sys.slope
    return t_axis, a_axis


def panel_config_text(panel: Panel, n=100) -> str:
    e = ", ".join(f"{x:g}" for x in LEVELS_MHZ)
    d = ", ".join(f"{x:g}" for x in panel.coupling_mhz)
    return (
        f"[system]\ntls_energy_mhz = {e}\ntls_coupling_mhz = {d}\n"
        f"[grid]\nt_samples = {n}\namp_samples = {n}\n"
    )

