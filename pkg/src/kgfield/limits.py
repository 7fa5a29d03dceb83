"""Nonrelativistic-limit diagnostics: mass ladders and decay-rate fits.

With M = (mass) x (speed of light) in natural units, dialing the speed
of light up at fixed particle content means growing M while the spatial
profile stays put.  Every limit statement then becomes a measurable
decay rate along a geometric ladder of masses, fitted in log-log.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np

from .core import LatticeField, ModelParams, MomentumLattice, schrodinger_packet
from .currents import PAD, current_Ja, current_calJa

DEFAULT_MASSES = tuple(0.75 * 2.0 ** j for j in range(6))


def _l2(grid: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(grid) ** 2)))


def fit_slope(masses, deviations) -> float:
    """Least-squares slope of log(dev) against log(M)."""
    masses = np.asarray(masses, dtype=float)
    deviations = np.asarray(deviations, dtype=float)
    if masses.size < 4:
        raise ValueError("ladder too short for a slope fit (need >= 4)")
    if np.any(deviations <= 0.0):
        raise ValueError("deviations must be positive for a log fit")
    return float(np.polyfit(np.log(masses), np.log(deviations), 1)[0])


@dataclass(frozen=True)
class LimitSweep:
    """Fixed spatial packet swept over a geometric mass ladder.

    The profile (width sigma, carrier kcarrier) is held fixed; only the
    mass moves.  The normalization convention kappa = 1/(1+a) is baked
    in, which is the choice that sends the currents to the Schrodinger
    pair (|psi|^2, j).
    """

    lattice: MomentumLattice
    sigma: float
    kcarrier: tuple
    a: float = 0.0
    masses: tuple = dataclass_field(default=DEFAULT_MASSES)

    def __post_init__(self):
        if not -1.0 < self.a < 1.0:
            raise ValueError("sector weight parameter must lie in (-1, 1)")
        if len(self.masses) < 4:
            raise ValueError("mass ladder needs at least 4 points")
        m = np.asarray(self.masses, dtype=float)
        if np.any(m <= 0.0) or np.any(np.diff(m) <= 0.0):
            raise ValueError("mass ladder must be positive and increasing")
        k = np.asarray(self.kcarrier, dtype=float)
        if k.size != self.lattice.dim:
            raise ValueError("carrier dimension mismatch")
        if np.all(k == 0.0):
            raise ValueError(
                "zero carrier gives a vanishing reference current; "
                "pick a moving packet")

    @property
    def kappa(self) -> float:
        return 1.0 / (1.0 + self.a)

    def params(self, mass: float) -> ModelParams:
        return ModelParams(mass=float(mass), kappa=self.kappa, a=self.a)

    def packet(self, mass: float) -> LatticeField:
        return schrodinger_packet(self.lattice, self.params(mass),
                                  self.sigma, kcarrier=self.kcarrier)


def schrodinger_reference(field: LatticeField, t: float,
                          pad: int = PAD) -> tuple:
    """Schrodinger probability density and current of the field value.

    rho = |psi|^2 and j = -(i/2M)[psi* grad psi - psi grad psi*] with
    the gradient spectral, sampled on the pad-refined grid so the output
    aligns with the relativistic currents.
    """
    lat = field.lattice
    mass = field.params.mass
    psi_m = field.mode_psi(t)
    fine = lat.refined(pad) if pad > 1 else lat
    emb = lat.embed_modes(psi_m, pad) if pad > 1 else psi_m
    psi = fine.modes_to_grid(emb)
    rho = np.abs(psi) ** 2
    jvec = np.empty((lat.dim,) + psi.shape, dtype=float)
    for i in range(lat.dim):
        grad_m = 1j * lat.k_grids[i] * psi_m
        grad = fine.modes_to_grid(lat.embed_modes(grad_m, pad)
                                  if pad > 1 else grad_m)
        cross = np.conj(psi) * grad
        jvec[i] = (-1j / (2.0 * mass) * (cross - np.conj(cross))).real
    return rho, jvec


def operator_expansion_deviation(lattice: MomentumLattice, mass: float,
                                 profile_modes: np.ndarray) -> float:
    """Error of the two-term inverse-square-root expansion, mode-wise.

    Measures ||(D^{-1/2} - (1/M - k^2/(2 M^3))) phi|| / ||phi|| for a
    fixed band-limited profile; the leading neglected term carries M^-5.
    """
    w = lattice.omega(mass)
    approx = 1.0 / mass - lattice.ksq / (2.0 * mass ** 3)
    diff = (1.0 / w - approx) * profile_modes
    return _l2(diff) / _l2(profile_modes)


def conjugate_deviation(field: LatticeField, t: float | None = None) -> float:
    """Relative distance between the charge conjugate and the field."""
    if t is None:
        t = field.t0
    p, m = field.mode_pair(t)
    return 2.0 * _l2(m) / _l2(p + m)


def tilde_deviation(field: LatticeField, t: float | None = None) -> float:
    """Relative distance of the a-weighted combination from (1+a) psi."""
    if t is None:
        t = field.t0
    a = field.params.a
    p, m = field.mode_pair(t)
    return 2.0 * _l2(m) / ((1.0 + a) * _l2(p + m))


def schrodinger_residual(field: LatticeField, t: float | None = None) -> float:
    """Residual of the free Schrodinger equation for e^{iMt} psi.

    Computes ||i d(chi)/dt + grad^2 chi/(2M)|| / (M ||chi||) in mode
    space at time t; the phase peel makes this finite as M grows.
    """
    if t is None:
        t = field.t0
    mass = field.params.mass
    lat = field.lattice
    p, m = field.mode_pair(t)
    w = field.omega
    num = w * (p - m) - mass * (p + m) - lat.ksq / (2.0 * mass) * (p + m)
    return _l2(num) / (mass * _l2(p + m))


_CURRENTS = {"J_a": current_Ja, "calJ_a": current_calJa}


def limit_deviation(sweep: LimitSweep, which: str, t: float = 0.0) -> dict:
    """Deviation of the chosen current from its Schrodinger limit.

    For each ladder mass, builds the packet, evaluates the current and
    the reference pair (rho, j), and records relative L2 deviations of
    the time component and the spatial part.  Returns the table along
    with fitted log-log slopes; both should sit near -2.
    """
    if which not in _CURRENTS:
        raise ValueError(f"unknown current family {which!r}")
    make = _CURRENTS[which]
    dev_rho = []
    dev_j = []
    for mass in sweep.masses:
        f = sweep.packet(mass)
        cur = make(f, t)
        rho, jvec = schrodinger_reference(f, t)
        dev_rho.append(_l2(cur.components[0] - rho) / _l2(rho))
        dev_j.append(_l2(cur.components[1:] - jvec) / _l2(jvec))
    masses = np.asarray(sweep.masses, dtype=float)
    return {
        "which": which,
        "masses": masses,
        "dev_rho": np.asarray(dev_rho),
        "dev_j": np.asarray(dev_j),
        "slope_rho": fit_slope(masses, dev_rho),
        "slope_j": fit_slope(masses, dev_j),
    }


def current_mutual_deviation(sweep: LimitSweep, t: float = 0.0) -> dict:
    """Distance between the two current families along the ladder.

    Both tend to the same Schrodinger pair, so their mutual relative
    deviation decays near slope -2 as well.
    """
    devs = []
    for mass in sweep.masses:
        f = sweep.packet(mass)
        ja = current_Ja(f, t)
        ca = current_calJa(f, t)
        devs.append(_l2(ja.components - ca.components)
                    / _l2(ja.components))
    masses = np.asarray(sweep.masses, dtype=float)
    return {
        "masses": masses,
        "dev": np.asarray(devs),
        "slope": fit_slope(masses, devs),
    }
