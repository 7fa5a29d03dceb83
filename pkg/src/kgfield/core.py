"""Core field representations on a periodic box.

A field configuration is stored as two complex mode-coefficient grids
(phi_plus, phi_minus) over the momentum lattice of the box.  The field and
its time derivative at any time t are exact trigonometric sums

    psi(t, x)    = sum_k [phi+(k) e^{-i w_k (t - t0)}
                          + phi-(k) e^{+i w_k (t - t0)}] e^{i k.x}
    psidot(t, x) = sum_k [-i w_k phi+(k) e^{-i w_k (t - t0)}
                          + i w_k phi-(k) e^{+i w_k (t - t0)}] e^{i k.x}

with w_k = sqrt(|k|^2 + M^2).  Time evolution is exact mode re-phasing;
no time stepping is performed anywhere.

Conventions: hbar = c = 1, metric signature (-, +, ..., +), so a mode with
energy sign eps contributes coeff * e^{-i eps w t + i k.x} and the
contravariant on-shell vector that transforms under boosts is
p = (eps*w, kvec).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np


@dataclass(frozen=True)
class ModelParams:
    """Physical constants of the model.

    mass : M > 0, the mass parameter (inverse length in hbar = c = 1 units).
    kappa : global positive normalization of the inner-product family.
    a : inner-product family parameter, must satisfy -1 < a < 1.
    """

    mass: float
    kappa: float = 1.0
    a: float = 0.0

    def __post_init__(self):
        if not self.mass > 0:
            raise ValueError(f"mass must be positive, got {self.mass}")
        if not self.kappa > 0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")
        if not -1.0 < self.a < 1.0:
            raise ValueError(f"parameter a must lie in (-1, 1), got {self.a}")


class MomentumLattice:
    """Geometry of a periodic box and its FFT momentum lattice.

    The spatial grid is centered on the box midpoint: node j of axis i sits
    at x = -L_i/2 + j * (L_i / N_i).  Wavenumbers per axis are the usual
    FFT frequencies k_n = 2 pi n / L_i with n in [-N_i/2, N_i/2).
    """

    def __init__(self, box_lengths: Sequence[float], nodes: Sequence[int]):
        box_lengths = tuple(float(L) for L in np.atleast_1d(box_lengths))
        nodes = tuple(int(n) for n in np.atleast_1d(nodes))
        if len(box_lengths) != len(nodes):
            raise ValueError("box_lengths and nodes must have equal length")
        if not 1 <= len(nodes) <= 3:
            raise ValueError("dimension must be 1, 2 or 3")
        for L in box_lengths:
            if not L > 0:
                raise ValueError("box lengths must be positive")
        for n in nodes:
            if n < 4 or n % 2:
                raise ValueError("node counts must be even and >= 4")
        self.box_lengths = box_lengths
        self.nodes = nodes
        self.dim = len(nodes)
        self.spacings = tuple(L / n for L, n in zip(box_lengths, nodes))
        self.cell_volume = float(np.prod(self.spacings))
        self.volume = float(np.prod(box_lengths))
        self.total_nodes = int(np.prod(nodes))

        self._k_axes = tuple(
            2.0 * np.pi * np.fft.fftfreq(n, d=L / n)
            for L, n in zip(box_lengths, nodes)
        )
        kmesh = np.meshgrid(*self._k_axes, indexing="ij")
        self.k_grids = tuple(kmesh)
        self.ksq = sum(k * k for k in kmesh)
        # phase of e^{i k x0} with x0 = -L/2 on every axis; exact +-1 values
        phase = np.ones(nodes)
        for ax, kax in enumerate(self._k_axes):
            shape = [1] * self.dim
            shape[ax] = nodes[ax]
            n_int = np.rint(kax * box_lengths[ax] / (2.0 * np.pi)).astype(int)
            phase = phase * np.where(n_int % 2 == 0, 1.0, -1.0).reshape(shape)
        self._phase0 = phase
        self._omega_cache: dict[float, np.ndarray] = {}
        self._fine_cache: dict[int, "MomentumLattice"] = {}

    def __eq__(self, other):
        return (
            isinstance(other, MomentumLattice)
            and self.box_lengths == other.box_lengths
            and self.nodes == other.nodes
        )

    def __hash__(self):
        return hash((self.box_lengths, self.nodes))

    def __repr__(self):
        return f"MomentumLattice(L={self.box_lengths}, N={self.nodes})"

    def coordinate_axes(self) -> tuple[np.ndarray, ...]:
        return tuple(
            -L / 2.0 + dx * np.arange(n)
            for L, dx, n in zip(self.box_lengths, self.spacings, self.nodes)
        )

    def coordinate_grids(self) -> tuple[np.ndarray, ...]:
        return tuple(np.meshgrid(*self.coordinate_axes(), indexing="ij"))

    def omega(self, mass: float) -> np.ndarray:
        """Mode frequencies sqrt(|k|^2 + mass^2)."""
        w = self._omega_cache.get(mass)
        if w is None:
            w = np.sqrt(self.ksq + mass * mass)
            self._omega_cache[mass] = w
        return w

    def refined(self, factor: int) -> "MomentumLattice":
        """Lattice of the same box with factor-times the nodes per axis."""
        if factor == 1:
            return self
        lat = self._fine_cache.get(factor)
        if lat is None:
            lat = MomentumLattice(
                self.box_lengths, tuple(n * factor for n in self.nodes)
            )
            self._fine_cache[factor] = lat
        return lat

    def embed_modes(self, modes: np.ndarray, factor: int) -> np.ndarray:
        """Zero-pad mode coefficients onto the factor-refined lattice."""
        if factor == 1:
            return modes
        fine = self.refined(factor)
        out = np.zeros(fine.nodes, dtype=complex)
        slabs = []
        for n in self.nodes:
            idx = np.fft.fftfreq(n, d=1.0 / n).astype(int)  # signed indices
            slabs.append(idx)
        mesh = np.meshgrid(*slabs, indexing="ij")
        dest = tuple(m % fn for m, fn in zip(mesh, fine.nodes))
        out[dest] = modes
        return out

    def modes_to_grid(self, modes: np.ndarray, pad: int = 1) -> np.ndarray:
        """Evaluate sum_k modes(k) e^{i k.x} on the (optionally refined) grid."""
        if pad != 1:
            fine = self.refined(pad)
            return fine.modes_to_grid(self.embed_modes(modes, pad))
        return np.fft.ifftn(modes * self._phase0) * self.total_nodes

    def grid_to_modes(self, grid: np.ndarray) -> np.ndarray:
        """Inverse of modes_to_grid on the native grid."""
        return np.fft.fftn(grid) * (self._phase0 / self.total_nodes)

    def integrate(self, grid: np.ndarray):
        """Box integral of a sampled function (exact for band-limited data)."""
        return grid.sum() * self.cell_volume

    def min_image(self, delta: np.ndarray, axis: int) -> np.ndarray:
        """Wrap coordinate differences on one axis into [-L/2, L/2)."""
        L = self.box_lengths[axis]
        return (delta + L / 2.0) % L - L / 2.0


@dataclass
class LatticeField:
    """Field configuration as mode coefficients over a momentum lattice."""

    lattice: MomentumLattice
    params: ModelParams
    phi_plus: np.ndarray
    phi_minus: np.ndarray
    t0: float = 0.0

    def __post_init__(self):
        shape = tuple(self.lattice.nodes)
        if self.phi_plus.shape != shape or self.phi_minus.shape != shape:
            raise ValueError("coefficient grids must match the lattice shape")
        self.phi_plus = np.ascontiguousarray(self.phi_plus, dtype=complex)
        self.phi_minus = np.ascontiguousarray(self.phi_minus, dtype=complex)

    @property
    def omega(self) -> np.ndarray:
        return self.lattice.omega(self.params.mass)

    def mode_pair(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        """Re-phased (phi+, phi-) coefficient grids at time t."""
        ph = np.exp(-1j * self.omega * (t - self.t0))
        return self.phi_plus * ph, self.phi_minus * np.conj(ph)

    def mode_psi(self, t: float) -> np.ndarray:
        p, m = self.mode_pair(t)
        return p + m

    def mode_psidot(self, t: float) -> np.ndarray:
        p, m = self.mode_pair(t)
        return -1j * self.omega * (p - m)

    def mode_psiddot(self, t: float) -> np.ndarray:
        return -(self.omega ** 2) * self.mode_psi(t)

    def psi_grid(self, t: float, pad: int = 1) -> np.ndarray:
        return self.lattice.modes_to_grid(self.mode_psi(t), pad)

    def psidot_grid(self, t: float, pad: int = 1) -> np.ndarray:
        return self.lattice.modes_to_grid(self.mode_psidot(t), pad)

    def copy_with(self, **kw) -> "LatticeField":
        return replace(self, **kw)


def from_initial_data(
    lattice: MomentumLattice,
    params: ModelParams,
    psi0: np.ndarray,
    psidot0: np.ndarray,
    t0: float = 0.0,
) -> LatticeField:
    """Build the field with given value and time-derivative grids at t0.

    Splits the data into energy-sign sectors:
        phi+- = (psi_hat -+ ... ) / 2 = (psi_hat + i * psidot_hat / w) / 2
    so that the mode sums reproduce psi0 and psidot0 exactly at t0.
    """
    psi_hat = lattice.grid_to_modes(np.asarray(psi0, dtype=complex))
    psidot_hat = lattice.grid_to_modes(np.asarray(psidot0, dtype=complex))
    w = lattice.omega(params.mass)
    half = 0.5j * psidot_hat / w
    return LatticeField(lattice, params, 0.5 * psi_hat + half,
                        0.5 * psi_hat - half, t0)


def evaluate(field: LatticeField, t: float, pad: int = 1):
    """Pointwise (psi, psidot) samples on the spatial grid at time t."""
    return field.psi_grid(t, pad), field.psidot_grid(t, pad)


def apply_D_power(field: LatticeField, alpha: float) -> LatticeField:
    """Apply (-laplacian + M^2)^alpha, diagonal in mode space."""
    mult = (field.lattice.ksq + field.params.mass ** 2) ** alpha
    return field.copy_with(phi_plus=field.phi_plus * mult,
                           phi_minus=field.phi_minus * mult)


def apply_C(field: LatticeField) -> LatticeField:
    """Charge-grading operator: i D^{-1/2} d/dt, i.e. phi- flips sign."""
    return field.copy_with(phi_minus=-field.phi_minus)


def energy_split(field: LatticeField) -> tuple[LatticeField, LatticeField]:
    """Projections (psi + C psi)/2 and (psi - C psi)/2 onto the two sectors."""
    zero = np.zeros_like(field.phi_plus)
    plus = field.copy_with(phi_plus=field.phi_plus.copy(), phi_minus=zero)
    minus = field.copy_with(phi_plus=zero.copy(), phi_minus=field.phi_minus.copy())
    return plus, minus


def evolve(field: LatticeField, dt: float) -> LatticeField:
    """Shift the reference time by dt via exact mode re-phasing."""
    ph = np.exp(-1j * field.omega * dt)
    return field.copy_with(phi_plus=field.phi_plus * ph,
                           phi_minus=field.phi_minus * np.conj(ph),
                           t0=field.t0 + dt)


def kg_residual(field, t: float, _omega_scale: float = 1.0) -> float:
    """Max-norm residual of the wave equation at time t.

    The second time derivative is taken analytically mode-wise, the
    laplacian spectrally.  _omega_scale rescales the frequencies used in
    the time derivative only; it exists as a test hook so that a corrupted
    dispersion relation is observable (any value != 1 must make the
    residual large).
    """
    if isinstance(field, PlaneWaveField):
        res = 0.0
        for eps, kvec, coeff in field.modes:
            w = _omega_scale * np.sqrt(kvec @ kvec + field.params.mass ** 2)
            res += abs((-w * w + kvec @ kvec + field.params.mass ** 2) * coeff)
        return float(res)
    w2 = (_omega_scale * field.omega) ** 2
    modes = (-w2 + field.lattice.ksq + field.params.mass ** 2) * field.mode_psi(t)
    grid = field.lattice.modes_to_grid(modes)
    return float(np.abs(grid).max())


def random_field(
    lattice: MomentumLattice,
    params: ModelParams,
    seed: int,
    t0: float = 0.0,
    band_fraction: float = 0.5,
    scale: float = 1.0,
) -> LatticeField:
    """Random band-limited field, deterministic in the seed.

    Mode coefficients are complex Gaussian, damped smoothly and truncated
    beyond band_fraction of the lattice Nyquist wavenumber so that products
    of fields stay well resolved.
    """
    rng = np.random.default_rng(seed)
    shape = tuple(lattice.nodes)
    kmax = min(np.pi * n / L for n, L in zip(lattice.nodes, lattice.box_lengths))
    kband = band_fraction * kmax
    damp = np.exp(-(lattice.ksq / kband ** 2) ** 2)
    damp[lattice.ksq > kband ** 2] = 0.0
    draw = lambda: (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    norm = scale / np.sqrt(lattice.total_nodes)
    return LatticeField(lattice, params,
                        draw() * damp * norm, draw() * damp * norm, t0)


def gaussian_profile(
    lattice: MomentumLattice,
    sigma: float,
    center: Sequence[float] | None = None,
    kcarrier: Sequence[float] | None = None,
) -> np.ndarray:
    """Gaussian envelope exp(-|x - c|^2 / (4 sigma^2)) e^{i k0.x} on the grid.

    Distances are taken with the minimum-image rule so the profile is
    smooth across the periodic boundary.
    """
    if center is None:
        center = np.zeros(lattice.dim)
    if kcarrier is None:
        kcarrier = np.zeros(lattice.dim)
    center = np.asarray(center, dtype=float)
    kcarrier = np.asarray(kcarrier, dtype=float)
    grids = lattice.coordinate_grids()
    r2 = sum(
        lattice.min_image(x - c, ax) ** 2
        for ax, (x, c) in enumerate(zip(grids, center))
    )
    phase = sum(k * x for k, x in zip(kcarrier, grids))
    return np.exp(-r2 / (4.0 * sigma ** 2) + 1j * phase)


def positive_packet(lattice, params, sigma, kcarrier=None, center=None,
                    t0: float = 0.0) -> LatticeField:
    """Packet with support purely in the positive-energy sector."""
    g = gaussian_profile(lattice, sigma, center, kcarrier)
    phi_plus = lattice.grid_to_modes(g)
    return LatticeField(lattice, params, phi_plus,
                        np.zeros_like(phi_plus), t0)


def schrodinger_packet(lattice, params, sigma, kcarrier=None, center=None,
                       t0: float = 0.0) -> LatticeField:
    """Field with initial data (g, -i M g), the nonrelativistic ansatz."""
    g = gaussian_profile(lattice, sigma, center, kcarrier)
    return from_initial_data(lattice, params, g, -1j * params.mass * g, t0)


# ----------------------------------------------------------------------
# exact Lorentz boosts


def boost_matrix(beta: np.ndarray) -> np.ndarray:
    """Exact boost matrix into the frame moving with velocity +beta.

    Acts on contravariant vectors (v^0, v^1, ..., v^d).
    """
    beta = np.atleast_1d(np.asarray(beta, dtype=float))
    b2 = beta @ beta
    if b2 >= 1.0:
        raise ValueError("superluminal boost velocity")
    d = beta.size
    L = np.eye(d + 1)
    if b2 == 0.0:
        return L
    g = 1.0 / np.sqrt(1.0 - b2)
    L[0, 0] = g
    L[0, 1:] = -g * beta
    L[1:, 0] = -g * beta
    L[1:, 1:] = np.eye(d) + (g - 1.0) * np.outer(beta, beta) / b2
    return L


@dataclass(frozen=True)
class Boost:
    """Passive boost: coordinates of the frame moving with velocity beta."""

    beta: tuple[float, ...]

    def __post_init__(self):
        beta = tuple(float(b) for b in np.atleast_1d(self.beta))
        object.__setattr__(self, "beta", beta)
        if sum(b * b for b in beta) >= 1.0:
            raise ValueError("superluminal boost velocity")

    @property
    def matrix(self) -> np.ndarray:
        return boost_matrix(np.asarray(self.beta))

    @property
    def inverse(self) -> "Boost":
        return Boost(tuple(-b for b in self.beta))

    def transform_events(self, events: np.ndarray) -> np.ndarray:
        """Map event rows (t, x1..xd) to the boosted frame."""
        return np.asarray(events) @ self.matrix.T


def minkowski_dot(u: np.ndarray, v: np.ndarray):
    """eta(u, v) with signature (-, +, ..., +), vectors as (v^0, vec)."""
    u = np.asarray(u)
    v = np.asarray(v)
    return -u[..., 0] * v[..., 0] + np.sum(u[..., 1:] * v[..., 1:], axis=-1)


@dataclass
class PlaneWaveField:
    """Finite superposition of exact plane-wave modes (no lattice).

    Each mode is (eps, kvec, coeff) and contributes
        coeff * e^{-i eps w (t - t0) ... }  evaluated as  coeff * e^{i eta(p, x)}
    with p = (eps*w, kvec), so field values are scalars under exact boosts.
    """

    params: ModelParams
    modes: list[tuple[int, np.ndarray, complex]]
    dim: int

    def __post_init__(self):
        cleaned = []
        for eps, kvec, coeff in self.modes:
            if eps not in (-1, 1):
                raise ValueError("energy sign must be +1 or -1")
            kvec = np.atleast_1d(np.asarray(kvec, dtype=float))
            if kvec.size != self.dim:
                raise ValueError("mode wave vector has wrong dimension")
            cleaned.append((int(eps), kvec, complex(coeff)))
        self.modes = cleaned

    def mode_omega(self, kvec: np.ndarray) -> float:
        return float(np.sqrt(kvec @ kvec + self.params.mass ** 2))

    def mode_fourvectors(self) -> np.ndarray:
        """Rows p = (eps*w, kvec); these transform as contravariant vectors."""
        out = np.empty((len(self.modes), self.dim + 1))
        for i, (eps, kvec, _) in enumerate(self.modes):
            out[i, 0] = eps * self.mode_omega(kvec)
            out[i, 1:] = kvec
        return out

    def evaluate_at(self, events: np.ndarray) -> np.ndarray:
        """Field values at event rows (t, x1..xd)."""
        events = np.atleast_2d(np.asarray(events, dtype=float))
        vals = np.zeros(events.shape[0], dtype=complex)
        for (eps, kvec, coeff), p in zip(self.modes, self.mode_fourvectors()):
            vals += coeff * np.exp(1j * minkowski_dot(p, events))
        return vals

    def psic_at(self, events: np.ndarray) -> np.ndarray:
        """Values of the charge-graded field i D^{-1/2} psidot."""
        events = np.atleast_2d(np.asarray(events, dtype=float))
        vals = np.zeros(events.shape[0], dtype=complex)
        for (eps, kvec, coeff), p in zip(self.modes, self.mode_fourvectors()):
            vals += eps * coeff * np.exp(1j * minkowski_dot(p, events))
        return vals


def boost_planewave(field: PlaneWaveField, boost: Boost) -> PlaneWaveField:
    """Exact boost: transform each mode's on-shell four-vector.

    The coefficient is unchanged (field values are frame scalars) and the
    mass shell is preserved exactly up to rounding.
    """
    if isinstance(field, LatticeField):
        raise TypeError(
            "lattice fields cannot be boosted; the mode lattice is tied to "
            "the box frame.  Use PlaneWaveField or AmplitudeField."
        )
    L = boost.matrix
    new_modes = []
    for (eps, kvec, coeff), p in zip(field.modes, field.mode_fourvectors()):
        pp = L @ p
        new_modes.append((eps, pp[1:].copy(), coeff))
        w_new = eps * pp[0]
        if not w_new > 0:
            raise ValueError("boost produced a non-positive frequency")
    return PlaneWaveField(field.params, new_modes, field.dim)
