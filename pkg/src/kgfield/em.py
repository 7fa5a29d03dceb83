"""Minimal coupling to stationary magnetic backgrounds on small lattices.

With a static vector potential and no scalar potential the gauged wave
operator stays Hermitian and time-independent, so the whole free-field
construction carries over with D replaced by D_q.  Fractional powers of
a non-diagonal operator need full spectral data, hence dense
eigendecomposition and the deliberately small lattices.

Nonstationary backgrounds are covered only algebraically: a manufactured
solution pushed through the scalar-potential phase map must satisfy the
transformed equation identically, and we measure that residual at
sampled events.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import ModelParams, MomentumLattice

MAX_NODES = 32


@dataclass(frozen=True)
class EMBackground:
    """Static vector potential sampled on the lattice, plus the coupling.

    Stationary-magnetic mode only: no scalar potential, time-independent
    A.  The scalar-potential physics lives in the manufactured-solution
    check, not here.
    """

    avec: np.ndarray        # shape (d, *nodes), real
    q: float

    def __post_init__(self):
        a = np.asarray(self.avec, dtype=float)
        if a.ndim < 2 or a.shape[0] != a.ndim - 1:
            raise ValueError("avec must have shape (d, *spatial nodes)")
        object.__setattr__(self, "avec", a)

    @property
    def dim(self) -> int:
        return self.avec.shape[0]


def _check_lattice(bg: EMBackground, lattice: MomentumLattice):
    if lattice.dim != 2:
        raise ValueError(
            "magnetic coupling needs two spatial dimensions; three makes "
            "the dense operator exceed desk scale and is not supported")
    if bg.dim != lattice.dim:
        raise ValueError("background dimension does not match the lattice")
    if tuple(bg.avec.shape[1:]) != tuple(lattice.nodes):
        raise ValueError("background grid does not match the lattice")
    if max(lattice.nodes) > MAX_NODES:
        raise ValueError(
            f"dense operator capped at {MAX_NODES} nodes per axis")


@dataclass(frozen=True)
class DenseOperator:
    """Hermitian lattice operator with its full eigensystem."""

    lattice: MomentumLattice
    params: ModelParams
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray       # columns, orthonormal
    sym_residual: float

    def apply(self, grid: np.ndarray) -> np.ndarray:
        return (self.matrix @ grid.ravel()).reshape(grid.shape)

    def apply_function(self, fn, grid: np.ndarray) -> np.ndarray:
        coeff = self.eigenvectors.conj().T @ grid.ravel()
        out = self.eigenvectors @ (fn(self.eigenvalues) * coeff)
        return out.reshape(grid.shape)

    def apply_power(self, alpha: float, grid: np.ndarray) -> np.ndarray:
        return self.apply_function(lambda lam: lam ** alpha, grid)

    def matrix_power(self, alpha: float) -> np.ndarray:
        return (self.eigenvectors * self.eigenvalues ** alpha) \
            @ self.eigenvectors.conj().T


def _gauged_laplacian_columns(bg: EMBackground,
                              lattice: MomentumLattice) -> np.ndarray:
    """Apply -(grad - iqA)^2 to every basis column at once."""
    n = lattice.total_nodes
    shape = (n,) + tuple(lattice.nodes)
    basis = np.eye(n, dtype=complex).reshape(shape)
    axes = tuple(range(1, lattice.dim + 1))
    # the centering phases cancel in any multiplier sandwich, so raw
    # batched FFTs realize the same spectral derivative as the lattice
    # methods
    hat = np.fft.fftn(basis, axes=axes)
    total = np.zeros(shape, dtype=complex)
    for i in range(lattice.dim):
        k = lattice.k_grids[i]
        g = np.fft.ifftn(1j * k * hat, axes=axes) - 1j * bg.q * bg.avec[i] * basis
        gh = np.fft.fftn(g, axes=axes)
        total += np.fft.ifftn(1j * k * gh, axes=axes) - 1j * bg.q * bg.avec[i] * g
    return -total.reshape(n, n).T        # columns are images of basis vectors


def build_Dq(bg: EMBackground, lattice: MomentumLattice,
             params: ModelParams) -> DenseOperator:
    """Assemble -(grad - iqA)^2 + M^2 densely and eigendecompose.

    The assembled matrix must already be Hermitian to rounding (spectral
    derivatives are exactly anti-Hermitian and real multiplication
    operators exactly Hermitian); a larger residual signals a
    discretization bug.  The symmetrized operator is positive with all
    eigenvalues at least M^2.
    """
    _check_lattice(bg, lattice)
    h = _gauged_laplacian_columns(bg, lattice)
    h[np.diag_indices_from(h)] += params.mass ** 2
    residual = float(np.abs(h - h.conj().T).max() / max(np.abs(h).max(), 1.0))
    if residual > 1e-10:
        raise FloatingPointError(
            f"assembled operator is not Hermitian (residual {residual:.3e})")
    h = 0.5 * (h + h.conj().T)
    lam, vec = np.linalg.eigh(h)
    floor = params.mass ** 2 * (1.0 - 1e-9)
    if lam[0] < floor:
        raise FloatingPointError(
            f"eigenvalue {lam[0]!r} below the mass-squared floor")
    return DenseOperator(lattice, params, h, lam, vec, residual)


def em_evolve(psi0: np.ndarray, psidot0: np.ndarray, op: DenseOperator,
              t: float) -> tuple:
    """Evolve second-order initial data through the eigenbasis."""
    if psi0.shape != tuple(op.lattice.nodes):
        raise ValueError("initial data does not match the operator lattice")
    omega = np.sqrt(op.eigenvalues)
    c = op.eigenvectors.conj().T @ psi0.ravel()
    cdot = op.eigenvectors.conj().T @ psidot0.ravel()
    wt = omega * t
    psi = op.eigenvectors @ (c * np.cos(wt) + cdot * np.sin(wt) / omega)
    psidot = op.eigenvectors @ (-c * omega * np.sin(wt) + cdot * np.cos(wt))
    return psi.reshape(psi0.shape), psidot.reshape(psi0.shape)


def em_inner(pair1: tuple, pair2: tuple, op: DenseOperator) -> complex:
    """The a-family inner product with D replaced by the gauged operator."""
    psi1, psidot1 = pair1
    psi2, psidot2 = pair2
    lat = op.lattice
    params = op.params
    cell = lat.cell_volume
    d_half = op.apply_power(0.5, psi2)
    d_mhalf = op.apply_power(-0.5, psidot2)
    term = (np.vdot(psi1, d_half) + np.vdot(psidot1, d_mhalf)
            + 1j * params.a * (np.vdot(psi1, psidot2)
                               - np.vdot(psidot1, psi2)))
    return complex(params.kappa / (2.0 * params.mass) * cell * term)


def em_inner_and_evolve(psi0: np.ndarray, psidot0: np.ndarray,
                        op: DenseOperator, t: float) -> tuple:
    """Evolve to time t and evaluate the conserved inner product there."""
    pair = em_evolve(psi0, psidot0, op, t)
    return pair, em_inner(pair, pair, op)


# ----------------------------------------------------------------- gauge map


def em_gauge_residual(phi_profile, psi_solution, sample_events, *,
                      avec_profile=None, q: float, mass: float,
                      t0: float = 0.0) -> float:
    """Residual of the scalar-potential phase map on a manufactured field.

    phi_profile and psi_solution are sympy expressions in the symbols
    (x0, x1, x2); avec_profile, when given, is a pair of such
    expressions.  The manufactured field defines the source
    s = psi'' + 2iq phi psi' + (gauged spatial operator) psi, and the
    phase-mapped field chi = u psi with u = exp[iq Int_{t0}^{x0} phi]
    must satisfy chi'' + u (-(grad - iqA)^2 + M^2) psi = u s as an
    algebraic identity.  Returns the largest residual over the events.
    """
    import sympy

    x0, x1, x2 = sympy.symbols("x0 x1 x2", real=True)
    coords = (x0, x1, x2)
    tau = sympy.Symbol("tau", real=True)
    phi = sympy.sympify(phi_profile)
    psi = sympy.sympify(psi_solution)
    if avec_profile is None:
        avec = (sympy.Integer(0), sympy.Integer(0))
    else:
        avec = tuple(sympy.sympify(c) for c in avec_profile)

    def gauged_square(f):
        out = sympy.Integer(0)
        for xi, ai in zip((x1, x2), avec):
            g = sympy.diff(f, xi) - sympy.I * q * ai * f
            out += sympy.diff(g, xi) - sympy.I * q * ai * g
        return out

    u = sympy.exp(sympy.I * q
                  * sympy.integrate(phi.subs(x0, tau), (tau, t0, x0)))
    source = (sympy.diff(psi, x0, 2) + 2 * sympy.I * q * phi * sympy.diff(psi, x0)
              - gauged_square(psi)
              + (sympy.I * q * sympy.diff(phi, x0) - q ** 2 * phi ** 2
                 + mass ** 2) * psi)
    chi = u * psi
    lhs = sympy.diff(chi, x0, 2) + u * (-gauged_square(psi) + mass ** 2 * psi)
    residual = lhs - u * source
    fn = sympy.lambdify(coords, residual, modules="numpy")
    worst = 0.0
    for ev in sample_events:
        try:
            with np.errstate(all="ignore"):
                val = complex(fn(*(np.float64(c) for c in ev)))
        except ZeroDivisionError:
            raise FloatingPointError("manufactured solution is not finite "
                                     f"at event {tuple(ev)!r}") from None
        if not np.isfinite(val.real) or not np.isfinite(val.imag):
            raise FloatingPointError("manufactured solution is not finite "
                                     f"at event {tuple(ev)!r}")
        worst = max(worst, abs(val))
    return worst
