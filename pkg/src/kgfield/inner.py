"""Inner products on the space of field configurations.

Three routes are implemented and cross-checked in the tests:

* kg_inner: the charge-type sesquilinear form, evaluated by grid
  quadrature of i g [<psi1|psidot2> - <psidot1|psi2>].  Indefinite.
* inner_a: the positive-definite family, evaluated term by term via mode
  sums of (kappa/2M) {<psi1|D^{1/2} psi2> + <psidot1|D^{-1/2} psidot2>
  + i a [<psi1|psidot2> - <psidot1|psi2>]}.  Requires -1 < a < 1.
* inner_a_split: the same quantity assembled from the energy-sign split,
  kappa [(1+a) kg(psi1+, psi2+) - (1-a) kg(psi1-, psi2-)] at g = 1/(2M),
  which exercises kg_inner on definite-sign fields.

All three are invariant under the exact time evolution.
"""

from __future__ import annotations

import numpy as np

from .core import LatticeField, energy_split


def _l2_mode(lattice, f_modes, g_modes) -> complex:
    """<f|g> of the box from mode coefficients."""
    return complex(np.vdot(f_modes, g_modes)) * lattice.volume


def _check_pair(f1: LatticeField, f2: LatticeField):
    if f1.lattice != f2.lattice:
        raise ValueError("fields live on different lattices")
    if f1.params != f2.params:
        raise ValueError("fields carry different model parameters")


def kg_inner(f1: LatticeField, f2: LatticeField, g: float,
             t: float | None = None) -> complex:
    """Charge-type form i g [<psi1|psidot2> - <psidot1|psi2>] at time t.

    Evaluated by grid quadrature (exact for band-limited fields).  The
    normalization g > 0 is supplied by the caller; the value is
    independent of t for solutions of the wave equation.
    """
    _check_pair(f1, f2)
    if not g > 0:
        raise ValueError("normalization g must be positive")
    if t is None:
        t = f1.t0
    lat = f1.lattice
    psi1, psidot1 = f1.psi_grid(t), f1.psidot_grid(t)
    psi2, psidot2 = f2.psi_grid(t), f2.psidot_grid(t)
    cell = lat.cell_volume
    bra_ket = np.vdot(psi1, psidot2) * cell
    ket_bra = np.vdot(psidot1, psi2) * cell
    return 1j * g * (bra_ket - ket_bra)


def inner_a(f1: LatticeField, f2: LatticeField,
            t: float | None = None) -> complex:
    """Positive-definite inner product of the family, via mode sums at t."""
    _check_pair(f1, f2)
    p = f1.params
    if t is None:
        t = f1.t0
    lat = f1.lattice
    w = f1.omega
    psi1, psi2 = f1.mode_psi(t), f2.mode_psi(t)
    psidot1, psidot2 = f1.mode_psidot(t), f2.mode_psidot(t)
    term_D = _l2_mode(lat, psi1, w * psi2)
    term_Dinv = _l2_mode(lat, psidot1, psidot2 / w)
    term_kg = _l2_mode(lat, psi1, psidot2) - _l2_mode(lat, psidot1, psi2)
    return (p.kappa / (2.0 * p.mass)) * (term_D + term_Dinv + 1j * p.a * term_kg)


def inner_a_split(f1: LatticeField, f2: LatticeField,
                  t: float | None = None) -> complex:
    """Same inner product assembled from the energy-sign projections."""
    _check_pair(f1, f2)
    p = f1.params
    g = 1.0 / (2.0 * p.mass)
    p1, m1 = energy_split(f1)
    p2, m2 = energy_split(f2)
    return p.kappa * ((1.0 + p.a) * kg_inner(p1, p2, g, t)
                      - (1.0 - p.a) * kg_inner(m1, m2, g, t))


def inner_0(f1: LatticeField, f2: LatticeField,
            t: float | None = None) -> complex:
    """The a = 0 member of the family, regardless of the fields' own a.

    Used wherever position wavefunctions are involved: their Parseval
    identity singles out this member.
    """
    _check_pair(f1, f2)
    p = f1.params
    if t is None:
        t = f1.t0
    lat = f1.lattice
    w = f1.omega
    p1, m1 = f1.mode_pair(t)
    p2, m2 = f2.mode_pair(t)
    acc = _l2_mode(lat, p1, w * p2) + _l2_mode(lat, m1, w * m2)
    return (p.kappa / p.mass) * acc


def norm_a(f: LatticeField, t: float | None = None) -> float:
    val = inner_a(f, f, t)
    return float(np.sqrt(max(val.real, 0.0)))


def _is_real_data(f: LatticeField, tol: float = 1e-10) -> bool:
    """True if the field has real value and time-derivative data at t0.

    Equivalent to phi-(k) = conj(phi+(-k)) on the lattice, checked with
    the index negation map (Nyquist rows are self-paired).
    """
    rev = tuple(
        (np.arange(n)[::-1] + 1) % n for n in f.lattice.nodes
    )  # index map n -> -n mod N
    mesh = np.meshgrid(*rev, indexing="ij")
    mirrored = np.conj(f.phi_plus[tuple(mesh)])
    scale = max(np.abs(f.phi_plus).max(), np.abs(f.phi_minus).max(), 1e-300)
    return bool(np.abs(f.phi_minus - mirrored).max() <= tol * scale)


def wald_inner(f1: LatticeField, f2: LatticeField,
               t: float | None = None) -> float:
    """Real-field route: Re of the charge form on positive projections.

    Defined for fields with real initial data only.  With g = 1/M this
    reproduces the a = 0 member of the family at kappa = 1, which the
    tests assert.
    """
    _check_pair(f1, f2)
    if not (_is_real_data(f1) and _is_real_data(f2)):
        raise ValueError("wald_inner requires fields with real initial data")
    g = 1.0 / f1.params.mass
    p1, _ = energy_split(f1)
    p2, _ = energy_split(f2)
    return float(kg_inner(p1, p2, g, t).real)
