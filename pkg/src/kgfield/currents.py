"""Conserved current, probability current, densities, and closed-form oracles.

Two current families live here.  current_Ja is the conserved, covariant
one built from the charge-graded field; current_calJa is the genuinely
probabilistic one built from quarter-power frequency weights, which is
real and nonnegative in its time slot but neither conserved nor
covariant.  Closed forms for two-mode superpositions make both failure
modes quantitative.

Quadratic products double the spectral bandwidth, so every grid current
is evaluated on a 2x zero-padded lattice and spatial derivatives are
taken spectrally there; continuity then holds at rounding level instead
of at aliasing level.  Time derivatives always come from mode phases.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    Boost,
    LatticeField,
    ModelParams,
    PlaneWaveField,
    boost_planewave,
    minkowski_dot,
)

PAD = 2   # bandwidth factor for quadratic products


@dataclass
class FourVectorGrid:
    """d+1 component grids sampled on an evaluation lattice at fixed t."""

    components: np.ndarray           # shape (d+1, *grid_shape)
    lattice: "object"                # lattice the grids are sampled on
    t: float
    kind: str                        # twisted_chiral | probability | rosenstein_horwitz

    def __post_init__(self):
        if self.components.shape[0] != len(self.lattice.nodes) + 1:
            raise ValueError("component count must be d + 1")


def _padded(field: LatticeField, modes: np.ndarray, pad: int = PAD):
    return field.lattice.modes_to_grid(modes, pad)


def _tilde_modes(field: LatticeField, t: float):
    """Mode pair of the a-twisted combination (charge-graded + a * field)."""
    p, m = field.mode_pair(t)
    a = field.params.a
    return (1.0 + a) * p, -(1.0 - a) * m


def current_Ja(field: LatticeField, t: float, pad: int = PAD) -> FourVectorGrid:
    """Conserved covariant current on the padded grid.

    J^mu = -(i kappa / 2M) [psi* d^mu psi_tilde - (d^mu psi*) psi_tilde],
    with the tilde field carrying sector weights (1+a), -(1-a).
    """
    lat = field.lattice
    params = field.params
    d = len(lat.nodes)
    pm_p, pm_m = field.mode_pair(t)
    psi_modes = pm_p + pm_m
    tp, tm = _tilde_modes(field, t)
    til_modes = tp + tm
    w = field.omega
    psidot_modes = -1j * w * (pm_p - pm_m)
    tildot_modes = -1j * w * (tp - tm)

    psi = _padded(field, psi_modes, pad)
    til = _padded(field, til_modes, pad)
    psidot = _padded(field, psidot_modes, pad)
    tildot = _padded(field, tildot_modes, pad)

    pref = -0.5j * params.kappa / params.mass
    comps = np.empty((d + 1,) + psi.shape, dtype=complex)
    # d^0 = -d_0: both derivative hits flip sign
    comps[0] = pref * (-np.conj(psi) * tildot + np.conj(psidot) * til)
    for i in range(d):
        k = lat.k_grids[i]
        dpsi = _padded(field, 1j * k * psi_modes, pad)
        dtil = _padded(field, 1j * k * til_modes, pad)
        comps[1 + i] = pref * (np.conj(psi) * dtil - np.conj(dpsi) * til)
    ev_lat = lat if pad == 1 else lat.refined(pad)
    return FourVectorGrid(comps, ev_lat, float(t), "twisted_chiral")


def density_Ja_direct(field: LatticeField, t: float, pad: int = PAD) -> np.ndarray:
    """Time slot of the conserved current from the quadratic-form route.

    (kappa/2M){psi* D^{1/2} psi + psidot* D^{-1/2} psidot
               + i a [psi* psidot - psidot* psi]};
    used as an independent cross-check of current_Ja's component 0.
    """
    params = field.params
    w = field.omega
    psi_m = field.mode_psi(t)
    psidot_m = field.mode_psidot(t)
    psi = _padded(field, psi_m, pad)
    psidot = _padded(field, psidot_m, pad)
    dhalf = _padded(field, w * psi_m, pad)
    dminus = _padded(field, psidot_m / w, pad)
    quad = (np.conj(psi) * dhalf + np.conj(psidot) * dminus
            + 1j * params.a * (np.conj(psi) * psidot - np.conj(psidot) * psi))
    return 0.5 * params.kappa / params.mass * quad


def _quarter_bundles(field: LatticeField, t: float, pad: int):
    """Grids of D^{1/4}/D^{-1/4} images of the field and its graded partner.

    Returns dict with value grids, their spatial gradients, and their
    time derivatives, all on the padded lattice.
    """
    lat = field.lattice
    w = field.omega
    p, m = field.mode_pair(t)
    psi_m = p + m
    psic_m = p - m
    psidot_m = -1j * w * (p - m)
    psicdot_m = -1j * w * (p + m)   # d_t psi_c = i D^{-1/2} psiddot = -i D^{1/2} psi

    out = {}
    for name, modes, power in (
        ("P", psi_m, 0.25), ("Pc", psic_m, 0.25),
        ("Q", psi_m, -0.25), ("Qc", psic_m, -0.25),
    ):
        wm = w ** (2 * power)       # (k^2 + M^2)^{power} as omega^{2 power}
        scaled = wm * modes
        dot = wm * (psidot_m if name in ("P", "Q") else psicdot_m)
        out[name] = lat.modes_to_grid(scaled, pad)
        out[name + "_dot"] = lat.modes_to_grid(dot, pad)
        out[name + "_grad"] = [lat.modes_to_grid(1j * k * scaled, pad)
                               for k in lat.k_grids]
    return out


def current_calJa(field: LatticeField, t: float, pad: int = PAD) -> FourVectorGrid:
    """Probability current: real-valued, nonnegative time slot, not conserved.

    (kappa/2M) Im{ P* d^mu Qc - Pc (d^mu Q)*
                   + a [P* d^mu Q - Pc (d^mu Qc)*] }
    with P = D^{1/4} psi, Pc = D^{1/4} psi_c, Q = D^{-1/4} psi,
    Qc = D^{-1/4} psi_c.
    """
    lat = field.lattice
    params = field.params
    d = len(lat.nodes)
    b = _quarter_bundles(field, t, pad)
    pref = 0.5 * params.kappa / params.mass

    def term(mu):
        if mu == 0:
            dQ, dQc = -b["Q_dot"], -b["Qc_dot"]     # d^0 = -d_0
        else:
            dQ, dQc = b["Q_grad"][mu - 1], b["Qc_grad"][mu - 1]
        s = (np.conj(b["P"]) * dQc - b["Pc"] * np.conj(dQ)
             + params.a * (np.conj(b["P"]) * dQ - b["Pc"] * np.conj(dQc)))
        return pref * np.imag(s)

    shape = b["P"].shape
    comps = np.empty((d + 1,) + shape, dtype=float)
    for mu in range(d + 1):
        comps[mu] = term(mu)
    ev_lat = lat if pad == 1 else lat.refined(pad)
    return FourVectorGrid(comps, ev_lat, float(t), "probability")


def rho_a(field: LatticeField, t: float, pad: int = 1) -> np.ndarray:
    """Probability density: (kappa/2M){|D^{1/4}psi|^2 + |D^{1/4}psi_c|^2
    + 2a Re[(D^{1/4}psi)* D^{1/4}psi_c]}.

    Nonnegative by the arithmetic-geometric inequality with |a| < 1;
    rounding negatives below 1e-14 of the max are clipped, anything
    larger raises.
    """
    lat = field.lattice
    params = field.params
    w = field.omega
    p, m = field.mode_pair(t)
    P = lat.modes_to_grid(w ** 0.5 * (p + m), pad)
    Pc = lat.modes_to_grid(w ** 0.5 * (p - m), pad)
    dens = (np.abs(P) ** 2 + np.abs(Pc) ** 2
            + 2.0 * params.a * np.real(np.conj(P) * Pc))
    dens *= 0.5 * params.kappa / params.mass
    top = dens.max() if dens.size else 0.0
    floor = -1e-14 * max(top, 1e-300)
    if dens.min() < floor:
        raise FloatingPointError("density came out negative beyond rounding")
    return np.clip(dens, 0.0, None)


def rho_a_symmetrized(field: LatticeField, t: float, pad: int = 1) -> np.ndarray:
    """Same density via the half-angle mixture route.

    psi' = alpha_+ psi + i alpha_- D^{-1/2} psidot with
    alpha_pm = (sqrt(1+a) +/- sqrt(1-a))/2 turns the density into a plain
    two-term sum of squares; used as an independent oracle for rho_a.
    """
    lat = field.lattice
    params = field.params
    w = field.omega
    ap = 0.5 * (np.sqrt(1 + params.a) + np.sqrt(1 - params.a))
    am = 0.5 * (np.sqrt(1 + params.a) - np.sqrt(1 - params.a))
    p, m = field.mode_pair(t)
    psi_m = p + m
    psic_m = p - m                      # i D^{-1/2} psidot
    prime = ap * psi_m + am * psic_m
    primedot = -1j * w * (ap * (p - m) + am * (p + m))
    A = lat.modes_to_grid(w ** 0.5 * prime, pad)
    B = lat.modes_to_grid(primedot / w ** 0.5, pad)
    return 0.5 * params.kappa / params.mass * (np.abs(A) ** 2 + np.abs(B) ** 2)


def total_probability(field: LatticeField, t: float) -> float:
    """Box integral of the probability density (exact on the native grid)."""
    return float(field.lattice.integrate(rho_a(field, t)))


def split_re_im(field: LatticeField, t: float, pad: int = PAD):
    """Real and imaginary parts of the conserved current as separate grids.

    re^mu = (kappa/M) Im[(1+a) psi+* d^mu psi+ - (1-a) psi-* d^mu psi-
                         + a W^mu],
    im^mu = (kappa/M) Re W^mu,  W^mu = psi+* d^mu psi- - (d^mu psi+)* psi-.

    im vanishes identically for definite-charge fields and for real-data
    fields whose Nyquist rows are empty (an occupied Nyquist bin has no
    conjugate partner on the lattice, so the padded interpolant of a
    "real" field acquires spurious imaginary parts between coarse nodes).
    """
    lat = field.lattice
    params = field.params
    d = len(lat.nodes)
    pm_p, pm_m = field.mode_pair(t)
    w = field.omega

    def grids(modes, dotmodes):
        val = lat.modes_to_grid(modes, pad)
        der = [-lat.modes_to_grid(dotmodes, pad)]      # d^0 = -d_0
        der += [lat.modes_to_grid(1j * k * modes, pad) for k in lat.k_grids]
        return val, der

    plus, dplus = grids(pm_p, -1j * w * pm_p)
    minus, dminus = grids(pm_m, 1j * w * pm_m)

    shape = plus.shape
    re = np.empty((d + 1,) + shape, dtype=float)
    im = np.empty((d + 1,) + shape, dtype=float)
    a = params.a
    fac = params.kappa / params.mass
    for mu in range(d + 1):
        W = np.conj(plus) * dminus[mu] - np.conj(dplus[mu]) * minus
        re[mu] = fac * (np.imag((1 + a) * np.conj(plus) * dplus[mu]
                                - (1 - a) * np.conj(minus) * dminus[mu])
                        + a * np.imag(W))
        im[mu] = fac * np.real(W)
    ev_lat = lat if pad == 1 else lat.refined(pad)
    return (FourVectorGrid(re, ev_lat, float(t), "twisted_chiral"),
            FourVectorGrid(im, ev_lat, float(t), "twisted_chiral"))


def _spectral_divergence(lattice, comps_spatial):
    """Divergence of spatial component grids, taken on their own lattice."""
    out = 0.0
    for i, comp in enumerate(comps_spatial):
        modes = lattice.grid_to_modes(np.asarray(comp, dtype=complex))
        out = out + lattice.modes_to_grid(1j * lattice.k_grids[i] * modes)
    return out


def continuity_residual(field: LatticeField, t: float,
                        which: str = "J_a", pad: int = PAD) -> float:
    """Max-norm of d_mu (current)^mu relative to the current's max-norm.

    Time derivative is exact (mode phases); spatial divergence is
    spectral on the padded grid where the quadratic product is fully
    resolved.
    """
    lat = field.lattice
    params = field.params
    if which == "J_a":
        cur = current_Ja(field, t, pad)
        pm_p, pm_m = field.mode_pair(t)
        psi_m = pm_p + pm_m
        tp, tm = _tilde_modes(field, t)
        til_m = tp + tm
        w2 = field.omega ** 2
        psi = _padded(field, psi_m, pad)
        til = _padded(field, til_m, pad)
        psidd = _padded(field, -w2 * psi_m, pad)
        tildd = _padded(field, -w2 * til_m, pad)
        pref = 0.5j * params.kappa / params.mass
        dj0dt = pref * (np.conj(psi) * tildd - np.conj(psidd) * til)
    elif which == "calJ_a":
        cur = current_calJa(field, t, pad)
        b = _quarter_bundles(field, t, pad)
        pref = 0.5 * params.kappa / params.mass
        s = (np.conj(b["P_dot"]) * b["Pc"] + np.conj(b["P"]) * b["Pc_dot"])
        dj0dt = pref * (2.0 * np.real(np.conj(b["P"]) * b["P_dot"])
                        + 2.0 * np.real(np.conj(b["Pc"]) * b["Pc_dot"])
                        + 2.0 * params.a * np.real(s))
    else:
        raise ValueError("which must be 'J_a' or 'calJ_a'")
    div = _spectral_divergence(cur.lattice, list(cur.components[1:]))
    resid = np.asarray(dj0dt + div)
    scale = max(np.abs(cur.components).max(), 1e-300)
    return float(np.abs(resid).max() / scale)


def divergence_grid(field: LatticeField, t: float,
                    which: str = "calJ_a", pad: int = PAD) -> np.ndarray:
    """The pointwise d_mu (current)^mu grid (not normalized)."""
    params = field.params
    if which == "calJ_a":
        cur = current_calJa(field, t, pad)
        b = _quarter_bundles(field, t, pad)
        pref = 0.5 * params.kappa / params.mass
        s = (np.conj(b["P_dot"]) * b["Pc"] + np.conj(b["P"]) * b["Pc_dot"])
        dj0dt = pref * (2.0 * np.real(np.conj(b["P"]) * b["P_dot"])
                        + 2.0 * np.real(np.conj(b["Pc"]) * b["Pc_dot"])
                        + 2.0 * params.a * np.real(s))
    else:
        raise ValueError("divergence_grid supports the probability current")
    div = _spectral_divergence(cur.lattice, list(cur.components[1:]))
    return np.real(dj0dt + div)


# ------------------------------------------------------------ plane waves


def planewave_current_Ja(field: PlaneWaveField, events: np.ndarray) -> np.ndarray:
    """Closed-form conserved current of a finite plane-wave superposition.

    J^mu(x) = (kappa/2M) sum_{lm} conj(c_l) c_m (eps_m + a)
              (p_l + p_m)^mu e^{i(eta_m - eta_l)}.
    Returns an (n_events, d+1) complex array of contravariant components.
    """
    events = np.atleast_2d(np.asarray(events, dtype=float))
    params = field.params
    fv = field.mode_fourvectors()                    # rows (eps w, k)
    coeffs = np.array([c for _, _, c in field.modes])
    eps = np.array([e for e, _, _ in field.modes], dtype=float)
    # eta(p, x) = -p^0 t + k.x per event and mode
    eta = events[:, 1:] @ fv[:, 1:].T - events[:, :1] * fv[:, 0][None, :]
    phase = np.exp(1j * eta)                         # (nev, nm)
    pref = 0.5 * params.kappa / params.mass
    nm = len(coeffs)
    d1 = fv.shape[1]
    out = np.zeros((events.shape[0], d1), dtype=complex)
    for l in range(nm):
        for m in range(nm):
            amp = np.conj(coeffs[l]) * coeffs[m] * (eps[m] + params.a)
            psum = fv[l] + fv[m]
            cross = np.conj(phase[:, l]) * phase[:, m]
            out += pref * amp * cross[:, None] * psum[None, :]
    return out


def planewave_current_calJa(field: PlaneWaveField, events: np.ndarray) -> np.ndarray:
    """Closed-form probability current of a plane-wave superposition.

    Same four-bundle structure as the grid version, with quarter powers
    of the mode frequencies.  Returns (n_events, d+1) real components.
    """
    events = np.atleast_2d(np.asarray(events, dtype=float))
    params = field.params
    fv = field.mode_fourvectors()
    coeffs = np.array([c for _, _, c in field.modes])
    eps = np.array([e for e, _, _ in field.modes], dtype=float)
    om = np.array([field.mode_omega(k) for _, k, _ in field.modes])
    eta = events[:, 1:] @ fv[:, 1:].T - events[:, :1] * fv[:, 0][None, :]
    phase = np.exp(1j * eta)

    bundles = {
        "P": om ** 0.5 * coeffs,
        "Pc": eps * om ** 0.5 * coeffs,
        "Q": om ** -0.5 * coeffs,
        "Qc": eps * om ** -0.5 * coeffs,
    }

    def value(name):
        return phase @ bundles[name]

    def deriv(name):
        # contravariant d^mu of the bundle: i p^mu per mode
        return np.stack([phase @ (1j * fv[:, mu] * bundles[name])
                         for mu in range(fv.shape[1])], axis=-1)

    P, Pc = value("P"), value("Pc")
    dQ, dQc = deriv("Q"), deriv("Qc")
    s = (np.conj(P)[:, None] * dQc - Pc[:, None] * np.conj(dQ)
         + params.a * (np.conj(P)[:, None] * dQ
                       - Pc[:, None] * np.conj(dQc)))
    return 0.5 * params.kappa / params.mass * np.imag(s)


# -------------------------------------------------------- two-mode oracle


@dataclass(frozen=True)
class TwoModeOracle:
    """Two positive-energy plane waves with everything in closed form."""

    k1: np.ndarray
    k2: np.ndarray
    c1: complex
    c2: complex
    params: ModelParams

    def __post_init__(self):
        object.__setattr__(self, "k1", np.atleast_1d(np.asarray(self.k1, float)))
        object.__setattr__(self, "k2", np.atleast_1d(np.asarray(self.k2, float)))
        if self.k1.shape != self.k2.shape:
            raise ValueError("wave vectors must share a dimension")
        if self.c1 == 0 or self.c2 == 0:
            raise ValueError("oracle needs two nonzero coefficients")

    @property
    def omega1(self) -> float:
        return float(np.sqrt(self.k1 @ self.k1 + self.params.mass ** 2))

    @property
    def omega2(self) -> float:
        return float(np.sqrt(self.k2 @ self.k2 + self.params.mass ** 2))

    def fourvectors(self):
        p1 = np.concatenate([[self.omega1], self.k1])
        p2 = np.concatenate([[self.omega2], self.k2])
        return p1, p2

    def as_planewave(self) -> PlaneWaveField:
        return PlaneWaveField(self.params,
                              [(1, self.k1.copy(), self.c1),
                               (1, self.k2.copy(), self.c2)],
                              dim=len(self.k1))


def two_mode_oracle(o: TwoModeOracle, x: np.ndarray) -> dict:
    """All the closed forms at one event x = (t, x1..xd).

    K^mu mixes the two on-shell four-vectors with square-root frequency
    ratios; its squared length uses the assigned k.k = -M^2, which is
    exactly what makes it fail to be a scalar.
    """
    x = np.asarray(x, dtype=float)
    p1, p2 = o.fourvectors()
    params = o.params
    w1, w2 = o.omega1, o.omega2
    r12 = np.sqrt(w2 / w1)
    K = r12 * p1 + p2 / r12
    dot12 = minkowski_dot(p1, p2)
    Ksq = 2.0 * dot12 - params.mass ** 2 * (w2 / w1 + w1 / w2)

    eta1 = -p1[0] * x[0] + p1[1:] @ x[1:]
    eta2 = -p2[0] * x[0] + p2[1:] @ x[1:]
    cross = o.c1 * np.conj(o.c2) * np.exp(1j * (eta1 - eta2))
    base = (np.abs(o.c1) ** 2 * p1 + np.abs(o.c2) ** 2 * p2)
    fac = params.kappa / params.mass

    calJ = (1.0 + params.a) * fac * (base + np.real(cross) * K)
    J = (1.0 + params.a) * fac * (base + np.real(cross) * (p1 + p2))
    F = -(1.0 + params.a) * fac * np.imag(cross)
    div_calJ = ((params.mass ** 2 + dot12)
                * (np.sqrt(w1 / w2) - np.sqrt(w2 / w1)) * F)
    return {
        "calJ": calJ,
        "J": J.astype(complex),
        "K": K,
        "Ksq": float(Ksq),
        "div_calJ": float(div_calJ),
        "div_J": 0.0,
    }


def noncovariance_demo(o: TwoModeOracle, boost: Boost) -> dict:
    """Boost the two modes exactly and watch K.K change.

    The honest scalar 2 k1.k2 stays put; the frequency-ratio term does
    not, which is the whole point.
    """
    if abs(o.omega1 - o.omega2) < 1e-9:
        raise ValueError("equal mode frequencies: the obstruction vanishes")
    before = two_mode_oracle(o, np.zeros(len(o.k1) + 1))
    pw = boost_planewave(o.as_planewave(), boost)
    (_, k1b, c1b), (_, k2b, c2b) = pw.modes
    ob = TwoModeOracle(k1b, k2b, c1b, c2b, o.params)
    after = two_mode_oracle(ob, np.zeros(len(o.k1) + 1))
    p1, p2 = o.fourvectors()
    q1, q2 = ob.fourvectors()
    return {
        "Ksq_before": before["Ksq"],
        "Ksq_after": after["Ksq"],
        "delta": abs(after["Ksq"] - before["Ksq"]),
        "dot_before": float(minkowski_dot(p1, p2)),
        "dot_after": float(minkowski_dot(q1, q2)),
    }
