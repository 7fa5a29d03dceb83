"""Continuum momentum-space packets for frame-invariance checks.

An AmplitudeField stores closed-form complex amplitude functions a+(k),
a-(k) over continuous momentum space together with a quadrature rule.
The field is

    psi(x) = sum_eps int d^dk a_eps(k) e^{i eta(p, x)},  p = (eps w, k),

so boosts act exactly: amplitudes transform with the scalar-field
Jacobian a'_eps(k') = (w(k)/w'(k')) a_eps(k) where k is the pre-image of
k' under the boost.  Inner products are momentum quadratures; any
frame dependence of their values is pure quadrature error and must
shrink as the rule is refined.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss

from .core import Boost, ModelParams


@dataclass(frozen=True)
class QuadratureRule:
    """Tensor-product Gauss-Legendre rule over the cube |k_i| <= radius.

    With `stretch` set to a mass-like scale c the per-axis map is
    k = c sinh(u) with u Gauss-Legendre on [-asinh(R/c), asinh(R/c)].
    The substitution moves the branch points of sqrt(k^2 + c^2) off the
    integration path, so frequency factors stop limiting the geometric
    convergence rate.
    """

    nodes: np.ndarray     # (n, d)
    weights: np.ndarray   # (n,)
    radius: float
    order: int
    stretch: float | None = None

    @classmethod
    def gauss_legendre(cls, dim: int, radius: float, order: int,
                       stretch: float | None = None) -> "QuadratureRule":
        if radius <= 0 or order < 2:
            raise ValueError("need radius > 0 and order >= 2")
        y, w = leggauss(order)
        if stretch is not None:
            if stretch <= 0:
                raise ValueError("stretch scale must be positive")
            umax = np.arcsinh(radius / stretch)
            u = umax * y
            x1 = stretch * np.sinh(u)
            w1 = stretch * np.cosh(u) * umax * w
        else:
            x1 = radius * y      # map [-1, 1] -> [-R, R]
            w1 = radius * w
        axes = [x1] * dim
        wts = [w1] * dim
        mesh = np.meshgrid(*axes, indexing="ij")
        nodes = np.stack([m.ravel() for m in mesh], axis=-1)
        wmesh = np.meshgrid(*wts, indexing="ij")
        weights = np.prod(np.stack([m.ravel() for m in wmesh], axis=-1), axis=-1)
        return cls(nodes, weights, float(radius), int(order),
                   None if stretch is None else float(stretch))


@dataclass(frozen=True)
class GaussianAmplitude:
    """Registered amplitude family: polynomial times Gaussian.

    a(k) = amp * poly(k) * exp(-|k - center|^2 / (4 sigma^2)), with poly
    given as {multi_index: coefficient} over the momentum components.
    """

    center: tuple[float, ...]
    sigma: float
    amp: complex = 1.0
    poly: tuple[tuple[tuple[int, ...], complex], ...] = ()

    def __call__(self, k: np.ndarray) -> np.ndarray:
        k = np.atleast_2d(k)
        c = np.asarray(self.center)
        envelope = np.exp(-np.sum((k - c) ** 2, axis=-1) / (4.0 * self.sigma ** 2))
        if self.poly:
            pval = np.zeros(k.shape[0], dtype=complex)
            for powers, coeff in self.poly:
                term = np.ones(k.shape[0], dtype=complex) * coeff
                for ax, p in enumerate(powers):
                    if p:
                        term = term * k[:, ax] ** p
                pval += term
        else:
            pval = 1.0
        return self.amp * pval * envelope


@dataclass
class AmplitudeField:
    """Continuum packet with closed-form amplitudes and a quadrature rule."""

    params: ModelParams
    dim: int
    amp_plus: Callable[[np.ndarray], np.ndarray] | None
    amp_minus: Callable[[np.ndarray], np.ndarray] | None
    quad: QuadratureRule

    def omega(self, k: np.ndarray) -> np.ndarray:
        k = np.atleast_2d(k)
        return np.sqrt(np.sum(k * k, axis=-1) + self.params.mass ** 2)

    def amplitude(self, eps: int, k: np.ndarray) -> np.ndarray:
        fn = self.amp_plus if eps > 0 else self.amp_minus
        k = np.atleast_2d(k)
        if fn is None:
            return np.zeros(k.shape[0], dtype=complex)
        return np.asarray(fn(k), dtype=complex)

    def with_quad(self, quad: QuadratureRule) -> "AmplitudeField":
        return AmplitudeField(self.params, self.dim, self.amp_plus,
                              self.amp_minus, quad)

    def evaluate_at(self, events: np.ndarray) -> np.ndarray:
        """Quadrature approximation of the field at event rows (t, x)."""
        events = np.atleast_2d(np.asarray(events, dtype=float))
        k = self.quad.nodes
        w = self.quad.weights
        om = self.omega(k)
        kx = events[:, 1:] @ k.T                    # (nev, nq)
        out = np.zeros(events.shape[0], dtype=complex)
        for eps in (1, -1):
            a = self.amplitude(eps, k)
            if not np.any(a):
                continue
            phase = np.exp(1j * (kx - eps * om[None, :] * events[:, :1]))
            out += phase @ (w * a)
        return out


def truncation_mass_check(field: AmplitudeField, rtol: float = 1e-10) -> float:
    """Fraction of quadratic amplitude mass missed by the truncation radius.

    Compares the quadrature of |a|^2 against the same with doubled radius
    and order; returns the relative deficit (must be <= rtol).
    """
    def mass(rule):
        k, w = rule.nodes, rule.weights
        total = 0.0
        for eps in (1, -1):
            a = field.amplitude(eps, k)
            total += float(np.real(np.sum(w * np.abs(a) ** 2)))
        return total

    m1 = mass(field.quad)
    m2 = mass(QuadratureRule.gauss_legendre(
        field.dim, 2.0 * field.quad.radius, 2 * field.quad.order,
        field.quad.stretch))
    deficit = abs(m2 - m1) / max(m2, 1e-300)
    if deficit > rtol:
        raise ValueError(
            f"truncation radius misses {deficit:.3e} of the amplitude mass")
    return deficit


def inner_amplitude(f1: AmplitudeField, f2: AmplitudeField,
                    quad: QuadratureRule | None = None) -> complex:
    """The positive-definite inner product as a momentum quadrature.

    (2 pi)^d (kappa/M) int d^dk w(k) [(1+a) conj(a1+) a2+
                                      + (1-a) conj(a1-) a2-].
    """
    if f1.params != f2.params or f1.dim != f2.dim:
        raise ValueError("amplitude fields are not compatible")
    p = f1.params
    rule = quad or f1.quad
    k, w = rule.nodes, rule.weights
    om = np.sqrt(np.sum(k * k, axis=-1) + p.mass ** 2)
    acc = 0.0 + 0.0j
    for eps, wt in ((1, 1.0 + p.a), (-1, 1.0 - p.a)):
        a1 = f1.amplitude(eps, k)
        a2 = f2.amplitude(eps, k)
        acc += wt * np.sum(w * om * np.conj(a1) * a2)
    return complex((2.0 * np.pi) ** f1.dim * (p.kappa / p.mass) * acc)


def kg_inner_amplitude(f1: AmplitudeField, f2: AmplitudeField, g: float,
                       t: float = 0.0) -> complex:
    """Charge-type form i g [<psi1|psidot2> - <psidot1|psi2>] by quadrature."""
    if f1.params != f2.params or f1.dim != f2.dim:
        raise ValueError("amplitude fields are not compatible")
    rule = f1.quad
    k, w = rule.nodes, rule.weights
    om = np.sqrt(np.sum(k * k, axis=-1) + f1.params.mass ** 2)
    def hat(f, deriv):
        val = np.zeros(k.shape[0], dtype=complex)
        for eps in (1, -1):
            a = f.amplitude(eps, k)
            ph = np.exp(-1j * eps * om * t)
            val += (-1j * eps * om) ** deriv * a * ph
        return val
    psi1, psidot1 = hat(f1, 0), hat(f1, 1)
    psi2, psidot2 = hat(f2, 0), hat(f2, 1)
    bra_ket = np.sum(w * np.conj(psi1) * psidot2)
    ket_bra = np.sum(w * np.conj(psidot1) * psi2)
    return complex(1j * g * (2.0 * np.pi) ** f1.dim * (bra_ket - ket_bra))


def boost_amplitude(field: AmplitudeField, boost: Boost) -> AmplitudeField:
    """Exact boost of a continuum packet.

    Amplitudes are wrapped with the scalar-field Jacobian; the quadrature
    rule is rebuilt with a radius that covers the boosted support.
    """
    Linv = boost.inverse.matrix
    mass = field.params.mass

    def wrap(fn, eps):
        if fn is None:
            return None

        def boosted(kp):
            kp = np.atleast_2d(kp)
            wp = np.sqrt(np.sum(kp * kp, axis=-1) + mass ** 2)
            pp = np.concatenate([(eps * wp)[:, None], kp], axis=-1)
            p = pp @ Linv.T
            kpre = p[:, 1:]
            wpre = eps * p[:, 0]
            return (wpre / wp) * np.asarray(fn(kpre), dtype=complex)

        return boosted

    beta = np.asarray(boost.beta)
    bmag = float(np.sqrt(beta @ beta))
    gam = 1.0 / np.sqrt(1.0 - bmag ** 2)
    R = field.quad.radius
    Rp = gam * (R + bmag * np.sqrt(R * R * field.dim + mass ** 2))
    quad = QuadratureRule.gauss_legendre(field.dim, Rp, field.quad.order,
                                         field.quad.stretch)
    return AmplitudeField(field.params, field.dim,
                          wrap(field.amp_plus, 1),
                          wrap(field.amp_minus, -1), quad)


def invariance_check(f1: AmplitudeField, f2: AmplitudeField, boost: Boost,
                     orders: tuple[int, ...] = (16, 32, 64, 128)) -> dict:
    """Frame invariance of the inner product, order by order.

    Returns the inner-product values in both frames per quadrature order
    and the relative deviations, which must decrease as the rule refines
    (truncation plus resolution error only).
    """
    truncation_mass_check(f1)
    truncation_mass_check(f2)
    b1 = boost_amplitude(f1, boost)
    b2 = boost_amplitude(f2, boost)
    report = {"orders": list(orders), "rest": [], "boosted": [], "rel_dev": []}
    for n in orders:
        rule = QuadratureRule.gauss_legendre(
            f1.dim, f1.quad.radius, n, f1.quad.stretch)
        rule_b = QuadratureRule.gauss_legendre(
            f1.dim, b1.quad.radius, n, b1.quad.stretch)
        v0 = inner_amplitude(f1, f2, rule)
        v1 = inner_amplitude(b1, b2, rule_b)
        report["rest"].append(v0)
        report["boosted"].append(v1)
        report["rel_dev"].append(abs(v1 - v0) / max(abs(v0), 1e-300))
    return report
