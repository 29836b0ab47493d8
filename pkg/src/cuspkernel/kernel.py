"""Certified evaluation of the normalized reproducing kernel R_k(z, w).

R_k(z, w) is a sum over the full integer Moebius group of normalized terms
t_g(z, w)^k with |t_g| = (1 + u(w, gz))^{-1/2}, where u is the point-pair
invariant.  The sum is organized as translation cosets (c, d) crossed with
translation powers m, because within a coset the image height
Im(gz) = y/|cz+d|^2 is constant and the m-line decays like a power of the
horizontal offset.  Every truncation is accompanied by an analytic upper
bound on the omitted mass, so KernelResult.tail_bound is a genuine
certificate:

  * m-line side tails: sum-vs-integral comparison of h(t)^{-k/2} with
    h(t) = 1 + (t^2 + beta)/alpha convex, giving
    f(M) * (1 + alpha*h(M)/(M*(k-2))) per side beyond offset M;
  * whole quiet cosets: max term times (2 + c_k*(v + v')), where
    c_k = sqrt(pi)*Gamma((k-1)/2)/Gamma(k/2) integrates the line profile;
  * the lattice beyond |cz+d|^2 > R0: dyadic rings, counting lattice points
    by disk packing and bounding each ring by its inner-edge term, closed
    by a geometric series whose ratio is controlled analytically.

Summation is exact (Shewchuk fsum) in the default mode, so the result is
order-independent and deterministic; --fast style unordered numpy sums are
available where reproducibility does not matter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CutoffExceeded
from .halfplane import (
    GammaMatrix,
    LogComplex,
    Point,
    hyp_distance,
    moebius_apply,
    u_from_distance,
)
from .modgroup import (
    EllipticPoint,
    StripRegion,
    elliptic_points_in_strip,
    min_displacement,
    solve_top_row,
)

_HALF_PI = 0.5 * math.pi


@dataclass(frozen=True)
class WeightConfig:
    """Weight, requested tail bound, and the experiment constants A, c0."""

    k: int
    tol: float = 1e-9
    A: float = 2.0
    c0: float = 0.125

    def __post_init__(self):
        if self.k % 2 != 0 or self.k < 4:
            raise ValueError(f"weight must be an even integer >= 4, got {self.k}")
        if self.tol <= 0 or self.A <= 0 or self.c0 <= 0:
            raise ValueError("tol, A, c0 must be positive")

    def delta_for(self, Y: float) -> float:
        """Neighborhood radius sqrt(128 A) * Y * sqrt(log k / k)."""
        return math.sqrt(128.0 * self.A) * Y * math.sqrt(math.log(self.k) / self.k)

    def support_top(self) -> float:
        """Upper end of the admissible height window, sqrt(k/(17 A log k))."""
        return math.sqrt(self.k / (17.0 * self.A * math.log(self.k)))


@dataclass(frozen=True)
class KernelResult:
    value: complex
    tail_bound: float
    terms_used: int
    cosets_used: int


def b_term(g: GammaMatrix, z: Point, w: Point) -> LogComplex:
    """Normalized single term t_g(z, w) = sqrt(yv) * (2i/(gz - conj(w))) / (cz+d).

    Computed directly from the factors (not via the point-pair invariant),
    so the magnitude identity |t_g| = (1 + u(w, gz))^{-1/2} is a genuine
    cross-check on this routine rather than a tautology.
    """
    gz = moebius_apply(g, z)
    dr = gz.x - w.x
    di = gz.y + w.y  # gz - conj(w)
    j = complex(g.c * z.x + g.d, g.c * z.y)
    logmag = (
        0.5 * (math.log(z.y) + math.log(w.y))
        + math.log(2.0)
        - 0.5 * math.log(dr * dr + di * di)
        - math.log(abs(j))
    )
    phase = _HALF_PI - math.atan2(di, dr) - math.atan2(j.imag, j.real)
    return LogComplex.from_parts(logmag, phase)


def bergman_main_term(z: Point, w: Point, k: int) -> complex:
    """The leading term 2 * (2i sqrt(yv) / (z - conj(w)))^k."""
    if k % 2 != 0:
        raise ValueError("weight must be even")
    t = b_term(GammaMatrix.identity(), z, w)
    val = t.pow(k).to_complex()
    return 2.0 * val


def _profile_constant(k: float) -> float:
    """sqrt(pi) * Gamma((k-1)/2) / Gamma(k/2): the full-line integral of the
    normalized m-line profile in units of its peak and of v + v'."""
    return math.exp(
        0.5 * math.log(math.pi) + math.lgamma((k - 1.0) / 2.0) - math.lgamma(k / 2.0)
    )


def _side_tail(M: float, alpha: float, beta: float, k: float) -> float:
    """Omitted mass of one m-line side beyond offset M > 0.

    h(t) = 1 + (t^2+beta)/alpha is convex, so the terms at offsets
    M, M+1, ... are bounded by f(M) + integral, and the integral by the
    tangent-line comparison f(M) * alpha * h(M) / (M * (k-2)).
    """
    h = 1.0 + (M * M + beta) / alpha
    f = math.exp(-0.5 * k * math.log(h))
    return f * (1.0 + alpha * h / (M * (k - 2.0)))


def _shortest_vector_sq(zc: complex) -> float:
    """Squared length of the shortest nonzero vector of the lattice Z + Z z,
    by Gauss-Lagrange basis reduction.  Used as the packing radius for the
    lattice-point counting bound."""
    u, v = complex(1.0, 0.0), zc
    if abs(u) > abs(v):
        u, v = v, u
    for _ in range(128):
        num = v.real * u.real + v.imag * u.imag
        den = u.real * u.real + u.imag * u.imag
        v = v - round(num / den) * u
        if abs(v) >= abs(u):
            break
        u, v = v, u
    return u.real * u.real + u.imag * u.imag


def _sum_terms(z: Point, w: Point, k: int, tol: float, *,
               magnitudes_only: bool = False, exclude_identity: bool = False,
               fast: bool = False):
    """Shared enumeration engine.

    Returns (complex_or_real_sum, tail_bound, terms_used, cosets_used) for
    the sum over one representative of each +/- pair; callers double both
    the value and the tail for the full group.
    """
    y, x = z.y, z.x
    v, uw = w.y, w.x
    rho = 0.5 * math.sqrt(_shortest_vector_sq(z.as_complex))
    ck = _profile_constant(k)

    def one_plus_ufloor(Q):
        # 1 + min u over the coset of size Q: (s+1)^2/(4s), s = vQ/y
        s = v * Q / y
        return (s + 1.0) ** 2 / (4.0 * s)

    def npm(R):
        # upper bound on the number of +/- lattice pairs with |cz+d|^2 <= R
        return 0.5 * (math.sqrt(R) / rho + 1.0) ** 2 + 1.0

    def lattice_tail(R0):
        # dyadic rings over Q > R0; each ring bounded by count * inner-edge
        # line bound; closed geometrically (ratio bounded analytically
        # because (1+F(2Q))/(1+F(Q)) = (2s+1)^2/(2(s+1)^2) increases in s)
        total = 0.0
        Q = R0
        term = None
        for _ in range(250):
            opf = one_plus_ufloor(Q)
            g0 = math.exp(-0.5 * k * math.log(opf))
            term = npm(2.0 * Q) * g0 * (2.0 + ck * (v + y / Q))
            total += term
            s = v * Q / y
            growth = (2.0 * s + 1.0) ** 2 / (2.0 * (s + 1.0) ** 2)
            rb = 2.0 * math.exp(-0.5 * k * math.log(growth))
            if rb < 1.0 and term < max(1e-4 * total, 1e-300):
                return total + term * rb / (1.0 - rb)
            Q *= 2.0
        return math.inf

    # the working radius must keep the coset table enumerable as well as
    # push the lattice tail under budget
    max_cosets = 3e6
    R0 = max(4.0 * y / v, 8.0)
    while True:
        tail = lattice_tail(R0)
        if tail <= 0.5 * tol:
            break
        R0 *= 2.0
        if R0 > 1e14 or npm(R0) > max_cosets:
            raise CutoffExceeded(
                f"tail bound {tail:.3e} not reachable at tol {tol:.3e}",
                best_tail_bound=tail,
            )

    # coset table: (c, d, Q) with Q = |cz+d|^2 <= R0, coprime, canonical sign
    cosets = [(0, 1, 1.0)]
    c = 1
    while (c * y) ** 2 <= R0:
        s_max = math.sqrt(R0 - (c * y) ** 2)
        d_arr = np.arange(math.ceil(-c * x - s_max), math.floor(-c * x + s_max) + 1)
        if d_arr.size:
            keep = np.gcd(c, np.abs(d_arr)) == 1
            d_arr = d_arr[keep]
            Q_arr = (c * x + d_arr) ** 2 + (c * y) ** 2
            inside = Q_arr <= R0
            for d, Q in zip(d_arr[inside], Q_arr[inside]):
                cosets.append((c, int(d), float(Q)))
        c += 1

    n_cosets = len(cosets)
    tol_line = 0.25 * tol / n_cosets
    eps_term = tol_line / 8.0

    re_parts, im_parts, mag_parts = [], [], []
    n_terms = 0

    for c, d, Q in cosets:
        vp = y / Q
        alpha = 4.0 * v * vp
        beta = (v - vp) ** 2
        g_max = math.exp(-0.5 * k * math.log1p(beta / alpha))
        lf = 2.0 + ck * (v + vp)
        if g_max * lf <= tol_line:
            tail += g_max * lf
            continue
        if c == 0:
            X0 = x
            argden = 0.0
        else:
            a0, _b0 = solve_top_row(c, d)
            X0 = a0 / c - (c * x + d) / (c * Q)
            argden = math.atan2(c * y, c * x + d)
        t0 = uw - X0
        u_cut = eps_term ** (-2.0 / k) - 1.0
        width_sq = alpha * u_cut - beta
        width = math.sqrt(width_sq) if width_sq > 0.0 else 0.0
        m_lo = math.ceil(t0 - width)
        m_hi = math.floor(t0 + width)
        # grow the window until both side tails fit the per-line budget
        for _ in range(200):
            grew = False
            if _side_tail(t0 - (m_lo - 1), alpha, beta, k) > 0.5 * tol_line:
                m_lo -= max(4, (m_hi - m_lo + 1) // 2)
                grew = True
            if _side_tail((m_hi + 1) - t0, alpha, beta, k) > 0.5 * tol_line:
                m_hi += max(4, (m_hi - m_lo + 1) // 2)
                grew = True
            if not grew:
                break
        else:
            raise CutoffExceeded("m-line window failed to converge",
                                 best_tail_bound=tail)
        tail += _side_tail(t0 - (m_lo - 1), alpha, beta, k)
        tail += _side_tail((m_hi + 1) - t0, alpha, beta, k)
        if m_hi - m_lo + 1 > 5_000_000:
            raise CutoffExceeded("m-line window too large", best_tail_bound=tail)
        if m_lo > m_hi:
            continue
        ms = np.arange(m_lo, m_hi + 1, dtype=np.float64)
        if exclude_identity and c == 0:
            ms = ms[ms != 0.0]
            if ms.size == 0:
                continue
        offs = (X0 - uw) + ms
        u_arr = (offs * offs + beta) / alpha
        logmag = -0.5 * k * np.log1p(u_arr)
        n_terms += ms.size
        if magnitudes_only:
            mag_parts.append(np.exp(logmag))
        else:
            ph = k * (_HALF_PI - np.arctan2(vp + v, offs) - argden)
            ph = np.remainder(ph + math.pi, 2.0 * math.pi) - math.pi
            mag = np.exp(logmag)
            re_parts.append(mag * np.cos(ph))
            im_parts.append(mag * np.sin(ph))

    # terms whose magnitude underflows to zero are each below 5e-324
    tail += n_terms * 5e-324

    if magnitudes_only:
        flat = np.concatenate(mag_parts) if mag_parts else np.zeros(0)
        total = float(np.sum(flat)) if fast else math.fsum(flat.tolist())
        return total, tail, n_terms, n_cosets

    re_flat = np.concatenate(re_parts) if re_parts else np.zeros(0)
    im_flat = np.concatenate(im_parts) if im_parts else np.zeros(0)
    if fast:
        re_sum, im_sum = float(np.sum(re_flat)), float(np.sum(im_flat))
    else:
        re_sum = math.fsum(re_flat.tolist())
        im_sum = math.fsum(im_flat.tolist())
    return complex(re_sum, im_sum), tail, n_terms, n_cosets


def bergman_R(z: Point, w: Point, cfg: WeightConfig, *, fast: bool = False) -> KernelResult:
    """Evaluate R_k(z, w) with a certified truncation bound <= cfg.tol."""
    half, tail, n_terms, n_cosets = _sum_terms(
        z, w, cfg.k, 0.5 * cfg.tol, fast=fast
    )
    result = KernelResult(2.0 * half, 2.0 * tail, n_terms, n_cosets)
    if result.tail_bound > cfg.tol:
        raise CutoffExceeded(
            f"achieved tail {result.tail_bound:.3e} exceeds tol {cfg.tol:.3e}",
            best_tail_bound=result.tail_bound,
        )
    return result


def offdiagonal_sum_bound(z: Point, power: int = 4, rel_slack: float = 0.05):
    """Certified upper bound on sum over g != +/-I of (1 + u(z, gz))^{-power/2}.

    Used to turn a minimum-displacement value into a certified bound on the
    off-identity kernel mass at any larger weight.
    """
    if power < 4 or power % 2:
        raise ValueError("power must be an even integer >= 4")
    # absolute tolerance: iterate once with a crude guess, then tighten
    guess = 1.0
    for _ in range(3):
        total, tail, _, _ = _sum_terms(
            z, z, power, rel_slack * max(guess, 1e-3), magnitudes_only=True,
            exclude_identity=True,
        )
        guess = 2.0 * total
    return 2.0 * total + 2.0 * tail


def residual_certificate(z: Point, k: int) -> float:
    """Certified bound on |R_k(z,z) - 2| from the minimum displacement.

    |R_k(z,z) - 2| <= sum_{g != +/-I} (1+u)^{-k/2}
                   <= (1+u_min)^{-(k-4)/2} * sum_{g != +/-I} (1+u)^{-2},
    with u_min certified by the displacement search and the weight-4 sum
    bounded by its own certified enumeration.
    """
    if k % 2 or k < 4:
        raise ValueError("k must be an even integer >= 4")
    _, d_min = min_displacement(z)
    u_min = u_from_distance(d_min)
    s2 = offdiagonal_sum_bound(z, power=4)
    return s2 * math.exp(-0.5 * (k - 4) * math.log1p(u_min))


def stabilizer_elements(e: EllipticPoint):
    """The non-central stabilizer elements of an elliptic point."""
    order = e.stabilizer_order
    out = []
    g = e.generator
    acc = g
    for j in range(1, order):
        if 2 * j != order:  # skip the power equal to -I
            out.append(acc)
        acc = acc * g
    return out


def elliptic_correction(z: Point, e: EllipticPoint, k: int) -> complex:
    """Extra kernel mass near an elliptic point: the non-central stabilizer
    terms sum_{g in Stab \\ {+/-I}} t_g(z, z)^k."""
    if k % 2 != 0:
        raise ValueError("weight must be even")
    total = 0.0 + 0.0j
    for g in stabilizer_elements(e):
        total += b_term(g, z, z).pow(k).to_complex()
    return total


def asymptotic_residual(z: Point, cfg: WeightConfig, region: StripRegion,
                        elliptic_list=None, delta: float | None = None):
    """Measured deviation of R_k(z,z) from its squeezed-weight prediction,
    together with the analytic bound exp(-delta^2 k/(128 Y^2)) + y exp(-k/(17 y^2)).

    The prediction is the main term 2 plus the stabilizer corrections of
    every listed elliptic point within delta of z (far corrections are
    exponentially negligible, so overlapping neighborhoods are harmless).
    """
    if elliptic_list is None:
        elliptic_list = elliptic_points_in_strip(region.Y)
    if delta is None:
        delta = cfg.delta_for(region.Y)
    pred = 2.0 + 0.0j
    for e in elliptic_list:
        if hyp_distance(z, e.location) <= delta:
            pred += elliptic_correction(z, e, cfg.k)
    res = bergman_R(z, z, cfg)
    measured = abs(res.value - pred)
    y = z.y
    bound = math.exp(-delta * delta * cfg.k / (128.0 * region.Y ** 2)) + y * math.exp(
        -cfg.k / (17.0 * y * y)
    )
    return measured, bound
