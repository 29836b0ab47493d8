"""Enumeration of SL(2,Z): cosets, elliptic points, displacement bounds.

The minimum-displacement search returns a *certified* global minimum of
d(z, gz) over g != +/-I: every matrix outside the examined window is ruled
out by the height bound u(z, gz) >= (Q-1)^2/(4Q) with Q = |cz+d|^2, so the
search window can be shrunk as better candidates are found.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

from .errors import StabilizerSearchFailed
from .halfplane import (
    GammaMatrix,
    Point,
    hyp_distance,
    moebius_apply,
    pair_invariant,
)

SQRT3_2 = math.sqrt(3.0) / 2.0

# order-6 rotation fixing e^{i pi/3}
U_GENERATOR = GammaMatrix(1, -1, 1, 0)


@dataclass(frozen=True)
class StripRegion:
    """The strip |Re z| <= 1/2 (closed), Im z > 1/Y, with a neighborhood
    radius delta (hyperbolic units) used to carve out elliptic points."""

    Y: float
    delta: float

    def __post_init__(self):
        if self.Y <= 0 or self.delta <= 0:
            raise ValueError("Y and delta must be positive")

    def contains(self, z: Point) -> bool:
        return abs(z.x) <= 0.5 and z.y > 1.0 / self.Y


@dataclass(frozen=True)
class EllipticPoint:
    """An elliptic fixed point with its stabilizer order and a generator."""

    location: Point
    stabilizer_order: int  # order in SL(2,Z), counting -I
    generator: GammaMatrix

    def __post_init__(self):
        if self.stabilizer_order not in (4, 6):
            raise ValueError("modular-group stabilizers have order 4 or 6")
        # a true generator has trace 0 (order 4) or trace 1 (order 6);
        # e.g. the negative of an order-6 generator only has order 3
        want_trace = 0 if self.stabilizer_order == 4 else 1
        if self.generator.trace != want_trace:
            raise ValueError(
                f"generator trace {self.generator.trace} cannot generate a "
                f"cyclic group of order {self.stabilizer_order}"
            )
        image = moebius_apply(self.generator, self.location)
        if hyp_distance(image, self.location) > 1e-12:
            raise ValueError("generator does not fix the location")


@dataclass(frozen=True)
class CosetRep:
    """A representative of a translation coset, canonicalized to c >= 0."""

    matrix: GammaMatrix

    def __post_init__(self):
        c, d = self.matrix.c, self.matrix.d
        if c < 0 or (c == 0 and d != 1):
            raise ValueError("coset rep must have c > 0, or (c, d) = (0, 1)")
        if math.gcd(c, d) != 1:
            raise ValueError("(c, d) must be coprime")

    @property
    def c(self) -> int:
        return self.matrix.c

    @property
    def d(self) -> int:
        return self.matrix.d


def solve_top_row(c: int, d: int) -> tuple:
    """Some (a, b) with ad - bc = 1, canonicalized so 0 <= a < c for c >= 1."""
    if c == 0:
        if d not in (1, -1):
            raise ValueError("c = 0 requires d = +/-1")
        return (d, 0)  # a = d satisfies a*d = 1 for d = +/-1
    if math.gcd(c, d) != 1:
        raise ValueError("(c, d) must be coprime")
    a = pow(d % c, -1, c) if c > 1 else 0
    b = (a * d - 1) // c
    return (a, b)


def coset_reps(c_max: int, d_max: int | None = None) -> list:
    """One representative per translation coset (c, d), coprime.

    c runs over 0..c_max and d over |d| <= d_max (default c_max, at least 1);
    for c = 0 only the identity coset (0, 1) is produced, identifying the
    sign.  Reps with the same (c, d) would differ by powers of T on the
    left; the returned (a, b) is the canonical one with 0 <= a < c.
    """
    if c_max < 0:
        raise ValueError("c_max must be >= 0")
    if d_max is None:
        d_max = max(c_max, 1)
    reps = [CosetRep(GammaMatrix(1, 0, 0, 1))]
    for c in range(1, c_max + 1):
        for d in range(-d_max, d_max + 1):
            if math.gcd(c, d) != 1:
                continue
            a, b = solve_top_row(c, d)
            reps.append(CosetRep(GammaMatrix(a, b, c, d)))
    return reps


def _orbit_points_in_strip(z0: complex, q_form, q_max: int, order: int,
                           generator0: GammaMatrix):
    """All Gamma-images of z0 at height >= Im(z0)/q_max inside |Re| <= 1/2.

    q_form(c, d) is the integer value of |c z0 + d|^2 / Im-normalization for
    the given base point; images with this form <= q_max exhaust the strip
    (the tolerance on the closed Re-boundary is 1e-9, so points landing on
    both edges are reported twice, once per edge).
    """
    tol = 1e-9
    found = {}
    # |c| can reach sqrt(4 q/3) for the order-6 form c^2 + cd + d^2
    c_hi = int(math.isqrt(4 * q_max // 3 + 1)) + 2
    for c in range(0, c_hi + 1):
        d_hi = int(math.isqrt(q_max)) + abs(c) + 2
        for d in range(-d_hi, d_hi + 1):
            if c == 0 and d != 1:
                continue
            if math.gcd(c, d) != 1:
                continue
            if q_form(c, d) > q_max:
                continue
            a, b = solve_top_row(c, d)
            g0 = GammaMatrix(a, b, c, d)
            base = moebius_apply(g0, Point.from_complex(z0))
            m_lo = math.ceil(-0.5 - base.x - tol)
            m_hi = math.floor(0.5 - base.x + tol)
            for m in range(m_lo, m_hi + 1):
                g = GammaMatrix.T(m) * g0
                p = Point(base.x + m, base.y)
                key = (round(p.x * 1e9), round(p.y * 1e9))
                if key in found:
                    continue
                gen = g * generator0 * g.inverse()
                found[key] = EllipticPoint(p, order, gen)
    return list(found.values())


def elliptic_points_in_strip(Y: float) -> list:
    """Elliptic points of the strip |Re z| <= 1/2, heights down to sqrt(3)/(2Y).

    The classical fundamental domain has its lowest elliptic points at
    height sqrt(3)/2, so the floor sqrt(3)/(2Y) makes Y = 1 return exactly
    the three classical points (order 4 at i, order 6 at e^{+/- i pi/3}) and
    keeps the count bounded by ~3Y as Y grows.  Enumeration is a complete
    finite orbit search: an image g*z0 has height Im(z0)/|c z0 + d|^2, so a
    height floor is an integer bound on the binary quadratic form |c z0 + d|^2.
    """
    if Y < 1:
        raise ValueError("Y must be >= 1")
    pts = []
    # orbit of i: |c*i + d|^2 = c^2 + d^2, heights 1/(c^2+d^2)
    q_max_i = math.floor(2.0 * Y / math.sqrt(3.0) + 1e-9)
    pts += _orbit_points_in_strip(
        1j, lambda c, d: c * c + d * d, q_max_i, 4, GammaMatrix.S()
    )
    # orbit of e^{i pi/3}: |c z0 + d|^2 = c^2 + cd + d^2, heights (sqrt3/2)/form
    q_max_r = math.floor(Y + 1e-9)
    rho = complex(0.5, SQRT3_2)
    pts += _orbit_points_in_strip(
        rho, lambda c, d: c * c + c * d + d * d, q_max_r, 6, U_GENERATOR
    )
    pts.sort(key=lambda e: (-e.location.y, e.location.x))
    return pts


def stabilizer(z0: Point, search_bound: int = 3) -> list:
    """Brute-force the full finite group {g : g z0 = z0}.

    Searches all determinant-1 matrices with entries bounded by
    search_bound and verifies the result is closed under multiplication.
    """
    found = []
    bound = search_bound
    for a in range(-bound, bound + 1):
        for b in range(-bound, bound + 1):
            for c in range(-bound, bound + 1):
                for d in range(-bound, bound + 1):
                    if a * d - b * c != 1:
                        continue
                    g = GammaMatrix(a, b, c, d)
                    if pair_invariant(moebius_apply(g, z0), z0) < 1e-20:
                        found.append(g)
    entries = {g.entries() for g in found}
    for g in found:
        for h in found:
            if (g * h).entries() not in entries:
                raise StabilizerSearchFailed(
                    f"stabilizer not closed at bound {search_bound}; "
                    f"missing {(g * h).entries()}"
                )
    return found


def _u_height_floor(Q: float) -> float:
    """Lower bound on u(z, gz) from image height alone: (Q-1)^2/(4Q)."""
    return (Q - 1.0) ** 2 / (4.0 * Q)


def min_displacement(z: Point, search_bound: int | None = None,
                     exclude_fixing: bool = False):
    """Certified minimizer of d(z, gz) over g != +/-I.

    Enumerates translation cosets (c, d) and translation powers m, pruning
    with u(z, gz) >= (Q-1)^2/(4Q), Q = |cz+d|^2, which rules out every
    matrix outside the examined window; the window shrinks as the running
    minimum improves, so the returned minimum is global.  Ties within 1e-12
    are broken lexicographically on (c, d, a, b) after canonicalizing to
    c > 0 or (c, d) = (0, 1).  search_bound, when given, seeds the initial
    c-window but never weakens the certificate.
    """
    x, y = z.x, z.y

    candidates = []  # (u, key, GammaMatrix)

    def consider(g: GammaMatrix):
        nonlocal best_u
        gz = moebius_apply(g, z)
        u = pair_invariant(z, gz)
        if exclude_fixing and u < 1e-24:
            return
        if g.c < 0 or (g.c == 0 and g.d < 0):
            g = -g
        key = (g.c, g.d, g.a, g.b)
        if u < best_u - 1e-15:
            best_u = u
            candidates.clear()
            candidates.append((u, key, g))
        elif u <= best_u + 1e-12:
            candidates.append((u, key, g))

    # translation line: u = m^2/(4y^2), minimized at m = +/-1
    best_u = math.inf
    for m in (-1, 1):
        consider(GammaMatrix.T(m))

    c = 0
    while True:
        c += 1
        cy2 = (c * y) ** 2
        # Q >= c^2 y^2 on this line; once that alone forces u > best, stop
        if cy2 > 1.0 and _u_height_floor(cy2) > best_u + 1e-12:
            if search_bound is None or c > search_bound:
                break
        b_cur = best_u + 1e-9
        # admissible Q window: (Q-1)^2/(4Q) <= b  =>  Q in [1/Q+, Q+]
        q_hi = 1.0 + 2.0 * b_cur + 2.0 * math.sqrt(b_cur * (1.0 + b_cur))
        if cy2 > q_hi:
            continue
        s = math.sqrt(q_hi - cy2)
        d_lo = math.ceil(-c * x - s)
        d_hi = math.floor(-c * x + s)
        for d in range(d_lo, d_hi + 1):
            if math.gcd(c, d) != 1:
                continue
            Q = (c * x + d) ** 2 + cy2
            if _u_height_floor(Q) > best_u + 1e-12:
                continue
            a0, b0 = solve_top_row(c, d)
            g0 = GammaMatrix(a0, b0, c, d)
            base = moebius_apply(g0, z)
            vp = base.y
            rhs = 4.0 * y * vp * (best_u + 1e-9) - (vp - y) ** 2
            if rhs < 0.0:
                continue
            w = math.sqrt(rhs)
            m_lo = math.ceil(x - base.x - w)
            m_hi = math.floor(x - base.x + w)
            for m in range(m_lo, m_hi + 1):
                consider(GammaMatrix.T(m) * g0)

    candidates = [t for t in candidates if t[0] <= best_u + 1e-12]
    candidates.sort(key=lambda t: t[1])
    u_min, _, g_min = candidates[0]
    gz = moebius_apply(g_min, z)
    return g_min, hyp_distance(z, gz)


def in_bulk(z: Point, region: StripRegion, elliptic_list) -> bool:
    """True iff z is in the strip and > delta away from every listed point."""
    if not region.contains(z):
        return False
    for e in elliptic_list:
        if hyp_distance(z, e.location) <= region.delta:
            return False
    return True


def sample_bulk(region: StripRegion, elliptic_list, n: int, rng,
                y_max: float = 2.0) -> list:
    """n points of F_delta with Im z < y_max, by rejection sampling."""
    out = []
    y_lo = 1.0 / region.Y
    attempts = 0
    while len(out) < n:
        attempts += 1
        if attempts > 1000 * n + 1000:
            raise RuntimeError("rejection sampling stalled; delta too large?")
        x = rng.uniform(-0.5, 0.5)
        y = rng.uniform(y_lo, y_max)
        z = Point(x, y)
        if in_bulk(z, region, elliptic_list):
            out.append(z)
    return out


def write_elliptic_csv(points, path) -> None:
    """Dump an elliptic-point list with stabilizer data as CSV."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "stab_order", "gen_a", "gen_b", "gen_c", "gen_d"])
        for e in points:
            g = e.generator
            writer.writerow(
                [repr(e.location.x), repr(e.location.y), e.stabilizer_order,
                 g.a, g.b, g.c, g.d]
            )
