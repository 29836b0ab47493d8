"""Primitives for the upper half-plane and the integer Moebius group.

Everything here is pure, deterministic double-precision arithmetic: the
Moebius action of SL(2,Z), the point-pair invariant u, hyperbolic distance,
the automorphy factor cz+d, and a log-domain complex type used to raise
near-unit complex numbers to very large integer powers without underflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

TWO_PI = 2.0 * math.pi


def reduce_phase(p: float) -> float:
    """Reduce a real phase into (-pi, pi] using one exact IEEE remainder."""
    r = math.remainder(p, TWO_PI)
    if r <= -math.pi:
        r += TWO_PI
    return r


@dataclass(frozen=True)
class Point:
    """A point x + iy of the upper half-plane (finite, y > 0)."""

    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x!r}, {self.y!r})")
        if self.y <= 0.0:
            raise ValueError(f"imaginary part must be positive, got {self.y!r}")

    @classmethod
    def from_complex(cls, z: complex) -> "Point":
        return cls(float(z.real), float(z.imag))

    @property
    def as_complex(self) -> complex:
        return complex(self.x, self.y)


@dataclass(frozen=True)
class GammaMatrix:
    """An integer matrix (a, b; c, d) with determinant 1.

    Trace classification identifies +/-g: |a+d| in {0, 1} is elliptic,
    |a+d| == 2 is parabolic (or the identity), |a+d| >= 3 is hyperbolic.
    """

    a: int
    b: int
    c: int
    d: int

    def __post_init__(self):
        for entry in (self.a, self.b, self.c, self.d):
            if not isinstance(entry, int):
                raise TypeError(f"matrix entries must be int, got {entry!r}")
        if self.a * self.d - self.b * self.c != 1:
            raise ValueError(
                f"determinant must be 1: ({self.a},{self.b};{self.c},{self.d})"
            )

    @classmethod
    def identity(cls) -> "GammaMatrix":
        return cls(1, 0, 0, 1)

    @classmethod
    def S(cls) -> "GammaMatrix":
        """Inversion z -> -1/z."""
        return cls(0, -1, 1, 0)

    @classmethod
    def T(cls, m: int = 1) -> "GammaMatrix":
        """Translation z -> z + m."""
        return cls(1, m, 0, 1)

    @property
    def trace(self) -> int:
        return self.a + self.d

    @property
    def trace_class(self) -> str:
        t = abs(self.trace)
        if t < 2:
            return "elliptic"
        if t == 2:
            return "parabolic"
        return "hyperbolic"

    def __mul__(self, other: "GammaMatrix") -> "GammaMatrix":
        return GammaMatrix(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def __neg__(self) -> "GammaMatrix":
        # -g also has determinant 1 and acts identically on H
        return GammaMatrix(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "GammaMatrix":
        return GammaMatrix(self.d, -self.b, -self.c, self.a)

    def entries(self) -> tuple:
        return (self.a, self.b, self.c, self.d)


def moebius_apply(g: GammaMatrix, z: Point) -> Point:
    """Apply (az+b)/(cz+d).

    The imaginary part is computed as y/|cz+d|^2 directly, which keeps it
    exactly positive and matches the invariant Im(gz) = Im z / |j(g,z)|^2.
    """
    cr = g.c * z.x + g.d
    ci = g.c * z.y
    q = cr * cr + ci * ci
    nr = g.a * z.x + g.b
    ni = g.a * z.y
    x_new = (nr * cr + ni * ci) / q
    y_new = z.y / q
    return Point(x_new, y_new)


def pair_invariant(z: Point, w: Point) -> float:
    """u(z, w) = |z - w|^2 / (4 Im z Im w); nonnegative, Gamma-invariant."""
    dx = z.x - w.x
    dy = z.y - w.y
    return (dx * dx + dy * dy) / (4.0 * z.y * w.y)


def hyp_distance(z: Point, w: Point) -> float:
    """Hyperbolic distance, via cosh d = 2u + 1.

    Evaluated as 2*asinh(sqrt(u)), which is exact at u = 0 and loses no
    digits for nearby points, unlike acosh(1 + 2u).
    """
    return 2.0 * math.asinh(math.sqrt(pair_invariant(z, w)))


def distance_from_u(u: float) -> float:
    """Hyperbolic distance corresponding to a pair-invariant value."""
    return 2.0 * math.asinh(math.sqrt(u))


def u_from_distance(d: float) -> float:
    """Pair-invariant value corresponding to a hyperbolic distance."""
    s = math.sinh(0.5 * d)
    return s * s


def fixed_point(g: GammaMatrix) -> Point:
    """Upper half-plane fixed point of an elliptic matrix.

    Roots of c z^2 + (d - a) z - b = 0; the discriminant (a+d)^2 - 4 is
    negative exactly in the elliptic case, and the root with positive
    imaginary part is returned.
    """
    if g.trace_class != "elliptic":
        raise ValueError(f"matrix is not elliptic: trace {g.trace}")
    if g.c == 0:
        # cannot happen for det-1 integer matrices with |trace| < 2
        raise ValueError("elliptic matrix must have c != 0")
    disc = g.trace * g.trace - 4
    x = (g.a - g.d) / (2.0 * g.c)
    y = math.sqrt(-disc) / (2.0 * abs(g.c))
    return Point(x, y)


def automorphy_factor(g: GammaMatrix, z: Point) -> complex:
    """The factor j(g, z) = cz + d."""
    return complex(g.c * z.x + g.d, g.c * z.y)


@dataclass(frozen=True)
class LogComplex:
    """A complex value stored as (log magnitude, phase).

    Stable for k-th powers with k up to ~10^4: the magnitude is handled in
    the log domain and the phase is reduced with a single exact remainder
    after the multiplication by k (iterative subtraction would lose digits
    once k*phase reaches thousands of radians).
    """

    logmag: float
    phase: float

    @classmethod
    def from_complex(cls, t: complex) -> "LogComplex":
        mag = abs(t)
        if mag == 0.0:
            return cls(-math.inf, 0.0)
        return cls(math.log(mag), math.atan2(t.imag, t.real))

    @classmethod
    def from_parts(cls, logmag: float, phase: float) -> "LogComplex":
        return cls(logmag, reduce_phase(phase))

    def to_complex(self) -> complex:
        if self.logmag == -math.inf:
            return 0.0 + 0.0j
        m = math.exp(self.logmag)
        return complex(m * math.cos(self.phase), m * math.sin(self.phase))

    def pow(self, k: int) -> "LogComplex":
        return LogComplex(k * self.logmag, reduce_phase(k * self.phase))

    def __mul__(self, other: "LogComplex") -> "LogComplex":
        return LogComplex(
            self.logmag + other.logmag, reduce_phase(self.phase + other.phase)
        )

    @property
    def magnitude(self) -> float:
        return math.exp(self.logmag)
