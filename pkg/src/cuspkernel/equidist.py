"""Averaged-mass integrals along vertical geodesics, horizontal segments,
and compact plane regions, with certified per-node error accounting.

The density against the respective base measure is
(k-1)/(8 pi dim) * R_k(z, z); at a bulk point it approaches 2 * (k-1)/(8 pi dim)
-> 3/pi, which is the constant the integrals are compared against.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

from .errors import NoCuspForms, SupportViolation
from .halfplane import Point
from .kernel import WeightConfig, bergman_R
from .modgroup import StripRegion, elliptic_points_in_strip
from .quadrature import adaptive

THREE_OVER_PI = 3.0 / math.pi


def dim_cusp_forms(k: int) -> int:
    """Dimension of the weight-k cusp space for the full modular group."""
    if k % 2 != 0:
        raise ValueError(f"weight must be even, got {k}")
    if k < 0:
        raise ValueError(f"weight must be nonnegative, got {k}")
    if k == 0:
        return 0
    dim_mk = k // 12 + (0 if k % 12 == 2 else 1)
    return max(dim_mk - 1, 0)


def _bump(t: float) -> float:
    """The standard flat template exp(-1/(1-t^2)) on (-1, 1)."""
    if abs(t) >= 1.0:
        return 0.0
    return math.exp(-1.0 / (1.0 - t * t))


@dataclass
class TestFunction:
    """A 1-D test function with compact support and a frozen reference integral.

    weight selects the base measure of the reference integral: "log" pairs
    with dy/y on the positive axis (vertical geodesics), "lin" with dx on
    the circle (horizontal segments).
    """

    kind: str  # smooth_bump | indicator | tabulated
    a: float
    b: float
    weight: str = "log"
    values: tuple = ()  # tabulated only: samples on a uniform grid over [a, b]
    reference_integral: float = field(init=False)

    def __post_init__(self):
        if self.kind not in ("smooth_bump", "indicator", "tabulated"):
            raise ValueError(f"unknown kind {self.kind!r}")
        if self.weight not in ("log", "lin"):
            raise ValueError(f"unknown weight {self.weight!r}")
        if not self.b > self.a:
            raise ValueError("support must be a nonempty interval")
        if self.weight == "log" and self.a <= 0:
            raise ValueError("log-weight support must stay positive")
        if self.kind == "tabulated" and len(self.values) < 2:
            raise ValueError("tabulated functions need at least two samples")
        if self.weight == "log":
            f = lambda y: self(y) / y
        else:
            f = lambda y: self(y)
        val, err, _, _ = adaptive(f, self.a, self.b, rtol=1e-13, atol=1e-15)
        if err > 1e-12 * max(abs(val), 1.0):
            raise ValueError("reference integral did not converge to 1e-12")
        self.reference_integral = val

    @classmethod
    def bump(cls, a: float, b: float, weight: str = "log") -> "TestFunction":
        return cls("smooth_bump", a, b, weight)

    @classmethod
    def indicator(cls, a: float, b: float, weight: str = "lin") -> "TestFunction":
        return cls("indicator", a, b, weight)

    @property
    def support(self) -> tuple:
        return (self.a, self.b)

    def __call__(self, s: float) -> float:
        if self.kind == "indicator":
            return 1.0 if self.a <= s <= self.b else 0.0
        if s <= self.a or s >= self.b:
            return 0.0
        if self.kind == "smooth_bump":
            t = (2.0 * s - (self.a + self.b)) / (self.b - self.a)
            return _bump(t)
        # tabulated: linear interpolation
        n = len(self.values) - 1
        pos = (s - self.a) / (self.b - self.a) * n
        i = min(int(pos), n - 1)
        frac = pos - i
        return self.values[i] * (1.0 - frac) + self.values[i + 1] * frac


@dataclass
class BumpFunction2D:
    """A radial smooth bump in the plane with its dxdy/y^2 reference integral."""

    center_x: float
    center_y: float
    radius: float
    reference_integral: float = field(init=False)

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("radius must be positive")
        if self.center_y - self.radius <= 0:
            raise ValueError("support must stay in the upper half-plane")

        def inner(x):
            lo, hi = self._chord(x)
            if hi <= lo:
                return 0.0
            val, err, _, _ = adaptive(
                lambda y: self(x, y) / (y * y), lo, hi, rtol=1e-12, atol=1e-16
            )
            return val

        val, err, _, _ = adaptive(
            inner, self.center_x - self.radius, self.center_x + self.radius,
            rtol=1e-11, atol=1e-15,
        )
        self.reference_integral = val

    def _chord(self, x: float) -> tuple:
        h2 = self.radius ** 2 - (x - self.center_x) ** 2
        if h2 <= 0.0:
            return (self.center_y, self.center_y)
        h = math.sqrt(h2)
        return (self.center_y - h, self.center_y + h)

    def __call__(self, x: float, y: float) -> float:
        r = math.hypot(x - self.center_x, y - self.center_y) / self.radius
        return _bump(r)


@dataclass(frozen=True)
class MeasureDensity:
    """Normalization data for the averaged mass density."""

    k: int
    dim: int
    normalization: float

    @classmethod
    def for_weight(cls, k: int) -> "MeasureDensity":
        dim = dim_cusp_forms(k)
        if dim == 0:
            raise NoCuspForms(f"weight {k} has no cusp forms")
        return cls(k, dim, (k - 1) / (8.0 * math.pi * dim))


class IntegralResult(NamedTuple):
    integral: float
    reference: float
    error: float
    nodes: int


def measure_density(z: Point, cfg: WeightConfig, *, fast: bool = False) -> float:
    """(k-1)/(8 pi dim) * R_k(z, z); the imaginary part of the kernel on the
    diagonal must vanish within its certified tail."""
    density, _err = _density_with_error(z, cfg, fast=fast)
    return density


def _density_with_error(z: Point, cfg: WeightConfig, *, fast: bool = False):
    md = MeasureDensity.for_weight(cfg.k)
    res = bergman_R(z, z, cfg, fast=fast)
    if abs(res.value.imag) > res.tail_bound + 1e-9:
        raise RuntimeError(
            f"diagonal kernel has spurious imaginary part {res.value.imag:.3e}"
        )
    return md.normalization * res.value.real, md.normalization * res.tail_bound


def _check_window(lo: float, hi: float, cfg: WeightConfig, region: StripRegion,
                  what: str) -> None:
    bottom = 1.0 / region.Y
    top = cfg.support_top()
    if not (lo > bottom and hi < top):
        raise SupportViolation(
            f"{what} [{lo}, {hi}] outside the admissible window "
            f"({bottom:.6g}, {top:.6g}) at k={cfg.k}, A={cfg.A}"
        )


def _vertical_crossings(x: float, elliptic_list, delta: float) -> list:
    """Heights where the vertical line at x enters/leaves a neighborhood."""
    s = math.sinh(0.5 * delta) ** 2
    out = []
    for e in elliptic_list:
        ex, ey = e.location.x, e.location.y
        bb = ey * (1.0 + 2.0 * s)
        disc = bb * bb - (ey * ey + (x - ex) ** 2)
        if disc > 0.0:
            r = math.sqrt(disc)
            out.extend((bb - r, bb + r))
    return out


def _horizontal_crossings(y: float, elliptic_list, delta: float) -> list:
    s = math.sinh(0.5 * delta) ** 2
    out = []
    for e in elliptic_list:
        ex, ey = e.location.x, e.location.y
        rhs = 4.0 * s * ey * y - (y - ey) ** 2
        if rhs > 0.0:
            r = math.sqrt(rhs)
            out.extend((ex - r, ex + r))
    return out


def integrate_vertical(x: float, psi: TestFunction, cfg: WeightConfig,
                       region: StripRegion, *, unsafe: bool = False,
                       rtol: float = 1e-4, fast: bool = False) -> IntegralResult:
    """Integral of psi(y) against the mass density along Re z = x, with the
    squeezed-limit reference (3/pi) * int psi dy/y."""
    if psi.weight != "log":
        raise ValueError("vertical test functions use the dy/y weight")
    if abs(x) > 0.5:
        raise ValueError("x must lie in [-1/2, 1/2]")
    if not unsafe:
        _check_window(psi.a, psi.b, cfg, region, "support")
    elist = elliptic_points_in_strip(region.Y)
    delta = cfg.delta_for(region.Y)
    breaks = _vertical_crossings(x, elist, delta)

    def f(y):
        p = psi(y)
        if p == 0.0:
            return (0.0, 0.0)
        dens, derr = _density_with_error(Point(x, y), cfg, fast=fast)
        return (p * dens / y, abs(p) * derr / y)

    val, qerr, extra, nodes = adaptive(
        f, psi.a, psi.b, rtol=rtol, breakpoints=breaks
    )
    ref = THREE_OVER_PI * psi.reference_integral
    return IntegralResult(val, ref, qerr + extra, nodes)


def integrate_horizontal(y: float, psi: TestFunction, cfg: WeightConfig,
                         region: StripRegion, *, unsafe: bool = False,
                         rtol: float = 1e-4, fast: bool = False) -> IntegralResult:
    """Integral of psi(x) against the mass density along Im z = y over one
    period, with reference (3/pi) * int psi dx.  psi may be an indicator."""
    if psi.weight != "lin":
        raise ValueError("horizontal test functions use the dx weight")
    if not unsafe:
        _check_window(y, y, cfg, region, "height")
        if psi.a < -0.5 - 1e-12 or psi.b > 0.5 + 1e-12:
            raise SupportViolation("support must fit in one period [-1/2, 1/2]")
    elist = elliptic_points_in_strip(region.Y)
    delta = cfg.delta_for(region.Y)
    breaks = _horizontal_crossings(y, elist, delta)

    def f(x):
        p = psi(x)
        if p == 0.0:
            return (0.0, 0.0)
        dens, derr = _density_with_error(Point(x, y), cfg, fast=fast)
        return (p * dens, abs(p) * derr)

    val, qerr, extra, nodes = adaptive(
        f, psi.a, psi.b, rtol=rtol, breakpoints=breaks
    )
    ref = THREE_OVER_PI * psi.reference_integral
    return IntegralResult(val, ref, qerr + extra, nodes)


def integrate_region(phi: BumpFunction2D, cfg: WeightConfig, *,
                     rtol: float = 1e-4, fast: bool = False,
                     unsafe: bool = False) -> IntegralResult:
    """2-D integral of phi against the mass density with the dxdy/y^2 base
    measure, compared to (3/pi) * int phi dxdy/y^2."""
    if not unsafe:
        if abs(phi.center_x) + phi.radius > 0.5 + 1e-12:
            raise SupportViolation("support leaves |Re z| <= 1/2")
        if math.hypot(phi.center_x, phi.center_y) - phi.radius < 1.0 - 1e-12:
            raise SupportViolation("support dips below the unit circle")
    nodes_total = 0

    def outer(x):
        nonlocal nodes_total
        lo, hi = phi._chord(x)
        if hi <= lo:
            return (0.0, 0.0)

        def inner(y):
            p = phi(x, y)
            if p == 0.0:
                return (0.0, 0.0)
            dens, derr = _density_with_error(Point(x, y), cfg, fast=fast)
            return (p * dens / (y * y), abs(p) * derr / (y * y))

        val, qerr, extra, nodes = adaptive(inner, lo, hi, rtol=0.25 * rtol)
        nodes_total += nodes
        return (val, qerr + extra)

    val, qerr, extra, nodes = adaptive(
        outer, phi.center_x - phi.radius, phi.center_x + phi.radius, rtol=rtol
    )
    nodes_total += nodes
    ref = THREE_OVER_PI * phi.reference_integral
    return IntegralResult(val, ref, qerr + extra, nodes_total)
