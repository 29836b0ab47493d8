"""Independent weight-12 oracle: the discriminant form via its q-expansion.

This module never touches the kernel lattice sum: coefficients come from
the 24th power of the pentagonal-number series, evaluation from the
q-expansion with a certified tail, and the Petersson norm from quadrature
over the fundamental domain (Fourier-diagonalized in x, extended-precision
in y).  The one function that compares the two code paths,
verify_pretrace, imports the kernel locally so the independence of the
module is auditable.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import mpmath as mp

from .errors import TailTooLarge
from .halfplane import Point

SQRT3_2 = math.sqrt(3.0) / 2.0


def _euler_series(n_terms: int) -> list:
    """Coefficients of prod (1 - q^n) up to q^(n_terms-1), by pentagonal numbers."""
    coeffs = [0] * n_terms
    coeffs[0] = 1
    j = 1
    while True:
        done = True
        for g in (j * (3 * j - 1) // 2, j * (3 * j + 1) // 2):
            if g < n_terms:
                coeffs[g] += -1 if j % 2 else 1
                done = False
        if done:
            break
        j += 1
    return coeffs


def _mul_trunc(a: list, b: list, n: int) -> list:
    out = [0] * n
    for i, ai in enumerate(a):
        if ai == 0 or i >= n:
            continue
        top = min(n - i, len(b))
        for j in range(top):
            bj = b[j]
            if bj:
                out[i + j] += ai * bj
    return out


@dataclass(frozen=True)
class QExpansion:
    """Integer Fourier coefficients a(1..N) of a weight-k eigenform."""

    weight: int
    coeffs: tuple  # a(1), a(2), ..., a(N)
    N: int

    def a(self, n: int) -> int:
        if not 1 <= n <= self.N:
            raise IndexError(f"coefficient a({n}) beyond truncation {self.N}")
        return self.coeffs[n - 1]


_delta_cache: dict = {}


def delta_coeffs(N: int) -> QExpansion:
    """Exact coefficients of the weight-12 discriminant form up to a(N).

    q * prod (1-q^n)^24, computed by square-and-multiply on truncated
    integer series; Python integers keep everything exact.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    cached = _delta_cache.get("coeffs")
    if cached is None or len(cached) < N:
        e1 = _euler_series(N)
        e2 = _mul_trunc(e1, e1, N)
        e4 = _mul_trunc(e2, e2, N)
        e8 = _mul_trunc(e4, e4, N)
        e16 = _mul_trunc(e8, e8, N)
        e24 = _mul_trunc(e16, e8, N)
        _delta_cache["coeffs"] = e24  # a(n) = e24[n-1] after the q shift
        cached = e24
    return QExpansion(12, tuple(cached[:N]), N)


def _coeff_tail_bound(N: int, y: float) -> float:
    """Upper bound on sum_{n>N} |a(n)| e^{-2 pi n y}, using |a(n)| <= n^{15/2}."""
    x = math.exp(-2.0 * math.pi * y)
    first = (N + 1) ** 7.5 * x ** (N + 1)
    ratio = x * ((N + 2) / (N + 1)) ** 7.5
    if ratio >= 1.0:
        return math.inf
    return first / (1.0 - ratio)


def eval_delta(z: Point, N: int | None = None) -> complex:
    """Sum of a(n) e^{2 pi i n z} with the tail certified below 1e-16 of the
    leading term; raises TailTooLarge if N is given and insufficient."""
    if z.y < 0.5:
        raise ValueError("evaluation requires Im z >= 0.5")
    lead = math.exp(-2.0 * math.pi * z.y)
    if N is None:
        N = 10
        while _coeff_tail_bound(N, z.y) > 1e-16 * lead:
            N += 5
            if N > 10_000:
                raise TailTooLarge("cannot certify the q-series tail")
    elif _coeff_tail_bound(N, z.y) > 1e-16 * lead:
        raise TailTooLarge(
            f"tail {_coeff_tail_bound(N, z.y):.3e} too large at N={N}, y={z.y}"
        )
    qexp = delta_coeffs(N)
    q = complex(
        math.exp(-2.0 * math.pi * z.y) * math.cos(2.0 * math.pi * z.x),
        math.exp(-2.0 * math.pi * z.y) * math.sin(2.0 * math.pi * z.x),
    )
    acc = 0.0 + 0.0j
    for n in range(N, 0, -1):
        acc = (acc + qexp.coeffs[n - 1]) * q
    return acc


def eval_delta_mp(z: Point, dps: int = 30):
    """Extended-precision evaluation (mpmath), tail below 10^-(dps+2)."""
    with mp.workdps(dps + 8):
        y = mp.mpf(z.y)
        lead = mp.e ** (-2 * mp.pi * y)
        target = lead * mp.mpf(10) ** (-(dps + 2))
        N = 10
        while _coeff_tail_bound(N, z.y) > float(target):
            N += 5
            if N > 20_000:
                raise TailTooLarge("cannot certify the q-series tail")
        qexp = delta_coeffs(N)
        q = mp.e ** (2j * mp.pi * mp.mpc(z.x, z.y))
        acc = mp.mpc(0)
        for n in range(N, 0, -1):
            acc = (acc + qexp.coeffs[n - 1]) * q
        return acc


@dataclass(frozen=True)
class PeterssonNorm:
    value: float
    error_bound: float
    nodes: int


_norm_cache: dict = {}


def petersson_norm_delta(tol: float = 1e-10, y_cut: float = 1.0,
                         dps: int = 30) -> PeterssonNorm:
    """The squared Petersson norm of the discriminant form.

    Splits the fundamental domain at height y_cut: above it the x-integral
    diagonalizes the Fourier series exactly and the y-integral is a sum of
    upper incomplete gamma values; below it (down to the unit-circle arc)
    the x-integral is still exact per Fourier pair and only the height
    integral is done numerically, with tanh-sinh quadrature in extended
    precision.  The reported error combines the quadrature estimates of two
    precision levels with the certified series tails.
    """
    if tol < 1e-12:
        raise ValueError("tol below 1e-12 is not supported")
    if y_cut < 1.0:
        raise ValueError("the height cut must be >= 1")
    key = (tol, y_cut, dps)
    if key in _norm_cache:
        return _norm_cache[key]

    N = 30
    qexp = delta_coeffs(N)
    nodes = 0

    def compute(working_dps: int):
        nonlocal nodes
        with mp.workdps(working_dps):
            pi4 = 4 * mp.pi
            # strip above y_cut: sum_n a_n^2 Gamma(11, 4 pi n y_cut)/(4 pi n)^11
            strip = mp.mpf(0)
            for n in range(1, N + 1):
                s = pi4 * n
                strip += mp.mpf(qexp.coeffs[n - 1]) ** 2 * mp.gammainc(
                    11, s * y_cut
                ) / s ** 11

            def series_at(y, x0):
                # x-integrated |Delta|^2 over {x0 <= |x| <= 1/2} at height y
                total = mp.mpf(0)
                for n in range(1, N + 1):
                    an = qexp.coeffs[n - 1]
                    total += mp.mpf(an) ** 2 * mp.e ** (-pi4 * n * y) * (1 - 2 * x0)
                if x0 > 0:
                    for m in range(1, N + 1):
                        am = qexp.coeffs[m - 1]
                        for n in range(m + 1, N + 1):
                            an = qexp.coeffs[n - 1]
                            d = n - m
                            total -= (
                                2 * mp.mpf(am) * an
                                * mp.e ** (-2 * mp.pi * (m + n) * y)
                                * mp.sin(2 * mp.pi * d * x0) / (mp.pi * d)
                            )
                return total

            def lens_integrand(y):
                nonlocal nodes
                nodes += 1
                x0 = mp.sqrt(1 - y * y) if y < 1 else mp.mpf(0)
                return y ** 10 * series_at(y, x0)

            lens, lens_err = mp.quad(
                lens_integrand, [mp.sqrt(3) / 2, 1], error=True
            )
            mid = mp.mpf(0)
            mid_err = mp.mpf(0)
            if y_cut > 1.0:
                mid, mid_err = mp.quad(
                    lens_integrand, [1, mp.mpf(y_cut)], error=True
                )
            return strip + lens + mid, lens_err + mid_err

    v1, e1 = compute(dps)
    v2, e2 = compute(dps + 10)
    value = float(v2)
    # certified series tails beyond a(N): the omitted Fourier pairs in the
    # lens (bounded at the lowest height, then weighted by int y^10 dy) and
    # the omitted strip coefficients
    lens_tail = 0.0
    s = N + 1
    while True:
        t = (s ** 16 / 2.0 ** 15) * math.exp(-2.0 * math.pi * SQRT3_2 * s)
        lens_tail += t
        ratio = math.exp(-2.0 * math.pi * SQRT3_2) * ((s + 1) / s) ** 16
        if ratio < 1.0 and t < 1e-60:
            lens_tail += t * ratio / (1.0 - ratio)
            break
        s += 1
        if s > N + 10_000:
            break
    lens_tail *= y_cut ** 11 / 11.0
    strip_tail = 0.0
    n = N + 1
    while 4.0 * math.pi * n * y_cut > 20.0:
        # Gamma(11, a) <= 2 a^10 e^-a for a >= 20
        t = n ** 14 * 2.0 * y_cut ** 10 * math.exp(
            -4.0 * math.pi * n * y_cut
        ) / (4.0 * math.pi)
        strip_tail += t
        ratio = math.exp(-4.0 * math.pi * y_cut) * ((n + 1) / n) ** 14
        if ratio < 1.0 and t < 1e-60:
            strip_tail += t * ratio / (1.0 - ratio)
            break
        n += 1
        if n > N + 10_000:
            break
    err = (abs(float(v1 - v2)) + float(e1 + e2) + lens_tail + strip_tail
           + 1e-16 * value)  # floor at double-precision representation
    if err > tol * value:
        raise TailTooLarge(
            f"norm error bound {err:.3e} exceeds tol*value {tol * value:.3e}"
        )
    result = PeterssonNorm(value, err, nodes)
    _norm_cache[key] = result
    return result


def verify_pretrace(z: Point, cfg=None, *, kernel_tol: float = 1e-14,
                    norm_tol: float = 1e-10, dps: int = 30) -> float:
    """Relative residual between y^12 |Delta(z)|^2 / <Delta, Delta> and
    (11/(8 pi)) R_12(z, z), the two sides computed by independent paths."""
    from .kernel import WeightConfig, bergman_R  # local: keeps module independent

    if cfg is not None:
        if cfg.k != 12:
            raise ValueError("the oracle covers weight 12 only")
        kernel_tol = cfg.tol
    norm = petersson_norm_delta(norm_tol, dps=dps)
    with mp.workdps(dps):
        dval = eval_delta_mp(z, dps=dps)
        lhs = float(mp.mpf(z.y) ** 12 * abs(dval) ** 2 / mp.mpf(norm.value))
    res = bergman_R(z, z, WeightConfig(12, kernel_tol))
    rhs = (11.0 / (8.0 * math.pi)) * res.value.real
    return abs(lhs - rhs) / abs(rhs)


def write_coeffs_csv(qexp: QExpansion, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "a_n"])
        for n in range(1, qexp.N + 1):
            writer.writerow([n, qexp.a(n)])
