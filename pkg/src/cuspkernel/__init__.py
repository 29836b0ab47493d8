"""Certified Bergman-kernel numerics for cusp forms on the modular group."""

from .errors import (
    CuspKernelError,
    CutoffExceeded,
    NoCuspForms,
    StabilizerSearchFailed,
    SupportViolation,
    TailTooLarge,
)
from .halfplane import (
    GammaMatrix,
    LogComplex,
    Point,
    automorphy_factor,
    fixed_point,
    hyp_distance,
    moebius_apply,
    pair_invariant,
)
from .kernel import (
    KernelResult,
    WeightConfig,
    asymptotic_residual,
    b_term,
    bergman_R,
    bergman_main_term,
    elliptic_correction,
    offdiagonal_sum_bound,
    residual_certificate,
)
from .modgroup import (
    CosetRep,
    EllipticPoint,
    StripRegion,
    coset_reps,
    elliptic_points_in_strip,
    in_bulk,
    min_displacement,
    stabilizer,
)
from .equidist import (
    BumpFunction2D,
    IntegralResult,
    MeasureDensity,
    TestFunction,
    dim_cusp_forms,
    integrate_horizontal,
    integrate_region,
    integrate_vertical,
    measure_density,
)
from .oracle import (
    PeterssonNorm,
    QExpansion,
    delta_coeffs,
    eval_delta,
    petersson_norm_delta,
    verify_pretrace,
)

__version__ = "0.1.0"
