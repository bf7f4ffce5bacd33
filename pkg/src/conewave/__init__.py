"""Fractional integration along light cones: kernels, operators, exponents.

The package is organized bottom-up:

* specialfn - gamma and Bessel-J evaluation with the split into a leading
  oscillation and a decaying remainder;
* kernel    - the unit-ball power kernel family, its spectral profile,
  dilations, and the main/remainder multiplier decomposition;
* fields    - sampled functions on periodic grids, transforms, dilation,
  and the binary/CSV interchange formats;
* conop     - the fractional light-cone integral by three independent
  discretizations (slices, full multiplier, direct cone quadrature);
* analysis  - norms, the weighted-inequality and composition-estimate
  checkers, empirical ratio statistics, and the exponent-region
  classifier;
* ensembles - the test-function families the experiments draw from;
* cli       - the `conewave` command-line driver.
"""

from .kernel import (
    KernelSpec,
    KernelValidityError,
    UnsupportedParameterError,
    gamma_const,
    lambda_of,
    multiplier_split,
    omega_hat,
    omega_hat_adjoint,
    omega_hat_dilated,
    omega_physical,
)
from .fields import (
    Field,
    Grid,
    SpacetimeField,
    SpacetimeGrid,
    AliasingError,
    DomainTagError,
    FieldFormatError,
    convolve_omega,
    dilate_field,
    fourier_transform,
    inverse_transform,
    load_field,
    save_field,
)
from .conop import (
    RadialQuadrature,
    UnderResolvedWarning,
    apply_I_alpha_multiplier,
    apply_I_alpha_slices,
    apply_cone_direct,
    convergence_check,
    multiplier_table,
)
from .analysis import (
    CaseBoundReport,
    ExponentPoint,
    InadmissibleParamsError,
    MixedNormSpec,
    RatioStats,
    Region,
    SteinWeissParams,
    TrendVerdict,
    boundedness_verdict,
    case_bound_check,
    classify,
    classify_exponents,
    crucial_estimate_ratio,
    lp_norm,
    mixed_norm,
    necessary_window,
    operator_ratio_estimate,
    scaling_line_point,
    stein_weiss_ratio,
    sw_derived_params,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
