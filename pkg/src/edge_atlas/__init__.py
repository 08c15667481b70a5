"""edge-atlas: phase structure of deep tanh/swish network initializations.

The package computes the mean-field phase diagram of fully connected
networks over the (sigma_w^2, sigma_b^2) plane: the variance fixed point,
the edge of chaos (chi = 1), the line of uniformity (maximally uniform
post-activations), correlation depth scales, and the constrained fits
they support; and it validates the theory against small trained networks
on MNIST.
"""

__version__ = "0.1.0"

from .errors import EdgeAtlasError
from .gaussian_calculus import (
    SWISH,
    TANH,
    Activation,
    GaussianSpec,
    QuadratureRule,
    chi,
    chi_tilde,
    correlation_length,
    entropy_minimum_variance,
    get_activation,
    post_density,
    pre_density,
    relative_entropy_uniform,
    variance_map,
)
from .phase_map import (
    EocCurve,
    FixedPointSolution,
    PhaseGrid,
    PhasePoint,
    eoc_curve,
    iso_variance_line,
    iterate_variance,
    line_of_uniformity,
    lou_eoc_intersection,
    phase_grid,
    solve_eoc_point,
    solve_fixed_point,
)
from .fitting import (
    DatasetStats,
    EocFit,
    ThresholdFit,
    analytic_threshold,
    fit_eoc_curve,
    fit_eoc_polynomial,
    fit_threshold,
)
from .network import (
    Network,
    NetworkConfig,
    TrainConfig,
    TrainRecord,
    backward,
    forward,
    init_network,
    softmax_cross_entropy,
    train,
)
from .datasets import (
    ImageSet,
    compute_stats,
    load_idx,
    load_mnist,
    resolve_data_dir,
    subset,
)
from .experiments import (
    PostEvolution,
    SweepResult,
    SweepSpec,
    pooled_std,
    run_depth_sweep,
    run_eoc_sweep,
    run_post_evolution,
    run_threshold_sweep,
)
