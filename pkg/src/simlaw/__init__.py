"""simlaw: dimensionless constructions, their similarity and
renormalization scaling groups, and data-driven discovery of
incomplete-similarity exponents.

Modules
-------
dimensions  dimension systems, constructions, Pi evaluation
groups      Buckingham similarity groups and renormalization groups
dataset     dimensionless data tables and CSV I/O
learner     exponent-learning network, training, data collapse
flows       analytic laminar / Herschel-Bulkley / rough-pipe generators
cli         command-line entry point (`simlaw`)
"""

__version__ = "0.1.0"

from . import _kernels as kernels
from .dataset import DimensionlessDataset, make_dataset, read_csv, write_csv
from .dimensions import (
    DimensionSystem,
    MDDPConstruction,
    build_construction,
    dependent_alpha,
    evaluate_pi,
)
from .groups import (
    BuckinghamGroup,
    IncompleteSimilaritySpec,
    RenormalizationGroup,
    apply_group,
    buckingham_group,
    buckingham_group_closed_form,
    renormalization_group,
    verify_invariance,
)
from .learner import (
    ExponentModel,
    FitResult,
    TrainConfig,
    collapse,
    collapse_quality,
    forward,
    gradients,
    loss,
    train,
)
