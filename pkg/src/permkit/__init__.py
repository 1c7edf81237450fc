"""Exact matrix permanents and random-matrix permanent statistics."""
from .errors import (
    BandwidthError,
    DimensionError,
    InvalidPartitionError,
    MatrixFormatError,
    OrderTooLargeError,
    PermkitError,
    SampleFormatError,
)
from .matrix import AccumulationMode, Matrix, all_ones, as_matrix, read_matrix, write_matrix
from .dense import (
    PartitionRange,
    PermanentResult,
    distribute,
    gray_unrank,
    kahan_sum,
    naive_permanent,
    next_gray,
    permanent,
    permanents,
    subpermanent,
)
from .structured import (
    ColumnMultiplicity,
    GreedyPartition,
    band_permanent,
    band_width,
    column_multiplicities,
    compute_permanent,
    greedy_partition,
    repeated_columns_permanent,
    select_algorithm,
    sparse_permanent,
)
from .ensembles import EnsembleSpec, haar_unitary, sample_matrices, sample_matrix, scaled_minor
from .rng import RngStream
from .stats import (
    SampleSet,
    analyze,
    draw_sample_set,
    empirical_distribution,
    fit_polynomial,
    ks_test,
    moment,
    read_samples,
    write_samples,
)

__version__ = "0.1.0"
