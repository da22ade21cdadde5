"""Tests and graphics for equality of covariance matrices across groups."""

from .covstats import (
    BoxMResult,
    CovSummary,
    EigSizeStats,
    box_m,
    eig_size_stats,
    eig_stats,
    logdet_ci,
    scree_data,
    summarize,
)
from .data import GroupedDataset, builtin_dataset, load_data, parse_csv, read_csv, select_variables
from .errors import (
    CovHomogError,
    DegenerateData,
    DegenerateGroup,
    InsufficientSample,
    NamedColumnMissing,
    NotPositiveDefinite,
    ParseError,
    RankDeficient,
    UnknownDataset,
    ValidationError,
)
from .geometry import (
    Ellipse2D,
    PcaProjection,
    centered_pairwise_ellipses,
    ellipse_boundary,
    group_cov_in_component_space,
    pairwise_ellipses,
    pca,
)
from .mlm import DesignMatrix, ManovaResult, levene_deviations, levene_test, manova, residualize

__version__ = "0.1.0"
