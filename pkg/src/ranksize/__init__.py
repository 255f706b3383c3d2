"""Rank-size law fitting and three-class ranking segmentation."""

from .errors import (FitError, ModelDomainError, ParseError, RankSizeError,
                     SingularDesignError, TooFewRecordsError)
from .goodness import ModelComparison, chi_square, compare, r_squared
from .ingest import (RankedSeries, RankMotion, RawRecord, UniversalSeries, parse_records,
                     rank_motion, rank_series, read_series, series_from_sizes, to_universal,
                     write_series)
from .models import (FAMILIES, ModelSpec, ParamVector, central_log_slope, central_relative_slope,
                     evaluate, log_jacobian, reduce_to_power_law, relative_slope)
from .optimizer import FitOptions, FitResult, fit, init_guess, lm_fit
from .segmentation import (SegmentationConfig, SegmentationResult, detect_shoulder,
                           detect_top_boundary, fit_middle_class, fit_top_class, segment)
from .stats import SummaryStats, summarize
from .synth import (NoiseSpec, Segment, SpliceSpec, TailSuppression, generate, generate_spliced,
                    three_class_splice)
from .zeta import zeta, zeta_pareto_pmf, zeta_with_derivative, zipf_amplitude_estimate

__version__ = "0.1.0"
