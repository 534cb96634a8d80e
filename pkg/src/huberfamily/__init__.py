"""Exact Huber solution paths and Bayesian-bootstrap familial tests."""

from huberfamily.errors import DegenerateDataError, InputError
from huberfamily.familial import (Decision, LossMatrix, NullSpec, TestResult,
                                  independent_test, one_sample_test,
                                  paired_test)
from huberfamily.paths import (HuberPath, WeightedSample, eval_path, fit_path,
                               fit_scaled_path, path_range)

__version__ = "0.1.0"

__all__ = [
    "Decision", "DegenerateDataError", "HuberPath", "InputError", "LossMatrix",
    "NullSpec", "TestResult", "WeightedSample", "eval_path", "fit_path",
    "fit_scaled_path", "independent_test", "one_sample_test", "paired_test",
    "path_range",
]
