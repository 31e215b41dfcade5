"""Sub-linear expectations on finite spaces: exact evaluation, inequality checks and simulation."""

from .capacity import CapacityView, choquet, lower_capacity, outer_capacity, upper_capacity
from .expectation import expectation_pair, lower_expect, upper_expect
from .expr import compile_expr, parse
from .model import CredalSet, EventSet, FiniteSpace, Measure, RandomVar, m0, make_measure
from .reports import InequalityReport
from .sequence import PENG_BACKWARD, PENG_FORWARD, QWISE, SequenceModel, eval_lower, eval_upper

__version__ = "0.1.0"
