"""Dual-based bidding toolkit for demand-side platforms.

Subpackages cover the pipeline end to end: `landscape` models the highest
competing bid per impression, `utility` hosts the phi/psi utility family and
the objective/constraint encoders, `mmkp` solves the knapsack-relaxation dual
by projected stochastic subgradient descent, `dsp` specializes the solver to
ad selection and bid pricing, `strategies` provides the LIN and ORTB
baselines, `sim` generates synthetic instances and runs expectation-mode and
Monte-Carlo experiments, and `cli` ties it together as a command line tool.
"""

__version__ = "0.1.0"

from .landscape import BidObservation, LandscapePrior, Outcome, fit_censored
from .utility import (
    AdEconomics,
    ConstraintKind,
    ConstraintSpec,
    ObjectiveKind,
    ObjectiveSpec,
    PaymentMode,
    UtilityCoeffs,
)
from .mmkp import ChoiceModel, DualState, dual_objective, sgd_solve
from .dsp import Ad, BidDecision, DspChoiceModel, DspInstance, Impression, bid_decision
from .sim import MockConfig, SimReport, gen_mock_instance, run_expectation, run_monte_carlo

__all__ = [
    "__version__",
    "Ad",
    "AdEconomics",
    "BidDecision",
    "BidObservation",
    "ChoiceModel",
    "ConstraintKind",
    "ConstraintSpec",
    "DspChoiceModel",
    "DspInstance",
    "DualState",
    "Impression",
    "LandscapePrior",
    "MockConfig",
    "ObjectiveKind",
    "ObjectiveSpec",
    "Outcome",
    "PaymentMode",
    "SimReport",
    "UtilityCoeffs",
    "bid_decision",
    "dual_objective",
    "fit_censored",
    "gen_mock_instance",
    "run_expectation",
    "run_monte_carlo",
    "sgd_solve",
]
