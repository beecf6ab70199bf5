"""Synthetic instance generation and auction simulation.

Two execution modes cover different questions. Expectation mode evaluates the
dual-based strategy analytically (win probabilities and expected costs in
closed form), which isolates solver correctness from sampling noise.
Monte-Carlo mode samples the highest competing bid per impression, applies
the second-price rule (win iff bid exceeds it, pay it), and lets feedback
strategies adjust their parameters between epochs; running several strategies
on a common seed reuses identical draws, so comparisons are paired.

Only the auction outcome is sampled: won impressions are credited their
expected performance, which keeps windowed ROI estimates usable at desk
scale. Realized consumption of a constraint row mirrors its encoding, with
the win indicator in place of the win probability and the paid price in
place of the expected cost.
"""

from __future__ import annotations

import csv
import json
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from . import mmkp
from .dsp import Ad, BidDecision, DspChoiceModel, DspInstance, Impression, bid_decision
from .landscape import BidObservation, LandscapePrior, Outcome
from .strategies import LinState, OrtbState, lin_bid, multiplicative_update, ortb_bid, ortb_fit_c
from .utility import (
    AdEconomics,
    ConstraintKind,
    ConstraintSpec,
    DEFAULT_BID_CAP,
    ObjectiveKind,
    ObjectiveSpec,
    PaymentMode,
    constraint_limit,
)

__all__ = [
    "CONSTRAINT_CSV_HEADER",
    "EPOCH_CSV_HEADER",
    "ConstraintRow",
    "DualBidStrategy",
    "EpochMetrics",
    "FixedAlphaStrategy",
    "InstanceFormatError",
    "InvalidRangeError",
    "LinStrategy",
    "MockConfig",
    "OrtbStrategy",
    "SimReport",
    "Strategy",
    "compare_strategies",
    "gen_mock_instance",
    "instance_from_json",
    "instance_target_roi",
    "instance_to_json",
    "load_instance",
    "make_strategy",
    "run_expectation",
    "run_monte_carlo",
    "save_instance",
    "write_constraints_csv",
    "write_epoch_metrics_csv",
]


class InvalidRangeError(ValueError):
    """A mock-config sampling range is malformed."""


class InstanceFormatError(ValueError):
    """An instance JSON document does not match the expected schema."""


# ---------------------------------------------------------------------------
# Mock instance generation
# ---------------------------------------------------------------------------


@dataclass
class MockConfig:
    """Knobs for synthetic instance generation; defaults give the standard
    two-ad case: budgets 20 and 10 scoped per ad, a global DSP ROI floor of 2
    and a global advertiser ROI floor of 0.5.

    Sampling ranges are uniform and are this harness's choice; they are tuned
    so the budgets stay slack and the DSP ROI constraint binds.
    """

    n_impressions: int = 200
    ads: tuple[float, ...] = (1.0, 2.0)
    mode: PaymentMode = PaymentMode.P4P
    objective_kind: ObjectiveKind = ObjectiveKind.REVENUE
    constraints: list[ConstraintSpec] | None = None
    mu_range: tuple[float, float] = (-4.0, -2.0)
    sigma_range: tuple[float, float] = (0.3, 0.9)
    ppi_range: tuple[float, float] = (0.0, 0.1)
    bid_cap: float = DEFAULT_BID_CAP
    seed: int = 0

    def validate(self) -> None:
        if self.n_impressions < 0:
            raise InvalidRangeError(f"n_impressions must be >= 0, got {self.n_impressions}")
        if not self.ads:
            raise InvalidRangeError("at least one ad is required")
        for name, (lo, hi) in (
            ("mu_range", self.mu_range),
            ("sigma_range", self.sigma_range),
            ("ppi_range", self.ppi_range),
        ):
            if not (math.isfinite(lo) and math.isfinite(hi) and lo <= hi):
                raise InvalidRangeError(f"{name} must be a finite (lo, hi) pair, got {(lo, hi)}")
        if self.sigma_range[0] <= 0.0:
            raise InvalidRangeError("sigma_range must be strictly positive")
        if self.ppi_range[0] < 0.0:
            raise InvalidRangeError("ppi_range must be nonnegative")


def _default_constraints(ad_ids: list[str], mode: PaymentMode) -> list[ConstraintSpec]:
    everyone = frozenset(ad_ids)
    rows: list[ConstraintSpec] = []
    budgets = [20.0, 10.0] if len(ad_ids) == 2 else [20.0] * len(ad_ids)
    for ad_id, budget in zip(ad_ids, budgets):
        rows.append(ConstraintSpec(ConstraintKind.BUDGET, mode, budget, frozenset([ad_id])))
    rows.append(ConstraintSpec(ConstraintKind.DSP_ROI, mode, 2.0, everyone))
    rows.append(ConstraintSpec(ConstraintKind.ADVERTISER_ROI, mode, 0.5, everyone))
    return rows


def gen_mock_instance(config: MockConfig) -> DspInstance:
    """Draw a deterministic synthetic instance from the config seed."""
    config.validate()
    ad_ids = [f"ad{j + 1}" for j in range(len(config.ads))]
    if config.mode is PaymentMode.P4P:
        ads = [Ad(ad_id, AdEconomics(cpp=value)) for ad_id, value in zip(ad_ids, config.ads)]
    else:
        ads = [Ad(ad_id, AdEconomics(cr=value)) for ad_id, value in zip(ad_ids, config.ads)]
    constraints = (
        list(config.constraints)
        if config.constraints is not None
        else _default_constraints(ad_ids, config.mode)
    )
    rng = np.random.default_rng(config.seed)
    mus = rng.uniform(*config.mu_range, config.n_impressions)
    sigmas = rng.uniform(*config.sigma_range, config.n_impressions)
    ppi = rng.uniform(*config.ppi_range, (config.n_impressions, len(ads)))
    impressions = [
        Impression(i, LandscapePrior(float(mus[i]), float(sigmas[i])), tuple(ppi[i]))
        for i in range(config.n_impressions)
    ]
    return DspInstance(
        mode=config.mode,
        objective=ObjectiveSpec(config.mode, config.objective_kind),
        ads=ads,
        constraints=constraints,
        impressions=impressions,
        bid_cap=config.bid_cap,
    )


# ---------------------------------------------------------------------------
# Instance JSON
# ---------------------------------------------------------------------------


def instance_to_json(instance: DspInstance, seed: int | None = None) -> dict:
    ads = []
    for ad in instance.ads:
        entry: dict = {"id": ad.id}
        if ad.economics.cpp is not None:
            entry["cpp"] = ad.economics.cpp
        if ad.economics.cr is not None:
            entry["cr"] = ad.economics.cr
        ads.append(entry)
    payload = {
        "mode": instance.mode.value,
        "objective": {"mode": instance.objective.mode.value, "kind": instance.objective.kind.value},
        "bid_cap": instance.bid_cap,
        "ads": ads,
        "constraints": [
            {
                "kind": spec.kind.value,
                "mode": spec.mode.value,
                "bound": spec.bound,
                "scope": sorted(spec.scope),
            }
            for spec in instance.constraints
        ],
        "impressions": [
            {"id": imp.id, "mu": imp.prior.mu, "sigma": imp.prior.sigma, "ppi": list(imp.ppi)}
            for imp in instance.impressions
        ],
    }
    if seed is not None:
        payload["seed"] = seed
    return payload


def instance_from_json(payload: dict) -> DspInstance:
    try:
        mode = PaymentMode(payload["mode"])
        objective = ObjectiveSpec(
            PaymentMode(payload["objective"]["mode"]), ObjectiveKind(payload["objective"]["kind"])
        )
        ads = [
            Ad(entry["id"], AdEconomics(cpp=entry.get("cpp"), cr=entry.get("cr")))
            for entry in payload["ads"]
        ]
        constraints = [
            ConstraintSpec(
                ConstraintKind(entry["kind"]),
                PaymentMode(entry["mode"]),
                float(entry["bound"]),
                frozenset(entry["scope"]),
            )
            for entry in payload["constraints"]
        ]
        impressions = [
            Impression(
                entry.get("id", i),
                LandscapePrior(float(entry["mu"]), float(entry["sigma"])),
                tuple(entry["ppi"]),
            )
            for i, entry in enumerate(payload["impressions"])
        ]
        return DspInstance(
            mode=mode,
            objective=objective,
            ads=ads,
            constraints=constraints,
            impressions=impressions,
            bid_cap=float(payload.get("bid_cap", DEFAULT_BID_CAP)),
        )
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InstanceFormatError):
            raise
        raise InstanceFormatError(f"malformed instance document: {exc}") from exc


def save_instance(path: str | Path, instance: DspInstance, seed: int | None = None) -> None:
    with open(path, "w") as handle:
        json.dump(instance_to_json(instance, seed), handle, indent=2, sort_keys=True)
        handle.write("\n")


def load_instance(path: str | Path) -> DspInstance:
    with open(path) as handle:
        return instance_from_json(json.load(handle))


def instance_target_roi(instance: DspInstance) -> float | None:
    """Bound of the first DSP-ROI constraint, the natural feedback target."""
    for spec in instance.constraints:
        if spec.kind is ConstraintKind.DSP_ROI:
            return spec.bound
    return None


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ConstraintRow:
    """Accounting line for one constraint; surplus is derived, never stored."""

    k: int
    limit: float
    consumption: float
    alpha: float | None = None

    @property
    def surplus(self) -> float:
        return self.limit - self.consumption


@dataclass(frozen=True)
class EpochMetrics:
    epoch: int
    revenue: float
    cost: float
    performance: float
    wins: int
    actual_roi: float
    revenue_per_win: float
    param: float | None = None
    degenerate: bool = False


@dataclass
class SimReport:
    primal_value: float | None
    dual_value: float | None
    per_constraint: list[ConstraintRow]
    per_strategy_metrics: dict[str, list[EpochMetrics]] = field(default_factory=dict)
    seed: int | None = None

    @property
    def duality_gap_rel(self) -> float | None:
        if self.primal_value is None or self.dual_value is None or self.dual_value == 0.0:
            return None
        return abs(self.primal_value - self.dual_value) / abs(self.dual_value)


def run_expectation(instance: DspInstance, alpha: np.ndarray) -> SimReport:
    """Execute the dual-based strategy analytically and account all constraints."""
    model = DspChoiceModel(instance)
    alpha = np.asarray(alpha, dtype=float)
    primal = mmkp.primal_value_of_strategy(model, alpha)
    dual = mmkp.dual_objective(model, alpha)
    rows = [
        ConstraintRow(
            k=k,
            limit=float(model.budgets[k]),
            consumption=float(primal.consumption[k]),
            alpha=float(alpha[k]),
        )
        for k in range(instance.n_constraints)
    ]
    return SimReport(primal_value=primal.objective, dual_value=dual, per_constraint=rows)


# ---------------------------------------------------------------------------
# Monte-Carlo strategies
# ---------------------------------------------------------------------------


@dataclass
class EpochFeedback:
    """Realized arrays of one epoch handed to a strategy's update rule."""

    ad_idx: np.ndarray
    bids: np.ndarray
    highest_bid: np.ndarray
    won: np.ndarray
    paid: np.ndarray
    revenue: np.ndarray


class Strategy(ABC):
    """Per-epoch bidder with a between-epoch parameter update."""

    name: str

    @abstractmethod
    def reset(self, instance: DspInstance) -> None: ...

    @abstractmethod
    def epoch_bids(self) -> tuple[np.ndarray, np.ndarray]:
        """Chosen ad index (-1 for no bid) and bid price per impression."""

    def end_epoch(self, feedback: EpochFeedback) -> None:  # noqa: B027 - optional hook
        pass

    @property
    def param(self) -> float | None:
        return None


def _require_p4p(instance: DspInstance, name: str) -> None:
    if instance.mode is not PaymentMode.P4P:
        raise ValueError(f"strategy {name!r} is defined for P4P instances")


def _resolve_target(instance: DspInstance, target_roi: float | None, name: str) -> float:
    target = target_roi if target_roi is not None else instance_target_roi(instance)
    if target is None or target <= 0.0:
        raise ValueError(f"strategy {name!r} needs a positive target ROI")
    return target


def _cpi_selection(
    instance: DspInstance, inventory: Sequence[int]
) -> tuple[np.ndarray, np.ndarray]:
    """Expected-revenue-maximizing ad per impression within an inventory.

    With a single shared ROI price the composite's psi is the same for every
    ad, so ranking by cpi = CPP * PPI is the landscape-free selection rule.
    """
    inv = np.asarray(inventory, dtype=int)
    cpi = np.array(
        [
            [instance.ads[j].economics.require_cpp() * imp.ppi[j] for j in inv]
            for imp in instance.impressions
        ]
    )
    pick = np.argmax(cpi, axis=1)
    rows = np.arange(len(instance.impressions))
    return inv[pick], cpi[rows, pick]


class _WindowedStrategy(Strategy):
    """Shared bookkeeping for strategies updated on tumbling impression windows.

    The stream is processed in epochs; parameters update whenever at least
    `update_window` impressions have accumulated since the last update
    (windows round up to whole epochs).
    """

    def __init__(self, update_window: int = 1000):
        if update_window < 1:
            raise ValueError(f"update_window must be >= 1, got {update_window}")
        self.update_window = update_window

    def _reset_window(self, instance: DspInstance) -> None:
        self._epoch_size = max(len(instance.impressions), 1)
        self._window_revenue = 0.0
        self._window_cost = 0.0
        self._window_impressions = 0

    def end_epoch(self, feedback: EpochFeedback) -> None:
        self._window_revenue += float(np.sum(feedback.revenue))
        self._window_cost += float(np.sum(feedback.paid))
        self._window_impressions += self._epoch_size
        self._observe(feedback)
        if self._window_impressions >= self.update_window:
            actual = self._window_revenue / self._window_cost if self._window_cost > 0.0 else 0.0
            self._update(actual)
            self._window_revenue = 0.0
            self._window_cost = 0.0
            self._window_impressions = 0

    def _observe(self, feedback: EpochFeedback) -> None:
        pass

    def _update(self, actual_roi: float) -> None:
        raise NotImplementedError


class DualBidStrategy(_WindowedStrategy):
    """Feedback-mode dual bidder: bp = (cpi / roi) * (1 + 1/alpha).

    `db_single` restricts the inventory to the first ad; `db_multi` uses all
    of them. The scalar price is steered by the multiplicative ROI rule.
    """

    def __init__(
        self, name: str = "db_single", alpha0: float = 1.0, target_roi: float | None = None,
        multi: bool = False, update_window: int = 1000,
    ):
        super().__init__(update_window)
        self.name = name
        self.alpha = alpha0
        self._alpha0 = alpha0
        self._target = target_roi
        self._multi = multi

    def reset(self, instance: DspInstance) -> None:
        _require_p4p(instance, self.name)
        self.alpha = self._alpha0
        self.target_roi = _resolve_target(instance, self._target, self.name)
        inventory = range(instance.n_ads) if self._multi else [0]
        self._ad_idx, self._cpi = _cpi_selection(instance, inventory)
        self._cap = instance.bid_cap
        self._reset_window(instance)

    def epoch_bids(self) -> tuple[np.ndarray, np.ndarray]:
        bids = self._cpi / self.target_roi * (1.0 + 1.0 / self.alpha)
        return self._ad_idx, np.minimum(bids, self._cap)

    def _update(self, actual_roi: float) -> None:
        self.alpha = multiplicative_update(self.alpha, self.target_roi, actual_roi).value

    @property
    def param(self) -> float | None:
        return self.alpha


class OrtbStrategy(_WindowedStrategy):
    """Win-curve baseline: bids the shaded-surplus maximizer of w(bp) = bp/(c+bp).

    The curve scale c is refitted at window boundaries from all won/lost
    observations accumulated so far (an expanding fit window keeps it from
    whipsawing the shadow price); the shadow price follows the multiplicative
    ROI rule.
    """

    def __init__(
        self, name: str = "ortb", c0: float = 1.0, lambda0: float = 1.0,
        target_roi: float | None = None, update_window: int = 1000,
    ):
        super().__init__(update_window)
        self.name = name
        self.state = OrtbState(c=c0, lam=lambda0)
        self._c0, self._lambda0 = c0, lambda0
        self._target = target_roi

    def reset(self, instance: DspInstance) -> None:
        _require_p4p(instance, self.name)
        self.state = OrtbState(c=self._c0, lam=self._lambda0)
        self.target_roi = _resolve_target(instance, self._target, self.name)
        self._ad_idx, self._cpi = _cpi_selection(instance, [0])
        self._cap = instance.bid_cap
        self._observations: list[BidObservation] = []
        self._reset_window(instance)

    def epoch_bids(self) -> tuple[np.ndarray, np.ndarray]:
        bids = ortb_bid(self.state, self._cpi, self.target_roi)
        return self._ad_idx, np.minimum(bids, self._cap)

    def _observe(self, feedback: EpochFeedback) -> None:
        active = feedback.bids > 0.0
        self._observations.extend(
            BidObservation(Outcome.WON, float(b), float(p))
            if w
            else BidObservation(Outcome.LOST, float(b))
            for b, p, w in zip(
                feedback.bids[active], feedback.paid[active], feedback.won[active]
            )
        )

    def _update(self, actual_roi: float) -> None:
        c = self.state.c
        if any(o.outcome is Outcome.WON for o in self._observations):
            c = ortb_fit_c(self._observations).c
        lam = multiplicative_update(self.state.lam, self.target_roi, actual_roi).value
        self.state = OrtbState(c=c, lam=lam)

    @property
    def param(self) -> float | None:
        return self.state.lam


class LinStrategy(_WindowedStrategy):
    """Flat linear bidding: per-ad level (actual ROI / target) * base bid.

    Its update period is `cadence` times the shared window (daily versus
    intra-day at production scale), always rescaling from the operator base.
    """

    def __init__(
        self, name: str = "lin", bid_base: float = 1.0, cadence: int = 10,
        target_roi: float | None = None, update_window: int = 1000,
    ):
        if cadence < 1:
            raise ValueError(f"cadence must be >= 1, got {cadence}")
        super().__init__(update_window * cadence)
        self.name = name
        self.state = LinState(bid_base=bid_base)
        self.cadence = cadence
        self._target = target_roi

    def reset(self, instance: DspInstance) -> None:
        _require_p4p(instance, self.name)
        self.target_roi = _resolve_target(instance, self._target, self.name)
        self._ad_idx, self._cpi = _cpi_selection(instance, [0])
        self._cap = instance.bid_cap
        self.level = self.state.bid_base
        self._reset_window(instance)

    def epoch_bids(self) -> tuple[np.ndarray, np.ndarray]:
        bids = np.full(self._ad_idx.shape, min(self.level, self._cap))
        return self._ad_idx, bids

    def _update(self, actual_roi: float) -> None:
        self.level = lin_bid(self.state, actual_roi, self.target_roi, self._cap).value

    @property
    def param(self) -> float | None:
        return self.level


class FixedAlphaStrategy(Strategy):
    """Replays the dual-based decisions at a frozen price vector (no updates)."""

    def __init__(self, alpha: Sequence[float], name: str = "fixed_alpha"):
        self.name = name
        self.alpha = np.asarray(alpha, dtype=float)

    def reset(self, instance: DspInstance) -> None:
        n = len(instance.impressions)
        self._ad_idx = np.full(n, -1, dtype=int)
        self._bids = np.zeros(n)
        for i, imp in enumerate(instance.impressions):
            decision = bid_decision(instance, imp, self.alpha)
            if decision.chosen_ad is not None:
                self._ad_idx[i] = instance.ad_index(decision.chosen_ad)
                self._bids[i] = decision.bid_price

    def epoch_bids(self) -> tuple[np.ndarray, np.ndarray]:
        return self._ad_idx, self._bids


def make_strategy(name: str, params: dict | None = None) -> Strategy:
    """Build a strategy from a config name plus keyword parameters."""
    params = dict(params or {})
    if name == "db_single":
        return DualBidStrategy(name=name, multi=False, **params)
    if name == "db_multi":
        return DualBidStrategy(name=name, multi=True, **params)
    if name == "ortb":
        return OrtbStrategy(name=name, **params)
    if name == "lin":
        return LinStrategy(name=name, **params)
    if name == "fixed_alpha":
        if "alpha" not in params:
            raise ValueError("fixed_alpha needs an 'alpha' vector parameter")
        return FixedAlphaStrategy(params.pop("alpha"), name=params.pop("name", name))
    raise ValueError(f"unknown strategy {name!r}")


# ---------------------------------------------------------------------------
# Monte-Carlo execution
# ---------------------------------------------------------------------------


def run_monte_carlo(
    instance: DspInstance, strategy: Strategy, epochs: int, seed: int
) -> SimReport:
    """Simulate `epochs` passes over the impression stream with one strategy.

    Each epoch draws the highest competing bid per impression from its prior;
    the strategy wins where its bid is strictly higher and pays the draw.
    The strategy's update hook runs between epochs. Draws depend only on
    (seed, epoch), so distinct strategies replayed with one seed face
    identical auctions.
    """
    if epochs < 1:
        raise ValueError(f"epochs must be >= 1, got {epochs}")
    n = len(instance.impressions)
    model = DspChoiceModel(instance)
    phi_v, psi_v = model.objective_coeffs
    phi_w, psi_w = model.constraint_coeffs
    ppi = np.array([imp.ppi for imp in instance.impressions]).reshape(n, instance.n_ads)
    mus = np.array([imp.prior.mu for imp in instance.impressions])
    sigmas = np.array([imp.prior.sigma for imp in instance.impressions])
    rows = np.arange(n)

    strategy.reset(instance)
    rng = np.random.default_rng(seed)
    metrics: list[EpochMetrics] = []
    consumption_total = np.zeros(instance.n_constraints)
    for epoch in range(epochs):
        x = np.exp(mus + sigmas * rng.standard_normal(n))
        ad_idx, bids = strategy.epoch_bids()
        bids = np.minimum(np.maximum(bids, 0.0), instance.bid_cap)
        active = (ad_idx >= 0) & (bids > 0.0)
        won = active & (bids > x)
        paid = np.where(won, x, 0.0)
        sel = np.where(ad_idx >= 0, ad_idx, 0)
        revenue_vec = np.where(won, phi_v[rows, sel], 0.0) + psi_v[rows, sel] * paid
        perf_vec = np.where(won, ppi[rows, sel], 0.0)
        consumption_total += (
            np.where(won[:, None], phi_w[rows, sel, :], 0.0) + psi_w[rows, sel, :] * paid[:, None]
        ).sum(axis=0)

        revenue = float(np.sum(revenue_vec))
        cost = float(np.sum(paid))
        wins = int(np.sum(won))
        degenerate = cost <= 0.0
        metrics.append(
            EpochMetrics(
                epoch=epoch,
                revenue=revenue,
                cost=cost,
                performance=float(np.sum(perf_vec)),
                wins=wins,
                actual_roi=revenue / cost if not degenerate else 0.0,
                revenue_per_win=revenue / wins if wins else 0.0,
                param=strategy.param,
                degenerate=degenerate,
            )
        )
        strategy.end_epoch(
            EpochFeedback(
                ad_idx=ad_idx, bids=bids, highest_bid=x, won=won, paid=paid, revenue=revenue_vec
            )
        )

    # Realized consumption is reported as the per-epoch mean over the run.
    per_constraint = [
        ConstraintRow(
            k=k, limit=float(model.budgets[k]), consumption=float(consumption_total[k] / epochs)
        )
        for k in range(instance.n_constraints)
    ]
    return SimReport(
        primal_value=None,
        dual_value=None,
        per_constraint=per_constraint,
        per_strategy_metrics={strategy.name: metrics},
        seed=seed,
    )


def compare_strategies(
    instance: DspInstance, strategies: Sequence[Strategy], epochs: int, seed: int
) -> SimReport:
    """Run several strategies over identical auction streams (common seed)."""
    if len(strategies) < 2:
        raise ValueError("strategy comparison needs at least two strategies")
    names = [s.name for s in strategies]
    if len(set(names)) != len(names):
        raise ValueError(f"strategy names must be unique, got {names}")
    merged: dict[str, list[EpochMetrics]] = {}
    for strategy in strategies:
        report = run_monte_carlo(instance, strategy, epochs, seed)
        merged.update(report.per_strategy_metrics)
    return SimReport(
        primal_value=None,
        dual_value=None,
        per_constraint=[],
        per_strategy_metrics=merged,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# Report files
# ---------------------------------------------------------------------------

CONSTRAINT_CSV_HEADER = ["k", "limit", "consumption", "surplus", "alpha"]
EPOCH_CSV_HEADER = [
    "epoch",
    "revenue",
    "cost",
    "performance",
    "wins",
    "actual_roi",
    "revenue_per_win",
    "param",
    "degenerate",
]


def write_constraints_csv(path: str | Path, rows: Sequence[ConstraintRow]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(CONSTRAINT_CSV_HEADER)
        for row in rows:
            writer.writerow(
                [
                    row.k,
                    repr(row.limit),
                    repr(row.consumption),
                    repr(row.surplus),
                    "" if row.alpha is None else repr(row.alpha),
                ]
            )


def write_epoch_metrics_csv(path: str | Path, metrics: Sequence[EpochMetrics]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(EPOCH_CSV_HEADER)
        for m in metrics:
            writer.writerow(
                [
                    m.epoch,
                    repr(m.revenue),
                    repr(m.cost),
                    repr(m.performance),
                    m.wins,
                    repr(m.actual_roi),
                    repr(m.revenue_per_win),
                    "" if m.param is None else repr(m.param),
                    int(m.degenerate),
                ]
            )
