"""Log-normal model of the highest competing bid in a sealed second-price auction.

The prior describes, per impression, the distribution of the strongest
opposing bid. Winning probability at a bid price is the CDF; the expected
payment is the partial first moment, because the winner pays the second
highest price. Both have closed forms for the log-normal family.

Fitting uses the censored likelihood of win/loss logs: a won auction reveals
the competing bid exactly (it equals the paid cost), a lost one only that it
exceeded our own bid. A single (mu, sigma) is fitted per observation pool;
per-impression priors are supplied externally (e.g. by the simulator).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

import numpy as np
from scipy.special import log_ndtr, ndtr

__all__ = [
    "BidObservation",
    "CensoredFit",
    "EmptyObservationsError",
    "LandscapePrior",
    "NoWinObservationsError",
    "OBSERVATION_CSV_HEADER",
    "Outcome",
    "censored_log_likelihood",
    "expected_cost",
    "fit_censored",
    "fit_to_json",
    "mean",
    "pdf",
    "read_observations_csv",
    "win_prob",
    "write_observations_csv",
]

_SQRT_2PI = math.sqrt(2.0 * math.pi)


class EmptyObservationsError(ValueError):
    """No observations were supplied to the fitter."""


class NoWinObservationsError(ValueError):
    """All observations are losses; pure right-censoring cannot locate the distribution."""


@dataclass(frozen=True)
class LandscapePrior:
    """Log-normal parameters of the highest competing bid.

    `mu` and `sigma` are the location and scale of ln(price), so the
    distribution has median exp(mu) and mean exp(mu + sigma^2 / 2).
    """

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.mu):
            raise ValueError(f"mu must be finite, got {self.mu!r}")
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma!r}")


class Outcome(Enum):
    WON = "WON"
    LOST = "LOST"


@dataclass(frozen=True)
class BidObservation:
    """One logged auction: our bid, the outcome, and the paid cost if we won."""

    outcome: Outcome
    bid_price: float
    paid_cost: float | None = None

    def __post_init__(self) -> None:
        if not (math.isfinite(self.bid_price) and self.bid_price >= 0.0):
            raise ValueError(f"bid_price must be >= 0, got {self.bid_price!r}")
        if self.outcome is Outcome.WON:
            if self.paid_cost is None:
                raise ValueError("a won auction must record its paid cost")
            if not (0.0 <= self.paid_cost <= self.bid_price):
                raise ValueError(
                    f"paid_cost {self.paid_cost!r} must lie in [0, bid_price={self.bid_price!r}]"
                )
        elif self.paid_cost is not None:
            raise ValueError("a lost auction has no paid cost")


def _scalar_or_array(x, out: np.ndarray):
    return float(out) if np.ndim(x) == 0 else out


def pdf(prior: LandscapePrior, x) -> float | np.ndarray:
    """Density of the highest competing bid at price `x` (0 at and below x = 0)."""
    xa = np.asarray(x, dtype=float)
    out = np.zeros(xa.shape)
    pos = xa > 0.0
    if np.any(pos):
        lx = np.log(xa[pos])
        z = (lx - prior.mu) / prior.sigma
        # exp(-z^2/2 - ln x) keeps the x -> 0 limit underflow-safe.
        out[pos] = np.exp(-0.5 * z * z - lx) / (prior.sigma * _SQRT_2PI)
    return _scalar_or_array(x, out)


def win_prob(prior: LandscapePrior, bid_price) -> float | np.ndarray:
    """Probability of winning at `bid_price`: the CDF of the competing bid."""
    bp = np.asarray(bid_price, dtype=float)
    out = np.zeros(bp.shape)
    pos = bp > 0.0
    if np.any(pos):
        out[pos] = ndtr((np.log(bp[pos]) - prior.mu) / prior.sigma)
    return _scalar_or_array(bid_price, out)


def expected_cost(prior: LandscapePrior, bid_price) -> float | np.ndarray:
    """Expected payment at `bid_price` under the second-price rule.

    This is the partial first moment of the competing-bid distribution,
    exp(mu + sigma^2/2) * Phi((ln bp - mu)/sigma - sigma); it increases to the
    distribution mean as the bid grows.
    """
    bp = np.asarray(bid_price, dtype=float)
    out = np.zeros(bp.shape)
    pos = bp > 0.0
    if np.any(pos):
        z = (np.log(bp[pos]) - prior.mu) / prior.sigma
        out[pos] = mean(prior) * ndtr(z - prior.sigma)
    return _scalar_or_array(bid_price, out)


def mean(prior: LandscapePrior) -> float:
    """Mean of the competing-bid distribution, exp(mu + sigma^2 / 2)."""
    return math.exp(prior.mu + 0.5 * prior.sigma * prior.sigma)


# ---------------------------------------------------------------------------
# Censored maximum likelihood
# ---------------------------------------------------------------------------


def censored_log_likelihood(
    won_costs: np.ndarray, lost_bids: np.ndarray, mu: float, sigma: float
) -> float:
    """Censored log-likelihood of (mu, sigma) given won costs and lost bids.

    Won auctions contribute log pdf(paid cost); lost ones contribute the
    log survival log(1 - CDF(bid)). Lost bids at or below 0 are vacuous
    (survival 1) and contribute nothing.
    """
    w = np.asarray(won_costs, dtype=float)
    l = np.asarray(lost_bids, dtype=float)
    ll = 0.0
    if w.size:
        lw = np.log(w)
        zw = (lw - mu) / sigma
        ll += float(
            -np.sum(lw)
            - w.size * (math.log(sigma) + 0.5 * math.log(2.0 * math.pi))
            - 0.5 * np.sum(zw * zw)
        )
    l = l[l > 0.0]
    if l.size:
        zl = (np.log(l) - mu) / sigma
        ll += float(np.sum(log_ndtr(-zl)))
    return ll


@dataclass(frozen=True)
class CensoredFit:
    """Result of `fit_censored`: the fitted prior plus optimizer diagnostics."""

    prior: LandscapePrior
    converged: bool
    log_likelihood: float
    iterations: int


def fit_to_json(fit: CensoredFit) -> dict:
    return {
        "mu": fit.prior.mu,
        "sigma": fit.prior.sigma,
        "converged": fit.converged,
        "log_likelihood": fit.log_likelihood,
    }


def _split_observations(
    observations: Sequence[BidObservation],
) -> tuple[np.ndarray, np.ndarray]:
    if not observations:
        raise EmptyObservationsError("observations must be nonempty")
    won = [o.paid_cost for o in observations if o.outcome is Outcome.WON]
    lost = [o.bid_price for o in observations if o.outcome is Outcome.LOST]
    if not won:
        raise NoWinObservationsError("at least one won auction is required")
    won_a = np.asarray(won, dtype=float)
    if np.any(won_a <= 0.0):
        raise ValueError("won auctions must have strictly positive paid costs")
    return won_a, np.asarray(lost, dtype=float)


def _mean_ll_and_grad(
    won_log: np.ndarray, lost_log: np.ndarray, mu: float, t: float, n: int
) -> tuple[float, np.ndarray]:
    """Mean log-likelihood and its gradient in (mu, t) with sigma = exp(t)."""
    sigma = math.exp(t)
    zw = (won_log - mu) / sigma
    ll = (
        -np.sum(won_log)
        - won_log.size * (t + 0.5 * math.log(2.0 * math.pi))
        - 0.5 * np.sum(zw * zw)
    )
    g_mu = np.sum(zw) / sigma
    g_t = np.sum(zw * zw) - won_log.size
    if lost_log.size:
        zl = (lost_log - mu) / sigma
        log_sf = log_ndtr(-zl)
        ll += np.sum(log_sf)
        # Hazard phi(z) / (1 - Phi(z)), computed in log space for stability.
        hazard = np.exp(-0.5 * zl * zl - 0.5 * math.log(2.0 * math.pi) - log_sf)
        g_mu += np.sum(hazard) / sigma
        g_t += np.sum(hazard * zl)
    return float(ll) / n, np.array([g_mu, g_t]) / n


def fit_censored(
    observations: Sequence[BidObservation],
    init: LandscapePrior | None = None,
    grad_tol: float = 1e-8,
    max_iter: int = 10000,
) -> CensoredFit:
    """Fit (mu, sigma) to win/loss logs by censored maximum likelihood.

    The optimizer is gradient ascent with backtracking line search on
    (mu, ln sigma), which keeps sigma positive without constraints; it stops
    when the mean log-likelihood gradient norm falls below `grad_tol`. When
    `init` is omitted, the log-space moments of the won costs are used (for
    uncensored data that is already the maximizer). Hitting `max_iter`
    returns the best iterate with ``converged=False`` rather than raising.
    """
    won, lost = _split_observations(observations)
    won_log = np.log(won)
    lost_log = np.log(lost[lost > 0.0]) if lost.size else np.asarray([], dtype=float)
    n = won.size + lost.size

    if init is None:
        mu0 = float(np.mean(won_log))
        s0 = float(np.std(won_log))
        theta = np.array([mu0, math.log(max(s0, 1e-3))])
    else:
        theta = np.array([init.mu, math.log(init.sigma)])

    f, g = _mean_ll_and_grad(won_log, lost_log, theta[0], theta[1], n)
    best_theta, best_f = theta.copy(), f
    converged = False
    iterations = 0
    for iterations in range(1, max_iter + 1):
        if float(np.linalg.norm(g)) <= grad_tol:
            converged = True
            iterations -= 1
            break
        g2 = float(g @ g)
        step = 1.0
        accepted = False
        while step > 1e-20:
            cand = theta + step * g
            f_cand, g_cand = _mean_ll_and_grad(won_log, lost_log, cand[0], cand[1], n)
            if f_cand >= f + 1e-4 * step * g2:
                theta, f, g = cand, f_cand, g_cand
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break  # line search stalled at numerical precision
        if f > best_f:
            best_theta, best_f = theta.copy(), f

    if f >= best_f:
        best_theta = theta
    mu_hat, sigma_hat = float(best_theta[0]), math.exp(float(best_theta[1]))
    return CensoredFit(
        prior=LandscapePrior(mu_hat, sigma_hat),
        converged=converged,
        log_likelihood=censored_log_likelihood(won, lost, mu_hat, sigma_hat),
        iterations=iterations,
    )


# ---------------------------------------------------------------------------
# Observation log I/O
# ---------------------------------------------------------------------------

OBSERVATION_CSV_HEADER = ["outcome", "bid_price", "paid_cost"]


def read_observations_csv(path: str | Path) -> list[BidObservation]:
    """Read an auction log with columns outcome (WON|LOST), bid_price, paid_cost."""
    observations: list[BidObservation] = []
    with open(path, newline="") as handle:
        reader = csv.DictReader(handle)
        missing = set(OBSERVATION_CSV_HEADER) - set(reader.fieldnames or [])
        if missing:
            raise ValueError(f"observation CSV missing columns: {sorted(missing)}")
        for row in reader:
            outcome = Outcome(row["outcome"].strip().upper())
            paid = row.get("paid_cost", "")
            observations.append(
                BidObservation(
                    outcome=outcome,
                    bid_price=float(row["bid_price"]),
                    paid_cost=float(paid) if paid not in ("", None) else None,
                )
            )
    return observations


def write_observations_csv(path: str | Path, observations: Sequence[BidObservation]) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(OBSERVATION_CSV_HEADER)
        for o in observations:
            writer.writerow(
                [o.outcome.value, repr(o.bid_price), "" if o.paid_cost is None else repr(o.paid_cost)]
            )
