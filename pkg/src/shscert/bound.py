"""Closed-form finite-horizon bound on the certificate-exceedance probability.

Given lifted-certificate constants (alpha, eta, kappa, gamma) the chance
that the certificate value ever reaches level eta within T transitions is
at most

    1 - (1 - alpha/eta) (1 - gamma/eta)^T        if eta >= gamma / (1 - kappa)
    (alpha/eta) kappa^T + gamma (1 - kappa^T) / ((1 - kappa) eta)   otherwise.

Both branches agree at T = 0 (alpha/eta). The raw value can exceed 1, in
which case the bound is vacuous; the report keeps the raw number and a
clamped one.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping

FIRST = "first"
SECOND = "second"


@dataclass(frozen=True)
class SafetyBound:
    """delta is clamped to [0, 1]; delta_raw keeps the unclamped value."""

    delta: float
    delta_raw: float
    case: str
    horizon_T: int
    alpha: float
    eta: float
    kappa: float
    gamma: float

    @property
    def safety_probability(self) -> float:
        return 1.0 - self.delta

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "delta_raw": self.delta_raw,
            "case": self.case,
            "horizon_T": self.horizon_T,
            "alpha": self.alpha,
            "eta": self.eta,
            "kappa": self.kappa,
            "gamma": self.gamma,
            "safety_probability": self.safety_probability,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @staticmethod
    def from_dict(doc: Mapping) -> "SafetyBound":
        return SafetyBound(
            delta=float(doc["delta"]),
            delta_raw=float(doc["delta_raw"]),
            case=str(doc["case"]),
            horizon_T=int(doc["horizon_T"]),
            alpha=float(doc["alpha"]),
            eta=float(doc["eta"]),
            kappa=float(doc["kappa"]),
            gamma=float(doc["gamma"]),
        )


def compute_delta(
    alpha: float, eta: float, kappa: float, gamma: float, horizon: int
) -> SafetyBound:
    """Evaluate the exceedance bound for the given constants and horizon.

    Preconditions mirror the certificate definition: 0 < kappa < 1,
    eta > alpha >= 0, gamma >= 0, horizon >= 0. Ties eta = gamma/(1-kappa)
    route to the first branch.
    """
    if not 0 < kappa < 1:
        raise ValueError(f"0 < kappa < 1 violated (kappa={kappa})")
    if alpha < 0:
        raise ValueError(f"alpha >= 0 violated (alpha={alpha})")
    if not eta > alpha:
        raise ValueError(f"eta > alpha violated (eta={eta}, alpha={alpha})")
    if gamma < 0:
        raise ValueError(f"gamma >= 0 violated (gamma={gamma})")
    if eta <= 0:
        raise ValueError(f"eta > 0 violated (eta={eta})")
    if horizon < 0 or int(horizon) != horizon:
        raise ValueError(f"horizon must be a non-negative integer (got {horizon})")
    horizon = int(horizon)

    if eta >= gamma / (1.0 - kappa):
        case = FIRST
        raw = 1.0 - (1.0 - alpha / eta) * (1.0 - gamma / eta) ** horizon
    else:
        case = SECOND
        raw = (alpha / eta) * kappa**horizon + (
            gamma / ((1.0 - kappa) * eta)
        ) * (1.0 - kappa**horizon)
    return SafetyBound(
        delta=min(max(raw, 0.0), 1.0),
        delta_raw=raw,
        case=case,
        horizon_T=horizon,
        alpha=alpha,
        eta=eta,
        kappa=kappa,
        gamma=gamma,
    )


def compute_delta_for(acbc, horizon: int) -> SafetyBound:
    """Bound for a constructed lifted certificate."""
    return compute_delta(acbc.alpha, acbc.eta, acbc.kappa, acbc.gamma, horizon)
