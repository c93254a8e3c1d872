"""Phonon-counting measurement channels acting on the third mode.

Counting q phonons with a perfect number-resolving detector leaves the
photon pair in the pure ladder state

    |Psi_q> = sum_p sqrt(f_p(q)) |p, p+q>,    probability P_q.

A detector with efficiency mu < 1 that reports q may have missed
s - q >= 0 phonons; the post-measurement state is the offset mixture

    rho_q = sum_{s >= q} w(s|q) |Psi_s><Psi_s|,
    w(s|q) = C(s, q) eps^(s-q) (1 - eps)^(1+q),
    eps = (1 - mu) Nm / (1 + Nm),

which is a negative-binomial tail in s - q, already normalized.  The
reported-outcome probability is geometric in mu Nm:

    P_mu(q) = (mu Nm)^q / (1 + mu Nm)^(1+q).

An on/off (threshold) detector splits the same family at q = 0: the
"off" outcome is exactly the perfect q = 0 channel, while "on" leaves
the renormalized tail mixture w(k) = P_k (1 + Nm) / Nm for k >= 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    DEFAULT_POLICY,
    _HARD_P_LIMIT,
    _TERM_FLOOR,
    Cooperativities,
    EntanglementValue,
    InputError,
    ModeOccupations,
    TruncationPolicy,
    geometric_weights,
    ladder_coeffs,
    occupations,
    phonon_prob,
)
from .negativity import (
    TwoModeLadderMixture,
    TwoModeLadderPure,
    log_negativity,
    schmidt_log_negativity,
)


@dataclass(frozen=True)
class DetectorEfficiency:
    """Detection efficiency mu in (0, 1]."""

    mu: float

    def __post_init__(self) -> None:
        if not 0.0 < self.mu <= 1.0:
            raise InputError(f"mu must be in (0, 1], got {self.mu}")


@dataclass(frozen=True)
class MeasurementRecord:
    """One channel outcome: what was measured and what it left behind.

    `entanglement` maps method/column names to values in nats; `flags`
    carries per-method applicability notes (approximation, clamped).
    """

    channel: str  # "perfect" | "imperfect" | "off" | "on"
    q: int | None
    probability: float
    entanglement: dict
    flags: dict

    def __post_init__(self) -> None:
        if self.channel not in ("perfect", "imperfect", "off", "on"):
            raise InputError(f"unknown channel tag: {self.channel!r}")
        if not 0.0 <= self.probability <= 1.0:
            raise InputError(f"probability out of [0, 1]: {self.probability}")
        if any(v < 0 for v in self.entanglement.values()):
            raise InputError("entanglement values must be >= 0")


# ---------------------------------------------------------------------------
# perfect number-resolving detector
# ---------------------------------------------------------------------------

def perfect_post_state(coop: Cooperativities, q: int,
                       policy: TruncationPolicy = DEFAULT_POLICY) -> TwoModeLadderPure:
    """Pure ladder state after counting exactly q phonons."""
    occ = occupations(coop)
    coeffs, deficit = ladder_coeffs(occ.zeta, q, policy)
    return TwoModeLadderPure(offset=q, coeffs=coeffs, mass_deficit=deficit,
                             probability=phonon_prob(occ, q))


def perfect_entanglement(coop: Cooperativities, q: int,
                         policy: TruncationPolicy = DEFAULT_POLICY) -> EntanglementValue:
    """E_N(q) = 2 ln sum_p sqrt(f_p(q)) via the Schmidt route."""
    return schmidt_log_negativity(perfect_post_state(coop, q, policy))


def perfect_entanglement_gaussian(coop: Cooperativities, q: int) -> EntanglementValue:
    """Large-q envelope estimate E ~ ln(sqrt(8 pi zeta (1+q)) / (1 - zeta))."""
    if q < 0:
        raise InputError(f"q must be >= 0, got {q}")
    zeta = occupations(coop).zeta
    if zeta == 0.0:
        raise InputError("gaussian estimate undefined at zeta = 0 (no pair emission)")
    value = math.log(math.sqrt(8.0 * math.pi * zeta * (1 + q)) / (1.0 - zeta))
    return EntanglementValue(value=max(0.0, value), method="gaussian",
                             flags=("approximation",))


# ---------------------------------------------------------------------------
# finite-efficiency detector
# ---------------------------------------------------------------------------

def imperfect_outcome_prob(occ: ModeOccupations, mu: float, q: int) -> float:
    """Probability of reporting q with efficiency mu: geometric in mu Nm."""
    DetectorEfficiency(mu)
    if q < 0:
        raise InputError(f"q must be >= 0, got {q}")
    eff = mu * occ.nm
    if eff == 0.0:
        return 1.0 if q == 0 else 0.0
    return math.exp(q * math.log(eff) - (1 + q) * math.log1p(eff))


def _missed_phonon_weights(nm: float, mu: float, q: int,
                           policy: TruncationPolicy) -> tuple[np.ndarray, float]:
    """Conditional weights w(s|q) for s = q, q+1, ... and their tail deficit."""
    eps = (1.0 - mu) * nm / (1.0 + nm)
    if eps == 0.0:
        return np.ones(1), 0.0
    w = (1.0 - eps) ** (1 + q)  # s = q term
    out = [w]
    acc = w
    d = 0
    while 1.0 - acc > policy.eps_trunc and w >= _TERM_FLOOR:
        w *= eps * (q + d + 1) / (d + 1)
        out.append(w)
        acc += w
        d += 1
        if d > _HARD_P_LIMIT:
            raise InputError(f"missed-phonon weights did not converge (mu={mu}, q={q})")
    return np.array(out), max(0.0, 1.0 - acc)


def imperfect_post_state(coop: Cooperativities, mu: float, q: int,
                         policy: TruncationPolicy = DEFAULT_POLICY) -> TwoModeLadderMixture:
    """Offset mixture left after an efficiency-mu detector reports q."""
    if q < 0:
        raise InputError(f"q must be >= 0, got {q}")
    occ = occupations(coop)
    weights, deficit = _missed_phonon_weights(occ.nm, mu, q, policy)
    return TwoModeLadderMixture.from_pair_family(
        zeta=occ.zeta, s_min=q, weights=weights, weight_deficit=deficit, policy=policy)


def imperfect_entanglement_numeric(coop: Cooperativities, mu: float, q: int,
                                   policy: TruncationPolicy = DEFAULT_POLICY,
                                   ) -> EntanglementValue:
    """Blockwise PT negativity of the finite-efficiency post-state."""
    return log_negativity(imperfect_post_state(coop, mu, q, policy), policy)


# ---------------------------------------------------------------------------
# no detector / threshold detector
# ---------------------------------------------------------------------------

def traced_two_mode_state(coop: Cooperativities,
                          policy: TruncationPolicy = DEFAULT_POLICY) -> TwoModeLadderMixture:
    """Photon-pair state with the mechanical mode traced out (weights P_s)."""
    occ = occupations(coop)
    weights, deficit = geometric_weights(occ.nm, policy, s_min=0)
    return TwoModeLadderMixture.from_pair_family(
        zeta=occ.zeta, s_min=0, weights=weights, weight_deficit=deficit, policy=policy)


def off_entanglement(coop: Cooperativities,
                     policy: TruncationPolicy = DEFAULT_POLICY) -> EntanglementValue:
    """Threshold "off" outcome; identical to the perfect q = 0 channel."""
    return perfect_entanglement(coop, 0, policy)


def on_post_state(coop: Cooperativities,
                  policy: TruncationPolicy = DEFAULT_POLICY) -> TwoModeLadderMixture:
    """Mixture over k >= 1 left by a threshold "on" click."""
    occ = occupations(coop)
    if occ.nm == 0.0:
        raise InputError("on outcome has zero probability at nm = 0")
    weights, deficit = geometric_weights(occ.nm, policy, s_min=1)
    return TwoModeLadderMixture.from_pair_family(
        zeta=occ.zeta, s_min=1, weights=weights, weight_deficit=deficit, policy=policy)


def on_entanglement(coop: Cooperativities, method: str = "numeric",
                    policy: TruncationPolicy = DEFAULT_POLICY) -> EntanglementValue:
    """Entanglement after a threshold click.

    method "numeric"           PT negativity of the k >= 1 mixture
           "average"           sum_k w(k) E_N(k), exact per-k values
           "average_gaussian"  same weights with the Gaussian estimate
    """
    if method == "numeric":
        return log_negativity(on_post_state(coop, policy), policy)
    if method not in ("average", "average_gaussian"):
        raise InputError(f"unknown on-channel method: {method!r}")
    mix = on_post_state(coop, policy)
    total = 0.0
    for w, comp in zip(mix.weights, mix.components):
        if method == "average":
            e_k = schmidt_log_negativity(comp).value
        else:
            e_k = perfect_entanglement_gaussian(coop, comp.offset).value
        total += float(w) * e_k
    flags = ("approximation",) if method == "average_gaussian" else ()
    return EntanglementValue(value=max(0.0, total), method=f"on-{method}", flags=flags)
