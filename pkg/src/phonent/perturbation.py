"""Small-inefficiency expansion of the post-measurement entanglement.

For mu close to 1 the offset mixture is dominated by its s = q
component, and the log-negativity expands in the parameter

    eps = (1 - mu) Nm / (1 + Nm),

which is the conditional weight ratio w(q+1|q) / ((q+1) w(q|q)).  To
first order

    E1 = E_N(q) - (q + 1) eps,

and to second order

    E2 = E_N(q) + (q + 1) eps ( (q Omega + Omega - 1) / 2 * eps - 1 ),

where Omega collects the cross terms between the s = q and s = q + 1
ladders.  Omega is available three ways: a direct double sum over the
pair coupling g, a Gaussian-envelope estimate

    Omega ~ (1/2) sqrt((1 + zeta q) / (zeta + zeta q)),

and the flat-envelope constant 1/2, which turns E2 into
E_N(q) - (q+1) eps + ((q^2 - 1)/4) eps^2.  The Gaussian estimate
approaches 1/2 from above as q grows.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import perfect_entanglement
from .model import (
    DEFAULT_POLICY,
    Cooperativities,
    EntanglementValue,
    InputError,
    ModeOccupations,
    PairDistribution,
    TruncationPolicy,
    ladder_coeffs,
    occupations,
    pair_coeff,
)

# (q + 1) eps below this keeps the expansion inside its trusted region
_TRUST_LIMIT = 0.1


@dataclass(frozen=True)
class EtaWeights:
    """Leading conditional weights w(s|q) for s = q, q+1, q+2.

    `eta_q`, `eta_q1`, `eta_q2` hold the values of the literal weight
    formula; closed_forms() gives the eps-parameterized expressions,
    which agree with them to rounding.
    """

    eta_q: float
    eta_q1: float
    eta_q2: float
    epsilon: float
    q: int

    def closed_forms(self) -> tuple[float, float, float]:
        e, q = self.epsilon, self.q
        base = (1.0 - e) ** (1 + q)
        return (base, (q + 1) * e * base, 0.5 * (q + 1) * (q + 2) * e * e * base)

    def closed_form_gap(self) -> float:
        """Largest absolute disagreement between the two evaluations."""
        cf = self.closed_forms()
        return max(abs(self.eta_q - cf[0]), abs(self.eta_q1 - cf[1]),
                   abs(self.eta_q2 - cf[2]))


@dataclass(frozen=True)
class OmegaFactor:
    """Second-order cross-term factor, direct sum and Gaussian estimate."""

    direct: float
    gaussian: float


def expansion_parameter(occ: ModeOccupations, mu: float) -> float:
    """eps = (1 - mu) Nm / (1 + Nm)."""
    if not 0.0 < mu <= 1.0:
        raise InputError(f"mu must be in (0, 1], got {mu}")
    return (1.0 - mu) * occ.nm / (1.0 + occ.nm)


def eta_weights(occ: ModeOccupations, mu: float, q: int) -> EtaWeights:
    """First three conditional weights of the missed-phonon mixture."""
    if q < 0:
        raise InputError(f"q must be >= 0, got {q}")
    eps = expansion_parameter(occ, mu)
    nm = occ.nm
    if nm == 0.0 or mu == 1.0:
        return EtaWeights(eta_q=1.0, eta_q1=0.0, eta_q2=0.0, epsilon=eps, q=q)
    # literal form: eta(s) = C(s, q) Nm^(s-q) (1-mu)^(s-q) (1+mu Nm)^(1+q) / (1+Nm)^(1+s)
    lead = (1 + q) * math.log1p(mu * nm)
    step = math.log(nm) + math.log1p(-mu)
    eta = [math.exp(k * step + lead - (1 + q + k) * math.log1p(nm)) for k in range(3)]
    return EtaWeights(eta_q=eta[0], eta_q1=(q + 1) * eta[1],
                      eta_q2=0.5 * (q + 1) * (q + 2) * eta[2], epsilon=eps, q=q)


def g_coupling(zeta: float, q: int, p1: int, p2: int) -> float:
    """Pair coupling between the q and q+1 ladders.

    g = f_p2(q+1) f_p1(q+1) / (sqrt(f_p1(q) f_(p2+1)(q)) + sqrt(f_(p1+1)(q) f_p2(q)))
    """
    if zeta == 0.0:
        raise InputError("pair coupling undefined at zeta = 0")
    if min(p1, p2) < 0 or q < 0:
        raise InputError("indices must be >= 0")
    f_q = PairDistribution(zeta, q)
    f_q1 = PairDistribution(zeta, q + 1)
    den = (math.sqrt(pair_coeff(f_q, p1) * pair_coeff(f_q, p2 + 1))
           + math.sqrt(pair_coeff(f_q, p1 + 1) * pair_coeff(f_q, p2)))
    return pair_coeff(f_q1, p2) * pair_coeff(f_q1, p1) / den


def omega_factor(coop: Cooperativities, q: int,
                 policy: TruncationPolicy = DEFAULT_POLICY) -> OmegaFactor:
    """Direct and Gaussian-envelope evaluations of Omega.

    The direct value sums g over the same p window the ladder sums use,
    normalized by (sum_p sqrt(f_p(q)))^2.
    """
    if q < 0:
        raise InputError(f"q must be >= 0, got {q}")
    zeta = occupations(coop).zeta
    if zeta == 0.0:
        raise InputError("omega undefined at zeta = 0")
    gauss = 0.5 * math.sqrt((1.0 + zeta * q) / (zeta + zeta * q))

    sqrt_fq, _ = ladder_coeffs(zeta, q, policy)
    n = sqrt_fq.size
    fq = PairDistribution(zeta, q).table(n)       # f_p(q), p = 0..n (one past window)
    fq1 = PairDistribution(zeta, q + 1).table(n - 1)
    s0 = np.sqrt(fq[:n])       # sqrt f_p(q),     p = 0..n-1
    s1 = np.sqrt(fq[1:n + 1])  # sqrt f_(p+1)(q), p = 0..n-1
    den = np.outer(s0, s1) + np.outer(s1, s0)     # den[p1, p2]
    num = np.outer(fq1, fq1)
    direct = float(np.sum(num / den)) / float(np.sum(sqrt_fq)) ** 2
    return OmegaFactor(direct=direct, gaussian=gauss)


def _quality_flags(eps: float, q: int, raw: float) -> tuple[str, ...]:
    flags: list[str] = []
    if (q + 1) * eps >= _TRUST_LIMIT:
        flags.append("large-expansion-parameter")
    if raw < 0.0:
        flags.append("clamped")
    return tuple(flags)


def first_order_entanglement(coop: Cooperativities, mu: float, q: int,
                             policy: TruncationPolicy = DEFAULT_POLICY) -> EntanglementValue:
    """E1 = E_N(q) - (q + 1) eps, clamped at zero."""
    eps = expansion_parameter(occupations(coop), mu)
    raw = perfect_entanglement(coop, q, policy).value - (q + 1) * eps
    return EntanglementValue(value=max(0.0, raw), method="pert1",
                             flags=_quality_flags(eps, q, raw), raw=raw)


def second_order_entanglement(coop: Cooperativities, mu: float, q: int,
                              omega_mode: str = "gaussian",
                              policy: TruncationPolicy = DEFAULT_POLICY) -> EntanglementValue:
    """E2 = E_N(q) + (q+1) eps ((q Omega + Omega - 1)/2 eps - 1).

    omega_mode picks the cross-term factor: "gaussian" (default),
    "direct", or "half" (Omega = 1/2, the flat-envelope limit).
    """
    eps = expansion_parameter(occupations(coop), mu)
    if omega_mode == "half":
        omega = 0.5
    elif omega_mode == "gaussian":
        omega = omega_factor(coop, q, policy).gaussian
    elif omega_mode == "direct":
        omega = omega_factor(coop, q, policy).direct
    else:
        raise InputError(f"unknown omega_mode: {omega_mode!r}")
    e_n = perfect_entanglement(coop, q, policy).value
    raw = e_n + (q + 1) * eps * (0.5 * ((q + 1) * omega - 1.0) * eps - 1.0)
    return EntanglementValue(value=max(0.0, raw), method="pert2",
                             flags=_quality_flags(eps, q, raw), raw=raw)
