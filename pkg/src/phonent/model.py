"""Closed-form scalar quantities of the three-mode ladder state.

Conventions
-----------
The system point is a pair of cooperativities (c1, c2) with c1 > 0,
c2 >= 0 and the stability condition 1 + c1 - c2 > 0.  The stationary
output state is a three-mode ladder in the Fock basis,

    |psi> = sum_q sqrt(P_q) sum_p sqrt(f_p(q)) |p, p+q, q>,

where mode 3 is the mechanical mode.  Mean occupations:

    N1 = 4 c1 c2 / (1 + c1 - c2)^2
    N2 = 4 c2 (c1 + 1) / (1 + c1 - c2)^2     (N2 = N1 + Nm exactly)
    Nm = 4 c2 / (1 + c1 - c2)^2

The pair distribution is negative binomial with parameter

    zeta = N1 / (1 + N2) = 4 c1 c2 / (1 + c1 + c2)^2,
    f_p(q) = C(p + q, p) zeta^p (1 - zeta)^(1 + q),

and the phonon number is geometric, P_q = Nm^q / (1 + Nm)^(1 + q).

All binomials are evaluated in log-domain (log-gamma); C(p+q, p)
overflows double precision near p + q ~ 170 while f_p(q) itself
stays <= 1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaln


class InputError(ValueError):
    """Invalid physical or configuration input."""


class StabilityError(InputError):
    """Cooperativities outside the stable region 1 + c1 - c2 > 0."""


class NumericalError(RuntimeError):
    """A numerical routine failed to converge or produced non-finite data."""


# ---------------------------------------------------------------------------
# truncation policy
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TruncationPolicy:
    """Single knob controlling all infinite-sum cutoffs.

    eps_trunc   target tail: cumulative mass >= 1 - eps_trunc, and ladder
                coefficient windows additionally extend until the running
                sqrt(f) term drops below eps_trunc times the running
                coefficient sum (the negativity-relevant tail).
    p_cap       hard cap on the photon index used in partial-transpose
                blocks; keeps every eigensolve at most (p_cap+1)^2.
                Scalar sums are never capped.
    q_max       cap on measurement outcomes / offset sums; the geometric
                weights decay fast enough that this is never the binding
                cutoff at sane parameters.
    eps_eig     relative threshold separating genuinely negative block
                eigenvalues from solver noise.
    """

    eps_trunc: float = 1e-12
    p_cap: int = 199
    q_max: int = 200
    eps_eig: float = 1e-12

    def __post_init__(self) -> None:
        if not (0 < self.eps_trunc < 1):
            raise InputError(f"eps_trunc must be in (0, 1), got {self.eps_trunc}")
        if self.p_cap < 1 or self.q_max < 1:
            raise InputError("p_cap and q_max must be positive")


DEFAULT_POLICY = TruncationPolicy()

# absolute floor under which ladder terms cannot influence any tracked
# quantity; also breaks accumulation loops that would otherwise spin on
# underflowed terms after the float mass sum plateaus below its target
_TERM_FLOOR = 1e-280
_HARD_P_LIMIT = 1_000_000


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Cooperativities:
    """Driving parameters (c1, c2); the only dynamical inputs."""

    c1: float
    c2: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.c1) or not math.isfinite(self.c2):
            raise InputError("cooperativities must be finite")
        if self.c1 <= 0:
            raise InputError(f"c1 must be positive, got {self.c1}")
        if self.c2 < 0:
            raise InputError(f"c2 must be nonnegative, got {self.c2}")
        if 1.0 + self.c1 - self.c2 <= 0:
            raise StabilityError(
                f"stability violated: 1 + c1 - c2 = {1.0 + self.c1 - self.c2:g} <= 0"
            )


@dataclass(frozen=True)
class ModeOccupations:
    """Mean output quanta and the derived squeeze parameter."""

    n1: float
    n2: float
    nm: float
    zeta: float

    def __post_init__(self) -> None:
        if min(self.n1, self.n2, self.nm) < 0 or not 0 <= self.zeta < 1:
            raise InputError("occupations must be >= 0 and zeta in [0, 1)")


@dataclass(frozen=True)
class PairDistribution:
    """Negative-binomial photon-pair distribution p -> f_p(q)."""

    zeta: float
    q: int

    def __post_init__(self) -> None:
        if not 0 <= self.zeta < 1:
            raise InputError(f"zeta must be in [0, 1), got {self.zeta}")
        if self.q < 0:
            raise InputError(f"q must be >= 0, got {self.q}")

    def __call__(self, p: int) -> float:
        return pair_coeff(self, p)

    def table(self, p_max: int) -> np.ndarray:
        """f_p for p = 0..p_max as a vector."""
        return _pair_table(self.zeta, self.q, p_max)


@dataclass(frozen=True)
class GaussianMoments:
    """Mean and standard deviation of the large-q Gaussian envelope."""

    kappa: float
    sigma: float
    degenerate: bool = False


@dataclass(frozen=True)
class EntanglementValue:
    """Logarithmic negativity in nats, with method bookkeeping.

    `value` is clamped to be >= 0; when a closed-form correction
    overshoots below zero, the unclamped number is kept in `raw` and a
    "clamped" flag is attached.
    """

    value: float
    method: str = ""
    flags: tuple[str, ...] = ()
    raw: float | None = None

    def __post_init__(self) -> None:
        if not math.isfinite(self.value) or self.value < 0:
            raise NumericalError(f"entanglement value must be finite and >= 0, got {self.value}")


# ---------------------------------------------------------------------------
# scalar operations
# ---------------------------------------------------------------------------

def occupations(coop: Cooperativities) -> ModeOccupations:
    """Mean quanta (N1, N2, Nm) and zeta for a stable system point."""
    den = (1.0 + coop.c1 - coop.c2) ** 2
    n1 = 4.0 * coop.c1 * coop.c2 / den
    n2 = 4.0 * coop.c2 * (coop.c1 + 1.0) / den
    nm = 4.0 * coop.c2 / den
    zeta = 4.0 * coop.c1 * coop.c2 / (1.0 + coop.c1 + coop.c2) ** 2
    return ModeOccupations(n1=n1, n2=n2, nm=nm, zeta=zeta)


def phonon_prob(occ: ModeOccupations, q: int) -> float:
    """Geometric phonon distribution P_q = Nm^q / (1 + Nm)^(1+q)."""
    if q < 0:
        raise InputError(f"q must be >= 0, got {q}")
    if occ.nm == 0.0:
        return 1.0 if q == 0 else 0.0
    # log-domain for large q
    return math.exp(q * math.log(occ.nm) - (1 + q) * math.log1p(occ.nm))


def pair_coeff(dist: PairDistribution, p: int) -> float:
    """f_p(q) = C(p+q, p) zeta^p (1 - zeta)^(1+q), evaluated in log-domain."""
    if p < 0:
        raise InputError(f"p must be >= 0, got {p}")
    if dist.zeta == 0.0:
        return 1.0 if p == 0 else 0.0
    lb = gammaln(p + dist.q + 1) - gammaln(p + 1) - gammaln(dist.q + 1)
    return math.exp(lb + p * math.log(dist.zeta) + (1 + dist.q) * math.log1p(-dist.zeta))


def _pair_table(zeta: float, q: int, p_max: int) -> np.ndarray:
    if zeta == 0.0:
        out = np.zeros(p_max + 1)
        out[0] = 1.0
        return out
    p = np.arange(p_max + 1)
    lb = gammaln(p + q + 1) - gammaln(p + 1) - gammaln(q + 1)
    return np.exp(lb + p * math.log(zeta) + (1 + q) * math.log1p(-zeta))


def three_mode_amplitude(coop: Cooperativities, p: int, q: int) -> float:
    """Coefficient of |p, p+q, q>, equal to sqrt(P_q f_p(q))."""
    occ = occupations(coop)
    return math.sqrt(phonon_prob(occ, q) * pair_coeff(PairDistribution(occ.zeta, q), p))


def gaussian_moments(zeta: float, q: int) -> GaussianMoments:
    """Mean kappa = zeta(1+q)/(1-zeta) and sigma = sqrt(zeta(1+q))/(1-zeta)."""
    if not 0 <= zeta < 1:
        raise InputError(f"zeta must be in [0, 1), got {zeta}")
    if q < 0:
        raise InputError(f"q must be >= 0, got {q}")
    if zeta == 0.0:
        return GaussianMoments(kappa=0.0, sigma=0.0, degenerate=True)
    kappa = zeta * (1 + q) / (1 - zeta)
    sigma = math.sqrt(zeta * (1 + q)) / (1 - zeta)
    return GaussianMoments(kappa=kappa, sigma=sigma)


def pre_measurement_entanglement(coop: Cooperativities) -> EntanglementValue:
    """Closed-form log-negativity of the two photon output modes.

    E = ln[(1 + c1 - c2)^2 / (A + B + 2 c2 (1 + 2 c1) - 4 sqrt(A B))]
    with A = c2 (c1 + c2) and B = (1 + c1)^2 + c1 c2.  The value stays
    finite at the instability edge, approaching ln(2 c1 + 1).
    """
    a = coop.c2 * (coop.c1 + coop.c2)
    b = (1.0 + coop.c1) ** 2 + coop.c1 * coop.c2
    den = a + b + 2.0 * coop.c2 * (1.0 + 2.0 * coop.c1) - 4.0 * math.sqrt(a * b)
    num = (1.0 + coop.c1 - coop.c2) ** 2
    if den <= 0 or num <= 0:
        raise NumericalError(
            f"nonpositive argument of ln in pre-measurement entanglement: {num:g}/{den:g}"
        )
    value = math.log(num / den)
    # den >= num on the stable domain, with equality only at c2 = 0
    return EntanglementValue(value=max(0.0, value), method="pre-closed-form")


def pre_measurement_instability_limit(coop: Cooperativities) -> float:
    """Finite limit ln(2 c1 + 1) of the pre-measurement value at c2 -> 1 + c1."""
    return math.log(2.0 * coop.c1 + 1.0)


# ---------------------------------------------------------------------------
# truncation windows
# ---------------------------------------------------------------------------

def ladder_coeffs(zeta: float, q: int, policy: TruncationPolicy = DEFAULT_POLICY,
                  ) -> tuple[np.ndarray, float]:
    """Ladder coefficients c_p = sqrt(f_p(q)) on the policy window.

    The window is the smallest p satisfying both the cumulative-mass
    target (>= 1 - eps_trunc) and the sqrt-tail criterion
    c_p <= eps_trunc * sum(c).  Returns (coefficients, mass deficit).
    Coefficients are never renormalized; the deficit is explicit.
    """
    if zeta == 0.0:
        return np.ones(1), 0.0
    lz = math.log(zeta)
    l1z = math.log1p(-zeta)
    chunks: list[np.ndarray] = []
    mass = 0.0
    csum = 0.0
    p0 = 0
    chunk = 128
    while True:
        p = np.arange(p0, p0 + chunk)
        f = np.exp(gammaln(p + q + 1) - gammaln(p + 1) - gammaln(q + 1)
                   + p * lz + (1 + q) * l1z)
        c = np.sqrt(f)
        run_mass = mass + np.cumsum(f)
        run_csum = csum + np.cumsum(c)
        done = ((1.0 - run_mass <= policy.eps_trunc)
                & (c <= policy.eps_trunc * run_csum)) | (f < _TERM_FLOOR)
        hit = np.flatnonzero(done)
        if hit.size:
            k = int(hit[0])
            chunks.append(c[:k + 1])
            deficit = max(0.0, 1.0 - float(run_mass[k]))
            return np.concatenate(chunks), deficit
        chunks.append(c)
        mass = float(run_mass[-1])
        csum = float(run_csum[-1])
        p0 += chunk
        if p0 > _HARD_P_LIMIT:
            raise NumericalError(f"ladder window did not converge (zeta={zeta}, q={q})")


def geometric_weights(nm: float, policy: TruncationPolicy = DEFAULT_POLICY,
                      s_min: int = 0) -> tuple[np.ndarray, float]:
    """Normalized geometric offset weights starting at s_min.

    s_min = 0 gives P_s (traced state); s_min = 1 gives the renormalized
    tail P_s (1 + Nm) / Nm (on state).  Returns (weights, weight deficit).
    """
    if nm == 0.0:
        if s_min > 0:
            raise InputError("geometric weights empty: nm = 0 has no s >= 1 tail")
        return np.ones(1), 0.0
    r = nm / (1.0 + nm)
    out: list[float] = []
    acc = 0.0
    w = 1.0 - r  # weight of s = s_min, normalized within the tail
    while True:
        out.append(w)
        acc += w
        if 1.0 - acc <= policy.eps_trunc or w < _TERM_FLOOR or len(out) > policy.q_max:
            break
        w *= r
    return np.array(out), max(0.0, 1.0 - acc)
