"""Logarithmic negativity of two-mode Fock-ladder states.

A pure ladder state with offset q,

    |Psi_q> = sum_p c_p |p, p+q>,

has log-negativity 2 ln sum_p c_p (Schmidt form).  A mixture of ladder
states with distinct offsets s >= s_min,

    rho = sum_s w_s |Psi_s><Psi_s|,

needs the partial transpose.  PT maps |p1, p1+s><p2, p2+s| to
|p2, p1+s><p1, p2+s|, so PT(rho) is block diagonal in the conserved
total Q = (column index of mode 1) + (row index of mode 2).  The block
for a given Q is indexed by a = 0..a_max with

    M[a, a'] = w_s c_a(s) c_a'(s),   s = Q - a - a',

and entries are zero when s < s_min.  Eigenvalues come from a dense
symmetric eigensolve per block; the negativity is the absolute sum of
the negative ones and E = ln(1 + 2 N).

For a single pure component each block carries one anti-diagonal
stripe and the two routes agree to rounding, which doubles as the main
self-test of the engine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    DEFAULT_POLICY,
    EntanglementValue,
    InputError,
    NumericalError,
    TruncationPolicy,
    ladder_coeffs,
)


@dataclass(frozen=True, eq=False)
class TwoModeLadderPure:
    """Pure ladder state sum_p coeffs[p] |p, p+offset>.

    Coefficients are kept unnormalized exactly as truncated; the lost
    tail mass is tracked in mass_deficit instead of being renormalized
    away.  `probability` optionally carries the probability of the
    measurement outcome that prepared the state.
    """

    offset: int
    coeffs: np.ndarray
    mass_deficit: float = -1.0  # sentinel: compute from coeffs
    probability: float | None = None

    def __post_init__(self) -> None:
        c = np.asarray(self.coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise InputError("ladder state needs a nonempty 1-D coefficient vector")
        if self.offset < 0:
            raise InputError(f"offset must be >= 0, got {self.offset}")
        if not np.all(np.isfinite(c)) or np.any(c < 0):
            raise InputError("ladder coefficients must be finite and >= 0")
        norm = float(np.sum(c * c))
        if norm > 1.0 + 1e-9 or norm == 0.0:
            raise InputError(f"ladder coefficient norm out of range: {norm}")
        object.__setattr__(self, "coeffs", c)
        if self.mass_deficit < 0:
            object.__setattr__(self, "mass_deficit", max(0.0, 1.0 - norm))


@dataclass(frozen=True, eq=False)
class TwoModeLadderMixture:
    """Offset mixture sum_s weights[s - s_min] |Psi_s><Psi_s|.

    All components share one pair-distribution family (same zeta), so
    the PT blocks can be filled from a single coefficient table.
    Weights are normalized up to the tracked weight_deficit.
    """

    zeta: float
    s_min: int
    weights: np.ndarray
    components: tuple[TwoModeLadderPure, ...]
    weight_deficit: float = 0.0

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise InputError("mixture needs a nonempty weight vector")
        if w.size != len(self.components):
            raise InputError("one component per weight required")
        if np.any(w < 0) or not np.all(np.isfinite(w)):
            raise InputError("weights must be finite and >= 0")
        if float(np.sum(w)) > 1.0 + 1e-9:
            raise InputError(f"weights sum beyond 1: {float(np.sum(w))}")
        for k, comp in enumerate(self.components):
            if comp.offset != self.s_min + k:
                raise InputError("components must carry consecutive offsets from s_min")
        object.__setattr__(self, "weights", w)

    @classmethod
    def from_pair_family(cls, zeta: float, s_min: int, weights: np.ndarray,
                         weight_deficit: float = 0.0,
                         policy: TruncationPolicy = DEFAULT_POLICY) -> "TwoModeLadderMixture":
        """Build components |Psi_s> from the shared pair family f_p(s)."""
        comps = []
        for k in range(len(weights)):
            c, deficit = ladder_coeffs(zeta, s_min + k, policy)
            comps.append(TwoModeLadderPure(offset=s_min + k, coeffs=c, mass_deficit=deficit))
        return cls(zeta=zeta, s_min=s_min, weights=np.asarray(weights, dtype=float),
                   components=tuple(comps), weight_deficit=weight_deficit)

    def total_deficit(self) -> float:
        """Weight tail plus weight-averaged coefficient tails."""
        comp = sum(float(w) * c.mass_deficit for w, c in zip(self.weights, self.components))
        return self.weight_deficit + comp


@dataclass(frozen=True, eq=False)
class PtBlock:
    """One conserved-Q block of the partially transposed mixture."""

    total_quanta: int
    s_min: int
    matrix: np.ndarray


def schmidt_log_negativity(state: TwoModeLadderPure) -> EntanglementValue:
    """E = 2 ln sum_p c_p for a pure ladder state."""
    total = float(np.sum(state.coeffs))
    if total <= 0:
        raise NumericalError("coefficient sum must be positive")
    return EntanglementValue(value=max(0.0, 2.0 * math.log(total)), method="schmidt")


def build_pt_blocks(mix: TwoModeLadderMixture,
                    policy: TruncationPolicy = DEFAULT_POLICY) -> list[PtBlock]:
    """All nonzero PT blocks, ordered by increasing total quanta Q.

    The photon index is capped at policy.p_cap, so no block exceeds
    (p_cap + 1) x (p_cap + 1) even for very wide component windows.
    """
    n_s = len(mix.components)
    s_max = mix.s_min + n_s - 1
    p_top = min(max(c.coeffs.size for c in mix.components) - 1, policy.p_cap)

    # padded coefficient table, rows indexed by s - s_min
    table = np.zeros((n_s, p_top + 1))
    for k, comp in enumerate(mix.components):
        m = min(comp.coeffs.size, p_top + 1)
        table[k, :m] = comp.coeffs[:m]
    w = mix.weights

    blocks: list[PtBlock] = []
    for q_tot in range(mix.s_min, 2 * p_top + s_max + 1):
        a_max = min(p_top, q_tot - mix.s_min)
        a = np.arange(a_max + 1)
        s = q_tot - a[:, None] - a[None, :]
        valid = (s >= mix.s_min) & (s <= s_max)
        idx = np.clip(s - mix.s_min, 0, n_s - 1)
        # coefficient product first: c_a c_a' * w is bitwise symmetric
        # under a <-> a', while w * c_a * c_a' is not
        mat = np.where(valid, table[idx, a[:, None]] * table[idx, a[None, :]] * w[idx], 0.0)
        if not mat.any():
            continue
        blocks.append(PtBlock(total_quanta=q_tot, s_min=mix.s_min, matrix=mat))
    return blocks


def block_eigenvalues(block: PtBlock) -> np.ndarray:
    """Ascending eigenvalues of one symmetric PT block."""
    try:
        return np.linalg.eigvalsh(block.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(
            f"eigensolve failed on PT block Q={block.total_quanta}"
        ) from exc


def log_negativity(mix: TwoModeLadderMixture,
                   policy: TruncationPolicy = DEFAULT_POLICY) -> EntanglementValue:
    """E = ln(1 + 2 N) from the blockwise negative eigenvalue mass.

    Eigenvalues above -eps_eig * max|lambda| (per block) count as solver
    noise, not negativity.
    """
    neg = 0.0
    for block in build_pt_blocks(mix, policy):
        lam = block_eigenvalues(block)
        scale = float(np.max(np.abs(lam)))
        if scale == 0.0:
            continue
        keep = lam < -policy.eps_eig * scale
        neg -= float(np.sum(lam[keep]))
    return EntanglementValue(value=max(0.0, math.log1p(2.0 * neg)), method="eigensolve")
