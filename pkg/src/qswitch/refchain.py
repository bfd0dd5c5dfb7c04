"""Single-buffer reference chain: availability and coherence bounds.

Each vertex is modeled in isolation as a birth-death-like chain on buffer
levels 0..B. One slot applies, in order: a Bernoulli service attempt (which
removes one stored entanglement if any), independent per-entanglement
decoherence of the survivors, and a Bernoulli arrival (lost when the buffer
is full). The long-run probability that the buffer is nonempty is the
vertex's availability C; an edge can only be served when both endpoint
buffers are nonempty, and inclusion-exclusion turns per-vertex availability
into the per-edge lower bound (C_u + C_v - 1)^+. The coherence factor of an
instance is the worst such bound over its edges.

The stationary distribution is found by a direct elimination solve
(state-reduction form of Gaussian elimination on the balance equations,
which never subtracts and so keeps full precision); every call checks the
residual of the balance equations before returning.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import binom

from .model import Edge, SwitchInstance

KERNEL_ROW_TOL = 1e-12
STATIONARY_RESIDUAL_TOL = 1e-10

POLICY_SERVICE_FACTOR = {"alg1": 1.0, "alg2": 2.0 / 3.0}


class ReducibleChainError(ValueError):
    pass


@dataclass(frozen=True)
class ChainSpec:
    """Parameters of one vertex chain.

    service_prob is the per-slot probability of a service attempt; under the
    cutting-plane policy it equals the arrival probability, under the scaled
    policy two thirds of it.
    """

    arrival_prob: float
    decoherence_prob: float
    service_prob: float
    buffer: int

    def __post_init__(self):
        for name in ("arrival_prob", "decoherence_prob", "service_prob"):
            val = getattr(self, name)
            if not 0.0 <= val <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {val}")
        if not isinstance(self.buffer, int) or self.buffer < 1:
            raise ValueError(f"buffer must be an integer >= 1, got {self.buffer}")


def chain_for_vertex(inst: SwitchInstance, vertex: str, policy: str = "alg1") -> ChainSpec:
    if policy not in POLICY_SERVICE_FACTOR:
        raise ValueError(f"unknown policy {policy!r}")
    p = inst.node_params[vertex]
    return ChainSpec(
        arrival_prob=p.arrival_prob,
        decoherence_prob=p.decoherence_prob,
        service_prob=POLICY_SERVICE_FACTOR[policy] * p.arrival_prob,
        buffer=p.buffer,
    )


def build_kernel(spec: ChainSpec) -> np.ndarray:
    """Transition matrix over levels 0..B for one slot.

    From level i: with probability service_prob one unit is removed (if
    present), each remaining unit independently survives decoherence with
    probability 1 - decoherence_prob, and an arrival lands with probability
    arrival_prob, truncated at the buffer.
    """
    B = spec.buffer
    P = np.zeros((B + 1, B + 1))
    for i in range(B + 1):
        for srv, p_srv in ((0, 1.0 - spec.service_prob), (1, spec.service_prob)):
            if p_srv == 0.0:
                continue
            n = max(0, i - srv)
            ks = np.arange(n + 1)
            pmf = binom.pmf(ks, n, 1.0 - spec.decoherence_prob)
            for arr, p_arr in ((0, 1.0 - spec.arrival_prob), (1, spec.arrival_prob)):
                if p_arr == 0.0:
                    continue
                lands = np.minimum(B, ks + arr)
                np.add.at(P[i], lands, p_srv * p_arr * pmf)
    rows = P.sum(axis=1)
    if np.max(np.abs(rows - 1.0)) > KERNEL_ROW_TOL:
        raise AssertionError(f"kernel rows sum to {rows}, expected 1")
    return P


def stationary(P: np.ndarray) -> np.ndarray:
    """Stationary distribution by state-reduction elimination.

    Raises ReducibleChainError when elimination hits a state with no
    transition to lower-numbered states (the identity kernel is the
    canonical example); for the kernels built here that only happens for
    degenerate parameter corners. The balance-equation residual is checked
    to 1e-10 before returning.
    """
    P = np.array(P, dtype=float)
    n = P.shape[0]
    if P.shape != (n, n):
        raise ValueError("kernel must be square")
    T = P.copy()
    for k in range(n - 1, 0, -1):
        below = T[k, :k].sum()
        if below <= 1e-300:
            raise ReducibleChainError(
                f"state {k} cannot reach lower states; chain is reducible"
            )
        T[:k, k] /= below
        T[:k, :k] += np.outer(T[:k, k], T[k, :k])
    pi = np.zeros(n)
    pi[0] = 1.0
    for k in range(1, n):
        pi[k] = pi[:k] @ T[:k, k]
    pi /= pi.sum()

    residual = np.max(np.abs(pi @ P - pi))
    if residual > STATIONARY_RESIDUAL_TOL:
        raise AssertionError(f"stationary residual {residual:.3e} exceeds tolerance")
    return pi


@dataclass
class ChainAnalysis:
    spec: ChainSpec
    kernel: np.ndarray
    pi: np.ndarray
    availability: float  # long-run P(level > 0)


def analyze_chain(spec: ChainSpec) -> ChainAnalysis:
    P = build_kernel(spec)
    pi = stationary(P)
    return ChainAnalysis(spec=spec, kernel=P, pi=pi, availability=float(1.0 - pi[0]))


def availability(spec: ChainSpec) -> float:
    return analyze_chain(spec).availability


@dataclass
class CoherenceReport:
    policy: str
    gamma: float  # min over edges of (C_u + C_v - 1)^+
    clipped: bool  # True when the minimum came out of the positive-part clamp
    gamma_product: float  # min over edges of C_u * C_v, for comparison
    node_availability: dict[str, float]
    edge_bound: dict[Edge, float]


def coherence_factor(inst: SwitchInstance, policy: str = "alg1") -> CoherenceReport:
    """Worst-edge availability bound for an instance under a policy.

    The per-edge bound is the inclusion-exclusion form (C_u + C_v - 1)^+.
    The product form C_u C_v is reported alongside for comparison (it is the
    other bound floating around informal arguments; the sum form is the one
    the coupling proof actually yields, and the two are reported together in
    sweep output so the difference stays visible).
    """
    if not inst.edges:
        raise ValueError("coherence factor needs at least one edge")
    avail = {v: availability(chain_for_vertex(inst, v, policy)) for v in inst.vertices}
    raw = {e: avail[e[0]] + avail[e[1]] - 1.0 for e in inst.edges}
    bounds = {e: max(0.0, r) for e, r in raw.items()}
    gamma = min(bounds.values())
    clipped = min(raw.values()) <= 0.0
    gamma_product = min(avail[e[0]] * avail[e[1]] for e in inst.edges)
    return CoherenceReport(
        policy=policy,
        gamma=gamma,
        clipped=clipped,
        gamma_product=gamma_product,
        node_availability=avail,
        edge_bound=bounds,
    )


@dataclass
class ConvergencePoint:
    buffer: int
    availability: float
    gap: float  # availability at the reference buffer minus at this one


@dataclass
class ConvergenceProfile:
    points: list[ConvergencePoint]
    reference_buffer: int
    reference_availability: float
    log_gap_slope: float
    log_gap_intercept: float
    log_gap_r2: float
    fitted_points: int  # gaps <= 0 cannot enter the log fit


def convergence_profile(
    arrival_prob: float,
    decoherence_prob: float,
    service_prob: float,
    buffers: list[int],
    reference_buffer: int = 200,
) -> ConvergenceProfile:
    """Availability as a function of buffer size, against a large-buffer proxy.

    The gap to the reference buffer decays (geometrically, in practice) as
    the buffer grows; the least-squares line through log(gap) vs buffer is
    reported so callers can check the decay rate without refitting.
    """
    if any(b > reference_buffer for b in buffers):
        raise ValueError("buffers must not exceed the reference buffer")

    def C(b: int) -> float:
        return availability(
            ChainSpec(
                arrival_prob=arrival_prob,
                decoherence_prob=decoherence_prob,
                service_prob=service_prob,
                buffer=b,
            )
        )

    c_ref = C(reference_buffer)
    points = [ConvergencePoint(b, C(b), c_ref - C(b)) for b in buffers]

    usable = [(p.buffer, p.gap) for p in points if p.gap > 0.0]
    if len(usable) >= 2:
        bs = np.array([b for b, _ in usable], dtype=float)
        logs = np.log([g for _, g in usable])
        slope, intercept = np.polyfit(bs, logs, 1)
        fitted = slope * bs + intercept
        ss_res = float(np.sum((logs - fitted) ** 2))
        ss_tot = float(np.sum((logs - logs.mean()) ** 2))
        r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    else:
        slope, intercept, r2 = float("nan"), float("nan"), float("nan")

    return ConvergenceProfile(
        points=points,
        reference_buffer=reference_buffer,
        reference_availability=c_ref,
        log_gap_slope=float(slope),
        log_gap_intercept=float(intercept),
        log_gap_r2=float(r2),
        fitted_points=len(usable),
    )


def simulate_chain(spec: ChainSpec, steps: int, seed: int) -> np.ndarray:
    """Monte-Carlo occupancy frequencies from one trajectory started at 0.

    Used as a probabilistic cross-check of the analytic stationary
    distribution; draws one uniform per step against the cumulative kernel
    rows.
    """
    P = build_kernel(spec)
    cum = np.cumsum(P, axis=1)
    rng = np.random.default_rng(seed)
    counts = np.zeros(spec.buffer + 1, dtype=np.int64)
    state = 0
    draws = rng.random(steps)
    for t in range(steps):
        state = int(np.searchsorted(cum[state], draws[t], side="right"))
        if state > spec.buffer:  # cumulative rows end at 1 - epsilon of float
            state = spec.buffer
        counts[state] += 1
    return counts / steps


def occupancy_clt_sigma(P: np.ndarray, pi: np.ndarray) -> np.ndarray:
    """Per-state asymptotic standard deviations for occupancy frequencies.

    For the indicator of each state, solves the Poisson equation
    (I - P) h = f - pi f (pinned to pi . h = 0) and evaluates the Markov
    chain CLT variance sigma^2 = E_pi[h^2 - (P h)^2]. The time-average of
    the indicator over N steps is then approximately normal with standard
    deviation sigma / sqrt(N), which is the right scaling for correlated
    samples from a single trajectory (the iid formula understates it).
    """
    n = P.shape[0]
    sig = np.zeros(n)
    A = np.vstack([np.eye(n) - P, pi])  # poisson equation rows plus pinning
    for s in range(n):
        g = np.full(n, -pi[s])
        g[s] += 1.0
        h, *_ = np.linalg.lstsq(A, np.concatenate([g, [0.0]]), rcond=None)
        ph = P @ h
        var = float(pi @ (h * h - ph * ph))
        sig[s] = np.sqrt(max(0.0, var))
    return sig
