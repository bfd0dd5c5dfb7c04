"""Slotted switch simulator with frame-based randomized scheduling.

One slot applies, in order: the scheduled matching serves every matched edge
whose endpoint buffers are both nonempty (consuming a request if one is
queued; a matched pair with empty queue burns the entanglements' chance but
not the entanglements), then every stored entanglement independently
decoheres, then entanglement and request arrivals land (entanglement
truncated at the buffer, requests queued without bound).

Scheduling is frame-based: at each frame start the request queues become LP
weights, the LP point is decomposed into a matching mixture, and the frame's
slots each draw one matching from that mixture. The fixed-mixture policy
skips the LP and replays a caller-supplied mixture every frame, which is how
the availability bounds are exercised in isolation.

Randomness is split into one child stream per (entity, purpose): the
matching sampler, then entanglement arrivals per vertex, decoherence per
vertex, and request arrivals per edge, spawned in that canonical order from
the master seed. Policies therefore cannot perturb arrival or decoherence
draws, and a fixed (seed, config) pair reproduces a run bit for bit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .decomposition import MatchingMixture, MixtureAtom, decompose, sample_matching
from .lp import separate_blossom, solve_algorithm1, solve_algorithm2
from .model import Edge, Matching, SwitchInstance, edge_name, validate_instance
from .refchain import POLICY_SERVICE_FACTOR, coherence_factor

POISSON_CAP = 10**6  # truncation for poisson request batches

POLICIES = ("alg1", "alg2", "fixed-mixture")


@dataclass
class SimConfig:
    instance: SwitchInstance
    frame_length: int = 100
    horizon: int = 10_000
    seed: int = 0
    policy: str = "alg1"
    fixed_mixture: MatchingMixture | None = None
    warmup: int = 0
    adaptive_frames: bool = False  # frame k lasts max(min, ceil(scale*log(1+backlog)))
    adaptive_min: int = 10
    adaptive_scale: float = 25.0
    collect_trace: bool = False


def validate_config(cfg: SimConfig) -> None:
    errors = []
    if cfg.frame_length < 1:
        errors.append(f"frame_length must be >= 1, got {cfg.frame_length}")
    if cfg.horizon < 1:
        errors.append(f"horizon must be >= 1, got {cfg.horizon}")
    if not 0 <= cfg.warmup < cfg.horizon:
        errors.append(f"warmup must lie in [0, horizon), got {cfg.warmup}")
    if cfg.policy not in POLICIES:
        errors.append(f"policy must be one of {POLICIES}, got {cfg.policy!r}")
    if (cfg.policy == "fixed-mixture") != (cfg.fixed_mixture is not None):
        errors.append("fixed_mixture must be given exactly for the fixed-mixture policy")
    if cfg.adaptive_min < 1:
        errors.append(f"adaptive_min must be >= 1, got {cfg.adaptive_min}")
    if cfg.adaptive_scale <= 0.0:
        errors.append(f"adaptive_scale must be > 0, got {cfg.adaptive_scale}")
    if errors:
        raise ValueError("invalid simulation config:\n" + "\n".join(f"- {e}" for e in errors))


@dataclass
class SimState:
    ent: dict[str, int]
    req: dict[Edge, int]
    t: int


@dataclass(frozen=True)
class StepOutcome:
    served: frozenset[Edge]  # matched, both buffers nonempty, request present
    potential: frozenset[Edge]  # matched, both buffers nonempty
    request_arrivals: dict[Edge, int]
    ent_arrivals: frozenset[str]  # vertices where an arrival landed (may truncate)


@dataclass
class SimStreams:
    matching: np.random.Generator
    ent_arrival: dict[str, np.random.Generator]
    decoherence: dict[str, np.random.Generator]
    req_arrival: dict[Edge, np.random.Generator]


def make_streams(inst: SwitchInstance, seed: int) -> SimStreams:
    """Spawn per-(entity, purpose) child streams in canonical order."""
    n_children = 1 + 2 * len(inst.vertices) + len(inst.edges)
    children = np.random.SeedSequence(seed).spawn(n_children)
    gens = [np.random.default_rng(c) for c in children]
    k = 0
    matching = gens[k]
    k += 1
    ent_arrival = {}
    for v in inst.vertices:
        ent_arrival[v] = gens[k]
        k += 1
    decoherence = {}
    for v in inst.vertices:
        decoherence[v] = gens[k]
        k += 1
    req_arrival = {}
    for e in inst.edges:
        req_arrival[e] = gens[k]
        k += 1
    return SimStreams(
        matching=matching,
        ent_arrival=ent_arrival,
        decoherence=decoherence,
        req_arrival=req_arrival,
    )


def initial_state(inst: SwitchInstance) -> SimState:
    return SimState(
        ent={v: 0 for v in inst.vertices},
        req={e: 0 for e in inst.edges},
        t=0,
    )


def step(
    state: SimState,
    matching: Iterable[Edge],
    streams: SimStreams,
    inst: SwitchInstance,
) -> StepOutcome:
    """Advance one slot in place; returns what happened during it."""
    ent = state.ent
    req = state.req

    served = []
    potential = []
    for e in sorted(matching):
        u, v = e
        if ent[u] > 0 and ent[v] > 0:
            potential.append(e)
            if req[e] > 0:
                served.append(e)
                req[e] -= 1
                ent[u] -= 1
                ent[v] -= 1

    for v in inst.vertices:
        n = ent[v]
        if n > 0:
            mu = inst.node_params[v].decoherence_prob
            # one survival draw per stored entanglement, by design
            draws = streams.decoherence[v].random(n)
            ent[v] = int((draws >= mu).sum())

    ent_arrivals = []
    for v in inst.vertices:
        p = inst.node_params[v]
        if streams.ent_arrival[v].random() < p.arrival_prob:
            ent_arrivals.append(v)
            ent[v] = min(p.buffer, ent[v] + 1)

    request_arrivals = {}
    for e in inst.edges:
        d = inst.edge_demand[e]
        if d.arrival_kind == "bernoulli":
            arrived = 1 if streams.req_arrival[e].random() < d.mean_rate else 0
        else:
            arrived = min(POISSON_CAP, int(streams.req_arrival[e].poisson(d.mean_rate)))
        if arrived:
            req[e] += arrived
            request_arrivals[e] = arrived

    state.t += 1
    return StepOutcome(
        served=frozenset(served),
        potential=frozenset(potential),
        request_arrivals=request_arrivals,
        ent_arrivals=frozenset(ent_arrivals),
    )


@dataclass
class FrameRecord:
    start: int
    length: int
    sum_req: int
    lyapunov: float


@dataclass
class TraceRow:
    t: int
    ent: tuple[int, ...]  # slot-start levels, canonical vertex order
    req: tuple[int, ...]  # slot-start queues, canonical edge order
    matching: Matching
    served: frozenset[Edge]
    potential: frozenset[Edge]


@dataclass
class SimStats:
    config: SimConfig
    slots: int
    measured: int  # post-warmup slots
    served_total: dict[Edge, int]
    potential_total: dict[Edge, int]
    matched_total: dict[Edge, int]
    request_arrivals_total: dict[Edge, int]
    req_time_avg: dict[Edge, float]
    req_max: dict[Edge, int]
    empty_freq: dict[str, float]  # P(buffer empty) at slot start, post-warmup
    joint_occupied_freq: dict[Edge, float]  # both endpoints nonempty at slot start
    backlog_max_first_half: int
    backlog_max_final_half: int
    frames: list[FrameRecord]
    drift_samples: np.ndarray  # V(next boundary) - V(boundary), post-warmup frames
    drift_frame_backlog: np.ndarray  # sum_req at those frames' starts
    lp_solves: int
    trace: list[TraceRow] | None


ZERO_MIXTURE = MatchingMixture(atoms=[MixtureAtom(1.0, frozenset())])


def _frame_mixture(
    cfg: SimConfig, weights: dict[Edge, float]
) -> tuple[MatchingMixture, bool]:
    """Mixture for the coming frame; the flag records whether an LP ran."""
    if cfg.policy == "fixed-mixture":
        return cfg.fixed_mixture, False
    if all(w == 0.0 for w in weights.values()):
        # the LP optimum at zero weights is the zero vector; skip the solve
        return ZERO_MIXTURE, False
    if cfg.policy == "alg1":
        sol = solve_algorithm1(cfg.instance, weights)
    else:
        sol = solve_algorithm2(cfg.instance, weights)
    return decompose(cfg.instance, sol.x), True


def run(cfg: SimConfig) -> SimStats:
    validate_instance(cfg.instance)
    validate_config(cfg)
    inst = cfg.instance
    verts = inst.vertices
    edges = inst.edges

    streams = make_streams(inst, cfg.seed)
    state = initial_state(inst)

    served_total = {e: 0 for e in edges}
    potential_total = {e: 0 for e in edges}
    matched_total = {e: 0 for e in edges}
    arrivals_total = {e: 0 for e in edges}
    req_sum = {e: 0 for e in edges}
    req_max = {e: 0 for e in edges}
    empty_count = {v: 0 for v in verts}
    joint_count = {e: 0 for e in edges}

    half = cfg.horizon // 2
    backlog_max = [0, 0]

    frames: list[FrameRecord] = []
    mixture = ZERO_MIXTURE
    frame_end = 0
    lp_solves = 0
    measured = 0
    trace: list[TraceRow] | None = [] if cfg.collect_trace else None

    for t in range(cfg.horizon):
        if t == frame_end:
            backlog = sum(state.req.values())
            if cfg.adaptive_frames:
                length = max(cfg.adaptive_min, math.ceil(cfg.adaptive_scale * math.log1p(backlog)))
            else:
                length = cfg.frame_length
            lyap = 0.5 * sum(r * r for r in state.req.values())
            frames.append(FrameRecord(start=t, length=length, sum_req=backlog, lyapunov=lyap))
            weights = {e: float(state.req[e]) for e in edges}
            mixture, solved = _frame_mixture(cfg, weights)
            lp_solves += int(solved)
            frame_end = t + length

        backlog_now = sum(state.req.values())
        ix = 0 if t < half else 1
        if backlog_now > backlog_max[ix]:
            backlog_max[ix] = backlog_now

        in_measure = t >= cfg.warmup
        if in_measure:
            measured += 1
            for v in verts:
                if state.ent[v] == 0:
                    empty_count[v] += 1
            for e in edges:
                r = state.req[e]
                req_sum[e] += r
                if r > req_max[e]:
                    req_max[e] = r
                if state.ent[e[0]] > 0 and state.ent[e[1]] > 0:
                    joint_count[e] += 1

        snap_ent = tuple(state.ent[v] for v in verts) if trace is not None else None
        snap_req = tuple(state.req[e] for e in edges) if trace is not None else None

        m = sample_matching(mixture, streams.matching)
        out = step(state, m, streams, inst)

        if in_measure:
            for e in m:
                matched_total[e] += 1
            for e in out.served:
                served_total[e] += 1
            for e in out.potential:
                potential_total[e] += 1
            for e, k in out.request_arrivals.items():
                arrivals_total[e] += k

        if trace is not None:
            trace.append(
                TraceRow(
                    t=t,
                    ent=snap_ent,
                    req=snap_req,
                    matching=m,
                    served=out.served,
                    potential=out.potential,
                )
            )

    if cfg.horizon == frame_end:
        backlog = sum(state.req.values())
        lyap = 0.5 * sum(r * r for r in state.req.values())
        frames.append(FrameRecord(start=cfg.horizon, length=0, sum_req=backlog, lyapunov=lyap))

    drift = []
    drift_backlog = []
    for rec, nxt in zip(frames, frames[1:]):
        if rec.start >= cfg.warmup:
            drift.append(nxt.lyapunov - rec.lyapunov)
            drift_backlog.append(rec.sum_req)

    return SimStats(
        config=cfg,
        slots=cfg.horizon,
        measured=measured,
        served_total=served_total,
        potential_total=potential_total,
        matched_total=matched_total,
        request_arrivals_total=arrivals_total,
        req_time_avg={e: req_sum[e] / max(1, measured) for e in edges},
        req_max=req_max,
        empty_freq={v: empty_count[v] / max(1, measured) for v in verts},
        joint_occupied_freq={e: joint_count[e] / max(1, measured) for e in edges},
        backlog_max_first_half=backlog_max[0],
        backlog_max_final_half=backlog_max[1],
        frames=frames,
        drift_samples=np.array(drift, dtype=float),
        drift_frame_backlog=np.array(drift_backlog, dtype=float),
        lp_solves=lp_solves,
        trace=trace,
    )


@dataclass
class DriftReport:
    samples: int
    mean_drift: float
    drift_ci95: tuple[float, float]
    large_threshold: float  # median frame-start backlog
    large_samples: int
    large_mean_drift: float  # mean drift over frames starting above the median
    large_ci95: tuple[float, float]
    positive_fraction: float
    backlog_slope: float  # OLS slope of frame-start backlog over the final half
    backlog_slope_ci95: tuple[float, float]
    max_backlog_first_half: int
    max_backlog_final_half: int
    unstable: bool

    def to_dict(self) -> dict:
        return {
            "samples": self.samples,
            "mean_drift": self.mean_drift,
            "drift_ci95": list(self.drift_ci95),
            "large_threshold": self.large_threshold,
            "large_samples": self.large_samples,
            "large_mean_drift": self.large_mean_drift,
            "large_ci95": list(self.large_ci95),
            "positive_fraction": self.positive_fraction,
            "backlog_slope": self.backlog_slope,
            "backlog_slope_ci95": list(self.backlog_slope_ci95),
            "max_backlog_first_half": self.max_backlog_first_half,
            "max_backlog_final_half": self.max_backlog_final_half,
            "unstable": self.unstable,
        }


def _mean_ci(samples: np.ndarray) -> tuple[float, tuple[float, float]]:
    mean = float(samples.mean())
    if len(samples) < 2:
        return mean, (float("-inf"), float("inf"))
    half = 1.96 * float(samples.std(ddof=1)) / math.sqrt(len(samples))
    return mean, (mean - half, mean + half)


def drift_report(stats: SimStats, min_samples: int = 30) -> DriftReport:
    """Frame-drift and backlog-growth diagnostics.

    The unconditional mean drift over a long stationary run telescopes to
    roughly (V_end - V_start) / frames and is uninformative; the meaningful
    negative-drift statistic is conditioned on frames that start with a
    backlog above the median, which is also reported. The instability flag
    fires when the backlog trend over the final half of the run is positive
    at 95% confidence AND the fitted growth over that window dwarfs the
    trend line's residual noise (so stationary noise cannot trip it).
    """
    if len(stats.drift_samples) < min_samples:
        raise ValueError(
            f"insufficient post-warmup frames: {len(stats.drift_samples)} < {min_samples}"
        )
    mean, ci = _mean_ci(stats.drift_samples)

    threshold = float(np.median(stats.drift_frame_backlog))
    mask = stats.drift_frame_backlog > threshold
    if mask.any():
        large_mean, large_ci = _mean_ci(stats.drift_samples[mask])
    else:
        large_mean, large_ci = float("nan"), (float("nan"), float("nan"))

    positive_fraction = float((stats.drift_samples > 0).mean())

    half_start = stats.slots // 2
    pts = [(r.start, r.sum_req) for r in stats.frames if r.start >= half_start]
    if len(pts) >= 3:
        ts = np.array([p[0] for p in pts], dtype=float)
        ys = np.array([p[1] for p in pts], dtype=float)
        tc = ts - ts.mean()
        denom = float(tc @ tc)
        slope = float(tc @ ys) / denom
        resid = ys - ys.mean() - slope * tc
        resid_var = float(resid @ resid) / max(1, len(pts) - 2)
        se = math.sqrt(resid_var / denom)
        slope_ci = (slope - 1.96 * se, slope + 1.96 * se)
        # genuine growth over the window dwarfs the trend line's residual
        # noise; chance-significant slopes on a stationary run do not
        growth = slope * float(ts[-1] - ts[0])
        unstable = slope_ci[0] > 0.0 and growth > max(10.0, 2.0 * math.sqrt(resid_var))
    else:
        slope, slope_ci, unstable = float("nan"), (float("nan"), float("nan")), False

    return DriftReport(
        samples=len(stats.drift_samples),
        mean_drift=mean,
        drift_ci95=ci,
        large_threshold=threshold,
        large_samples=int(mask.sum()),
        large_mean_drift=large_mean,
        large_ci95=large_ci,
        positive_fraction=positive_fraction,
        backlog_slope=slope,
        backlog_slope_ci95=slope_ci,
        max_backlog_first_half=stats.backlog_max_first_half,
        max_backlog_final_half=stats.backlog_max_final_half,
        unstable=unstable,
    )


@dataclass
class RegionReport:
    policy: str
    inside: bool
    guarantee_scale: float  # coherence factor, times 2/3 under the scaled policy
    epsilon: float
    scaled_demand: dict[Edge, float]
    degree_violations: dict[str, float]
    cut_violation: float  # worst odd-set violation of the scaled demand, 0 if none


def guaranteed_region_check(
    inst: SwitchInstance, epsilon: float = 0.05, policy: str = "alg1"
) -> RegionReport:
    """Conservative sufficient check that the instance's demand is coverable.

    Scales the demand vector by (1 + epsilon) / guarantee and tests
    membership in the LP polytope (degree caps plus exact odd-set
    separation). This is the conservative reading of the stability
    guarantee: demand inside guarantee/(1+epsilon) times the polytope is
    certified, demand outside is merely not certified (the exact boundary is
    an open modeling question, not something this helper decides).
    """
    if epsilon <= 0.0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    report = coherence_factor(inst, policy)
    scale = report.gamma * POLICY_SERVICE_FACTOR[policy]
    demand = {e: inst.edge_demand[e].mean_rate for e in inst.edges}

    if scale <= 0.0:
        inside = all(v == 0.0 for v in demand.values())
        return RegionReport(
            policy=policy,
            inside=inside,
            guarantee_scale=scale,
            epsilon=epsilon,
            scaled_demand=demand,
            degree_violations={},
            cut_violation=0.0,
        )

    scaled = {e: v * (1.0 + epsilon) / scale for e, v in demand.items()}
    degree_violations = {}
    for v in inst.vertices:
        load = sum(scaled[e] for e in inst.incident[v])
        cap = inst.node_params[v].arrival_prob
        if load > cap + 1e-12:
            degree_violations[v] = load - cap
    found = separate_blossom(inst, scaled)
    cut_violation = 0.0 if found is None else found.violation
    return RegionReport(
        policy=policy,
        inside=not degree_violations and found is None,
        guarantee_scale=scale,
        epsilon=epsilon,
        scaled_demand=scaled,
        degree_violations=degree_violations,
        cut_violation=cut_violation,
    )


def trace_to_csv(stats: SimStats) -> str:
    """Render a collected trace to CSV (slot-start snapshots plus events)."""
    if stats.trace is None:
        raise ValueError("run was not configured with collect_trace")
    inst = stats.config.instance
    verts = inst.vertices
    edges = inst.edges
    names = [edge_name(e) for e in edges]
    header = (
        ["t"]
        + [f"L_{v}" for v in verts]
        + [f"R_{n}" for n in names]
        + ["matching"]
        + [f"S_{n}" for n in names]
        + [f"Shat_{n}" for n in names]
    )
    lines = [",".join(header)]
    for row in stats.trace:
        cells = [str(row.t)]
        cells += [str(x) for x in row.ent]
        cells += [str(x) for x in row.req]
        cells.append(";".join(edge_name(e) for e in sorted(row.matching)))
        cells += ["1" if e in row.served else "0" for e in edges]
        cells += ["1" if e in row.potential else "0" for e in edges]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def summary_dict(stats: SimStats) -> dict:
    """JSON-ready run summary (stable key order, no timestamps)."""
    inst = stats.config.instance
    by_edge = lambda d: {edge_name(e): d[e] for e in inst.edges}
    out = {
        "policy": stats.config.policy,
        "seed": stats.config.seed,
        "frame_length": stats.config.frame_length,
        "horizon": stats.slots,
        "warmup": stats.config.warmup,
        "measured_slots": stats.measured,
        "lp_solves": stats.lp_solves,
        "served_total": by_edge(stats.served_total),
        "potential_total": by_edge(stats.potential_total),
        "matched_total": by_edge(stats.matched_total),
        "request_arrivals_total": by_edge(stats.request_arrivals_total),
        "req_time_avg": by_edge(stats.req_time_avg),
        "req_max": by_edge(stats.req_max),
        "empty_freq": {v: stats.empty_freq[v] for v in inst.vertices},
        "joint_occupied_freq": by_edge(stats.joint_occupied_freq),
        "backlog_max_first_half": stats.backlog_max_first_half,
        "backlog_max_final_half": stats.backlog_max_final_half,
        "frames": len(stats.frames),
    }
    try:
        out["drift"] = drift_report(stats).to_dict()
    except ValueError:
        out["drift"] = None
    return out
