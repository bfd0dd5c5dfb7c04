"""Parameter sweeps over the reference chain, and figure-ready data files.

A sweep point is one (lambda, mu, buffer, variant) combination reduced to the
single-vertex chain: both endpoints of an edge share the parameters, so the
edge bound collapses to (2C - 1)^+. Rows carry both that sum-form bound and
the product form C^2 so the two candidate bounds can be compared downstream,
plus the variant's effective guarantee (the scaled policy pays its 2/3
factor).

Data files are deterministic: fixed column order, floats via repr, no
timestamps; run metadata goes to a JSON sidecar next to each CSV. Grid
points are independent and can be dispatched to a thread pool (worker count
from the QSWITCH_WORKERS environment variable); results are reassembled in
grid order so parallelism never changes the output.
"""

from __future__ import annotations

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .refchain import ChainSpec, POLICY_SERVICE_FACTOR, availability, convergence_profile

WORKERS_ENV = "QSWITCH_WORKERS"

SWEEP_COLUMNS = ["lambda", "mu", "B", "variant", "C", "gamma", "gamma_product", "effective_gamma"]
GAP_COLUMNS = ["lambda", "mu", "variant", "B", "C", "gap"]


@dataclass
class SweepSpec:
    lambdas: list[float]
    mu_factors: list[float]  # mu = factor * lambda
    buffers: list[int]
    variants: list[str] = field(default_factory=lambda: ["alg1", "alg2"])


def standard_grid() -> SweepSpec:
    """The reference parameter grid used for the shipped figures."""
    return SweepSpec(
        lambdas=[0.1, 0.2, 0.3, 0.4, 0.5],
        mu_factors=[0.05, 0.1],
        buffers=[5, 10, 15, 20, 25],
    )


def validate_sweep(spec: SweepSpec) -> None:
    errors = []
    for lam in spec.lambdas:
        if not 0.0 <= lam <= 1.0:
            errors.append(f"lambda {lam} outside [0, 1]")
    for f in spec.mu_factors:
        if f < 0.0:
            errors.append(f"mu factor {f} negative")
        for lam in spec.lambdas:
            if f * lam > 1.0:
                errors.append(f"mu = {f} * {lam} exceeds 1")
    for b in spec.buffers:
        if not isinstance(b, int) or b < 1:
            errors.append(f"buffer {b} must be an integer >= 1")
    for v in spec.variants:
        if v not in POLICY_SERVICE_FACTOR:
            errors.append(f"unknown variant {v!r}")
    if not (spec.lambdas and spec.mu_factors and spec.buffers and spec.variants):
        errors.append("grid must be nonempty in every dimension")
    if errors:
        raise ValueError("invalid sweep spec:\n" + "\n".join(f"- {e}" for e in errors))


@dataclass(frozen=True)
class SweepRow:
    lam: float
    mu: float
    buffer: int
    variant: str
    availability: float
    gamma: float
    gamma_product: float
    effective_gamma: float


def _worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    return max(1, n)


def _sweep_point(lam: float, mu: float, buffer: int, variant: str) -> SweepRow:
    c = availability(
        ChainSpec(
            arrival_prob=lam,
            decoherence_prob=mu,
            service_prob=POLICY_SERVICE_FACTOR[variant] * lam,
            buffer=buffer,
        )
    )
    gamma = max(0.0, 2.0 * c - 1.0)
    return SweepRow(
        lam=lam,
        mu=mu,
        buffer=buffer,
        variant=variant,
        availability=c,
        gamma=gamma,
        gamma_product=c * c,
        effective_gamma=POLICY_SERVICE_FACTOR[variant] * gamma,
    )


def run_sweep(spec: SweepSpec, workers: int | None = None) -> list[SweepRow]:
    """One row per grid point, in grid order (variant fastest)."""
    validate_sweep(spec)
    points = [
        (lam, f * lam, b, v)
        for lam in spec.lambdas
        for f in spec.mu_factors
        for b in spec.buffers
        for v in spec.variants
    ]
    n = workers if workers is not None else _worker_count()
    if n <= 1:
        return [_sweep_point(*p) for p in points]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda p: _sweep_point(*p), points))


@dataclass
class VariantComparison:
    points: int
    dominated: int  # grid points where the cutting-plane guarantee wins or ties
    mean_gap: float  # mean of (gamma_alg1 - effective_gamma_alg2)
    worst_gap: float  # most negative difference observed (0 if none)

    def to_dict(self) -> dict:
        return {
            "points": self.points,
            "dominated": self.dominated,
            "mean_gap": self.mean_gap,
            "worst_gap": self.worst_gap,
        }


def compare_variants(rows: list[SweepRow]) -> VariantComparison:
    """Pair alg1/alg2 rows per grid point and compare effective guarantees."""
    by_key: dict[tuple, dict[str, SweepRow]] = {}
    for r in rows:
        by_key.setdefault((r.lam, r.mu, r.buffer), {})[r.variant] = r
    gaps = []
    for key, pair in sorted(by_key.items()):
        if "alg1" in pair and "alg2" in pair:
            gaps.append(pair["alg1"].effective_gamma - pair["alg2"].effective_gamma)
    if not gaps:
        raise ValueError("no grid points carry both variants")
    dominated = sum(1 for g in gaps if g >= 0.0)
    return VariantComparison(
        points=len(gaps),
        dominated=dominated,
        mean_gap=sum(gaps) / len(gaps),
        worst_gap=min(0.0, min(gaps)),
    )


@dataclass(frozen=True)
class GapRow:
    lam: float
    mu: float
    variant: str
    buffer: int
    availability: float
    gap: float


def gap_profile_rows(
    lambdas: list[float],
    mu_factors: list[float],
    buffers: list[int],
    variants: list[str] | None = None,
    reference_buffer: int = 200,
) -> list[GapRow]:
    """Availability gap to a large reference buffer, per grid point."""
    variants = variants or ["alg1"]
    out: list[GapRow] = []
    for lam in lambdas:
        for f in mu_factors:
            for v in variants:
                prof = convergence_profile(
                    arrival_prob=lam,
                    decoherence_prob=f * lam,
                    service_prob=POLICY_SERVICE_FACTOR[v] * lam,
                    buffers=list(buffers),
                    reference_buffer=reference_buffer,
                )
                for p in prof.points:
                    out.append(
                        GapRow(
                            lam=lam,
                            mu=f * lam,
                            variant=v,
                            buffer=p.buffer,
                            availability=p.availability,
                            gap=p.gap,
                        )
                    )
    return out


def _csv(columns: list[str], rows: list[list]) -> str:
    lines = [",".join(columns)]
    for row in rows:
        lines.append(",".join(repr(c) if isinstance(c, float) else str(c) for c in row))
    return "\n".join(lines) + "\n"


def sweep_to_csv(rows: list[SweepRow]) -> str:
    return _csv(
        SWEEP_COLUMNS,
        [
            [r.lam, r.mu, r.buffer, r.variant, r.availability, r.gamma, r.gamma_product, r.effective_gamma]
            for r in rows
        ],
    )


def gaps_to_csv(rows: list[GapRow]) -> str:
    return _csv(
        GAP_COLUMNS,
        [[r.lam, r.mu, r.variant, r.buffer, r.availability, r.gap] for r in rows],
    )


def write_data_file(path: str, text: str, metadata: dict) -> None:
    """Write a CSV and its JSON sidecar (<path>.meta.json), newline-stable."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    with open(path + ".meta.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(metadata, fh, indent=2, sort_keys=True)
        fh.write("\n")
