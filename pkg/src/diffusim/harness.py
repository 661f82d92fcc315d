"""Experiment runner: seeded multi-trial simulations, bounds, CSV emission.

Reproducibility contract: an identical ExperimentSpec (including the master
seed) produces byte-identical CSV, regardless of --jobs. Per-trial
generators derive from SeedSequence([master_seed, trial_index]) so growing
the trial count never reshuffles earlier trials.
"""
from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import analysis, continuous, discrete, graphs, matrices
from .errors import DiffusimError, ValidationError

CSV_HEADER = "trial,t,disc,max_dev,bound_thm3,bound_thm1_or_2,viol_thm3,viol_disc"
ALGORITHMS = (
    "alg2-naive",
    "alg2-batch",
    "send-floor2d",
    "send-round3d",
    "send-partition",
    "rsend",
)


@dataclass
class ExperimentSpec:
    graph: str
    matrix: str = "lazy-rw"
    algorithm: str = "alg2-batch"
    loads: str = "point:1000"
    steps: str = "auto"        # "auto" or a decimal step count
    trials: int = 1
    seed: int = 0
    stride: int = 1            # 0 records only t=0 and t=T
    jobs: int = 1

    def echo(self) -> str:
        return (f"graph={self.graph} matrix={self.matrix} algorithm={self.algorithm} "
                f"loads={self.loads} steps={self.steps} trials={self.trials} "
                f"seed={self.seed} stride={self.stride}")


def build_graph(spec: str) -> graphs.Graph:
    """Parse a graph spec: generator:params or file:PATH."""
    name, _, rest = spec.partition(":")
    try:
        if name == "file":
            return graphs.load_edge_list(Path(rest).read_text())
        params = [int(p) for p in rest.split(":")] if rest else []
        if name == "cycle" and len(params) == 1:
            return graphs.gen_cycle(params[0])
        if name == "hypercube" and len(params) == 1:
            return graphs.gen_hypercube(params[0])
        if name == "star" and len(params) == 1:
            return graphs.gen_star(params[0])
        if name == "complete" and len(params) == 1:
            return graphs.gen_complete(params[0])
        if name == "torus" and len(params) == 2:
            return graphs.gen_torus(params[0], params[1])
        if name == "random-regular" and len(params) == 3:
            return graphs.gen_random_regular(params[0], params[1], params[2])
    except ValueError as exc:
        if isinstance(exc, DiffusimError):
            raise
        raise ValidationError(f"bad graph spec {spec!r}: {exc}") from None
    raise ValidationError(
        f"unknown graph spec {spec!r}; expected cycle:N, hypercube:DIM, star:N, "
        f"complete:N, torus:A:B, random-regular:N:D:SEED or file:PATH"
    )


def build_matrix(kind: str, g: graphs.Graph | None) -> matrices.RoundMatrix:
    """lazy-rw | metropolis | file:PATH."""
    if kind == "lazy-rw":
        if g is None:
            raise ValidationError("lazy-rw matrix needs a graph")
        return matrices.lazy_rw_matrix(g)
    if kind == "metropolis":
        if g is None:
            raise ValidationError("metropolis matrix needs a graph")
        return matrices.metropolis_matrix(g)
    name, _, rest = kind.partition(":")
    if name == "file":
        return matrices.matrix_from_text(Path(rest).read_text())
    raise ValidationError(f"unknown matrix kind {kind!r}; expected lazy-rw, metropolis or file:PATH")


def build_loads(preset: str, n: int) -> discrete.LoadConfig:
    name, _, rest = preset.partition(":")
    if name == "file":
        cfg = discrete.parse_loads_text(Path(rest).read_text())
        if cfg.n != n:
            raise ValidationError(f"load file has {cfg.n} lines, graph has {n} vertices")
        return cfg
    return discrete.config_from_preset(preset, n)


def trial_rng(master_seed: int, trial_index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([master_seed, trial_index]))


def _make_stepper(algorithm: str, P: matrices.RoundMatrix, g: graphs.Graph | None):
    if algorithm == "alg2-naive":
        return lambda cfg, rng: discrete.step_naive(cfg, P, rng)
    if algorithm == "alg2-batch":
        return lambda cfg, rng: discrete.step_batch(cfg, P, rng)
    if algorithm in ("send-floor2d", "send-round3d", "send-partition", "rsend"):
        if g is None:
            raise ValidationError(f"algorithm {algorithm} needs a graph")
        if algorithm == "send-floor2d":
            return lambda cfg, rng: discrete.step_send_floor2d(cfg, g)
        if algorithm == "send-round3d":
            return lambda cfg, rng: discrete.step_send_round3d(cfg, g)
        if algorithm == "send-partition":
            return lambda cfg, rng: discrete.step_send_partition(cfg, g)
        return lambda cfg, rng: discrete.step_rsend(cfg, g, rng)
    raise ValidationError(f"unknown algorithm {algorithm!r}; choose from {ALGORITHMS}")


@dataclass
class ResolvedExperiment:
    spec: ExperimentSpec
    graph: graphs.Graph | None
    matrix: matrices.RoundMatrix
    x0: discrete.LoadConfig
    T: int
    record_ts: list[int]
    oracle: dict[int, np.ndarray]
    lam: float | None
    psi2: float | None
    bound3: float | None
    bound12: float | None
    bound12_name: str


def resolve(spec: ExperimentSpec) -> ResolvedExperiment:
    if spec.trials < 1:
        raise ValidationError(f"trials must be >= 1, got {spec.trials}")
    if spec.stride < 0:
        raise ValidationError(f"stride must be >= 0, got {spec.stride}")
    g = build_graph(spec.graph) if spec.graph else None
    P = build_matrix(spec.matrix, g)
    if g is not None and g.n != P.n:
        raise ValidationError(f"graph has {g.n} vertices but matrix has {P.n}")
    x0 = build_loads(spec.loads, P.n)

    lam = None
    if P.symmetric and P.irreducible:
        lam = matrices.second_eigenvalue(P)

    if spec.steps == "auto":
        disc0 = analysis.discrepancy(x0.loads)
        if disc0 == 0:
            T = 0
        else:
            if lam is None:
                raise ValidationError("steps=auto needs a symmetric irreducible matrix")
            T = continuous.convergence_time(P, disc0, 1.0, lam=lam)
    else:
        try:
            T = int(spec.steps)
        except ValueError:
            raise ValidationError(f"steps must be an integer or 'auto', got {spec.steps!r}") from None
        if T < 0:
            raise ValidationError(f"steps must be >= 0, got {T}")

    if spec.stride > 0:
        record_ts = sorted(set(range(0, T + 1, spec.stride)) | {0, T})
    else:
        record_ts = sorted({0, T})

    record_set = set(record_ts)
    oracle: dict[int, np.ndarray] = {}
    chi = x0.loads.astype(np.float64)
    if 0 in record_set:
        oracle[0] = chi
    for t in range(1, T + 1):
        chi = matrices.power_apply(chi, P, 1)
        if t in record_set:
            oracle[t] = chi

    psi2 = None
    bound3 = None
    try:
        psi2 = analysis.local_p_divergence(P, p=2).value
        if P.n >= 2:
            bound3 = analysis.bound_theorem3(psi2, P.n)
    except DiffusimError:
        pass

    bound12 = None
    bound12_name = ""
    if g is not None and P.n >= 2:
        if spec.matrix == "lazy-rw":
            bound12 = analysis.bound_theorem1(g.regular_degree(), P.n)
            bound12_name = "thm1"
        elif spec.matrix == "metropolis":
            bound12 = analysis.bound_theorem2(g.d_max, P.n)
            bound12_name = "thm2"

    return ResolvedExperiment(
        spec=spec, graph=g, matrix=P, x0=x0, T=T, record_ts=record_ts,
        oracle=oracle, lam=lam, psi2=psi2, bound3=bound3,
        bound12=bound12, bound12_name=bound12_name,
    )


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.10g}"


def _trial_rows(res: ResolvedExperiment, trial: int) -> list[str]:
    rng = trial_rng(res.spec.seed, trial)
    stepper = _make_stepper(res.spec.algorithm, res.matrix, res.graph)
    record_set = set(res.record_ts)
    rows = []

    def emit(t: int, cfg: discrete.LoadConfig):
        disc = int(cfg.loads.max() - cfg.loads.min())
        dev = float(np.abs(cfg.loads - res.oracle[t]).max())
        viol3 = "" if res.bound3 is None else str(int(dev > res.bound3))
        viol_disc = "" if res.bound12 is None else str(int(disc > res.bound12))
        rows.append(
            f"{trial},{t},{disc},{dev:.10g},{_fmt(res.bound3)},{_fmt(res.bound12)},{viol3},{viol_disc}"
        )

    cfg = res.x0
    if 0 in record_set:
        emit(0, cfg)
    for t in range(1, res.T + 1):
        cfg = stepper(cfg, rng)
        if t in record_set:
            emit(t, cfg)
    return rows


def run_experiment(spec: ExperimentSpec) -> tuple[list[str], list[str]]:
    """Returns ('#'-prefixed header lines, data rows) ready for CSV assembly."""
    res = resolve(spec)
    header = [
        "# diffusim simulate",
        f"# {spec.echo()}",
        f"# resolved_steps={res.T} n={res.matrix.n}",
        "# log_convention=natural",
        f"# lambda={_fmt(res.lam)} psi2={_fmt(res.psi2)} "
        f"bound_thm3={_fmt(res.bound3)} bound_{res.bound12_name or 'thm1_or_2'}={_fmt(res.bound12)}",
        CSV_HEADER,
    ]
    if spec.jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            chunks = list(pool.map(_trial_rows, [res] * spec.trials, range(spec.trials)))
    else:
        chunks = [_trial_rows(res, trial) for trial in range(spec.trials)]
    rows = [row for chunk in chunks for row in chunk]
    return header, rows


def write_csv(path: str | Path, header: list[str], rows: list[str]) -> None:
    Path(path).write_text("\n".join(header + rows) + "\n")


def simulate_to_csv(spec: ExperimentSpec, out: str | Path) -> int:
    header, rows = run_experiment(spec)
    write_csv(out, header, rows)
    return len(rows)


def bounds_report(graph_spec: str, matrix_kind: str) -> list[str]:
    """Flat key=value block: chain stats, psi2 (computed and bound forms),
    and every theorem bound that applies; failed hypotheses are named."""
    g = build_graph(graph_spec) if graph_spec else None
    P = build_matrix(matrix_kind, g)
    lines = [f"graph={graph_spec}", f"matrix={matrix_kind}", f"n={P.n}"]
    if g is not None:
        if g.is_regular():
            lines.append(f"d={g.regular_degree()}")
        lines.append(f"d_max={g.d_max}")
    try:
        lam = matrices.second_eigenvalue(P)
        lines.append(f"lambda={lam:.10g}")
    except DiffusimError as exc:
        lines.append(f"lambda=unavailable ({exc})")

    psi2 = None
    try:
        rep = analysis.local_p_divergence(P, p=2)
        psi2 = rep.value
        lines.append(f"psi2_computed={rep.value:.10g}")
        lines.append(f"psi2_t_stop={rep.t_stop}")
    except DiffusimError as exc:
        lines.append(f"psi2_computed=unavailable ({exc})")
    for label, fn in (("psi2_bound_symmetric", analysis.psi2_bound_symmetric),
                      ("psi2_bound_reversible", analysis.psi2_bound_reversible)):
        try:
            lines.append(f"{label}={fn(P):.10g}")
        except DiffusimError as exc:
            lines.append(f"{label}=unavailable ({exc})")

    if g is not None and P.n >= 2:
        if g.is_regular():
            lines.append(f"bound_thm1={analysis.bound_theorem1(g.regular_degree(), P.n):.10g}")
        lines.append(f"bound_thm2={analysis.bound_theorem2(g.d_max, P.n):.10g}")
    if psi2 is not None and P.n >= 2:
        lines.append(f"bound_thm3={analysis.bound_theorem3(psi2, P.n):.10g}")
        lines.append(f"bound_thm5={analysis.bound_theorem5(psi2, P.n):.10g}")
    lines.append("log_convention=natural")
    return lines


def divergence_report(graph_spec: str, matrix_kind: str, p: int,
                      tol: float, t_max: int | None) -> list[str]:
    g = build_graph(graph_spec) if graph_spec else None
    P = build_matrix(matrix_kind, g)
    rep = analysis.local_p_divergence(P, p=p, tol=tol, t_max=t_max)
    return [f"graph={graph_spec}", f"matrix={matrix_kind}", f"n={P.n}"] + rep.to_lines()
