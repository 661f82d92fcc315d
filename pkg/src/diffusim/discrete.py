"""Discrete token diffusion: interval samplers and deterministic baselines.

At vertex v holding x_v tokens, token k samples a number r uniformly from
[k/x_v, (k+1)/x_v) and moves to the neighbor whose row interval contains r.
All routing here happens in "token units": the sample is k + U and the row
prefix sums are scaled by x_v. This avoids forming k/x_v and (k+1)/x_v
separately (cancellation at large x_v) and gives both samplers identical
boundary semantics. Intervals are half-open; a sample landing exactly on a
prefix boundary routes to the interval on its right.

Two samplers are first-class:

* step_naive draws one uniform per token (the literal algorithm);
* step_batch routes tokens whose whole sampling window sits inside one row
  interval deterministically and only draws for the boundary tokens (at
  most two per row interval), which is distributionally identical.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .graphs import Graph
from .matrices import RoundMatrix, RowView

__all__ = [
    "LoadConfig",
    "StepTrace",
    "destination_distribution",
    "deterministic_token_mask",
    "step_naive",
    "step_batch",
    "run",
    "step_send_floor2d",
    "step_send_round3d",
    "step_send_partition",
    "step_rsend",
    "point_config",
    "uniform_config",
    "random_config",
    "config_from_preset",
    "parse_loads_text",
    "loads_text",
]


@dataclass(frozen=True, eq=False)
class LoadConfig:
    """Nonnegative integer load vector; the total is conserved by every step."""

    loads: np.ndarray  # int64, read-only
    total: int

    @classmethod
    def from_loads(cls, loads) -> "LoadConfig":
        arr = np.asarray(loads)
        if arr.ndim != 1 or arr.size == 0:
            raise ValidationError("loads must be a non-empty 1-d vector")
        return cls._wrap(arr)

    @classmethod
    def _wrap(cls, arr) -> "LoadConfig":
        arr = np.asarray(arr)
        if not np.issubdtype(arr.dtype, np.integer):
            rounded = np.rint(arr)
            if np.any(rounded != arr):
                raise ValidationError("loads must be integers")
            arr = rounded
        arr = arr.astype(np.int64)
        if np.any(arr < 0):
            raise ValidationError("loads must be nonnegative")
        arr.flags.writeable = False
        return cls(loads=arr, total=int(arr.sum()))

    @property
    def n(self) -> int:
        return int(self.loads.size)


@dataclass
class StepTrace:
    """Per-step record of token destinations for invariant checking.

    destinations[v][k] is the vertex token k of v moved to; sampled[v][k]
    says whether a random draw decided it; r_values holds the token-unit
    sample k + U (NaN where no draw happened).
    """

    loads_before: np.ndarray
    destinations: list[np.ndarray]
    sampled: list[np.ndarray]
    r_values: list[np.ndarray]

    def sent_counts(self) -> dict[tuple[int, int], int]:
        """(v, u) -> number of tokens sent from v to u this step."""
        out: dict[tuple[int, int], int] = {}
        for v, dests in enumerate(self.destinations):
            for u, c in zip(*np.unique(dests, return_counts=True)):
                out[(v, int(u))] = int(c)
        return out

    def boundary_loads(self, P: RoundMatrix, v: int) -> np.ndarray:
        """Token indices at v whose destination was not forced."""
        mask = deterministic_token_mask(P, v, int(self.loads_before[v]))
        return np.nonzero(~mask)[0]


def _token_boundaries(P: RoundMatrix, v: int, x_v: int) -> np.ndarray:
    """Row prefix sums of v scaled into token units (length row_len+1)."""
    m = int(P.row_len[v])
    return P.prefix[v, : m + 1] * float(x_v)


def destination_distribution(row: RowView, x_v: int, k: int) -> np.ndarray:
    """Probability of token k landing on each row target.

    Each entry is the overlap of [k/x_v, (k+1)/x_v) with the target's row
    interval, times x_v; computed in token units so no division happens.
    """
    if not (0 <= k < x_v):
        raise ValidationError(f"token index {k} out of range for {x_v} loads")
    t = row.prefix * float(x_v)
    lo, hi = float(k), float(k + 1)
    p = np.minimum(hi, t[1:]) - np.maximum(lo, t[:-1])
    return np.maximum(p, 0.0)


def deterministic_token_mask(P: RoundMatrix, v: int, x_v: int) -> np.ndarray:
    """True for tokens whose sampling window sits inside one row interval.

    A token is non-deterministic exactly when some internal interval
    boundary falls strictly inside its window; there are at most two such
    tokens per row interval.
    """
    t = _token_boundaries(P, v, x_v)
    mask = np.ones(x_v, dtype=bool)
    tb = t[1:-1]
    kb = np.floor(tb)
    straddled = np.unique(kb[tb != kb]).astype(np.int64)
    mask[straddled] = False
    return mask


def _route_vertex_batch(P: RoundMatrix, v: int, x_v: int, rng, dest, sampled, r_vals):
    """Reference per-vertex batch routing, filling per-token trace arrays."""
    m = int(P.row_len[v])
    t = _token_boundaries(P, v, x_v)
    targets = P.targets[v]
    for i in range(m):
        k0 = int(np.ceil(t[i]))
        k1 = int(np.floor(t[i + 1]))
        if k1 > k0:
            dest[k0:k1] = targets[i]
    tb = t[1:m]
    kb = np.floor(tb)
    strict = np.nonzero(tb != kb)[0]
    gi = 0
    while gi < strict.size:
        gj = gi
        while gj + 1 < strict.size and kb[strict[gj + 1]] == kb[strict[gi]]:
            gj += 1
        js = strict[gi : gj + 1]
        k = int(kb[js[0]])
        cuts = tb[js] - k
        u = float(rng.random())
        interval = int(js[0]) + int(np.searchsorted(cuts, u, side="right"))
        dest[k] = targets[interval]
        sampled[k] = True
        r_vals[k] = k + u
        gi = gj + 1


def step_batch(x: LoadConfig, P: RoundMatrix, rng, trace: bool = False):
    """One round, sampling only boundary tokens.

    Distributionally identical to step_naive. With trace=True returns
    (config, StepTrace) via a slower per-vertex reference path.
    """
    if x.n != P.n:
        raise ValidationError(f"config has {x.n} vertices, matrix has {P.n}")
    loads = x.loads
    n = P.n
    if trace:
        dests, sampleds, rvs = [], [], []
        new = np.zeros(n, dtype=np.int64)
        for v in range(n):
            x_v = int(loads[v])
            dest = np.full(x_v, -1, dtype=np.int64)  # -1 trips the trace checks
            samp = np.zeros(x_v, dtype=bool)
            rv = np.full(x_v, np.nan)
            if x_v > 0:
                _route_vertex_batch(P, v, x_v, rng, dest, samp, rv)
                assert np.all(dest >= 0)  # every token must have been routed
                np.add.at(new, dest, 1)
            dests.append(dest)
            sampleds.append(samp)
            rvs.append(rv)
        assert int(new.sum()) == x.total
        tr = StepTrace(loads_before=loads, destinations=dests, sampled=sampleds, r_values=rvs)
        return LoadConfig._wrap(new), tr

    xf = loads.astype(np.float64)
    T = P.prefix * xf[:, None]                      # (n, w+1) token-unit boundaries
    flo = np.floor(T)
    interior = np.floor(T[:, 1:]) - np.ceil(T[:, :-1])
    np.maximum(interior, 0.0, out=interior)
    new = np.bincount(P.targets.ravel(), weights=interior.ravel(), minlength=n)
    new = np.rint(new).astype(np.int64)

    tb = T[:, 1:-1]                                 # internal boundaries
    kb = flo[:, 1:-1]
    strict = tb != kb
    if tb.shape[1] >= 2:
        dup = strict[:, 1:] & strict[:, :-1] & (kb[:, 1:] == kb[:, :-1])
        multi = dup.any(axis=1)
    else:
        multi = np.zeros(n, dtype=bool)

    fast = strict & ~multi[:, None]
    vv, jj = np.nonzero(fast)
    if vv.size:
        u = rng.random(vv.size)
        frac = tb[vv, jj] - kb[vv, jj]              # left-interval share
        dest_col = np.where(u < frac, jj, jj + 1)
        new += np.bincount(P.targets[vv, dest_col], minlength=n)

    for v in np.nonzero(multi)[0]:
        x_v = int(loads[v])
        t = _token_boundaries(P, v, x_v)
        tbv = t[1:-1]
        kbv = np.floor(tbv)
        strict_idx = np.nonzero(tbv != kbv)[0]
        gi = 0
        while gi < strict_idx.size:
            gj = gi
            while gj + 1 < strict_idx.size and kbv[strict_idx[gj + 1]] == kbv[strict_idx[gi]]:
                gj += 1
            js = strict_idx[gi : gj + 1]
            cuts = tbv[js] - kbv[js[0]]
            interval = int(js[0]) + int(np.searchsorted(cuts, float(rng.random()), side="right"))
            new[P.targets[v, interval]] += 1
            gi = gj + 1

    assert int(new.sum()) == x.total
    return LoadConfig._wrap(new)


def step_naive(x: LoadConfig, P: RoundMatrix, rng, trace: bool = False):
    """One round drawing a uniform for every token (the literal algorithm).

    Vectorized over all tokens at once; with trace=True also returns the
    per-token StepTrace.
    """
    if x.n != P.n:
        raise ValidationError(f"config has {x.n} vertices, matrix has {P.n}")
    loads = x.loads
    n = P.n
    M = x.total
    if M == 0:
        new = LoadConfig._wrap(np.zeros(n, dtype=np.int64))
        if trace:
            empty = [np.empty(0, dtype=np.int64) for _ in range(n)]
            tr = StepTrace(
                loads_before=loads,
                destinations=empty,
                sampled=[np.empty(0, dtype=bool) for _ in range(n)],
                r_values=[np.empty(0) for _ in range(n)],
            )
            return new, tr
        return new

    v_rep = np.repeat(np.arange(n, dtype=np.int64), loads)
    starts = np.concatenate(([0], np.cumsum(loads)[:-1]))
    k = np.arange(M, dtype=np.int64) - np.repeat(starts, loads)
    u = rng.random(M)
    r = k + u
    t_rows = P.prefix[v_rep] * loads[v_rep, None].astype(np.float64)
    dest_col = (t_rows <= r[:, None]).sum(axis=1) - 1
    np.minimum(dest_col, P.row_len[v_rep] - 1, out=dest_col)
    dest = P.targets[v_rep, dest_col]
    new = np.bincount(dest, minlength=n).astype(np.int64)
    assert int(new.sum()) == M

    if trace:
        cuts = np.cumsum(loads)[:-1]
        tr = StepTrace(
            loads_before=loads,
            destinations=np.split(dest, cuts),
            sampled=[np.ones(int(c), dtype=bool) for c in loads],
            r_values=np.split(r, cuts),
        )
        return LoadConfig._wrap(new), tr
    return LoadConfig._wrap(new)


SAMPLERS = {"naive": step_naive, "batch": step_batch}


def run(x0: LoadConfig, P: RoundMatrix, T: int, rng, sampler: str = "batch",
        collect_traces: bool = False):
    """T rounds of the chosen sampler; trajectory[0] is x0.

    Returns the list of configs, or (configs, traces) when collect_traces.
    """
    if T < 0:
        raise ValidationError(f"step count must be >= 0, got {T}")
    try:
        step = SAMPLERS[sampler]
    except KeyError:
        raise ValidationError(f"unknown sampler {sampler!r}") from None
    traj = [x0]
    traces: list[StepTrace] = []
    for _ in range(T):
        if collect_traces:
            cfg, tr = step(traj[-1], P, rng, trace=True)
            traces.append(tr)
        else:
            cfg = step(traj[-1], P, rng)
        traj.append(cfg)
    return (traj, traces) if collect_traces else traj


# ---------------------------------------------------------------------------
# Deterministic baselines (regular graphs only) and the rotor-free RSend.
# ---------------------------------------------------------------------------


def _scatter_to_neighbors(g: Graph, per_edge: np.ndarray) -> np.ndarray:
    """Sum per_edge (n, d) contributions onto their neighbor targets."""
    nbrs = g.neighbor_array()
    out = np.bincount(nbrs.ravel(), weights=per_edge.ravel(), minlength=g.n)
    return np.rint(out).astype(np.int64)


def step_send_floor2d(x: LoadConfig, g: Graph) -> LoadConfig:
    """Each vertex sends floor(x_v / 2d) to every neighbor, keeps the rest."""
    d = g.regular_degree()
    if x.n != g.n:
        raise ValidationError("config and graph size mismatch")
    loads = x.loads
    q = loads // (2 * d)
    new = loads - d * q + _scatter_to_neighbors(g, np.repeat(q, d).reshape(g.n, d))
    assert int(new.sum()) == x.total
    return LoadConfig._wrap(new)


def step_send_round3d(x: LoadConfig, g: Graph) -> LoadConfig:
    """Each vertex sends round(x_v / 3d) (half-up) to every neighbor."""
    d = g.regular_degree()
    if x.n != g.n:
        raise ValidationError("config and graph size mismatch")
    loads = x.loads
    q = (2 * loads + 3 * d) // (6 * d)  # floor(x/(3d) + 1/2)
    new = loads - d * q + _scatter_to_neighbors(g, np.repeat(q, d).reshape(g.n, d))
    assert int(new.sum()) == x.total
    if np.any(new < 0):
        raise ValidationError("negative load produced")  # unreachable for d >= 1
    return LoadConfig._wrap(new)


def step_send_partition(x: LoadConfig, g: Graph) -> LoadConfig:
    """Split x_v into d+1 near-equal parts: ceilings first, in ascending
    neighbor order, the self part (a floor) last."""
    d = g.regular_degree()
    if x.n != g.n:
        raise ValidationError("config and graph size mismatch")
    loads = x.loads
    q, r = np.divmod(loads, d + 1)
    extra = (np.arange(d)[None, :] < r[:, None]).astype(np.int64)
    new = q + _scatter_to_neighbors(g, q[:, None] + extra)
    assert int(new.sum()) == x.total
    return LoadConfig._wrap(new)


def _partial_fisher_yates(rng, m: int, r: int) -> np.ndarray:
    """Uniform r-subset of range(m) as the first r slots of a partial shuffle."""
    arr = np.arange(m)
    for i in range(r):
        j = i + int(rng.integers(0, m - i))
        arr[i], arr[j] = arr[j], arr[i]
    return arr[:r]


def step_rsend(x: LoadConfig, g: Graph, rng) -> LoadConfig:
    """floor(x_v/(d+1)) to every neighbor and itself; the remainder goes to
    that many distinct targets chosen uniformly without replacement."""
    d = g.regular_degree()
    if x.n != g.n:
        raise ValidationError("config and graph size mismatch")
    loads = x.loads
    q, r = np.divmod(loads, d + 1)
    new = q + _scatter_to_neighbors(g, np.repeat(q, d).reshape(g.n, d))
    nbrs = g.neighbor_array()
    for v in np.nonzero(r)[0]:
        for slot in _partial_fisher_yates(rng, d + 1, int(r[v])):
            tgt = v if slot == d else int(nbrs[v, slot])
            new[tgt] += 1
    assert int(new.sum()) == x.total
    return LoadConfig._wrap(new)


# ---------------------------------------------------------------------------
# Initial configurations.
# ---------------------------------------------------------------------------


def point_config(n: int, total: int) -> LoadConfig:
    """All loads on vertex 0 (the adversarial start)."""
    loads = np.zeros(n, dtype=np.int64)
    loads[0] = total
    return LoadConfig._wrap(loads)


def uniform_config(n: int, total: int) -> LoadConfig:
    """total // n everywhere; the remainder spread over the first vertices."""
    base, rem = divmod(total, n)
    loads = np.full(n, base, dtype=np.int64)
    loads[:rem] += 1
    return LoadConfig._wrap(loads)


def random_config(n: int, total: int, seed: int) -> LoadConfig:
    """Multinomial placement of `total` loads with a dedicated seed."""
    rng = np.random.default_rng(seed)
    return LoadConfig._wrap(rng.multinomial(total, np.full(n, 1.0 / n)))


def config_from_preset(preset: str, n: int) -> LoadConfig:
    """Parse "point:M", "uniform:M" or "random:M:SEED"."""
    parts = preset.split(":")
    try:
        if parts[0] == "point" and len(parts) == 2:
            return point_config(n, int(parts[1]))
        if parts[0] == "uniform" and len(parts) == 2:
            return uniform_config(n, int(parts[1]))
        if parts[0] == "random" and len(parts) == 3:
            return random_config(n, int(parts[1]), int(parts[2]))
    except ValueError:
        raise ValidationError(f"bad number in loads preset {preset!r}") from None
    raise ValidationError(f"unknown loads preset {preset!r}")


def parse_loads_text(text: str) -> LoadConfig:
    """One nonnegative integer per line, one line per vertex."""
    values = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            values.append(int(line))
        except ValueError:
            raise ValidationError(f"line {lineno}: not an integer: {raw!r}") from None
    if not values:
        raise ValidationError("load vector file is empty")
    return LoadConfig.from_loads(values)


def loads_text(x: LoadConfig) -> str:
    return "\n".join(str(int(v)) for v in x.loads) + "\n"
