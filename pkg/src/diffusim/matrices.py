"""Round (transition) matrices: construction, validation, spectra.

A round matrix is row-stochastic and stored row-wise in a fixed interval
order: non-self neighbors by ascending index, then the self-loop entry last.
The running prefix sums of each row partition [0, 1) into half-open
intervals, one per positive entry; the discrete sampler routes tokens by
where a random number falls among these intervals. Keeping the self
interval on top of [0, 1) makes the lazy-random-walk instance behave as
"stay if the sample lands in [1/2, 1)".
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .errors import (
    NotConvergedError,
    NotIrreducibleError,
    SizeLimitError,
    UnsupportedMatrixError,
    ValidationError,
)
from .graphs import Graph

ROW_SUM_TOL = 1e-12       # construction: row sums must be 1 within this
CLASSIFY_TOL = 1e-12      # symmetric / lazy flags
DETAILED_BALANCE_TOL = 1e-10
STATIONARY_RESIDUAL = 1e-12
DENSE_LIMIT = 4096


class RowView(NamedTuple):
    """One matrix row in interval order."""

    targets: np.ndarray   # neighbor indices, self last when present
    probs: np.ndarray     # positive probabilities, same order
    prefix: np.ndarray    # len(targets)+1 running sums; prefix[0]=0, prefix[-1]=1


@dataclass(eq=False)
class RoundMatrix:
    """Validated row-stochastic matrix with per-row interval layout.

    Arrays are padded to the widest row so steps can vectorize across
    vertices: `targets` pads with the row's own vertex, `probs` with 0,
    `prefix` with 1.0. Rows are immutable after construction (the arrays
    are marked read-only) so matrices can be shared across trials.
    """

    n: int
    targets: np.ndarray   # (n, width) int64
    probs: np.ndarray     # (n, width) float64
    prefix: np.ndarray    # (n, width+1) float64
    row_len: np.ndarray   # (n,) int64
    symmetric: bool
    lazy: bool
    irreducible: bool

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[tuple[int, float]]]) -> "RoundMatrix":
        """Validate and canonicalize per-vertex (neighbor, probability) lists.

        Zero entries are dropped; negative entries and row sums away from 1
        (beyond 1e-12) are rejected with the offending row named. The final
        prefix entry is pinned to exactly 1.0 (a shift within the row-sum
        tolerance) so interval arithmetic has an exact top end.
        """
        n = len(rows)
        if n < 1:
            raise ValidationError("matrix needs at least one row")
        canon: list[tuple[list[int], list[float]]] = []
        for v, row in enumerate(rows):
            acc: dict[int, float] = {}
            for u, p in row:
                u = int(u)
                if not (0 <= u < n):
                    raise ValidationError(f"row {v}: column {u} out of range for n={n}")
                if p < 0:
                    raise ValidationError(f"row {v}: negative entry P[{v},{u}]={p}")
                if p > 0:
                    acc[u] = acc.get(u, 0.0) + float(p)
            total = sum(acc.values())
            if abs(total - 1.0) > ROW_SUM_TOL:
                raise ValidationError(f"row {v}: sums to {total!r}, expected 1 within {ROW_SUM_TOL}")
            if not acc:
                raise ValidationError(f"row {v}: has no positive entries")
            order = sorted(u for u in acc if u != v)
            if v in acc:
                order.append(v)
            canon.append((order, [acc[u] for u in order]))

        width = max(len(t) for t, _ in canon)
        targets = np.empty((n, width), dtype=np.int64)
        probs = np.zeros((n, width), dtype=np.float64)
        prefix = np.ones((n, width + 1), dtype=np.float64)
        row_len = np.empty(n, dtype=np.int64)
        for v, (tgt, pr) in enumerate(canon):
            m = len(tgt)
            row_len[v] = m
            targets[v, :m] = tgt
            targets[v, m:] = v
            probs[v, :m] = pr
            prefix[v, 0] = 0.0
            prefix[v, 1:m] = np.cumsum(pr[:-1])
            prefix[v, m:] = 1.0

        symmetric = _is_symmetric(n, canon)
        lazy = _is_lazy(n, canon)
        irreducible = _is_irreducible(n, canon)
        for arr in (targets, probs, prefix, row_len):
            arr.flags.writeable = False
        return cls(
            n=n,
            targets=targets,
            probs=probs,
            prefix=prefix,
            row_len=row_len,
            symmetric=symmetric,
            lazy=lazy,
            irreducible=irreducible,
        )

    def row(self, v: int) -> RowView:
        m = int(self.row_len[v])
        return RowView(self.targets[v, :m], self.probs[v, :m], self.prefix[v, : m + 1])

    def entry(self, v: int, u: int) -> float:
        """P[v, u]; exactly 0.0 for absent entries."""
        m = int(self.row_len[v])
        tgt = self.targets[v, :m]
        hits = np.nonzero(tgt == u)[0]
        return float(self.probs[v, hits[0]]) if hits.size else 0.0

    def diagonal(self) -> np.ndarray:
        """Self-loop probabilities (0 where absent)."""
        diag = np.zeros(self.n)
        last = self.row_len - 1
        rows = np.arange(self.n)
        selfpos = self.targets[rows, last] == rows
        diag[selfpos] = self.probs[rows[selfpos], last[selfpos]]
        return diag

    def dense(self) -> np.ndarray:
        """Dense (n, n) copy; refuses above DENSE_LIMIT."""
        if self.n > DENSE_LIMIT:
            raise SizeLimitError(f"dense form refused for n={self.n} > {DENSE_LIMIT}")
        out = np.zeros((self.n, self.n))
        rows = np.repeat(np.arange(self.n), self.targets.shape[1])
        np.add.at(out, (rows, self.targets.ravel()), self.probs.ravel())
        return out

    def min_positive_entry(self) -> float:
        return float(self.probs[self.probs > 0].min())

    def to_text(self) -> str:
        """Serialize as a header line "n" then "v u p" lines."""
        lines = [str(self.n)]
        for v in range(self.n):
            rv = self.row(v)
            for u, p in zip(rv.targets, rv.probs):
                lines.append(f"{v} {int(u)} {float(p)!r}")
        return "\n".join(lines) + "\n"


def _is_symmetric(n: int, canon) -> bool:
    entries: dict[tuple[int, int], float] = {}
    for v, (tgt, pr) in enumerate(canon):
        for u, p in zip(tgt, pr):
            entries[(v, u)] = p
    for (v, u), p in entries.items():
        if abs(p - entries.get((u, v), 0.0)) > CLASSIFY_TOL:
            return False
    return True


def _is_lazy(n: int, canon) -> bool:
    for v, (tgt, pr) in enumerate(canon):
        diag = pr[-1] if tgt and tgt[-1] == v else 0.0
        if diag < 0.5 - CLASSIFY_TOL:
            return False
    return True


def _is_irreducible(n: int, canon) -> bool:
    """Strong connectivity of the positive-entry digraph."""
    fwd = [[u for u in tgt if u != v] for v, (tgt, _) in enumerate(canon)]
    rev: list[list[int]] = [[] for _ in range(n)]
    for v, outs in enumerate(fwd):
        for u in outs:
            rev[u].append(v)

    def reaches_all(adj) -> bool:
        seen = [False] * n
        seen[0] = True
        stack = [0]
        count = 1
        while stack:
            x = stack.pop()
            for y in adj[x]:
                if not seen[y]:
                    seen[y] = True
                    count += 1
                    stack.append(y)
        return count == n

    return reaches_all(fwd) and reaches_all(rev)


def lazy_rw_matrix(g: Graph) -> RoundMatrix:
    """Lazy random walk on a regular graph: 1/(2d) per edge, 1/2 self."""
    d = g.regular_degree()
    p = 1.0 / (2 * d)
    rows = []
    for v in range(g.n):
        row = [(u, p) for u in g.adjacency[v]]
        row.append((v, 0.5))
        rows.append(row)
    return RoundMatrix.from_rows(rows)


def metropolis_matrix(g: Graph) -> RoundMatrix:
    """Metropolis chain: 1/(2*max(d_v, d_u)) per edge, remainder on the self-loop.

    Symmetric and lazy on any connected graph, using only local degree
    knowledge.
    """
    degs = g.degrees()
    rows = []
    for v in range(g.n):
        row = [(u, 1.0 / (2 * max(degs[v], degs[u]))) for u in g.adjacency[v]]
        self_p = 1.0 - sum(p for _, p in row)
        row.append((v, self_p))
        rows.append(row)
    return RoundMatrix.from_rows(rows)


def custom_matrix(entries: Sequence[tuple[int, int, float]], n: int | None = None) -> RoundMatrix:
    """Build a RoundMatrix from (v, u, probability) triples.

    n defaults to 1 + the largest index mentioned.
    """
    if not entries:
        raise ValidationError("no entries given")
    if n is None:
        n = 1 + max(max(int(v), int(u)) for v, u, _ in entries)
    rows: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for v, u, p in entries:
        v = int(v)
        if not (0 <= v < n):
            raise ValidationError(f"row index {v} out of range for n={n}")
        rows[v].append((int(u), float(p)))
    return RoundMatrix.from_rows(rows)


def matrix_from_text(text: str) -> RoundMatrix:
    """Parse the "n" header + "v u p" line format (see RoundMatrix.to_text)."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise ValidationError("matrix text is empty")
    try:
        n = int(lines[0])
    except ValueError:
        raise ValidationError(f"bad header line {lines[0]!r}, expected vertex count") from None
    entries = []
    for lineno, ln in enumerate(lines[1:], start=2):
        parts = ln.split()
        if len(parts) != 3:
            raise ValidationError(f"line {lineno}: expected 'v u p', got {ln!r}")
        try:
            entries.append((int(parts[0]), int(parts[1]), float(parts[2])))
        except ValueError:
            raise ValidationError(f"line {lineno}: non-numeric token in {ln!r}") from None
    return custom_matrix(entries, n=n)


@dataclass(frozen=True)
class Classification:
    symmetric: bool
    lazy: bool
    irreducible: bool
    reversible: bool
    pi: np.ndarray | None  # stationary distribution; None when reducible


def stationary_distribution(P: RoundMatrix, max_iter: int = 500_000) -> np.ndarray:
    """Stationary distribution pi with ||pi P - pi||_inf <= 1e-12.

    Uniform shortcut for symmetric chains; power iteration otherwise.
    Raises NotIrreducibleError for reducible chains.
    """
    if not P.irreducible:
        raise NotIrreducibleError("stationary distribution requested for a reducible chain")
    if P.symmetric:
        return np.full(P.n, 1.0 / P.n)
    pi = np.full(P.n, 1.0 / P.n)
    for _ in range(max_iter):
        nxt = power_apply(pi, P, 1)
        nxt /= nxt.sum()
        if np.max(np.abs(nxt - pi)) <= STATIONARY_RESIDUAL:
            return nxt
        pi = nxt
    raise NotConvergedError(
        f"power iteration did not reach residual {STATIONARY_RESIDUAL} in {max_iter} steps",
        partial_value=pi,
    )


def is_reversible(P: RoundMatrix, pi: np.ndarray) -> bool:
    """Detailed balance pi_v P[v,u] == pi_u P[u,v] within 1e-10."""
    for v in range(P.n):
        rv = P.row(v)
        for u, p in zip(rv.targets, rv.probs):
            if abs(pi[v] * p - pi[int(u)] * P.entry(int(u), v)) > DETAILED_BALANCE_TOL:
                return False
    return True


def classify(P: RoundMatrix) -> Classification:
    """Flags plus stationary distribution (pi is None for reducible chains)."""
    if not P.irreducible:
        return Classification(P.symmetric, P.lazy, False, False, None)
    pi = stationary_distribution(P)
    return Classification(P.symmetric, P.lazy, True, is_reversible(P, pi), pi)


def power_apply(x: np.ndarray, P: RoundMatrix, t: int) -> np.ndarray:
    """x . P^t via t sparse row-vector multiplications; t=0 returns a copy."""
    if t < 0:
        raise ValidationError(f"step count must be >= 0, got {t}")
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (P.n,):
        raise ValidationError(f"vector has shape {x.shape}, expected ({P.n},)")
    y = x.copy()
    flat_targets = P.targets.ravel()
    for _ in range(t):
        y = np.bincount(flat_targets, weights=(y[:, None] * P.probs).ravel(), minlength=P.n)
    return y


def second_eigenvalue(P: RoundMatrix, dense_limit: int = DENSE_LIMIT) -> float:
    """Second-largest eigenvalue magnitude of a symmetric irreducible chain.

    Uses a dense symmetric eigendecomposition; for lazy symmetric chains all
    eigenvalues are nonnegative so this equals lambda_2 itself.
    """
    if not P.symmetric:
        raise UnsupportedMatrixError("second_eigenvalue requires a symmetric matrix")
    if not P.irreducible:
        raise NotIrreducibleError("second_eigenvalue requires an irreducible matrix")
    if P.n > dense_limit:
        raise SizeLimitError(f"n={P.n} above dense eigensolver limit {dense_limit}")
    if P.n == 1:
        return 0.0
    eigs = np.linalg.eigvalsh(P.dense())
    mags = np.sort(np.abs(eigs))
    return float(mags[-2])
