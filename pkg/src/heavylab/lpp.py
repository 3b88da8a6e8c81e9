"""Last-passage percolation: passage times, limit shape, deterministic twin.

Directed paths increase one coordinate per step; a path is identified with
its vertex set, endpoints included.  The deterministic equivalent replaces
random fluctuation with the limit shape g between chain vertices, collecting
the positive part of the deformation at every chain vertex (including both
endpoints).  Chains are ordered coordinatewise so every increment stays in
the closed positive orthant where g lives.
"""

from __future__ import annotations

import io
import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import measures
from .errors import DomainError


@dataclass(frozen=True)
class WeightField:
    """Weights indexed by the box {0,...,n}^d (d in {2, 3})."""

    d: int
    n: int
    values: np.ndarray

    def __post_init__(self):
        if self.d not in (2, 3):
            raise DomainError(f"dimension must be 2 or 3, got {self.d}")
        if self.n < 1:
            raise DomainError(f"lattice size must be >= 1, got {self.n}")
        if self.d == 2 and self.n > 200:
            raise DomainError("n is capped at 200 for d = 2")
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != (self.n + 1,) * self.d:
            raise DomainError(f"values must have shape {(self.n + 1,) * self.d}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"d={self.d},n={self.n}\n")
        for idx in itertools.product(range(self.n + 1), repeat=self.d):
            coords = ",".join(str(i) for i in idx)
            buf.write(f"{coords},{float(self.values[idx])!r}\n")
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str) -> "WeightField":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        header = dict(kv.split("=") for kv in lines[0].split(","))
        d, n = int(header["d"]), int(header["n"])
        vals = np.zeros((n + 1,) * d)
        for line in lines[1:]:
            toks = line.split(",")
            idx = tuple(int(t) for t in toks[:d])
            vals[idx] = float(toks[d])
        return WeightField(d, n, vals)


def sample_field(alpha: float, d: int, n: int, seed: int, stream: int = 0) -> WeightField:
    """i.i.d. one-sided draws on the box."""
    shape = (n + 1,) * d
    draws = measures.sample(measures.mu(alpha), int(np.prod(shape)), seed, stream)
    return WeightField(d, n, draws.reshape(shape))


def last_passage(field: WeightField, v1, v2) -> float:
    """Maximal directed-path weight sum from v1 to v2, endpoints included."""
    v1 = tuple(int(c) for c in v1)
    v2 = tuple(int(c) for c in v2)
    if len(v1) != field.d or len(v2) != field.d:
        raise DomainError("endpoints must match the field dimension")
    if any(a > b for a, b in zip(v1, v2)):
        raise DomainError("endpoints must be coordinatewise ordered")
    x = field.values
    sub = x[tuple(slice(a, b + 1) for a, b in zip(v1, v2))]
    m = np.full(sub.shape, -np.inf)
    for idx in itertools.product(*(range(s) for s in sub.shape)):
        best = 0.0 if all(i == 0 for i in idx) else -np.inf
        for axis in range(field.d):
            if idx[axis] > 0:
                prev = idx[:axis] + (idx[axis] - 1,) + idx[axis + 1 :]
                best = max(best, m[prev])
        m[idx] = sub[idx] + best
    return float(m[tuple(s - 1 for s in sub.shape)])


def last_passage_batch_2d(fields: np.ndarray) -> np.ndarray:
    """Corner-to-corner passage times for a (replicas, n+1, n+1) stack.

    Same recurrence as `last_passage`, vectorized across replicas.
    """
    r, rows, cols = fields.shape
    m = np.empty_like(fields)
    m[:, 0, 0] = fields[:, 0, 0]
    for j in range(1, cols):
        m[:, 0, j] = m[:, 0, j - 1] + fields[:, 0, j]
    for i in range(1, rows):
        m[:, i, 0] = m[:, i - 1, 0] + fields[:, i, 0]
        for j in range(1, cols):
            m[:, i, j] = fields[:, i, j] + np.maximum(m[:, i - 1, j], m[:, i, j - 1])
    return m[:, -1, -1]


def enumerate_paths(v1, v2):
    """All directed paths between ordered lattice points (test oracle)."""
    v1, v2 = tuple(v1), tuple(v2)
    if v1 == v2:
        yield [v1]
        return
    for axis in range(len(v1)):
        if v1[axis] < v2[axis]:
            nxt = v1[:axis] + (v1[axis] + 1,) + v1[axis + 1 :]
            for tail in enumerate_paths(nxt, v2):
                yield [v1] + tail


def estimate_g(alpha: float, v, n: int, replicas: int, seed: int):
    """Monte Carlo estimate of E T_{0, floor(n v)} / n with standard error.

    Weights are i.i.d. one-sided draws with exponent alpha in (0, 1).
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("the last-passage regime needs alpha in (0, 1)")
    if replicas < 2:
        raise DomainError("need at least two replicas")
    v = tuple(float(c) for c in v)
    corner = tuple(int(math.floor(n * c)) for c in v)
    if any(c < 0 for c in corner):
        raise DomainError("direction must be non-negative")
    shape = tuple(c + 1 for c in corner)
    law = measures.mu(alpha)
    count = int(np.prod(shape))
    if len(shape) == 2:
        stack = np.empty((replicas,) + shape)
        for rep in range(replicas):
            stack[rep] = measures.sample(law, count, seed, stream=rep).reshape(shape)
        times = last_passage_batch_2d(stack) / n
    else:
        times = np.empty(replicas)
        for rep in range(replicas):
            vals = measures.sample(law, count, seed, stream=rep).reshape(shape)
            field = WeightField(len(shape), max(s - 1 for s in shape), _padded(vals, shape))
            times[rep] = last_passage(field, (0,) * len(shape), corner) / n
    mean = float(times.mean())
    stderr = float(times.std(ddof=1) / math.sqrt(replicas))
    return mean, stderr


def _padded(vals: np.ndarray, shape) -> np.ndarray:
    side = max(shape)
    out = np.zeros((side,) * len(shape))
    out[tuple(slice(0, s) for s in shape)] = vals
    return out


def additive_g(v) -> float:
    """Exactly superadditive reference shape g(v) = sum_i v_i."""
    return float(np.sum(np.asarray(v, dtype=float)))


class CachedShape:
    """Limit shape cached on a direction grid with multilinear interpolation.

    The deterministic-equivalent DP evaluates g O(n^(2d)) times, so Monte
    Carlo estimates are taken once per grid direction and interpolated.
    """

    def __init__(self, alpha: float, d: int, n_mc: int, replicas: int, seed: int, grid_points: int = 9):
        self.alpha = alpha
        self.d = d
        qs = np.linspace(0.0, 1.0, grid_points)
        self.qs = qs
        table = np.zeros((grid_points,) * d)
        for idx in itertools.product(range(grid_points), repeat=d):
            direction = tuple(qs[i] for i in idx)
            if all(c == 0 for c in direction):
                continue
            mean, _ = estimate_g(alpha, direction, n_mc, replicas, seed)
            table[idx] = mean
        self.table = table

    def __call__(self, v) -> float:
        v = np.asarray(v, dtype=float)
        if np.any(v < 0) or np.any(v > 1.0 + 1e-12):
            raise DomainError("cached shape covers directions in [0, 1]^d")
        pos = np.clip(v, 0.0, 1.0) * (len(self.qs) - 1)
        lo = np.minimum(pos.astype(int), len(self.qs) - 2)
        frac = pos - lo
        total = 0.0
        for corner in itertools.product((0, 1), repeat=self.d):
            weight = 1.0
            idx = []
            for axis, bit in enumerate(corner):
                weight *= frac[axis] if bit else 1.0 - frac[axis]
                idx.append(lo[axis] + bit)
            total += weight * self.table[tuple(idx)]
        return float(total)


def deterministic_equivalent_T(h: WeightField, g_eval, n: int | None = None) -> float:
    """Deterministic equivalent: best chain value of H^+ plus shape terms.

    M(v) = H_v^+ + max over coordinatewise-smaller u of (M(u) + g((v-u)/n)),
    chains implicitly starting at 0 and ending at (n,...,n), both collecting
    their H^+.  Always at least g(1,...,1).
    """
    n = h.n if n is None else n
    hp = np.maximum(h.values, 0.0)
    if h.d == 2:
        return _det_equiv_2d(hp, g_eval, n)
    shape = hp.shape
    m = np.full(shape, -np.inf)
    order = sorted(itertools.product(*(range(s) for s in shape)), key=sum)
    for idx in order:
        if all(i == 0 for i in idx):
            m[idx] = hp[idx]
            continue
        best = -np.inf
        for u in itertools.product(*(range(i + 1) for i in idx)):
            if u == idx:
                continue
            gap = tuple((a - b) / n for a, b in zip(idx, u))
            cand = m[u] + g_eval(gap)
            if cand > best:
                best = cand
        m[idx] = hp[idx] + best
    return float(m[tuple(s - 1 for s in shape)])


def _det_equiv_2d(hp: np.ndarray, g_eval, n: int) -> float:
    side = hp.shape[0]
    # increment table g((a, b)/n) for all lattice gaps
    gtab = np.zeros((side, side))
    for a in range(side):
        for b in range(side):
            if a == 0 and b == 0:
                continue
            gtab[a, b] = g_eval((a / n, b / n))
    m = np.full(hp.shape, -np.inf)
    m[0, 0] = hp[0, 0]
    for i in range(side):
        for j in range(side):
            if i == 0 and j == 0:
                continue
            window = m[: i + 1, : j + 1] + gtab[i::-1, j::-1]
            window[i, j] = -np.inf  # u = v is not a step
            m[i, j] = hp[i, j] + window.max()
    return float(m[-1, -1])


def rate_L_consistency(h: WeightField, g_eval, alpha: float, n: int | None = None) -> float:
    """Slack ||H^+||_alpha^alpha - (T_det(H) - g(1,...,1))^alpha.

    Non-negative under any superadditive shape; zero exactly for the
    single corner spike.
    """
    n = h.n if n is None else n
    t_det = deterministic_equivalent_T(h, g_eval, n)
    g11 = g_eval((1.0,) * h.d)
    hp = np.maximum(h.values, 0.0)
    norm = float(np.sum(hp**alpha))
    return norm - max(t_det - g11, 0.0) ** alpha
