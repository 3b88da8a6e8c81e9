"""Atomic measures on the line, spectral distances, and free convolution.

Everything spectral in the package flows through `Measure1D` (sorted atoms,
weights).  Distances between measures are evaluated through Stieltjes
transforms on a fixed contour above the real axis, through quantile-coupled
Wasserstein costs, or through the fractional-moment distance d_p for
exponents below 1.  Free convolution with the semicircle law is computed by
the subordination fixed point G(z) = g_nu(z - G(z)).
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import AccuracyError, ConvergenceError, DomainError

_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class Measure1D:
    """Discrete measure: strictly sorted atoms with matching weights.

    Probability measures carry non-negative weights summing to 1 (checked
    to 1e-12); signed measures (``probability=False``) reuse the same
    container with arbitrary weights.
    """

    atoms: np.ndarray
    weights: np.ndarray
    probability: bool = True

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        if atoms.ndim != 1 or atoms.shape != weights.shape:
            raise DomainError("atoms and weights must be matching 1-d arrays")
        if atoms.size == 0:
            raise DomainError("a measure needs at least one atom")
        if np.any(np.diff(atoms) <= 0):
            raise DomainError("atoms must be strictly sorted")
        if self.probability:
            if np.any(weights < 0):
                raise DomainError("probability weights must be non-negative")
            if abs(weights.sum() - 1.0) > 1e-12:
                raise DomainError("probability weights must sum to 1")
        atoms.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @staticmethod
    def from_atoms(atoms, weights=None, probability: bool = True) -> "Measure1D":
        """Build from unsorted atoms, merging exact duplicates."""
        atoms = np.asarray(atoms, dtype=float)
        if weights is None:
            weights = np.full(atoms.size, 1.0 / atoms.size)
        weights = np.asarray(weights, dtype=float)
        order = np.argsort(atoms, kind="stable")
        atoms, weights = atoms[order], weights[order]
        uniq, inverse = np.unique(atoms, return_inverse=True)
        merged = np.zeros(uniq.size)
        np.add.at(merged, inverse, weights)
        return Measure1D(uniq, merged, probability=probability)

    @staticmethod
    def dirac(x: float) -> "Measure1D":
        return Measure1D(np.array([float(x)]), np.array([1.0]))

    @property
    def total_variation(self) -> float:
        return float(np.sum(np.abs(self.weights)))

    def mean(self) -> float:
        return float(np.dot(self.atoms, self.weights))

    def moment(self, p: float) -> float:
        """p-th absolute moment (finite by construction)."""
        return float(np.dot(np.abs(self.atoms) ** p, self.weights))

    def dilate(self, t: float) -> "Measure1D":
        """Pushforward under x -> t x (t > 0)."""
        if t <= 0:
            raise DomainError("dilation factor must be positive")
        return Measure1D(self.atoms * t, self.weights, probability=self.probability)

    def to_csv(self) -> str:
        """Two-column CSV (atom, weight), '.' decimal separator."""
        buf = io.StringIO()
        buf.write("atom,weight\n")
        for a, w in zip(self.atoms, self.weights):
            buf.write(f"{float(a)!r},{float(w)!r}\n")
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str, probability: bool = True) -> "Measure1D":
        atoms, weights = [], []
        for line in text.strip().splitlines():
            line = line.strip()
            if not line or line.startswith(("atom", "#")):
                continue
            a, w = line.split(",")
            atoms.append(float(a))
            weights.append(float(w))
        return Measure1D.from_atoms(np.array(atoms), np.array(weights), probability)


@dataclass(frozen=True)
class StieltjesContour:
    """Evaluation nodes for the transform distance: Im >= 2, diameter <= 1."""

    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=complex)
        if nodes.size < 8:
            raise DomainError("a contour needs at least 8 nodes")
        if np.any(nodes.imag < 2.0):
            raise DomainError("every contour node needs Im z >= 2")
        span = np.abs(nodes[:, None] - nodes[None, :]).max()
        if span > 1.0 + 1e-12:
            raise DomainError("contour diameter must not exceed 1")
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)


def default_contour(count: int = 64) -> StieltjesContour:
    """Equispaced nodes on the segment {x + 2i : x in [0, 1]}."""
    return StieltjesContour(np.linspace(0.0, 1.0, count) + 2.0j)


def stieltjes(mu: Measure1D, z) -> np.ndarray:
    """g_mu(z) = sum_i w_i / (z - x_i) for Im z > 0."""
    z = np.asarray(z, dtype=complex)
    if np.any(z.imag <= 0):
        raise DomainError("Stieltjes transform needs Im z > 0")
    return (mu.weights[None, :] / (z.reshape(-1, 1) - mu.atoms[None, :])).sum(axis=1).reshape(z.shape)


def g_semicircle(z) -> np.ndarray:
    """Stieltjes transform of the semicircle law, branch with g ~ 1/z at inf.

    Defined off the open cut (-2, 2); real arguments with |z| >= 2 take the
    boundary values (g(2) = 1, g(-2) = -1).
    """
    z = np.asarray(z, dtype=complex)
    on_cut = (z.imag == 0) & (np.abs(z.real) < 2.0)
    if np.any(on_cut):
        raise DomainError("g_semicircle is undefined on the cut (-2, 2)")
    s = np.sqrt(z - 2.0) * np.sqrt(z + 2.0)
    # 2/(z+s) equals (z-s)/2 without cancellation at large |z|
    return 2.0 / (z + s)


def distance_d(mu: Measure1D, nu: Measure1D, contour: StieltjesContour | None = None) -> float:
    """sup over contour nodes of |g_mu - g_nu|."""
    contour = contour or default_contour()
    return float(np.max(np.abs(stieltjes(mu, contour.nodes) - stieltjes(nu, contour.nodes))))


def transform_distance(gvals_a, gvals_b) -> float:
    """Distance between two precomputed transform vectors on one contour."""
    return float(np.max(np.abs(np.asarray(gvals_a) - np.asarray(gvals_b))))


def _quantile_slices(mu: Measure1D, nu: Measure1D):
    """Common refinement of the two cumulative-weight partitions."""
    cum_a = np.cumsum(mu.weights)
    cum_b = np.cumsum(nu.weights)
    cuts = np.unique(np.concatenate([[0.0], cum_a, cum_b, [1.0]]))
    cuts = cuts[(cuts > 0.0) & (cuts <= 1.0)]
    mass = np.diff(np.concatenate([[0.0], cuts]))
    ia = np.searchsorted(cum_a, cuts - 1e-15)
    ib = np.searchsorted(cum_b, cuts - 1e-15)
    ia = np.minimum(ia, mu.atoms.size - 1)
    ib = np.minimum(ib, nu.atoms.size - 1)
    return mass, mu.atoms[ia], nu.atoms[ib]


def wasserstein_p(mu: Measure1D, nu: Measure1D, p: float) -> float:
    """L^p Wasserstein distance through the monotone (quantile) coupling.

    The quantile coupling is optimal in one dimension for p >= 1.
    """
    if p < 1:
        raise DomainError("wasserstein_p needs p >= 1; use distance_dp below 1")
    mass, xa, xb = _quantile_slices(mu, nu)
    cost = float(np.sum(mass * np.abs(xa - xb) ** p))
    return cost ** (1.0 / p)


def monotone_coupling_cost(mu: Measure1D, nu: Measure1D, p: float) -> float:
    """sum_i pi_i |x_i - y_i|^p under the quantile coupling (any p > 0)."""
    mass, xa, xb = _quantile_slices(mu, nu)
    return float(np.sum(mass * np.abs(xa - xb) ** p))


def _dp_diff(mu: Measure1D, nu: Measure1D, p: float):
    def diff(t):
        t = np.asarray(t, dtype=float)
        a = np.sum(
            mu.weights[None, :] * np.maximum(t[..., None] - mu.atoms[None, :], 0.0) ** p,
            axis=-1,
        )
        b = np.sum(
            nu.weights[None, :] * np.maximum(t[..., None] - nu.atoms[None, :], 0.0) ** p,
            axis=-1,
        )
        return a - b

    return diff


def _golden_max(fun, lo: float, hi: float, iters: int = 80) -> float:
    a, b = lo, hi
    c = b - _GOLD * (b - a)
    d = a + _GOLD * (b - a)
    fc, fd = fun(c), fun(d)
    for _ in range(iters):
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _GOLD * (b - a)
            fc = fun(c)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLD * (b - a)
            fd = fun(d)
        if b - a < 1e-13 * max(1.0, abs(a) + abs(b)):
            break
    return max(fc, fd)


def distance_dp(mu: Measure1D, nu: Measure1D, p: float, tol: float = 1e-9) -> float:
    """sup_t | int (t-x)_+^p dmu - int (t-x)_+^p dnu | for p in (0, 1).

    The difference is continuous, vanishes at -inf and +inf, and is smooth
    except for kinks at atoms, so the sup is searched per inter-atom
    interval (plus a tail window) by sampling and golden-section
    refinement, doubling the sampling density until stable to ``tol``.
    """
    if not 0.0 < p < 1.0:
        raise DomainError("distance_dp needs p in (0, 1)")
    diff = _dp_diff(mu, nu, p)
    absdiff = lambda t: float(np.abs(diff(np.atleast_1d(t)))[0])
    knots = np.unique(np.concatenate([mu.atoms, nu.atoms]))
    span = max(knots[-1] - knots[0], 1.0)
    segments = list(zip(knots[:-1], knots[1:]))
    segments.append((knots[-1], knots[-1] + 10.0 * span))

    def sweep(per_segment: int) -> float:
        best = float(np.max(np.abs(diff(knots))))
        for a, b in segments:
            ts = np.linspace(a, b, per_segment)
            vals = np.abs(diff(ts))
            k = int(np.argmax(vals))
            best = max(best, float(vals[k]))
            lo = ts[max(k - 1, 0)]
            hi = ts[min(k + 1, per_segment - 1)]
            best = max(best, _golden_max(absdiff, lo, hi))
        return best

    result = sweep(17)
    for per_segment in (33, 65, 129):
        refined = sweep(per_segment)
        if abs(refined - result) <= tol:
            return max(refined, result)
        result = refined
    return result


def cp_constant(p: float) -> float:
    """C_p = sqrt(pi) (p+1) Gamma((p+1)/2) / Gamma(1 + p/2) for p in (0, 1]."""
    if not 0.0 < p <= 1.0:
        raise DomainError("cp_constant needs p in (0, 1]")
    return math.sqrt(math.pi) * (p + 1.0) * math.gamma((p + 1.0) / 2.0) / math.gamma(1.0 + p / 2.0)


def frac_integral(sigma: Measure1D, alpha: float, t: float, side: str) -> float:
    """Fractional integral of order alpha+1 of an atomic signed measure.

    side "+": (1/Gamma(alpha+1)) sum_{x_i <= t} w_i (t - x_i)^alpha;
    side "-": same with (x_i - t)^alpha over x_i >= t.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("frac_integral needs alpha in (0, 1)")
    if side == "+":
        mask = sigma.atoms <= t
        gaps = t - sigma.atoms[mask]
    elif side == "-":
        mask = sigma.atoms >= t
        gaps = sigma.atoms[mask] - t
    else:
        raise DomainError("side must be '+' or '-'")
    return float(np.sum(sigma.weights[mask] * gaps**alpha) / math.gamma(alpha + 1.0))


def semicircle_measure(n_atoms: int = 2000, radius: float = 2.0) -> Measure1D:
    """Equal-mass quantile discretization of the semicircle law."""
    if n_atoms < 1:
        raise DomainError("need at least one atom")

    def cdf(x):
        x = min(max(x / (radius / 2.0), -2.0), 2.0)
        return 0.5 + x * math.sqrt(4.0 - x * x) / (4.0 * math.pi) + math.asin(x / 2.0) / math.pi

    qs = (np.arange(n_atoms) + 0.5) / n_atoms
    atoms = np.array([brentq(lambda x: cdf(x) - q, -radius, radius, xtol=1e-14) for q in qs])
    return Measure1D.from_atoms(atoms)


def freeconv_transform(nu: Measure1D, z_nodes, tol: float = 1e-12, max_iter: int = 100_000):
    """Subordination fixed point G(z) = g_nu(z - G(z)) at arbitrary Im z > 0.

    Damped iteration started at the semicircle transform; the damping is
    halved when the update oscillates.  Returns G with Im G < 0.
    """
    z = np.atleast_1d(np.asarray(z_nodes, dtype=complex))
    if np.any(z.imag <= 0):
        raise DomainError("fixed point needs Im z > 0")
    g = np.asarray(g_semicircle(z), dtype=complex).copy()
    theta = np.full(z.shape, 0.5)
    last_step = np.full(z.shape, np.inf)
    active = np.ones(z.shape, dtype=bool)
    for _ in range(max_iter):
        target = stieltjes(nu, z[active] - g[active])
        step = np.abs(target - g[active])
        # halve the damping on oscillation, let it recover otherwise
        theta_act = theta[active]
        osc = step > 1.25 * last_step[active]
        theta_act[osc] *= 0.5
        theta_act[~osc] = np.minimum(0.5, theta_act[~osc] * 1.02)
        theta[active] = theta_act
        g[active] = (1.0 - theta_act) * g[active] + theta_act * target
        last_step[active] = step
        done = step < tol
        sub = np.where(active)[0]
        active[sub[done]] = False
        if not active.any():
            break
    else:
        raise ConvergenceError("free convolution fixed point did not converge")
    # keep the physical branch
    if np.any(g.imag >= 0):
        raise AccuracyError("fixed point left the lower half plane")
    return g.reshape(np.shape(z_nodes))


def free_conv_semicircle(nu: Measure1D, eta: float, grid):
    """Semicircle free convolution: transform on grid + i eta and density.

    Returns (G, density) with density = -Im G / pi, the Stieltjes inversion
    at the working height eta.
    """
    if not 0.0 < eta <= 1.0:
        raise DomainError("eta must lie in (0, 1]")
    grid = np.asarray(grid, dtype=float)
    lo, hi = nu.atoms.min() - 3.0, nu.atoms.max() + 3.0
    if grid.min() > lo or grid.max() < hi:
        raise DomainError("grid must cover the support fattened by 3 per side")
    g = freeconv_transform(nu, grid + 1j * eta)
    return g, -g.imag / math.pi


def fixed_point_residual(nu: Measure1D, z_nodes, g) -> float:
    """max |G - g_nu(z - G)|, the defining-equation residual."""
    z = np.asarray(z_nodes, dtype=complex)
    return float(np.max(np.abs(g - stieltjes(nu, z - g))))
