"""Heavy-tailed Wigner ensembles: energy, sampling, spectra, norms.

An ensemble is parameterized by the tail exponent alpha and positive
coefficients (b, a1, a2) weighting diagonal, real off-diagonal and
imaginary off-diagonal parts in the matrix energy

    W_alpha(A) = b sum_i |A_ii|^alpha
                 + sum_{i<j} (a1 |Re A_ij|^alpha + a2 |Im A_ij|^alpha).

Entries of a sampled matrix scale the base symmetric law by coef^(-1/alpha),
so each draw flows through the transport-map sampler of `measures`.  With
``unit_variance`` the off-diagonal coefficients are derived from closed-form
moments so that E|X_12|^2 = 1.
"""

from __future__ import annotations

import io
from dataclasses import dataclass

import numpy as np

from . import measures
from .errors import DomainError
from .specmeasures import Measure1D

BETA_SYMMETRIC = 1
BETA_HERMITIAN = 2


@dataclass(frozen=True)
class WignerEnsemble:
    """Parameters of the heavy-tailed Wigner class."""

    alpha: float
    b: float = 1.0
    a1: float = 1.0
    a2: float = 1.0
    beta: int = BETA_SYMMETRIC
    unit_variance: bool = False

    def __post_init__(self):
        if not 0.0 < self.alpha <= 2.0:
            raise DomainError(f"alpha must lie in (0, 2], got {self.alpha}")
        if self.beta not in (BETA_SYMMETRIC, BETA_HERMITIAN):
            raise DomainError(f"beta must be 1 or 2, got {self.beta}")
        if self.unit_variance:
            m2 = measures.moment(measures.nu(self.alpha), 2)
            if self.beta == BETA_SYMMETRIC:
                # off-diagonal scale c with c^2 m2 = 1, i.e. a1 = c^-alpha
                a1 = m2 ** (self.alpha / 2.0)
                a2 = a1
            else:
                # real and imaginary parts carry variance 1/2 each
                a1 = (2.0 * m2) ** (self.alpha / 2.0)
                a2 = a1
            object.__setattr__(self, "a1", a1)
            object.__setattr__(self, "a2", a2)
            object.__setattr__(self, "b", a1)
        if self.b <= 0 or self.a1 <= 0:
            raise DomainError("b and a1 must be positive")
        if self.beta == BETA_HERMITIAN and self.a2 <= 0:
            raise DomainError("a2 must be positive for the Hermitian class")

    @property
    def diag_scale(self) -> float:
        return self.b ** (-1.0 / self.alpha)

    @property
    def offdiag_real_scale(self) -> float:
        return self.a1 ** (-1.0 / self.alpha)

    @property
    def offdiag_imag_scale(self) -> float:
        return self.a2 ** (-1.0 / self.alpha)


def unit_variance_ensemble(alpha: float, beta: int = BETA_SYMMETRIC) -> WignerEnsemble:
    return WignerEnsemble(alpha, beta=beta, unit_variance=True)


class HermitianMatrix:
    """Dense self-adjoint matrix; the lower triangle mirrors the upper one.

    The stored array is exactly self-adjoint by construction and read-only.
    Spectra are cached after the first request.
    """

    __slots__ = ("mat", "n", "beta", "_spectrum")

    def __init__(self, upper: np.ndarray):
        upper = np.asarray(upper)
        if upper.ndim != 2 or upper.shape[0] != upper.shape[1]:
            raise DomainError("need a square array")
        n = upper.shape[0]
        if np.iscomplexobj(upper):
            u = np.triu(upper, 1)
            full = u + u.conj().T + np.diag(np.real(np.diag(upper)))
            beta = BETA_HERMITIAN
        else:
            u = np.triu(upper, 1)
            full = u + u.T + np.diag(np.diag(upper).astype(float))
            beta = BETA_SYMMETRIC
        full.setflags(write=False)
        self.mat = full
        self.n = n
        self.beta = beta
        self._spectrum = None

    @staticmethod
    def from_dense(a: np.ndarray) -> "HermitianMatrix":
        """Wrap a dense array, symmetrizing from its upper triangle."""
        return HermitianMatrix(a)

    def __add__(self, other: "HermitianMatrix") -> "HermitianMatrix":
        return HermitianMatrix(self.mat + other.mat)

    def scale(self, t: float) -> "HermitianMatrix":
        return HermitianMatrix(self.mat * t)

    def spectrum(self) -> np.ndarray:
        """Ascending eigenvalues (dense self-adjoint solver)."""
        if self._spectrum is None:
            self._spectrum = np.linalg.eigvalsh(self.mat)
        return self._spectrum

    def largest_eig(self) -> float:
        return float(self.spectrum()[-1])

    def esm(self) -> Measure1D:
        """Empirical spectral measure: eigenvalue atoms, uniform weights."""
        return Measure1D.from_atoms(self.spectrum())

    def trace(self) -> float:
        return float(np.real(np.trace(self.mat)))

    def lp_norm(self, p: float) -> float:
        """Entrywise norm (sum_{i,j} |A_ij|^p)^(1/p)."""
        if p <= 0:
            raise DomainError("lp_norm needs p > 0")
        return float(np.sum(np.abs(self.mat) ** p) ** (1.0 / p))

    def schatten(self, q: float) -> float:
        """Eigenvalue norm (tr |A|^q)^(1/q) via the spectrum."""
        if q <= 0:
            raise DomainError("schatten needs q > 0")
        return float(np.sum(np.abs(self.spectrum()) ** q) ** (1.0 / q))

    def to_csv(self, ens: WignerEnsemble | None = None) -> str:
        """Row-major upper-triangle CSV with a one-line header (n, beta, alpha)."""
        alpha = ens.alpha if ens is not None else float("nan")
        buf = io.StringIO()
        buf.write(f"n={self.n},beta={self.beta},alpha={alpha!r}\n")
        for i in range(self.n):
            row = self.mat[i, i:]
            if self.beta == BETA_HERMITIAN:
                buf.write(",".join(repr(complex(v)) for v in row))
            else:
                buf.write(",".join(repr(float(v)) for v in row))
            buf.write("\n")
        return buf.getvalue()

    @staticmethod
    def from_csv(text: str) -> "HermitianMatrix":
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        header = dict(kv.split("=") for kv in lines[0].split(","))
        n = int(header["n"])
        beta = int(header["beta"])
        dtype = complex if beta == BETA_HERMITIAN else float
        upper = np.zeros((n, n), dtype=dtype)
        for i, line in enumerate(lines[1 : n + 1]):
            vals = [dtype(tok) for tok in line.split(",")]
            upper[i, i:] = vals
        return HermitianMatrix(upper)


def w_alpha_energy(a: HermitianMatrix, ens: WignerEnsemble) -> float:
    """Matrix energy W_alpha(A); homogeneous of degree alpha."""
    m = a.mat
    alpha = ens.alpha
    diag = ens.b * np.sum(np.abs(np.diag(m).real) ** alpha)
    iu = np.triu_indices(a.n, k=1)
    off = m[iu]
    total = diag + ens.a1 * np.sum(np.abs(off.real) ** alpha)
    if a.beta == BETA_HERMITIAN:
        total += ens.a2 * np.sum(np.abs(off.imag) ** alpha)
    return float(total)


def sample_wigner(ens: WignerEnsemble, n: int, seed: int, stream: int = 0) -> HermitianMatrix:
    """Draw from the ensemble: entry = coef^(-1/alpha) x (symmetric-law draw).

    Fill order is fixed (diagonal first, then the upper triangle row-major;
    imaginary parts from the following stream), so output is deterministic
    per (seed, n, stream).
    """
    if n < 1:
        raise DomainError(f"dimension must be >= 1, got {n}")
    law = measures.nu(ens.alpha)
    n_off = n * (n - 1) // 2
    draws = measures.sample(law, n + n_off, seed, stream=2 * stream)
    diag = ens.diag_scale * draws[:n]
    off_re = ens.offdiag_real_scale * draws[n:]
    if ens.beta == BETA_SYMMETRIC:
        upper = np.zeros((n, n))
        upper[np.diag_indices(n)] = diag
        upper[np.triu_indices(n, k=1)] = off_re
        return HermitianMatrix(upper)
    im_draws = measures.sample(law, n_off, seed, stream=2 * stream + 1)
    upper = np.zeros((n, n), dtype=complex)
    upper[np.diag_indices(n)] = diag
    upper[np.triu_indices(n, k=1)] = off_re + 1j * ens.offdiag_imag_scale * im_draws
    return HermitianMatrix(upper)


def spectrum(a: HermitianMatrix) -> np.ndarray:
    return a.spectrum()


def esm(a: HermitianMatrix) -> Measure1D:
    return a.esm()


def lp_norm(a: HermitianMatrix, p: float) -> float:
    return a.lp_norm(p)


def schatten(a: HermitianMatrix, q: float) -> float:
    return a.schatten(q)


def rho(x: float) -> float:
    """Largest-eigenvalue location of a rank-one additive deformation.

    x + 1/x beyond 1, pinned at the bulk edge 2 below; continuous,
    non-decreasing, 1-Lipschitz.
    """
    if x >= 1.0:
        return x + 1.0 / x
    return 2.0


def spike_matrix(n: int, theta: float) -> HermitianMatrix:
    """theta times the first coordinate projector."""
    upper = np.zeros((n, n))
    upper[0, 0] = theta
    return HermitianMatrix(upper)


def char_poly_coeffs(a: HermitianMatrix) -> np.ndarray:
    """Characteristic polynomial coefficients via Faddeev-LeVerrier.

    Returns [1, c_{n-1}, ..., c_0]; independent of any eigensolver, used as
    a test oracle for small matrices.
    """
    m = np.asarray(a.mat, dtype=complex)
    n = m.shape[0]
    coeffs = np.zeros(n + 1, dtype=complex)
    coeffs[0] = 1.0
    mk = np.eye(n, dtype=complex)
    for k in range(1, n + 1):
        mk = m @ mk
        ck = -np.trace(mk) / k
        coeffs[k] = ck
        mk += ck * np.eye(n)
    return coeffs
