"""Left/right eigendecomposition of general (non-normal) generators.

Shared machinery for exponentiating the dephasing Liouvillian, the reduced
star generator and classical rate matrices: one dense eigendecomposition,
then time evolution and scalar observables become plain exponential sums
that can be evaluated at arbitrary times.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

__all__ = ["NearDefective", "SpectralDecomposition", "ExponentialSum"]

# Left/right pairs with |<L|R>| below this fraction of ||L||*||R|| make the
# spectral sum numerically meaningless (near-defective generator).
PAIRING_TOL = 1e-10


class NearDefective(RuntimeError):
    """Eigenvector basis too ill-conditioned for a spectral propagator.

    Callers must fall back to direct time stepping.
    """


@dataclass(frozen=True)
class ExponentialSum:
    """Scalar function ``f(t) = sum_k amplitudes[k] * exp(rates[k] * t)``."""

    rates: np.ndarray
    amplitudes: np.ndarray

    def __call__(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        return np.exp(np.multiply.outer(t, self.rates)) @ self.amplitudes

    def real(self, t) -> np.ndarray:
        return np.real(self(t))


@dataclass(frozen=True)
class SpectralDecomposition:
    """Biorthogonal eigendecomposition ``A = right @ diag(eigenvalues) @ left``.

    ``right`` holds unit-norm right eigenvectors as columns; ``left`` holds
    the biorthogonal left eigenvectors as rows (``left @ right = identity``),
    so the spectral propagator needs no extra normalizers beyond ``norms``.
    """

    eigenvalues: np.ndarray
    right: np.ndarray = field(repr=False)
    left: np.ndarray = field(repr=False)
    norms: np.ndarray = field(repr=False)

    @classmethod
    def decompose(cls, matrix: np.ndarray) -> "SpectralDecomposition":
        """Diagonalize ``matrix``; raise :class:`NearDefective` when unsafe."""
        a = np.asarray(matrix, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValueError(f"expected a square matrix, got shape {a.shape}")
        eigenvalues, right = scipy.linalg.eig(a)
        try:
            left = np.linalg.solve(right, np.eye(a.shape[0], dtype=complex))
        except np.linalg.LinAlgError as err:
            raise NearDefective(f"singular eigenvector matrix: {err}") from err
        # Inversion forces <L_k|R_k> = 1; ill conditioning shows up as huge
        # left rows, which is the same pairing criterion rescaled.
        with np.errstate(over="ignore"):
            pair_scale = np.linalg.norm(left, axis=1) * np.linalg.norm(right, axis=0)
        if not np.all(np.isfinite(pair_scale)) or np.any(1.0 < PAIRING_TOL * pair_scale):
            raise NearDefective(
                f"eigenvector pairing below tolerance (worst scale {pair_scale.max():.3e})"
            )
        norms = np.einsum("ij,ji->i", left, right)
        return cls(eigenvalues=eigenvalues, right=right, left=left, norms=norms)

    @property
    def dim(self) -> int:
        return self.eigenvalues.shape[0]

    def weights(self, v0: np.ndarray) -> np.ndarray:
        """Mode weights ``<L_k|v0> / <L_k|R_k>`` of an initial vector."""
        return (self.left @ np.asarray(v0, dtype=complex)) / self.norms

    def propagate(self, v0: np.ndarray, times) -> np.ndarray:
        """Evaluate ``exp(A t) v0``; returns array of shape ``(len(times), dim)``."""
        times = np.atleast_1d(np.asarray(times, dtype=float))
        phases = np.exp(np.multiply.outer(times, self.eigenvalues))
        return (phases * self.weights(v0)) @ self.right.T

    def scalar(self, functional: np.ndarray, v0: np.ndarray) -> ExponentialSum:
        """Exponential sum for ``functional @ exp(A t) @ v0``."""
        coeffs = (np.asarray(functional, dtype=complex) @ self.right) * self.weights(v0)
        return ExponentialSum(rates=self.eigenvalues, amplitudes=coeffs)

    def reconstruction_error(self) -> float:
        """Max deviation of the completeness sum at ``t = 0`` from identity."""
        return float(np.max(np.abs(self.right @ self.left - np.eye(self.dim))))
