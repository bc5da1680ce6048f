"""Network geometries and their tight-binding exciton Hamiltonians.

Two single-exciton trapping networks are supported:

* the *extended star*: ``N`` linear branches of ``L`` sites attached to a
  central core.  The core carries an absorbing trap (complex self-energy
  ``-i*trap_rate/2``) and each branch terminates in a tunable energy defect.
* the *asymmetric chain*: ``L + 1`` sites with the trap at one end, the
  defect at the other, and a single amplified bond ``hopping*sqrt(N)``
  next to the trap.

The chain is the rotation-symmetric sector of the star: conjugating the star
Hamiltonian with the discrete-rotation (Bloch) basis block-diagonalizes it,
and the block containing the core is exactly the chain Hamiltonian.  Both
networks therefore show identical absorption dynamics (without dephasing)
when the exciton starts uniformly delocalized over the defect sites.

Flat site ordering puts the trap at index 0 for both networks; star branch
sites follow branch-major, position-minor.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

__all__ = [
    "NetworkKind",
    "NetworkSpec",
    "Hamiltonian",
    "DensityMatrix",
    "BlochBasis",
    "build_hamiltonian",
    "initial_state",
    "star_to_chain",
]

CONFIG_KEYS = ("kind", "N", "L", "J", "delta", "gamma_trap", "eps0")


class NetworkKind(str, Enum):
    """Topology selector: extended star or its isomorphic asymmetric chain."""

    STAR = "star"
    CHAIN = "chain"


@dataclass(frozen=True)
class NetworkSpec:
    """Immutable description of one network.

    Parameters
    ----------
    kind : NetworkKind
        Topology; ``"star"`` or ``"chain"`` are accepted as strings.
    n_branches : int
        Number of branches ``N`` of the star.  Retained for the chain too,
        where it feeds the amplified ``J*sqrt(N)`` trap bond.
    length : int
        Sites per branch (star) or chain body length ``L``.
    hopping : float
        Nearest-neighbour amplitude ``J`` (energy reference, ``J = 1``).
    defect : float
        Energy shift on the defect site(s); may be zero or negative.
    trap_rate : float
        Absorption rate ``Gamma`` of the trap (``>= 0``).
    site_energy : float
        Uniform on-site energy; a global shift with no effect on populations.
    """

    kind: NetworkKind
    n_branches: int
    length: int
    hopping: float = 1.0
    defect: float = 0.0
    trap_rate: float = 0.1
    site_energy: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", NetworkKind(self.kind))
        if self.n_branches < 1 or int(self.n_branches) != self.n_branches:
            raise ValueError(f"n_branches must be a positive integer, got {self.n_branches}")
        if self.length < 1 or int(self.length) != self.length:
            raise ValueError(f"length must be a positive integer, got {self.length}")
        if self.hopping <= 0:
            raise ValueError(f"hopping must be positive, got {self.hopping}")
        if self.trap_rate < 0:
            raise ValueError(f"trap_rate must be non-negative, got {self.trap_rate}")

    @property
    def total_sites(self) -> int:
        """Number of sites: ``1 + N*L`` for the star, ``1 + L`` for the chain."""
        if self.kind is NetworkKind.STAR:
            return 1 + self.n_branches * self.length
        return 1 + self.length

    # -- flat indexing -----------------------------------------------------
    #
    # star : core (0,0) -> 0, branch site (b, s) -> 1 + (b-1)*L + (s-1)
    # chain: site s -> s (trap at 0)

    def site_index(self, b: int, s: int) -> int:
        """Flat index of star site ``(b, s)``; ``(0, 0)`` is the core."""
        if self.kind is not NetworkKind.STAR:
            raise ValueError("site_index(b, s) applies to star networks only")
        if (b, s) == (0, 0):
            return 0
        if not (1 <= b <= self.n_branches and 1 <= s <= self.length):
            raise IndexError(f"site ({b}, {s}) outside star with N={self.n_branches}, L={self.length}")
        return 1 + (b - 1) * self.length + (s - 1)

    def site_label(self, index: int) -> tuple[int, int]:
        """Inverse of :meth:`site_index` (star) / identity pair (chain)."""
        if not 0 <= index < self.total_sites:
            raise IndexError(f"flat index {index} outside 0..{self.total_sites - 1}")
        if self.kind is NetworkKind.CHAIN:
            return (0, index)
        if index == 0:
            return (0, 0)
        b, s = divmod(index - 1, self.length)
        return (b + 1, s + 1)

    @property
    def peripheral_indices(self) -> tuple[int, ...]:
        """Flat indices of the defect sites (branch tips, or the chain end)."""
        if self.kind is NetworkKind.STAR:
            return tuple(self.site_index(b, self.length) for b in range(1, self.n_branches + 1))
        return (self.length,)

    # -- flat key/value config ----------------------------------------------

    def to_config(self) -> str:
        """Serialize as a flat ``key = value`` block."""
        values = {
            "kind": self.kind.value,
            "N": self.n_branches,
            "L": self.length,
            "J": self.hopping,
            "delta": self.defect,
            "gamma_trap": self.trap_rate,
            "eps0": self.site_energy,
        }
        return "\n".join(f"{k} = {values[k]}" for k in CONFIG_KEYS) + "\n"

    @classmethod
    def from_config(cls, text: str) -> "NetworkSpec":
        """Parse the :meth:`to_config` format (``#`` comments allowed)."""
        pairs = parse_config(text)
        unknown = set(pairs) - set(CONFIG_KEYS)
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        missing = {"kind", "N", "L"} - set(pairs)
        if missing:
            raise ValueError(f"config is missing required keys: {sorted(missing)}")
        return cls(
            kind=NetworkKind(pairs["kind"]),
            n_branches=int(pairs["N"]),
            length=int(pairs["L"]),
            hopping=float(pairs.get("J", 1.0)),
            defect=float(pairs.get("delta", 0.0)),
            trap_rate=float(pairs.get("gamma_trap", 0.1)),
            site_energy=float(pairs.get("eps0", 0.0)),
        )


def parse_config(text: str) -> dict[str, str]:
    """Parse ``key = value`` lines into a string dict, skipping comments."""
    pairs: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        pairs[key] = value
    return pairs


@dataclass(frozen=True)
class Hamiltonian:
    """Complex-symmetric tight-binding matrix together with its network."""

    matrix: np.ndarray
    spec: NetworkSpec

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


@dataclass(frozen=True)
class DensityMatrix:
    """Site-basis density matrix with its network labeling.

    Hermitian by construction; the trace decays from 1 towards 0 as the
    trap absorbs population.
    """

    matrix: np.ndarray
    spec: NetworkSpec

    @property
    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def check(self, tol: float = 1e-8) -> None:
        """Raise if Hermiticity, trace bounds or positivity are violated."""
        dev = np.max(np.abs(self.matrix - self.matrix.conj().T))
        if dev > 1e-10:
            raise ValueError(f"density matrix not Hermitian: deviation {dev:.3e}")
        tr = np.trace(self.matrix)
        if abs(tr.imag) > tol or not -tol <= tr.real <= 1.0 + tol:
            raise ValueError(f"trace {tr} outside [0, 1]")
        lo = np.linalg.eigvalsh(0.5 * (self.matrix + self.matrix.conj().T)).min()
        if lo < -tol:
            raise ValueError(f"negative population: min eigenvalue {lo:.3e}")


def build_hamiltonian(spec: NetworkSpec) -> Hamiltonian:
    """Assemble the non-Hermitian tight-binding Hamiltonian of ``spec``.

    The only complex entry is the trap self-energy ``site_energy -
    i*trap_rate/2`` at flat index 0.  Star branch tips (chain end site)
    carry ``site_energy + defect``; all bonds are ``hopping`` except the
    chain's trap bond, which is ``hopping*sqrt(n_branches)``.
    """
    n = spec.total_sites
    h = np.zeros((n, n), dtype=complex)
    eps0, delta = spec.site_energy, spec.defect
    j = spec.hopping
    h[0, 0] = eps0 - 0.5j * spec.trap_rate
    if spec.kind is NetworkKind.STAR:
        for b in range(1, spec.n_branches + 1):
            for s in range(1, spec.length + 1):
                i = spec.site_index(b, s)
                h[i, i] = eps0 + (delta if s == spec.length else 0.0)
                if s == 1:
                    h[0, i] = h[i, 0] = j
                else:
                    prev = spec.site_index(b, s - 1)
                    h[prev, i] = h[i, prev] = j
    else:
        for s in range(1, spec.length + 1):
            h[s, s] = eps0 + (delta if s == spec.length else 0.0)
        for s in range(1, spec.length):
            h[s, s + 1] = h[s + 1, s] = j
        h[0, 1] = h[1, 0] = j * np.sqrt(spec.n_branches)
    return Hamiltonian(matrix=h, spec=spec)


def initial_state(spec: NetworkSpec) -> DensityMatrix:
    """Pure initial state on the defect site(s).

    Star: uniform delocalization ``sum_b |b,L> / sqrt(N)`` -- populations
    ``1/N`` on every branch tip and coherences ``1/N`` between them.
    Chain: exciton localized on the far end ``|L>``.
    """
    n = spec.total_sites
    psi = np.zeros(n, dtype=complex)
    tips = spec.peripheral_indices
    psi[list(tips)] = 1.0 / np.sqrt(len(tips))
    return DensityMatrix(matrix=np.outer(psi, psi.conj()), spec=spec)


def star_to_chain(spec: NetworkSpec) -> NetworkSpec:
    """Map a star onto the asymmetric chain with identical dynamics.

    The chain keeps ``L``, ``J``, ``delta``, ``trap_rate`` and ``eps0`` and
    inherits ``N`` through the amplified trap bond.  Starting from the
    uniform peripheral state, both networks produce the same absorption
    curve (exactly, in the absence of dephasing).
    """
    if spec.kind is not NetworkKind.STAR:
        raise ValueError(f"expected a star spec, got kind={spec.kind.value}")
    return replace(spec, kind=NetworkKind.CHAIN)


@dataclass(frozen=True)
class BlochBasis:
    """Discrete-rotation eigenbasis of the star.

    The star Hamiltonian is invariant under rotating the branches by
    ``theta = 2*pi/N``.  The Bloch states

        ``chi_s^(k) = sum_b exp(-i*k*b*theta) |b, s> / sqrt(N)``

    diagonalize that rotation; conjugating the Hamiltonian with them
    yields ``N`` decoupled blocks.  Only the ``k = N`` block contains the
    core (and hence the trap); it equals the asymmetric-chain Hamiltonian
    after relabeling.

    Attributes
    ----------
    spec : NetworkSpec
        The star this basis belongs to.
    matrix : np.ndarray
        Unitary with columns ``[core] + [chi_s^(k) for k in 1..N for s in 1..L]``.
    """

    spec: NetworkSpec
    matrix: np.ndarray = field(repr=False)

    @classmethod
    def for_star(cls, spec: NetworkSpec) -> "BlochBasis":
        if spec.kind is not NetworkKind.STAR:
            raise ValueError("Bloch basis is defined for star networks only")
        n_sites = spec.total_sites
        nn, ll = spec.n_branches, spec.length
        u = np.zeros((n_sites, n_sites), dtype=complex)
        u[0, 0] = 1.0
        theta = 2.0 * np.pi / nn
        for k in range(1, nn + 1):
            for s in range(1, ll + 1):
                col = cls._column(spec, k, s)
                for b in range(1, nn + 1):
                    u[spec.site_index(b, s), col] = np.exp(-1j * k * b * theta) / np.sqrt(nn)
        return cls(spec=spec, matrix=u)

    @staticmethod
    def _column(spec: NetworkSpec, k: int, s: int) -> int:
        return 1 + (k - 1) * spec.length + (s - 1)

    @property
    def theta(self) -> float:
        return 2.0 * np.pi / self.spec.n_branches

    def state(self, k: int, s: int) -> np.ndarray:
        """Coefficient vector of ``chi_s^(k)`` over flat star sites."""
        return self.matrix[:, self._column(self.spec, k, s)].copy()

    def block_indices(self, k: int) -> list[int]:
        """Rotated-basis columns of block ``k``; ``k = N`` includes the core."""
        if not 1 <= k <= self.spec.n_branches:
            raise IndexError(f"block index {k} outside 1..{self.spec.n_branches}")
        cols = [self._column(self.spec, k, s) for s in range(1, self.spec.length + 1)]
        if k == self.spec.n_branches:
            cols = [0] + cols
        return cols

    def transform(self, matrix: np.ndarray) -> np.ndarray:
        """Conjugate a site-basis operator into the Bloch basis (``U^H M U``)."""
        return self.matrix.conj().T @ matrix @ self.matrix

    def block(self, matrix: np.ndarray, k: int) -> np.ndarray:
        """Extract block ``k`` of a site-basis operator after rotation."""
        rotated = self.transform(matrix)
        idx = self.block_indices(k)
        return rotated[np.ix_(idx, idx)]
