"""Hamiltonians and interaction schedule for a qubit coupled to a memory chain.

The computational qubit Q couples to one memory qubit at a time through an
excitation-exchange (SWAP) generator of strength ``omega``. Neighbouring memory
qubits exchange excitations with strength ``r * omega`` at all times along an
open chain. Times are measured in units of ``1/omega`` when ``omega = 1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .errors import ModelError
from .linalg import eig_hermitian, kron_all

KET0_BRA1 = np.array([[0, 1], [0, 0]], dtype=complex)  # |0><1|
KET1_BRA0 = KET0_BRA1.T.copy()  # |1><0|
NUMBER = np.array([[0, 0], [0, 1]], dtype=complex)  # |1><1|
IDENTITY2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class ModelParams:
    nu: float = 1.0
    n_memory: int = 3
    omega: float = 1.0
    r: float = 0.0
    delta_t: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.nu <= 1.0:
            raise ModelError(f"nu must lie in [0,1], got {self.nu}")
        if isinstance(self.n_memory, bool) or int(self.n_memory) != self.n_memory or self.n_memory < 1:
            raise ModelError(f"n_memory must be an integer >= 1, got {self.n_memory}")
        if not self.omega > 0:
            raise ModelError(f"omega must be > 0, got {self.omega}")
        if not self.r >= 0:
            raise ModelError(f"r must be >= 0, got {self.r}")
        if not self.delta_t > 0:
            raise ModelError(f"delta_t must be > 0, got {self.delta_t}")
        for name in ("nu", "omega", "r", "delta_t"):
            if not np.isfinite(getattr(self, name)):
                raise ModelError(f"{name} must be finite")

    @property
    def n_qubits(self) -> int:
        return self.n_memory + 1

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    @property
    def big_omega(self) -> float:
        """Memory-memory coupling strength."""
        return self.r * self.omega


def embed(n_qubits: int, ops: dict[int, np.ndarray]) -> np.ndarray:
    """Tensor single-qubit operators ``ops`` into the ``n_qubits`` register, identity elsewhere."""
    return kron_all([ops.get(q, IDENTITY2) for q in range(n_qubits)])


def swap_generator(n_qubits: int, a: int, b: int, strength: float) -> np.ndarray:
    """``i g (|0><1|_a |1><0|_b - |1><0|_a |0><1|_b)`` on the full register."""
    if strength == 0:
        return np.zeros((2 ** n_qubits,) * 2, dtype=complex)
    return 1j * strength * (
        embed(n_qubits, {a: KET0_BRA1, b: KET1_BRA0}) - embed(n_qubits, {a: KET1_BRA0, b: KET0_BRA1})
    )


def excitation_number(n_qubits: int) -> np.ndarray:
    diag = np.array([bin(i).count("1") for i in range(2 ** n_qubits)], dtype=float)
    return np.diag(diag).astype(complex)


def build_qm_hamiltonian(params: ModelParams, k: int) -> np.ndarray:
    """Q coupled to memory qubit ``k`` (1-based)."""
    if not 1 <= k <= params.n_memory:
        raise ModelError(f"memory index k={k} outside 1..{params.n_memory}")
    return swap_generator(params.n_qubits, 0, k, params.omega)


def build_mm_hamiltonian(params: ModelParams, l: int) -> np.ndarray:
    """Exchange between memory qubits ``l`` and ``l+1``."""
    if not 1 <= l <= params.n_memory - 1:
        raise ModelError(f"memory pair index l={l} outside 1..{params.n_memory - 1}")
    return swap_generator(params.n_qubits, l, l + 1, params.big_omega)


@dataclass(frozen=True, eq=False)
class HamiltonianSegment:
    active_pair: int
    h_total: np.ndarray = field(repr=False)

    @cached_property
    def spectrum(self) -> tuple[np.ndarray, np.ndarray]:
        return eig_hermitian(self.h_total)


# keyed on the couplings only: nu and delta_t do not enter the Hamiltonian
@lru_cache(maxsize=1024)
def _total_hamiltonian(n_memory: int, omega: float, r: float, active_k: int) -> HamiltonianSegment:
    params = ModelParams(n_memory=n_memory, omega=omega, r=r)
    h = build_qm_hamiltonian(params, active_k)
    for l in range(1, n_memory):
        h = h + build_mm_hamiltonian(params, l)
    h.setflags(write=False)
    return HamiltonianSegment(active_k, h)


def build_total_hamiltonian(params: ModelParams, active_k: int) -> HamiltonianSegment:
    if not 1 <= active_k <= params.n_memory:
        raise ModelError(f"active memory index {active_k} outside 1..{params.n_memory}")
    return _total_hamiltonian(int(params.n_memory), float(params.omega), float(params.r), active_k)


@dataclass(frozen=True, eq=False)
class Schedule:
    segments: tuple[tuple[float, HamiltonianSegment], ...]

    def __post_init__(self):
        for d, _ in self.segments:
            if not d > 0:
                raise ModelError(f"segment durations must be > 0, got {d}")

    def __len__(self):
        return len(self.segments)

    @property
    def durations(self) -> np.ndarray:
        return np.array([d for d, _ in self.segments])

    @property
    def boundaries(self) -> np.ndarray:
        """Segment start times followed by the final time."""
        return np.concatenate([[0.0], np.cumsum(self.durations)])

    @property
    def total_duration(self) -> float:
        return float(self.boundaries[-1])


def build_schedule(params: ModelParams, n_intervals: int | None = None) -> Schedule:
    """One fresh memory qubit per interval: segment j couples Q to memory qubit j."""
    n = params.n_memory if n_intervals is None else n_intervals
    if n < 1 or n > params.n_memory:
        raise ModelError(f"n_intervals={n} must lie in 1..n_memory={params.n_memory}")
    return Schedule(tuple((params.delta_t, build_total_hamiltonian(params, j)) for j in range(1, n + 1)))
