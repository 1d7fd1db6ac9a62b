"""Pre- and post-selected ensembles and their evolution to an intermediate time.

Units: hbar = 1, so a Hamiltonian in energy units E pairs with times in 1/E.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, TimeOutOfRange
from .hilbert import State, _aligned, _check_operator, hermitian_eigendecomposition, make_state

# Converts an energy-time product in eV*s to units of hbar.
HBAR_EV_S = 6.582119569e-16


@dataclass(frozen=True, eq=False)
class TwoTimeEnsemble:
    pre: State
    post: State
    t_i: float = 0.0
    t_f: float = 1.0
    hamiltonian: np.ndarray | None = None

    def __post_init__(self):
        if not self.t_i < self.t_f:
            raise TimeOutOfRange(f"need t_i < t_f, got {self.t_i} >= {self.t_f}")
        if self.pre.dimension != self.post.dimension or set(self.pre.labels) != set(self.post.labels):
            raise DimensionMismatch("pre- and post-selected states live on different spaces")
        if self.hamiltonian is not None:
            h = np.asarray(self.hamiltonian, dtype=complex)
            _check_operator(h, self.pre.dimension)
            object.__setattr__(self, "hamiltonian", h)


def propagator(hamiltonian: np.ndarray | None, dt: float, dimension: int | None = None) -> np.ndarray:
    """exp(-i H dt) from the spectral decomposition of H."""
    if hamiltonian is None:
        return np.eye(dimension, dtype=complex)
    spec = hermitian_eigendecomposition(hamiltonian)
    phases = np.exp(-1j * np.asarray(spec.eigenvalues) * dt)
    return np.einsum("k,kij->ij", phases, spec.projectors)


def _check_time(ens: TwoTimeEnsemble, t: float) -> None:
    if not ens.t_i <= t <= ens.t_f:
        raise TimeOutOfRange(f"t={t} outside [{ens.t_i}, {ens.t_f}]")


def evolve_forward(ens: TwoTimeEnsemble, t: float) -> State:
    """U(t, t_i)|pre>."""
    _check_time(ens, t)
    if ens.hamiltonian is None:
        return ens.pre
    u = propagator(ens.hamiltonian, t - ens.t_i)
    return make_state(ens.pre.labels, u @ ens.pre.amplitudes)


def evolve_backward(ens: TwoTimeEnsemble, t: float) -> State:
    """U(t_f, t)^dagger |post>, expressed in the label order of ``pre``."""
    _check_time(ens, t)
    post = make_state(ens.pre.labels, _aligned(ens.pre, ens.post))
    if ens.hamiltonian is None:
        return post
    u = propagator(ens.hamiltonian, ens.t_f - t)
    return make_state(post.labels, u.conj().T @ post.amplitudes)


def boundary_states_at(ens: TwoTimeEnsemble, t: float) -> tuple[State, State]:
    return evolve_forward(ens, t), evolve_backward(ens, t)
