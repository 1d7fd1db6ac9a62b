"""Hydrogen levels without spin, with and without a weak Zeeman splitting.

States live on the abstract basis |n, l, m> truncated at ``n_max``; labels are
``(n, l, m)`` tuples in lexicographic order.  Energies are in eV.  The field
enters only through ``delta_e``, the shift per unit of m:

    c_{n,m} = -13.6 eV / n^2 - delta_e * m
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import DimensionMismatch, InvalidQuantumNumber
from .hilbert import LabelGroup, SpectralObservable, State, cluster_eigenvalues, make_state
from .measurement import (
    HALF_VARIANCE,
    KRAUS,
    OutcomeDistribution,
    abl,
    abl_generalized,
    gaussian_resolution_measurement,
)

RYDBERG_EV = 13.6
# Bohr magneton in eV/T (CODATA 2018); not part of the level model itself.
BOHR_MAGNETON_EV_PER_T = 5.7883818060e-5


def _check_n(n) -> int:
    if int(n) != n or n < 1:
        raise InvalidQuantumNumber(f"principal quantum number must be an integer >= 1, got {n!r}")
    return int(n)


def energy(n: int) -> float:
    return -RYDBERG_EV / _check_n(n) ** 2


def degeneracy(n: int) -> int:
    return _check_n(n) ** 2


def delta_e_from_field(b_tesla: float, epsilon: float = 1.0) -> float:
    """Zeeman shift per unit m, epsilon * mu_B * B, in eV."""
    return epsilon * BOHR_MAGNETON_EV_PER_T * b_tesla


@dataclass(frozen=True)
class HydrogenBasis:
    n_max: int

    def __post_init__(self):
        _check_n(self.n_max)

    @cached_property
    def states(self) -> tuple:
        return tuple(
            (n, l, m)
            for n in range(1, self.n_max + 1)
            for l in range(n)
            for m in range(-l, l + 1)
        )

    @property
    def dimension(self) -> int:
        return len(self.states)

    def state(self, components: dict) -> State:
        """State from ``{(n, l, m): amplitude}``; refuses labels outside the truncation."""
        for key in components:
            n, l, m = key
            if not (1 <= n and 0 <= l < n and abs(m) <= l):
                raise InvalidQuantumNumber(f"{key} is not a valid (n, l, m)")
            if n > self.n_max:
                raise DimensionMismatch(f"{key} lies outside the basis truncated at n_max={self.n_max}")
        return make_state(self.states, [components.get(s, 0.0) for s in self.states])


@dataclass(frozen=True, eq=False)
class ZeemanLevel:
    n: int
    m: int
    energy: float
    projector: np.ndarray

    @property
    def key(self) -> tuple:
        return (self.n, self.m)

    @property
    def rank(self) -> int:
        return int(round(np.trace(self.projector).real))


@dataclass(frozen=True, eq=False)
class ZeemanSpectrum:
    basis: HydrogenBasis
    delta_e: float
    levels: tuple

    @property
    def n_max(self) -> int:
        return self.basis.n_max

    def observable(self, resolution: float = 0.0) -> SpectralObservable:
        """Levels as an observable labelled by ``(n, m)``.

        Levels with identical energy share a branch labelled by a LabelGroup
        of their keys; at ``delta_e = 0`` that leaves one branch per shell.
        A positive ``resolution`` further merges levels closer than it.
        """
        order = sorted(self.levels, key=lambda lv: (lv.energy, lv.n, lv.m))
        groups = [[order[0]]]
        for lv in order[1:]:
            if lv.energy == groups[-1][-1].energy:
                groups[-1].append(lv)
            else:
                groups.append([lv])
        vals = tuple(g[0].energy for g in groups)
        projs = np.array([sum(lv.projector for lv in g) for g in groups])
        labels = tuple(g[0].key if len(g) == 1 else LabelGroup(lv.key for lv in g) for g in groups)
        return cluster_eigenvalues(SpectralObservable(vals, projs, labels), resolution)


def build_spectrum(n_max: int, delta_e: float) -> ZeemanSpectrum:
    """All (n, m) levels with P_{n,m} = sum_{l=|m|}^{n-1} |n,l,m><n,l,m|."""
    if delta_e < 0:
        raise ValueError("delta_e must be non-negative")
    basis = HydrogenBasis(n_max)
    index = {s: i for i, s in enumerate(basis.states)}
    d = basis.dimension
    levels = []
    for n in range(1, basis.n_max + 1):
        for m in range(-(n - 1), n):
            p = np.zeros((d, d), dtype=complex)
            for l in range(abs(m), n):
                i = index[(n, l, m)]
                p[i, i] = 1.0
            levels.append(ZeemanLevel(n, m, energy(n) - delta_e * m, p))
    return ZeemanSpectrum(basis, float(delta_e), tuple(levels))


def _check_states(pre: State, post: State, spectrum: ZeemanSpectrum) -> None:
    expected = set(spectrum.basis.states)
    for s in (pre, post):
        if set(s.labels) != expected:
            raise DimensionMismatch(
                f"state is not defined on the hydrogen basis truncated at n_max={spectrum.n_max}"
            )


def zeeman_abl(pre: State, post: State, spectrum: ZeemanSpectrum) -> OutcomeDistribution:
    _check_states(pre, post, spectrum)
    return abl(pre, post, spectrum.observable())


def zeeman_generalized(pre: State, post: State, spectrum: ZeemanSpectrum, delta: float,
                       convention: str = KRAUS,
                       weight_convention: str = HALF_VARIANCE) -> OutcomeDistribution:
    """Generalized ABL with Gaussian-resolution operators F_{n,m} of width ``delta`` (eV)."""
    _check_states(pre, post, spectrum)
    meas = gaussian_resolution_measurement(spectrum.observable(), delta, weight_convention)
    return abl_generalized(pre, post, meas, convention)


def shell_probabilities(dist: OutcomeDistribution) -> dict:
    """Total probability per principal quantum number."""
    out = {}
    for label, p in dist:
        keys = label if isinstance(label, LabelGroup) else (label,)
        n = keys[0][0]
        out[n] = out.get(n, 0.0) + p
    return out


def paradox_states(basis: HydrogenBasis) -> tuple[State, State]:
    """(|1,0,0> + |2,1,1> + |2,1,-1>)/sqrt3 and (|1,0,0> + |2,1,1> - |2,1,-1>)/sqrt3."""
    pre = basis.state({(1, 0, 0): 1, (2, 1, 1): 1, (2, 1, -1): 1})
    post = basis.state({(1, 0, 0): 1, (2, 1, 1): 1, (2, 1, -1): -1})
    return pre, post
