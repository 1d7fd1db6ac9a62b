"""Dense states and operators over small labelled Hilbert spaces.

Operators are plain complex ``numpy`` arrays of shape ``(d, d)`` whose rows and
columns follow the label order of the states they act on.  Observables are
stored in spectral form (:class:`SpectralObservable`), which is what every
probability rule downstream consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np

from .errors import (
    ConvergenceError,
    DimensionMismatch,
    DuplicateLabel,
    NotHermitian,
    NotOrthonormal,
    ZeroVector,
)

ALGEBRA_TOL = 1e-10


class LabelGroup(tuple):
    """Outcome label of a branch formed by merging several branches."""

    def __repr__(self):
        return "LabelGroup(" + ", ".join(repr(x) for x in self) + ")"


@dataclass(frozen=True, eq=False)
class State:
    """Normalized amplitude vector over an ordered set of basis labels."""

    labels: tuple
    amplitudes: np.ndarray

    @property
    def dimension(self) -> int:
        return len(self.labels)

    def index(self, label: Hashable) -> int:
        return self.labels.index(label)

    def __getitem__(self, label):
        return self.amplitudes[self.index(label)]

    def scaled(self, factor: complex) -> "State":
        """Multiply by a nonzero scalar and renormalize (changes only the global phase)."""
        return make_state(self.labels, self.amplitudes * factor)

    def apply(self, op: np.ndarray) -> np.ndarray:
        """Unnormalized vector ``op @ self``."""
        _check_operator(op, self.dimension)
        return op @ self.amplitudes


def make_state(labels: Sequence[Hashable], amplitudes: Iterable[complex]) -> State:
    labels = tuple(labels)
    if len(set(labels)) != len(labels):
        seen = set()
        dup = next(x for x in labels if x in seen or seen.add(x))
        raise DuplicateLabel(f"label {dup!r} appears more than once")
    vec = np.asarray(list(amplitudes), dtype=complex)
    if vec.ndim != 1 or vec.size != len(labels) or vec.size == 0:
        raise DimensionMismatch(
            f"{len(labels)} labels but amplitudes have shape {vec.shape}"
        )
    norm = np.linalg.norm(vec)
    if norm == 0.0:
        raise ZeroVector("all amplitudes are zero")
    vec = vec / norm
    vec.flags.writeable = False
    return State(labels, vec)


def basis_state(labels: Sequence[Hashable], which: Hashable) -> State:
    labels = tuple(labels)
    amps = np.zeros(len(labels), dtype=complex)
    amps[labels.index(which)] = 1.0
    return make_state(labels, amps)


def superposition(labels: Sequence[Hashable], components: dict) -> State:
    """State from a sparse ``{label: amplitude}`` mapping; missing labels get zero."""
    labels = tuple(labels)
    unknown = set(components) - set(labels)
    if unknown:
        raise DimensionMismatch(f"labels not in basis: {sorted(map(repr, unknown))}")
    return make_state(labels, [components.get(lab, 0.0) for lab in labels])


def _aligned(a: State, b: State) -> np.ndarray:
    """Amplitudes of ``b`` in the label order of ``a``."""
    if a.labels == b.labels:
        return b.amplitudes
    if set(a.labels) != set(b.labels) or a.dimension != b.dimension:
        raise DimensionMismatch("states are defined on different label sets")
    pos = {lab: i for i, lab in enumerate(b.labels)}
    return b.amplitudes[[pos[lab] for lab in a.labels]]


def inner(a: State, b: State) -> complex:
    """<a|b>, conjugate-linear in the first argument."""
    return complex(np.vdot(a.amplitudes, _aligned(a, b)))


def aligned_pair(a: State, b: State) -> tuple[np.ndarray, np.ndarray]:
    return a.amplitudes, _aligned(a, b)


def _check_operator(op: np.ndarray, dim: int | None = None) -> None:
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise DimensionMismatch(f"operator must be square, got shape {op.shape}")
    if dim is not None and op.shape[0] != dim:
        raise DimensionMismatch(f"operator acts on dimension {op.shape[0]}, expected {dim}")


def projector_from_states(states: Sequence[State], dimension: int | None = None,
                          tol: float = ALGEBRA_TOL) -> np.ndarray:
    """Sum of |s><s| over mutually orthonormal states."""
    states = list(states)
    if not states:
        if dimension is None:
            raise DimensionMismatch("dimension is required for an empty list of states")
        return np.zeros((dimension, dimension), dtype=complex)
    ref = states[0]
    if dimension is not None and ref.dimension != dimension:
        raise DimensionMismatch(f"states have dimension {ref.dimension}, expected {dimension}")
    vecs = np.array([_aligned(ref, s) for s in states])
    gram = vecs.conj() @ vecs.T
    if np.max(np.abs(gram - np.eye(len(states)))) > tol:
        raise NotOrthonormal("states are not mutually orthonormal")
    return vecs.T @ vecs.conj()


@dataclass(frozen=True, eq=False)
class SpectralObservable:
    """Observable in spectral form: eigenvalues with orthogonal projectors.

    ``projectors`` has shape ``(K, d, d)``.  ``labels`` name the outcomes; they
    default to the eigenvalues themselves.
    """

    eigenvalues: tuple
    projectors: np.ndarray
    labels: tuple = None
    check_tol: float = field(default=ALGEBRA_TOL, repr=False)

    def __post_init__(self):
        vals = tuple(float(c) for c in self.eigenvalues)
        projs = np.asarray(self.projectors, dtype=complex)
        object.__setattr__(self, "eigenvalues", vals)
        object.__setattr__(self, "projectors", projs)
        if self.labels is None:
            object.__setattr__(self, "labels", vals)
        else:
            object.__setattr__(self, "labels", tuple(self.labels))
        if projs.ndim != 3 or projs.shape[0] != len(vals) or projs.shape[1] != projs.shape[2]:
            raise DimensionMismatch(f"projector stack has shape {projs.shape} for {len(vals)} eigenvalues")
        if len(self.labels) != len(vals):
            raise DimensionMismatch("one label per branch is required")
        if len(vals) == 0:
            raise ValueError("an observable needs at least one branch")
        if any(b <= a for a, b in zip(vals, vals[1:])):
            raise ValueError("eigenvalues must be strictly increasing")
        if self.check_tol is not None:
            _check_projector_family(projs, self.check_tol)

    @property
    def dimension(self) -> int:
        return self.projectors.shape[1]

    @property
    def ranks(self) -> tuple:
        return tuple(int(round(np.trace(p).real)) for p in self.projectors)

    def __len__(self):
        return len(self.eigenvalues)

    def matrix(self) -> np.ndarray:
        return np.einsum("k,kij->ij", np.asarray(self.eigenvalues), self.projectors)

    def branch(self, label) -> int:
        return self.labels.index(label)


def _check_projector_family(projs: np.ndarray, tol: float) -> None:
    d = projs.shape[1]
    herm = np.max(np.abs(projs - projs.conj().transpose(0, 2, 1)))
    if herm > tol:
        raise NotHermitian(f"projector not Hermitian (deviation {herm:.3e})")
    prods = np.einsum("aij,bjk->abik", projs, projs)
    k = len(projs)
    expect = np.zeros_like(prods)
    expect[np.arange(k), np.arange(k)] = projs
    dev = np.max(np.abs(prods - expect))
    if dev > tol:
        raise NotOrthonormal(f"projectors are not orthogonal idempotents (deviation {dev:.3e})")
    dev = np.max(np.abs(projs.sum(axis=0) - np.eye(d)))
    if dev > tol:
        raise NotOrthonormal(f"projectors do not resolve the identity (deviation {dev:.3e})")


def default_tolerance(eigenvalues) -> float:
    """Scale-aware clustering tolerance, 1e-9 * (max|c| + 1)."""
    return 1e-9 * (float(np.max(np.abs(eigenvalues), initial=0.0)) + 1.0)


def cluster_eigenvalues(observable: SpectralObservable, resolution: float) -> SpectralObservable:
    """Merge branches whose eigenvalues are closer than ``resolution``.

    Single linkage on the sorted spectrum: neighbouring branches are merged
    while their gap is below ``resolution``.  A merged branch carries the
    rank-weighted mean eigenvalue, the summed projector and a
    :class:`LabelGroup` of the member labels.
    """
    if resolution < 0:
        raise ValueError("resolution must be non-negative")
    vals = observable.eigenvalues
    groups = [[0]]
    for k in range(1, len(vals)):
        if vals[k] - vals[k - 1] < resolution:
            groups[-1].append(k)
        else:
            groups.append([k])
    if len(groups) == len(vals):
        return observable
    ranks = observable.ranks
    new_vals, new_projs, new_labels = [], [], []
    for g in groups:
        if len(g) == 1:
            k = g[0]
            new_vals.append(vals[k])
            new_projs.append(observable.projectors[k])
            new_labels.append(observable.labels[k])
            continue
        w = np.array([ranks[k] for k in g], dtype=float)
        new_vals.append(float(np.dot(w, [vals[k] for k in g]) / w.sum()))
        new_projs.append(observable.projectors[g].sum(axis=0))
        members = []
        for k in g:
            lab = observable.labels[k]
            members.extend(lab if isinstance(lab, LabelGroup) else [lab])
        new_labels.append(LabelGroup(members))
    # Merged means can coincide with neighbours only in degenerate float cases.
    return SpectralObservable(tuple(new_vals), np.array(new_projs), tuple(new_labels),
                              check_tol=observable.check_tol)


def spectral_from_eigenpairs(values, vectors, labels=None, tol=None) -> SpectralObservable:
    """Build an observable from eigenvalues and orthonormal eigenvector columns.

    Rank-1 projectors are summed inside each cluster; no basis within a
    degenerate subspace is implied.
    """
    values = np.asarray(values, dtype=float)
    vectors = np.asarray(vectors, dtype=complex)
    order = np.argsort(values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    if labels is not None:
        labels = [labels[i] for i in order]
    tol = default_tolerance(values) if tol is None else tol
    # Exactly equal eigenvalues must be merged before the strict-ordering check.
    groups = [[0]]
    for k in range(1, len(values)):
        if values[k] - values[k - 1] < tol or values[k] == values[k - 1]:
            groups[-1].append(k)
        else:
            groups.append([k])
    vals, projs, labs = [], [], []
    for g in groups:
        v = vectors[:, g]
        vals.append(float(values[g].mean()))
        projs.append(v @ v.conj().T)
        if labels is None:
            labs.append(vals[-1])
        elif len(g) == 1:
            labs.append(labels[g[0]])
        else:
            labs.append(LabelGroup(labels[i] for i in g))
    return SpectralObservable(tuple(vals), np.array(projs), tuple(labs))


def diagonal_observable(values: Sequence[float], labels: Sequence[Hashable] | None = None,
                        tol: float | None = None) -> SpectralObservable:
    """Observable that is diagonal in the label basis.

    With ``labels`` given, each branch is named after the basis labels it
    projects onto (merged degenerate branches get a :class:`LabelGroup`).
    """
    d = len(values)
    return spectral_from_eigenpairs(values, np.eye(d, dtype=complex), labels=labels, tol=tol)


def _jacobi_eigh(a: np.ndarray, rel_tol: float, max_sweeps: int = 60):
    """Cyclic complex Jacobi; returns (eigenvalues, eigenvector columns)."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = np.linalg.norm(a)
    if n == 1 or scale == 0.0:
        return np.real(np.diag(a)).copy(), v
    target = rel_tol * scale
    for _ in range(max_sweeps):
        off = np.linalg.norm(a - np.diag(np.diag(a)))
        if off <= target:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app, aqq = a[p, p].real, a[q, q].real
                theta = (aqq - app) / (2.0 * mag)
                if abs(theta) > 1e150:
                    t = 0.5 / abs(theta)
                else:
                    t = 1.0 / (abs(theta) + np.sqrt(theta * theta + 1.0))
                if theta < 0.0:
                    t = -t
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # Phase rotation makes a[p, q] real, then a real Givens rotation zeroes it.
                g = np.array([[c, s], [-s * np.conj(phase), c * np.conj(phase)]], dtype=complex)
                idx = [p, q]
                a[:, idx] = a[:, idx] @ g
                a[idx, :] = g.conj().T @ a[idx, :]
                a[p, q] = a[q, p] = 0.0
                a[p, p] = a[p, p].real
                a[q, q] = a[q, q].real
                v[:, idx] = v[:, idx] @ g
    else:
        raise ConvergenceError(f"Jacobi iteration did not converge in {max_sweeps} sweeps")
    return np.real(np.diag(a)).copy(), v


def hermitian_eigendecomposition(op: np.ndarray, tol: float | None = None) -> SpectralObservable:
    """Spectral decomposition of a Hermitian matrix by cyclic Jacobi rotations.

    Eigenvalues closer than ``tol`` end up in one branch.  ``tol`` defaults to
    ``1e-9 * (max|c| + 1)``.
    """
    op = np.asarray(op, dtype=complex)
    _check_operator(op)
    herm_tol = tol if tol is not None else 1e-9 * (np.max(np.abs(op), initial=0.0) + 1.0)
    dev = np.max(np.abs(op - op.conj().T), initial=0.0)
    if dev > herm_tol:
        raise NotHermitian(f"matrix deviates from its adjoint by {dev:.3e}")
    hop = 0.5 * (op + op.conj().T)
    rel = 1e-14 if tol is None else min(tol, 1e-14)
    values, vectors = _jacobi_eigh(hop, rel)
    return spectral_from_eigenpairs(values, vectors, tol=tol)


def trivial_observable(dimension: int, value: float = 0.0) -> SpectralObservable:
    return SpectralObservable((value,), np.eye(dimension, dtype=complex)[None])
