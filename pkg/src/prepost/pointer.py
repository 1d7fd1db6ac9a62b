"""Von Neumann pointer simulation used as an independent check of the generalized ABL rule.

The system is coupled to a one-dimensional pointer whose position shifts by
``theta * c_k`` on branch k.  The pointer starts in a Gaussian amplitude

    g(x) = (2 pi sigma^2)^(-1/4) exp(-x^2 / (4 sigma^2)),

so the readout density |g|^2 has standard deviation ``sigma``.  Two pointer
amplitudes shifted by ``s`` overlap by exp(-s^2 / (8 sigma^2)).  This matches
neither Gaussian weight convention of
:func:`prepost.measurement.gaussian_resolution_measurement` exactly; the
quarter-variance weights with ``delta = sigma / theta`` are the closest, and
the two agree in the sharp and in the blurred limit.

Everything lives on a uniform grid.  Norms use the trapezoid rule; bin masses
integrate a cubic spline of the density so that bin edges need not fall on
grid points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import BasisNotOrthonormal, DimensionMismatch, GridTooCoarse, GridTooNarrow, IncompatibleSelection
from .hilbert import SpectralObservable, State, aligned_pair
from .measurement import DENOMINATOR_FLOOR, GeneralizedMeasurement, OutcomeDistribution

MARGIN_SIGMAS = 6.0
POINTS_PER_SIGMA = 50


@dataclass(frozen=True)
class PointerModel:
    sigma: float
    theta: float = 1.0
    grid_min: float = -1.0
    grid_max: float = 1.0
    grid_points: int = 2

    def __post_init__(self):
        if not self.sigma > 0:
            raise ValueError("pointer width sigma must be positive")
        if self.grid_points < 2:
            raise GridTooCoarse("a readout grid needs at least 2 points")
        if not self.grid_max > self.grid_min:
            raise GridTooNarrow("grid_max must exceed grid_min")

    @classmethod
    def for_observable(cls, observable: SpectralObservable, sigma: float, theta: float = 1.0,
                       refine: int = 1) -> "PointerModel":
        """Smallest grid satisfying the span and spacing rules, optionally refined.

        ``refine`` divides the spacing; refined grids contain the coarse grid.
        """
        centers = theta * np.asarray(observable.eigenvalues)
        lo = float(centers.min()) - MARGIN_SIGMAS * sigma
        hi = float(centers.max()) + MARGIN_SIGMAS * sigma
        intervals = math.ceil((hi - lo) / (sigma / POINTS_PER_SIGMA))
        return cls(sigma, theta, lo, hi, intervals * refine + 1)

    @property
    def spacing(self) -> float:
        return (self.grid_max - self.grid_min) / (self.grid_points - 1)

    def grid(self) -> np.ndarray:
        return np.linspace(self.grid_min, self.grid_max, self.grid_points)

    def centers(self, observable: SpectralObservable) -> np.ndarray:
        return self.theta * np.asarray(observable.eigenvalues)

    def check(self, observable: SpectralObservable) -> None:
        centers = self.centers(observable)
        reach = MARGIN_SIGMAS * self.sigma
        # Slack absorbs rounding in grid construction.
        slack = 1e-9 * max(1.0, abs(self.grid_min), abs(self.grid_max))
        if centers.min() - reach < self.grid_min - slack or centers.max() + reach > self.grid_max + slack:
            raise GridTooNarrow(
                f"grid [{self.grid_min:g}, {self.grid_max:g}] does not cover shifted centers "
                f"[{centers.min():g}, {centers.max():g}] by {MARGIN_SIGMAS:g} sigma"
            )
        if self.spacing > self.sigma / POINTS_PER_SIGMA * (1 + 1e-9):
            raise GridTooCoarse(
                f"grid spacing {self.spacing:.3e} exceeds sigma/{POINTS_PER_SIGMA} = "
                f"{self.sigma / POINTS_PER_SIGMA:.3e}"
            )


def pointer_amplitude(x: np.ndarray, sigma: float) -> np.ndarray:
    return (2.0 * np.pi * sigma * sigma) ** -0.25 * np.exp(-(x * x) / (4.0 * sigma * sigma))


def shifted_pointers(observable: SpectralObservable, model: PointerModel) -> np.ndarray:
    """Pointer amplitude for every branch on the grid, shape ``(K, N)``."""
    x = model.grid()
    return np.array([pointer_amplitude(x - c, model.sigma) for c in model.centers(observable)])


def trapezoid_weights(model: PointerModel) -> np.ndarray:
    w = np.full(model.grid_points, model.spacing)
    w[0] = w[-1] = 0.5 * model.spacing
    return w


@dataclass(frozen=True, eq=False)
class JointAmplitudeField:
    """System-vector amplitude at every pointer position, shape ``(d, N)``."""

    labels: tuple
    values: np.ndarray
    model: PointerModel

    def norm(self) -> float:
        dens = np.sum(np.abs(self.values) ** 2, axis=0)
        return float(np.sqrt(np.trapezoid(dens, dx=self.model.spacing)))


def couple(pre: State, observable: SpectralObservable, model: PointerModel) -> JointAmplitudeField:
    """Entangle the system with the pointer: sum_k (P_k psi) g(x - theta c_k)."""
    if pre.dimension != observable.dimension:
        raise DimensionMismatch("state and observable act on different dimensions")
    model.check(observable)
    branch_vecs = observable.projectors @ pre.amplitudes
    field = np.einsum("kd,kn->dn", branch_vecs, shifted_pointers(observable, model))
    return JointAmplitudeField(pre.labels, field, model)


def postselected_readout_density(field: JointAmplitudeField, post: State) -> np.ndarray:
    """Pointer position density conditioned on the post-selection, normalized on the grid."""
    if post.dimension != field.values.shape[0]:
        raise DimensionMismatch("post-selected state and field have different dimensions")
    ref = State(field.labels, np.zeros(len(field.labels), dtype=complex))
    _, phi = aligned_pair(ref, post)
    amp = phi.conj() @ field.values
    dens = (amp.conj() * amp).real
    total = float(np.trapezoid(dens, dx=field.model.spacing))
    if not total > DENOMINATOR_FLOOR:
        raise IncompatibleSelection(f"post-selected readout has vanishing weight ({total:.3e})")
    return dens / total


def _bin_edges(observable: SpectralObservable, model: PointerModel):
    """Interval of readout positions assigned to every branch.

    Each position goes to the nearest shifted center; branches sharing a
    center leave the whole interval to the smallest eigenvalue.
    """
    centers = model.centers(observable)
    order = sorted(range(len(centers)), key=lambda k: (centers[k], observable.eigenvalues[k]))
    owners, owner_centers = [], []
    for k in order:
        if owner_centers and centers[k] == owner_centers[-1]:
            continue
        owners.append(k)
        owner_centers.append(centers[k])
    edges = [model.grid_min]
    edges += [0.5 * (a + b) for a, b in zip(owner_centers, owner_centers[1:])]
    edges.append(model.grid_max)
    intervals = {k: (model.grid_min, model.grid_min) for k in range(len(centers))}
    for j, k in enumerate(owners):
        intervals[k] = (edges[j], edges[j + 1])
    return intervals


def bin_outcomes(density: np.ndarray, observable: SpectralObservable, model: PointerModel) -> OutcomeDistribution:
    """Integrate the readout density over each branch's bin."""
    spline = CubicSpline(model.grid(), density)
    intervals = _bin_edges(observable, model)
    mass = np.array([
        max(float(spline.integrate(*intervals[k])), 0.0) if intervals[k][1] > intervals[k][0] else 0.0
        for k in range(len(observable))
    ])
    return OutcomeDistribution(observable.labels, mass / mass.sum(), observable.eigenvalues)


def pointer_oracle(pre: State, post: State, observable: SpectralObservable, sigma: float,
                   theta: float = 1.0, refine: int = 1,
                   model: PointerModel | None = None) -> OutcomeDistribution:
    """Couple, post-select and bin in one call."""
    if model is None:
        model = PointerModel.for_observable(observable, sigma, theta, refine)
    field = couple(pre, observable, model)
    return bin_outcomes(postselected_readout_density(field, post), observable, model)


def _check_basis(basis: np.ndarray, w: np.ndarray, tol: float) -> None:
    gram = (basis.conj() * w) @ basis.T
    dev = np.max(np.abs(gram - np.eye(len(basis))), initial=0.0)
    if dev > tol:
        raise BasisNotOrthonormal(f"pointer basis deviates from orthonormality by {dev:.3e}")


def pointer_basis_coefficients(observable: SpectralObservable, model: PointerModel,
                               basis: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """rho[k, r] = <y_r | shifted pointer k>, by trapezoid quadrature.

    ``basis`` has shape ``(R, N)`` and must be orthonormal on the grid.
    """
    basis = np.asarray(basis)
    if basis.ndim != 2 or basis.shape[1] != model.grid_points:
        raise DimensionMismatch(f"basis must have shape (R, {model.grid_points})")
    w = trapezoid_weights(model)
    _check_basis(basis, w, tol)
    return (shifted_pointers(observable, model) * w) @ basis.conj().T


def induced_measurement(rho: np.ndarray, observable: SpectralObservable, labels=None) -> GeneralizedMeasurement:
    """Measurement operators F_r = sum_k rho[k, r] P_k."""
    rho = np.asarray(rho)
    if labels is None:
        labels = tuple(range(rho.shape[1]))
    ops = np.einsum("kr,kij->rij", rho, observable.projectors)
    return GeneralizedMeasurement(tuple(labels), ops)


def shifted_gaussian_basis(observable: SpectralObservable, model: PointerModel,
                           drop_tol: float = 1e-10) -> np.ndarray:
    """Weighted Gram-Schmidt of the shifted pointers, in branch order.

    Pointers already spanned by earlier ones are dropped, so coincident
    centers contribute one basis function.
    """
    w = trapezoid_weights(model)
    out = []
    for g in shifted_pointers(observable, model).astype(complex):
        v = g.copy()
        for _ in range(2):
            for b in out:
                v -= np.sum(b.conj() * w * v) * b
        n = math.sqrt(float(np.sum(w * np.abs(v) ** 2)))
        if n > drop_tol:
            out.append(v / n)
    return np.array(out)


def bin_gated_basis(observable: SpectralObservable, model: PointerModel):
    """One normalized function per non-empty readout bin.

    Each is the envelope sqrt(sum_k g_k^2) restricted to the bin.  Returns
    ``(labels, basis)``.
    """
    x = model.grid()
    w = trapezoid_weights(model)
    envelope = np.sqrt(np.sum(shifted_pointers(observable, model) ** 2, axis=0))
    intervals = _bin_edges(observable, model)
    centers = model.centers(observable)
    # Grid points take the same nearest-center owner as the bins.
    owner = np.full(model.grid_points, -1)
    for k, (lo, hi) in intervals.items():
        if hi > lo:
            owner[(x >= lo) & (x <= hi) & (owner < 0)] = k
    labels, basis = [], []
    for k in range(len(centers)):
        f = np.where(owner == k, envelope, 0.0)
        n = math.sqrt(float(np.sum(w * f * f)))
        if n > 0:
            labels.append(observable.labels[k])
            basis.append(f / n)
    return tuple(labels), np.array(basis)
