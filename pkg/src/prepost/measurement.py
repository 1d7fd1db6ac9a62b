"""Outcome probabilities for projective and generalized measurements.

Covers the Born rule, state update, and the ABL rule for a system with both
a pre-selected and a post-selected state, together with its generalization
to measurements described by operators F_r with sum F_r^dagger F_r = I.

Two conventions exist for the generalized ABL rule:

``"kraus"``
    p(r) ~ |<post| F_r |pre>|^2.  This is what a von Neumann pointer coupling
    followed by a readout in some pointer basis actually yields, and is the
    default.
``"paper-literal"``
    p(r) ~ |<post| F_r^dagger F_r |pre>|^2.

Both reduce to the projective ABL rule when every F_r is a projector.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    IncompatibleSelection,
    IncompleteMeasurement,
    NonPositiveDelta,
    ZeroProbabilityOutcome,
)
from .hilbert import SpectralObservable, State, aligned_pair, diagonal_observable, make_state

DENOMINATOR_FLOOR = 1e-300
COMPLETENESS_TOL = 1e-10

KRAUS = "kraus"
PAPER_LITERAL = "paper-literal"
CONVENTIONS = (KRAUS, PAPER_LITERAL)

HALF_VARIANCE = "half-variance"
QUARTER_VARIANCE = "quarter-variance"
_EXPONENT_ALIASES = {
    "half": HALF_VARIANCE,
    HALF_VARIANCE: HALF_VARIANCE,
    "quarter": QUARTER_VARIANCE,
    QUARTER_VARIANCE: QUARTER_VARIANCE,
}

THREE_LEVEL_LABELS = ("alpha", "beta", "gamma")


@dataclass(frozen=True, eq=False)
class OutcomeDistribution:
    labels: tuple
    probabilities: np.ndarray
    values: tuple | None = None

    def __getitem__(self, label) -> float:
        return float(self.probabilities[self.labels.index(label)])

    def __len__(self):
        return len(self.labels)

    def __iter__(self):
        return iter(zip(self.labels, self.probabilities.tolist()))

    def at_value(self, value: float, tol: float = 1e-9) -> float:
        """Probability of the outcome whose eigenvalue is within ``tol`` of ``value``."""
        if self.values is None:
            raise KeyError("distribution has no eigenvalues attached")
        for v, p in zip(self.values, self.probabilities):
            if abs(v - value) <= tol:
                return float(p)
        raise KeyError(f"no outcome with value {value}")

    def as_dict(self) -> dict:
        return dict(zip(self.labels, self.probabilities.tolist()))


@dataclass(frozen=True, eq=False)
class GeneralizedMeasurement:
    """Labelled family of measurement operators F_r, shape ``(R, d, d)``.

    Construction does not enforce completeness; use :func:`make_measurement`
    or :func:`validate_measurement` for that.
    """

    labels: tuple
    operators: np.ndarray
    values: tuple | None = None

    def __post_init__(self):
        ops = np.asarray(self.operators, dtype=complex)
        if ops.ndim != 3 or ops.shape[1] != ops.shape[2] or ops.shape[0] != len(self.labels):
            raise DimensionMismatch(f"operator stack has shape {ops.shape} for {len(self.labels)} labels")
        object.__setattr__(self, "operators", ops)
        object.__setattr__(self, "labels", tuple(self.labels))
        if self.values is not None:
            object.__setattr__(self, "values", tuple(float(v) for v in self.values))

    @property
    def dimension(self) -> int:
        return self.operators.shape[1]

    def effects(self) -> np.ndarray:
        """POVM elements F_r^dagger F_r."""
        return np.einsum("rji,rjk->rik", self.operators.conj(), self.operators)

    def operator(self, label) -> np.ndarray:
        return self.operators[self.labels.index(label)]


@dataclass(frozen=True)
class MeasurementReport:
    completeness_error: float
    min_eigenvalue: float
    tol: float
    passed: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(
            self, "passed",
            self.completeness_error <= self.tol and self.min_eigenvalue >= -self.tol,
        )


def validate_measurement(meas: GeneralizedMeasurement, tol: float = COMPLETENESS_TOL) -> MeasurementReport:
    """Check sum F^dagger F = I and positivity of every effect."""
    effects = meas.effects()
    deficit = effects.sum(axis=0) - np.eye(meas.dimension)
    herm = 0.5 * (effects + effects.conj().transpose(0, 2, 1))
    min_eig = float(np.min(np.linalg.eigvalsh(herm)))
    return MeasurementReport(float(np.max(np.abs(deficit))), min_eig, tol)


def make_measurement(labels: Sequence[Hashable], operators, values=None,
                     tol: float = COMPLETENESS_TOL) -> GeneralizedMeasurement:
    meas = GeneralizedMeasurement(tuple(labels), np.asarray(operators), values)
    report = validate_measurement(meas, tol)
    if not report.passed:
        raise IncompleteMeasurement(
            f"completeness error {report.completeness_error:.3e}, "
            f"min effect eigenvalue {report.min_eigenvalue:.3e} (tol {tol:g})"
        )
    return meas


def projective_measurement(observable: SpectralObservable) -> GeneralizedMeasurement:
    """Embed a projective measurement as F_k = P_k."""
    return GeneralizedMeasurement(observable.labels, observable.projectors, observable.eigenvalues)


def _check_dim(state: State, dim: int) -> None:
    if state.dimension != dim:
        raise DimensionMismatch(f"state has dimension {state.dimension}, operators act on {dim}")


def _squared_norms(ops: np.ndarray, state: State) -> np.ndarray:
    vecs = ops @ state.amplitudes
    return np.einsum("ri,ri->r", vecs.conj(), vecs).real


def born_projective(state: State, observable: SpectralObservable) -> OutcomeDistribution:
    """p_k = <psi|P_k|psi>, evaluated as ||P_k psi||^2."""
    _check_dim(state, observable.dimension)
    probs = _squared_norms(observable.projectors, state)
    return OutcomeDistribution(observable.labels, probs, observable.eigenvalues)


def born_generalized(state: State, meas: GeneralizedMeasurement) -> OutcomeDistribution:
    """p_r = ||F_r psi||^2."""
    _check_dim(state, meas.dimension)
    return OutcomeDistribution(meas.labels, _squared_norms(meas.operators, state), meas.values)


def _collapse(state: State, op: np.ndarray) -> State:
    vec = op @ state.amplitudes
    p = float(np.vdot(vec, vec).real)
    if p <= 0.0:
        raise ZeroProbabilityOutcome("outcome has zero probability for this state")
    return make_state(state.labels, vec / np.sqrt(p))


def collapse_projective(state: State, observable: SpectralObservable, outcome) -> State:
    _check_dim(state, observable.dimension)
    return _collapse(state, observable.projectors[observable.branch(outcome)])


def collapse_generalized(state: State, meas: GeneralizedMeasurement, outcome) -> State:
    _check_dim(state, meas.dimension)
    return _collapse(state, meas.operator(outcome))


def _rounding_bound(pre: State, post: State, ops: np.ndarray) -> np.ndarray:
    """Forward-error bound on every computed <post|O_r|pre>."""
    psi, phi = aligned_pair(pre, post)
    scale = np.abs(phi) @ (np.abs(ops) @ np.abs(psi)).T
    return 8.0 * ops.shape[1] * np.finfo(float).eps * scale


def _conditional(weights: np.ndarray, labels, values, noise=None) -> OutcomeDistribution:
    total = float(weights.sum())
    # Amplitudes that cancel exactly in real arithmetic leave rounding residue.
    if noise is not None and np.all(weights <= noise * noise):
        total = 0.0
    if not total > DENOMINATOR_FLOOR:
        raise IncompatibleSelection(
            "post-selected state is unreachable through every outcome "
            f"(denominator {total:.3e})"
        )
    return OutcomeDistribution(tuple(labels), weights / total, values)


def transition_amplitudes(pre: State, post: State, ops: np.ndarray) -> np.ndarray:
    """<post| O_r |pre> for every operator in the stack."""
    psi, phi = aligned_pair(pre, post)
    _check_dim(pre, ops.shape[1])
    return phi.conj() @ (ops @ psi).T


def abl(pre: State, post: State, observable: SpectralObservable) -> OutcomeDistribution:
    """Conditional outcome probabilities of an intermediate projective measurement.

    p(c_k) = |<post|P_k|pre>|^2 / sum_k' |<post|P_k'|pre>|^2

    Raises
    ------
    IncompatibleSelection
        If every amplitude vanishes: denominator below 1e-300, or every
        amplitude within rounding error of zero.
    """
    amps = transition_amplitudes(pre, post, observable.projectors)
    weights = (amps.conj() * amps).real
    noise = _rounding_bound(pre, post, observable.projectors)
    return _conditional(weights, observable.labels, observable.eigenvalues, noise)


def abl_generalized(pre: State, post: State, meas: GeneralizedMeasurement,
                    convention: str = KRAUS) -> OutcomeDistribution:
    """Conditional outcome probabilities of an intermediate generalized measurement."""
    if convention == KRAUS:
        ops = meas.operators
    elif convention == PAPER_LITERAL:
        ops = meas.effects()
    else:
        raise ValueError(f"unknown convention {convention!r}; expected one of {CONVENTIONS}")
    amps = transition_amplitudes(pre, post, ops)
    weights = (amps.conj() * amps).real
    return _conditional(weights, meas.labels, meas.values, _rounding_bound(pre, post, ops))


def normalize_exponent(name: str) -> str:
    try:
        return _EXPONENT_ALIASES[name]
    except KeyError:
        raise ValueError(f"unknown exponent convention {name!r}; expected 'half' or 'quarter'") from None


def gaussian_weights(eigenvalues, delta: float, weight_convention: str = HALF_VARIANCE) -> np.ndarray:
    """Overlap weights Z[k', k] between branch k' and outcome k."""
    if not delta > 0:
        raise NonPositiveDelta(f"resolution must be positive, got {delta}")
    denom = 2.0 if normalize_exponent(weight_convention) == HALF_VARIANCE else 4.0
    c = np.asarray(eigenvalues, dtype=float)
    # Dividing before squaring keeps tiny deltas from turning 0/0 into NaN.
    scaled = (c[:, None] - c[None, :]) / delta
    with np.errstate(over="ignore"):
        return np.exp(-scaled * scaled / denom)


def gaussian_resolution_measurement(observable: SpectralObservable, delta: float,
                                    weight_convention: str = HALF_VARIANCE,
                                    tol: float = COMPLETENESS_TOL) -> GeneralizedMeasurement:
    """Finite-resolution detector for ``observable``.

    One outcome per branch k, with

        F_k = sum_k' Z[k', k] / Z_k' * P_k',   Z_k' = sqrt(sum_k Z[k', k]^2),

    where Z[k', k] = exp(-(c_k' - c_k)^2 / (2 delta^2)) for ``"half-variance"``
    and exp(-(c_k' - c_k)^2 / (4 delta^2)) for ``"quarter-variance"``.  The
    quarter-variance weights reproduce the two-level cross weight
    zeta = exp(-eps^2 / (4 delta^2)) of :func:`zeta_family`.
    """
    z = gaussian_weights(observable.eigenvalues, delta, weight_convention)
    row_norm = np.sqrt(np.sum(z * z, axis=1))
    coeffs = z / row_norm[:, None]
    ops = np.einsum("pk,pij->kij", coeffs, observable.projectors)
    return make_measurement(observable.labels, ops, observable.eigenvalues, tol=tol)


def zeta_from_resolution(epsilon: float, delta: float) -> float:
    if not delta > 0:
        raise NonPositiveDelta(f"resolution must be positive, got {delta}")
    return float(np.exp(-(epsilon / delta) ** 2 / 4.0))


def zeta_family(zeta: float, labels: Sequence[Hashable] = THREE_LEVEL_LABELS) -> GeneralizedMeasurement:
    """Three-outcome measurement that blurs the two upper levels by ``zeta``.

    F_alpha = |a><a|, F_beta = (|b><b| + zeta |c><c|) / sqrt(1 + zeta^2),
    F_gamma = (zeta |b><b| + |c><c|) / sqrt(1 + zeta^2).
    zeta = 0 is the sharp measurement, zeta = 1 cannot tell beta from gamma.
    """
    if not 0.0 <= zeta <= 1.0:
        raise ValueError("zeta must lie in [0, 1]")
    n = 1.0 / np.sqrt(1.0 + zeta * zeta)
    ops = np.zeros((3, 3, 3), dtype=complex)
    ops[0, 0, 0] = 1.0
    ops[1, 1, 1], ops[1, 2, 2] = n, zeta * n
    ops[2, 1, 1], ops[2, 2, 2] = zeta * n, n
    return GeneralizedMeasurement(tuple(labels), ops)


def three_level_observable(epsilon: float, labels: Sequence[Hashable] = THREE_LEVEL_LABELS,
                           tol: float = 0.0) -> SpectralObservable:
    """C0 + epsilon*C1 with C0 = diag(-1, 1, 1) and C1 = diag(-1, 1, 2).

    At epsilon = 0 the upper two levels form one degenerate branch.  Only
    exactly equal eigenvalues are merged unless ``tol`` says otherwise.
    """
    return diagonal_observable([-1.0 - epsilon, 1.0 + epsilon, 1.0 + 2.0 * epsilon], labels, tol=tol)


def paradox_states(labels: Sequence[Hashable] = THREE_LEVEL_LABELS) -> tuple[State, State]:
    """Pre (a + b + c)/sqrt3 and post (a + b - c)/sqrt3."""
    return make_state(labels, [1, 1, 1]), make_state(labels, [1, 1, -1])
