import itertools

import numpy as np
import pytest

from prepost.errors import DimensionMismatch, IncompatibleSelection, InvalidQuantumNumber, NonPositiveDelta
from prepost.hilbert import LabelGroup, make_state
from prepost.measurement import PAPER_LITERAL, QUARTER_VARIANCE, gaussian_resolution_measurement, validate_measurement
from prepost.zeeman import (
    HydrogenBasis,
    build_spectrum,
    degeneracy,
    delta_e_from_field,
    energy,
    paradox_states,
    shell_probabilities,
    zeeman_abl,
    zeeman_generalized,
)


def random_hydrogen_state(rng, basis, n_support=None):
    amps = rng.normal(size=basis.dimension) + 1j * rng.normal(size=basis.dimension)
    if n_support is not None:
        amps = np.where([s[0] <= n_support for s in basis.states], amps, 0)
    return make_state(basis.states, amps)


def shell_grouped_abl(pre, post, n_max):
    """p(n) with the coherent sum over every (l, m) of a shell, written out."""
    w = {}
    for n in range(1, n_max + 1):
        amp = 0j
        for l in range(n):
            for m in range(-l, l + 1):
                i = pre.labels.index((n, l, m))
                amp += np.conj(post.amplitudes[i]) * pre.amplitudes[i]
        w[n] = abs(amp) ** 2
    total = sum(w.values())
    return {n: v / total for n, v in w.items()}


class TestLevels:
    def test_energy_values(self):
        assert energy(1) == -13.6
        assert energy(2) == -3.4
        assert energy(10) == pytest.approx(-0.136, abs=1e-15)

    def test_energy_monotone(self):
        e = [energy(n) for n in range(1, 50)]
        assert all(a < b < 0 for a, b in zip(e, e[1:]))

    def test_degeneracy_brute_force(self):
        for n in range(1, 11):
            count = sum(1 for l in range(n) for m in range(-l, l + 1))
            assert degeneracy(n) == count == n * n

    @pytest.mark.parametrize("bad", [0, -1, 1.5])
    def test_invalid(self, bad):
        with pytest.raises(InvalidQuantumNumber):
            energy(bad)
        with pytest.raises(InvalidQuantumNumber):
            degeneracy(bad)

    def test_field_conversion(self):
        assert delta_e_from_field(1.0) == pytest.approx(5.7883818060e-5)
        assert delta_e_from_field(2.0, 0.5) == pytest.approx(5.7883818060e-5)


class TestBasis:
    @pytest.mark.parametrize("n_max", range(1, 7))
    def test_dimension(self, n_max):
        assert HydrogenBasis(n_max).dimension == n_max * (n_max + 1) * (2 * n_max + 1) // 6

    def test_lexicographic(self):
        states = HydrogenBasis(3).states
        assert list(states) == sorted(states)
        assert states[:4] == ((1, 0, 0), (2, 0, 0), (2, 1, -1), (2, 1, 0))

    def test_outside_truncation(self):
        with pytest.raises(DimensionMismatch):
            HydrogenBasis(2).state({(3, 0, 0): 1})

    def test_invalid_label(self):
        with pytest.raises(InvalidQuantumNumber):
            HydrogenBasis(3).state({(2, 2, 0): 1})


class TestSpectrum:
    def test_single_level(self):
        s = build_spectrum(1, 0.0)
        assert len(s.levels) == 1
        lv = s.levels[0]
        assert lv.key == (1, 0) and lv.energy == -13.6 and lv.rank == 1

    def test_n_max_2(self):
        s = build_spectrum(2, 0.001)
        got = {lv.key: (lv.energy, lv.rank) for lv in s.levels}
        assert set(got) == {(1, 0), (2, -1), (2, 0), (2, 1)}
        assert got[(1, 0)] == (pytest.approx(-13.6), 1)
        assert got[(2, -1)] == (pytest.approx(-3.399, abs=1e-12), 1)
        assert got[(2, 0)] == (pytest.approx(-3.4), 2)
        assert got[(2, 1)] == (pytest.approx(-3.401, abs=1e-12), 1)

    def test_n_max_3_counts(self):
        s = build_spectrum(3, 0.01)
        assert len(s.levels) == 9
        assert sum(lv.rank for lv in s.levels) == 14

    @pytest.mark.parametrize("n_max", [1, 2, 3, 4, 5])
    def test_rank_bookkeeping_and_algebra(self, n_max):
        s = build_spectrum(n_max, 1e-3)
        for n in range(1, n_max + 1):
            ranks = {lv.m: lv.rank for lv in s.levels if lv.n == n}
            assert all(r == n - abs(m) for m, r in ranks.items())
            assert sum(ranks.values()) == n * n
        for a, b in itertools.product(s.levels, repeat=2):
            expected = a.projector if a is b else 0
            assert np.max(np.abs(a.projector @ b.projector - expected)) <= 1e-12
        total = sum(lv.projector for lv in s.levels)
        assert np.max(np.abs(total - np.eye(s.basis.dimension))) <= 1e-12

    def test_zero_field_collapses_to_shells(self):
        obs = build_spectrum(4, 0.0).observable()
        assert obs.eigenvalues == tuple(energy(n) for n in range(1, 5))
        assert obs.ranks == (1, 4, 9, 16)

    def test_resolution_clusters_multiplets(self):
        obs = build_spectrum(3, 1e-5).observable(resolution=1e-3)
        assert obs.ranks == (1, 4, 9)
        assert isinstance(obs.labels[1], LabelGroup)

    def test_negative_delta_e(self):
        with pytest.raises(ValueError):
            build_spectrum(2, -1.0)


class TestABL:
    def test_ground_state(self):
        b = HydrogenBasis(2)
        g = b.state({(1, 0, 0): 1})
        assert zeeman_abl(g, g, build_spectrum(2, 1e-3))[(1, 0)] == 1

    def test_cancellation_inside_projector(self):
        b = HydrogenBasis(2)
        pre = b.state({(2, 0, 0): 1, (2, 1, 0): 1})
        post = b.state({(2, 0, 0): 1, (2, 1, 0): -1})
        with pytest.raises(IncompatibleSelection):
            zeeman_abl(pre, post, build_spectrum(2, 1e-3))

    def test_paradox_split(self):
        b = HydrogenBasis(2)
        d = zeeman_abl(*paradox_states(b), build_spectrum(2, 1e-4))
        for key in [(1, 0), (2, 1), (2, -1)]:
            assert d[key] == pytest.approx(1 / 3, abs=1e-12)
        assert d[(2, 0)] == 0

    def test_paradox_degenerate(self):
        b = HydrogenBasis(2)
        shells = shell_probabilities(zeeman_abl(*paradox_states(b), build_spectrum(2, 0.0)))
        assert shells[1] == pytest.approx(1, abs=1e-15)
        assert shells[2] == pytest.approx(0, abs=1e-15)

    def test_zero_field_matches_shell_grouping(self, rng):
        b = HydrogenBasis(3)
        spec = build_spectrum(3, 0.0)
        for _ in range(100):
            pre, post = random_hydrogen_state(rng, b), random_hydrogen_state(rng, b)
            got = shell_probabilities(zeeman_abl(pre, post, spec))
            expected = shell_grouped_abl(pre, post, 3)
            for n in expected:
                assert got[n] == pytest.approx(expected[n], abs=1e-12)

    def test_truncation_monotone(self, rng):
        for _ in range(20):
            small = HydrogenBasis(2)
            pre2, post2 = random_hydrogen_state(rng, small), random_hydrogen_state(rng, small)
            ref = None
            for n_max in (2, 3, 4):
                b = HydrogenBasis(n_max)
                pre = b.state(dict(zip(small.states, pre2.amplitudes)))
                post = b.state(dict(zip(small.states, post2.amplitudes)))
                d = zeeman_abl(pre, post, build_spectrum(n_max, 1e-4)).as_dict()
                d = {k: v for k, v in d.items() if k[0] <= 2}
                if ref is None:
                    ref = d
                for k in ref:
                    assert d[k] == pytest.approx(ref[k], abs=1e-12)

    def test_wrong_basis(self, rng):
        pre = random_hydrogen_state(rng, HydrogenBasis(2))
        with pytest.raises(DimensionMismatch):
            zeeman_abl(pre, pre, build_spectrum(3, 1e-3))


class TestGeneralized:
    @pytest.mark.parametrize("n_max", [2, 3, 4])
    def test_family_complete(self, n_max):
        obs = build_spectrum(n_max, 1e-4).observable()
        for delta in np.geomspace(1e-6, 1.0, 13):
            for weights in ("half", "quarter"):
                meas = gaussian_resolution_measurement(obs, delta, weights)
                assert validate_measurement(meas, 1e-10).passed

    def test_sharp_limit(self, rng):
        b = HydrogenBasis(3)
        spec = build_spectrum(3, 1e-3)
        for _ in range(20):
            pre, post = random_hydrogen_state(rng, b), random_hydrogen_state(rng, b)
            np.testing.assert_allclose(zeeman_generalized(pre, post, spec, 1e-5).probabilities,
                                       zeeman_abl(pre, post, spec).probabilities, atol=1e-4)

    def test_blurred_limit(self, rng):
        b = HydrogenBasis(3)
        spec = build_spectrum(3, 1e-7)
        for _ in range(20):
            pre, post = random_hydrogen_state(rng, b), random_hydrogen_state(rng, b)
            got = shell_probabilities(zeeman_generalized(pre, post, spec, 1e-4))
            expected = shell_grouped_abl(pre, post, 3)
            for n in expected:
                assert got[n] == pytest.approx(expected[n], abs=1e-4)

    def test_paradox_sweep_rises(self):
        b = HydrogenBasis(2)
        pre, post = paradox_states(b)
        spec = build_spectrum(2, 1e-4)
        p = [zeeman_generalized(pre, post, spec, d)[(1, 0)] for d in np.geomspace(1e-6, 1e-2, 61)]
        assert p[0] == pytest.approx(1 / 3, abs=1e-3)
        assert p[-1] == pytest.approx(1, abs=1e-3)
        assert all(b >= a - 1e-12 for a, b in zip(p, p[1:]))

    def test_options(self):
        b = HydrogenBasis(2)
        pre, post = paradox_states(b)
        spec = build_spectrum(2, 1e-4)
        d = zeeman_generalized(pre, post, spec, 1e-4, PAPER_LITERAL, QUARTER_VARIANCE)
        assert d.probabilities.sum() == pytest.approx(1)
        with pytest.raises(NonPositiveDelta):
            zeeman_generalized(pre, post, spec, 0.0)
