import cmath
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quasibell.circle import CircleConfig, gram_g, rics
from quasibell.coherent_algebra import (
    CoherentSum,
    CoherentTerm,
    ContractViolation,
    ExactCount,
    ModePattern,
    NumericalRealityError,
    Projector,
    append_vacuum,
    apply_rotation,
    as_real,
    beam_split_50,
    beam_splitter,
    coherent,
    dilute,
    distance,
    inner,
    norm,
    overlap,
    pattern_expectation,
    permute_modes,
    reduced_matrix,
    tensor,
)

from .conftest import coherent_sums


class TestOverlap:
    def test_identical(self):
        assert overlap(0.7 - 0.3j, 0.7 - 0.3j) == pytest.approx(1, abs=1e-15)

    def test_vacuum(self):
        b = 1.2 + 0.5j
        assert overlap(0, b) == pytest.approx(math.exp(-abs(b) ** 2 / 2), abs=1e-15)

    def test_antipodal_matches_gram(self):
        # N=2, alpha0=1: g(1) = exp(1 * (e^{i pi} - 1)) = e^-2
        assert overlap(1, -1) == pytest.approx(math.exp(-2), abs=1e-15)
        assert gram_g(CircleConfig(2, 1), 1) == pytest.approx(math.exp(-2), abs=1e-15)

    @pytest.mark.parametrize("n,alpha", [(3, 0.8), (8, 2.0), (5, 1.3j)])
    def test_circle_points(self, n, alpha):
        cfg = CircleConfig(n, alpha)
        pts = cfg.points()
        for m in range(n):
            for k in range(n):
                assert abs(overlap(pts[m], pts[k]) - gram_g(cfg, m - k)) < 1e-14


class TestConstruction:
    def test_duplicates_merge(self):
        s = CoherentSum.from_terms(1, [(1, (0.5,)), (1, (0.5 + 1e-14,))])
        assert len(s) == 1
        assert inner(coherent(0.5), s) == pytest.approx(2, abs=1e-14)

    def test_zero_state_is_empty(self):
        s = coherent(0.3) - coherent(0.3)
        assert len(s) == 0
        assert norm(s) == 0

    def test_mode_mismatch(self):
        with pytest.raises(ContractViolation):
            inner(coherent(1.0), coherent(1.0, 0.0))

    def test_bad_term_length(self):
        with pytest.raises(ContractViolation):
            CoherentSum.from_terms(2, [CoherentTerm(1, (0.1,))])

    def test_immutable(self):
        s = coherent(1.0)
        with pytest.raises(AttributeError):
            s.modes = 3
        with pytest.raises(ValueError):
            s.coeffs[0] = 2

    def test_optional_prune(self):
        s = CoherentSum(1, [1, 1e-9], [[0.1], [0.9]], prune=1e-6)
        assert len(s) == 1

    @given(coherent_sums(), st.randoms(use_true_random=False))
    def test_permuted_duplicated_terms_are_canonical(self, s, rnd):
        terms = list(s.terms) * 2
        rnd.shuffle(terms)
        t = CoherentSum.from_terms(s.modes, terms)
        assert np.array_equal(t.amps, s.amps)
        assert distance(t, 2 * s) < 1e-12


class TestInvariants:
    @given(coherent_sums(modes=2), coherent_sums(modes=2))
    def test_hermitian_symmetry(self, x, y):
        assert abs(inner(x, y) - inner(y, x).conjugate()) < 1e-12

    @settings(max_examples=50)
    @given(coherent_sums(), st.integers(1, 9), st.integers(-20, 20))
    def test_rotation_unitary(self, s, n, power):
        r = apply_rotation(s, 0, n + 1, power)
        assert abs(norm(r) - norm(s)) < 1e-12 * max(1, norm(s))

    @given(coherent_sums(modes=2))
    def test_splitter_unitary(self, s):
        assert abs(norm(beam_split_50(s, 0, 1)) - norm(s)) < 1e-12 * max(1, norm(s))

    @given(coherent_sums(modes=2), st.integers(1, 4))
    def test_dilute_unitary(self, s, copies):
        assert abs(norm(dilute(s, 1, copies)) - norm(s)) < 1e-12 * max(1, norm(s))

    def test_reality_assertion_fails_loudly(self):
        with pytest.raises(NumericalRealityError):
            as_real(1 + 1e-6j)


class TestRotation:
    def test_power_zero_and_full_turn(self):
        cfg = CircleConfig(5, 1.1)
        s = rics(cfg, 2)
        assert distance(apply_rotation(s, 0, 5, 0), s) < 1e-15
        assert distance(apply_rotation(s, 0, 5, 5), s) < 1e-14

    @pytest.mark.parametrize("n,q", [(4, 1), (8, 5), (3, 2)])
    def test_rics_eigenphase(self, n, q):
        cfg = CircleConfig(n, 1.0)
        c = rics(cfg, q)
        expected = c * cmath.exp(-2j * math.pi * q / n)
        assert distance(apply_rotation(c, 0, n, 1), expected) < 1e-12

    def test_bad_mode(self):
        with pytest.raises(ContractViolation):
            apply_rotation(coherent(1.0), 1, 4, 1)


class TestSplitter:
    def test_identical_inputs_cancel_in_difference_port(self):
        b = 0.4 + 0.9j
        out = beam_split_50(coherent(b, b), 0, 1)
        assert np.allclose(out.amps[0].astype(complex), [0, math.sqrt(2) * b], atol=1e-15)

    def test_vacuum_second_port(self):
        b = 1.3
        out = beam_split_50(coherent(b, 0), 0, 1)
        assert np.allclose(out.amps[0].astype(complex), [b / math.sqrt(2)] * 2, atol=1e-15)

    def test_same_mode_rejected(self):
        with pytest.raises(ContractViolation):
            beam_split_50(coherent(1, 2), 1, 1)


def cascade_dilute(s, mode, copies):
    """Explicit splitter cascade against fresh vacuum ancillas, kept separate from ``dilute``."""
    out = append_vacuum(s, copies - 1)
    for step in range(1, copies):
        # keep (copies - step)/(copies - step + 1) of the remaining power
        theta = math.acos(math.sqrt((copies - step) / (copies - step + 1)))
        out = beam_splitter(out, mode, s.modes + step - 1, theta)
    return out


class TestDilute:
    def test_single_copy_is_identity(self):
        s = coherent(0.8, 1j)
        assert distance(dilute(s, 0, 1), s) == 0

    def test_two_copies(self):
        out = dilute(coherent(1.4 - 0.2j), 0, 2)
        a = (1.4 - 0.2j) / math.sqrt(2)
        assert np.allclose(out.amps[0].astype(complex), [a, a], atol=1e-15)

    @pytest.mark.parametrize("copies", [2, 3, 4, 5])
    def test_matches_cascade(self, rng, copies):
        s = CoherentSum(2, rng.normal(size=3), rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2)))
        assert distance(dilute(s, 1, copies), cascade_dilute(s, 1, copies)) < 1e-12

    def test_zero_copies(self):
        with pytest.raises(ContractViolation):
            dilute(coherent(1.0), 0, 0)


class TestPatterns:
    def test_all_identity(self):
        cfg = CircleConfig(4, 1.0)
        s = tensor(rics(cfg, 1), rics(cfg, 3))
        pat = ModePattern.of(Projector.IDENTITY, Projector.IDENTITY)
        assert pattern_expectation(s, pat) == pytest.approx(1, abs=1e-12)

    def test_vacuum_probability(self):
        b = 0.9 + 0.4j
        pat = ModePattern.of(Projector.VACUUM)
        assert pattern_expectation(coherent(b), pat) == pytest.approx(math.exp(-abs(b) ** 2), abs=1e-15)

    def test_nonvacuum_complements_vacuum(self):
        s = rics(CircleConfig(3, 0.4), 0)
        v = pattern_expectation(s, ModePattern.of(Projector.VACUUM))
        nv = pattern_expectation(s, ModePattern.of(Projector.NONVACUUM))
        assert v + nv == pytest.approx(1, abs=1e-12)

    def test_exact_counts_are_poisson(self):
        b = 1.1 - 0.3j
        mu = abs(b) ** 2
        for n in range(6):
            got = pattern_expectation(coherent(b), ModePattern.of(ExactCount(n)))
            assert got == pytest.approx(math.exp(-mu) * mu**n / math.factorial(n), rel=1e-13)

    def test_exact_count_completeness(self):
        b = 1.5
        cutoff = 40
        total = sum(pattern_expectation(coherent(b), ModePattern.of(ExactCount(n))) for n in range(cutoff + 1))
        tail_bound = (b**2) ** (cutoff + 1) / math.factorial(cutoff + 1) * 2
        assert abs(total - 1) < tail_bound + 1e-14

    def test_two_mode_exact_count_grid(self):
        cfg = CircleConfig(2, 0.7)
        s = tensor(rics(cfg, 0), rics(cfg, 1))
        total = sum(
            pattern_expectation(s, ModePattern.of(ExactCount(a), ExactCount(b)))
            for a in range(25)
            for b in range(25)
        )
        assert abs(total - 1) < 1e-12

    def test_length_mismatch(self):
        with pytest.raises(ContractViolation):
            pattern_expectation(coherent(1.0), ModePattern.of(Projector.VACUUM, Projector.VACUUM))


def test_permute_modes_roundtrip():
    s = coherent(0.1, 0.2, 0.3)
    t = permute_modes(permute_modes(s, [2, 0, 1]), [1, 2, 0])
    assert distance(s, t) == 0
    with pytest.raises(ContractViolation):
        permute_modes(s, [0, 0, 1])


def test_reduced_matrix_of_product_state():
    cfg = CircleConfig(3, 1.0)
    s = tensor(rics(cfg, 2), rics(cfg, 0))
    rho = reduced_matrix(s, 0, [rics(cfg, k) for k in range(3)])
    assert np.allclose(rho, np.diag([0, 0, 1]), atol=1e-12)
