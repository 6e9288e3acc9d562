import math

import numpy as np
import pytest

from qbs_sim import elements as el
from qbs_sim import experiment as qdc
from qbs_sim.states import H, V, Mode, MixedState, fidelity


def settings(**kw):
    return qdc.ExperimentSettings(**kw)


class TestBuildState:
    def test_alpha_zero_matches_eraser_checkpoint(self):
        for theta in np.linspace(0, 2 * math.pi, 9):
            state = qdc.build_qdc_state(settings(theta=float(theta)))
            assert fidelity(state, qdc.reference_after_erasers(float(theta))) > 1 - 1e-10

    def test_lower_arm_amplitude_before_erasers(self):
        # corroborative H paired with the lower-arm H mode carries i e^{i theta}/2
        for theta in (0.0, 0.9, math.pi):
            s = settings(theta=theta)
            pre = el.apply_all(qdc.test_side_circuit(s)[:3], qdc.bell_state())
            a = pre.amplitudes[(Mode("c", H), Mode("b", H))]
            expected = 0.5j * complex(math.cos(theta), math.sin(theta))
            assert a == pytest.approx(expected, abs=1e-12)

    def test_mixture_evolves_componentwise(self):
        state = qdc.build_qdc_state(settings(theta=1.3, input=qdc.INPUT_MIXTURE))
        assert isinstance(state, MixedState)
        assert len(state.components) == 2
        for w, comp in state.components:
            assert w == pytest.approx(0.5)
            assert abs(comp.norm_squared() - 1.0) < 1e-12

    def test_invalid_settings_rejected(self):
        with pytest.raises(ValueError):
            settings(basis="XY")
        with pytest.raises(ValueError):
            settings(input="thermal")


class TestCategoryProbability:
    def test_particle_limit_half_any_theta(self):
        for theta in np.linspace(0, 2 * math.pi, 25):
            p = qdc.category_probability(settings(theta=float(theta), alpha_deg=0.0))
            assert abs(p - 0.5) < 1e-12

    def test_wave_limit_peak(self):
        p = qdc.category_probability(settings(theta=0.0, alpha_deg=90.0))
        assert p == pytest.approx(1.0, abs=1e-12)

    def test_intermediate_point(self):
        p = qdc.category_probability(settings(theta=math.pi, alpha_deg=45.0))
        assert p == pytest.approx(0.25, abs=1e-12)

    def test_oracle_equivalence_grid(self):
        for theta in np.linspace(0, 2 * math.pi, 25):
            for alpha in np.linspace(0, 90, 13):
                p = qdc.category_probability(
                    settings(theta=float(theta), alpha_deg=float(alpha))
                )
                assert abs(p - qdc.closed_form_ia(float(theta), float(alpha))) < 1e-10

    def test_joint_partition_sums_to_one(self):
        for theta in np.linspace(0, 2 * math.pi, 7):
            for alpha in (0.0, 20.0, 45.0, 90.0):
                s = settings(theta=float(theta), alpha_deg=alpha)
                total = sum(
                    qdc.joint_probability(s, corr, grp)
                    for corr in qdc.CORROBORATIVE_DETECTORS
                    for grp in qdc.GROUPS
                )
                assert abs(total - 1.0) < 1e-12

    def test_xor_group_cross_term_cancellation(self):
        # within each eraser the open- and closed-path amplitudes interfere at
        # the individual detectors but the group sum is interference-free:
        # brute-force amplitude expansion vs the closed form
        theta, alpha = 1.234, 37.0
        s = settings(theta=theta, alpha_deg=alpha)
        state = qdc.build_qdc_state(s)
        per_path = {
            p: sum(
                abs(a) ** 2
                for (cm, tm), a in state.amplitudes.items()
                if cm.pol == H and tm.path == p
            )
            for p in qdc.TERMINAL_PATHS
        }
        group = per_path["b"] + per_path["b'"]
        assert group / 0.5 == pytest.approx(qdc.closed_form_ia(theta, alpha), abs=1e-12)
        # the individual detectors are *not* at half the group value: the
        # cancellation is a real feature of the XOR sum, not term-by-term
        assert abs(per_path["b"] - per_path["b'"]) > 1e-3


class TestClosedForm:
    def test_wave_peak(self):
        assert qdc.closed_form_ia(0.0, 90.0) == pytest.approx(1.0)

    def test_particle_flat(self):
        for theta in (0.0, math.pi / 2, math.pi):
            assert qdc.closed_form_ia(theta, 0.0) == pytest.approx(0.5)

    def test_direct_substitution(self):
        assert qdc.closed_form_ia(math.pi / 2, 60.0) == pytest.approx(0.5)


class TestComplementary:
    def test_opposite_group_vanishes_at_wave_peak(self):
        s = settings(theta=0.0, alpha_deg=90.0)
        assert qdc.category_probability(s, "D_H", qdc.GROUP_B) == pytest.approx(
            0.0, abs=1e-12
        )
        # the orthogonally gated subensemble is the particle-like one
        assert qdc.category_probability(s, "D_V", qdc.GROUP_A) == pytest.approx(
            0.5, abs=1e-12
        )

    def test_joint_categories_sum_to_group_marginal(self):
        s = settings(theta=0.7, alpha_deg=25.0)
        p_a = sum(
            abs(a) ** 2
            for (cm, tm), a in qdc.build_qdc_state(s).amplitudes.items()
            if tm.path in qdc.GROUP_PATHS[qdc.GROUP_A]
        )
        joint_sum = qdc.joint_probability(s, "D_H", qdc.GROUP_A) + qdc.joint_probability(
            s, "D_V", qdc.GROUP_A
        )
        assert joint_sum == pytest.approx(p_a, abs=1e-12)

    def test_complement_relation(self):
        s = settings(theta=2.2, alpha_deg=70.0)
        assert qdc.category_probability(s, "D_H", qdc.GROUP_B) == pytest.approx(
            1.0 - qdc.category_probability(s, "D_H", qdc.GROUP_A), abs=1e-12
        )
        assert qdc.complementary_probability(s, "D_H", qdc.GROUP_B) == pytest.approx(
            qdc.category_probability(s, "D_H", qdc.GROUP_B), abs=1e-12
        )


class TestSurfaces:
    thetas = np.linspace(0, 2 * math.pi, 9)
    alphas = np.linspace(0, 90, 7)

    def test_hv_surface_matches_oracle(self):
        surf = qdc.surface(settings(), self.thetas, self.alphas)
        for p in surf.points:
            assert abs(p.value - qdc.closed_form_ia(p.theta, p.alpha_deg)) < 1e-10

    def test_da_surface_is_hv_shifted_by_45(self):
        surf = qdc.surface(settings(basis=qdc.BASIS_DA), self.thetas, self.alphas)
        for p in surf.points:
            assert abs(p.value - qdc.closed_form_ia(p.theta, p.alpha_deg + 45.0)) < 1e-10

    def test_mixture_da_shows_no_analyzer_correlation(self):
        # dephased input analyzed in the diagonal frame: the correlation is
        # independent of the analyzer angle (only the residual single-photon
        # fringe of the closed-path component remains, mean 0.5 over theta)
        surf = qdc.surface(
            settings(basis=qdc.BASIS_DA, input=qdc.INPUT_MIXTURE),
            self.thetas,
            self.alphas,
        )
        for p in surf.points:
            expected = 0.25 + 0.5 * math.cos(p.theta / 2.0) ** 2
            assert abs(p.value - expected) < 1e-12
        mean = sum(p.value for p in surf.points) / len(surf.points)
        assert mean == pytest.approx(0.5, abs=0.05)

    def test_mixture_hv_matches_entangled_hv(self):
        # in the natural basis the dephased input is indistinguishable
        surf = qdc.surface(
            settings(input=qdc.INPUT_MIXTURE), self.thetas, self.alphas
        )
        for p in surf.points:
            assert abs(p.value - qdc.closed_form_ia(p.theta, p.alpha_deg)) < 1e-10


class TestDaEquivalenceForEntangledInput:
    def test_da_equals_corroborative_offset(self):
        # for the maximally entangled input, expressing the ensemble in the
        # diagonal frame is the same as offsetting the analyzer by 45 deg
        for theta in (0.0, 1.1, math.pi):
            for alpha in (0.0, 20.0, 45.0):
                da = qdc.build_qdc_state(
                    settings(theta=theta, alpha_deg=alpha, basis=qdc.BASIS_DA)
                )
                offset = qdc.build_qdc_state(
                    settings(theta=theta, alpha_deg=alpha + 45.0)
                )
                assert fidelity(da, offset) > 1 - 1e-10
