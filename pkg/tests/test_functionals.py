import math

import numpy as np
import pytest

from charfront.datagen import (InitialProfile, constant_profile,
                               multi_bump_profile, single_jump_profile)
from charfront.errors import TailMismatch
from charfront.functionals import (boundary_terms, glimm_functional,
                                   hugoniot_decompose, l1_distance,
                                   lambda_hat, lyapunov_phi, phi_decay_audit,
                                   state_distance, viscosity_check)
from charfront.gas import FlowState, eigenvalues
from charfront.tracking import front_size, run, sample_initial_data
from charfront.waves import forward_curve


def contact_pair_profile(ref, gas, lo, hi, alpha2, b_scale):
    """Box perturbation made of two stationary contacts."""
    inner = FlowState(ref.u * math.exp(alpha2), ref.v * math.exp(alpha2),
                      ref.p, ref.b * b_scale, gas)
    return InitialProfile((lo, hi), (ref, inner, ref))


class TestGlimmFunctional:
    def test_empty(self, ref, tol, weights):
        sol = sample_initial_data(constant_profile(ref), 1e-2, tol)
        snap = glimm_functional(sol, weights)
        assert snap.v_total == snap.q_approach == snap.q_boundary == snap.g == 0.0

    def test_single_incident_1_front(self, ref, tol, weights):
        prof = single_jump_profile(ref, 1.0, 1, -0.03, tol)
        sol = sample_initial_data(prof, 0.1, tol)
        snap = glimm_functional(sol, weights)
        expected = weights.k_plus * 0.03
        assert snap.v_total == pytest.approx(expected, rel=1e-9)
        assert snap.q_boundary == pytest.approx(expected, rel=1e-9)
        assert snap.q_approach == 0.0
        assert snap.g == pytest.approx(
            expected + weights.kappa * expected, rel=1e-9)

    def test_single_3_front(self, ref, tol, weights):
        prof = single_jump_profile(ref, 1.0, 3, 0.03, tol)
        sol = sample_initial_data(prof, 0.1, tol)
        snap = glimm_functional(sol, weights)
        assert snap.v_total == pytest.approx(0.03, rel=1e-9)
        assert snap.q_approach == 0.0
        assert snap.q_boundary == 0.0


class TestHugoniotDecompose:
    def test_identity(self, ref, tol):
        dec = hugoniot_decompose(ref, ref, tol)
        assert dec.strengths == (0.0, 0.0, 0.0)
        lams = eigenvalues(ref)
        assert dec.speeds[0] == pytest.approx(lams[0], rel=1e-12)
        assert dec.speeds[2] == pytest.approx(lams[2], rel=1e-12)

    def test_pure_contact(self, gas, ref, tol):
        upper = FlowState(ref.u * math.exp(0.03), ref.v * math.exp(0.03),
                          ref.p, ref.b, gas)
        dec = hugoniot_decompose(ref, upper, tol)
        assert abs(dec.strengths[0]) < 1e-8
        assert dec.strengths[1] == pytest.approx(0.03, abs=1e-8)
        assert abs(dec.strengths[2]) < 1e-8
        assert dec.speeds[1] == 0.0

    def test_strength_state_equivalence(self, gas, ref, tol):
        rng = np.random.default_rng(17)
        ratios = []
        for _ in range(100):
            du, dv, dp, db = rng.uniform(-0.02, 0.02, size=4)
            upper = FlowState(ref.u * (1 + du), ref.u * dv,
                              ref.p * (1 + dp), ref.b * (1 + db), gas)
            dec = hugoniot_decompose(ref, upper, tol)
            dist = state_distance(ref, upper) + abs(ref.b - upper.b)
            if dist == 0.0:
                continue
            ratios.append(sum(abs(h) for h in dec.strengths) / dist)
        assert 0.1 <= min(ratios) and max(ratios) <= 10.0

    def test_roundtrip_against_forward_chain(self, gas, ref, tol):
        # both jump-curve branches compose back to the upper state
        upper = FlowState(ref.u * 1.01, 0.012, ref.p * 1.008,
                          ref.b * 1.004, gas)
        dec = hugoniot_decompose(ref, upper, tol)
        mid1, mid2 = dec.middle
        assert mid1.b == ref.b and mid2.b == upper.b
        assert mid2.p == pytest.approx(mid1.p, abs=1e-14)
        assert mid2.v / mid2.u == pytest.approx(mid1.v / mid1.u, abs=1e-12)


class TestLyapunovPhi:
    def test_identical_pair_vanishes(self, ref, tol, weights):
        prof = single_jump_profile(ref, 1.0, 3, 0.02, tol)
        a = sample_initial_data(prof, 1e-2, tol)
        b = sample_initial_data(prof, 1e-2, tol)
        snap = lyapunov_phi(a, b, weights)
        assert snap.phi == 0.0 and snap.l1 == 0.0

    def test_contact_box_hand_value(self, gas, ref, tol, weights):
        # constant solution against a two-contact box: the decomposition on
        # the box interval is the pure contact strength, the weight sees the
        # lower box contact as approaching, and nothing else contributes
        lo, hi, alpha2 = 1.0, 3.0, 0.02
        sol_u = sample_initial_data(constant_profile(ref), 1e-2, tol)
        sol_v = sample_initial_data(
            contact_pair_profile(ref, gas, lo, hi, alpha2, 1.0), 1e-2, tol)
        snap = lyapunov_phi(sol_u, sol_v, weights)
        s2 = alpha2  # no energy-constant jump in this box
        w2 = 1.0 + weights.kappa1 * s2
        expected = weights.c_a[1] * alpha2 * (hi - lo) * w2
        assert snap.phi == pytest.approx(expected, rel=1e-9)
        inner = sol_v.states[1]
        assert snap.l1 == pytest.approx(
            state_distance(ref, inner) * (hi - lo), rel=1e-9)
        assert 1.0 <= snap.w_min <= snap.w_max <= 2.0

    def test_tail_mismatch_rejected(self, gas, ref, tol, weights):
        shifted = FlowState(ref.u * 1.01, ref.v, ref.p, ref.b, gas)
        sol_u = sample_initial_data(constant_profile(ref), 1e-2, tol)
        sol_v = sample_initial_data(constant_profile(shifted), 1e-2, tol)
        with pytest.raises(TailMismatch):
            lyapunov_phi(sol_u, sol_v, weights)
        with pytest.raises(TailMismatch):
            l1_distance(sol_u, sol_v)

    def test_sandwich_on_random_pairs(self, ref, tol, weights):
        # single constant C1 works across the randomized suite
        ratios = []
        for seed in range(5):
            a = sample_initial_data(
                multi_bump_profile(ref, seed=seed, n_bumps=3, tv_target=0.03,
                                   window=6.0, tol=tol), 1e-3, tol)
            b = sample_initial_data(
                multi_bump_profile(ref, seed=seed + 50, n_bumps=3,
                                   tv_target=0.03, window=6.0, tol=tol),
                1e-3, tol)
            snap = lyapunov_phi(a, b, weights)
            assert snap.l1 == pytest.approx(l1_distance(a, b), rel=1e-12)
            ratios.append(snap.phi / snap.l1)
            assert 1.0 <= snap.w_min <= snap.w_max <= 2.0
        c1 = max(max(ratios), max(1.0 / r for r in ratios))
        assert c1 < 100.0


class TestBoundaryTerms:
    def test_equal_pair_is_zero(self, ref, tol, weights):
        sol = sample_initial_data(constant_profile(ref), 1e-2, tol)
        terms = boundary_terms(sol, sol, weights)
        assert terms == (0.0, 0.0, 0.0)

    def test_middle_term_vanishes_identically(self, gas, ref, tol, weights):
        sol_u = sample_initial_data(constant_profile(ref), 1e-2, tol)
        sol_v = sample_initial_data(
            contact_pair_profile(ref, gas, 0.5, 2.0, 0.015, 1.002), 1e-2, tol)
        terms = boundary_terms(sol_u, sol_v, weights)
        assert terms[1] == 0.0

    def test_case_one_pure_contact_wall_pair(self, gas, ref, tol, weights):
        # equal wall pressures with a pure entropy/speed jump: no 1-jump and
        # hence no 3-jump in the wall decomposition
        scaled = FlowState(ref.u * math.exp(0.02), ref.v, ref.p,
                           ref.b * 1.004, gas)
        sol_u = sample_initial_data(constant_profile(ref), 1e-2, tol)
        sol_v = sample_initial_data(constant_profile(scaled), 1e-2, tol)
        dec = hugoniot_decompose(sol_u.bottom, sol_v.bottom, tol)
        assert abs(dec.strengths[0]) < 1e-10
        assert abs(dec.strengths[2]) < 1e-10
        terms = boundary_terms(sol_u, sol_v, weights)
        assert abs(terms[0]) < 1e-9 and abs(terms[2]) < 1e-9

    def test_case_two_nonpositive_sum(self, gas, ref, tol, weights):
        # wall pair with a genuine 1-jump: the calibrated first-family
        # weight makes the boundary terms sum nonpositive
        rng = np.random.default_rng(23)
        seen_ratio = []
        sol_u = sample_initial_data(constant_profile(ref), 1e-2, tol)
        for _ in range(20):
            du, dv, db = rng.uniform(-0.02, 0.02, size=3)
            other = FlowState(ref.u * (1 + du), ref.u * dv, gas.p_bar,
                              ref.b * (1 + 0.2 * db), gas)
            sol_v = sample_initial_data(constant_profile(other), 1e-2, tol)
            dec = hugoniot_decompose(sol_u.bottom, sol_v.bottom, tol)
            h1, _, h3 = dec.strengths
            if abs(h1) < 1e-9:
                continue
            seen_ratio.append(abs(h3) / abs(h1))
            terms = boundary_terms(sol_u, sol_v, weights)
            assert terms[0] + terms[2] <= 0.0
        assert seen_ratio and max(seen_ratio) < 10.0


class TestPhiDecay:
    def test_identical_runs_trivially_pass(self, ref, tol, weights):
        prof = single_jump_profile(ref, 1.0, 3, 0.02, tol)
        a = sample_initial_data(prof, 1e-2, tol)
        b = sample_initial_data(prof, 1e-2, tol)
        report = phi_decay_audit(a, b, (0.0, 0.5, 1.0), weights)
        assert report.passed
        assert all(r.phi == 0.0 for r in report.rows)

    def test_constant_between_events(self, gas, ref, tol, weights):
        # single shock against its shifted copy: no events, weights frozen,
        # the pair functional stays constant along xi
        prof_a = single_jump_profile(ref, 1.0, 3, -0.02, tol)
        prof_b = single_jump_profile(ref, 1.2, 3, -0.02, tol)
        a = sample_initial_data(prof_a, 1e-2, tol)
        b = sample_initial_data(prof_b, 1e-2, tol)
        report = phi_decay_audit(a, b, (0.0, 0.2, 0.4), weights)
        phis = [r.phi for r in report.rows]
        assert phis[0] == pytest.approx(phis[1], rel=1e-12)
        assert phis[1] == pytest.approx(phis[2], rel=1e-12)

    def test_randomized_pair_decay(self, ref, tol, weights):
        a = sample_initial_data(
            multi_bump_profile(ref, seed=31, n_bumps=3, tv_target=0.03,
                               window=6.0, tol=tol), 1e-3, tol)
        b = sample_initial_data(
            multi_bump_profile(ref, seed=32, n_bumps=3, tv_target=0.03,
                               window=6.0, tol=tol), 1e-3, tol)
        report = phi_decay_audit(a, b, (0.0, 0.25, 0.5, 0.75, 1.0), weights)
        assert report.passed
        assert report.c2_observed <= 100.0


class TestViscosityCheck:
    def test_window_outside_domain_rejected(self, ref, tol, weights):
        from charfront.errors import OutOfDomain
        sol = sample_initial_data(constant_profile(ref), 1e-2, tol)
        with pytest.raises(OutOfDomain):
            viscosity_check(sol, 0.1, 0.3, 0.5, 0.05, weights, tol)

    def test_constant_solution_exact_zeros(self, ref, tol, weights):
        sol = sample_initial_data(constant_profile(ref), 1e-2, tol)
        i_sharp, i_flat = viscosity_check(sol, 0.1, 1.0, 0.8, 0.05,
                                          weights, tol)
        assert i_sharp == 0.0 and i_flat == 0.0

    def test_single_shock_matches_sharp_parametrix(self, ref, tol, weights):
        prof = single_jump_profile(ref, 1.0, 3, -0.03, tol)
        sol = sample_initial_data(prof, 1e-2, tol)
        sigma = sol.fronts[0].speed
        tau = 0.2
        zeta = 1.0 + sigma * tau
        i_sharp, _ = viscosity_check(sol, tau, zeta, 0.6, 0.04, weights, tol)
        assert i_sharp < 10 * sol.delta

    def test_smooth_window_quadratic_flat_bound(self, ref, tol, weights):
        prof = single_jump_profile(ref, 1.0, 3, 0.04, tol)
        sol = sample_initial_data(prof, 0.005, tol)
        tau = 0.1
        # fan occupies [1 + lam_lo*tau, 1 + lam_hi*tau]; center the window
        lam_lo = eigenvalues(sol.bottom)[2]
        zeta = 1.0 + lam_lo * tau + 0.02
        beta = 0.45
        i_sharp, i_flat = viscosity_check(sol, tau, zeta, beta, 0.02,
                                          weights, tol)
        run_at = run(sol, tau).final
        tv_local = sum(front_size(f) for f in run_at.fronts
                       if zeta - beta < f.position < zeta + beta)
        assert tv_local > 0
        assert i_flat <= 20.0 * tv_local ** 2
