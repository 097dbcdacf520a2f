from dataclasses import replace

import numpy as np
import pytest

from wptrelay import sim
from wptrelay.errors import DomainError, MechanismError, SimulationAbort, ValidationError
from wptrelay.mechanism import SOURCE
from wptrelay.sim import (
    DEFAULT_FIXED_POSITIONS, Placement, SimConfig, direct_outage_probability,
    generate_scenario, iter_trials, run_experiment, run_trial, trial_rng,
)
from wptrelay.valuation import hss_of_valuation

BASE = SimConfig(n_candidates=4, n_trials=400, seed=7)


def binomial_sigma(p, n):
    return np.sqrt(max(p * (1 - p), 1.0 / n) / n)


class TestRng:
    def test_deterministic(self):
        assert trial_rng(1, 2).random() == trial_rng(1, 2).random()

    def test_distinct_keys(self):
        draws = {trial_rng(s, t).random() for s in range(3) for t in range(50)}
        assert len(draws) == 150

    def test_streams_uncorrelated(self):
        a = np.array([trial_rng(0, t).standard_normal() for t in range(4000)])
        b = np.array([trial_rng(0, t + 1).standard_normal() for t in range(4000)])
        assert abs(np.corrcoef(a, b)[0, 1]) < 0.05


class TestConfig:
    @pytest.mark.parametrize("bad", [dict(n_candidates=-1), dict(gamma_scale=0), dict(n_trials=0),
                                     dict(alpha=1.5), dict(alpha=0.0), dict(a_r=0), dict(seed=-1)])
    def test_invalid(self, bad):
        with pytest.raises(ValidationError):
            replace(BASE, **bad)

    def test_placement_invalid(self):
        with pytest.raises(ValidationError):
            Placement(kind="disk", radius=1.0, inner_radius=1.0)
        with pytest.raises(ValidationError):
            Placement(kind="fixed")
        with pytest.raises(ValidationError):
            Placement(kind="ring")

    def test_too_many_for_fixed(self):
        with pytest.raises(ValidationError):
            SimConfig(n_candidates=5, placement=Placement("fixed", positions=DEFAULT_FIXED_POSITIONS))


class TestScenario:
    def test_no_candidates(self):
        s = generate_scenario(replace(BASE, n_candidates=0), trial_rng(0, 0))
        assert s.n == 0 and s.h_s > 0
        assert s.p_s == pytest.approx(BASE.budget.snr_noise_product / s.h_s)

    def test_invariants(self):
        for t in range(50):
            s = generate_scenario(BASE, trial_rng(3, t))
            assert s.h_s > 0 and np.all(s.h_si > 0) and np.all(s.h_i > 0)
            assert np.all(s.valuations > s.p_si)
            assert len(s.models) == len(s.q) == len(s.p_i) == 4
            for j, m in enumerate(s.models):
                # the model's fading variable is exactly the candidate-AP fading
                h_pl = s.h_i[j] / hss_of_valuation(m, s.valuations[j])
                assert h_pl == pytest.approx(
                    10 ** (-2.5 * np.log10(max(np.hypot(*s.q[j]), 1.0))), rel=1e-9)

    def test_positions_inside_disk(self):
        pl = BASE.placement
        for t in range(200):
            q = generate_scenario(BASE, trial_rng(1, t)).q
            r = np.hypot(q[:, 0] - pl.center[0], q[:, 1] - pl.center[1])
            assert np.all(r <= pl.radius + 1e-12)

    def test_disk_placement_is_uniform(self):
        cfg = replace(BASE, n_candidates=10)
        pts = np.vstack([generate_scenario(cfg, trial_rng(2, t)).q for t in range(2000)])
        r2 = ((pts[:, 0] - cfg.placement.center[0]) ** 2 + pts[:, 1] ** 2) / cfg.placement.radius ** 2
        # r^2 / R^2 is uniform on [0, 1] for area-uniform points
        assert abs(r2.mean() - 0.5) < 4 * np.sqrt(1 / 12 / len(r2))
        assert abs(np.mean(pts[:, 1] > 0) - 0.5) < 4 * 0.5 / np.sqrt(len(r2))

    def test_annulus(self):
        cfg = replace(BASE, placement=Placement("disk", (4.0, 0.0), 3.0, 2.0))
        for t in range(100):
            q = generate_scenario(cfg, trial_rng(0, t)).q
            r = np.hypot(q[:, 0] - 4.0, q[:, 1])
            assert np.all((r >= 2.0 - 1e-12) & (r <= 3.0 + 1e-12))

    def test_fixed_placement(self):
        cfg = replace(BASE, placement=Placement("fixed", positions=DEFAULT_FIXED_POSITIONS))
        s = generate_scenario(cfg, trial_rng(0, 0))
        np.testing.assert_array_equal(s.q, np.array(DEFAULT_FIXED_POSITIONS))

    def test_prefix_property(self):
        small = generate_scenario(replace(BASE, n_candidates=2), trial_rng(9, 4))
        big = generate_scenario(replace(BASE, n_candidates=6), trial_rng(9, 4))
        assert small.h_s == big.h_s
        np.testing.assert_array_equal(small.valuations, big.valuations[:2])

    def test_vanishing_fading_is_deterministic(self):
        cfg = replace(BASE, gamma_scale=1e-12,
                      placement=Placement("fixed", positions=DEFAULT_FIXED_POSITIONS))
        a = generate_scenario(cfg, trial_rng(0, 0))
        b = generate_scenario(cfg, trial_rng(5, 17))
        np.testing.assert_allclose(a.valuations, b.valuations, rtol=1e-9)

    def test_zero_distance(self):
        cfg = replace(BASE, n_candidates=1,
                      placement=Placement("fixed", positions=((BASE.d_source, 0.0),)))
        with pytest.raises(DomainError):
            generate_scenario(cfg, trial_rng(0, 0))


class TestTrial:
    def test_no_candidates_all_direct(self):
        cfg = replace(BASE, n_candidates=0)
        for t in range(100):
            r = run_trial(generate_scenario(cfg, trial_rng(0, t)), cfg)
            for mech in ("myerson", "vickrey", "perfect_info"):
                assert r.outcome(mech) == r.direct
            assert r.lower_bound is None

    def test_orderings_and_energy_accounting(self):
        cfg = replace(BASE, n_candidates=6)
        seen_relay = 0
        for t in range(300):
            s = generate_scenario(cfg, trial_rng(1, t))
            r = run_trial(s, cfg)
            m, lb = r.myerson, r.perfect_info
            if m.relay_assigned:
                seen_relay += 1
                assert lb.relay_assigned and lb.payment <= m.payment
                assert m.payment <= min(cfg.budget.p_max, s.p_s) * (1 + 1e-10)
                j = m.winner
                p_wpt = m.payment - s.p_si[j]
                assert m.harvested == pytest.approx(cfg.alpha * p_wpt * cfg.a_r * s.h_si[j], rel=1e-10)
                assert m.surplus == pytest.approx(m.harvested - s.p_i[j], rel=1e-6, abs=1e-18)
            if not m.comm_success:
                assert m.winner == SOURCE and s.p_s > cfg.budget.p_max
        assert seen_relay > 20

    def test_myerson_outage_but_perfect_info_success_happens(self):
        cfg = replace(BASE, n_candidates=4)
        hits = 0
        for t in range(400):
            r = run_trial(generate_scenario(cfg, trial_rng(2, t)), cfg)
            if not r.myerson.comm_success and r.perfect_info.comm_success:
                hits += 1
                assert r.direct.comm_success is False
        assert hits > 0


class TestExperiment:
    def test_deterministic(self):
        assert run_experiment(BASE) == run_experiment(BASE)

    def test_seed_changes_result(self):
        assert run_experiment(BASE) != run_experiment(replace(BASE, seed=8))

    def test_metric_ranges(self):
        m = run_experiment(BASE)
        assert m.trial_count == BASE.n_trials and m.failed_trials == 0
        for mech in sim.MECHANISMS:
            mm = m[mech]
            assert 0 <= mm.outage_prob <= 1
            assert sum(mm.selection_freq) <= 1 + 1e-12
            assert sum(mm.selection_freq) == pytest.approx(mm.relay_rate)
            assert mm.mean_source_power_uncond <= mm.mean_source_power_cond + 1e-18
            assert mm.mean_source_power_cond <= BASE.budget.p_max

    def test_direct_outage_matches_closed_form(self):
        cfg = replace(BASE, n_candidates=0, n_trials=4000)
        for g in (0.6, 1.4):
            c = replace(cfg, gamma_scale=g)
            p = direct_outage_probability(c)
            assert run_experiment(c)["myerson"].outage_prob == pytest.approx(
                p, abs=4 * binomial_sigma(p, c.n_trials))

    def test_outage_nonincreasing_in_n_matched_seed(self):
        outages = [run_experiment(replace(BASE, n_candidates=n))["myerson"].outage_prob
                   for n in (0, 2, 4, 8)]
        assert all(a >= b for a, b in zip(outages, outages[1:]))

    def test_outage_nonincreasing_in_alpha_matched_seed(self):
        outages = [run_experiment(replace(BASE, alpha=a))["myerson"].outage_prob
                   for a in (0.1, 0.2, 0.3, 0.4)]
        assert all(a >= b for a, b in zip(outages, outages[1:]))

    def test_abort_on_failures(self, monkeypatch):
        calls = {"n": 0}
        real = sim.run_trial

        def flaky(*args, **kwargs):
            calls["n"] += 1
            if calls["n"] % 50 == 0:
                raise MechanismError("injected")
            return real(*args, **kwargs)

        monkeypatch.setattr(sim, "run_trial", flaky)
        with pytest.raises(SimulationAbort):
            run_experiment(BASE)

    def test_rare_failures_are_tolerated(self, monkeypatch):
        real = sim.run_trial
        cfg = replace(BASE, n_trials=2000)

        def flaky(scenario, config, spec=None):
            if scenario.h_s == first_h_s:
                raise MechanismError("injected")
            return real(scenario, config)

        first_h_s = generate_scenario(cfg, trial_rng(cfg.seed, 0)).h_s
        monkeypatch.setattr(sim, "run_trial", flaky)
        m = run_experiment(cfg)
        assert m.failed_trials == 1 and m.trial_count == 1999

    def test_iter_trials_slices(self):
        whole = [r for _, r in iter_trials(BASE)]
        part = [r for _, r in iter_trials(BASE, start=100, stop=110)]
        assert part == whole[100:110]
