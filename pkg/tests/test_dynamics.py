import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecoepi.dynamics import (
    IntegrationSettings,
    Trajectory,
    boundedness_bound,
    integrate,
    orthant_field,
    total_population,
    verify_bound,
)
from ecoepi.equilibria import all_equilibria, equilibrium_coexistence
from ecoepi.errors import StepSizeUnderflow
from ecoepi.experiments import random_parameter_set
from ecoepi.model import ParameterSet, Variant, to_infected_space

from .conftest import DYNAMICS_RANGES, ECO_VARIANTS, FIG1, FIG2, VARIANTS, params
from .oracles import rk4_fixed


@pytest.fixture(scope="module")
def fig2_run():
    return integrate(params(FIG2), [5.0, 5.0, 2.0], IntegrationSettings(t_end=500.0, rtol=1e-8, atol=1e-11))


class TestSettings:
    @pytest.mark.parametrize("kw", [
        dict(t_end=-1.0), dict(t_end=10.0, rtol=0.0), dict(t_end=10.0, rtol=0.1),
        dict(t_end=10.0, atol=0.0), dict(t_end=10.0, dt_max=20.0),
        dict(t_end=10.0, dt_init=2.0, dt_max=1.0), dict(t_end=10.0, record_every=0.0),
    ])
    def test_rejects_invalid(self, kw):
        with pytest.raises(ValueError):
            IntegrationSettings(**kw)

    def test_sample_grid(self):
        t = IntegrationSettings(t_end=1.0, record_every=0.3).sample_times()
        np.testing.assert_allclose(t, [0.0, 0.3, 0.6, 0.9, 1.0])
        assert len(IntegrationSettings(t_end=5.0).sample_times()) == 1001


class TestIntegrate:
    def test_fig2_converges(self, fig2_run):
        assert np.max(np.abs(fig2_run.final - [6.410, 4.799, 1.672])) <= 1e-3
        np.testing.assert_allclose(fig2_run.final, equilibrium_coexistence(params(FIG2)).point, atol=1e-6)

    @pytest.mark.parametrize("variant", VARIANTS)
    def test_equilibria_are_fixed_points(self, variant):
        p = params(FIG2, variant)
        for eq in all_equilibria(p):
            if not eq.feasible:
                continue
            traj = integrate(p, eq.point, IntegrationSettings(t_end=50.0, rtol=1e-10, atol=1e-12))
            assert np.max(np.abs(traj.final - eq.point)) <= 1e-8

    def test_classical_limit_cycle_free(self):
        p = ParameterSet(m=1, a=1, b=0, r=1, K=2, beta=1, mu=1, variant="classical")
        traj = integrate(p, [0.4, 1.2], IntegrationSettings(t_end=200.0, rtol=1e-9, atol=1e-12))
        assert np.max(np.abs(traj.final - [0.5, 1.0])) <= 1e-4
        assert traj.bound is None and traj.columns == ("P", "Q")

    def test_zero_horizon(self):
        traj = integrate(params(FIG2), [1.0, 2.0, 3.0], IntegrationSettings(t_end=0.0))
        assert len(traj) == 1 and traj.accepted == 0
        np.testing.assert_array_equal(traj.final, [1.0, 2.0, 3.0])

    def test_negative_initial_state(self):
        with pytest.raises(ValueError):
            integrate(params(FIG2), [1.0, -2.0, 3.0], IntegrationSettings(t_end=1.0))

    def test_step_size_underflow(self):
        # the rates are so fast that steps of 1e-14 * t_end cannot meet the tolerance
        p = params(FIG2, r=1e12, K=1e12)
        with pytest.raises(StepSizeUnderflow):
            integrate(p, [1.0, 1.0, 1.0], IntegrationSettings(t_end=1e3, rtol=1e-10, atol=1e-14,
                                                              dt_init=1e-3))

    def test_refinement_and_rk4_oracle(self):
        p, x0, t_end = params(FIG2), [5.0, 5.0, 2.0], 5.0
        coarse = integrate(p, x0, IntegrationSettings(t_end=t_end, rtol=1e-6, atol=1e-9)).final
        fine = integrate(p, x0, IntegrationSettings(t_end=t_end, rtol=5e-7, atol=5e-10)).final
        ref = rk4_fixed(orthant_field(p), x0, t_end, 1e-4)
        assert np.max(np.abs(coarse - fine)) <= 10 * 1e-6 * np.max(np.abs(ref))
        assert np.max(np.abs(coarse - ref)) <= 10 * 1e-6 * np.max(np.abs(ref))
        tight = integrate(p, x0, IntegrationSettings(t_end=t_end, rtol=1e-10, atol=1e-13)).final
        assert np.max(np.abs(tight - ref)) <= 1e-9 * np.max(np.abs(ref))

    def test_fig2_refinement_full_horizon(self, fig2_run):
        half = integrate(params(FIG2), [5.0, 5.0, 2.0],
                         IntegrationSettings(t_end=500.0, rtol=5e-9, atol=5e-12))
        assert np.max(np.abs(half.final - fig2_run.final)) <= 10 * 1e-8 * np.max(np.abs(fig2_run.final))

    @pytest.mark.parametrize("variant", ECO_VARIANTS)
    def test_predator_free_manifold(self, variant):
        traj = integrate(params(FIG1, variant), [0.0, 6.0, 4.0], IntegrationSettings(t_end=200.0))
        assert np.max(np.abs(traj.states[:, 0])) <= 1e-14

    def test_nonnegative_random(self, rng):
        for variant in ECO_VARIANTS:
            for _ in range(10):
                p = random_parameter_set(rng, variant, ranges=DYNAMICS_RANGES)
                x0 = rng.uniform(0.0, 5.0, 3)
                traj = integrate(p, x0, IntegrationSettings(t_end=50.0, atol=1e-9))
                assert traj.states.min() >= -1e-9

    def test_clamping_recorded(self):
        # U is driven to zero when the disease cannot persist (tiny beta, large mu)
        p = params(FIG2, "toxic", beta=1e-6, mu=20.0, b=2.0)
        traj = integrate(p, [1.0, 1.0, 1.0], IntegrationSettings(t_end=100.0, rtol=1e-6, atol=1e-9))
        assert traj.states.min() >= 0.0
        assert traj.clamp_events >= 1
        assert traj.final[2] == 0.0

    def test_infected_space_consistency(self):
        # along a harmless run, I = U^2 satisfies dI/dt = -mu I + beta S sqrt(I) - b P sqrt(I)
        p = params(FIG2, "harmless")
        traj = integrate(p, [5.0, 5.0, 2.0], IntegrationSettings(t_end=20.0, rtol=1e-10, atol=1e-13,
                                                                record_every=1e-3))
        X = to_infected_space(traj.states)
        P, S, I = X[:, 0], X[:, 1], X[:, 2]
        dI = np.gradient(I, traj.t, edge_order=2)
        rhs = -p.mu * I + p.beta * S * np.sqrt(I) - p.b * P * np.sqrt(I)
        mask = I > 1e-9
        scale = np.max(np.abs(rhs))
        assert np.max(np.abs(dI - rhs)[mask][2:-2]) <= 1e-5 * scale


class TestBoundedness:
    def test_fig2_q_one(self):
        bb = boundedness_bound(params(FIG2), [5.0, 5.0, 0.0], q=1.0)
        assert bb.Psi == pytest.approx(6890.625, rel=1e-14)
        assert bb.bound == pytest.approx(6890.625)

    def test_initial_total_dominates(self):
        bb = boundedness_bound(params(FIG2), [1e5, 1.0, 2.0])
        assert bb.T0 == 1e5 + 1.0 + 4.0
        assert bb.bound == bb.T0

    def test_unit_parameters(self):
        p = ParameterSet(m=3, a=1, b=1, r=1, K=1, beta=1, mu=3, variant="harmless")
        assert boundedness_bound(p, [0, 0, 0], q=1.0).Psi == 1.0

    def test_default_q(self):
        assert boundedness_bound(params(FIG2), [1, 1, 1]).q == 0.5 * min(FIG2["mu"], FIG2["m"])

    @pytest.mark.parametrize("q", [0.0, -1.0, 1.35, 5.0])
    def test_rejects_q(self, q):
        with pytest.raises(ValueError):
            boundedness_bound(params(FIG2), [1, 1, 1], q=q)

    def test_rejects_classical(self):
        with pytest.raises(ValueError):
            boundedness_bound(params(FIG2, "classical"), [1, 1])

    def test_fig2_run_passes(self, fig2_run):
        rep = verify_bound(fig2_run, fig2_run.bound)
        assert rep.passed and rep.max_ratio < 0.01

    def test_fig1_run_passes(self):
        traj = integrate(params(FIG1), [1.0, 6.0, 4.0], IntegrationSettings(t_end=1000.0))
        assert verify_bound(traj, traj.bound).passed

    def test_initial_ratio_one(self):
        x0 = [1e5, 0.0, 0.0]
        traj = integrate(params(FIG2), x0, IntegrationSettings(t_end=10.0))
        rep = verify_bound(traj, traj.bound)
        assert rep.passed
        assert traj.total[0] / traj.bound.bound == 1.0
        assert rep.max_ratio == 1.0 and rep.worst_time == 0.0

    def test_detects_violation(self):
        bb = boundedness_bound(params(FIG2), [1.0, 1.0, 1.0])
        fake = Trajectory(t=np.array([0.0, 1.0]), states=np.array([[1.0, 1.0, 1.0], [bb.bound, 1.0, 0.0]]),
                          variant=Variant.TOXIC)
        rep = verify_bound(fake, bb)
        assert not rep.passed and rep.worst_time == 1.0
        assert "FAIL" in str(rep)


@settings(max_examples=50, deadline=None)
@given(st.tuples(*[st.floats(0.0, 20.0)] * 3))
def test_total_population_property(x):
    assert total_population(x) == pytest.approx(x[0] + x[1] + x[2] ** 2)
    traj = integrate(params(FIG2), x, IntegrationSettings(t_end=20.0))
    assert verify_bound(traj, traj.bound).passed
    assert traj.states.min() >= -1e-9
