import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ecoepi.equilibria import equilibrium_coexistence
from ecoepi.model import (
    ParameterSet,
    Variant,
    from_infected_space,
    infected_space_field,
    jacobian,
    to_infected_space,
    vector_field,
)

from .conftest import ECO_VARIANTS, FIG2, VARIANTS, params
from .oracles import central_difference_jacobian, numeric_symbolic_jacobian

rate = st.floats(min_value=0.01, max_value=10.0)
pop = st.floats(min_value=0.0, max_value=50.0)


@st.composite
def param_sets(draw, variant=None):
    v = variant or draw(st.sampled_from(VARIANTS))
    return ParameterSet(m=draw(rate), a=draw(rate), b=draw(st.floats(0.0, 5.0)), r=draw(rate),
                        K=draw(st.floats(0.5, 1e3)), beta=draw(rate), mu=draw(rate), variant=v)


def unit(variant, **over):
    return ParameterSet(**{**dict(m=1, a=1, b=1, r=1, K=1, beta=1, mu=1), **over}, variant=variant)


class TestParameterSet:
    def test_avoided_forces_b_to_zero(self):
        assert unit("avoided", b=3.0).b == 0.0

    @pytest.mark.parametrize("name", ["m", "a", "r", "K", "beta", "mu"])
    def test_rates_must_be_positive(self, name):
        with pytest.raises(ValueError, match=name):
            unit("harmless", **{name: 0.0})

    def test_b_nonnegative(self):
        with pytest.raises(ValueError):
            unit("toxic", b=-0.1)

    def test_nonfinite_rejected(self):
        with pytest.raises(ValueError):
            unit("toxic", r=float("nan"))

    def test_sigma(self):
        assert [Variant(v).sigma for v in ("harmless", "avoided", "toxic")] == [1, 0, -1]


class TestVectorField:
    def test_toxic_unit_parameters(self):
        np.testing.assert_allclose(vector_field(unit("toxic"), [1, 1, 1]), [-1, -2, -0.5])

    def test_harmless_field_vanishes_at_coexistence(self):
        p = params(FIG2, "harmless", b=1.0)
        x = equilibrium_coexistence(p).point
        assert np.max(np.abs(vector_field(p, x))) <= 1e-10

    def test_classical_coexistence_by_hand(self):
        p = ParameterSet(m=1, a=1, b=0, r=1, K=2, beta=1, mu=1, variant="classical")
        np.testing.assert_allclose(vector_field(p, [0.5, 1.0]), [0.0, 0.0], atol=1e-15)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError, match="length 3"):
            vector_field(unit("toxic"), [1.0, 2.0])
        with pytest.raises(ValueError, match="length 2"):
            vector_field(unit("classical"), [1.0, 2.0, 3.0])

    def test_nonfinite_state(self):
        with pytest.raises(ValueError):
            vector_field(unit("harmless"), [1.0, np.inf, 0.0])

    @given(p=param_sets(), data=st.data())
    def test_axes_invariant(self, p, data):
        x = np.array(data.draw(st.lists(pop, min_size=p.dim, max_size=p.dim)))
        x[0] = 0.0
        assert vector_field(p, x)[0] == 0.0
        x[1] = 0.0
        assert vector_field(p, x)[1] == 0.0

    @given(p=param_sets("harmless"), x=st.tuples(pop, pop, pop))
    def test_avoided_is_harmless_with_b_zero(self, p, x):
        avoided = p.replace(variant=Variant.AVOIDED)
        np.testing.assert_array_equal(vector_field(avoided, x), vector_field(p.replace(b=0.0), x))

    @given(p=param_sets(), P=pop, S=pop)
    def test_disease_free_reduces_to_classical(self, p, P, S):
        # with U = 0 the incidence rate drops out of the (P, S) block
        classical = p.replace(variant=Variant.CLASSICAL)
        if p.dim == 2:
            return
        np.testing.assert_allclose(vector_field(p, [P, S, 0.0])[:2], vector_field(classical, [P, S]),
                                   rtol=1e-14, atol=1e-12)


class TestJacobian:
    def test_origin_eigenvalues(self):
        p = params(FIG2, "harmless")
        lam = np.sort(np.linalg.eigvals(jacobian(p, [0, 0, 0])).real)
        np.testing.assert_allclose(lam, np.sort([-p.m, p.r, -p.mu / 2]))

    def test_toxic_unit_first_row(self):
        np.testing.assert_allclose(jacobian(unit("toxic"), [1, 1, 1])[0], [-1, 1, -1])

    def test_entries_by_variant(self):
        for v, s in (("harmless", 1), ("toxic", -1), ("avoided", 0)):
            p = params(FIG2, v)
            J = jacobian(p, [2.0, 3.0, 4.0])
            assert J[0, 0] == pytest.approx(-p.m + p.a * 3.0 + s * p.b * 4.0)
            assert J[0, 2] == pytest.approx(s * p.b * 2.0)
            assert J[2, 0] == pytest.approx(-0.5 * p.b)
            assert J[2, 2] == -0.5 * p.mu

    @pytest.mark.parametrize("variant", VARIANTS)
    def test_matches_symbolic_differentiation(self, variant, rng):
        for _ in range(5):
            p = params(FIG2, variant, b=float(rng.uniform(0, 1)))
            x = rng.uniform(0, 10, p.dim)
            np.testing.assert_allclose(jacobian(p, x), numeric_symbolic_jacobian(p, x), rtol=1e-12, atol=1e-12)

    @settings(max_examples=300)
    @given(p=param_sets(), data=st.data())
    def test_matches_finite_differences(self, p, data):
        x = np.array(data.draw(st.lists(pop, min_size=p.dim, max_size=p.dim)))
        J = jacobian(p, x)
        fd = central_difference_jacobian(lambda y: vector_field(p, y), x)
        scale = max(1.0, float(np.max(np.abs(J))))
        assert np.max(np.abs(J - fd)) <= 1e-6 * scale


class TestInfectedSpace:
    @pytest.mark.parametrize("x, expected", [
        ((1, 2, 3), (1, 2, 9)),
        ((0, 0, 0), (0, 0, 0)),
        ((2, 5, 0.5), (2, 5, 0.25)),
    ])
    def test_squaring(self, x, expected):
        np.testing.assert_array_equal(to_infected_space(x), expected)

    def test_negative_u_rejected(self):
        with pytest.raises(ValueError):
            to_infected_space([1.0, 1.0, -0.1])

    # U**2 underflows below ~1e-154
    @given(st.tuples(pop, pop, st.one_of(st.just(0.0), st.floats(1e-100, 50.0))))
    def test_round_trip(self, x):
        np.testing.assert_allclose(from_infected_space(to_infected_space(x)), x, rtol=1e-15)

    @pytest.mark.parametrize("variant", ECO_VARIANTS)
    def test_chain_rule(self, variant, rng):
        # dI/dt = 2 U dU/dt away from I = 0
        p = params(FIG2, variant)
        for _ in range(20):
            x = rng.uniform(0.1, 10, 3)
            f = vector_field(p, x)
            g = infected_space_field(p, to_infected_space(x))
            np.testing.assert_allclose(g, [f[0], f[1], 2 * x[2] * f[2]], rtol=1e-12, atol=1e-12)
