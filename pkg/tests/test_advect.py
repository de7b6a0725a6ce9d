import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from supnorm_lab.advect import (
    FieldSpec,
    ScalarSeries,
    check_resolved,
    midrange,
    oscillation,
    running_sup,
    sample_faces,
    sample_field,
    tail_limsup,
)
from supnorm_lab.exceptions import ConfigurationError
from supnorm_lab.field import make_grid

GRID = make_grid(-4 * math.pi, 4 * math.pi, 1024)


class TestFieldSpec:
    def test_zero(self):
        assert np.all(sample_field(FieldSpec("zero"), GRID, 3.0).values == 0.0)

    def test_cosine(self):
        b = sample_field(FieldSpec("cosine", amplitude=5.0), GRID, 0.0)
        assert np.allclose(b.values, 5 * np.cos(GRID.centers))

    def test_constant(self):
        assert np.all(sample_field(FieldSpec("constant", offset=3.0), GRID, 1.0).values == 3.0)

    def test_faces_are_sampled_exactly(self):
        spec = FieldSpec("monotone_tanh", amplitude=2.0)
        assert np.array_equal(sample_faces(spec, GRID, 0.0), 2.0 * np.tanh(GRID.faces))

    def test_modulated_time_dependence(self):
        spec = FieldSpec("modulated_cosine", amplitude=2.0, omega=1.0)
        assert np.allclose(spec(GRID.centers, 0.0), 0.0)
        assert spec.time_dependent and not FieldSpec("cosine", amplitude=1.0).time_dependent

    @pytest.mark.parametrize(
        "spec, expected",
        [
            (FieldSpec("zero"), True),
            (FieldSpec("constant", offset=-1.0), True),
            (FieldSpec("monotone_tanh", amplitude=1.0), True),
            (FieldSpec("monotone_tanh", amplitude=-1.0), False),
            (FieldSpec("cosine", amplitude=5.0), False),
        ],
    )
    def test_monotone_flag(self, spec, expected):
        assert spec.is_monotone is expected

    def test_unknown_kind(self):
        with pytest.raises(ConfigurationError):
            FieldSpec("sawtooth")

    def test_non_finite_parameter(self):
        with pytest.raises(ConfigurationError):
            FieldSpec("cosine", amplitude=math.inf)

    @settings(max_examples=50, deadline=None)
    @given(
        st.sampled_from(["zero", "constant", "cosine", "monotone_tanh", "modulated_cosine"]),
        st.floats(-5, 5),
        st.floats(-3, 3),
        st.floats(0, 20),
    )
    def test_sup_bound_dominates_samples(self, kind, amp, off, t):
        spec = FieldSpec(kind, amplitude=amp, offset=off, omega=1.3)
        assert np.abs(spec(GRID.faces, t)).max() <= spec.sup_bound(t) + 1e-12


class TestOscillation:
    def test_cosine(self):
        assert oscillation(FieldSpec("cosine", amplitude=5.0), GRID, 0.0) == pytest.approx(5.0, rel=1e-4)

    def test_constant(self):
        assert oscillation(FieldSpec("constant", offset=7.0), GRID, 0.0) == 0.0

    def test_modulated(self):
        spec = FieldSpec("modulated_cosine", amplitude=2.0, omega=1.0)
        assert oscillation(spec, GRID, math.pi / 2) == pytest.approx(2.0, rel=1e-4)

    def test_midrange(self):
        assert midrange(FieldSpec("cosine", amplitude=1.0, offset=2.0), GRID, 0.0) == pytest.approx(2.0)
        assert midrange(FieldSpec("cosine", amplitude=5.0), GRID, 0.0) == pytest.approx(0.0, abs=1e-3)
        assert midrange(FieldSpec("constant", offset=-1.5), GRID, 0.0) == -1.5

    def test_under_resolved_field_rejected(self):
        coarse = make_grid(-4 * math.pi, 4 * math.pi, 32)
        with pytest.raises(ConfigurationError, match="under-resolves"):
            oscillation(FieldSpec("cosine", amplitude=1.0, wavenumber=4.0), coarse, 0.0)

    def test_domain_shorter_than_period_rejected(self):
        with pytest.raises(ConfigurationError, match="period"):
            check_resolved(FieldSpec("cosine", amplitude=1.0), make_grid(0.0, 3.0, 256))


class TestSeries:
    S = ScalarSeries([0.0, 1.0, 2.0], [1.0, 3.0, 2.0])

    def test_running_sup(self):
        assert running_sup(self.S, 0.0, 2.0) == 3.0
        assert running_sup(self.S, 1.5, 2.0) == 2.0

    def test_running_sup_empty_window(self):
        with pytest.raises(ValueError):
            running_sup(self.S, 1.2, 1.8)

    def test_constant_series(self):
        s = ScalarSeries(np.linspace(0, 10, 41), np.full(41, 0.7))
        assert running_sup(s, 2.0, 9.0) == 0.7
        assert tail_limsup(s) == 0.7

    def test_tail_of_monotone_decay(self):
        t = np.linspace(0.0, 8.0, 81)
        s = ScalarSeries(t, 0.3 + np.exp(-t))
        assert tail_limsup(s, 0.25) == pytest.approx(0.3 + math.exp(-6.0))

    def test_tail_of_b_series(self):
        t = np.linspace(0.0, 5.0, 51)
        spec = FieldSpec("cosine", amplitude=5.0)
        s = ScalarSeries(t, [oscillation(spec, GRID, ti) for ti in t])
        assert tail_limsup(s) == pytest.approx(5.0, rel=1e-4)

    def test_rejects_unsorted_times(self):
        with pytest.raises(ValueError):
            ScalarSeries([0.0, 2.0, 1.0], [1.0, 1.0, 1.0])

    def test_rejects_bad_window(self):
        with pytest.raises(ValueError):
            tail_limsup(self.S, 0.0)
