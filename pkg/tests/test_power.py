import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ampris.power import (
    PowerParams,
    energy_efficiency,
    pa_power,
    pa_power_general,
    ris_power,
    total_power_active,
    total_power_passive,
)

P = PowerParams()


class TestParams:
    def test_defaults(self):
        assert P.P_Tx == pytest.approx(7.9433, abs=1e-4)
        assert P.P_Rx == pytest.approx(0.01)
        assert (P.alpha, P.beta, P.P_n_b, P.b, P.epsilon) == (1.2, 1.2, 7.8e-3, 6, 0.5)

    @pytest.mark.parametrize("kw", [{"alpha": 0.9}, {"beta": 0.5}, {"P_Tx": -1}, {"epsilon": 1.5},
                                    {"panels_counted": 3}])
    def test_rejects(self, kw):
        with pytest.raises(ValueError):
            PowerParams(**kw)


class TestPaPower:
    def test_examples(self):
        assert pa_power(1.0, 1.0, 1.2) == pytest.approx(1.2)
        assert pa_power(0.0, 1.0, 1.2) == 0
        assert pa_power(0.25, 1.0, 1.2) == pytest.approx(0.6)

    def test_rejects_above_p_max(self):
        with pytest.raises(ValueError):
            pa_power(1.01, 1.0, 1.2)
        with pytest.raises(ValueError):
            pa_power_general(1.01, 1.0, 1.2, 0.3)

    def test_round_off_slack(self):
        assert pa_power(1.0 + 1e-15, 1.0, 1.2) == pytest.approx(1.2)

    @given(st.one_of(st.just(0.0), st.floats(1e-12, 1)), st.floats(1e-6, 1e3))
    def test_general_form_agrees(self, frac, P_max):
        P_out = frac * P_max
        a = pa_power(P_out, P_max, 1.2)
        b = pa_power_general(P_out, P_max, 1.2, 0.5)
        assert abs(a - b) <= 1e-12 * max(a, 1e-300)

    @given(st.floats(1e-6, 1), st.floats(1e-6, 1e3))
    def test_efficiency_law(self, frac, P_max):
        P_out = frac * P_max
        eff = P_out / pa_power(P_out, P_max, 1.2)
        assert eff == pytest.approx((1 / 1.2) * frac ** 0.5, rel=1e-12)

    def test_concave_increasing(self):
        x = np.linspace(0, 2.0, 201)
        y = pa_power(x, 2.0, 1.2)
        assert np.all(np.diff(y) > 0)
        assert np.all(np.diff(y, 2) <= 1e-15)
        assert y[-1] == pytest.approx(1.2 * 2.0)

    def test_vectorized(self):
        assert pa_power(np.array([0.25, 1.0]), 1.0, 1.2) == pytest.approx([0.6, 1.2])


class TestTotals:
    def test_ris_power(self):
        assert ris_power(128, P) == pytest.approx(0.9984)
        assert ris_power(0, P) == 0
        assert ris_power(256, P) == pytest.approx(1.9968)
        with pytest.raises(ValueError):
            ris_power(-1, P)

    def test_active_example(self):
        b = total_power_active(1.0, 1.0, 1.0, 128, P)
        assert b.total == pytest.approx(11.3517, abs=1e-4)
        assert b.total == b.transmit_pa + b.static_tx + b.static_rx + b.ris_control + b.inter_ris_pa

    def test_active_zero_output(self):
        a = total_power_active(1.0, 1.0, 1.0, 128, P)
        b = total_power_active(1.0, 0.0, 1.0, 128, P)
        assert b.inter_ris_pa == 0
        assert a.total - b.total == pytest.approx(1.2)

    def test_doubling_n(self):
        a = total_power_active(1.0, 0.5, 1.0, 128, P)
        b = total_power_active(1.0, 0.5, 1.0, 256, P)
        assert b.total - a.total == pytest.approx(128 * P.P_n_b)

    def test_both_panels_counted(self):
        a = total_power_active(1.0, 0.5, 1.0, 128, P)
        b = total_power_active(1.0, 0.5, 1.0, 128, PowerParams(panels_counted=2))
        assert b.total - a.total == pytest.approx(128 * P.P_n_b)

    def test_passive_example(self):
        assert total_power_passive(1.0, 256, P).total == pytest.approx(11.1501, abs=1e-4)

    def test_passive_zero_power(self):
        b = total_power_passive(0.0, 256, P)
        assert b.total == pytest.approx(P.P_Tx + P.P_Rx + 256 * P.P_n_b)

    @given(st.floats(0, 10), st.floats(0, 1), st.floats(1e-3, 1e2), st.integers(0, 2048))
    def test_difference_is_pa(self, P_t, frac, P_max, n):
        act = total_power_active(P_t, frac * P_max, P_max, n, P)
        pas = total_power_passive(P_t, n, P)
        assert act.total - pas.total == pytest.approx(1.2 * np.sqrt(frac * P_max * P_max), abs=1e-9)

    def test_general_epsilon(self):
        b = total_power_active(1.0, 0.25, 1.0, 0, PowerParams(epsilon=0.0))
        assert b.inter_ris_pa == pytest.approx(1.2 * 0.25)


class TestEnergyEfficiency:
    def test_examples(self):
        assert energy_efficiency(10, 180e3, 10) == pytest.approx(1.8e5)
        assert energy_efficiency(0, 180e3, 10) == 0
        assert energy_efficiency(3, 180e3, 20) == pytest.approx(energy_efficiency(3, 180e3, 10) / 2)

    @pytest.mark.parametrize("total", [0, -1])
    def test_rejects(self, total):
        with pytest.raises(ValueError):
            energy_efficiency(1, 1, total)

    def test_decreases_with_p_max_when_gain_binds(self):
        # with G_max binding, P_out stays fixed while P_max only grows the PA term
        rate, P_t, P_out = 10.0, 0.1, 1e-3
        ees = [energy_efficiency(rate, 180e3, total_power_active(P_t, P_out, P_max, 128, P).total)
               for P_max in (0.01, 0.1, 1.0, 10.0, 100.0)]
        assert np.all(np.diff(ees) < 0)
