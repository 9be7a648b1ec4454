"""Unit tests for the write-pulse physics and the device-table model."""

import math

import numpy as np
import pytest

from rramsnn.device import (
    DeviceTable,
    ThresholdMemristor,
    WritePulseParams,
    build_table,
    calibrate_gains,
    default_memristor,
    default_pulse,
    device_delta_g,
    interpolate,
    load_table_csv,
    measure_stdp_protocol,
    net_voltage,
    overdrive,
    pulse_voltage,
    save_table_csv,
    table_from_model,
)

# threshold just above the 1 V amplitude; used where a specific margin
# is part of the expected number
MEM_105 = ThresholdMemristor(v_tp=1.05, v_tn=1.05)


class TestPulseVoltage:
    def test_zero_at_ramp_start(self, pulse):
        assert pulse_voltage(-pulse.t_pos, pulse) == pytest.approx(0.0, abs=1e-12)

    def test_peak_amplitude_just_before_spike(self, pulse):
        v = pulse_voltage(-1e-9, pulse)
        assert v == pytest.approx(pulse.amp_pos, rel=1e-3)

    def test_zero_outside_support(self, pulse):
        assert pulse_voltage(-2 * pulse.t_pos, pulse) == 0.0
        assert pulse_voltage(pulse.t_neg + 1.0, pulse) == 0.0

    def test_tail_starts_at_negative_amplitude(self, pulse):
        v = pulse_voltage(1e-9, pulse)
        assert v == pytest.approx(pulse.amp_neg, rel=1e-3)

    def test_tail_decays_with_time_constant(self, pulse):
        # one tau_neg into the tail the (normalized) level is ~ amp * e^-1
        v = pulse_voltage(pulse.tau_neg, pulse)
        assert v == pytest.approx(pulse.amp_neg * math.exp(-1.0), rel=2e-3)

    def test_negative_polarity_mirrors(self, pulse):
        t = np.linspace(-pulse.t_pos, pulse.t_neg, 57)
        assert np.allclose(
            pulse_voltage(t, pulse, "-"), -pulse_voltage(t, pulse, "+")
        )

    def test_bad_polarity_rejected(self, pulse):
        with pytest.raises(ValueError):
            pulse_voltage(0.5, pulse, polarity="x")

    def test_invalid_shape_rejected(self):
        with pytest.raises(ValueError):
            WritePulseParams(amp_pos=-1.0)
        with pytest.raises(ValueError):
            WritePulseParams(t_neg=0.0)


class TestNetVoltage:
    def test_self_subtraction_is_zero(self, pulse):
        t = np.linspace(-1.0, 401.0, 999)
        assert np.allclose(net_voltage(0.0, t, pulse, pulse), 0.0)

    def test_far_displacement_leaves_pre_pulse(self, pulse):
        dt = pulse.t_neg + 100.0
        t = np.linspace(-pulse.t_pos, pulse.t_neg, 333)
        assert np.allclose(
            net_voltage(dt, t, pulse, pulse), pulse_voltage(t, pulse)
        )

    def test_peak_at_50ms_displacement(self, pulse):
        # near t = dt the post ramp peak (+1 V) subtracts from the pre
        # tail (~ -e^-1 V): |net| ~ 1 + e^-1 ~ 1.368 V
        dt = 50.0
        t = np.linspace(dt - 2 * pulse.t_pos, dt, 4001)
        peak = np.abs(net_voltage(dt, t, pulse, pulse)).max()
        assert peak == pytest.approx(1.0 + math.exp(-1.0), abs=2e-3)


class TestOverdrive:
    def test_lone_pulse_never_crosses(self, pulse, memristor):
        od = overdrive(1e6, pulse, pulse, memristor)
        assert od == (0.0, 0.0)

    def test_identical_pulses_at_zero_dt(self, pulse, memristor):
        assert overdrive(0.0, pulse, pulse, memristor) == (0.0, 0.0)

    def test_expected_margin_at_50ms(self, pulse):
        # net peak ~ 1 + e^-1 against a 1.05 V threshold
        od_pos, od_neg = overdrive(50.0, pulse, pulse, MEM_105)
        assert od_pos == pytest.approx(0.0, abs=1e-9)
        assert od_neg == pytest.approx(math.exp(-1.0) - 0.05, abs=2e-3)

    def test_polarity_mirrors_under_symmetric_shapes(self, pulse, memristor):
        for dt in (5.0, 20.0, 50.0, 90.0):
            od_p1, od_n1 = overdrive(dt, pulse, pulse, memristor)
            od_p2, od_n2 = overdrive(-dt, pulse, pulse, memristor)
            assert od_p1 == pytest.approx(od_n2, rel=1e-6, abs=1e-9)
            assert od_n1 == pytest.approx(od_p2, rel=1e-6, abs=1e-9)

    def test_threshold_below_amplitude_rejected(self, pulse):
        mem = ThresholdMemristor(v_tp=0.9, v_tn=1.2)
        with pytest.raises(ValueError):
            overdrive(10.0, pulse, pulse, mem)


class TestDeviceDeltaG:
    def test_zero_overdrive_means_zero_change(self, pulse, memristor):
        assert device_delta_g(1e6, 0.5, memristor, pulse, pulse) == 0.0

    def test_saturation_at_full_conductance(self, pulse, memristor):
        assert device_delta_g(30.0, 1.0, memristor, pulse, pulse) == 0.0

    def test_causal_potentiates_anticausal_depresses(self, pulse, memristor):
        up = device_delta_g(30.0, 0.5, memristor, pulse, pulse)
        down = device_delta_g(-30.0, 0.5, memristor, pulse, pulse)
        assert up > 0 > down

    def test_configured_gain_recovers_half_range(self, pulse):
        # a 1.57/V gain against the 1.05 V threshold at dt = 50 ms moves
        # an empty device by ~50% of the range
        mem = ThresholdMemristor(v_tp=1.05, v_tn=1.05, gain_set=1.57,
                                 gain_reset=1.57)
        dg = device_delta_g(50.0, 0.0, mem, pulse, pulse)
        assert dg == pytest.approx(0.50, abs=0.01)

    def test_default_learning_rate_is_half_range(self, pulse, memristor):
        # peak single-pairing step from the empty rail = 50% of range
        dts = np.r_[-np.geomspace(1e-4, 100, 200), np.geomspace(1e-4, 100, 200)]
        up = max(device_delta_g(d, 0.0, memristor, pulse, pulse) for d in dts)
        down = max(-device_delta_g(d, 1.0, memristor, pulse, pulse) for d in dts)
        assert up == pytest.approx(0.5, rel=1e-3)
        assert down == pytest.approx(0.5, rel=1e-3)

    def test_explicit_calibration_point(self, pulse):
        mem = calibrate_gains(ThresholdMemristor(), pulse, pulse,
                              learning_rate=0.5, at_dt=50.0)
        assert device_delta_g(50.0, 0.0, mem, pulse, pulse) == pytest.approx(0.5)

    def test_clamped_to_valid_range(self, pulse):
        mem = calibrate_gains(ThresholdMemristor(), pulse, pulse,
                              learning_rate=4.0)
        g = 0.5
        dg = device_delta_g(1.0, g, mem, pulse, pulse)
        assert 0.0 <= g + dg <= 1.0

    def test_noise_is_multiplicative_and_seeded(self, pulse, memristor):
        from dataclasses import replace

        noisy = replace(memristor, noise_sigma=0.5)
        a = device_delta_g(30.0, 0.2, noisy, pulse, pulse,
                           rng=np.random.default_rng(1))
        b = device_delta_g(30.0, 0.2, noisy, pulse, pulse,
                           rng=np.random.default_rng(1))
        c = device_delta_g(30.0, 0.2, noisy, pulse, pulse,
                           rng=np.random.default_rng(2))
        clean = device_delta_g(30.0, 0.2, memristor, pulse, pulse)
        assert a == b != c
        assert a > 0 and clean > 0  # noise cannot flip the sign

    def test_out_of_range_g_rejected(self, pulse, memristor):
        with pytest.raises(ValueError):
            device_delta_g(10.0, 1.2, memristor, pulse, pulse)


class TestTimeConstantRecovery:
    def test_tail_fit_recovers_50ms(self, pulse, memristor):
        # log|dG| over dt in [5, 100] ms must be affine with slope -1/(50 ms)
        dts = np.linspace(5.0, 100.0, 40)
        dgs = np.array(
            [device_delta_g(d, 0.0, memristor, pulse, pulse) for d in dts]
        )
        assert np.all(dgs > 0)
        slope = np.polyfit(dts, np.log(dgs), 1)[0]
        tau = -1.0 / slope
        assert tau == pytest.approx(50.0, rel=0.05)


class TestProtocol:
    def test_record_count(self, pulse, memristor, rng):
        rec = measure_stdp_protocol(memristor, pulse, pulse, 1000, rng)
        assert rec.shape == (1000, 3)

    def test_starts_from_low_resistance_state(self, pulse, memristor, rng):
        rec = measure_stdp_protocol(memristor, pulse, pulse, 5, rng)
        assert rec[0, 0] == 1.0

    def test_state_carries_between_iterations(self, pulse, memristor, rng):
        rec = measure_stdp_protocol(memristor, pulse, pulse, 50, rng)
        assert np.allclose(rec[1:, 0], rec[:-1, 0] + rec[:-1, 2])

    def test_causal_only_protocol_never_depresses(self, pulse, memristor, rng):
        rec = measure_stdp_protocol(
            memristor, pulse, pulse, 100, rng, dt_range=(0.5, 100.0)
        )
        assert np.all(np.diff(rec[:, 0]) >= 0)

    def test_scatter_signs_partition_by_dt(self, pulse, memristor, rng):
        rec = measure_stdp_protocol(memristor, pulse, pulse, 1000, rng)
        g, dt, dg = rec.T
        ltp = dg > 0
        ltd = dg < 0
        assert np.all(dt[ltp] > 0)
        assert np.all(dt[ltd] < 0)

    def test_zero_iterations_rejected(self, pulse, memristor, rng):
        with pytest.raises(ValueError):
            measure_stdp_protocol(memristor, pulse, pulse, 0, rng)


class TestDeviceTable:
    def test_axes_must_increase(self):
        with pytest.raises(ValueError):
            DeviceTable([0.0, 0.0, 1.0], [0.0, 1.0], np.zeros((3, 2)))

    def test_grid_shape_checked(self):
        with pytest.raises(ValueError):
            DeviceTable([0.0, 1.0], [0.0, 1.0], np.zeros((3, 2)))

    def test_grid_must_be_finite(self):
        grid = np.zeros((2, 2))
        grid[0, 0] = np.inf
        with pytest.raises(ValueError):
            DeviceTable([0.0, 1.0], [0.0, 1.0], grid)


class TestInterpolate:
    def test_grid_node_identity(self, device_table):
        t = device_table
        for i in (0, 5, len(t.g_axis) - 1):
            for j in (0, 7, len(t.dt_axis) - 1):
                got = interpolate(t, t.dt_axis[j], t.g_axis[i])
                assert got == pytest.approx(t.dg_grid[i, j], abs=1e-12)

    def test_midpoint_is_mean_of_neighbors(self, device_table):
        t = device_table
        g_mid = 0.5 * (t.g_axis[3] + t.g_axis[4])
        got = interpolate(t, t.dt_axis[10], g_mid)
        want = 0.5 * (t.dg_grid[3, 10] + t.dg_grid[4, 10])
        assert got == pytest.approx(want, abs=1e-12)

    def test_flat_extrapolation_beyond_bounds(self, device_table):
        t = device_table
        inside = interpolate(t, t.dt_axis[-1], 0.5)
        outside = interpolate(t, t.dt_axis[-1] + 50.0, 0.5)
        assert outside == pytest.approx(inside)

    def test_matches_model_oracle(self, pulse, memristor, rng):
        # a fine-grid table evaluated off-grid tracks the physics model;
        # the immediate vicinity of dt = 0 is excluded because the
        # threshold response jumps there and no finite grid resolves it
        table = table_from_model(memristor, pulse, pulse, n_g=41, n_dt=201)
        dts = rng.uniform(-100, 100, 1000)
        gs = rng.uniform(0, 1, 1000)
        away = np.abs(dts) >= 2.0
        got = np.asarray(interpolate(table, dts[away], gs[away]))
        want = np.array(
            [device_delta_g(d, g, memristor, pulse, pulse)
             for d, g in zip(dts[away], gs[away])]
        )
        assert np.abs(got - want).max() < 0.01

    def test_broadcasts(self, device_table):
        out = interpolate(device_table, np.full(7, 30.0), np.linspace(0, 1, 7))
        assert out.shape == (7,)


class TestBuildTable:
    def test_noise_free_scatter_reproduces_model(self, pulse, memristor, rng):
        rec = measure_stdp_protocol(memristor, pulse, pulse, 4000, rng)
        table = build_table(rec, memristor, pulse, pulse)
        model = table_from_model(memristor, pulse, pulse)
        # noise-free records land exactly on the model surface, so away
        # from the dt = 0 jump the binned means only differ from the
        # node values by within-bin variation
        away = np.abs(model.dt_axis) > 5.0
        assert np.abs(table.dg_grid[:, away] - model.dg_grid[:, away]).max() < 0.06

    def test_refinement_converges_to_model(self, pulse, memristor, rng):
        dts = rng.uniform(-100, 100, 500)
        gs = rng.uniform(0, 1, 500)
        want = np.array(
            [device_delta_g(d, g, memristor, pulse, pulse)
             for d, g in zip(dts, gs)]
        )
        errs = []
        for n_g, n_dt in ((11, 21), (21, 41), (41, 81)):
            t = table_from_model(memristor, pulse, pulse, n_g=n_g, n_dt=n_dt)
            errs.append(np.abs(interpolate(t, dts, gs) - want).mean())
        assert errs[1] < errs[0] and errs[2] < errs[1]


class TestTableCsv:
    def test_round_trip(self, device_table, tmp_path):
        p = tmp_path / "table.csv"
        save_table_csv(device_table, p)
        back = load_table_csv(p)
        assert np.array_equal(back.g_axis, device_table.g_axis)
        assert np.array_equal(back.dt_axis, device_table.dt_axis)
        assert np.array_equal(back.dg_grid, device_table.dg_grid)

    def test_header_checked(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("a,b,c\n1,2,3\n")
        with pytest.raises(ValueError, match="header"):
            load_table_csv(p)

    def test_partial_grid_rejected(self, tmp_path):
        p = tmp_path / "bad.csv"
        p.write_text("g_i,dt_ms,dg\n0.0,0.0,0.1\n0.0,1.0,0.1\n1.0,0.0,0.1\n")
        with pytest.raises(ValueError, match="grid"):
            load_table_csv(p)


def test_default_memristor_threshold_above_amplitude(pulse, memristor):
    assert memristor.v_tp > pulse.amp_pos
    assert memristor.v_tn > -pulse.amp_neg
