import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from risnull.channel import (
    ChannelError,
    ChannelModelSpec,
    ChannelRealization,
    RisGeometry,
    UserPlacement,
    array_response,
    arrival_angles,
    complex_normal,
    direct_cascaded_ratio,
    interference_pairs,
    load_fixture,
    path_loss_db,
    realization_from_dict,
    realization_to_dict,
    sample_channel,
    sample_direct,
    sample_placement,
    save_fixture,
)


def random_realization(rng, K, N, direct=True):
    d = complex_normal(rng, (K, K)) if direct else None
    return ChannelRealization(complex_normal(rng, (K, N)), complex_normal(rng, (K, N)), d)


class TestGeometry:
    def test_indices_row_major_over_n1(self):
        i1, i2 = RisGeometry(3, 2).indices()
        np.testing.assert_array_equal(i1, [0, 1, 2, 0, 1, 2])
        np.testing.assert_array_equal(i2, [0, 0, 0, 1, 1, 1])

    def test_ula_is_a_single_column(self):
        geo = RisGeometry.ula(7)
        assert (geo.n1, geo.n2) == (1, 7)

    def test_ula_response_is_linear_phase(self):
        geo = RisGeometry.ula(7)
        phi = 0.3
        a = array_response(geo, 0.2, phi)
        step = 2 * np.pi / geo.wavelength * geo.d2 * np.sin(phi)
        np.testing.assert_allclose(np.angle(a[1:] * a[:-1].conj()), step, atol=1e-12)

    def test_column_does_not_depend_on_horizontal_spacing(self):
        a = array_response(RisGeometry(1, 5, d1=0.05), 0.2, 0.4)
        b = array_response(RisGeometry(1, 5, d1=0.37), 0.2, 0.4)
        np.testing.assert_allclose(a, b)

    def test_row_phase_uses_azimuth_and_elevation(self):
        geo = RisGeometry(4, 1)
        theta, phi = 0.5, -0.3
        a = array_response(geo, theta, phi)
        step = 2 * np.pi / geo.wavelength * geo.d1 * np.sin(theta) * np.cos(phi)
        np.testing.assert_allclose(np.angle(a[1:] * a[:-1].conj()), step, atol=1e-12)

    def test_boresight_is_all_ones(self):
        np.testing.assert_allclose(array_response(RisGeometry(4, 3), 0.0, 0.0), np.ones(12))

    @given(st.floats(-np.pi / 2, np.pi / 2), st.floats(-np.pi / 2, np.pi / 2))
    def test_response_unit_modulus(self, theta, phi):
        a = array_response(RisGeometry(3, 4), theta, phi)
        np.testing.assert_allclose(np.abs(a), 1.0, atol=1e-12)

    def test_angle_out_of_range(self):
        with pytest.raises(ChannelError):
            array_response(RisGeometry(2, 2), 2.0, 0.0)

    def test_invalid_dimensions(self):
        with pytest.raises(ChannelError):
            RisGeometry(0, 3)


def test_path_loss_values():
    np.testing.assert_allclose(path_loss_db([1.0, 10.0, 100.0]), [-30.0, -52.0, -74.0])


def test_arrival_angles():
    az, el = arrival_angles(np.array([[10.0, 0.0, 0.0], [0.0, 5.0, 0.0], [3.0, 0.0, -3.0]]), np.zeros(3))
    np.testing.assert_allclose(az, [0.0, np.pi / 2, 0.0])
    np.testing.assert_allclose(el, [0.0, 0.0, -np.pi / 4])


def test_interference_pairs_order():
    assert interference_pairs(3) == [(0, 1), (0, 2), (1, 0), (1, 2), (2, 0), (2, 1)]
    assert interference_pairs(1) == []


class TestRealization:
    def test_cascaded_and_stacking(self):
        rng = np.random.default_rng(0)
        real = random_realization(rng, 3, 5)
        for k in range(3):
            for j in range(3):
                np.testing.assert_allclose(real.cascaded[k, j], real.h_t[j] * real.h_r[k])
        for col, (k, j) in enumerate(interference_pairs(3)):
            np.testing.assert_allclose(real.stacked_interference[:, col], real.cascaded[k, j])
            assert real.stacked_direct[col] == real.direct[k, j]

    @settings(max_examples=30)
    @given(st.integers(1, 4), st.integers(1, 9), st.integers(0, 2**31))
    def test_effective_gains(self, K, N, seed):
        rng = np.random.default_rng(seed)
        real = random_realization(rng, K, N)
        v = np.exp(1j * rng.uniform(-np.pi, np.pi, N))
        G = real.effective(v)
        oracle = np.einsum("kjn,n->kj", real.cascaded, v) + real.direct
        np.testing.assert_allclose(G, oracle, atol=1e-12)
        np.testing.assert_allclose(real.effective(v, include_direct=False), oracle - real.direct, atol=1e-12)

    def test_arrays_are_read_only(self):
        real = random_realization(np.random.default_rng(1), 2, 3)
        with pytest.raises(ValueError):
            real.h_t[0, 0] = 1.0

    def test_blocked_direct_is_zero(self):
        rng = np.random.default_rng(2)
        real = ChannelRealization(complex_normal(rng, (2, 3)), complex_normal(rng, (2, 3)))
        assert not real.has_direct
        assert direct_cascaded_ratio(real) == 0.0

    def test_shape_mismatch(self):
        with pytest.raises(ChannelError):
            ChannelRealization(np.ones((2, 3)), np.ones((2, 4)))
        with pytest.raises(ChannelError):
            ChannelRealization(np.ones((2, 3)), np.ones((2, 3)), np.ones((3, 3)))


class TestSampling:
    def test_placement_within_regions(self):
        pl = sample_placement(50, 3)
        assert np.all((pl.tx_positions[:, 0] >= 5) & (pl.tx_positions[:, 0] <= 45))
        assert np.all((pl.tx_positions[:, 1] >= -45) & (pl.tx_positions[:, 1] <= -5))
        assert np.all((pl.rx_positions[:, 1] >= 5) & (pl.rx_positions[:, 1] <= 45))
        np.testing.assert_allclose(pl.tx_positions[:, 2], -20.0)

    def test_placement_validation(self):
        with pytest.raises(ChannelError):
            UserPlacement(np.zeros((2, 3)), np.zeros((3, 3)), np.zeros(3))

    def test_deterministic(self):
        pl = sample_placement(3, 5)
        a = sample_channel(RisGeometry(4, 4), pl, ChannelModelSpec(), 9)
        b = sample_channel(RisGeometry(4, 4), pl, ChannelModelSpec(), 9)
        np.testing.assert_array_equal(a.h_t, b.h_t)
        np.testing.assert_array_equal(a.h_r, b.h_r)

    def test_los_limit_has_unit_modulus_times_pathloss(self):
        pl = sample_placement(3, 5)
        real = sample_channel(RisGeometry(4, 4), pl, ChannelModelSpec("los"), 1)
        beta = 10 ** (path_loss_db(pl.tx_distances()) / 20)
        np.testing.assert_allclose(np.abs(real.h_t), np.broadcast_to(beta[:, None], (3, 16)))

    @pytest.mark.parametrize("kind", ["rician", "rayleigh", "sparse"])
    def test_average_power_matches_pathloss(self, kind):
        # every model is normalised so that E|h_i|^2 = beta^2
        pl = UserPlacement(np.array([[10.0, -10.0, -20.0]] * 400), np.array([[10.0, 10.0, -20.0]] * 400), np.zeros(3))
        real = sample_channel(RisGeometry(4, 4), pl, ChannelModelSpec(kind, 1.0, 5), 3)
        beta2 = 10 ** (path_loss_db(pl.tx_distances()[0]) / 10)
        assert np.mean(np.abs(real.h_t) ** 2) / beta2 == pytest.approx(1.0, rel=0.05)

    def test_unknown_kind(self):
        with pytest.raises(ChannelError):
            ChannelModelSpec("foo")

    def test_direct_models(self):
        pl = sample_placement(3, 1)
        np.testing.assert_array_equal(sample_direct(pl, None, 0), 0)
        np.testing.assert_array_equal(sample_direct(pl, -np.inf, 0), 0)
        unit = sample_direct(pl, 0.0, 4)
        np.testing.assert_allclose(sample_direct(pl, -20.0, 4), 0.1 * unit)
        with pytest.raises(ChannelError):
            sample_direct(pl, np.nan, 0)


def test_direct_cascaded_ratio_oracle():
    rng = np.random.default_rng(7)
    real = random_realization(rng, 3, 4)
    expected = max(
        abs(real.direct[k, j]) / np.abs(real.h_t[j] * real.h_r[k]).sum() for k in range(3) for j in range(3) if k != j
    )
    assert direct_cascaded_ratio(real) == pytest.approx(expected)


def test_fixture_round_trip(tmp_path):
    real = random_realization(np.random.default_rng(3), 2, 5)
    path = tmp_path / "fx.json"
    save_fixture(path, real, note="x")
    loaded, raw = load_fixture(path)
    np.testing.assert_array_equal(loaded.h_t, real.h_t)
    np.testing.assert_array_equal(loaded.direct, real.direct)
    assert raw["note"] == "x"
    data = json.loads(path.read_text())
    assert data["h_t"][0][0] == [real.h_t[0, 0].real, real.h_t[0, 0].imag]


def test_fixture_format_checked():
    d = realization_to_dict(random_realization(np.random.default_rng(3), 2, 2))
    d["format"] = "other"
    with pytest.raises(ChannelError):
        realization_from_dict(d)
    d = realization_to_dict(random_realization(np.random.default_rng(3), 2, 2))
    d["num_elements"] = 5
    with pytest.raises(ChannelError):
        realization_from_dict(d)
