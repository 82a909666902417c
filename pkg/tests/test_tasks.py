import numpy as np
import pytest

from dfrc.errors import DatasetError
from dfrc.tasks import (
    CHANNEL_TAPS,
    channel_output,
    gen_channel_eq,
    gen_narma10,
    load_santa_fe,
    read_series,
)


class TestNarma:
    def test_zero_input_hook(self):
        ds = gen_narma10(20, inputs_override=np.zeros(20))
        assert ds.targets[0] == pytest.approx(0.1)
        assert ds.targets[1] == pytest.approx(0.1305, abs=1e-12)

    def test_recursion_oracle(self):
        ds = gen_narma10(300, seed=3)
        x = ds.inputs
        y = [0.0]
        for k in range(300):
            hist = sum(y[max(0, k - 9):k + 1])
            y.append(0.3 * y[k] + 0.05 * y[k] * hist + 1.5 * x[k] * (x[k - 9] if k >= 9 else 0.0) + 0.1)
        np.testing.assert_allclose(ds.targets, y[1:], rtol=1e-12)

    def test_split_and_range(self):
        ds = gen_narma10(2000, seed=0)
        assert (ds.train_len, ds.test_len) == (1000, 1000)
        a, b, c, d = ds.split()
        assert a.size == b.size == c.size == d.size == 1000
        assert ds.inputs.min() >= 0.0 and ds.inputs.max() <= 0.5

    def test_deterministic_per_seed(self):
        assert np.array_equal(gen_narma10(500, seed=7).inputs, gen_narma10(500, seed=7).inputs)
        assert not np.array_equal(gen_narma10(500, seed=7).inputs, gen_narma10(500, seed=8).inputs)

    def test_divergent_override_raises(self):
        with pytest.raises(DatasetError):
            gen_narma10(200, inputs_override=np.full(200, 5.0))

    def test_csv(self, tmp_path):
        ds = gen_narma10(30, seed=1)
        ds.to_csv(tmp_path / "d.csv")
        lines = (tmp_path / "d.csv").read_text().splitlines()
        assert lines[0].startswith("#")
        assert lines[1] == "input,target"
        assert len(lines) == 32


def write(path, values):
    path.write_text("".join(f"{v}\n" for v in values))
    return path


class TestSantaFe:
    def test_normalized_one_step_ahead(self, tmp_path):
        ds = load_santa_fe(write(tmp_path / "s.txt", [10, 20, 30, 50, 40, 0]), 3, 2)
        np.testing.assert_allclose(ds.inputs, [0.2, 0.4, 0.6, 1.0, 0.8])
        np.testing.assert_allclose(ds.targets, [0.4, 0.6, 1.0, 0.8, 0.0])
        assert ds.train_len == 3

    def test_only_used_segment_is_scaled(self, tmp_path):
        ds = load_santa_fe(write(tmp_path / "s.txt", [0, 1, 2, 1000]), 2, 0)
        np.testing.assert_allclose(ds.inputs, [0.0, 0.5])

    def test_parse_error_reports_line(self, tmp_path):
        path = tmp_path / "s.txt"
        path.write_text("1\n2\n\nabc\n")
        with pytest.raises(DatasetError, match="line 4"):
            read_series(path)

    def test_short_and_constant(self, tmp_path):
        with pytest.raises(DatasetError):
            load_santa_fe(write(tmp_path / "a.txt", [1, 2, 3]), 2, 1)
        with pytest.raises(DatasetError):
            load_santa_fe(write(tmp_path / "b.txt", [4] * 10), 4, 4)
        with pytest.raises(OSError):
            load_santa_fe(tmp_path / "missing.txt")


def channel_oracle(d):
    n = len(d)
    x = []
    for i in range(n):
        q = sum(c * d[i - k] for k, c in CHANNEL_TAPS.items() if 0 <= i - k < n)
        x.append(q + 0.036 * q * q - 0.011 * q ** 3)
    return np.array(x)


class TestChannel:
    def test_impulse(self):
        d = np.zeros(20)
        d[5] = 1.0
        clean, noisy = channel_output(d)
        assert clean[5] == pytest.approx(1.025)
        np.testing.assert_array_equal(clean, noisy)

    def test_zero_symbols(self):
        ds = gen_channel_eq(50, symbols_override=np.zeros(50), noiseless=True)
        assert not ds.inputs.any()

    def test_matches_oracle(self):
        ds = gen_channel_eq(300, seed=4, noiseless=True)
        np.testing.assert_allclose(ds.inputs, channel_oracle(ds.targets.tolist()), rtol=1e-12, atol=1e-12)

    @pytest.mark.parametrize("snr", [12.0, 24.0, 32.0])
    def test_empirical_snr(self, snr):
        ds = gen_channel_eq(9000, snr_db=snr, seed=2)
        clean, _ = channel_output(ds.targets)
        measured = 10 * np.log10(clean.var() / (ds.inputs - clean).var())
        assert abs(measured - snr) <= 0.5

    def test_snr_sweep_shares_symbols(self):
        a = gen_channel_eq(900, snr_db=12, seed=9)
        b = gen_channel_eq(900, snr_db=32, seed=9)
        np.testing.assert_array_equal(a.targets, b.targets)
        assert set(np.unique(a.targets)) <= {-3.0, -1.0, 1.0, 3.0}
        assert (a.train_len, a.test_len) == (600, 300)
