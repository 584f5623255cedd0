import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from edbsw import dwt2d, filterbank
from edbsw.errors import DimensionError

HAAR = filterbank.standard_bank("haar")
BCSSW = filterbank.derive_bcssw()[0]
EXACT = ["haar", "db2", "coif1", "sym4", "rbio3.5"]

grids = arrays(
    float,
    st.tuples(st.integers(16, 24), st.integers(16, 24)),
    elements=st.floats(0, 1, allow_nan=False),
)


class TestHaar:
    def test_two_by_two_hand_oracle(self):
        a, b, c, d = 1.0, 2.0, 3.0, 5.0
        dec = dwt2d.dwt2(np.array([[a, b], [c, d]]), HAAR)
        # analysis low/high rows: (x0+x1)/2, (x0-x1)/2, then the same down columns
        assert dec.cA[0, 0] == pytest.approx((a + b + c + d) / 4)
        assert dec.cH[0, 0] == pytest.approx((a + b - c - d) / 4)
        assert dec.cV[0, 0] == pytest.approx((a - b + c - d) / 4)
        assert dec.cD[0, 0] == pytest.approx((a - b - c + d) / 4)

    def test_roundtrip(self, rng):
        for _ in range(5):
            x = rng.random((32, 32))
            assert np.max(np.abs(dwt2d.idwt2(dwt2d.dwt2(x, HAAR), HAAR) - x)) < 1e-12


@pytest.mark.parametrize("name", EXACT)
class TestExactBanks:
    def test_roundtrip(self, name, rng):
        bank = filterbank.standard_bank(name)
        x = rng.random((24, 20))
        assert np.max(np.abs(dwt2d.idwt2(dwt2d.dwt2(x, bank), bank) - x)) < 1e-9

    def test_constant(self, name):
        bank = filterbank.standard_bank(name)
        dec = dwt2d.dwt2(np.full((16, 16), 0.3), bank)
        np.testing.assert_allclose(dec.cA, 0.3, atol=1e-12)
        for band in dec.details:
            assert np.max(np.abs(band)) < 1e-12


class TestBcssw:
    def test_constant_detail_bands_small(self):
        dec = dwt2d.dwt2(np.full((32, 32), 0.7), BCSSW)
        np.testing.assert_allclose(dec.cA, 0.7, atol=1e-12)
        assert max(np.max(np.abs(b)) for b in dec.details) < 1e-12

    def test_roundtrip_psnr(self, rng):
        x = rng.random((64, 64))
        err = np.mean((dwt2d.idwt2(dwt2d.dwt2(x, BCSSW), BCSSW) - x) ** 2)
        assert 10 * np.log10(1 / err) > 75

    def test_too_small(self):
        with pytest.raises(DimensionError):
            dwt2d.dwt2(np.zeros((10, 40)), BCSSW)


class TestProperties:
    @given(grids, grids, st.floats(-2, 2))
    def test_linear(self, x, y, a):
        h = min(x.shape[0], y.shape[0])
        w = min(x.shape[1], y.shape[1])
        x, y = x[:h, :w], y[:h, :w]
        lhs = dwt2d.dwt2(a * x + y, BCSSW)
        dx, dy = dwt2d.dwt2(x, BCSSW), dwt2d.dwt2(y, BCSSW)
        for name in ("cA", "cH", "cV", "cD"):
            np.testing.assert_allclose(
                getattr(lhs, name), a * getattr(dx, name) + getattr(dy, name), atol=1e-12
            )

    @given(grids)
    def test_haar_roundtrip_any_shape(self, x):
        out = dwt2d.idwt2(dwt2d.dwt2(x, HAAR), HAAR)
        assert out.shape == x.shape
        assert np.max(np.abs(out - x)) < 1e-12

    @given(grids)
    def test_subband_shapes(self, x):
        dec = dwt2d.dwt2(x, BCSSW)
        assert dec.cA.shape == ((x.shape[0] + 1) // 2, (x.shape[1] + 1) // 2)

    def test_shift_by_two_is_coefficient_shift(self, rng):
        # away from the border a shift by 2 pixels moves coefficients by 1
        x = rng.random((48, 48))
        shifted = np.roll(x, 2, axis=1)
        a = dwt2d.dwt2(x, BCSSW).cH
        b = dwt2d.dwt2(shifted, BCSSW).cH
        np.testing.assert_allclose(b[:, 10:14], a[:, 9:13], atol=1e-12)


class TestResampling:
    def test_upsample_example(self):
        out = dwt2d.upsample2(np.array([[0.0, 1.0]]))
        np.testing.assert_array_equal(out, [[0.0, 0.5, 1.0, 1.0], [0.0, 0.5, 1.0, 1.0]])

    def test_upsample_keeps_lattice(self, rng):
        x = rng.random((5, 7))
        up = dwt2d.upsample2(x)
        assert up.shape == (10, 14)
        np.testing.assert_array_equal(dwt2d.downsample2(up), x)

    def test_downsample_example(self):
        x = np.arange(16.0).reshape(4, 4)
        np.testing.assert_array_equal(dwt2d.downsample2(x), [[0, 2], [8, 10]])

    def test_downsample_too_small(self):
        with pytest.raises(DimensionError):
            dwt2d.downsample2(np.zeros((1, 4)))


class TestValidation:
    @pytest.mark.parametrize("bad", [np.zeros(5), np.zeros((0, 3)), np.zeros((2, 2, 2))])
    def test_shape(self, bad):
        with pytest.raises(DimensionError):
            dwt2d.as_grid(bad)

    def test_non_finite(self):
        x = np.zeros((4, 4))
        x[1, 1] = np.nan
        with pytest.raises(DimensionError):
            dwt2d.dwt2(x, HAAR)

    def test_decomposition_shape_check(self):
        z = np.zeros((4, 4))
        with pytest.raises(DimensionError):
            dwt2d.WaveletDecomposition(z, z, z, np.zeros((4, 5)), (8, 8))
        with pytest.raises(DimensionError):
            dwt2d.WaveletDecomposition(z, z, z, z, (10, 8))

    def test_odd_dimensions(self, rng):
        x = rng.random((33, 31))
        dec = dwt2d.dwt2(x, HAAR)
        assert dec.cA.shape == (17, 16)
        np.testing.assert_allclose(dwt2d.idwt2(dec, HAAR), x, atol=1e-12)
