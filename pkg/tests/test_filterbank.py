import json
import warnings

import numpy as np
import pytest

from edbsw import filterbank as fb
from edbsw.errors import ConstructionError, ParameterError

from conftest import DATA

GOLDEN = json.loads((DATA / "bcssw_golden.json").read_text())
LS = [4, 5, 6, 7]


@pytest.fixture(scope="module", params=LS)
def derived(request):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return fb.derive_bcssw(L=request.param)


class TestFilter:
    def test_indexing_outside_support(self):
        f = fb.Filter([1.0, 2.0, 3.0], -1)
        assert f[-1] == 1.0 and f[1] == 3.0 and f[5] == 0.0
        assert f.stop == 1 and f.center == 0.0

    def test_response_convention(self):
        f = fb.Filter([1.0, 1.0], 0)
        assert f.response(0.0) == pytest.approx(1.0)
        assert abs(f.response(np.pi)) < 1e-15

    def test_alternated(self):
        f = fb.Filter([1.0, 2.0, 3.0], -1)
        g = f.alternated()
        # g_k = (-1)^k f_{1-k}
        for k in range(g.start, g.stop + 1):
            assert g[k] == (-1) ** k * f[1 - k]

    def test_immutable(self):
        f = fb.Filter([1.0, 2.0], 0)
        with pytest.raises(ValueError):
            f.coeffs[0] = 5.0


class TestDerivedBank:
    def test_sum_and_symmetry(self, derived):
        bank, _ = derived
        for f in (bank.synthesis_low, bank.analysis_low):
            assert f.coeffs.sum() == pytest.approx(2.0, abs=1e-12)
            assert f.is_symmetric(1e-14)
            assert len(f) == 15 and f.start == -7
        assert bank.symmetry == "whole"

    def test_highs_are_alternated_lows(self, derived):
        bank, _ = derived
        np.testing.assert_array_equal(bank.analysis_high.coeffs, bank.synthesis_low.alternated().coeffs)
        np.testing.assert_array_equal(bank.synthesis_high.coeffs, bank.analysis_low.alternated().coeffs)

    def test_passes_screen(self, derived):
        _, report = derived
        assert report.max_deviation < fb.PR_SCREEN
        assert report.alias_max < 1e-12

    def test_matches_golden(self, derived):
        bank, report = derived
        doc = GOLDEN[str(bank.params["L"])]
        for key in ("synthesis_low", "analysis_low", "synthesis_high", "analysis_high"):
            np.testing.assert_allclose(getattr(bank, key).coeffs, doc[key], rtol=1e-10, atol=1e-14)
            assert getattr(bank, key).start == doc[key + "_start"]
        assert report.max_deviation == pytest.approx(doc["pr_max_deviation"], rel=1e-8)

    def test_json_roundtrip(self, derived):
        bank, report = derived
        doc = json.loads(fb.bank_to_json(bank, report))
        assert doc["name"] == "bcssw" and doc["taps"] == 15
        np.testing.assert_array_equal(doc["analysis_low"], bank.analysis_low.coeffs)

    def test_primal_zero_at_pi(self, derived):
        bank, _ = derived
        # moment correction forces H(pi) = 0 on both lows
        assert abs(bank.synthesis_low.response(np.pi)) < 1e-14
        assert abs(bank.analysis_low.response(np.pi)) < 1e-14


class TestDerivationControls:
    def test_deviation_monotone_in_taps(self):
        devs = [fb.derive_bcssw(L=5, taps=t, screen=False)[1].max_deviation for t in (9, 15, 21, 31)]
        assert all(b <= a for a, b in zip(devs, devs[1:]))

    def test_screen_rejects_short_bank(self):
        with pytest.raises(ConstructionError) as info:
            fb.derive_bcssw(L=5, taps=9)
        assert info.value.deviation > fb.PR_SCREEN

    def test_cached_and_deterministic(self):
        a = fb.derive_bcssw(L=4)[0]
        b = fb.derive_bcssw(L=4)[0]
        np.testing.assert_array_equal(a.analysis_low.coeffs, b.analysis_low.coeffs)

    @pytest.mark.parametrize(
        "kwargs", [{"L": 2}, {"L": 4.5}, {"taps": 14}, {"taps": 3}, {"degree": -1}, {"degree": 2.5}]
    )
    def test_bad_arguments(self, kwargs):
        with pytest.raises(ParameterError):
            fb.derive_bcssw(**kwargs)

    def test_untested_L_warns(self):
        with pytest.warns(UserWarning):
            fb.derive_bcssw(L=8, taps=31, screen=False)

    def test_metadata(self):
        bank, report = fb.derive_bcssw()
        assert bank.params == {"L": 4, "taps": 15, "degree": 8, "fit_status": "warning"}
        assert report.periodization_error == pytest.approx(0.0365, abs=5e-4)


class TestPeriodize:
    def test_degree_zero_is_mean(self):
        from edbsw import splinecore

        fit = fb.periodize_response(0)
        w = np.linspace(0, np.pi, 4096)
        assert fit.coeffs[0] == pytest.approx(splinecore.eval_Q(w).mean(), rel=1e-12)

    def test_error_decreases_with_degree(self):
        errs = [fb.periodize_response(d).max_error for d in (2, 4, 8)]
        assert errs[0] >= errs[1] >= errs[2]

    def test_status(self):
        assert fb.periodize_response(8).status == "warning"
        assert fb.periodize_response(8).max_error > fb.FIT_TARGET

    def test_periodic(self):
        fit = fb.periodize_response(8)
        w = np.linspace(-3, 3, 7)
        np.testing.assert_allclose(fit(w), fit(w + 2 * np.pi), atol=1e-12)

    def test_bad_degree(self):
        with pytest.raises(ParameterError):
            fb.periodize_response(-2)


class TestStandardBanks:
    @pytest.mark.parametrize("name", fb.STANDARD_NAMES)
    def test_perfect_reconstruction(self, name):
        report = fb.verify_pr(fb.standard_bank(name))
        assert report.max_deviation < fb.STANDARD_TOL
        assert report.alias_max < 1e-8

    def test_haar_exact(self):
        bank = fb.standard_bank("haar")
        np.testing.assert_array_equal(bank.analysis_low.coeffs, [1.0, 1.0])
        assert fb.verify_pr(bank).max_deviation < 1e-12
        assert bank.symmetry == "half"

    @pytest.mark.parametrize("name", ["db2", "coif1", "sym4"])
    def test_orthogonal_have_no_symmetry(self, name):
        assert fb.standard_bank(name).symmetry is None

    def test_case_insensitive(self):
        upper = fb.standard_bank("HAAR")
        assert upper.name == "haar"
        np.testing.assert_array_equal(upper.analysis_low.coeffs, fb.standard_bank("haar").analysis_low.coeffs)

    def test_unknown(self):
        with pytest.raises(LookupError):
            fb.standard_bank("meyer")

    def test_resolve(self):
        assert fb.resolve_bank("db2") is fb.standard_bank("db2")
        assert fb.resolve_bank("bcssw").name == "bcssw"


def test_verify_pr_detects_broken_bank():
    bank, _ = fb.derive_bcssw()
    broken = fb.FilterBank.from_lows("broken", fb.Filter(np.zeros(15), -7), bank.analysis_low)
    assert fb.verify_pr(broken).max_deviation >= 0.99


def test_verify_pr_grid_too_small():
    with pytest.raises(ParameterError):
        fb.verify_pr(fb.standard_bank("haar"), grid_size=8)
