import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pinchsim.config import SystemConfig
from pinchsim.coop import SCHEMES, CoopConfig, coop_best_scheme, coop_snr

ETA = SystemConfig().eta

coop_configs = st.builds(
    CoopConfig,
    n_b=st.integers(1, 64),
    p=st.integers(1, 16),
    n=st.integers(1, 16),
    l_b=st.floats(10.0, 500.0),
    l_g=st.floats(1.0, 50.0),
    gamma_t=st.floats(1e3, 1e12),
    xi_b=st.floats(2.0, 5.0),
    xi_p=st.floats(2.0, 4.0),
)


def test_formulas_term_by_term():
    coop = CoopConfig(n_b=8, p=4, n=16, l_b=120.0, l_g=15.0, gamma_t=1e8)
    bs = ETA * 8 / 120.0**3.5
    pin = ETA * 16 / 15.0**2.0
    assert coop_snr("BS_only", coop, ETA) == pytest.approx(bs * 1e8, rel=1e-12)
    assert coop_snr("SD", coop, ETA) == pytest.approx(
        (bs * 8 / 12 + pin * 4 / 12) * 1e8, rel=1e-12
    )
    assert coop_snr("SCD", coop, ETA) == pytest.approx(
        (bs * 8 / 12 + pin * 16 / 12) * 1e8, rel=1e-12
    )
    assert coop_snr("FCD", coop, ETA) == pytest.approx(
        (bs + pin * 4) * 1e8, rel=1e-12
    )


@settings(max_examples=200, deadline=None)
@given(coop=coop_configs)
def test_cooperation_ordering(coop):
    sd = coop_snr("SD", coop, ETA)
    scd = coop_snr("SCD", coop, ETA)
    fcd = coop_snr("FCD", coop, ETA)
    assert fcd >= scd >= sd > 0.0


@settings(max_examples=100, deadline=None)
@given(coop=coop_configs)
def test_single_waveguide_makes_sd_and_scd_equal(coop):
    single = CoopConfig(
        n_b=coop.n_b, p=1, n=coop.n, l_b=coop.l_b, l_g=coop.l_g,
        gamma_t=coop.gamma_t, xi_b=coop.xi_b, xi_p=coop.xi_p,
    )
    assert coop_snr("SD", single, ETA) == coop_snr("SCD", single, ETA)


def test_best_scheme_is_fcd():
    coop = CoopConfig(n_b=8, p=4, n=16, l_b=120.0, l_g=15.0, gamma_t=1e8)
    assert coop_best_scheme(coop, ETA) == "FCD"


def test_snr_scales_linearly_with_transmit_snr():
    a = CoopConfig(n_b=8, p=4, n=16, l_b=120.0, l_g=15.0, gamma_t=1e8)
    b = CoopConfig(n_b=8, p=4, n=16, l_b=120.0, l_g=15.0, gamma_t=2e8)
    for s in SCHEMES:
        assert coop_snr(s, b, ETA) == pytest.approx(2.0 * coop_snr(s, a, ETA))


def test_validation():
    with pytest.raises(ValueError):
        CoopConfig(n_b=0, p=1, n=1, l_b=10.0, l_g=5.0, gamma_t=1e6)
    with pytest.raises(ValueError):
        CoopConfig(n_b=1, p=1, n=1, l_b=-1.0, l_g=5.0, gamma_t=1e6)
    with pytest.raises(ValueError):
        CoopConfig(n_b=1, p=1, n=1, l_b=10.0, l_g=5.0, gamma_t=1e6, xi_b=1.5)
    coop = CoopConfig(n_b=1, p=1, n=1, l_b=10.0, l_g=5.0, gamma_t=1e6)
    with pytest.raises(ValueError):
        coop_snr("bogus", coop, ETA)
    with pytest.raises(ValueError):
        coop_snr("SD", coop, -1.0)
