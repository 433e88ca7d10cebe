"""Parameter containers, validation, serialization and detector models."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cavqmem.errors import (
    GammaZero,
    InvalidField,
    NegativeGamma,
    NonFiniteField,
    NonPositiveKappa,
    ZeroCoupling,
)
from cavqmem.params import (
    AtomQubit,
    DetectorModel,
    PhotonQubit,
    Profile,
    PulseSpec,
    SystemParams,
    as_detector,
    cooperativity,
    point_from_dict,
    point_to_dict,
    require_normalized,
    rescaled,
    validate,
    validate_pulse,
)


def test_defaults_describe_symmetric_strong_coupling():
    p = SystemParams()
    assert p.lambda_L == p.lambda_R == pytest.approx(math.sqrt(10.0))
    assert p.kappa == 2.0 and p.gamma == 1.0
    assert cooperativity(p) == pytest.approx(10.0)
    assert p.xi == pytest.approx(math.pi / 4)
    assert p.sin_2xi == 1.0


def test_mixing_angle_matches_coupling_ratio():
    p = SystemParams(lambda_L=3.0, lambda_R=4.0)
    assert p.lambda_sq == pytest.approx(25.0)
    assert p.sin_xi == pytest.approx(3.0 / 5.0)
    assert p.cos_xi == pytest.approx(4.0 / 5.0)
    assert p.sin_2xi == pytest.approx(24.0 / 25.0)
    assert p.xi == pytest.approx(math.atan2(3.0, 4.0))


@pytest.mark.parametrize("bad, exc", [
    (dict(kappa=0.0), NonPositiveKappa),
    (dict(kappa=-1.0), NonPositiveKappa),
    (dict(gamma=-0.5), NegativeGamma),
    (dict(lambda_L=0.0, lambda_R=0.0), ZeroCoupling),
    (dict(delta_e=math.nan), NonFiniteField),
    (dict(k_c=math.inf), NonFiniteField),
])
def test_validate_rejects_unphysical_fields(bad, exc):
    with pytest.raises(exc):
        validate(SystemParams(**bad))


def test_validate_accepts_zero_gamma():
    # gamma = 0 is the lossless limit, not an error
    validate(SystemParams(gamma=0.0))
    with pytest.raises(GammaZero):
        cooperativity(SystemParams(gamma=0.0))


@pytest.mark.parametrize("bad, exc", [
    (dict(kappa_p=0.0), NonPositiveKappa),
    (dict(kappa_p=-0.2), NonPositiveKappa),
    (dict(delta_p=math.nan), NonFiniteField),
])
def test_validate_pulse_rejects_unphysical_fields(bad, exc):
    with pytest.raises(exc):
        validate_pulse(PulseSpec(**bad))


def test_pulse_accepts_profile_as_string():
    assert PulseSpec(profile="lorentzian").profile is Profile.LORENTZIAN


def test_point_dict_round_trip():
    params = SystemParams(lambda_L=1.5, lambda_R=0.5, theta_L=0.3,
                          theta_R=-0.2, kappa=1.1, gamma=0.7, k_c=2.0,
                          delta_e=-3.0)
    pulse = PulseSpec(profile=Profile.LORENTZIAN, delta_p=0.4, kappa_p=0.05,
                      x_0=7.0)
    data = point_to_dict(params, pulse)
    assert data["profile"] == "lorentzian"
    back_p, back_u = point_from_dict(data)
    assert back_p == params
    assert back_u == pulse


def test_point_from_dict_fills_defaults_and_rejects_unknown_keys():
    params, pulse = point_from_dict({"kappa": 3.0})
    assert params.kappa == 3.0
    assert params.lambda_L == SystemParams().lambda_L
    assert pulse == PulseSpec()
    with pytest.raises(InvalidField):
        point_from_dict({"kapa": 3.0})
    with pytest.raises(InvalidField):
        point_from_dict({"profile": "boxcar"})


def test_qubit_normalization_helpers():
    q = PhotonQubit(3.0, 4.0j)
    assert q.norm_sq == pytest.approx(25.0)
    n = q.normalized()
    assert n.norm_sq == pytest.approx(1.0)
    require_normalized(n)
    with pytest.raises(ValueError):
        require_normalized(q)
    a = AtomQubit(1.0, 1.0).normalized()
    assert a.norm_sq == pytest.approx(1.0)


def test_constant_detector_bounds():
    d = DetectorModel.constant(0.8)
    assert d.is_constant
    np.testing.assert_allclose(d(np.array([-1.0, 0.0, 5.0])), 0.8)
    for bad in (0.0, -0.1, 1.2):
        with pytest.raises(ValueError):
            DetectorModel.constant(bad)
    assert as_detector(0.5)(0.0) == pytest.approx(0.5)
    assert as_detector(d) is d


def test_tabulated_detector_interpolates_and_clamps():
    d = DetectorModel.tabulated([-1.0, 0.0, 1.0], [0.2, 0.6, 0.4])
    np.testing.assert_allclose(d(np.array([-0.5, 0.5])), [0.4, 0.5])
    # flat beyond the table
    np.testing.assert_allclose(d(np.array([-9.0, 9.0])), [0.2, 0.4])
    with pytest.raises(ValueError):
        DetectorModel.tabulated([0.0, 0.0], [0.5, 0.5])
    with pytest.raises(ValueError):
        DetectorModel.tabulated([0.0], [0.5])


@settings(deadline=None, max_examples=50)
@given(factor=st.floats(min_value=0.05, max_value=20.0))
def test_rescaling_preserves_dimensionless_combinations(factor):
    params, pulse = SystemParams(delta_e=1.3, k_c=0.4), PulseSpec(delta_p=0.7)
    sp, su = rescaled(params, pulse, factor)
    assert cooperativity(sp) == pytest.approx(cooperativity(params), rel=1e-12)
    assert sp.xi == pytest.approx(params.xi, rel=1e-12)
    assert su.kappa_p / sp.kappa == pytest.approx(pulse.kappa_p / params.kappa,
                                                 rel=1e-12)
    assert sp.delta_e / sp.gamma == pytest.approx(params.delta_e / params.gamma,
                                                  rel=1e-12)


def test_rescaling_rejects_nonpositive_factor():
    with pytest.raises(ValueError):
        rescaled(SystemParams(), PulseSpec(), 0.0)
