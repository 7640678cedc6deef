"""Perpendicular dipole above gold against the closed-form image and plasmon terms."""

import numpy as np
import pytest

from strata.validation import (
    DREXHAGE_CHECK_GAPS, drexhage_curve, drexhage_validation, image_dipole_rate, monotone_after_peak,
    spp_pole_rate,
)


def test_image_term_hand_value():
    eps = -10 + 1j
    k0 = 2 * np.pi / 650
    R = (eps - 1) / (eps + 1)
    assert image_dipole_rate(eps, k0, 5.0) == pytest.approx(3 * R.imag / (8 * (k0 * 5.0) ** 3), rel=1e-15)


def test_spp_pole_is_a_pole():
    eps = -12.5 + 1.1j
    sp = np.sqrt(eps / (eps + 1))
    c1 = np.sqrt(1 - sp**2 + 0j)
    c1 = c1 if c1.imag >= 0 else -c1
    c2 = np.sqrt(eps - sp**2 + 0j)
    c2 = c2 if c2.imag >= 0 else -c2
    assert abs(eps * c1 + c2) < 1e-12 * abs(c2)
    assert spp_pole_rate(eps, 2 * np.pi / 650, 10.0) > 0


@pytest.mark.parametrize("gap", DREXHAGE_CHECK_GAPS)
def test_within_ten_percent(gap):
    (row,) = drexhage_curve([gap])
    assert row.rel_error < 0.10


def test_image_dominates_at_small_gap():
    (row,) = drexhage_curve([2.0])
    assert row.oracle_image > 0.9 * row.fp_total


def test_report():
    rep = drexhage_validation(gaps_nm=[2, 4, 6, 8, 10, 20, 50, 100])
    assert rep.passed and rep.monotone
    assert rep.max_rel_error < 0.1


@pytest.mark.parametrize("seq, ok", [([1, 5, 3, 2], True), ([5, 3, 4], False), ([1, 2, 3], True)])
def test_monotone_after_peak(seq, ok):
    assert monotone_after_peak(seq) is ok
