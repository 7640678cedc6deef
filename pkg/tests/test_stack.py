"""Interface and multilayer coefficients.

The independent oracle here is the textbook characteristic-matrix (transfer
matrix) product, which is fine at moderate in-plane wavevectors where it does
not overflow.
"""

import numpy as np
import pytest
from hypothesis import given, strategies as st

from strata.materials import ConstantIndex, get_material
from strata.stack import (
    Layer, LayerStack, SMatrix, admittance, fresnel, half_space_response, kz_normalized, preset, smatrix,
)

K0 = 2 * np.pi / 900


def transfer_matrix_r(eps, thick, beta, pol):
    """Reflection from medium 0 via characteristic matrices (Born & Wolf form)."""
    q = [admittance(pol, e, kz_normalized(e, beta)) for e in eps]
    kz = [kz_normalized(e, beta) for e in eps]
    M = np.eye(2, dtype=complex)
    for j in range(1, len(eps) - 1):
        d = K0 * kz[j] * thick[j - 1]
        M = M @ np.array([[np.cos(d), -1j * np.sin(d) / q[j]], [-1j * q[j] * np.sin(d), np.cos(d)]])
    q0, qn = q[0], q[-1]
    num = q0 * M[0, 0] + q0 * qn * M[0, 1] - M[1, 0] - qn * M[1, 1]
    den = q0 * M[0, 0] + q0 * qn * M[0, 1] + M[1, 0] + qn * M[1, 1]
    return num / den


def test_normal_incidence_closed_form():
    assert fresnel(1.0, 1.45**2, 0.0, "s") == pytest.approx((1 - 1.45) / (1 + 1.45), abs=1e-15)


@pytest.mark.parametrize("pol", ["s", "p"])
@given(s=st.floats(0, 50), e=st.complex_numbers(max_magnitude=30).filter(lambda z: z.imag >= 0 and abs(z) > 0.1))
def test_no_interface_no_reflection(pol, s, e):
    assert abs(fresnel(e, e, s, pol)) < 1e-12


@pytest.mark.parametrize("pol", ["s", "p"])
def test_total_internal_reflection_onset(pol):
    r = fresnel(1.5**2, 1.0, 1 / 1.5, pol)
    assert abs(r) == pytest.approx(1.0, abs=1e-12)


def test_perfect_conductor_signs():
    assert fresnel(1.0, -1e12, 0.3, "s") == pytest.approx(-1, abs=1e-5)
    assert fresnel(1.0, -1e12, 0.3, "p") == pytest.approx(1, abs=1e-5)


@pytest.mark.parametrize("side", ["up", "down"])
def test_empty_side(side):
    st_ = LayerStack(get_material("glass"), (), get_material("air"))
    layer = 1 if side == "up" else 0
    r = half_space_response(st_, layer, side, 900, np.linspace(0, 3, 7))
    assert r.empty
    np.testing.assert_array_equal(r.r_s, 0)
    np.testing.assert_array_equal(r.t_p, 1)


@pytest.mark.parametrize("pol", ["s", "p"])
def test_thick_gold_slab_matches_half_space(pol):
    au, air = get_material("Au"), get_material("air")
    slab = LayerStack(air, (Layer(au, 200.0),), air)
    s = np.linspace(0, 3, 31)
    r = half_space_response(slab, 0, "up", 900, s).r(pol)
    r_inf = fresnel(1.0, au.eps(900), s, pol)
    assert np.max(np.abs(r - r_inf)) < 1e-6


def _random_stack(draw_eps, draw_d):
    return draw_eps, draw_d


eps_lossless = st.floats(1.0, 7.0)
eps_lossy = st.builds(complex, st.floats(-40, 10), st.floats(0.05, 5))


@st.composite
def dielectric_stack(draw, lossy=False):
    n = draw(st.integers(1, 5))
    media = draw(st.lists(eps_lossy if lossy else eps_lossless, min_size=n + 2, max_size=n + 2))
    thick = draw(st.lists(st.floats(5, 300), min_size=n, max_size=n))
    return [complex(e) for e in media], thick


@pytest.mark.parametrize("pol", ["s", "p"])
@given(stack=dielectric_stack(lossy=True), s=st.floats(0, 2.5))
def test_matches_transfer_matrix(pol, stack, s):
    eps, thick = stack
    beta = s * np.sqrt(eps[0]).real
    S = smatrix(eps, thick, beta, K0, pol)
    ref = transfer_matrix_r(eps, thick, beta, pol)
    assert abs(S.r_l - ref) < 1e-9 * max(1.0, abs(ref))


@pytest.mark.parametrize("pol", ["s", "p"])
@given(stack=dielectric_stack(), frac=st.floats(0, 0.999))
def test_energy_lossless(pol, stack, frac):
    eps, thick = stack
    # propagating in both claddings
    beta = frac * min(np.sqrt(eps[0]).real, np.sqrt(eps[-1]).real)
    S = smatrix(eps, thick, beta, K0, pol)
    q0 = admittance(pol, eps[0], kz_normalized(eps[0], beta))
    qn = admittance(pol, eps[-1], kz_normalized(eps[-1], beta))
    T = abs(S.t_lr) ** 2 * qn.real / q0.real
    assert abs(S.r_l) ** 2 + T == pytest.approx(1.0, abs=1e-9)


@pytest.mark.parametrize("pol", ["s", "p"])
@given(stack=dielectric_stack(lossy=True), s=st.floats(0, 20))
def test_reciprocity(pol, stack, s):
    eps, thick = stack
    beta = s
    S = smatrix(eps, thick, beta, K0, pol)
    q0 = admittance(pol, eps[0], kz_normalized(eps[0], beta))
    qn = admittance(pol, eps[-1], kz_normalized(eps[-1], beta))
    assert S.t_lr / q0 == pytest.approx(S.t_rl / qn, rel=1e-9, abs=1e-300)


@pytest.mark.parametrize("pol", ["s", "p"])
@given(stack=dielectric_stack(lossy=True), s=st.floats(0, 20), data=st.data())
def test_composition(pol, stack, s, data):
    eps, thick = stack
    k = data.draw(st.integers(1, len(eps) - 2))
    full = smatrix(eps, thick, s, K0, pol)
    A = smatrix(eps[: k + 1], thick[: k - 1], s, K0, pol)
    B = smatrix(eps[k:], thick[k:], s, K0, pol)
    P = SMatrix.propagation(np.exp(1j * K0 * kz_normalized(eps[k], s) * thick[k - 1]))
    C = A.star(P).star(B)
    for a, b in [(full.r_l, C.r_l), (full.t_lr, C.t_lr), (full.r_r, C.r_r), (full.t_rl, C.t_rl)]:
        assert abs(a - b) <= 1e-12 * max(1.0, abs(a))


@pytest.mark.parametrize("pol", ["s", "p"])
def test_thin_layer_continuity(pol):
    base = [1.45**2, get_material("Au").eps(900), 2.3**2, 1.0]
    thick = [30.0, 50.0]
    s = np.linspace(0, 5, 51)
    a = smatrix(base, thick, s, K0, pol)
    b = smatrix(base[:2] + [4.0] + base[2:], [30.0, 1e-10, 50.0], s, K0, pol)
    assert np.max(np.abs(a.r_l - b.r_l)) < 1e-9
    assert np.max(np.abs(a.t_lr - b.t_lr)) < 1e-9


@pytest.mark.parametrize("name", ["au-pva", "au-pva-zns", "au-zns"])
@pytest.mark.parametrize("side", ["up", "down"])
def test_finite_at_large_s(name, side):
    s = np.geomspace(1e-3, 1000, 400)
    r = half_space_response(preset(name), 3, side, 900, s)
    for a in (r.r_s, r.r_p, r.t_s, r.t_p):
        assert np.all(np.isfinite(a))


@given(stack=dielectric_stack(), frac=st.floats(0, 0.999))
def test_reflectance_bounded_lossless(stack, frac):
    eps, thick = stack
    beta = frac * np.sqrt(eps[0]).real
    for pol in "sp":
        assert abs(smatrix(eps, thick, beta, K0, pol).r_l) ** 2 <= 1 + 1e-9


def test_presets_geometry():
    st_ = preset("au-zns")
    assert [l.thickness_nm for l in st_.layers] == [30, 30, 50, 30, 30]
    assert [l.material.name for l in st_.layers] == ["ZnS", "Au", "ZnS", "Au", "ZnS"]
    assert st_.lower.name == "glass" and st_.upper.name == "air"
    assert [l.material.name for l in preset("au-pva").layers] == ["PVA", "Au", "PVA", "Au", "PVA"]


def test_flipped_twice_identity():
    st_ = preset("au-pva-zns")
    assert st_.flipped().flipped() == st_


def test_layer_rejects_bad_thickness():
    with pytest.raises(ValueError):
        Layer(ConstantIndex("x", n=1.5), 0.0)
    with pytest.raises(ValueError):
        Layer(ConstantIndex("x", n=1.5), float("inf"))
