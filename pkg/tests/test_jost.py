import math

import numpy as np
import pytest

import bicscatter as bs


def _uv_reference(params, k, r):
    """Reference re-derivation of the oscillator amplitudes (u, v).

    Written directly from the displayed closed forms, term by term and in
    display order, with no shared scaffolding with the production code:
    production groups by trigonometric basis function with hoisted
    coefficients, this keeps each displayed line intact. Agreement between
    the two transcriptions is the strongest guard we have against a copying
    slip in either one.
    """
    ph = bs.phase_data(params)
    q = params.q
    g = r + ph.gamma0
    g1, g2 = ph.gamma1, ph.gamma2
    th = q * r + ph.delta

    kk = k * k
    qq = q * q
    dsq = kk - qq                      # k^2 - q^2
    A = kk * kk + 6 * qq * kk + qq * qq
    B = kk * kk - 4 * qq * kk - qq * qq
    C = kk * kk - qq * qq
    s2, c2 = np.sin(2 * th), np.cos(2 * th)

    u = (
        16 * q**4 * dsq**2 * g**4
        - 12 * qq * A * g**2
        + 8 * g2 * q**4 * dsq**2 * g
        - 12 * g1**2 * q**4 * dsq**2
        + 24 * qq * (B * g**2 + q * g1 * C * g) * c2
        + (16 * q**3 * C * g**3 - 12 * q * B * g - 4 * g2 * q**3 * C
           - 12 * g1 * qq * B) * s2
        + 3 * A * s2**2
    )
    v = (
        64 * q**4 * k * dsq * g**3
        - 24 * qq * k * (kk + qq) * g
        + 8 * g2 * q**4 * k * dsq
        - 48 * g1 * q**5 * k
        + (32 * q**4 * k * dsq * g**3 + 24 * qq * k * (kk + qq) * g
           - 8 * g2 * q**4 * k * dsq + 48 * g1 * q**5 * k) * c2
        + (96 * q**5 * k * g**2 - 48 * g1 * q**4 * k * dsq * g
           - 12 * q * k * (kk + qq)) * s2
        + 6 * q * k * (kk + qq) * np.sin(4 * th)
    )
    return u, v


@pytest.mark.parametrize("alpha,beta,q", [
    (1.0, 3.0, 1.0),
    (0.8, 2.1, 1.3),
    (1.5, 0.9, 0.6),
])
def test_uv_against_reference_transcription(alpha, beta, q):
    p = bs.PotentialParams(alpha=alpha, beta=beta, q=q)
    r = np.array([0.0, 0.3, 1.0, 2.5, 7.0, 31.0])
    for k in (2.0, 1.5, 0.35, 1.2 - 0.3j, 0.4 + 0.05j):
        b = bs.uv_bundle(p, k, r)
        u_ref, v_ref = _uv_reference(p, k, r)
        scale = np.maximum(1.0, np.abs(u_ref))
        assert np.max(np.abs(b.u - u_ref) / scale) < 1e-12
        assert np.max(np.abs(b.v - v_ref) / scale) < 1e-12


def test_v_vanishes_at_zero_momentum():
    p = bs.PotentialParams.bic()
    r = np.linspace(0.0, 20.0, 101)
    b = bs.uv_bundle(p, 0.0, r)
    assert np.max(np.abs(b.v)) < 1e-14 * max(1.0, np.max(np.abs(b.u)))


def test_uv_real_for_real_k():
    p = bs.PotentialParams.bic()
    b = bs.uv_bundle(p, 1.7, np.linspace(0.1, 10.0, 50))
    assert np.all(np.isreal(b.u)) and np.all(np.isreal(b.v))


def test_uv_conjugation_symmetry():
    # coefficients are real polynomials in k, so u(conj k) = conj(u(k))
    p = bs.PotentialParams.bic()
    r = np.array([0.5, 2.0, 9.0])
    k = 1.1 - 0.2j
    b = bs.uv_bundle(p, k, r)
    bc = bs.uv_bundle(p, np.conj(k), r)
    assert np.allclose(bc.u, np.conj(b.u), rtol=1e-13, atol=0)
    assert np.allclose(bc.v, np.conj(b.v), rtol=1e-13, atol=0)


def test_uv_derivatives_match_finite_differences():
    p = bs.PotentialParams.bic()
    h = 1e-6
    for k in (2.0, 0.9 - 0.1j):
        for r in (0.4, 3.3, 12.0):
            b = bs.uv_bundle(p, k, r)
            bp = bs.uv_bundle(p, k, r + h)
            bm = bs.uv_bundle(p, k, r - h)
            assert complex(b.u_r) == pytest.approx((complex(bp.u) - complex(bm.u)) / (2 * h), rel=1e-7)
            assert complex(b.v_r) == pytest.approx((complex(bp.v) - complex(bm.v)) / (2 * h), rel=1e-7)


def test_outgoing_asymptotics():
    """The flux-normalized outgoing solution tends to a pure plane wave:
    F+ e^{-ikr} -> 1 far out."""
    p = bs.PotentialParams.bic()
    jv = bs.jost_value(p, 2.0, 5000.0)
    assert abs(jv.F_plus * np.exp(-2.0j * 5000.0) - 1.0) < 1e-2


def test_wronskian_identity_spot():
    p = bs.PotentialParams.bic()
    q = p.q
    for k, r in [(1.5, 3.0), (0.4, 11.0), (2.3 - 0.2j, 0.7)]:
        jv = bs.jost_value(p, k, r, normalized=False)
        w = jv.f_plus * jv.f_minus_r - jv.f_minus * jv.f_plus_r
        expected = -2j * k * (k**2 - q**2) ** 4
        assert abs(w - expected) < 1e-10 * abs(expected)


def test_wronskian_vanishes_at_coalescence():
    p = bs.PotentialParams.bic()
    r = 2.0
    jv = bs.jost_value(p, p.q, r, normalized=False)
    w = jv.f_plus * jv.f_minus_r - jv.f_minus * jv.f_plus_r
    scale = abs(jv.f_plus) * abs(jv.f_minus_r) + abs(jv.f_minus) * abs(jv.f_plus_r)
    assert abs(w) < 1e-10 * scale


def test_solutions_coalesce_at_k_equals_q():
    """Approaching k=q, e^{i delta} f+ and e^{-i delta} f- merge into the
    same (normalizable) solution; the difference shrinks linearly."""
    p = bs.PotentialParams.bic()
    delta = bs.phase_data(p).delta
    r = np.array([0.3, 1.0, 2.5])

    def gap(offset):
        jv = bs.jost_value(p, p.q + offset, r, normalized=False)
        diff = jv.f_plus * np.exp(1j * delta) - jv.f_minus * np.exp(-1j * delta)
        return np.max(np.abs(diff)) / np.max(np.abs(jv.f_plus))

    assert gap(1e-4) < 1e-3
    assert gap(-1e-4) < 1e-3
    assert gap(1e-4) < 0.5 * gap(1e-3)


def test_coalesced_solution_is_the_trapped_state():
    # at k=q exactly, f± equal 4q^2 e^{∓i delta} times the trapped-state
    # profile, for any parameter set on the constraint line
    for p in (bs.PotentialParams.bic(), bs.PotentialParams.bic(alpha=0.7, q=1.3)):
        ph = bs.phase_data(p)
        raw = bs.BoundState(params=p, phase=ph, norm=1.0)
        r = np.array([0.2, 0.9, 3.1, 14.0])
        jv = bs.jost_value(p, p.q, r, normalized=False)
        target_plus = 4 * p.q**2 * np.exp(-1j * ph.delta) * raw.raw(r)
        target_minus = 4 * p.q**2 * np.exp(1j * ph.delta) * raw.raw(r)
        scale = np.max(np.abs(target_plus))
        assert np.max(np.abs(jv.f_plus - target_plus)) < 1e-10 * scale
        assert np.max(np.abs(jv.f_minus - target_minus)) < 1e-10 * scale


def test_flux_normalization_blocked_at_singular_point():
    p = bs.PotentialParams.bic()
    with pytest.raises(bs.NearSpectralSingularity):
        bs.jost_value(p, 1.0 + 1e-9, 2.0)
    # raw solutions remain available
    jv = bs.jost_value(p, 1.0 + 1e-9, 2.0, normalized=False)
    assert jv.F_plus is None and jv.F_minus is None
    assert np.isfinite(jv.f_plus).all() if isinstance(jv.f_plus, np.ndarray) else np.isfinite(jv.f_plus)
    # just outside the guard band everything works
    jv2 = bs.jost_value(p, 1.001, 2.0)
    assert jv2.F_plus is not None


def test_bound_state_norm_squared(psi_b):
    # the closed-form norm for alpha=1, q=1 is 10/3
    assert psi_b.norm**2 == pytest.approx(10.0 / 3.0, rel=1e-8)


def test_bound_state_normalization_consistency(params, psi_b):
    other = bs.bound_state(params, r_cut=500.0)
    assert other.norm == pytest.approx(psi_b.norm, rel=1e-6)


def test_bound_state_zero_at_origin(psi_b):
    assert abs(float(psi_b(0.0))) < 1e-14


def test_bound_state_unnormalized_variant(params, psi_b):
    raw_state = bs.bound_state(params, normalized=False)
    r = np.array([0.5, 1.0, 4.0])
    assert np.allclose(raw_state(r), psi_b.raw(r), rtol=1e-13)


def test_bound_state_requires_constraint():
    p = bs.PotentialParams(alpha=1.0, beta=5.0, q=1.0)
    with pytest.raises(bs.NotBicMode):
        bs.bound_state(p)


def test_outgoing_solution_satisfies_equation():
    p = bs.PotentialParams.bic()
    grid = np.arange(0.1, 50.0, 1e-3)
    res = bs.schrodinger_residual(
        p, 2.0, lambda r: bs.jost_value(p, 2.0, r, normalized=False).f_plus, grid
    )
    assert res < 1e-5


def test_trapped_state_satisfies_equation(params, psi_b):
    grid = np.arange(0.1, 50.0, 1e-3)
    res = bs.schrodinger_residual(params, params.q, psi_b, grid)
    assert res < 1e-5


def test_residual_rejects_perturbed_state(params, psi_b):
    # negative control: a small additive contamination must be seen
    grid = np.arange(0.1, 50.0, 1e-3)
    res = bs.schrodinger_residual(
        params, params.q, lambda r: psi_b(r) + 0.01 * np.sin(r), grid
    )
    assert res > 1e-3


def test_residual_requires_uniform_grid(params, psi_b):
    grid = np.array([0.1, 0.2, 0.35, 0.5])
    with pytest.raises(bs.ValidationError):
        bs.schrodinger_residual(params, params.q, psi_b, grid)
