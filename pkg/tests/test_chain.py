"""Chain spectrum, Bogoliubov angles, and ground-moment tests.

Expected values come from three independent routes: hand evaluation of the
defining formulas, math.fsum trig sums, and exact diagonalization of the
dense chain Hamiltonian.
"""

import math

import numpy as np
import pytest

from lzchain.chain import (
    ChainSpec,
    GaplessModeError,
    bogoliubov,
    dispersion,
    ground_moments,
    momenta,
    spectrum,
)


def test_momenta_small():
    assert momenta(3).tolist() == [1]
    assert momenta(5).tolist() == [1, 2]
    assert momenta(201).tolist() == list(range(1, 101))


@pytest.mark.parametrize("bad", [4, 2, 1, 0, -3])
def test_momenta_rejects_even_or_tiny(bad):
    with pytest.raises(ValueError):
        momenta(bad)


class TestChainSpecValidation:
    def test_ising_forces_gamma_one(self):
        with pytest.raises(ValueError):
            ChainSpec(kind="ising", n=5, gamma=0.5)

    def test_rejects_even_n(self):
        with pytest.raises(ValueError):
            ChainSpec(kind="ising", n=4)

    def test_rejects_nonpositive_j(self):
        with pytest.raises(ValueError):
            ChainSpec(kind="ising", n=5, j=0.0)

    def test_rejects_negative_lambda(self):
        with pytest.raises(ValueError):
            ChainSpec(kind="ising", n=5, lam=-0.1)

    def test_rejects_gamma_out_of_range(self):
        with pytest.raises(ValueError):
            ChainSpec(kind="xy", n=5, gamma=1.5)

    def test_rejects_unknown_kind(self):
        with pytest.raises(ValueError):
            ChainSpec(kind="heisenberg", n=5)


class TestDispersion:
    def test_hand_evaluated_n3(self):
        # eps = 2(2 - cos(2pi/3)) = 5, xi = 2 sqrt(2.5^2 + sin^2(2pi/3)) = 2 sqrt 7
        spec = ChainSpec(kind="ising", n=3, lam=2.0)
        eps, xi = dispersion(spec, 1)
        assert eps == pytest.approx(5.0, abs=1e-14)
        assert xi == pytest.approx(2.0 * math.sqrt(7.0), abs=1e-13)

    @pytest.mark.parametrize("n", [3, 5, 9, 21])
    def test_lambda_zero_is_flat(self, n):
        # Pythagorean identity: xi = 2J exactly at lambda = 0, gamma = 1
        spec = ChainSpec(kind="ising", n=n, lam=0.0)
        for k in momenta(n):
            _, xi = dispersion(spec, int(k))
            assert xi == pytest.approx(2.0, abs=1e-15)

    def test_xx_collapses_to_absolute_value(self):
        spec = ChainSpec(kind="xy", n=5, lam=0.5, gamma=0.0)
        eps, xi = dispersion(spec, 1)
        assert eps == pytest.approx(2.0 * (0.5 - math.cos(2 * math.pi / 5)), abs=1e-15)
        assert xi == pytest.approx(abs(eps), abs=1e-15)

    def test_rejects_out_of_range_k(self):
        spec = ChainSpec(kind="ising", n=5, lam=1.0)
        with pytest.raises(ValueError):
            dispersion(spec, 3)
        with pytest.raises(ValueError):
            dispersion(spec, 0)


class TestBogoliubov:
    def test_hand_evaluated_n3(self):
        spec = ChainSpec(kind="ising", n=3, lam=2.0)
        ct, st = bogoliubov(spec, 1)
        assert ct == pytest.approx(5.0 / (2.0 * math.sqrt(7.0)), abs=1e-14)
        assert st == pytest.approx(math.sqrt(1.0 - 25.0 / 28.0), abs=1e-14)

    def test_large_field_polarizes(self):
        spec = ChainSpec(kind="ising", n=11, lam=1e6)
        for k in momenta(11):
            ct, st = bogoliubov(spec, int(k))
            assert ct == pytest.approx(1.0, abs=1e-6)
            assert st == pytest.approx(0.0, abs=1e-6)

    def test_xx_above_critical_field(self):
        spec = ChainSpec(kind="xy", n=9, lam=2.0, gamma=0.0)
        for k in momenta(9):
            ct, st = bogoliubov(spec, int(k))
            assert ct == 1.0
            assert st == 0.0

    def test_gapless_mode_limit_and_strict(self):
        # gamma = 0 with lambda exactly on a mode energy: xi = 0
        lam = float(np.cos(2 * np.pi / 5))
        spec = ChainSpec(kind="xy", n=5, lam=lam, gamma=0.0)
        _, xi = dispersion(spec, 1)
        assert xi == 0.0
        ct, st = bogoliubov(spec, 1)
        assert (ct, st) == (1.0, 0.0)  # one-sided lambda -> value+ convention
        with pytest.raises(GaplessModeError) as err:
            bogoliubov(spec, 1, strict=True)
        assert err.value.k == 1
        with pytest.raises(GaplessModeError):
            spectrum(spec, strict=True)


class TestSpectrum:
    def test_n3_composition(self):
        sp = spectrum(ChainSpec(kind="ising", n=3, lam=2.0))
        assert len(sp.modes) == 1
        mode = sp.modes[0]
        assert mode.k == 1
        assert mode.eps == pytest.approx(5.0)
        assert mode.xi == pytest.approx(2.0 * math.sqrt(7.0))
        assert mode.cos_theta == pytest.approx(0.944911182523068, abs=1e-12)
        assert mode.sin_theta == pytest.approx(0.3273268353539886, abs=1e-12)

    def test_mode_count_and_order(self):
        sp = spectrum(ChainSpec(kind="ising", n=5, lam=0.0))
        assert sp.k.tolist() == [1, 2]
        assert np.allclose(sp.xi, 2.0)
        sp = spectrum(ChainSpec(kind="xy", n=201, lam=1.0, gamma=0.5))
        assert len(sp.modes) == 100
        assert np.all(np.diff(sp.k) > 0)
        assert np.all(sp.xi > 0)  # gap closes only at the excluded k = 0

    def test_angle_normalization_random_draws(self):
        rng = np.random.default_rng(7)
        for _ in range(200):
            n = int(rng.choice([3, 5, 7, 21, 51, 201]))
            gamma = float(rng.uniform(0, 1))
            kind = "ising" if gamma == 1.0 else "xy"
            spec = ChainSpec(kind=kind, n=n, j=float(rng.uniform(0.1, 5)),
                             lam=float(rng.uniform(0, 3)), gamma=gamma)
            sp = spectrum(spec)
            assert np.max(np.abs(sp.cos_theta ** 2 + sp.sin_theta ** 2 - 1.0)) < 1e-12
            assert np.all(sp.sin_theta >= 0.0)
            assert np.all(sp.xi >= 0.0)
            # dispersion identity xi^2 = eps^2 + (2 J gamma sin phi)^2
            rhs = sp.eps ** 2 + (2 * spec.j * spec.gamma * np.sin(sp.momentum)) ** 2
            assert np.allclose(sp.xi ** 2, rhs, rtol=1e-10)

    def test_xy_gamma_one_matches_ising_bitwise(self):
        ising = spectrum(ChainSpec(kind="ising", n=201, lam=0.7))
        xy = spectrum(ChainSpec(kind="xy", n=201, lam=0.7, gamma=1.0))
        for name in ("eps", "xi", "cos_theta", "sin_theta"):
            assert np.array_equal(getattr(ising, name), getattr(xy, name))


class TestGroundMoments:
    def test_trig_sum_oracle_lambda_zero(self):
        # independent route first: at lambda = 0 the angles reduce to
        # cos(theta_k) = -cos(2 pi k / N), sin(theta_k) = sin(2 pi k / N),
        # so m = 1/2 and s2 = N/4 by the half-range cosine sums
        for n in range(3, 23, 2):
            ks = range(1, (n - 1) // 2 + 1)
            m_direct = math.fsum(-math.cos(2 * math.pi * k / n) for k in ks)
            s2_direct = math.fsum(math.sin(2 * math.pi * k / n) ** 2 for k in ks)
            assert m_direct == pytest.approx(0.5, abs=1e-12)
            assert s2_direct == pytest.approx(n / 4.0, abs=1e-12)
            gm = ground_moments(ChainSpec(kind="ising", n=n, lam=0.0))
            assert gm.m == pytest.approx(m_direct, abs=1e-12)
            assert gm.s2 == pytest.approx(s2_direct, abs=1e-12)

    def test_closed_form_lambda_zero_large_n(self):
        for n in (51, 101, 201):
            gm = ground_moments(ChainSpec(kind="ising", n=n, lam=0.0))
            assert gm.m == pytest.approx(0.5, abs=1e-10)
            assert gm.s2 == pytest.approx(n / 4.0, abs=1e-10)

    def test_strong_field_limit(self):
        for n in (3, 21, 201):
            gm = ground_moments(ChainSpec(kind="ising", n=n, lam=1e6))
            assert gm.m == pytest.approx((n - 1) / 2.0, abs=1e-6)
            assert gm.s2 == pytest.approx(0.0, abs=1e-6)

    def test_xx_above_critical_field(self):
        gm = ground_moments(ChainSpec(kind="xy", n=201, lam=2.0, gamma=0.0))
        assert gm.m == 100.0
        assert gm.s2 == 0.0

    def test_bounds(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            n = int(rng.choice([3, 7, 51, 201]))
            gm = ground_moments(ChainSpec(kind="ising", n=n,
                                          lam=float(rng.uniform(0, 5))))
            assert abs(gm.m) <= (n - 1) / 2.0 + 1e-12
            assert -1e-12 <= gm.s2 <= (n - 1) / 2.0 + 1e-12

    def test_monotone_in_lambda(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            n = int(rng.choice([3, 21, 201]))
            lam1, lam2 = np.sort(rng.uniform(0, 4, size=2))
            m1 = ground_moments(ChainSpec(kind="ising", n=n, lam=float(lam1))).m
            m2 = ground_moments(ChainSpec(kind="ising", n=n, lam=float(lam2))).m
            assert m2 >= m1 - 1e-12

    def test_variance_flat_below_critical(self):
        # s2(lambda) stays within 2% of N/4 over [0, 0.9] at N = 201
        for lam in np.linspace(0.0, 0.9, 19):
            gm = ground_moments(ChainSpec(kind="ising", n=201, lam=float(lam)))
            assert abs(gm.s2 - 201 / 4.0) <= 0.02 * (201 / 4.0)


def _half_odd_moments(n: int, lam: float, j: float = 1.0, gamma: float = 1.0):
    """Bogoliubov sums on the antiperiodic grid (2j-1) pi / N.

    The even spin-flip-parity sector of the finite periodic chain, where
    the exact ground state lives, quantizes momenta on this grid; the
    unpaired pi mode contributes cos(theta_pi) = 1 to J^x and xi_pi/2 to
    the energy.
    """
    mm = (n - 1) // 2
    phis = np.array([(2 * i - 1) * np.pi / n for i in range(1, mm + 1)])
    eps = 2 * j * (lam - np.cos(phis))
    xi = 2 * j * np.sqrt((np.cos(phis) - lam) ** 2 + gamma ** 2 * np.sin(phis) ** 2)
    m = float(np.sum(eps / xi))
    s2 = float(np.sum((2 * j * gamma * np.sin(phis) / xi) ** 2))
    energy = float(-np.sum(xi) - 2 * j * (lam + 1.0) / 2.0)
    return m, s2, energy


class TestDenseEquivalence:
    """Exact-diagonalization cross-check of the Bogoliubov machinery.

    The dense ground state sits in the even spin-flip-parity sector, whose
    momentum grid is the antiperiodic one; mapped moments (J^x - 1)/2 and
    Var(J^x)/4 match those sums to machine precision.  The integer-momentum
    sums used by ground_moments differ by a deterministic O(1/N) offset
    (the printed-formula convention), frozen below as a regression.
    """

    # offsets (ground_moments - dense) at lambda = 2, frozen from this build
    M_OFFSETS = {3: 0.07888577873862945, 5: 0.029029266168438372,
                 7: 0.009035356150960627}
    S2_OFFSETS = {3: -0.14285714285714263, 5: -0.05865102639295916,
                  7: -0.020509064273948996}

    @pytest.mark.parametrize("n", [3, 5, 7])
    def test_ground_state_matches_half_odd_quantization(self, n):
        from lzchain.oracle import chain_ground_state, total_sx

        spec = ChainSpec(kind="ising", n=n, lam=2.0)
        gs = chain_ground_state(spec)
        jx_op = total_sx(n)
        jx = float(gs.vector @ jx_op @ gs.vector)
        jx2 = float(gs.vector @ jx_op @ (jx_op @ gs.vector))
        m_dense = (jx - 1.0) / 2.0
        s2_dense = (jx2 - jx ** 2) / 4.0
        m_ref, s2_ref, e_ref = _half_odd_moments(n, 2.0)
        assert m_dense == pytest.approx(m_ref, abs=1e-6)
        assert s2_dense == pytest.approx(s2_ref, abs=1e-6)
        assert gs.energy == pytest.approx(e_ref, rel=1e-6)

    @pytest.mark.parametrize("n", [3, 5, 7])
    def test_integer_momentum_offset_frozen(self, n):
        from lzchain.oracle import chain_ground_state, total_sx

        spec = ChainSpec(kind="ising", n=n, lam=2.0)
        gs = chain_ground_state(spec)
        jx_op = total_sx(n)
        jx = float(gs.vector @ jx_op @ gs.vector)
        jx2 = float(gs.vector @ jx_op @ (jx_op @ gs.vector))
        gm = ground_moments(spec)
        assert gm.m - (jx - 1.0) / 2.0 == pytest.approx(self.M_OFFSETS[n], abs=1e-9)
        assert gm.s2 - (jx2 - jx ** 2) / 4.0 == pytest.approx(self.S2_OFFSETS[n], abs=1e-9)
