import math

import numpy as np
import pytest

import ballnls as b


def test_version():
    assert b.__version__ == "0.1.0"


def test_correlation_paths_agree():
    assert b.correlation(1, 1, 1, 1) == pytest.approx(26.532298150515045, rel=1e-12)
    assert b.correlation(1, 2, 3, 4) == pytest.approx(b.correlation_by_quadrature(1, 2, 3, 4), abs=1e-10)
    assert b.sine_integral(math.pi) == pytest.approx(1.8519370519824662, rel=1e-14)


def test_eigenfunction_norm_and_lattice():
    assert b.eigenfunction_lp_norm(1, 1.0) == pytest.approx(4.0, rel=1e-12)
    assert b.eigenfunction_value(2, 0.25) == pytest.approx(4.0)
    assert b.count_circle_representations(25, 5) == 4


def test_tensor():
    t = b.build_tensor(4)
    assert t.n_max == 4
    assert t(1, 2, 3, 4) == pytest.approx(b.correlation(4, 3, 2, 1))
    dense = t.dense(3)
    assert dense.shape == (3, 3, 3, 3)
    assert dense[0, 1, 2, 0] == pytest.approx(t(1, 2, 3, 1))
    with pytest.raises(b.ResolutionError):
        t(1, 1, 1, 5)


def test_sampling_is_seeded():
    a = b.sample_free(8, seed=3)
    c = b.sample_free(8, seed=3)
    assert a.dtype == np.complex128 and a.shape == (8,)
    assert np.array_equal(a, c)
    g, attempts = b.sample_gibbs(8, seed=3)
    assert attempts >= 1
    assert np.all(np.isfinite(g))


def test_evolve_conserves_mass():
    a = b.sample_gibbs(8, seed=1)[0]
    tr = b.evolve(a, 0.25, dt=1 / 1024, dt_record=1 / 256)
    assert len(tr) == 65
    assert tr.coefficients.shape == (65, 8)
    m = np.array(tr.mass)
    assert np.max(np.abs(m - m[0])) / m[0] < 1e-9
    assert b.mass(a) == pytest.approx(m[0])


def test_reference_needs_tensor():
    a = b.sample_free(4, seed=0)
    with pytest.raises(b.DomainError):
        b.evolve(a, 0.01, method="reference_rk4", dt=1e-3)
    tr = b.evolve(a, 0.01, method="reference_rk4", dt=1e-3, tensor=b.build_tensor(4))
    assert len(tr) == 11


def test_norms_of_linear_flow():
    a = b.sample_free(4, seed=2)
    tr = b.evolve(a, 1.0, dt=1 / 256, coupling=0.0, dt_record=1 / 256)
    assert b.mixed_norm(tr, 2, 2) == pytest.approx(math.sqrt(b.mass(a)), rel=1e-10)
    assert b.xsb_norm(tr, 0.0, 0.4) == pytest.approx(math.sqrt(b.mass(a) / (2 * math.pi)), rel=1e-10)
    assert b.window_mean_square(tr, 0.25) == pytest.approx(b.mass(a), rel=1e-10)
    assert b.hs_norm(a, 0.0) == pytest.approx(math.sqrt(b.mass(a)))


def test_stats():
    stat, crit = b.ks_two_sample([1, 2, 3, 4], [2.5, 5, 6])
    assert stat == pytest.approx(2 / 3)
    rng = np.random.default_rng(0)
    x = np.sqrt(-np.log(1 - rng.random(20000)))
    fit = b.fit_tail(x, bootstrap=10)
    assert fit["kappa"] == pytest.approx(2.0, rel=0.05)
    with pytest.raises(b.FitDegenerateError):
        b.fit_tail(np.zeros(100))


def test_experiments_small():
    r = b.run_invariance(4, 200, 0.0, seed=1)
    assert r["passes"]
    lad = b.run_convergence_ladder(1, [4, 8, 16], t_end=0.125, coupling=0.0)
    assert len(lad["diffs"]) == 2
    emb = b.run_embedding_study(7, 4, 3)
    assert len(emb["ratios"]) == 3
    with pytest.raises(b.PrecisionError):
        b.run_tail_experiment(8, 10)


def test_trajectory_file_roundtrip(tmp_path):
    tr = b.evolve(b.sample_free(3, seed=0), 0.01, dt=1e-3)
    path = tmp_path / "t.bnlt"
    b.write_trajectory(path, tr)
    back = b.read_trajectory(path)
    assert np.array_equal(back.coefficients, tr.coefficients)
    assert back.times == tr.times
