import numpy as np
import pytest
from scipy.optimize import least_squares

from ranksize.errors import FitError, SingularDesignError
from ranksize.ingest import series_from_sizes
from ranksize.models import FAMILIES, ModelSpec, ParamVector, evaluate
from ranksize.optimizer import FitOptions, fit, init_guess, lm_fit
from ranksize.synth import NoiseSpec, generate

from conftest import FIT_1112, universal_curve

TRUE = np.array(list(FIT_1112.values()))

SAFE = {  # parameter ranges whose curves stay monotone and well scaled for n=200
    "zipf": lambda r: (r.uniform(5, 200), r.uniform(0.05, 1.5)),
    "zeta_pareto": lambda r: (r.uniform(1.1, 3.0),),
    "exponential": lambda r: (r.uniform(5, 200), r.uniform(0.002, 0.03)),
    "lavalette2": lambda r: (r.uniform(5, 200), r.uniform(0.05, 1.5)),
    "power_cutoff": lambda r: (r.uniform(5, 200), r.uniform(0.05, 1.0), r.uniform(0.001, 0.02)),
    "lavalette3": lambda r: (r.uniform(5, 200), r.uniform(0.1, 1.0), r.uniform(0.0, 3.0)),
    "universal_lavalette": lambda r: (r.uniform(5, 200), r.uniform(0.05, 1.0), r.uniform(0.0, 5.0)),
}


def noisy_reference(seed, sigma=0.01):
    return generate("universal_lavalette", FIT_1112, 443, NoiseSpec.gaussian(sigma, seed))


def test_init_guess_exact_universal(reference_series):
    p = init_guess("universal_lavalette", reference_series)
    np.testing.assert_allclose(p.array, TRUE, rtol=1e-10)


def test_init_guess_exact_zipf():
    s = generate("zipf", (45, 0.2), 100)
    np.testing.assert_allclose(init_guess("zipf", s).array, [45, 0.2], rtol=1e-10)


def test_init_guess_constant_data():
    p = init_guess("zipf", series_from_sizes([3.5] * 10))
    assert p["a"] == pytest.approx(3.5, rel=1e-14)
    assert p["alpha"] == pytest.approx(0, abs=1e-14)


def test_init_guess_singular():
    with pytest.raises(SingularDesignError):
        init_guess("power_cutoff", (np.array([1.0, 2.0]), np.array([2.0, 1.0])))
    with pytest.raises(SingularDesignError):
        init_guess("zipf", (np.array([1.0, 1.0]), np.array([2.0, 1.0])))


def test_noiseless_recovery(reference_series):
    res = fit("universal_lavalette", reference_series)
    np.testing.assert_allclose(res.params.array, TRUE, rtol=1e-8)
    assert res.r_squared == pytest.approx(1, abs=1e-12)
    assert res.converged and res.dof == 442 and res.dof_conventional == 440


def test_noisy_recovery_single_seed():
    res = fit("universal_lavalette", noisy_reference(7))
    np.testing.assert_allclose(res.params.array, TRUE, rtol=0.05)
    assert res.r_squared > 0.98


def test_optimal_init_is_a_fixed_point(reference_series):
    spec = ModelSpec("universal_lavalette", 443)
    init = ParamVector.for_model(spec, FIT_1112)
    res = lm_fit(spec, reference_series, init)
    assert res.converged and res.iterations <= 1
    assert res.chi_square == pytest.approx(res.ssr_history[0], abs=1e-20)


def test_lm_from_perturbed_start(reference_series):
    spec = ModelSpec("universal_lavalette", 443)
    init = ParamVector.for_model(spec, TRUE * np.array([1.3, 0.6, 1.25]))
    res = lm_fit(spec, reference_series, init)
    assert res.converged, res.termination
    np.testing.assert_allclose(res.params.array, TRUE, rtol=1e-6)
    assert np.all(np.diff(res.ssr_history) < 0)


@pytest.mark.parametrize("family", FAMILIES)
def test_matches_minpack(family, rng):
    """Same optimum as scipy's MINPACK Levenberg-Marquardt on noisy data."""
    p_true = SAFE[family](rng)
    s = generate(family, p_true, 200, NoiseSpec.gaussian(0.02, 11))
    res = fit(family, s, FitOptions(tol_ssr_rel=1e-15))
    spec = res.model
    x = spec.x_from_ranks(s.ranks)

    def resid(p):
        return np.asarray(s.sizes) - evaluate(spec, p, x)

    ref = least_squares(resid, init_guess(family, s).array, method="lm", xtol=1e-15, ftol=1e-15,
                        gtol=1e-15)
    np.testing.assert_allclose(res.params.array, ref.x, rtol=1e-6, atol=1e-9)
    assert res.chi_square == pytest.approx(2 * ref.cost, rel=1e-9)


@pytest.mark.parametrize("family", FAMILIES)
def test_round_trip_every_family(family, rng):
    for _ in range(10):
        p_true = SAFE[family](rng)
        s = generate(family, p_true, 200)
        res = fit(family, s)
        assert res.converged
        np.testing.assert_allclose(res.params.array, p_true, rtol=1e-6)


@pytest.mark.parametrize("family", FAMILIES)
def test_round_trip_from_perturbed_start(family, rng):
    p_true = np.array(SAFE[family](rng))
    s = generate(family, p_true, 200)
    spec = ModelSpec(family, 200)
    init = ParamVector.for_model(spec, p_true * rng.uniform(0.9, 1.1, p_true.size))
    res = lm_fit(spec, s, init)
    assert res.converged, res.termination
    np.testing.assert_allclose(res.params.array, p_true, rtol=1e-6)


def test_descent_on_every_fit(rng):
    for seed in range(5):
        for family in ("zipf", "exponential", "power_cutoff", "universal_lavalette"):
            res = fit(family, noisy_reference(seed, 0.05))
            assert np.all(np.diff(res.ssr_history) <= 0)
            assert res.chi_square == res.ssr_history[-1] <= res.ssr_history[0]


def test_amplitude_scale_equivariance(rng):
    for seed in range(5):
        s = noisy_reference(seed, 0.03)
        alpha = float(rng.uniform(0.01, 100))
        for family in ("universal_lavalette", "zipf", "power_cutoff", "lavalette3"):
            a = fit(family, s)
            b = fit(family, s.scaled(alpha))
            assert b.params.values[0] == pytest.approx(alpha * a.params.values[0], rel=1e-8)
            np.testing.assert_allclose(b.params.array[1:], a.params.array[1:], rtol=1e-8)
            assert b.chi_square == pytest.approx(alpha ** 2 * a.chi_square, rel=1e-8)
            assert b.r_squared == pytest.approx(a.r_squared, rel=1e-8)


def test_r_squared_two_pass():
    s = noisy_reference(3, 0.05)
    res = fit("exponential", s)
    y = np.asarray(s.sizes)
    pred = res.predict_ranks(s.ranks)
    mean = sum(y) / len(y)
    tss = sum((v - mean) ** 2 for v in y)
    ssr = sum((a - b) ** 2 for a, b in zip(y, pred))
    assert res.chi_square == pytest.approx(ssr, rel=1e-10)
    assert res.r_squared == pytest.approx(1 - ssr / tss, rel=1e-10)


def test_cross_family_zipf_worse_on_exponential_data():
    s = generate("exponential", (100, 0.01), 300, NoiseSpec.gaussian(0.01, 1))
    assert fit("zipf", s).r_squared < fit("exponential", s).r_squared


def test_three_points_three_params():
    s = series_from_sizes([10.0, 4.0, 1.0])
    res = fit("universal_lavalette", s)
    assert res.converged
    assert res.chi_square == pytest.approx(0, abs=1e-20)


def test_singular_normal_equations():
    ranks = np.arange(1.0, 6.0)
    spec = ModelSpec("exponential")
    init = ParamVector.for_model(spec, (1.0, 1000.0))  # model underflows to zero everywhere
    res = lm_fit(spec, (ranks, np.ones(5)), init)
    assert res.termination == "singular-normal-equations" and not res.converged


def test_max_iterations():
    s = noisy_reference(1)
    spec = ModelSpec("universal_lavalette", 443)
    init = ParamVector.for_model(spec, (10.0, 0.9, 1.0))
    res = lm_fit(spec, s, init, FitOptions(max_iterations=1))
    assert res.termination == "max-iterations" and not res.converged
    assert res.iterations == 1


def test_init_must_match_family(reference_series):
    with pytest.raises(FitError):
        lm_fit("zipf", reference_series, ParamVector.for_model(ModelSpec("exponential"), (1, 1)))


def test_options_validation():
    with pytest.raises(ValueError):
        FitOptions(damping_up=1.0)
    with pytest.raises(ValueError):
        FitOptions(max_iterations=0)


def test_json_keys(reference_series):
    d = fit("zipf", reference_series).to_dict()
    assert set(d["params"]) == {"a", "alpha"}
    d = fit("power_cutoff", reference_series).to_dict()
    assert set(d["params"]) == {"c", "lambda", "zeta_rate"}
