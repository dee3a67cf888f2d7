import numpy as np
import pytest

from tipping_abm.analytics import (
    classify_phase,
    crisis_stats,
    equilibration_time,
    power_spectrum,
)


def flat(value, n=4000):
    return np.full(n, value)


# -- phase classification -------------------------------------------------------


def test_constant_high_u_is_full_unemployment():
    assert classify_phase(flat(0.99)).label == "FU"


def test_constant_low_u_is_full_employment():
    assert classify_phase(flat(0.02)).label == "FE"


def test_intermediate_u_is_residual_unemployment():
    assert classify_phase(flat(0.3)).label == "RU"


def test_recurring_spikes_are_endogenous_crises():
    u = flat(0.01, 4000).copy()
    u[1000:1030] = 0.3
    u[3000:3030] = 0.3
    stats = classify_phase(u)
    assert stats.label == "EC"
    assert stats.n_excursions == 2


def test_single_transient_is_not_a_crisis_phase():
    u = flat(0.01, 4000).copy()
    u[1000:1030] = 0.3
    assert classify_phase(u).label != "EC"


def test_burn_in_is_discarded():
    u = np.concatenate([flat(0.9, 2000), flat(0.02, 3000)])
    assert classify_phase(u, burn_in=2000).label == "FE"


def test_window_too_short_raises():
    with pytest.raises(ValueError, match="short"):
        classify_phase(flat(0.5, 500))


def test_classification_is_deterministic_and_total():
    rng = np.random.default_rng(1)
    for _ in range(20):
        u = np.clip(rng.random(2000) * rng.random(), 0.0, 1.0)
        a = classify_phase(u)
        b = classify_phase(u)
        assert a.label == b.label
        assert a.label in ("FU", "RU", "EC", "FE")


# -- power spectrum ---------------------------------------------------------------


def sine_plus_noise(period, n=8192, amp=1.0, noise=0.05, seed=0):
    rng = np.random.default_rng(seed)
    t = np.arange(n)
    return amp * np.sin(2 * np.pi * t / period) + noise * rng.standard_normal(n)


def test_sine_peak_recovered_within_one_bin():
    spectrum = power_spectrum(sine_plus_noise(7.0))
    assert spectrum.peak_frequency is not None
    bin_width = spectrum.frequencies[1] - spectrum.frequencies[0]
    assert abs(spectrum.peak_frequency - 1.0 / 7.0) <= bin_width
    assert 6.0 <= spectrum.peak_period <= 8.0


def test_white_noise_has_no_peak():
    rng = np.random.default_rng(3)
    spectrum = power_spectrum(rng.standard_normal(8192))
    assert spectrum.peak_frequency is None


def test_shuffled_series_loses_its_peak():
    series = sine_plus_noise(7.0)
    spectrum = power_spectrum(series)
    assert spectrum.peak_frequency is not None
    rng = np.random.default_rng(5)
    shuffled = series.copy()
    rng.shuffle(shuffled)
    assert power_spectrum(shuffled).peak_frequency is None


def test_spectrum_shift_invariant():
    series = sine_plus_noise(9.0)
    a = power_spectrum(series)
    b = power_spectrum(series + 5.0)
    assert np.allclose(a.power, b.power, rtol=1e-9)


def test_spectrum_frequencies_in_range():
    spectrum = power_spectrum(sine_plus_noise(5.0))
    assert np.all(spectrum.frequencies > 0.0)
    assert np.all(spectrum.frequencies <= 0.5)
    assert np.all(spectrum.power >= 0.0)


def test_spectrum_too_short_raises():
    with pytest.raises(ValueError, match="short"):
        power_spectrum(np.zeros(1000))


# -- equilibration time --------------------------------------------------------------


def test_constant_series_equilibrates_immediately():
    out = equilibration_time(flat(0.2, 2000), tolerance=0.01)
    assert out.step == 0 and not out.censored


def test_step_function_located_up_to_smoothing():
    u = np.concatenate([flat(0.9, 500), flat(0.1, 1500)])
    out = equilibration_time(u, tolerance=0.05, smooth_window=25)
    assert abs(out.step - 500) <= 25
    assert not out.censored


def test_never_settling_series_is_censored():
    rng = np.random.default_rng(2)
    u = 0.5 + 0.4 * np.sign(np.sin(np.arange(3000) / 40.0)) + 0.01 * rng.random(3000)
    out = equilibration_time(u, tolerance=0.05)
    assert out.censored


def test_equilibration_shift_invariant():
    u = np.concatenate([flat(0.9, 500), flat(0.1, 1500)])
    a = equilibration_time(u, tolerance=0.05)
    b = equilibration_time(u + 0.05, tolerance=0.05)
    assert a.step == b.step


# -- crisis statistics ------------------------------------------------------------------


def test_two_spikes_counted_with_interval():
    u = flat(0.01, 1000).copy()
    u[100:105] = 0.4
    u[300:305] = 0.3
    stats = crisis_stats(u)
    assert stats.count == 2
    assert stats.mean_interval == pytest.approx(200.0)
    assert stats.mean_amplitude == pytest.approx(
        np.mean([0.4, 0.3]) - np.mean(u), abs=0.01
    )


def test_flat_series_has_no_crises():
    stats = crisis_stats(flat(0.02, 1000))
    assert stats.count == 0
    assert stats.mean_amplitude == 0.0


def test_hysteresis_rearm_merges_unseparated_spikes():
    u = flat(0.0, 1000).copy()
    # two threshold crossings without dropping below the re-arm level between
    u[100:200] = 0.2
    u[150] = 0.08
    stats = crisis_stats(u)
    assert stats.count == 1


def test_non_crisis_input_gives_empty_stats():
    assert crisis_stats(np.empty(0)).count == 0
