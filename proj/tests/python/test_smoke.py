import math

import pytest

import robustbid as rb


def example_bids():
    b = rb.BidSchedule.zeros(2)
    b.x0 = [1.0, 0.5]
    b.x_dn = [2.5, 3.5]
    return b


def example_storage():
    p = rb.StorageParams()
    p.x_min, p.x_max = -5.0, 5.0
    p.y_min, p.y_max = 0.0, 10.0
    p.eta_c = p.eta_d = 0.85
    return p


def test_two_interval_example():
    b, p, g = example_bids(), example_storage(), rb.TimeGrid(1.0, 2)
    assert rb.max_soc_at_time(b, p, g, 1.0, 0.0, 1.0).value == pytest.approx(1.275, abs=1e-9)
    assert rb.max_soc_at_time(b, p, g, 1.0, 0.0, 1.6).value == pytest.approx(1.53, abs=1e-9)
    peak = rb.max_soc_over_interval(b, p, g, 1.0, 0.0, 1)
    assert peak.exhaustion_time == pytest.approx(1.6)
    # Starting empty, the day-ahead discharge breaks the lower limit.
    assert not rb.check_feasibility(b, p, g, 1.0, rb.InitialSoc(0.0, 0.0)).feasible
    assert rb.check_feasibility(b, p, g, 1.0, rb.InitialSoc(5.0, 5.0)).feasible


def test_frequency_signal_and_budget():
    got = [rb.frequency_to_signal(f) for f in (49.7, 49.8, 50.0, 50.1, 50.2, 50.3)]
    assert got == [1.0, 1.0, 0.0, -0.5, -1.0, -1.0]
    assert rb.UncertaintyBudget.from_eu_rules(0.25).effective(24.0) == 2.75
    assert rb.StorageParams.reference_battery().default_initial_soc() == pytest.approx(53.328, abs=1e-3)


def small_inputs(K=4):
    inp = rb.ModelInputs()
    inp.params = rb.StorageParams.reference_battery()
    inp.grid = rb.TimeGrid(1.0, K)
    inp.budget = rb.UncertaintyBudget.total(1.0)
    inp.y0 = rb.InitialSoc(50.0, 50.0)
    prices = rb.PriceSeries.zeros(float(K))
    prices.day_ahead = [30.0, 90.0, 20.0, 100.0][:K]
    prices.fcr_availability = [40.0]
    inp.prices = prices
    return inp


def test_build_emit_and_solve():
    opt = rb.ModelOptions()
    opt.coupling = False
    ir = rb.build_model(small_inputs(), opt)
    assert ir.num_binaries() == 3 * 3
    assert ir.num_bilinear_rows() == 0
    text = rb.emit_model(ir, "mps")
    assert text.startswith("NAME")
    assert len(rb.checksum_hex(text)) == 16
    status, objective, bids = rb.solve_bids(small_inputs(), opt, time_limit=30, gap=0.0)
    assert status == "optimal"
    assert objective < 0.0
    assert len(bids.x0) == 4
    opt.variant = rb.Variant.lossless_lp
    with pytest.raises(rb.ConfigError):
        rb.build_model(small_inputs(), opt)


def test_errors_map_to_python():
    with pytest.raises(ValueError):
        rb.phi(0.0, -1.0, 0.0, example_storage())


def test_backtest_on_synthetic_day(tmp_path):
    o = rb.SynthOptions()
    o.days = 1
    o.seed = 3
    dates = rb.write_synthetic_dataset(o, str(tmp_path))
    cfg = "\n".join([
        "variant = arbitrage_only", "dt_hours = 1", "horizon_intervals = 24",
        "gamma_prime = 1", "Gamma_prime = 3", "fcr_block = 4", "da_block = 1",
        f"start_date = {dates[0]}", f"end_date = {dates[0]}",
    ])
    (summary,) = rb.run_backtest(cfg, str(tmp_path))
    assert summary.days == 1
    assert summary.skipped == 0
    assert math.isfinite(summary.mean_profit_total)
    assert summary.mean_profit_total > 0.0
