#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "robustbid/backtester.hpp"
#include "robustbid/errors.hpp"
#include "robustbid/model_builder.hpp"
#include "robustbid/soc_engine.hpp"
#include "robustbid/solver_bridge.hpp"
#include "robustbid/synthetic.hpp"

namespace py = pybind11;
using namespace robustbid;

namespace {

// Builds, solves and extracts bids in one call; returns (status, objective, bids).
py::tuple solve_bids(const ModelInputs& in, const ModelOptions& opt, double time_limit,
                     double gap) {
  const ModelIR ir = build_model(in, opt);
  SolveOptions so;
  so.time_limit = time_limit;
  so.gap_target = gap;
  const SolveResult r = solve(ir, so);
  if (!r.has_point()) return py::make_tuple(to_string(r.status), r.objective, py::none());
  return py::make_tuple(to_string(r.status), r.objective,
                        extract_bids(ir, r.point, in.grid, opt));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Robust day-ahead and FCR bidding for battery storage";

  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<AlignmentError>(m, "AlignmentError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<BuildError>(m, "BuildError", PyExc_RuntimeError);
  py::register_exception<DataError>(m, "DataError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", PyExc_RuntimeError);
  py::register_exception<EmissionError>(m, "EmissionError", PyExc_RuntimeError);
  py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);
  py::register_exception<RefusalError>(m, "RefusalError", PyExc_RuntimeError);

  py::class_<TimeGrid>(m, "TimeGrid")
      .def(py::init<double, int>(), py::arg("dt_hours"), py::arg("K"))
      .def_property_readonly("dt", &TimeGrid::dt)
      .def_property_readonly("K", &TimeGrid::K)
      .def_property_readonly("T", &TimeGrid::T);

  py::class_<StorageParams>(m, "StorageParams")
      .def(py::init<>())
      .def_readwrite("x_min", &StorageParams::x_min)
      .def_readwrite("x_max", &StorageParams::x_max)
      .def_readwrite("y_min", &StorageParams::y_min)
      .def_readwrite("y_max", &StorageParams::y_max)
      .def_readwrite("eta_c", &StorageParams::eta_c)
      .def_readwrite("eta_d", &StorageParams::eta_d)
      .def("default_initial_soc", &StorageParams::default_initial_soc)
      .def("validate", &StorageParams::validate)
      .def_static("reference_battery", &StorageParams::reference_battery);

  py::class_<UncertaintyBudget>(m, "UncertaintyBudget")
      .def_static("total", &UncertaintyBudget::total)
      .def_static("rolling", &UncertaintyBudget::rolling)
      .def_static("from_eu_rules", &UncertaintyBudget::from_eu_rules)
      .def("effective", &UncertaintyBudget::effective)
      .def_readonly("gamma", &UncertaintyBudget::gamma)
      .def_readonly("gamma_prime", &UncertaintyBudget::gamma_prime)
      .def_readonly("Gamma_prime", &UncertaintyBudget::Gamma_prime);

  py::class_<BidSchedule>(m, "BidSchedule")
      .def(py::init<>())
      .def_static("zeros", &BidSchedule::zeros)
      .def_readwrite("x0", &BidSchedule::x0)
      .def_readwrite("x_up", &BidSchedule::x_up)
      .def_readwrite("x_dn", &BidSchedule::x_dn)
      .def_readwrite("symmetric", &BidSchedule::symmetric);

  py::class_<InitialSoc>(m, "InitialSoc")
      .def(py::init<double, double>(), py::arg("lo"), py::arg("hi"))
      .def_readwrite("lo", &InitialSoc::lo)
      .def_readwrite("hi", &InitialSoc::hi);

  py::class_<PriceSeries>(m, "PriceSeries")
      .def(py::init<>())
      .def_static("zeros", &PriceSeries::zeros)
      .def_readwrite("day_ahead", &PriceSeries::day_ahead)
      .def_readwrite("fcr_availability", &PriceSeries::fcr_availability)
      .def_readwrite("da_period_hours", &PriceSeries::da_period_hours)
      .def_readwrite("fcr_block_hours", &PriceSeries::fcr_block_hours);

  py::class_<WorstCaseResult>(m, "WorstCaseResult")
      .def_readonly("value", &WorstCaseResult::value)
      .def_readonly("lambda_star", &WorstCaseResult::lambda_star)
      .def_readonly("witness", &WorstCaseResult::witness)
      .def_readonly("exhaustion_time", &WorstCaseResult::exhaustion_time);

  m.def("phi", &phi);
  m.def("max_soc_at_time", &max_soc_at_time, py::arg("bids"), py::arg("params"),
        py::arg("grid"), py::arg("gamma"), py::arg("y0"), py::arg("t"));
  m.def("max_soc_over_interval", &max_soc_over_interval);
  m.def("min_soc_at_boundaries", &min_soc_at_boundaries);

  py::class_<FeasibilityReport>(m, "FeasibilityReport")
      .def_readonly("feasible", &FeasibilityReport::feasible)
      .def_readonly("worst_violation", &FeasibilityReport::worst_violation)
      .def("violation_count", &FeasibilityReport::violation_count);
  m.def(
      "check_feasibility",
      [](const BidSchedule& b, const StorageParams& p, const TimeGrid& g, double gamma,
         InitialSoc y0) { return check_feasibility(b, p, g, gamma, y0); },
      py::arg("bids"), py::arg("params"), py::arg("grid"), py::arg("gamma"), py::arg("y0"));

  py::enum_<Variant>(m, "Variant")
      .value("exact", Variant::exact)
      .value("relaxation", Variant::relaxation)
      .value("restriction", Variant::restriction)
      .value("arbitrage_only", Variant::arbitrage_only)
      .value("lossless_lp", Variant::lossless_lp)
      .value("no_sell_lp", Variant::no_sell_lp);

  py::class_<ModelOptions>(m, "ModelOptions")
      .def(py::init<>())
      .def_readwrite("variant", &ModelOptions::variant)
      .def_readwrite("fcr_enabled", &ModelOptions::fcr_enabled)
      .def_readwrite("intraday", &ModelOptions::intraday)
      .def_readwrite("terminal_soc_floor", &ModelOptions::terminal_soc_floor)
      .def_readwrite("limited_arbitrage", &ModelOptions::limited_arbitrage)
      .def_readwrite("coupling", &ModelOptions::coupling)
      .def_readwrite("fcr_block", &ModelOptions::fcr_block)
      .def_readwrite("da_block", &ModelOptions::da_block)
      .def_readwrite("symmetric", &ModelOptions::symmetric);

  py::class_<ModelInputs>(m, "ModelInputs")
      .def(py::init<>())
      .def_readwrite("params", &ModelInputs::params)
      .def_readwrite("grid", &ModelInputs::grid)
      .def_readwrite("budget", &ModelInputs::budget)
      .def_readwrite("y0", &ModelInputs::y0)
      .def_readwrite("prices", &ModelInputs::prices);

  py::class_<ModelIR>(m, "ModelIR")
      .def_property_readonly("variant", [](const ModelIR& ir) { return ir.variant; })
      .def("num_variables", &ModelIR::num_variables)
      .def("num_rows", &ModelIR::num_rows)
      .def("num_binaries", &ModelIR::num_binaries)
      .def("num_bilinear_rows", &ModelIR::num_bilinear_rows)
      .def("count_rows_with_prefix", &ModelIR::count_rows_with_prefix);

  m.def("build_model", &build_model, py::arg("inputs"), py::arg("options"));
  m.def(
      "emit_model",
      [](const ModelIR& ir, const std::string& fmt) { return emit_model(ir, parse_format(fmt)); },
      py::arg("ir"), py::arg("format") = "mps");
  m.def("checksum_hex", &checksum_hex);
  m.def("solve_bids", &solve_bids, py::arg("inputs"), py::arg("options"),
        py::arg("time_limit") = 60.0, py::arg("gap") = 1e-6);

  m.def("frequency_to_signal", py::overload_cast<double>(&frequency_to_signal));

  py::class_<SynthOptions>(m, "SynthOptions")
      .def(py::init<>())
      .def_readwrite("seed", &SynthOptions::seed)
      .def_readwrite("days", &SynthOptions::days)
      .def_readwrite("start_date", &SynthOptions::start_date)
      .def_readwrite("countries", &SynthOptions::countries)
      .def_readwrite("price_spread", &SynthOptions::price_spread)
      .def_readwrite("budget_target", &SynthOptions::budget_target);
  m.def("write_synthetic_dataset", &write_synthetic_dataset);

  py::class_<BacktestSummary>(m, "BacktestSummary")
      .def_readonly("country", &BacktestSummary::country)
      .def_readonly("days", &BacktestSummary::days)
      .def_readonly("skipped", &BacktestSummary::skipped)
      .def_readonly("mean_profit_total", &BacktestSummary::mean_profit_total)
      .def_readonly("mean_throughput", &BacktestSummary::mean_throughput);
  m.def(
      "run_backtest",
      [](const std::string& config_text, const std::filesystem::path& data_dir) {
        return run_backtest(ExperimentConfig::from_text(config_text), data_dir).summaries;
      },
      py::arg("config_text"), py::arg("data_dir"));
}
