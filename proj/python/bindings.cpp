#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "subchan/allocators.hpp"
#include "subchan/assignment.hpp"
#include "subchan/channel.hpp"
#include "subchan/errors.hpp"
#include "subchan/harness.hpp"
#include "subchan/power.hpp"

namespace py = pybind11;
using namespace subchan;

namespace {

CostMatrix make_cost(const Matrix& values, bool maximize,
                     const std::optional<BoolMatrix>& forbidden) {
  CostMatrix cost(values, maximize ? Orientation::kMaximize : Orientation::kMinimize);
  if (forbidden) {
    if (forbidden->rows() != values.rows() || forbidden->cols() != values.cols()) {
      throw ValidationError("forbidden mask must match the cost matrix shape");
    }
    for (int r = 0; r < cost.rows(); ++r) {
      for (int c = 0; c < cost.cols(); ++c) {
        if ((*forbidden)(r, c)) cost.forbid(r, c);
      }
    }
  }
  return cost;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Sub-channel assignment and power allocation for multi-band links.";

  auto base = py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
  py::register_exception<GuardExceededError>(m, "GuardExceededError", PyExc_RuntimeError);
  (void)base;

  py::enum_<Strategy>(m, "Strategy")
      .value("LOW_SNR", Strategy::kLowSnr)
      .value("HIGH_SNR", Strategy::kHighSnr)
      .value("OPTIMAL", Strategy::kOptimal)
      .value("MAX_SELECT", Strategy::kMaxSelect);
  py::enum_<ZeroGainPolicy>(m, "ZeroGainPolicy")
      .value("STRICT", ZeroGainPolicy::kStrict)
      .value("FALLBACK", ZeroGainPolicy::kFallback);

  py::class_<ChannelParams>(m, "ChannelParams")
      .def(py::init<>())
      .def(py::init([](int links, int subchannels, double bandwidth, double noise_psd,
                       double shadow_prob, double shadow_attenuation, double budget) {
             ChannelParams p;
             p.num_links = links;
             p.num_subchannels = subchannels;
             p.total_bandwidth = bandwidth > 0.0 ? bandwidth : subchannels;
             p.noise_psd = noise_psd;
             p.shadow_prob = shadow_prob;
             p.shadow_attenuation = shadow_attenuation;
             p.power_budgets.assign(static_cast<std::size_t>(std::max(links, 0)), budget);
             p.validate();
             return p;
           }),
           py::arg("links") = 2, py::arg("subchannels") = 4, py::arg("bandwidth") = 0.0,
           py::arg("noise_psd") = 1.0, py::arg("shadow_prob") = 0.02,
           py::arg("shadow_attenuation") = 0.0, py::arg("budget") = 1.0)
      .def_readwrite("num_links", &ChannelParams::num_links)
      .def_readwrite("num_subchannels", &ChannelParams::num_subchannels)
      .def_readwrite("total_bandwidth", &ChannelParams::total_bandwidth)
      .def_readwrite("noise_psd", &ChannelParams::noise_psd)
      .def_readwrite("shadow_prob", &ChannelParams::shadow_prob)
      .def_readwrite("shadow_attenuation", &ChannelParams::shadow_attenuation)
      .def_readwrite("power_budgets", &ChannelParams::power_budgets)
      .def_property_readonly("quota", &ChannelParams::quota)
      .def("validate", &ChannelParams::validate);

  py::class_<ChannelRealization>(m, "ChannelRealization")
      .def_readonly("squared_gains", &ChannelRealization::squared_gains)
      .def_readonly("normalized_gains", &ChannelRealization::normalized_gains)
      .def_readonly("shadow_mask", &ChannelRealization::shadow_mask);

  m.def("sample_realization",
        [](const ChannelParams& params, std::uint64_t seed, std::uint64_t trial) {
          RngStream rng = RngStream::substream(seed, trial);
          return sample_realization(params, rng);
        },
        py::arg("params"), py::arg("seed"), py::arg("trial") = 0);
  m.def("realization_from_squared_gains", &realization_from_squared_gains, py::arg("params"),
        py::arg("squared_gains"));
  m.def("normalized_gain", &normalized_gain, py::arg("params"), py::arg("squared_gain"));

  py::class_<AssignmentResult>(m, "AssignmentResult")
      .def_readonly("column_of_row", &AssignmentResult::column_of_row)
      .def_readonly("objective_value", &AssignmentResult::objective_value);

  m.def("solve_assignment",
        [](const Matrix& values, bool maximize, const std::optional<BoolMatrix>& forbidden) {
          return solve_assignment(make_cost(values, maximize, forbidden));
        },
        py::arg("cost"), py::arg("maximize") = false, py::arg("forbidden") = py::none());
  m.def("brute_force_assignment",
        [](const Matrix& values, bool maximize, const std::optional<BoolMatrix>& forbidden) {
          return brute_force_assignment(make_cost(values, maximize, forbidden));
        },
        py::arg("cost"), py::arg("maximize") = false, py::arg("forbidden") = py::none());

  py::class_<WaterFillResult>(m, "WaterFillResult")
      .def_readonly("powers", &WaterFillResult::powers)
      .def_readonly("water_level", &WaterFillResult::water_level)
      .def_readonly("active_set", &WaterFillResult::active_set);
  m.def("water_fill",
        [](const std::vector<double>& gains, double budget) { return water_fill(gains, budget); },
        py::arg("gains"), py::arg("budget"));
  m.def("equal_split", &equal_split, py::arg("set_size"), py::arg("budget"));
  m.def("concentrate_on_best",
        [](const std::vector<double>& gains, double budget) {
          return concentrate_on_best(gains, budget);
        },
        py::arg("gains"), py::arg("budget"));

  py::class_<Allocation>(m, "Allocation")
      .def_readonly("subchannels_of_link", &Allocation::subchannels_of_link)
      .def_readonly("powers", &Allocation::powers)
      .def_readonly("strategy", &Allocation::strategy);
  py::class_<RateReport>(m, "RateReport")
      .def_readonly("per_link_rate", &RateReport::per_link_rate)
      .def_readonly("total_rate", &RateReport::total_rate);

  m.def("allocate",
        [](Strategy strategy, const ChannelParams& params, const ChannelRealization& chan,
           ZeroGainPolicy zero_gain, std::uint64_t guard) {
          AllocatorOptions options;
          options.zero_gain_policy = zero_gain;
          options.partition_guard = guard;
          return allocate(strategy, params, chan, options);
        },
        py::arg("strategy"), py::arg("params"), py::arg("chan"),
        py::arg("zero_gain") = ZeroGainPolicy::kStrict, py::arg("guard") = kDefaultPartitionGuard);
  m.def("exact_sum_rate", &exact_sum_rate, py::arg("params"), py::arg("chan"), py::arg("alloc"));
  m.def("count_partitions", &count_partitions, py::arg("links"), py::arg("subchannels"));

  m.def("sweep_csv",
        [](const ChannelParams& params, const std::string& budgets, int trials,
           std::uint64_t seed, const std::vector<std::string>& strategies, bool both,
           int threads) {
          SweepConfig config;
          config.channel_params = params;
          config.budget_grid = parse_budget_grid(budgets);
          config.trials = trials;
          config.seed = seed;
          config.strategies.clear();
          for (const auto& s : strategies) config.strategies.push_back(parse_strategy(s));
          config.score_mode = both ? ScoreMode::kBoth : ScoreMode::kExact;
          config.threads = threads;
          py::gil_scoped_release release;
          return sweep_csv(run_sweep(config), config.score_mode);
        },
        py::arg("params"), py::arg("budgets") = "1e-3:1e3:7:log", py::arg("trials") = 2000,
        py::arg("seed") = 1,
        py::arg("strategies") = std::vector<std::string>{"low", "high", "opt", "maxsel"},
        py::arg("score_both") = false, py::arg("threads") = 1);

  m.def("dump_instance",
        [](const ChannelParams& params, std::uint64_t seed, Strategy strategy,
           ZeroGainPolicy zero_gain) {
          AllocatorOptions options;
          options.zero_gain_policy = zero_gain;
          return format_instance_report(dump_instance(params, seed, strategy, options));
        },
        py::arg("params"), py::arg("seed"), py::arg("strategy"),
        py::arg("zero_gain") = ZeroGainPolicy::kFallback);
}
