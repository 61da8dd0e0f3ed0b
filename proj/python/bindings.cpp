#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "corescope/cli.hpp"
#include "corescope/error.hpp"
#include "corescope/json_io.hpp"
#include "corescope/stats.hpp"
#include "corescope/topology.hpp"

namespace py = pybind11;
using namespace corescope;

namespace {

std::vector<IntervalSample> to_samples(const std::vector<std::pair<std::int64_t, std::int64_t>>& rows) {
  std::vector<IntervalSample> out;
  out.reserve(rows.size());
  for (const auto& [a, b] : rows) out.push_back({a, b, false});
  return out;
}

}  // namespace

// Documents cross the boundary as JSON text; the Python wrapper decodes them.
PYBIND11_MODULE(_core, m) {
  m.doc() = "corescope native core";
  py::register_exception<UsageError>(m, "UsageError", PyExc_ValueError);
  py::register_exception<ResourceError>(m, "ResourceError", PyExc_RuntimeError);

  m.def("suite_version", [] { return std::string(suite_version()); });

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = run_cli(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run one corescope invocation; returns (exit_code, stdout, stderr).");

  m.def("detect_topology", [] { return to_json(detect_topology()).dump(); });

  m.def(
      "pin_plan",
      [](const std::string& strategy, std::size_t n, std::uint32_t packages, std::uint32_t cores,
         std::uint32_t threads_per_core) {
        const Topology t(packages, cores, threads_per_core, 1.0);
        return to_json(pin_plan(parse_strategy(strategy), n, t)).dump();
      },
      py::arg("strategy"), py::arg("n"), py::arg("packages"), py::arg("cores_per_package"),
      py::arg("threads_per_core"));

  m.def("to_cycles", &to_cycles, py::arg("ns"), py::arg("clock_ghz"));

  m.def(
      "summarize",
      [](const std::vector<std::pair<std::int64_t, std::int64_t>>& rows, double clock_ghz, std::int64_t bin_width) {
        SampleSet set;
        set.clock_ghz = clock_ghz;
        set.samples = to_samples(rows);
        return summary_json(set, bin_width).dump();
      },
      py::arg("samples"), py::arg("clock_ghz"), py::arg("bin_width") = kDefaultBinWidthCycles);

  m.def(
      "read_raw_csv",
      [](const std::string& path) {
        std::ifstream in(path);
        if (!in) throw UsageError("cannot open " + path);
        std::vector<std::pair<std::int64_t, std::int64_t>> rows;
        for (const auto& s : read_raw_csv(in)) rows.emplace_back(s.a_ns, s.b_ns);
        return rows;
      },
      py::arg("path"));
}
