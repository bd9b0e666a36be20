// Python bindings. The boundary is JSON strings for structured data; the
// noisynth package wraps them with dict-based helpers.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "noisynth/distances.hpp"
#include "noisynth/enumerate.hpp"
#include "noisynth/errors.hpp"
#include "noisynth/experiments.hpp"
#include "noisynth/synthesizer.hpp"

namespace py = pybind11;
using namespace noisynth;
using nlohmann::json;

namespace {

Grammar load_grammar_arg(const std::string& spec) {
  if (!spec.empty() && spec[0] == '{') return Grammar::from_json(json::parse(spec));
  return Grammar::load(spec);
}

json synthesis_result_json(const Grammar& g, const SynthesisResult& r) {
  json out;
  out["program"] = to_sexpr(g, r.program);
  out["objective"] = std::isinf(r.objective) ? json("inf") : json(r.objective);
  out["outputs"] = values_to_json(r.output_values);
  out["all_infinite"] = r.all_infinite;
  return out;
}

std::string synth_impl(const std::string& grammar_spec,
                       const std::string& data_json,
                       const std::string& loss_json, int depth,
                       const std::string& costs_json, bool oracle) {
  Grammar g = load_grammar_arg(grammar_spec);
  json data = json::parse(data_json);
  std::vector<InputEnv> inputs;
  for (const auto& e : data.at("inputs")) inputs.push_back(env_from_json(e));
  std::vector<Value> outputs = values_from_json(data.at("outputs"));
  LossFn loss = LossFn::from_json(json::parse(loss_json));
  CostModel costs = CostModel::from_json(
      g, costs_json.empty() ? json() : json::parse(costs_json));
  Prior prior(g, depth);
  SynthesisProblem problem{&g, depth, &prior, &loss, &costs, inputs, outputs};
  SynthesisResult r = oracle ? oracle_synthesize(problem) : synthesize(problem);
  return synthesis_result_json(g, r).dump();
}

}  // namespace

PYBIND11_MODULE(_noisynth, m) {
  m.doc() = "programming-by-example synthesis over noisy data";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<EvalError>(m, "EvalError", PyExc_RuntimeError);

  m.def("dl", &dl_metric, py::arg("a"), py::arg("b"),
        "Damerau-Levenshtein distance (restricted transpositions).");

  m.def(
      "enumerate_programs",
      [](const std::string& grammar_spec, int depth) {
        Grammar g = load_grammar_arg(grammar_spec);
        std::vector<std::string> out;
        for (const Program& p : enumerate_programs(g, depth)) {
          out.push_back(to_sexpr(g, p));
        }
        return out;
      },
      py::arg("grammar"), py::arg("depth"),
      "All programs of height <= depth as s-expressions.");

  m.def(
      "evaluate",
      [](const std::string& grammar_spec, const std::string& sexpr,
         const std::string& env_json) {
        Grammar g = load_grammar_arg(grammar_spec);
        Program p = parse_sexpr(g, sexpr);
        return evaluate(g, p, env_from_json(json::parse(env_json))).to_json().dump();
      },
      py::arg("grammar"), py::arg("program"), py::arg("env"),
      "Run a program on one input environment; returns the value as JSON.");

  m.def("synthesize", &synth_impl, py::arg("grammar"), py::arg("data"),
        py::arg("loss"), py::arg("depth"), py::arg("costs") = "",
        py::arg("oracle") = false,
        "Synthesize from a {inputs, outputs} JSON dataset; returns JSON.");

  m.def(
      "loss",
      [](const std::string& loss_json, const std::string& z_json,
         const std::string& y_json) {
        LossFn f = LossFn::from_json(json::parse(loss_json));
        return f.eval(values_from_json(json::parse(z_json)),
                      values_from_json(json::parse(y_json)));
      },
      py::arg("loss"), py::arg("z"), py::arg("y"),
      "Evaluate a loss on candidate outputs z against noisy outputs y.");

  m.def(
      "noise_pmf",
      [](const std::string& noise_json, const std::string& y_json,
         const std::string& z_json) {
        NoiseModel n = NoiseModel::from_json(json::parse(noise_json));
        return n.pmf(values_from_json(json::parse(y_json)),
                     values_from_json(json::parse(z_json)))
            .linear();
      },
      py::arg("noise"), py::arg("y"), py::arg("z"),
      "Exact probability of observing y given clean outputs z.");

  m.def(
      "noise_corrupt",
      [](const std::string& noise_json, const std::string& z_json,
         uint64_t seed) {
        NoiseModel n = NoiseModel::from_json(json::parse(noise_json));
        Rng rng(seed);
        return values_to_json(n.corrupt(values_from_json(json::parse(z_json)), rng))
            .dump();
      },
      py::arg("noise"), py::arg("z"), py::arg("seed"),
      "Sample corrupted outputs; deterministic in the seed.");

  m.def(
      "converge",
      [](const std::string& config, int jobs) {
        ExperimentConfig cfg = (!config.empty() && config[0] == '{')
                                   ? ExperimentConfig::from_json(
                                         json::parse(config), "")
                                   : ExperimentConfig::load(config);
        ConvergenceReport report = estimate_convergence(cfg, jobs);
        json out;
        out["csv"] = report_csv(report);
        out["metadata"] = report.metadata;
        return out.dump();
      },
      py::arg("config"), py::arg("jobs") = 1,
      "Run a convergence experiment config; returns {csv, metadata} JSON.");

  m.def(
      "expected_reward",
      [](const std::string& grammar_spec, int depth,
         const std::string& noise_json, const std::string& inputs_json,
         const std::string& y_json, const std::string& c_json) {
        Grammar g = load_grammar_arg(grammar_spec);
        Prior prior(g, depth);
        NoiseModel noise = NoiseModel::from_json(json::parse(noise_json));
        std::vector<InputEnv> inputs;
        for (const auto& e : json::parse(inputs_json)) {
          inputs.push_back(env_from_json(e));
        }
        return expected_reward(g, depth, prior, noise, inputs,
                               values_from_json(json::parse(y_json)),
                               values_from_json(json::parse(c_json)));
      },
      py::arg("grammar"), py::arg("depth"), py::arg("noise"),
      py::arg("inputs"), py::arg("y"), py::arg("c"),
      "Posterior probability that output class c generated (inputs, y).");
}
