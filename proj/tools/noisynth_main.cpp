// Command line for the noisy-synthesis engine: synthesis, dataset
// generation, convergence experiments, differentiating-source checks, and a
// few inspection helpers. Results go to stdout or --out; diagnostics to
// stderr. Exit codes: 0 ok, 1 invalid input, 2 runtime failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "noisynth/enumerate.hpp"
#include "noisynth/errors.hpp"
#include "noisynth/experiments.hpp"
#include "noisynth/fta.hpp"
#include "noisynth/synthesizer.hpp"

using namespace noisynth;
using nlohmann::json;

namespace {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open file: " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

// A spec argument is either a bare name, inline JSON (starts with '{'), or a
// path to a JSON file.
json parse_spec(const std::string& spec) {
  if (spec.empty()) throw ConfigError("empty spec argument");
  if (spec[0] == '{' || spec[0] == '[') {
    try {
      return json::parse(spec);
    } catch (const json::exception& e) {
      throw ConfigError(std::string("inline JSON: ") + e.what());
    }
  }
  if (spec.size() > 5 && spec.substr(spec.size() - 5) == ".json") {
    return load_json_file(spec);
  }
  return json(spec);  // bare name
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ConfigError("cannot write to " + out_path);
  out << text;
}

json objective_to_json(double objective) {
  if (std::isinf(objective)) return "inf";
  return objective;
}

struct DataFile {
  std::vector<InputEnv> inputs;
  std::vector<Value> outputs;
};

DataFile load_data(const std::string& path) {
  json j = load_json_file(path);
  DataFile data;
  if (!j.contains("inputs") || !j.contains("outputs")) {
    throw ConfigError(path + ": data file needs \"inputs\" and \"outputs\"");
  }
  for (const auto& e : j["inputs"]) data.inputs.push_back(env_from_json(e));
  data.outputs = values_from_json(j["outputs"]);
  if (data.inputs.size() != data.outputs.size()) {
    throw ConfigError(path + ": inputs and outputs differ in length");
  }
  if (data.inputs.empty()) {
    throw ConfigError(path + ": data file is empty");
  }
  return data;
}

int run_synth(const std::string& grammar_path, const std::string& data_path,
              const std::string& loss_spec, int depth,
              const std::string& costs_spec, uint64_t seed,
              const std::string& out_path, const std::string& dump_fta_path) {
  Grammar grammar = Grammar::load(grammar_path);
  DataFile data = load_data(data_path);
  LossFn loss = LossFn::from_json(parse_spec(loss_spec));
  CostModel costs =
      costs_spec == "size"
          ? CostModel::from_json(grammar, json())
          : CostModel::from_json(grammar, parse_spec(costs_spec));
  Prior prior(grammar, depth);

  SynthesisProblem problem{&grammar, depth,       &prior, &loss,
                           &costs,   data.inputs, data.outputs};
  SynthesisResult result = synthesize(problem);

  if (!dump_fta_path.empty()) {
    Fta fta = Fta::build(grammar, data.inputs, depth);
    StateWeightTable weights(fta, prior);
    std::ofstream dump(dump_fta_path, std::ios::binary);
    if (!dump) throw ConfigError("cannot write to " + dump_fta_path);
    dump << fta.dump(weights).dump(2) << "\n";
  }

  json out;
  out["program"] = to_sexpr(grammar, result.program);
  out["objective"] = objective_to_json(result.objective);
  out["outputs"] = values_to_json(result.output_values);
  out["all_infinite"] = result.all_infinite;
  out["seed"] = seed;
  out["diagnostics"] = {
      {"states", result.diagnostics.state_count},
      {"transitions", result.diagnostics.transition_count},
      {"skipped_candidates", result.diagnostics.skipped_candidates},
      {"classes", result.diagnostics.class_count},
  };
  emit(out.dump(2) + "\n", out_path);
  return 0;
}

int run_gen_data(const std::string& grammar_path, int depth,
                 const std::string& input_spec, const std::string& noise_spec,
                 int n, uint64_t seed, const std::string& hidden_sexpr,
                 const std::string& out_path) {
  Grammar grammar = Grammar::load(grammar_path);
  InputSource source = InputSource::from_json(parse_spec(input_spec));
  NoiseModel noise = NoiseModel::from_json(parse_spec(noise_spec));
  Prior prior(grammar, depth);

  std::optional<Program> hidden;
  if (!hidden_sexpr.empty()) hidden = parse_sexpr(grammar, hidden_sexpr);
  Dataset ds = generate_dataset(prior, source, noise, n, seed,
                                hidden ? &*hidden : nullptr);

  json out;
  out["hidden"] = to_sexpr(grammar, ds.hidden);
  json inputs = json::array();
  for (const auto& env : ds.inputs) inputs.push_back(env_to_json(env));
  out["inputs"] = inputs;
  out["clean"] = values_to_json(ds.clean);
  out["outputs"] = values_to_json(ds.noisy);
  out["seed"] = seed;
  emit(out.dump(2) + "\n", out_path);
  return 0;
}

int run_converge(const std::string& config_path, const std::string& out_path,
                 int jobs, int64_t seed_override, int trials_override) {
  ExperimentConfig cfg = ExperimentConfig::load(config_path);
  if (seed_override >= 0) cfg.seed = static_cast<uint64_t>(seed_override);
  if (trials_override > 0) cfg.trials = trials_override;
  ConvergenceReport report = estimate_convergence(cfg, jobs);
  if (out_path.empty()) {
    std::cout << report_csv(report);
  } else {
    export_report(report, out_path);
    std::cerr << "wrote " << out_path << " and " << out_path << ".meta.json\n";
  }
  return 0;
}

int run_check_input_diff(const std::string& config_path,
                         const std::string& out_path) {
  json j = load_json_file(config_path);
  std::string base =
      std::filesystem::path(config_path).parent_path().string();
  Grammar grammar = [&] {
    if (j.at("grammar").is_string()) {
      std::filesystem::path p = j["grammar"].get<std::string>();
      if (p.is_relative() && !base.empty()) p = std::filesystem::path(base) / p;
      return Grammar::load(p.string());
    }
    return Grammar::from_json(j["grammar"]);
  }();
  int depth = j.at("depth").get<int>();
  InputSource source = InputSource::from_json(j.at("input_source"));
  std::optional<InputSource> eq_source;
  if (j.contains("equivalence_source")) {
    eq_source = InputSource::from_json(j["equivalence_source"]);
  }
  DistanceFn distance = DistanceFn::from_json(j.at("distance"));
  Program hidden = parse_sexpr(grammar, j.at("hidden").get<std::string>());
  int n = j.at("n").get<int>();
  double epsilon = j.at("epsilon").get<double>();
  int trials = j.at("trials").get<int>();
  uint64_t seed = j.value("seed", 0ull);

  DiffEstimate est = check_input_differentiating(
      grammar, depth, source, distance, hidden, n, epsilon, trials, seed,
      eq_source ? &*eq_source : nullptr);
  json out{{"trials", est.trials},
           {"successes", est.successes},
           {"p_hat", est.p_hat},
           {"ci_lo", est.ci_lo},
           {"ci_hi", est.ci_hi},
           {"seed", seed}};
  emit(out.dump(2) + "\n", out_path);
  return 0;
}

int run_check_noise_diff(const std::string& config_path,
                         const std::string& out_path) {
  json j = load_json_file(config_path);
  std::string base =
      std::filesystem::path(config_path).parent_path().string();
  Grammar grammar = [&] {
    if (j.at("grammar").is_string()) {
      std::filesystem::path p = j["grammar"].get<std::string>();
      if (p.is_relative() && !base.empty()) p = std::filesystem::path(base) / p;
      return Grammar::load(p.string());
    }
    return Grammar::from_json(j["grammar"]);
  }();
  int depth = j.at("depth").get<int>();
  NoiseModel noise = NoiseModel::from_json(j.at("noise"));
  LossFn loss = LossFn::from_json(j.at("loss"));
  DistanceFn distance = DistanceFn::from_json(j.at("distance"));
  std::vector<InputEnv> inputs;
  for (const auto& e : j.at("inputs")) inputs.push_back(env_from_json(e));
  std::vector<Value> z_h;
  if (j.contains("z_h")) {
    z_h = values_from_json(j["z_h"]);
  } else if (j.contains("hidden")) {
    Program hidden = parse_sexpr(grammar, j["hidden"].get<std::string>());
    z_h = evaluate_vec(grammar, hidden, inputs);
  } else {
    throw ConfigError(config_path + ": needs \"z_h\" or \"hidden\"");
  }
  double gamma = j.at("gamma").get<double>();
  double epsilon = j.at("epsilon").get<double>();
  int trials = j.at("trials").get<int>();
  uint64_t seed = j.value("seed", 0ull);

  DiffEstimate est = check_noise_differentiating(
      grammar, depth, inputs, noise, loss, distance, z_h, gamma, epsilon,
      trials, seed);
  json out{{"trials", est.trials},
           {"successes", est.successes},
           {"p_hat", est.p_hat},
           {"ci_lo", est.ci_lo},
           {"ci_hi", est.ci_hi},
           {"seed", seed}};
  emit(out.dump(2) + "\n", out_path);
  return 0;
}

int run_enumerate(const std::string& grammar_path, int depth, int64_t limit,
                  const std::string& out_path) {
  Grammar grammar = Grammar::load(grammar_path);
  std::vector<Program> programs = enumerate_programs(grammar, depth);
  std::string out;
  int64_t count = 0;
  for (const Program& p : programs) {
    if (limit >= 0 && count >= limit) break;
    out += to_sexpr(grammar, p) + "\n";
    ++count;
  }
  emit(out, out_path);
  return 0;
}

int run_dump_fta(const std::string& grammar_path, int depth,
                 const std::string& data_path, const std::string& inputs_spec,
                 bool with_weights, const std::string& out_path) {
  Grammar grammar = Grammar::load(grammar_path);
  std::vector<InputEnv> inputs;
  if (!data_path.empty()) {
    inputs = load_data(data_path).inputs;
  } else if (!inputs_spec.empty()) {
    json j = parse_spec(inputs_spec);
    for (const auto& e : j) inputs.push_back(env_from_json(e));
  } else {
    throw ConfigError("dump-fta needs --data or --inputs");
  }
  Fta fta = Fta::build(grammar, inputs, depth);
  json out;
  if (with_weights) {
    Prior prior(grammar, depth);
    StateWeightTable weights(fta, prior);
    out = fta.dump(weights);
  } else {
    out = fta.dump();
  }
  emit(out.dump(2) + "\n", out_path);
  return 0;
}

// Minimal SVG line plot of p_hat against n with the Wilson band.
int run_plot(const std::string& in_path, const std::string& out_path,
             const std::string& title) {
  std::ifstream in(in_path);
  if (!in) throw ConfigError("cannot open report: " + in_path);
  std::stringstream buf;
  buf << in.rdbuf();
  ConvergenceReport report = parse_report_csv(buf.str());
  if (report.rows.empty()) {
    throw ConfigError(in_path + ": no rows to plot");
  }

  const double width = 640, height = 420;
  const double ml = 60, mr = 20, mt = 40, mb = 50;
  double n_max = 1;
  for (const auto& r : report.rows) n_max = std::max(n_max, double(r.n));
  auto sx = [&](double n) { return ml + (width - ml - mr) * n / n_max; };
  auto sy = [&](double p) { return mt + (height - mt - mb) * (1.0 - p); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"15\">"
      << (title.empty() ? in_path : title) << "</text>\n";
  // axes
  svg << "<line x1=\"" << ml << "\" y1=\"" << sy(0) << "\" x2=\""
      << width - mr << "\" y2=\"" << sy(0) << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << ml << "\" y1=\"" << sy(0) << "\" x2=\"" << ml
      << "\" y2=\"" << sy(1) << "\" stroke=\"black\"/>\n";
  for (double p = 0; p <= 1.001; p += 0.25) {
    svg << "<text x=\"" << ml - 8 << "\" y=\"" << sy(p) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << p << "</text>\n";
    svg << "<line x1=\"" << ml - 4 << "\" y1=\"" << sy(p) << "\" x2=\"" << ml
        << "\" y2=\"" << sy(p) << "\" stroke=\"black\"/>\n";
  }
  for (const auto& r : report.rows) {
    svg << "<text x=\"" << sx(r.n) << "\" y=\"" << sy(0) + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"11\">"
        << r.n << "</text>\n";
  }
  // Wilson band
  std::ostringstream band;
  for (const auto& r : report.rows) band << sx(r.n) << "," << sy(r.ci_hi) << " ";
  for (auto it = report.rows.rbegin(); it != report.rows.rend(); ++it) {
    band << sx(it->n) << "," << sy(it->ci_lo) << " ";
  }
  svg << "<polygon points=\"" << band.str()
      << "\" fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\"/>\n";
  // p_hat polyline + markers
  std::ostringstream line;
  for (const auto& r : report.rows) line << sx(r.n) << "," << sy(r.p_hat) << " ";
  svg << "<polyline points=\"" << line.str()
      << "\" fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\"/>\n";
  for (const auto& r : report.rows) {
    svg << "<circle cx=\"" << sx(r.n) << "\" cy=\"" << sy(r.p_hat)
        << "\" r=\"3\" fill=\"#08519c\"/>\n";
  }
  svg << "<text x=\"" << (ml + width - mr) / 2 << "\" y=\"" << height - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"13\">n</text>\n";
  svg << "</svg>\n";

  emit(svg.str(), out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"noisynth: programming-by-example synthesis over noisy data"};
  app.require_subcommand(1);

  // synth
  std::string grammar_path, data_path, loss_spec = "zero_infty";
  std::string costs_spec = "size", out_path, dump_path;
  int depth = 2;
  uint64_t seed = 0;
  auto* synth = app.add_subcommand("synth", "synthesize a program from data");
  synth->add_option("--grammar", grammar_path, "grammar JSON file")->required();
  synth->add_option("--data", data_path, "data JSON file (inputs/outputs)")
      ->required();
  synth->add_option("--loss", loss_spec, "loss: name, inline JSON, or file");
  synth->add_option("--depth", depth, "height bound d");
  synth->add_option("--costs", costs_spec, "costs: size, inline JSON, or file");
  synth->add_option("--seed", seed, "seed recorded in the output");
  synth->add_option("--out", out_path, "write result here instead of stdout");
  synth->add_option("--dump-fta", dump_path, "also write the FTA as JSON");

  // gen-data
  std::string input_spec, noise_spec = "identity", hidden_sexpr;
  int n = 10;
  auto* gen = app.add_subcommand("gen-data", "sample a noisy dataset");
  gen->add_option("--grammar", grammar_path, "grammar JSON file")->required();
  gen->add_option("--depth", depth, "height bound d");
  gen->add_option("--input", input_spec, "input source: inline JSON or file")
      ->required();
  gen->add_option("--noise", noise_spec, "noise: name, inline JSON, or file");
  gen->add_option("--n", n, "dataset size");
  gen->add_option("--seed", seed, "master seed");
  gen->add_option("--hidden", hidden_sexpr,
                  "fixed hidden program (s-expression); sampled if absent");
  gen->add_option("--out", out_path, "write dataset here instead of stdout");

  // converge
  std::string config_path;
  int jobs = 1;
  int64_t seed_override = -1;
  int trials_override = 0;
  auto* conv = app.add_subcommand("converge", "estimate convergence over n");
  conv->add_option("--config", config_path, "experiment config JSON")
      ->required();
  conv->add_option("--out", out_path, "CSV path (stdout if absent)");
  conv->add_option("--jobs", jobs, "worker threads; output is independent");
  conv->add_option("--seed", seed_override, "override the config seed");
  conv->add_option("--trials", trials_override, "override the config trials");

  // check-input-diff / check-noise-diff
  auto* cid = app.add_subcommand("check-input-diff",
                                 "estimate the differentiating-input predicate");
  cid->add_option("--config", config_path, "check config JSON")->required();
  cid->add_option("--out", out_path, "write estimate here instead of stdout");
  auto* cnd = app.add_subcommand("check-noise-diff",
                                 "estimate the differentiating-noise predicate");
  cnd->add_option("--config", config_path, "check config JSON")->required();
  cnd->add_option("--out", out_path, "write estimate here instead of stdout");

  // enumerate
  int64_t limit = -1;
  auto* enumerate =
      app.add_subcommand("enumerate", "list programs of height <= d");
  enumerate->add_option("--grammar", grammar_path, "grammar JSON file")
      ->required();
  enumerate->add_option("--depth", depth, "height bound d");
  enumerate->add_option("--limit", limit, "stop after this many programs");
  enumerate->add_option("--out", out_path, "write programs here");

  // dump-fta
  std::string inputs_spec;
  bool with_weights = false;
  auto* dump = app.add_subcommand("dump-fta", "build and dump an automaton");
  dump->add_option("--grammar", grammar_path, "grammar JSON file")->required();
  dump->add_option("--depth", depth, "height bound d");
  dump->add_option("--data", data_path, "data file; its inputs are used");
  dump->add_option("--inputs", inputs_spec, "inline JSON array of inputs");
  dump->add_flag("--weights", with_weights, "include per-state pi");
  dump->add_option("--out", out_path, "write JSON here instead of stdout");

  // plot
  std::string in_path, plot_title;
  auto* plot = app.add_subcommand("plot", "render a report CSV as SVG");
  plot->add_option("--in", in_path, "report CSV")->required();
  plot->add_option("--out", out_path, "SVG path")->required();
  plot->add_option("--title", plot_title, "plot title");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    // Successful --help paths return 0; anything else is a usage error.
    return code == 0 ? 0 : 1;
  }

  try {
    if (synth->parsed()) {
      return run_synth(grammar_path, data_path, loss_spec, depth, costs_spec,
                       seed, out_path, dump_path);
    }
    if (gen->parsed()) {
      return run_gen_data(grammar_path, depth, input_spec, noise_spec, n, seed,
                          hidden_sexpr, out_path);
    }
    if (conv->parsed()) {
      return run_converge(config_path, out_path, jobs, seed_override,
                          trials_override);
    }
    if (cid->parsed()) return run_check_input_diff(config_path, out_path);
    if (cnd->parsed()) return run_check_noise_diff(config_path, out_path);
    if (enumerate->parsed()) {
      return run_enumerate(grammar_path, depth, limit, out_path);
    }
    if (dump->parsed()) {
      return run_dump_fta(grammar_path, depth, data_path, inputs_spec,
                          with_weights, out_path);
    }
    if (plot->parsed()) return run_plot(in_path, out_path, plot_title);
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
