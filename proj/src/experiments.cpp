#include "noisynth/experiments.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include "noisynth/enumerate.hpp"
#include "noisynth/errors.hpp"
#include "noisynth/fta.hpp"

namespace noisynth {

WilsonInterval wilson95(int successes, int trials) {
  if (trials <= 0) throw ConfigError("Wilson interval requires trials >= 1");
  const double z = 1.959963984540054;
  double n = trials;
  double phat = static_cast<double>(successes) / n;
  double denom = 1.0 + z * z / n;
  double center = (phat + z * z / (2 * n)) / denom;
  double half = z * std::sqrt(phat * (1 - phat) / n + z * z / (4 * n * n)) / denom;
  WilsonInterval ci{std::max(0.0, center - half), std::min(1.0, center + half)};
  // The boundary cases are exact; keep them free of rounding.
  if (successes == 0) ci.lo = 0.0;
  if (successes == trials) ci.hi = 1.0;
  return ci;
}

EquivalenceChecker::EquivalenceChecker(const Grammar& g,
                                       const InputSource& source,
                                       size_t probe_size, uint64_t audit_seed,
                                       size_t max_exhaustive)
    : grammar_(&g) {
  auto support = source.support(max_exhaustive);
  if (support) {
    probes_ = std::move(*support);
    exhaustive_ = true;
  } else {
    Rng rng(audit_seed);
    probes_.reserve(probe_size);
    for (size_t i = 0; i < probe_size; ++i) probes_.push_back(source.sample(rng));
    exhaustive_ = false;
  }
  if (probes_.empty()) {
    throw ConfigError("equivalence checker has no probe inputs");
  }
}

std::string EquivalenceChecker::signature(const Program& p) const {
  std::string sig;
  for (const InputEnv& env : probes_) {
    try {
      sig += evaluate(*grammar_, p, env).repr();
    } catch (const EvalError&) {
      sig += "<error>";
    }
    sig += ";";
  }
  return sig;
}

bool EquivalenceChecker::equivalent(const Program& a, const Program& b) const {
  for (const InputEnv& env : probes_) {
    std::optional<Value> va, vb;
    try {
      va = evaluate(*grammar_, a, env);
    } catch (const EvalError&) {
    }
    try {
      vb = evaluate(*grammar_, b, env);
    } catch (const EvalError&) {
    }
    if (va.has_value() != vb.has_value()) return false;
    if (va && *va != *vb) return false;
  }
  return true;
}

Dataset generate_dataset(const Prior& prior, const InputSource& source,
                         const NoiseModel& noise, int n, uint64_t seed,
                         const Program* fixed_hidden) {
  if (n < 1) throw ConfigError("dataset size must be >= 1");
  Rng rng(seed);
  Dataset ds;
  ds.hidden = fixed_hidden ? *fixed_hidden : prior.sample(rng);
  ds.inputs.reserve(n);
  for (int i = 0; i < n; ++i) ds.inputs.push_back(source.sample(rng));
  ds.clean = evaluate_vec(prior.grammar(), ds.hidden, ds.inputs);
  ds.noisy = noise.corrupt(ds.clean, rng);
  return ds;
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j,
                                             const std::string& base_dir) {
  ExperimentConfig cfg;
  if (j.at("grammar").is_string()) {
    std::filesystem::path p = j["grammar"].get<std::string>();
    if (p.is_relative() && !base_dir.empty()) {
      p = std::filesystem::path(base_dir) / p;
    }
    cfg.grammar = Grammar::load(p.string());
  } else {
    cfg.grammar = Grammar::from_json(j["grammar"]);
  }
  cfg.depth = j.at("depth").get<int>();
  cfg.input_source = InputSource::from_json(j.at("input_source"));
  cfg.noise = NoiseModel::from_json(j.at("noise"));
  cfg.loss = LossFn::from_json(j.at("loss"));
  cfg.costs = CostModel::from_json(
      cfg.grammar, j.contains("costs") ? j["costs"] : nlohmann::json());
  cfg.n_grid = j.at("n_grid").get<std::vector<int>>();
  for (int n : cfg.n_grid) {
    if (n < 1) throw ConfigError("n_grid entries must be >= 1");
  }
  cfg.trials = j.at("trials").get<int>();
  if (cfg.trials < 1) throw ConfigError("trials must be >= 1");
  cfg.seed = j.value("seed", 0ull);
  cfg.probe_size = j.value("probe_size", 1000u);
  cfg.label = j.value("label", std::string{});
  cfg.worst_case = j.value("worst_case", false);
  if (j.contains("hidden")) {
    cfg.hidden = parse_sexpr(cfg.grammar, j["hidden"].get<std::string>());
  }
  if (cfg.worst_case && cfg.hidden) {
    throw ConfigError("worst_case sweeps every hidden class; drop \"hidden\"");
  }
  // The source must bind every grammar variable.
  auto bound = cfg.input_source.variables();
  for (const std::string& var : cfg.grammar.variables()) {
    bool ok = false;
    for (const auto& b : bound) ok = ok || b == var;
    if (!ok) {
      throw ConfigError("input source does not bind grammar variable " + var);
    }
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open experiment config: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("experiment config " + path + ": " + e.what());
  }
  return from_json(j, std::filesystem::path(path).parent_path().string());
}

namespace {

// status of one trial
enum class TrialOutcome : uint8_t { Failure = 0, Success = 1, Error = 2 };

TrialOutcome run_trial(const ExperimentConfig& cfg, const Prior& prior,
                       const EquivalenceChecker& checker,
                       const Program* hidden, int n, uint64_t trial_seed) {
  try {
    Dataset ds = generate_dataset(prior, cfg.input_source, cfg.noise, n,
                                  trial_seed, hidden);
    SynthesisProblem problem{&cfg.grammar, cfg.depth, &prior,
                             &cfg.loss,    &cfg.costs, ds.inputs,
                             ds.noisy};
    SynthesisResult result = synthesize(problem);
    // The all-infinite fallback carries no information about the data; the
    // success predicate requires a strict win, so it never counts.
    if (result.all_infinite) return TrialOutcome::Failure;
    return checker.equivalent(result.program, ds.hidden)
               ? TrialOutcome::Success
               : TrialOutcome::Failure;
  } catch (const std::exception&) {
    return TrialOutcome::Error;
  }
}

// One grid sweep for a fixed (possibly sampled) hidden program. `salt`
// separates the trial-seed streams of different hidden classes in
// worst-case mode; salt 0 reproduces the plain single-sweep stream.
std::vector<ConvergenceRow> run_grid(const ExperimentConfig& cfg,
                                     const Prior& prior,
                                     const EquivalenceChecker& checker,
                                     const Program* hidden, uint64_t salt,
                                     int jobs) {
  std::vector<ConvergenceRow> rows;
  for (int n : cfg.n_grid) {
    std::vector<TrialOutcome> outcomes(cfg.trials, TrialOutcome::Failure);
    auto worker = [&](int begin, int end) {
      for (int t = begin; t < end; ++t) {
        uint64_t trial_seed =
            salt == 0 ? mix_seed({cfg.seed, static_cast<uint64_t>(n),
                                  static_cast<uint64_t>(t)})
                      : mix_seed({cfg.seed, salt, static_cast<uint64_t>(n),
                                  static_cast<uint64_t>(t)});
        outcomes[t] = run_trial(cfg, prior, checker, hidden, n, trial_seed);
      }
    };
    if (jobs == 1) {
      worker(0, cfg.trials);
    } else {
      std::vector<std::thread> threads;
      int chunk = (cfg.trials + jobs - 1) / jobs;
      for (int w = 0; w < jobs; ++w) {
        int begin = w * chunk;
        int end = std::min(cfg.trials, begin + chunk);
        if (begin >= end) break;
        threads.emplace_back(worker, begin, end);
      }
      for (auto& th : threads) th.join();
    }

    ConvergenceRow row;
    row.n = n;
    row.trials = cfg.trials;
    for (TrialOutcome o : outcomes) {
      if (o == TrialOutcome::Success) ++row.successes;
      if (o == TrialOutcome::Error) ++row.errors;
    }
    row.p_hat = static_cast<double>(row.successes) / row.trials;
    WilsonInterval ci = wilson95(row.successes, row.trials);
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

ConvergenceReport estimate_convergence(const ExperimentConfig& cfg, int jobs) {
  if (jobs < 1) throw ConfigError("jobs must be >= 1");
  Prior prior(cfg.grammar, cfg.depth);
  EquivalenceChecker checker(cfg.grammar, cfg.input_source, cfg.probe_size,
                             mix_seed({cfg.seed, 0xa0d17u}));

  ConvergenceReport report;
  if (!cfg.worst_case) {
    report.rows =
        run_grid(cfg, prior, checker, cfg.hidden ? &*cfg.hidden : nullptr,
                 /*salt=*/0, jobs);
  } else {
    // One representative per equivalence class, by signature; the reported
    // curve is the pointwise minimum and the per-class curves go to
    // metadata.
    std::vector<std::pair<std::string, Program>> reps;  // (sexpr, program)
    {
      std::map<std::string, std::pair<std::string, Program>> by_signature;
      for (const Program& p : prior.programs()) {
        std::string sexpr = to_sexpr(cfg.grammar, p);
        auto sig = checker.signature(p);
        auto it = by_signature.find(sig);
        if (it == by_signature.end() || sexpr < it->second.first) {
          by_signature.insert_or_assign(sig, std::make_pair(sexpr, p));
        }
      }
      for (auto& [sig, entry] : by_signature) reps.push_back(entry);
      std::sort(reps.begin(), reps.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
    }

    nlohmann::json per_hidden = nlohmann::json::object();
    std::vector<std::vector<ConvergenceRow>> all_rows;
    for (size_t k = 0; k < reps.size(); ++k) {
      auto rows = run_grid(cfg, prior, checker, &reps[k].second,
                           /*salt=*/k + 1, jobs);
      nlohmann::json curve = nlohmann::json::array();
      for (const auto& r : rows) curve.push_back(r.p_hat);
      per_hidden[reps[k].first] = curve;
      all_rows.push_back(std::move(rows));
    }
    for (size_t i = 0; i < cfg.n_grid.size(); ++i) {
      const ConvergenceRow* worst = &all_rows[0][i];
      for (const auto& rows : all_rows) {
        if (rows[i].p_hat < worst->p_hat) worst = &rows[i];
      }
      report.rows.push_back(*worst);
    }
    report.metadata["per_hidden"] = per_hidden;
    report.metadata["worst_case"] = true;
  }

  nlohmann::json per_row_errors = nlohmann::json::array();
  for (const auto& row : report.rows) per_row_errors.push_back(row.errors);

  report.metadata["grammar"] = cfg.grammar.name;
  report.metadata["depth"] = cfg.depth;
  report.metadata["input_source"] = cfg.input_source.to_json();
  report.metadata["noise"] = cfg.noise.to_json();
  report.metadata["loss"] = cfg.loss.to_json();
  report.metadata["trials"] = cfg.trials;
  report.metadata["seed"] = cfg.seed;
  report.metadata["equivalence"] =
      checker.exhaustive() ? "exhaustive" : "probe";
  report.metadata["probe_count"] = checker.probe_count();
  report.metadata["errors"] = per_row_errors;
  if (cfg.hidden) {
    report.metadata["hidden"] = to_sexpr(cfg.grammar, *cfg.hidden);
  }
  if (!cfg.label.empty()) report.metadata["label"] = cfg.label;
  return report;
}

DiffEstimate check_input_differentiating(const Grammar& g, int d,
                                         const InputSource& source,
                                         const DistanceFn& distance,
                                         const Program& hidden, int n,
                                         double epsilon, int trials,
                                         uint64_t seed,
                                         const InputSource* equivalence_source,
                                         size_t enumeration_cap) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  if (n < 1) throw ConfigError("dataset size must be >= 1");
  EquivalenceChecker checker(g, equivalence_source ? *equivalence_source : source,
                             1000, mix_seed({seed, 0xa0d17u}));
  std::vector<Program> programs = enumerate_programs(g, d, enumeration_cap);
  std::string hidden_sig = checker.signature(hidden);
  std::vector<const Program*> rivals;
  for (const Program& p : programs) {
    if (checker.signature(p) != hidden_sig) rivals.push_back(&p);
  }

  int successes = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed({seed, static_cast<uint64_t>(n), static_cast<uint64_t>(t)}));
    std::vector<InputEnv> inputs;
    inputs.reserve(n);
    for (int i = 0; i < n; ++i) inputs.push_back(source.sample(rng));
    std::vector<Value> z_h = evaluate_vec(g, hidden, inputs);
    bool ok = true;
    for (const Program* p : rivals) {
      std::vector<Value> z;
      try {
        z = evaluate_vec(g, *p, inputs);
      } catch (const EvalError&) {
        continue;  // no output vector to confuse with
      }
      if (static_cast<double>(distance.eval(z_h, z)) <= epsilon) {
        ok = false;
        break;
      }
    }
    if (ok) ++successes;
  }
  WilsonInterval ci = wilson95(successes, trials);
  return DiffEstimate{trials, successes,
                      static_cast<double>(successes) / trials, ci.lo, ci.hi};
}

DiffEstimate check_noise_differentiating(
    const Grammar& g, int d, const std::vector<InputEnv>& inputs,
    const NoiseModel& noise, const LossFn& loss, const DistanceFn& distance,
    const std::vector<Value>& z_h, double gamma, double epsilon, int trials,
    uint64_t seed) {
  if (trials < 1) throw ConfigError("trials must be >= 1");
  Fta fta = Fta::build(g, inputs, d);
  std::vector<std::vector<Value>> candidates;
  candidates.reserve(fta.accepting().size());
  for (int q : fta.accepting()) candidates.push_back(fta.states()[q].values);

  int successes = 0;
  for (int t = 0; t < trials; ++t) {
    Rng rng(mix_seed({seed, static_cast<uint64_t>(t)}));
    std::vector<Value> y = noise.corrupt(z_h, rng);
    double loss_h = loss.eval(z_h, y);
    bool ok = true;
    for (const auto& z : candidates) {
      double loss_z = loss.eval(z, y);
      // Extended-real gap with inf - inf = 0.
      double gap;
      if (std::isinf(loss_z) && std::isinf(loss_h)) {
        gap = 0;
      } else if (std::isinf(loss_z)) {
        gap = kInfinity;
      } else if (std::isinf(loss_h)) {
        gap = -kInfinity;
      } else {
        gap = loss_z - loss_h;
      }
      if (gap <= gamma &&
          static_cast<double>(distance.eval(z, z_h)) >= epsilon) {
        ok = false;
        break;
      }
    }
    if (ok) ++successes;
  }
  WilsonInterval ci = wilson95(successes, trials);
  return DiffEstimate{trials, successes,
                      static_cast<double>(successes) / trials, ci.lo, ci.hi};
}

double expected_reward(const Grammar& g, int d, const Prior& prior,
                       const NoiseModel& noise,
                       const std::vector<InputEnv>& inputs,
                       const std::vector<Value>& y,
                       const std::vector<Value>& c) {
  Fta fta = Fta::build(g, inputs, d);
  StateWeightTable weights(fta, prior);
  LogReal total = LogReal::zero();
  LogReal target = LogReal::zero();
  for (int q : fta.accepting()) {
    LogReal mass = weights.weight(q, d) * noise.pmf(y, fta.states()[q].values);
    total += mass;
    if (fta.states()[q].values == c) target = mass;
  }
  if (total.is_zero()) {
    throw ConfigError("expected reward undefined: y is unreachable from every "
                      "output class");
  }
  return target.is_zero() ? 0.0 : (target / total).linear();
}

namespace {

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v,
                                 std::chars_format::general, 17);
  std::string s(buf, ptr);
  // Trim to the shortest representation that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    auto [p2, e2] = std::to_chars(buf, buf + sizeof(buf), v,
                                  std::chars_format::general, prec);
    std::string cand(buf, p2);
    double back;
    auto [p3, e3] = std::from_chars(cand.data(), cand.data() + cand.size(), back);
    if (e3 == std::errc() && back == v) return cand;
  }
  return s;
}

}  // namespace

std::string report_csv(const ConvergenceReport& report) {
  std::string out = "n,trials,successes,p_hat,ci_lo,ci_hi\n";
  for (const ConvergenceRow& r : report.rows) {
    out += std::to_string(r.n) + "," + std::to_string(r.trials) + "," +
           std::to_string(r.successes) + "," + format_double(r.p_hat) + "," +
           format_double(r.ci_lo) + "," + format_double(r.ci_hi) + "\n";
  }
  return out;
}

ConvergenceReport parse_report_csv(const std::string& csv) {
  ConvergenceReport report;
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != "n,trials,successes,p_hat,ci_lo,ci_hi") {
    throw ConfigError("report CSV has an unexpected header");
  }
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(row, field, ',')) fields.push_back(field);
    if (fields.size() != 6) {
      throw ConfigError("report CSV row has " + std::to_string(fields.size()) +
                        " fields: " + line);
    }
    ConvergenceRow r;
    try {
      r.n = std::stoi(fields[0]);
      r.trials = std::stoi(fields[1]);
      r.successes = std::stoi(fields[2]);
      r.p_hat = std::stod(fields[3]);
      r.ci_lo = std::stod(fields[4]);
      r.ci_hi = std::stod(fields[5]);
    } catch (const std::exception&) {
      throw ConfigError("report CSV row is not numeric: " + line);
    }
    report.rows.push_back(r);
  }
  return report;
}

void export_report(const ConvergenceReport& report, const std::string& path) {
  {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write report to " + path);
    out << report_csv(report);
  }
  std::ofstream meta(path + ".meta.json", std::ios::binary);
  if (!meta) throw ConfigError("cannot write report metadata next to " + path);
  meta << report.metadata.dump(2) << "\n";
}

}  // namespace noisynth
