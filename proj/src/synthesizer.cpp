#include "noisynth/synthesizer.hpp"

#include <chrono>
#include <map>

#include "noisynth/enumerate.hpp"
#include "noisynth/errors.hpp"
#include "noisynth/logreal.hpp"

namespace noisynth {

namespace {

void check_problem(const SynthesisProblem& p) {
  if (!p.grammar || !p.prior || !p.loss || !p.costs) {
    throw ConfigError("synthesis problem is missing a component");
  }
  if (p.inputs.empty() || p.inputs.size() != p.outputs.size()) {
    throw ConfigError("synthesis problem needs matching nonempty inputs and "
                      "outputs, got " +
                      std::to_string(p.inputs.size()) + " inputs and " +
                      std::to_string(p.outputs.size()) + " outputs");
  }
  if (p.prior->depth() != p.depth) {
    throw ConfigError("prior depth differs from problem depth");
  }
}

}  // namespace

bool objective_close(double a, double b) {
  if (std::isinf(a) || std::isinf(b)) return std::isinf(a) && std::isinf(b);
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

SynthesisResult synthesize(const SynthesisProblem& problem) {
  check_problem(problem);
  auto t0 = std::chrono::steady_clock::now();

  Fta fta = Fta::build(*problem.grammar, problem.inputs, problem.depth);
  if (fta.accepting().empty()) {
    throw ConfigError("empty FTA: no program of height <= " +
                      std::to_string(problem.depth) +
                      " evaluates on the inputs");
  }
  StateWeightTable weights(fta, *problem.prior);

  // fta.accepting() is ordered by value serialization, so scanning for a
  // strict improvement implements the tie-break.
  int best_state = -1;
  double best_objective = kInfinity;
  bool best_set = false;
  for (int q : fta.accepting()) {
    double objective =
        problem.loss->eval(fta.states()[q].values, problem.outputs) -
        weights.log_pi(q);
    if (!best_set ||
        (objective < best_objective && !objective_close(objective, best_objective))) {
      best_state = q;
      best_objective = objective;
      best_set = true;
    }
  }

  SynthesisResult result;
  result.program = extract_min_complexity(fta, best_state, *problem.costs);
  result.objective = best_objective;
  result.output_values = fta.states()[best_state].values;
  result.all_infinite = std::isinf(best_objective);
  result.diagnostics.state_count = fta.states().size();
  result.diagnostics.transition_count = fta.transitions().size();
  result.diagnostics.skipped_candidates = fta.skipped_candidates();
  result.diagnostics.class_count = fta.accepting().size();
  result.diagnostics.micros =
      std::chrono::duration_cast<std::chrono::microseconds>(
          std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

SynthesisResult oracle_synthesize(const SynthesisProblem& problem, size_t cap) {
  check_problem(problem);
  auto t0 = std::chrono::steady_clock::now();
  const Grammar& g = *problem.grammar;

  struct ClassInfo {
    std::vector<Value> values;
    LogReal mass;
    double best_cost = 0;
    std::string best_sexpr;
    Program best_program;
    bool has_program = false;
  };

  std::vector<Program> programs = enumerate_programs(g, problem.depth, cap);
  std::map<std::string, ClassInfo> classes;  // keyed by value serialization
  for (const Program& p : programs) {
    std::vector<Value> values;
    try {
      values = evaluate_vec(g, p, problem.inputs);
    } catch (const EvalError&) {
      continue;  // outside the value domain; the FTA skipped it too
    }
    ClassInfo& cls = classes[repr(values)];
    cls.mass += problem.prior->program_weight(p);
    if (cls.values.empty()) cls.values = values;
    double cost = complexity(g, p, *problem.costs);
    std::string sexpr = to_sexpr(g, p);
    if (!cls.has_program || cost < cls.best_cost ||
        (cost == cls.best_cost && sexpr < cls.best_sexpr)) {
      cls.best_cost = cost;
      cls.best_sexpr = std::move(sexpr);
      cls.best_program = p;
      cls.has_program = true;
    }
  }
  if (classes.empty()) {
    throw ConfigError("empty program space: no program evaluates on the inputs");
  }

  // Class mass normalized over realized classes, mirroring the automaton's
  // accepting-state normalizer.
  LogReal normalizer = LogReal::zero();
  for (const auto& [key, cls] : classes) normalizer += cls.mass;

  const ClassInfo* best = nullptr;
  double best_objective = kInfinity;
  for (const auto& [key, cls] : classes) {
    double objective = problem.loss->eval(cls.values, problem.outputs) -
                       (cls.mass.log() - normalizer.log());
    if (!best ||
        (objective < best_objective && !objective_close(objective, best_objective))) {
      best = &cls;
      best_objective = objective;
    }
  }

  SynthesisResult result;
  result.program = best->best_program;
  result.objective = best_objective;
  result.output_values = best->values;
  result.all_infinite = std::isinf(best_objective);
  result.diagnostics.class_count = classes.size();
  result.diagnostics.state_count = programs.size();
  result.diagnostics.micros =
      std::chrono::duration_cast<std::chrono::microseconds>(
          std::chrono::steady_clock::now() - t0)
          .count();
  return result;
}

}  // namespace noisynth
