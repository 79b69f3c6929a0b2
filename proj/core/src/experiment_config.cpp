#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "zoro/experiment.hpp"

namespace zoro {

namespace {

std::string where(const YAML::Node& node) {
  const YAML::Mark mark = node.Mark();
  if (mark.line < 0) return "";
  return " (line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1) +
         ")";
}

void reject_unknown(const YAML::Node& map, const std::string& section,
                    const std::set<std::string>& allowed) {
  if (!map.IsMap()) throw ConfigError("'" + section + "' must be a mapping" + where(map));
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      throw ConfigError("unknown key '" + key + "' in " + section + where(kv.first));
    }
  }
}

template <typename T>
T get(const YAML::Node& node, const std::string& key) {
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    throw ConfigError("bad value for '" + key + "'" + where(node));
  }
}

template <typename T>
void read(const YAML::Node& map, const std::string& key, T& out) {
  if (const YAML::Node n = map[key]) out = get<T>(n, key);
}

template <typename T>
void read(const YAML::Node& map, const std::string& key, std::optional<T>& out) {
  if (const YAML::Node n = map[key]) {
    if (n.IsNull()) {
      out.reset();
    } else {
      out = get<T>(n, key);
    }
  }
}

void read_problem(const YAML::Node& node, const std::filesystem::path& base,
                  ProblemDescriptor& p) {
  reject_unknown(node, "problem",
                 {"kind", "dimension", "sparsity", "omega", "k", "density", "lambda", "min_return",
                  "asset_dir", "huber_m", "optimum_value"});
  read(node, "kind", p.kind);
  read(node, "dimension", p.dimension);
  read(node, "sparsity", p.sparsity);
  read(node, "omega", p.omega);
  read(node, "k", p.k);
  read(node, "density", p.density);
  read(node, "lambda", p.lambda);
  read(node, "min_return", p.min_return);
  read(node, "huber_m", p.huber_m);
  read(node, "optimum_value", p.optimum_value);
  if (const YAML::Node n = node["asset_dir"]) {
    std::filesystem::path dir = get<std::string>(n, "asset_dir");
    if (dir.is_relative()) dir = base / dir;
    p.asset_dir = dir;
  }
}

void read_solver(const YAML::Node& node, SolverConfig& s) {
  reject_unknown(node, "solver",
                 {"sparsity", "step_size", "delta", "b1", "phi", "stage1_extra",
                  "cosamp_iterations", "warm_start", "spsa_batch", "max_iterations",
                  "query_budget", "target_value", "backtracking"});
  read(node, "sparsity", s.sparsity);
  read(node, "step_size", s.step_size);
  read(node, "delta", s.delta);
  read(node, "b1", s.b1);
  read(node, "phi", s.phi);
  read(node, "stage1_extra", s.stage1_extra);
  read(node, "cosamp_iterations", s.cosamp_iterations);
  read(node, "warm_start", s.warm_start);
  read(node, "spsa_batch", s.spsa_batch);
  read(node, "max_iterations", s.max_iterations);
  read(node, "query_budget", s.query_budget);
  read(node, "target_value", s.target_value);
  read(node, "backtracking", s.backtracking);
}

}  // namespace

ExperimentSpec parse_experiment_spec(std::string_view text, const std::filesystem::path& base_dir) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError("YAML syntax error: " + std::string(e.what()));
  }
  if (!root || root.IsNull()) throw ConfigError("experiment spec is empty");
  reject_unknown(root, "experiment",
                 {"name", "seed", "repetitions", "output_dir", "threshold", "stop_at_threshold",
                  "methods", "problem", "regularizer", "noise", "start", "solver"});

  ExperimentSpec spec;
  read(root, "name", spec.name);
  read(root, "seed", spec.seed);
  read(root, "repetitions", spec.repetitions);
  read(root, "threshold", spec.threshold);
  read(root, "stop_at_threshold", spec.stop_at_threshold);
  if (const YAML::Node n = root["output_dir"]) {
    spec.output_dir = get<std::string>(n, "output_dir");
  }

  const YAML::Node methods = root["methods"];
  if (!methods || !methods.IsSequence()) {
    throw ConfigError("'methods' must be a list" + where(root));
  }
  for (const auto& m : methods) spec.methods.push_back(parse_estimator_kind(get<std::string>(m, "methods")));

  if (const YAML::Node n = root["problem"]) {
    read_problem(n, base_dir, spec.problem);
  } else {
    throw ConfigError("missing 'problem' section");
  }
  if (const YAML::Node n = root["regularizer"]) {
    reject_unknown(n, "regularizer", {"kind", "lambda", "lower", "upper"});
    read(n, "kind", spec.regularizer.kind);
    read(n, "lambda", spec.regularizer.lambda);
    read(n, "lower", spec.regularizer.lower);
    read(n, "upper", spec.regularizer.upper);
  }
  if (const YAML::Node n = root["noise"]) {
    reject_unknown(n, "noise", {"kind", "sigma"});
    if (const YAML::Node k = n["kind"]) {
      try {
        spec.noise.kind = parse_noise_kind(get<std::string>(k, "kind"));
      } catch (const InvalidSpec& e) {
        throw ConfigError(std::string(e.what()) + where(k));
      }
    }
    read(n, "sigma", spec.noise.sigma);
  }
  if (const YAML::Node n = root["start"]) {
    reject_unknown(n, "start", {"kind", "value"});
    read(n, "kind", spec.start.kind);
    read(n, "value", spec.start.value);
  }
  if (const YAML::Node n = root["solver"]) read_solver(n, spec.solver);

  validate(spec);
  return spec;
}

ExperimentSpec load_experiment_spec(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open experiment spec");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_experiment_spec(buffer.str(), path.parent_path().empty() ? "." : path.parent_path());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace zoro
