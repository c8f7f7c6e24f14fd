#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <string>

#include <json.hpp>

#include "wrisk/errors.hpp"
#include "wrisk/estimator.hpp"
#include "wrisk/io.hpp"
#include "wrisk/oracle.hpp"
#include "wrisk/risk.hpp"
#include "wrisk/rng.hpp"
#include "wrisk/semgen.hpp"

namespace wrisk {
namespace {

using nlohmann::json;

std::string format_g(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

struct LoadedEnvironments {
  EnvironmentMoments observational;
  std::vector<EnvironmentMoments> shifted;
  json inputs;  // per-environment path + hash
};

/// Loads env_O plus env_A1..env_Ak from `dir`. Sample CSVs take precedence;
/// exported moments files (moments_<env>.json) are accepted as the
/// sampling-free path.
LoadedEnvironments load_environments(const std::filesystem::path& dir) {
  const auto load_one = [&dir](const std::string& env) -> std::optional<std::pair<EnvironmentMoments, json>> {
    const std::filesystem::path csv = dir / ("env_" + env + ".csv");
    if (std::filesystem::exists(csv)) {
      json record{{"path", csv.string()}, {"hash", file_hash_hex(csv)}};
      return std::make_pair(estimate_moments(read_sample_csv(csv, env)), record);
    }
    const std::filesystem::path moments = dir / ("moments_" + env + ".json");
    if (std::filesystem::exists(moments)) {
      json record{{"path", moments.string()}, {"hash", file_hash_hex(moments)}};
      return std::make_pair(read_moments_json(moments), record);
    }
    return std::nullopt;
  };

  LoadedEnvironments loaded;
  loaded.inputs = json::object();
  auto obs = load_one("O");
  if (!obs) throw IoError("data directory '" + dir.string() + "' has no env_O.csv or moments_O.json");
  loaded.observational = obs->first;
  loaded.inputs["O"] = obs->second;

  for (int i = 1;; ++i) {
    auto env = load_one("A" + std::to_string(i));
    if (!env) break;
    loaded.shifted.push_back(env->first);
    loaded.inputs["A" + std::to_string(i)] = env->second;
  }
  if (loaded.shifted.empty())
    throw IoError("data directory '" + dir.string() + "' has no shifted environment (env_A1.*)");
  for (const auto& m : loaded.shifted)
    if (m.dim() != loaded.observational.dim())
      throw IoError("environment dimensions in '" + dir.string() + "' do not agree");
  return loaded;
}

EstimatorConfig estimator_config(const RunConfig& config) {
  EstimatorConfig cfg;
  cfg.root_mode = config.root_mode;
  cfg.bisection_budget = config.bisection_budget;
  return cfg;
}

json candidate_to_json(const CandidateRecord& record) {
  const Candidate& c = record.candidate;
  json entry;
  entry["provenance"] = c.kind == Candidate::Kind::kInflexion ? "inflexion" : "intersection";
  entry["env_i"] = c.env_i + 1;
  if (c.kind == Candidate::Kind::kIntersection) {
    entry["env_j"] = c.env_j + 1;
    entry["lambda"] = c.lambda;
  } else {
    entry["lambda"] = nullptr;
  }
  entry["beta"] = std::vector<double>(c.beta.data(), c.beta.data() + c.beta.size());
  entry["objective"] = c.objective;
  entry["kept"] = record.kept;
  entry["reason"] = record.reason;
  return entry;
}

json report_to_json(const EstimatorReport& report) {
  json out;
  out["candidates"] = json::array();
  for (const auto& record : report.candidates) out["candidates"].push_back(candidate_to_json(record));
  out["warnings"] = report.warnings;
  return out;
}

void write_json_file(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << doc.dump(2) << "\n";
}

int run_guarded(const std::function<int()>& body) {
  try {
    return body();
  } catch (const SpecValidationError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const GridGuardExceededError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NoCandidateError& e) {
    std::cerr << "estimation degenerate: " << e.what() << "\n";
    return kExitDegenerate;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return kExitIo;
  }
}

}  // namespace

int cmd_simulate(const RunConfig& config) {
  return run_guarded([&] {
    SemSpec spec = read_sem_spec_json(config.spec_path);
    if (config.seed) spec.seed = *config.seed;
    if (config.sample_count < 1) throw SpecValidationError("n: must be >= 1");

    const std::filesystem::path out_dir =
        config.output_path.empty() ? std::filesystem::path(".") : config.output_path;
    std::filesystem::create_directories(out_dir);

    json files = json::array();
    for (int env = 0; env <= spec.num_shifted; ++env) {
      const EnvironmentSample sample = sample_environment(spec, env, config.sample_count);
      const std::filesystem::path path = out_dir / ("env_" + env_label(env) + ".csv");
      write_sample_csv(path, sample);
      files.push_back({{"path", path.string()}, {"hash", file_hash_hex(path)}});
      if (config.write_population_moments) {
        const std::filesystem::path mpath = out_dir / ("moments_" + env_label(env) + ".json");
        write_moments_json(mpath, population_moments(spec, env));
        files.push_back({{"path", mpath.string()}, {"hash", file_hash_hex(mpath)}});
      }
    }

    json manifest;
    manifest["format_version"] = kReportFormatVersion;
    manifest["command"] = "simulate";
    manifest["seed"] = spec.seed;
    manifest["n"] = config.sample_count;
    manifest["spec"] = {{"path", config.spec_path.string()}, {"hash", file_hash_hex(config.spec_path)}};
    manifest["files"] = files;
    write_json_file(out_dir / "manifest.json", manifest);
    std::cout << "wrote " << (spec.num_shifted + 1) << " environment files to " << out_dir.string()
              << "\n";
    return kExitOk;
  });
}

int cmd_estimate(const RunConfig& config) {
  return run_guarded([&] {
    if (config.gamma < 0.0) throw SpecValidationError("gamma: must be >= 0");
    const LoadedEnvironments loaded = load_environments(config.data_dir);
    const WorstRiskObjective objective =
        objective_from_moments(loaded.shifted, loaded.observational, config.gamma);
    const EstimatorConfig cfg = estimator_config(config);

    json doc;
    doc["format_version"] = kReportFormatVersion;
    doc["command"] = "estimate";
    doc["gamma"] = config.gamma;
    doc["tau"] = objective.tau();
    doc["root_mode"] = config.root_mode == RootMode::kExactRefine ? "exact" : "bisect";
    doc["cn"] = config.bisection_budget;
    doc["inputs"] = loaded.inputs;

    const std::filesystem::path out_path =
        config.output_path.empty() ? std::filesystem::path("estimate_report.json") : config.output_path;

    try {
      const MinimizeResult result = minimize_worst_risk(objective, cfg);
      doc["status"] = "ok";
      doc["beta"] =
          std::vector<double>(result.best.beta.data(), result.best.beta.data() + result.best.beta.size());
      doc["objective"] = result.best.objective;
      std::vector<int> active;
      for (int i : objective.worst_risk(result.best.beta).argmax_envs) active.push_back(i + 1);
      doc["active_envs"] = active;
      doc["report"] = report_to_json(result.report);
      write_json_file(out_path, doc);
      std::cout << format_report(result.report);
      std::cout << "beta_hat = [";
      for (Eigen::Index u = 0; u < result.best.beta.size(); ++u)
        std::cout << (u ? ", " : "") << format_g(result.best.beta[u]);
      std::cout << "], f = " << format_g(result.best.objective) << "\n";
      return kExitOk;
    } catch (const NoCandidateError& e) {
      doc["status"] = "degenerate";
      doc["error"] = e.what();
      doc["report"] = report_to_json(e.report());
      write_json_file(out_path, doc);
      std::cerr << "estimation degenerate: " << e.what() << " (report written to " << out_path.string()
                << ")\n";
      return kExitDegenerate;
    }
  });
}

int cmd_sweep(const RunConfig& config) {
  return run_guarded([&] {
    if (config.gamma_grid.empty()) throw SpecValidationError("gamma-grid: must be nonempty");
    for (std::size_t u = 0; u < config.gamma_grid.size(); ++u) {
      if (config.gamma_grid[u] < 0.0) throw SpecValidationError("gamma-grid: values must be >= 0");
      if (u > 0 && config.gamma_grid[u] <= config.gamma_grid[u - 1])
        throw SpecValidationError("gamma-grid: values must be strictly ascending");
    }

    const LoadedEnvironments loaded = load_environments(config.data_dir);
    const EstimatorConfig cfg = estimator_config(config);
    const Eigen::Index p = loaded.observational.dim();

    const std::filesystem::path out_path =
        config.output_path.empty() ? std::filesystem::path("sweep.csv") : config.output_path;
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open '" + out_path.string() + "' for writing");
    out << "gamma,tau,status,objective,active_envs";
    for (Eigen::Index u = 0; u < p; ++u) out << ",beta_" << (u + 1);
    out << "\n";

    bool monotone = true;
    double previous = -std::numeric_limits<double>::infinity();
    for (double gamma : config.gamma_grid) {
      const WorstRiskObjective objective =
          objective_from_moments(loaded.shifted, loaded.observational, gamma);
      out << format_g(gamma) << "," << format_g(objective.tau()) << ",";
      try {
        const MinimizeResult result = minimize_worst_risk(objective, cfg);
        const auto eval = objective.worst_risk(result.best.beta);
        out << "ok," << format_g(result.best.objective) << ",";
        for (std::size_t u = 0; u < eval.argmax_envs.size(); ++u)
          out << (u ? "|" : "") << (eval.argmax_envs[u] + 1);
        for (Eigen::Index u = 0; u < p; ++u) out << "," << format_g(result.best.beta[u]);
        out << "\n";
        if (result.best.objective < previous - 1e-12 * (1.0 + std::abs(previous))) monotone = false;
        previous = result.best.objective;
      } catch (const NoCandidateError&) {
        out << "degenerate,,";
        for (Eigen::Index u = 0; u < p; ++u) out << ",";
        out << "\n";
      }
    }
    std::cout << "worst risk nondecreasing in gamma: " << (monotone ? "yes" : "no") << "\n";
    std::cout << "wrote " << out_path.string() << "\n";
    return kExitOk;
  });
}

int cmd_validate(const RunConfig& config) {
  return run_guarded([&] {
    if (config.gamma < 0.0) throw SpecValidationError("gamma: must be >= 0");
    if (config.ladder.empty()) throw SpecValidationError("ladder: must be nonempty");
    SemSpec spec = read_sem_spec_json(config.spec_path);
    if (config.seed) spec.seed = *config.seed;
    const EstimatorConfig cfg = estimator_config(config);

    std::vector<EnvironmentMoments> population_shifted;
    for (int env = 1; env <= spec.num_shifted; ++env)
      population_shifted.push_back(population_moments(spec, env));
    const EnvironmentMoments population_obs = population_moments(spec, 0);
    const WorstRiskObjective population_objective =
        objective_from_moments(population_shifted, population_obs, config.gamma);
    const Eigen::VectorXd beta_population = minimize_worst_risk(population_objective, cfg).best.beta;

    const std::filesystem::path out_path =
        config.output_path.empty() ? std::filesystem::path("validate.csv") : config.output_path;
    std::ofstream out(out_path);
    if (!out) throw IoError("cannot open '" + out_path.string() + "' for writing");
    out << "n,status,dist,objective";
    for (Eigen::Index u = 0; u < beta_population.size(); ++u) out << ",beta_" << (u + 1);
    out << "\n";
    out << "population,ok,0," << format_g(population_objective.worst_risk(beta_population).value);
    for (Eigen::Index u = 0; u < beta_population.size(); ++u)
      out << "," << format_g(beta_population[u]);
    out << "\n";

    std::vector<double> distances;
    for (std::size_t rung = 0; rung < config.ladder.size(); ++rung) {
      const std::int64_t n = config.ladder[rung];
      if (n < 1) throw SpecValidationError("ladder: sample sizes must be >= 1");
      SemSpec rung_spec = spec;
      rung_spec.seed = mix_seed(spec.seed, 0x1adde7, rung);

      std::vector<EnvironmentMoments> shifted;
      for (int env = 1; env <= spec.num_shifted; ++env)
        shifted.push_back(estimate_moments(sample_environment(rung_spec, env, n)));
      const EnvironmentMoments obs = estimate_moments(sample_environment(rung_spec, 0, n));
      const WorstRiskObjective objective = objective_from_moments(shifted, obs, config.gamma);

      out << n << ",";
      try {
        const MinimizeResult result = minimize_worst_risk(objective, cfg);
        const double dist = (result.best.beta - beta_population).norm();
        distances.push_back(dist);
        out << "ok," << format_g(dist) << "," << format_g(result.best.objective);
        for (Eigen::Index u = 0; u < result.best.beta.size(); ++u)
          out << "," << format_g(result.best.beta[u]);
        out << "\n";
      } catch (const NoCandidateError&) {
        out << "degenerate,,";
        for (Eigen::Index u = 0; u < beta_population.size(); ++u) out << ",";
        out << "\n";
      }
    }

    if (distances.size() >= 2) {
      bool decreasing = true;
      for (std::size_t u = 1; u < distances.size(); ++u)
        if (distances[u] >= distances[u - 1]) decreasing = false;
      std::cout << "distance strictly decreasing along ladder: " << (decreasing ? "yes" : "no") << "\n";
    }
    std::cout << "wrote " << out_path.string() << "\n";
    return kExitOk;
  });
}

int cmd_oracle_check(const RunConfig& config) {
  return run_guarded([&] {
    if (config.gamma < 0.0) throw SpecValidationError("gamma: must be >= 0");
    const LoadedEnvironments loaded = load_environments(config.data_dir);
    const WorstRiskObjective objective =
        objective_from_moments(loaded.shifted, loaded.observational, config.gamma);
    const EstimatorConfig cfg = estimator_config(config);

    double radius = config.grid_radius;
    if (radius <= 0.0) {
      radius = suggest_radius(objective);
      if (!std::isfinite(radius))
        throw SpecValidationError(
            "grid-radius: objective is not coercive, pass an explicit --grid-radius");
      const double per_axis_cap =
          std::pow(GridSpec::kMaxPoints, 1.0 / static_cast<double>(objective.dim()));
      radius = std::min(radius, 0.49 * config.grid_step * per_axis_cap);
    }

    GridSpec grid;
    grid.radius = radius;
    grid.step = config.grid_step;
    grid.dim = static_cast<int>(objective.dim());

    const MinimizeResult estimate = minimize_worst_risk(objective, cfg);
    const GridMinimum oracle = grid_minimize(objective, grid);
    const double max_diff = (estimate.best.beta - oracle.argmin).cwiseAbs().maxCoeff();
    const bool pass = max_diff <= 2.0 * config.grid_step;

    std::cout << "grid radius = " << format_g(radius) << ", step = " << format_g(config.grid_step)
              << "\n";
    std::cout << "beta_hat  = [";
    for (Eigen::Index u = 0; u < estimate.best.beta.size(); ++u)
      std::cout << (u ? ", " : "") << format_g(estimate.best.beta[u]);
    std::cout << "], f = " << format_g(estimate.best.objective) << "\n";
    std::cout << "beta_grid = [";
    for (Eigen::Index u = 0; u < oracle.argmin.size(); ++u)
      std::cout << (u ? ", " : "") << format_g(oracle.argmin[u]);
    std::cout << "], f = " << format_g(oracle.value) << "\n";
    std::cout << "max|diff| = " << format_g(max_diff) << " vs 2*step = "
              << format_g(2.0 * config.grid_step) << " -> " << (pass ? "agree" : "MISMATCH") << "\n";

    if (!config.output_path.empty()) {
      json doc;
      doc["format_version"] = kReportFormatVersion;
      doc["command"] = "oracle-check";
      doc["gamma"] = config.gamma;
      doc["radius"] = radius;
      doc["step"] = config.grid_step;
      doc["beta_hat"] = std::vector<double>(estimate.best.beta.data(),
                                            estimate.best.beta.data() + estimate.best.beta.size());
      doc["beta_grid"] =
          std::vector<double>(oracle.argmin.data(), oracle.argmin.data() + oracle.argmin.size());
      doc["max_diff"] = max_diff;
      doc["agree"] = pass;
      write_json_file(config.output_path, doc);
    }
    return pass ? kExitOk : 1;
  });
}

}  // namespace wrisk
