#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "grnsp/cli/config.hpp"
#include "grnsp/cli/table.hpp"

namespace grnsp::cli {

struct RunResult {
  std::vector<ResultTable> tables;
  std::vector<std::string> summary;  // one line each, printed to stdout

  const ResultTable& table(const std::string& name) const;
};

// Cell accessors by column name; throw ValidationError on a type mismatch.
double real_at(const ResultTable& t, std::size_t row, const std::string& column);
std::int64_t int_at(const ResultTable& t, std::size_t row, const std::string& column);
const std::string& text_at(const ResultTable& t, std::size_t row, const std::string& column);

// Runs fn(0..n-1) on up to `threads` workers. Results must be written by
// index; the first exception (by index) is rethrown.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

// Subcommands, driven entirely by the config.
RunResult run_simulate(const ExperimentConfig& cfg);
RunResult run_equilibrium(const ExperimentConfig& cfg);
RunResult run_continue(const ExperimentConfig& cfg);
RunResult run_hopf_curve(const ExperimentConfig& cfg);
RunResult run_pwl(const ExperimentConfig& cfg);
RunResult run_charts_check(const ExperimentConfig& cfg);
RunResult run_parplane(const ExperimentConfig& cfg);

// Parameter-plane class of (sigma, eps): no-manifold-guarantee when
// eps / sigma >= mu0, otherwise hopf-possible / hopf-impossible by the ray
// slope eps / sigma^2 against alpha ("boundary" on the ray itself).
std::string parplane_class(double sigma, double eps, double mu0, const ModelParams& p);

struct RecipeInfo {
  std::string name;
  std::string description;
  std::vector<std::string> aliases;
};
const std::vector<RecipeInfo>& recipes();
// Canonical recipe name for a name or alias; throws ValidationError.
std::string resolve_recipe(const std::string& name);

// Recipes pin every model setting. Only tol and threads are taken from the
// caller (the hamiltonian recipe pins tol = 1e-10 as well).
struct RecipeSettings {
  double tol = 1e-9;
  int threads = 1;
};
RunResult run_recipe(const std::string& name, const RecipeSettings& s = {});
std::string recipe_hash(const std::string& name, const RecipeSettings& s, const std::string& format);

// Stamps provenance on every table and writes them; returns the paths.
std::vector<std::filesystem::path> emit(RunResult& r, const std::filesystem::path& dir, Format f,
                                        const std::string& command, const std::string& hash);

}  // namespace grnsp::cli
