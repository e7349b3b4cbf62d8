#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "grnsp/cli/config.hpp"
#include "grnsp/cli/recipes.hpp"
#include "grnsp/errors.hpp"

using namespace grnsp;
using namespace grnsp::cli;

namespace {

struct CommonFlags {
  std::string config;
  Overrides over;
};

void add_common(CLI::App* sub, CommonFlags& f) {
  sub->add_option("--config", f.config, "JSON experiment config");
  sub->add_option("--out-dir", f.over.out_dir, "output directory (default: out)");
  sub->add_option("--format", f.over.format, "csv or json (default: csv)");
  sub->add_option("--tol", f.over.tol, "integrator tolerance in [1e-12, 1e-6] (default: 1e-9)");
  sub->add_option("--threads", f.over.threads, "worker threads for sweeps (default: 1)");
}

ExperimentConfig effective_config(const CommonFlags& f) {
  if (!f.config.empty()) return load_config(f.config, f.over);
  return parse_config(nlohmann::json::object(), f.over);
}

void report(const RunResult& r, const std::vector<std::filesystem::path>& paths) {
  for (const std::string& line : r.summary) std::cout << line << "\n";
  for (const auto& p : paths) std::cout << "wrote " << p.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-gene switching network: simulation, bifurcation and singular-limit tools"};
  app.set_version_flag("--version", GRNSP_VERSION);
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> plain{
      {"simulate", "integrate one trajectory and classify its attractor"},
      {"equilibrium", "equilibrium, eigenvalues and stability"},
      {"continue", "continue the equilibrium along a parameter path and locate Hopf points"},
      {"hopf-curve", "trace the Hopf curve from the first Hopf point on the path"},
      {"pwl", "exact switching-limit flow and its return map"},
      {"charts-check", "blow-up atlas coherence checks"},
      {"parplane", "classify a (sigma, eps) grid"},
  };
  CommonFlags flags;
  std::string recipe_name;
  for (const auto& [name, help] : plain) add_common(app.add_subcommand(name, help), flags);
  CLI::App* rep = app.add_subcommand("reproduce", "run a named recipe with pinned settings");
  add_common(rep, flags);
  std::string recipe_help = "recipe:";
  for (const RecipeInfo& r : recipes()) recipe_help += " " + r.name;
  rep->add_option("recipe", recipe_name, recipe_help)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  std::string command;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    // output location and thread count do not belong in the provenance
    if (a == "--out-dir" || a == "--threads") {
      ++i;
      continue;
    }
    if (a.rfind("--out-dir=", 0) == 0 || a.rfind("--threads=", 0) == 0) continue;
    command += (command.empty() ? "" : " ") + a;
  }

  try {
    const ExperimentConfig cfg = effective_config(flags);
    const Format fmt = format_from_name(cfg.format);
    RunResult r;
    std::string hash;
    if (rep->parsed()) {
      RecipeSettings s;
      s.tol = cfg.tol;
      s.threads = cfg.threads;
      r = run_recipe(recipe_name, s);
      hash = recipe_hash(recipe_name, s, cfg.format);
    } else {
      const std::string sub = app.get_subcommands().front()->get_name();
      if (sub == "simulate") r = run_simulate(cfg);
      else if (sub == "equilibrium") r = run_equilibrium(cfg);
      else if (sub == "continue") r = run_continue(cfg);
      else if (sub == "hopf-curve") r = run_hopf_curve(cfg);
      else if (sub == "pwl") r = run_pwl(cfg);
      else if (sub == "charts-check") r = run_charts_check(cfg);
      else r = run_parplane(cfg);
      hash = config_hash(cfg);
    }
    report(r, emit(r, cfg.out_dir, fmt, command, hash));
    return 0;
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure in '" << command << "': " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
