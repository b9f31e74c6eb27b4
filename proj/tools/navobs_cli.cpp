// Command-line driver: simulate the navigation scenario, compare observers,
// and report assumption constants and theoretical gain thresholds.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "navobs/artifacts.hpp"
#include "navobs/config.hpp"
#include "navobs/errors.hpp"
#include "navobs/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitValidation = 2;
constexpr int kExitDivergence = 3;

struct Overrides {
  std::string config_path;
  std::optional<double> dt;
  std::optional<double> t_end;
  std::optional<std::string> out;
  std::optional<std::string> observer;
};

void add_common_options(CLI::App* cmd, Overrides& o, bool with_observer) {
  cmd->add_option("config", o.config_path, "JSON configuration file (defaults when omitted)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--dt", o.dt, "integration step [s]");
  cmd->add_option("--t-end", o.t_end, "simulation horizon [s]");
  cmd->add_option("--out", o.out, "output directory");
  if (with_observer) {
    cmd->add_option("--observer", o.observer, "proposed | adhoc | both")
        ->check(CLI::IsMember({"proposed", "adhoc", "both"}));
  }
}

navobs::RunConfig resolve_config(const Overrides& o) {
  navobs::RunConfig cfg = o.config_path.empty() ? navobs::parse_config("")
                                                 : navobs::load_config_file(o.config_path);
  if (o.dt) cfg.scenario.dt = *o.dt;
  if (o.t_end) cfg.scenario.t_end = *o.t_end;
  if (o.out) cfg.output_dir = *o.out;
  if (o.observer) cfg.observers = *navobs::parse_observer_selection(*o.observer);
  navobs::validate_config(cfg);
  return cfg;
}

void print_assumptions(const navobs::AssumptionReport& a, bool strict) {
  std::cout << "c0 = " << a.c0 << " (t = " << a.t_c0 << ")\n"
            << "c1 = " << a.c1 << "\nc2 = " << a.c2 << "\nc3 = " << a.c3 << "\nc4 = " << a.c4
            << "\nc5 = " << a.c5 << "\n";
  if (!a.observability_ok) {
    std::cout << "VIOLATION: m_I and a_I become collinear (c0 = 0)\n";
  }
  if (!a.c_hat2_ok) {
    std::cout << (strict ? "VIOLATION: " : "warning: ")
              << "c_hat2 does not exceed sqrt(8) c2; the saturation may stay active\n";
  }
}

int run_simulation(const navobs::RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  const navobs::RunLog log = navobs::run_scenario(cfg);
  const auto files = navobs::emit_artifacts(log, cfg, cfg.output_dir);
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (!log.assumptions.observability_ok) {
    std::cerr << "warning: m_I and a_I become collinear; attitude is not observable\n";
  }
  std::cout << "simulated " << log.rows.size() << " steps in " << secs << " s\n";
  for (const auto& m : navobs::compute_metrics(log)) {
    std::cout << navobs::to_string(m.kind) << ": final |p~| = " << m.final_err.p
              << " m, |v~| = " << m.final_err.v << " m/s, |R~| = " << m.final_err.R
              << ", |b~| = " << m.final_err.b << " rad/s\n";
  }
  for (const auto& f : files) {
    std::cout << "wrote " << f.string() << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Position-aided inertial navigation observer: simulation and analysis"};
  app.require_subcommand(1);

  Overrides simulate_opts;
  Overrides compare_opts;
  Overrides bounds_opts;
  Overrides validate_opts;
  auto* simulate = app.add_subcommand("simulate", "run the configured observers and write artifacts");
  add_common_options(simulate, simulate_opts, true);
  auto* compare = app.add_subcommand("compare", "run both observers side by side");
  add_common_options(compare, compare_opts, false);
  auto* bounds = app.add_subcommand("check-bounds", "print theoretical gain thresholds");
  add_common_options(bounds, bounds_opts, false);
  auto* validate = app.add_subcommand("validate", "check the trajectory assumptions only");
  add_common_options(validate, validate_opts, false);

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      return run_simulation(resolve_config(simulate_opts));
    }
    if (compare->parsed()) {
      navobs::RunConfig cfg = resolve_config(compare_opts);
      cfg.observers = navobs::ObserverSelection::Both;
      return run_simulation(cfg);
    }
    if (bounds->parsed()) {
      const navobs::RunConfig cfg = resolve_config(bounds_opts);
      const navobs::BoundsCheck check = navobs::check_bounds(cfg);
      std::cout << navobs::format_bounds(check);
      const bool violated = !check.assumptions.observability_ok ||
                            (cfg.strict_theory && !check.assumptions.c_hat2_ok);
      return violated ? kExitValidation : kExitOk;
    }
    if (validate->parsed()) {
      const navobs::RunConfig cfg = resolve_config(validate_opts);
      const auto rep = navobs::validate_assumptions(
          cfg.scenario, navobs::uniform_grid(cfg.scenario.t_end, cfg.scenario.dt),
          cfg.gains.c_hat2);
      print_assumptions(rep, cfg.strict_theory);
      const bool violated = !rep.observability_ok || (cfg.strict_theory && !rep.c_hat2_ok);
      std::cout << (violated ? "assumptions violated\n" : "assumptions hold\n");
      return violated ? kExitValidation : kExitOk;
    }
  } catch (const navobs::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const navobs::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const navobs::DivergenceDetected& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return kExitDivergence;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitFailure;
}
