// occ: fit, simulate and study the homogeneous site-occupancy model.
//
// Exit status: 0 success, 2 input error, 3 numerical failure.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "occ/estimate.hpp"
#include "occ/report.hpp"
#include "occ/sim.hpp"

namespace {

constexpr int kInputError = 2;
constexpr int kNumericError = 3;

struct OptimFlags {
  std::optional<double> tol_x;
  std::optional<double> tol_f;
  std::optional<int> max_iter;
  std::optional<double> fd_step;
  std::string config;

  void attach(CLI::App* cmd) {
    cmd->add_option("--tol-x", tol_x, "Optimizer step tolerance");
    cmd->add_option("--tol-f", tol_f, "Optimizer function tolerance");
    cmd->add_option("--max-iter", max_iter, "Optimizer iteration cap");
    cmd->add_option("--fd-step", fd_step, "Relative finite-difference step for Hessians");
    cmd->add_option("--optim-config", config, "JSON file of optimizer settings (overrides flags)")
        ->check(CLI::ExistingFile);
  }

  // defaults < OCC_OPTIM environment variable < flags < --optim-config file
  occ::OptimSettings resolve() const {
    occ::OptimSettings s;
    if (const char* env = std::getenv("OCC_OPTIM")) s = occ::apply_optim_overrides(env, s);
    if (tol_x) s.tol_x = *tol_x;
    if (tol_f) s.tol_f = *tol_f;
    if (max_iter) s.max_iter = *max_iter;
    if (fd_step) s.fd_step = *fd_step;
    if (!config.empty()) s = occ::apply_optim_json(occ::read_file(config), s);
    s.validate();
    return s;
  }
};

void emit(const std::string& out_path, const std::string& contents) {
  if (out_path.empty()) {
    std::cout << contents;
  } else {
    occ::write_file_atomic(out_path, contents);
  }
}

occ::SuffStats load_stats(const std::filesystem::path& input) {
  if (input.extension() == ".json") return occ::parse_suffstats_json(input);
  return occ::compute_suff_stats(occ::parse_history_csv(input));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Occupancy model estimation: full, two-stage and partial likelihood"};
  app.require_subcommand(1);

  std::string input;
  std::string out;
  std::string method = "all";
  std::string format = "json";
  bool clamp = false;
  OptimFlags fit_optim;
  auto* fit_cmd = app.add_subcommand("fit", "Estimate (psi, p) from a detection CSV or stats JSON");
  fit_cmd->add_option("--input", input, "Detection history (.csv) or sufficient statistics (.json)")
      ->required()
      ->check(CLI::ExistingFile);
  fit_cmd->add_option("--method", method, "full | two_stage | partial | all")
      ->check(CLI::IsMember({"full", "two_stage", "partial", "all"}));
  fit_cmd->add_option("--format", format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  fit_cmd->add_option("--out", out, "Output path (stdout when omitted)");
  fit_cmd->add_flag("--clamp-psi", clamp, "Truncate psi estimates at 1");
  fit_optim.attach(fit_cmd);

  int sites = 0;
  int occasions = 0;
  double psi = 0.0;
  double p = 0.0;
  std::uint64_t seed = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate one detection history as a CSV matrix");
  sim_cmd->add_option("--sites", sites, "Number of sites S")->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--occasions", occasions, "Occasions per site")->required()->check(CLI::PositiveNumber);
  sim_cmd->add_option("--psi", psi, "Occupancy probability")->required()->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--p", p, "Detection probability")->required()->check(CLI::Range(0.0, 1.0));
  sim_cmd->add_option("--seed", seed, "RNG seed")->required();
  sim_cmd->add_option("--out", out, "Output path (stdout when omitted)");

  std::string config;
  bool drop_boundary = false;
  unsigned threads = 0;
  std::string study_format = "csv";
  OptimFlags study_optim;
  auto* study_cmd = app.add_subcommand("study", "Monte-Carlo comparison of partial vs full estimators");
  study_cmd->add_option("--config", config, "JSON list of study cells")->required()->check(CLI::ExistingFile);
  study_cmd->add_option("--seed", seed, "Base seed for cells without their own")->required();
  study_cmd->add_flag("--drop-boundary", drop_boundary, "Exclude replicates with psi-hat >= 1");
  study_cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
  study_cmd->add_option("--format", study_format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
  study_cmd->add_option("--out", out, "Output path (stdout when omitted)");
  study_optim.attach(study_cmd);

  int grid = 99;
  std::optional<double> marker_p;
  auto* sens_cmd = app.add_subcommand("sensitivity", "Tabulate psi for known p over a grid of p");
  sens_cmd->add_option("--input", input, "Sufficient statistics (.json)")->required()->check(CLI::ExistingFile);
  sens_cmd->add_option("--grid", grid, "Number of interior grid points")->check(CLI::PositiveNumber);
  sens_cmd->add_option("--marker-p", marker_p, "Mark this p (default: partial estimate when b is known)")
      ->check(CLI::Range(0.0, 1.0));
  sens_cmd->add_option("--out", out, "Output path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }

  try {
    if (*fit_cmd) {
      const occ::SuffStats stats = load_stats(input);
      const occ::OptimSettings settings = fit_optim.resolve();
      std::vector<occ::Method> methods;
      if (method == "all") {
        methods = {occ::Method::Full, occ::Method::TwoStage};
        if (stats.has_b()) {
          methods.push_back(occ::Method::Partial);
        } else {
          std::cerr << "note: b not supplied; partial estimator skipped\n";
        }
      } else {
        methods = {occ::parse_method(method)};
        if (methods.front() == occ::Method::Partial && !stats.has_b()) {
          std::cerr << "error: partial estimator needs b (occasions after first detection)\n";
          return kInputError;
        }
      }
      std::vector<occ::FitResult> results;
      for (auto m : methods) {
        auto r = occ::fit(m, stats, settings);
        results.push_back(clamp ? occ::clamp_psi(r) : r);
      }
      emit(out, occ::emit_fit(results, occ::parse_format(format)));
    } else if (*sim_cmd) {
      occ::RngStream rng(seed);
      emit(out, occ::emit_history_csv(occ::simulate_history(sites, occasions, psi, p, rng)));
    } else if (*study_cmd) {
      const auto cells = occ::parse_study_config_text(occ::read_file(config), seed);
      occ::StudyOptions options;
      options.drop_boundary = drop_boundary;
      options.threads = threads;
      options.optim = study_optim.resolve();
      std::vector<occ::StudySummary> summaries;
      for (const auto& cell : cells) summaries.push_back(occ::run_study(cell, options));
      emit(out, occ::emit_study(summaries, occ::parse_format(study_format)));
    } else if (*sens_cmd) {
      const occ::SuffStats stats = occ::parse_suffstats_json(input);
      const auto profile = occ::sensitivity_profile(stats, grid);
      std::optional<occ::SensitivityPoint> marker;
      if (marker_p) {
        marker = occ::sensitivity_at(*marker_p, stats);
      } else if (stats.has_b()) {
        try {
          marker = occ::sensitivity_at(occ::fit_partial(stats).p_hat, stats);
        } catch (const occ::Error& e) {
          std::cerr << "note: no p marker (" << e.what() << ")\n";
        }
      }
      emit(out, occ::emit_sensitivity(profile, marker));
    }
  } catch (const occ::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return occ::is_input_error(e.kind()) ? kInputError : kNumericError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return 0;
}
