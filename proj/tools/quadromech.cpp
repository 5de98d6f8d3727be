#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "quadromech/errors.hpp"
#include "quadromech/io.hpp"
#include "quadromech/oracles.hpp"
#include "quadromech/version.hpp"
#include "quadromech/weakdrive.hpp"

namespace qm = quadromech;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;

int report(const qm::Error& e) {
  std::cerr << "error[" << qm::to_string(e.code()) << "]: " << e.what() << '\n';
  return qm::is_validation_error(e.code()) ? kExitValidation : kExitNumerical;
}

struct RunArgs {
  std::string scenario;
  std::string config;
  std::string out;
  std::vector<std::string> formats;
  int threads = 0;
  std::optional<double> convergence_tol;
  std::optional<int> photon_max;
  std::optional<int> phonon_max;
};

std::optional<int> threads_from_env() {
  const char* raw = std::getenv("QUADROMECH_THREADS");
  if (raw == nullptr || *raw == '\0') return std::nullopt;
  char* end = nullptr;
  const long n = std::strtol(raw, &end, 10);
  if (*end != '\0' || n < 1 || n > 4096) {
    throw qm::Error(qm::ErrorCode::ConfigInvalid,
                    std::string("QUADROMECH_THREADS must be a positive integer, got '") + raw + "'");
  }
  return static_cast<int>(n);
}

int run(const RunArgs& args) {
  if (args.scenario.empty() == args.config.empty()) {
    throw qm::Error(qm::ErrorCode::ConfigInvalid, "give exactly one of --scenario or --config");
  }
  qm::RunConfig config = args.config.empty()
                             ? qm::parse_run_config(nlohmann::json{{"scenario", args.scenario}})
                             : qm::load_run_config(args.config);
  if (!args.out.empty()) config.output_directory = args.out;
  if (!args.formats.empty()) config.formats = args.formats;
  if (args.threads > 0) config.parallelism = args.threads;
  if (args.convergence_tol) config.spec.convergence_tol = *args.convergence_tol;
  if (args.photon_max || args.phonon_max) {
    config.spec.space = qm::TruncatedSpace(args.photon_max.value_or(config.spec.space.n_photon_max()),
                                           args.phonon_max.value_or(config.spec.space.n_phonon_max()));
  }
  if (const auto env = threads_from_env()) config.parallelism = *env;
  for (const std::string& f : config.formats) {
    if (f != "csv" && f != "json") {
      throw qm::Error(qm::ErrorCode::ConfigInvalid, "unknown output format '" + f + "'");
    }
  }
  config.spec.validate();

  const qm::SweepResult result = qm::run_sweep(config.spec, config.parallelism);
  for (const auto& path : qm::write_outputs(result, config)) {
    std::cout << "wrote " << path.string() << '\n';
  }
  if (const std::size_t failed = result.failed_count(); failed > 0) {
    std::cerr << "error[" << qm::to_string(qm::ErrorCode::Internal) << "]: " << failed << " of "
              << result.rows.size() << " points failed; see the error column\n";
    return kExitNumerical;
  }
  return kExitOk;
}

void print_spectrum(double J, int manifold) {
  const qm::SpectrumReport s = qm::manifold_spectrum(J, manifold);
  std::printf("manifold N=%d  J=%.6g\n", s.manifold, s.coupling);
  std::printf("  basis:");
  for (const auto& [n, m] : s.basis) std::printf("  |%d,%d>", n, m);
  std::printf("\n");
  for (std::size_t k = 0; k < s.eigenvalues.size(); ++k) {
    std::printf("  E=% .10f  v=(", s.eigenvalues[k]);
    for (std::size_t i = 0; i < s.eigenvectors[k].size(); ++i) {
      const auto& c = s.eigenvectors[k][i];
      std::printf("%s% .10f%+.10fi", i ? ", " : "", c.real(), c.imag());
    }
    std::printf(")\n");
  }
}

int validate() {
  int failures = 0;
  for (const qm::OracleResult& r : qm::run_oracle_suite()) {
    std::printf("[%s] %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    if (!r.passed) ++failures;
  }
  return failures == 0 ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Photon and phonon statistics of a quadratically coupled optomechanical system"};
  app.set_version_flag("--version", std::string(qm::kVersionString));
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run_cmd = app.add_subcommand("run", "Run a built-in scenario or a JSON sweep config");
  run_cmd->add_option("--scenario", run_args.scenario, "Built-in scenario name");
  run_cmd->add_option("--config", run_args.config, "Path to a JSON config");
  run_cmd->add_option("--out", run_args.out, "Output directory");
  run_cmd->add_option("--format", run_args.formats, "csv and/or json")->delimiter(',');
  run_cmd->add_option("--threads", run_args.threads, "Worker threads")->check(CLI::PositiveNumber);
  run_cmd->add_option("--convergence-tol", run_args.convergence_tol,
                      "Grow the truncation per point until observables change by less than this");
  run_cmd->add_option("--photon-max", run_args.photon_max, "Photon cutoff");
  run_cmd->add_option("--phonon-max", run_args.phonon_max, "Phonon cutoff");

  double gamma_c = 1.0;
  double gamma_m = 0.1;
  CLI::App* jopt_cmd = app.add_subcommand("jopt", "Print the optimal blockade coupling");
  jopt_cmd->add_option("--gamma-c", gamma_c, "Cavity decay rate");
  jopt_cmd->add_option("--gamma-m", gamma_m, "Mechanical decay rate");

  double coupling = 1.0;
  std::optional<int> manifold;
  CLI::App* spectrum_cmd = app.add_subcommand("spectrum", "Print the excitation-manifold spectra");
  spectrum_cmd->add_option("--J", coupling, "Coupling J");
  spectrum_cmd->add_option("--manifold", manifold, "Single manifold N = 2 n_a + n_b (0..4)");

  CLI::App* validate_cmd = app.add_subcommand("validate", "Run the built-in oracle checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*run_cmd) return run(run_args);
    if (*jopt_cmd) {
      std::printf("%.5f\n", qm::j_opt(gamma_c, gamma_m));
      return kExitOk;
    }
    if (*spectrum_cmd) {
      if (manifold) {
        print_spectrum(coupling, *manifold);
      } else {
        for (int n = 0; n <= 4; ++n) print_spectrum(coupling, n);
      }
      return kExitOk;
    }
    if (*validate_cmd) return validate();
  } catch (const qm::Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::cerr << "error[" << qm::to_string(qm::ErrorCode::Internal) << "]: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
