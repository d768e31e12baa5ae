#include <string>

#include "CLI11.hpp"
#include "cli_commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ring-trap circulation magnetism toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  ringmag::cli::RunOptions opt;
  app.add_option("--config", opt.config_path, "experiment configuration file")
      ->required();
  app.add_option("--out", opt.out_dir, "output directory")
      ->capture_default_str();
  app.add_option("--jobs", opt.jobs, "concurrent jobs")
      ->check(CLI::Range(1, 256))
      ->capture_default_str();
  app.add_option("--seed", opt.seed, "override solver seeds (0 = defaults)");
  app.add_option("--cross-term", opt.cross_term,
                 "cross-coupling policy: printed or oracle")
      ->check(CLI::IsMember({"printed", "oracle"}))
      ->capture_default_str();

  app.add_subcommand("couplings", "solve the coupling sweep over d");
  app.add_subcommand("oracle-check",
                     "compare analytic couplings with the numeric reduction");
  app.add_subcommand("phase-scan", "finite-size gap and correlation scans");
  app.add_subcommand("spectrum", "diagonalize one configured model");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  const std::string name = app.get_subcommands().front()->get_name();
  if (name == "couplings") return ringmag::cli::cmd_couplings(opt);
  if (name == "oracle-check") return ringmag::cli::cmd_oracle_check(opt);
  if (name == "phase-scan") return ringmag::cli::cmd_phase_scan(opt);
  return ringmag::cli::cmd_spectrum(opt);
}
