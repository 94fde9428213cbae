#include <cstdio>
#include <cstdlib>
#include <string>

#include "CLI11.hpp"
#include "plap/cli.hpp"
#include "plap/config.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "plap2d: orthotropic p-Laplacian Dirichlet solver and verification "
      "harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  int threads = 1;
  bool deterministic = false;
  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "configuration file path")
        ->required();
    sub->add_option("--out", out_dir,
                    "output directory (overrides [output] dir and the "
                    "PLAP2D_OUT environment variable)");
    sub->add_option("--threads", threads, "sweep worker pool size");
    sub->add_flag("--deterministic", deterministic,
                  "scalar kernels, single worker: byte-identical outputs "
                  "across runs");
  };
  CLI::App* solve =
      app.add_subcommand("solve", "solve the configured Dirichlet problems");
  CLI::App* verify =
      app.add_subcommand("verify", "run the enabled diagnostic checks");
  CLI::App* sweep = app.add_subcommand(
      "sweep", "grid x eps sweep: long-format table and SVG plots");
  add_common(solve);
  add_common(verify);
  add_common(sweep);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : plap::exit_config_error;
  }

  try {
    plap::ExperimentConfig cfg = plap::load_config(config_path);
    if (!out_dir.empty()) {
      cfg.output.dir = out_dir;
    } else if (const char* env = std::getenv("PLAP2D_OUT");
               env != nullptr && *env != '\0') {
      cfg.output.dir = env;
    }
    cfg.threads = threads;
    if (deterministic) cfg.deterministic = true;
    plap::validate_config(cfg);

    if (solve->parsed()) return plap::cmd_solve(cfg);
    if (verify->parsed()) return plap::cmd_verify(cfg);
    return plap::cmd_sweep(cfg);
  } catch (const plap::ConfigError& e) {
    std::fprintf(stderr, "plap2d: %s\n", e.what());
    return plap::exit_config_error;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "plap2d: %s\n", e.what());
    return plap::exit_config_error;
  }
}
