#include <cstdio>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include <stratwave/cli.hpp>

using namespace stratwave;

namespace {

std::pair<int, int> parse_grid(const std::string &s) {
  const auto comma = s.find(',');
  if (comma == std::string::npos) throw InvalidInput("--grid expects Nx,Ny");
  try {
    std::size_t a = 0, b = 0;
    const int nx = std::stoi(s.substr(0, comma), &a);
    const int ny = std::stoi(s.substr(comma + 1), &b);
    if (a != comma || b != s.size() - comma - 1) throw InvalidInput("");
    return {nx, ny};
  } catch (const std::exception &) {
    throw InvalidInput("--grid expects Nx,Ny, got '" + s + "'");
  }
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Spectral checks for steady stratified water waves"};
  app.require_subcommand(1);

  std::string config_path, out_dir, grid, field;
  std::optional<int> tau_samples, period_multiple, bloch_M;
  std::optional<double> amplitude, tol_zero, period_fraction;
  std::optional<unsigned> seed;

  app.add_option("--config", config_path, "JSON configuration file");
  app.add_option("--out", out_dir, "output directory (default from config, else ./out)");
  app.add_option("--grid", grid, "node intervals per period and in depth, Nx,Ny");
  app.add_option("--tau-samples", tau_samples, "number of interior Bloch parameters");
  app.add_option("--period-multiple", period_multiple, "period multiple m for multi-period checks");
  app.add_option("--amplitude", amplitude, "wave amplitude t");
  app.add_option("--tol-zero", tol_zero, "absolute eigenvalue zero threshold");
  app.add_option("--field", field, "stokes or laminar");
  app.add_option("--period-fraction", period_fraction, "Stokes period as a multiple of the bifurcation period");
  app.add_option("--bloch-M", bloch_M, "Bloch window half-width M");
  app.add_option("--seed", seed, "random seed for bloch-check");

  for (const auto &name : command_names()) app.add_subcommand(name)->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_usage;
  }
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    RunConfig cfg;
    if (!config_path.empty()) cfg = load_config(config_path);
    if (!out_dir.empty()) cfg.out = out_dir;
    if (!grid.empty()) std::tie(cfg.nx, cfg.ny) = parse_grid(grid);
    if (tau_samples) cfg.tau_samples = *tau_samples;
    if (period_multiple) cfg.period_multiple = *period_multiple;
    if (amplitude) cfg.amplitude = *amplitude;
    if (tol_zero) cfg.tol_zero = *tol_zero;
    if (!field.empty()) cfg.field = field;
    if (period_fraction) cfg.period_fraction = *period_fraction;
    if (bloch_M) cfg.bloch_M = *bloch_M;
    if (seed) cfg.seed = *seed;
    cfg.validate();

    const auto outcome = run(command, cfg);
    write_outcome(command, outcome, cfg.out);
    std::cout << outcome.summary << "status " << outcome.status << ", report " << cfg.out << "/" << command << ".json\n";
    return outcome.status;
  } catch (const InvalidInput &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const SolveFailure &e) {
    std::cerr << "solve failed: " << e.what() << '\n';
    return exit_inconclusive;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  }
}
