// l2gap: isoperimetric constants, spectra and gap-bound checks for finite
// reversible Markov chains.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "l2gap/cli/commands.hpp"
#include "l2gap/error.hpp"

namespace {

using namespace l2gap;
using namespace l2gap::cli;

struct Flags {
  RunOptions run;
  std::string family;
  std::string steps;
  std::string format = "json";
  std::string input = "auto";
  bool no_timing = false;
};

std::vector<std::uint64_t> parse_steps(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::stringstream ss(text);
  std::string token;
  while (std::getline(ss, token, ',')) {
    std::size_t used = 0;
    unsigned long long v = 0;
    try {
      v = std::stoull(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size() || token.empty() || token[0] == '-' || v == 0)
      throw CLI::ValidationError("--steps", "expected a comma-separated list of positive integers");
    out.push_back(v);
  }
  if (out.empty()) throw CLI::ValidationError("--steps", "empty list");
  return out;
}

// Applies the string-valued flags to the run options.
void finalize(Flags& f) {
  if (!f.family.empty()) {
    const auto fam = parse_family(f.family);
    if (!fam || *fam == SubsetFamily::all_proper)
      throw CLI::ValidationError("--family", "expected strict or closed");
    f.run.families = {*fam};
  }
  if (!f.steps.empty()) f.run.steps = parse_steps(f.steps);
  f.run.format = f.format == "text" ? OutputFormat::text : OutputFormat::json;
  const auto in = parse_input_format(f.input);
  if (!in) throw CLI::ValidationError("--input-format", "expected auto, matrix-text or structured");
  f.run.input = *in;
  f.run.timing = !f.no_timing;
}

void add_chain_options(CLI::App* cmd, Flags& f, bool cuts) {
  cmd->add_option("file", f.run.file, "Chain file (matrix-text or structured JSON)");
  cmd->add_option("--gen", f.run.gen, "Generator spec family:size[:params[:seed]]");
  cmd->add_option("--input-format", f.input, "auto|matrix-text|structured")->capture_default_str();
  cmd->add_option("--format", f.format, "Output format")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();
  cmd->add_flag("--no-timing", f.no_timing, "Omit timing fields (byte-identical output)");
  cmd->add_option("--tol-row", f.run.tol.row_tol, "Row-sum tolerance")->capture_default_str();
  cmd->add_option("--tol-stat", f.run.tol.stat_tol, "Stationarity tolerance")->capture_default_str();
  cmd->add_option("--tol-rev", f.run.tol.rev_tol, "Detailed-balance tolerance")->capture_default_str();
  cmd->add_option("--tol-gap", f.run.gap_tol, "Threshold for positivity predicates")->capture_default_str();
  if (!cuts) return;
  cmd->add_option("--family", f.family, "Report k_n for one family only: strict|closed");
  cmd->add_option("--steps", f.steps, "Comma-separated n-step list (default 1,2)");
  cmd->add_option("--kappa", f.run.kappa, "Lawler-Sokal constant (>= 1)")->capture_default_str();
  cmd->add_flag("--heuristic", f.run.heuristic, "Allow sweep/local-search bounds above the exact limit");
  cmd->add_option("--seed", f.run.seed, "Local-search seed")->capture_default_str();
  cmd->add_option("--restarts", f.run.restarts, "Local-search restarts")->capture_default_str();
  cmd->add_option("--threads", f.run.threads, "Enumeration workers, 0 = all cores")->capture_default_str();
  cmd->add_option("--exact-limit", f.run.exact_limit, "Largest state count for exact enumeration")
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Isoperimetric constants and L2 spectral-gap bounds for reversible Markov chains"};
  app.require_subcommand(1);

  Flags analyze_flags, spectrum_flags, verify_flags;
  auto* analyze = app.add_subcommand("analyze", "k (both families), k_n, K, spectrum, bounds and verdict");
  add_chain_options(analyze, analyze_flags, true);
  auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues of P and the gaps at +1 and -1");
  add_chain_options(spectrum, spectrum_flags, false);
  spectrum->add_flag("--vectors", spectrum_flags.run.vectors, "Include L2(pi)-normalized eigenfunctions");
  auto* verify = app.add_subcommand("verify", "Run the invariant suite only");
  add_chain_options(verify, verify_flags, true);

  GenSpec gen_spec;
  std::string gen_out;
  std::string gen_format = "json";
  double hold = -1, up = -1, down = -1, density = -1;
  auto* gen = app.add_subcommand("gen", "Write a generated chain");
  gen->add_option("family", gen_spec.family, "Generator family")
      ->required()
      ->check(CLI::IsMember(generator_families()));
  gen->add_option("size", gen_spec.size, "Number of states")->required();
  gen->add_option("--seed", gen_spec.seed, "Seed for random-reversible")->capture_default_str();
  gen->add_option("--hold", hold, "lazy-cycle holding probability (default 0.5)");
  gen->add_option("--up", up, "birth-death up probability (default 0.5)");
  gen->add_option("--down", down, "birth-death down probability (default 0.5)");
  gen->add_option("--density", density, "random-reversible edge density (default 1)");
  gen->add_option("-o,--output", gen_out, "Output path (default stdout)");
  gen->add_option("--format", gen_format, "json or text (matrix-text)")
      ->check(CLI::IsMember({"json", "text"}))
      ->capture_default_str();

  try {
    app.parse(argc, argv);
    for (Flags* f : {&analyze_flags, &spectrum_flags, &verify_flags}) finalize(*f);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInputError;
  }

  if (*analyze) return run_analyze(analyze_flags.run, std::cout, std::cerr);
  if (*spectrum) return run_spectrum(spectrum_flags.run, std::cout, std::cerr);
  if (*verify) return run_verify(verify_flags.run, std::cout, std::cerr);

  const bool stray = (hold >= 0 && gen_spec.family != "lazy-cycle") ||
                     ((up >= 0 || down >= 0) && gen_spec.family != "birth-death") ||
                     (density >= 0 && gen_spec.family != "random-reversible");
  if (stray) {
    std::cerr << "error: BadParams: parameter flag does not apply to family '" << gen_spec.family << "'\n";
    return kExitInputError;
  }
  if (gen_spec.family == "lazy-cycle" && hold >= 0) gen_spec.params = {hold};
  if (gen_spec.family == "birth-death" && (up >= 0 || down >= 0))
    gen_spec.params = {up >= 0 ? up : 0.5, down >= 0 ? down : 0.5};
  if (gen_spec.family == "random-reversible" && density >= 0) gen_spec.params = {density};
  return run_gen(gen_spec, gen_format == "text" ? OutputFormat::text : OutputFormat::json, gen_out,
                 std::cout, std::cerr);
}
