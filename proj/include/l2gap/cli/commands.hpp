#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "l2gap/bounds.hpp"
#include "l2gap/chain.hpp"
#include "l2gap/cli/chain_io.hpp"
#include "l2gap/cli/generate.hpp"
#include "l2gap/cli/record.hpp"

namespace l2gap::cli {

enum class OutputFormat { json, text };

/// Settings shared by analyze, spectrum and verify.
struct RunOptions {
  std::string file;      // chain file path; empty when `gen` is set
  std::string gen;       // generator spec "family:size:params:seed"
  InputFormat input = InputFormat::automatic;
  std::vector<SubsetFamily> families{SubsetFamily::strict_half, SubsetFamily::closed_half};
  std::vector<std::uint64_t> steps{1, 2};
  double kappa = 1.0;
  bool heuristic = false;
  std::uint64_t seed = 0;
  int restarts = 8;
  unsigned threads = 1;
  std::size_t exact_limit = 22;
  Tolerances tol;
  double gap_tol = kGapTol;
  OutputFormat format = OutputFormat::json;
  bool timing = true;
  bool vectors = false;  // spectrum: include eigenfunctions
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitCheckFailed = 2;

MarkovChain load_chain(const RunOptions& options, std::string* name = nullptr);

/// Computes the record without printing. Errors propagate as exceptions.
AnalysisRecord analyze(const RunOptions& options);

/// Each returns an exit code; library errors print to `err` and return 1.
int run_analyze(const RunOptions& options, std::ostream& out, std::ostream& err);
int run_spectrum(const RunOptions& options, std::ostream& out, std::ostream& err);
int run_verify(const RunOptions& options, std::ostream& out, std::ostream& err);
int run_gen(const GenSpec& spec, OutputFormat format, const std::string& output_path,
            std::ostream& out, std::ostream& err);

}  // namespace l2gap::cli
