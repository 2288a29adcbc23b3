#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "l2gap/bounds.hpp"
#include "l2gap/isoperimetry.hpp"

namespace l2gap::cli {

inline constexpr std::string_view kSchemaVersion = "1";

/// k_n for one requested step count.
struct StepCuts {
  std::uint64_t n_steps = 1;
  std::optional<CutReport> k_strict;
  std::optional<CutReport> k_closed;
};

struct Timing {
  double load_ms = 0.0;
  double cuts_ms = 0.0;
  double spectrum_ms = 0.0;
  double bounds_ms = 0.0;
  double total_ms = 0.0;
};

struct AnalysisRecord {
  std::string name;
  std::vector<double> pi;
  bool reversible = true;
  std::string strategy;  // "exact" or "heuristic"
  std::string simd;
  double kappa = 1.0;
  std::vector<StepCuts> steps;
  BoundReport report;
  std::optional<Timing> timing;
};

/// Single JSON document with a "schema" field; numbers use the shortest
/// round-trip form, so parse_record(dump_record(r)) reproduces every double.
std::string dump_record(const AnalysisRecord& record, int indent = 2);

/// Throws ParseError on malformed input or a schema other than kSchemaVersion.
AnalysisRecord parse_record(std::string_view json);

}  // namespace l2gap::cli
