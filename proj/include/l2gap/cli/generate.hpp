#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "l2gap/cli/chain_io.hpp"

namespace l2gap::cli {

/// Parameters per family, in positional order:
///   cycle              -
///   lazy-cycle         hold (default 0.5)
///   complete           -
///   birth-death        up, down (default 0.5, 0.5)
///   random-reversible  density (default 1)
struct GenSpec {
  std::string family;
  std::size_t size = 0;
  std::vector<double> params;
  std::uint64_t seed = 0;
};

/// "family:size[:p1,p2,...[:seed]]", e.g. "lazy-cycle:4:0.5" or
/// "random-reversible:6::42". Throws BadParams.
GenSpec parse_gen_spec(std::string_view text);

/// Canonical spelling accepted by parse_gen_spec.
std::string to_string(const GenSpec& spec);

const std::vector<std::string>& generator_families();

/// Deterministic in the spec. The result carries the canonical spec string as
/// its name and no pi. Throws BadParams.
ChainFile generate(const GenSpec& spec);

}  // namespace l2gap::cli
