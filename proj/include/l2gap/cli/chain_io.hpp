#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "l2gap/chain.hpp"
#include "l2gap/matrix.hpp"

namespace l2gap::cli {

/// A chain as read from disk, before validation.
struct ChainFile {
  std::size_t n = 0;
  Matrix P;
  std::optional<std::vector<double>> pi;
  std::optional<std::string> name;
};

enum class InputFormat { automatic, matrix_text, structured };

std::optional<InputFormat> parse_input_format(std::string_view name) noexcept;

/// matrix-text: one row per non-blank line, entries separated by whitespace,
/// '#' starts a comment. structured: {"n":..., "P":[[...]], "pi":[...]?, "name":...?}.
/// automatic picks structured when the first non-space byte is '{'.
/// Throws ParseError (message carries "line L, column C") or DimensionMismatch.
ChainFile parse_chain_text(std::string_view text, InputFormat format = InputFormat::automatic);

/// Reads the whole file; ParseError when it cannot be opened.
ChainFile parse_chain_file(const std::filesystem::path& path,
                           InputFormat format = InputFormat::automatic);

/// Builds and validates the chain. A supplied pi must agree with the solved
/// stationary distribution within tol.stat_tol, else ValidationError.
MarkovChain build_chain(const ChainFile& file, const Tolerances& tol = {});

/// Serializes with shortest round-trip decimals. `format` must not be
/// automatic; matrix-text drops pi and name.
std::string write_chain(const ChainFile& file, InputFormat format);

/// Shortest decimal that parses back to exactly `v`.
std::string format_number(double v);

}  // namespace l2gap::cli
