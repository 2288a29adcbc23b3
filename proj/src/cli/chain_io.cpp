#include "l2gap/cli/chain_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "l2gap/error.hpp"

namespace l2gap::cli {
namespace {

using nlohmann::json;

[[noreturn]] void parse_fail(std::size_t line, std::size_t column, const std::string& what) {
  throw Error(ErrorCode::ParseError,
              "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what);
}

// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> locate(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < offset; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\v' || c == '\f'; }

ChainFile parse_matrix_text(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> row_lines;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    std::vector<double> row;
    std::size_t i = 0;
    while (i < line.size()) {
      if (is_space(line[i])) {
        ++i;
        continue;
      }
      std::size_t j = i;
      while (j < line.size() && !is_space(line[j])) ++j;
      const std::string_view token = line.substr(i, j - i);
      const char* first = token.data();
      if (*first == '+') ++first;
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(first, token.data() + token.size(), v);
      if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v))
        parse_fail(line_no, i + 1, "expected a real number, got '" + std::string(token) + "'");
      row.push_back(v);
      i = j;
    }
    if (!row.empty()) {
      rows.push_back(std::move(row));
      row_lines.push_back(line_no);
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  if (rows.empty()) parse_fail(1, 1, "no matrix rows found");
  const std::size_t n = rows.size();
  for (std::size_t r = 0; r < n; ++r)
    if (rows[r].size() != n)
      throw Error(ErrorCode::DimensionMismatch,
                  "line " + std::to_string(row_lines[r]) + ": row has " +
                      std::to_string(rows[r].size()) + " entries, expected " + std::to_string(n));
  ChainFile out;
  out.n = n;
  out.P = Matrix::from_rows(rows);
  return out;
}

double number_at(const json& v, const std::string& where) {
  if (!v.is_number()) throw Error(ErrorCode::ParseError, where + ": expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw Error(ErrorCode::ParseError, where + ": not finite");
  return d;
}

ChainFile parse_structured(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    // byte is 1-based and points at the offending character.
    const auto [line, column] = locate(text, e.byte == 0 ? 0 : e.byte - 1);
    std::string what = e.what();
    if (const auto p = what.find("syntax error"); p != std::string::npos) what = what.substr(p);
    parse_fail(line, column, what);
  }
  if (!doc.is_object()) parse_fail(1, 1, "expected a JSON object");
  if (!doc.contains("P")) throw Error(ErrorCode::ParseError, "missing field \"P\"");
  const json& p = doc["P"];
  if (!p.is_array() || p.empty()) throw Error(ErrorCode::ParseError, "\"P\" must be a nonempty array of rows");

  ChainFile out;
  out.n = p.size();
  if (doc.contains("n")) {
    const json& n = doc["n"];
    if (!n.is_number_unsigned()) throw Error(ErrorCode::ParseError, "\"n\" must be a positive integer");
    if (n.get<std::size_t>() != out.n)
      throw Error(ErrorCode::DimensionMismatch, "\"n\" is " + std::to_string(n.get<std::size_t>()) +
                                                    " but \"P\" has " + std::to_string(out.n) + " rows");
  }
  out.P = Matrix(out.n, out.n);
  for (std::size_t i = 0; i < out.n; ++i) {
    const json& row = p[i];
    if (!row.is_array()) throw Error(ErrorCode::ParseError, "P[" + std::to_string(i) + "] must be an array");
    if (row.size() != out.n)
      throw Error(ErrorCode::DimensionMismatch, "P[" + std::to_string(i) + "] has " +
                                                    std::to_string(row.size()) + " entries, expected " +
                                                    std::to_string(out.n));
    for (std::size_t j = 0; j < out.n; ++j)
      out.P(i, j) = number_at(row[j], "P[" + std::to_string(i) + "][" + std::to_string(j) + "]");
  }
  if (doc.contains("pi") && !doc["pi"].is_null()) {
    const json& pi = doc["pi"];
    if (!pi.is_array()) throw Error(ErrorCode::ParseError, "\"pi\" must be an array");
    if (pi.size() != out.n)
      throw Error(ErrorCode::DimensionMismatch, "\"pi\" has " + std::to_string(pi.size()) +
                                                    " entries, expected " + std::to_string(out.n));
    std::vector<double> values;
    for (std::size_t i = 0; i < out.n; ++i) values.push_back(number_at(pi[i], "pi[" + std::to_string(i) + "]"));
    out.pi = std::move(values);
  }
  if (doc.contains("name") && !doc["name"].is_null()) {
    if (!doc["name"].is_string()) throw Error(ErrorCode::ParseError, "\"name\" must be a string");
    out.name = doc["name"].get<std::string>();
  }
  return out;
}

}  // namespace

std::optional<InputFormat> parse_input_format(std::string_view name) noexcept {
  if (name == "auto") return InputFormat::automatic;
  if (name == "matrix-text" || name == "text") return InputFormat::matrix_text;
  if (name == "structured" || name == "json") return InputFormat::structured;
  return std::nullopt;
}

ChainFile parse_chain_text(std::string_view text, InputFormat format) {
  if (format == InputFormat::automatic) {
    const auto first = std::find_if_not(text.begin(), text.end(),
                                        [](char c) { return is_space(c) || c == '\n'; });
    format = first != text.end() && *first == '{' ? InputFormat::structured : InputFormat::matrix_text;
  }
  return format == InputFormat::structured ? parse_structured(text) : parse_matrix_text(text);
}

ChainFile parse_chain_file(const std::filesystem::path& path, InputFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_chain_text(buf.str(), format);
}

MarkovChain build_chain(const ChainFile& file, const Tolerances& tol) {
  MarkovChain chain = MarkovChain::build(file.P, tol);
  if (file.pi) {
    const auto solved = chain.pi();
    double worst = 0.0;
    for (std::size_t i = 0; i < file.n; ++i) worst = std::max(worst, std::abs((*file.pi)[i] - solved[i]));
    if (!(worst <= tol.stat_tol))
      throw Error(ErrorCode::ValidationError,
                  "supplied pi differs from the stationary distribution by " + format_number(worst));
  }
  return chain;
}

std::string format_number(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

std::string write_chain(const ChainFile& file, InputFormat format) {
  if (format == InputFormat::automatic)
    throw Error(ErrorCode::BadParams, "write_chain needs an explicit format");
  if (format == InputFormat::matrix_text) {
    std::string out;
    for (std::size_t i = 0; i < file.n; ++i) {
      for (std::size_t j = 0; j < file.n; ++j) {
        if (j) out += ' ';
        out += format_number(file.P(i, j));
      }
      out += '\n';
    }
    return out;
  }
  json doc = json::object();
  if (file.name) doc["name"] = *file.name;
  doc["n"] = file.n;
  doc["P"] = file.P.to_rows();
  if (file.pi) doc["pi"] = *file.pi;
  return doc.dump(2) + "\n";
}

}  // namespace l2gap::cli
