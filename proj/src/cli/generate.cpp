#include "l2gap/cli/generate.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <random>

#include "l2gap/error.hpp"

namespace l2gap::cli {
namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::BadParams, what); }

template <class T>
T parse_value(std::string_view token, const char* what) {
  T v{};
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size())
    bad(std::string("invalid ") + what + " '" + std::string(token) + "'");
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t next = s.find(sep, pos);
    out.push_back(s.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos));
    if (next == std::string_view::npos) return out;
    pos = next + 1;
  }
}

double param(const GenSpec& spec, std::size_t i, double fallback) {
  return i < spec.params.size() ? spec.params[i] : fallback;
}

void expect_params(const GenSpec& spec, std::size_t max_count) {
  if (spec.params.size() > max_count)
    bad(spec.family + " takes at most " + std::to_string(max_count) + " parameter(s)");
}

// Uniform on [0, 1) from the top 53 bits, identical on every platform.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Matrix cycle(std::size_t n) {
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    p(i, (i + 1) % n) += 0.5;
    p(i, (i + n - 1) % n) += 0.5;
  }
  return p;
}

Matrix birth_death(std::size_t n, double up, double down) {
  if (!(up > 0.0 && up <= 1.0 && down > 0.0 && down <= 1.0 && up + down <= 1.0 + 1e-15))
    bad("birth-death needs up, down in (0, 1] with up + down <= 1");
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double stay = 1.0;
    if (i + 1 < n) {
      p(i, i + 1) = up;
      stay -= up;
    }
    if (i > 0) {
      p(i, i - 1) = down;
      stay -= down;
    }
    p(i, i) = std::max(0.0, stay);
  }
  return p;
}

Matrix random_reversible(std::size_t n, double density, std::uint64_t seed) {
  if (!(density > 0.0 && density <= 1.0)) bad("random-reversible density must lie in (0, 1]");
  std::mt19937_64 rng(seed);
  Matrix w(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double weight = 1.0 - unit(rng);  // (0, 1]
      const bool keep = i == j || density >= 1.0 || unit(rng) < density;
      if (keep) w(i, j) = w(j, i) = weight;
    }
  }
  // A path through all states keeps sparse draws irreducible.
  for (std::size_t i = 0; i + 1 < n; ++i)
    if (w(i, i + 1) == 0.0) w(i, i + 1) = w(i + 1, i) = 1.0 - unit(rng);
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double total = 0.0;
    for (std::size_t j = 0; j < n; ++j) total += w(i, j);
    for (std::size_t j = 0; j < n; ++j) p(i, j) = w(i, j) / total;
  }
  return p;
}

}  // namespace

const std::vector<std::string>& generator_families() {
  static const std::vector<std::string> names{"cycle", "lazy-cycle", "complete", "birth-death",
                                              "random-reversible"};
  return names;
}

GenSpec parse_gen_spec(std::string_view text) {
  const auto parts = split(text, ':');
  if (parts.size() < 2 || parts.size() > 4) bad("generator spec must be family:size[:params[:seed]]");
  GenSpec spec;
  spec.family = std::string(parts[0]);
  spec.size = parse_value<std::size_t>(parts[1], "size");
  if (parts.size() >= 3 && !parts[2].empty())
    for (std::string_view token : split(parts[2], ','))
      spec.params.push_back(parse_value<double>(token, "parameter"));
  if (parts.size() == 4 && !parts[3].empty()) spec.seed = parse_value<std::uint64_t>(parts[3], "seed");
  return spec;
}

std::string to_string(const GenSpec& spec) {
  std::string out = spec.family + ":" + std::to_string(spec.size) + ":";
  for (std::size_t i = 0; i < spec.params.size(); ++i) {
    if (i) out += ',';
    out += format_number(spec.params[i]);
  }
  return out + ":" + std::to_string(spec.seed);
}

ChainFile generate(const GenSpec& spec) {
  const std::size_t n = spec.size;
  if (n < 2) bad("generator size must be >= 2");
  if (n > 4096) bad("generator size must be <= 4096");

  Matrix p;
  if (spec.family == "cycle") {
    expect_params(spec, 0);
    p = cycle(n);
  } else if (spec.family == "lazy-cycle") {
    expect_params(spec, 1);
    const double hold = param(spec, 0, 0.5);
    if (!(hold >= 0.0 && hold < 1.0)) bad("lazy-cycle hold must lie in [0, 1)");
    p = cycle(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) p(i, j) = (1.0 - hold) * p(i, j) + (i == j ? hold : 0.0);
  } else if (spec.family == "complete") {
    expect_params(spec, 0);
    p = Matrix(n, n, 1.0 / static_cast<double>(n));
  } else if (spec.family == "birth-death") {
    expect_params(spec, 2);
    p = birth_death(n, param(spec, 0, 0.5), param(spec, 1, 0.5));
  } else if (spec.family == "random-reversible") {
    expect_params(spec, 1);
    p = random_reversible(n, param(spec, 0, 1.0), spec.seed);
  } else {
    bad("unknown generator family '" + spec.family + "'");
  }

  ChainFile out;
  out.n = n;
  out.P = std::move(p);
  out.name = to_string(spec);
  return out;
}

}  // namespace l2gap::cli
