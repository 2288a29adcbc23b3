#include "fixtures.hpp"

#include "l2gap/cli/generate.hpp"

namespace fixtures {

using l2gap::Matrix;

Matrix cycle(std::size_t n) {
  Matrix p(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    p(i, (i + 1) % n) += 0.5;
    p(i, (i + n - 1) % n) += 0.5;
  }
  return p;
}

Matrix cycle4() { return {{0, .5, 0, .5}, {.5, 0, .5, 0}, {0, .5, 0, .5}, {.5, 0, .5, 0}}; }

Matrix lazy_cycle4() {
  return {{.5, .25, 0, .25}, {.25, .5, .25, 0}, {0, .25, .5, .25}, {.25, 0, .25, .5}};
}

Matrix swap2() { return {{0, 1}, {1, 0}}; }

Matrix birth_death3() { return {{0, 1, 0}, {.5, 0, .5}, {0, 1, 0}}; }

Matrix complete(std::size_t n) { return Matrix(n, n, 1.0 / static_cast<double>(n)); }

std::vector<CorpusChain> corpus(std::size_t count) {
  static const double densities[] = {1.0, 0.6, 0.35};
  std::vector<CorpusChain> out;
  for (std::size_t i = 0; i < count; ++i) {
    l2gap::cli::GenSpec spec;
    spec.family = "random-reversible";
    spec.size = 3 + i % 8;
    spec.params = {densities[(i / 8) % 3]};
    spec.seed = 1000 + i;
    auto file = l2gap::cli::generate(spec);
    out.push_back({*file.name, std::move(file.P)});
  }
  return out;
}

std::vector<std::vector<double>> rows(const Matrix& m) { return m.to_rows(); }

}  // namespace fixtures
