#pragma once

#include <string>
#include <vector>

#include "l2gap/chain.hpp"
#include "l2gap/matrix.hpp"

namespace fixtures {

l2gap::Matrix cycle(std::size_t n);
l2gap::Matrix cycle4();
/// hold 1/2 on the 4-cycle: rows (1/2, 1/4, 0, 1/4).
l2gap::Matrix lazy_cycle4();
l2gap::Matrix swap2();
/// p(0,1) = 1, p(1,0) = p(1,2) = 1/2, p(2,1) = 1.
l2gap::Matrix birth_death3();
l2gap::Matrix complete(std::size_t n);

struct CorpusChain {
  std::string label;
  l2gap::Matrix p;
};

/// Seeded random reversible chains, sizes cycling through 3..10 and three
/// edge densities. Deterministic.
std::vector<CorpusChain> corpus(std::size_t count = 240);

std::vector<std::vector<double>> rows(const l2gap::Matrix& m);

}  // namespace fixtures
