#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "fixtures.hpp"
#include "l2gap/bounds.hpp"
#include "l2gap/cli/generate.hpp"
#include "l2gap/error.hpp"
#include "l2gap/simd/kernels.hpp"

using namespace l2gap;
using simd::Isa;

namespace {

std::vector<const simd::Kernels*> wide_variants() {
  std::vector<const simd::Kernels*> out;
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (simd::available(isa)) out.push_back(&simd::kernels_for(isa));
  return out;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double scale(const std::vector<double>& v) {
  double s = 1.0;
  for (double x : v) s += std::abs(x);
  return s;
}

}  // namespace

TEST_CASE("variant names and availability") {
  CHECK(simd::available(Isa::scalar));
  CHECK(simd::parse_isa("avx2") == Isa::avx2);
  CHECK_FALSE(simd::parse_isa("sse9").has_value());
  CHECK(simd::isa_name(simd::best_kernels().isa).size() > 0);
  for (Isa isa : {Isa::avx2, Isa::neon})
    if (!simd::available(isa)) CHECK_THROWS_AS(simd::kernels_for(isa), Error);
  MESSAGE("active variant: " << simd::isa_name(simd::best_kernels().isa));
}

TEST_CASE("kernels agree with the scalar reference") {
  const auto& ref = simd::scalar_kernels();
  std::mt19937_64 rng(17);
  for (const simd::Kernels* k : wide_variants()) {
    INFO(simd::isa_name(k->isa));
    for (std::size_t n = 0; n <= 70; ++n) {
      const auto x = random_vector(rng, n);
      const auto y = random_vector(rng, n);
      std::vector<std::uint64_t> words((n + 63) / 64 + 1);
      for (auto& w : words) w = rng();

      const double tol = 1e-15 * scale(x);
      CHECK(std::abs(k->masked_sum(x.data(), words.data(), n) - ref.masked_sum(x.data(), words.data(), n)) <=
            tol);
      std::vector<std::uint64_t> all(words.size(), ~std::uint64_t{0});
      CHECK(std::abs(k->masked_sum(x.data(), all.data(), n) - ref.masked_sum(x.data(), all.data(), n)) <= tol);

      CHECK(std::abs(k->dot(x.data(), y.data(), n) - ref.dot(x.data(), y.data(), n)) <= tol);

      // Elementwise kernels allow no reassociation, so they match exactly.
      auto ya = y, yb = y;
      k->axpy(0.37, x.data(), ya.data(), n);
      ref.axpy(0.37, x.data(), yb.data(), n);
      CHECK(ya == yb);

      auto xa = x, xb = x, ra = y, rb = y;
      k->rotate(xa.data(), ra.data(), 0.8, 0.6, n);
      ref.rotate(xb.data(), rb.data(), 0.8, 0.6, n);
      CHECK(xa == xb);
      CHECK(ra == rb);
    }
  }
}

TEST_CASE("whole pipeline agrees across variants") {
  const auto& ref = simd::scalar_kernels();
  for (const simd::Kernels* k : wide_variants()) {
    for (std::size_t n : {3u, 9u, 14u, 17u}) {
      l2gap::cli::GenSpec spec{"random-reversible", n, {0.7}, 40 + n};
      const auto chain = MarkovChain::build(l2gap::cli::generate(spec).P);
      CutOptions a, b;
      a.kernels = &ref;
      b.kernels = k;
      for (unsigned steps : {1u, 2u}) {
        const auto ea = enumerate_extremes(chain, steps, a);
        const auto eb = enumerate_extremes(chain, steps, b);
        CHECK(std::abs(ea.sup_all.value - eb.sup_all.value) < 1e-12);
        CHECK(std::abs(ea.inf_closed.value - eb.inf_closed.value) < 1e-12);
      }
      EigenOptions ea, eb;
      ea.kernels = &ref;
      eb.kernels = k;
      const auto sa = spectrum(chain, ea);
      const auto sb = spectrum(chain, eb);
      for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(sa.eigenvalues[i] - sb.eigenvalues[i]) < 1e-12);

      const Matrix& p = chain.kernel().matrix();
      CHECK(max_abs_diff(multiply(p, p, ref), multiply(p, p, *k)) == 0.0);
    }
  }
}
