#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "l2gap/chain.hpp"
#include "l2gap/error.hpp"
#include "oracle.hpp"

using namespace l2gap;

namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an l2gap::Error");
  return ErrorCode::ValidationError;
}

}  // namespace

TEST_CASE("kernel validation rejects malformed matrices") {
  CHECK(code_of([] { TransitionKernel(Matrix(2, 3, 0.5), 1e-12); }) == ErrorCode::NotStochastic);
  CHECK(code_of([] { TransitionKernel(Matrix{{1.0}}, 1e-12); }) == ErrorCode::NotStochastic);
  CHECK(code_of([] { TransitionKernel(Matrix{{1.5, -0.5}, {0.5, 0.5}}, 1e-12); }) ==
        ErrorCode::NotStochastic);
  CHECK(code_of([] { TransitionKernel(Matrix{{0.5, 0.6}, {0.5, 0.5}}, 1e-12); }) ==
        ErrorCode::NotStochastic);
  CHECK(code_of([] { TransitionKernel(Matrix{{NAN, 1.0}, {0.5, 0.5}}, 1e-12); }) ==
        ErrorCode::NotStochastic);
  CHECK_NOTHROW(TransitionKernel(Matrix{{0.5, 0.5 + 1e-13}, {0.5, 0.5}}, 1e-12));
}

TEST_CASE("irreducibility is enforced") {
  CHECK(code_of([] { MarkovChain::build(Matrix::identity(2)); }) == ErrorCode::NotIrreducible);
  // State 1 leaks into the closed class {0} and carries no stationary mass.
  CHECK(code_of([] { MarkovChain::build(Matrix{{1, 0}, {0.5, 0.5}}); }) == ErrorCode::ZeroMassState);
}

TEST_CASE("stationary distributions of the fixtures") {
  const auto c4 = MarkovChain::build(fixtures::cycle4());
  for (double v : c4.pi()) CHECK(v == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(c4.reversible());

  const auto bd = MarkovChain::build(fixtures::birth_death3());
  CHECK(bd.pi()[0] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(bd.pi()[1] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(bd.pi()[2] == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(bd.reversible());
  CHECK(bd.stationary().min() == doctest::Approx(0.25));
}

TEST_CASE("non-reversible three-cycle is flagged") {
  const auto c = MarkovChain::build(Matrix{{0, 1, 0}, {0, 0, 1}, {1, 0, 0}});
  CHECK_FALSE(c.reversible());
  CHECK(c.asymmetry() == doctest::Approx(1.0 / 3.0));
}

TEST_CASE("stationary solve matches the Eigen oracle on the corpus") {
  for (const auto& item : fixtures::corpus(80)) {
    const auto chain = MarkovChain::build(item.p);
    const auto ref = oracle::stationary(fixtures::rows(item.p));
    for (std::size_t i = 0; i < chain.size(); ++i) CHECK(std::abs(chain.pi()[i] - ref[i]) < 1e-12);
    CHECK(chain.reversible());
    CHECK(chain.stationary().residual() < 1e-14);
  }
}

TEST_CASE("flow matrix is pi_i p_ij") {
  const auto bd = MarkovChain::build(fixtures::birth_death3());
  CHECK(bd.flow()(0, 1) == doctest::Approx(0.25));
  CHECK(bd.flow()(1, 0) == doctest::Approx(0.25));
  CHECK(bd.flow()(1, 2) == doctest::Approx(0.25));
  CHECK(bd.flow()(0, 2) == 0.0);
}

TEST_CASE("n-step kernels agree with naive powers") {
  const auto c4 = MarkovChain::build(fixtures::cycle4());
  const auto p2 = n_step_kernel(c4, 2).p_n;
  CHECK(p2(0, 0) == doctest::Approx(0.5));
  CHECK(p2(0, 1) == 0.0);
  CHECK(p2(0, 2) == doctest::Approx(0.5));
  CHECK(p2(0, 3) == 0.0);

  const auto lz = MarkovChain::build(fixtures::lazy_cycle4());
  const auto l2 = n_step_kernel(lz, 2).p_n;
  CHECK(l2(0, 0) == doctest::Approx(0.375));
  CHECK(l2(0, 1) == doctest::Approx(0.25));
  CHECK(l2(0, 2) == doctest::Approx(0.125));
  CHECK(l2(0, 3) == doctest::Approx(0.25));

  for (const auto& item : fixtures::corpus(24)) {
    const auto chain = MarkovChain::build(item.p);
    for (unsigned n : {1u, 2u, 3u, 5u, 8u}) {
      const auto ref = oracle::power(fixtures::rows(item.p), n);
      const auto got = n_step_kernel(chain, n).p_n;
      for (std::size_t i = 0; i < chain.size(); ++i)
        for (std::size_t j = 0; j < chain.size(); ++j) CHECK(std::abs(got(i, j) - ref[i][j]) < 1e-13);
    }
  }
}

TEST_CASE("step count limits") {
  const auto c4 = MarkovChain::build(fixtures::cycle4());
  CHECK(code_of([&] { n_step_kernel(c4, 0); }) == ErrorCode::StepOverflow);
  CHECK(code_of([&] { n_step_kernel(c4, kMaxSteps + 1); }) == ErrorCode::StepOverflow);
  // Powers of a doubly stochastic permutation-like kernel stay exact.
  const auto big = n_step_kernel(c4, kMaxSteps).p_n;
  CHECK(big(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("n-step chain keeps pi and reversibility") {
  const auto lz = MarkovChain::build(fixtures::lazy_cycle4());
  const auto two = n_step_chain(lz, 2);
  CHECK(two.reversible());
  for (double v : two.pi()) CHECK(v == doctest::Approx(0.25));
  CHECK(detailed_balance_residual(two.kernel().matrix(), two.pi()) < 1e-15);
}

TEST_CASE("lazify") {
  const auto c4 = MarkovChain::build(fixtures::cycle4());
  const auto lz = lazify(c4, 0.5);
  CHECK(max_abs_diff(lz.kernel().matrix(), fixtures::lazy_cycle4()) < 1e-15);
  CHECK(code_of([&] { lazify(c4, 1.0); }) == ErrorCode::BadParams);
  CHECK(code_of([&] { lazify(c4, -0.1); }) == ErrorCode::BadParams);
}

TEST_CASE("with_stationary checks the supplied vector") {
  TransitionKernel k(fixtures::cycle4(), 1e-12);
  CHECK_NOTHROW(MarkovChain::with_stationary(k, StationaryDistribution({.25, .25, .25, .25}, 0)));
  CHECK(code_of([&] {
          MarkovChain::with_stationary(k, StationaryDistribution({.4, .1, .25, .25}, 0));
        }) == ErrorCode::ValidationError);
  CHECK(code_of([&] { MarkovChain::with_stationary(k, StationaryDistribution({.5, .5}, 0)); }) ==
        ErrorCode::DimensionMismatch);
}
