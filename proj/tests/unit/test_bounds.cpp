#include <doctest.h>

#include <cmath>

#include "fixtures.hpp"
#include "l2gap/bounds.hpp"
#include "l2gap/error.hpp"

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

const Check* find(const std::vector<Check>& checks, const std::string& name) {
  for (const Check& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

// The three-term objective evaluated in long double, written out separately.
long double objective_ld(long double k, long double K, long double d, long double e1, long double e2,
                         long double e) {
  const long double t1 = k * k * d / 16;
  const long double t2 = k / 4 * (e1 * e2 * (1 - d) - d);
  const long double t3 =
      e * (k * ((2 - e) * (1 - e1) * (1 - e2) * (1 - d) / ((1 - e) * K) - 1 / (1 - e)) - e / (1 - e));
  return std::min(t1, std::min(t2, t3));
}

}  // namespace

TEST_CASE("Lawler-Sokal interval") {
  const auto zero = lawler_sokal_interval(0.0);
  CHECK(zero.lo == 0.0);
  CHECK(zero.hi == 0.0);
  const auto lazy = lawler_sokal_interval(0.5);
  CHECK(lazy.lo == doctest::Approx(1.0 / 32.0));
  CHECK(lazy.hi == 0.5);
  CHECK(lazy.contains(0.5));
  const auto c4 = lawler_sokal_interval(4.0 / 3.0);
  CHECK(c4.lo == doctest::Approx(2.0 / 9.0));
  CHECK(c4.contains(1.0));
  BoundParams sharp;
  sharp.kappa = 2.0;
  CHECK(lawler_sokal_interval(0.5, sharp).lo == doctest::Approx(1.0 / 16.0));
  CHECK(code_of([] { lawler_sokal_interval(2.5); }) == ErrorCode::DomainError);
  BoundParams bad;
  bad.kappa = 0.5;
  CHECK(code_of([&] { lawler_sokal_interval(1.0, bad); }) == ErrorCode::DomainError);
}

TEST_CASE("spectrum enclosure") {
  const auto vacuous = spectrum_enclosure(0.0, 0.0);
  CHECK(vacuous.lo == -1.0);
  CHECK(vacuous.hi == 1.0);
  const auto c4 = spectrum_enclosure(4.0 / 3.0, 0.0);
  CHECK(c4.lo == -1.0);
  CHECK(c4.hi == doctest::Approx(7.0 / 9.0));
  for (double v : {0.0, 0.0, -1.0}) CHECK(c4.contains(v, 1e-12));
  const auto lz = spectrum_enclosure(0.5, 0.75);
  const double r = std::sqrt(1.0 - 9.0 / 128.0);
  CHECK(lz.lo == doctest::Approx(-r));
  CHECK(lz.hi == doctest::Approx(r));
  CHECK(lz.hi < 31.0 / 32.0);
  for (double v : {0.5, 0.5, 0.0}) CHECK(lz.contains(v));
}

TEST_CASE("k2 objective") {
  const double d = 0.01, c = std::sqrt(2 * d / (1 - d)), e = 0.05;
  const double got = k2_objective(0.5, 1.0, {d, c, c, e});
  const long double want = objective_ld(0.5L, 1.0L, d, c, c, e);
  CHECK(std::abs(got - static_cast<double>(want)) < 1e-15);
  // Here the quadratic term is the smallest of the three.
  CHECK(got == doctest::Approx(0.5 * 0.5 * d / 16).epsilon(1e-14));

  CHECK(k2_objective(0.0, 1.0, {0.1, 0.5, 0.5, 0.5}) <= 0.0);
  CHECK(code_of([] { k2_objective(0.5, 1.0, {0.5, 0.5, 0.5, 0.5}); }) == ErrorCode::DomainError);
  CHECK(code_of([] { k2_objective(0.5, 1.0, {0.1, 1.0, 0.5, 0.5}); }) == ErrorCode::DomainError);
  CHECK(code_of([] { k2_objective(0.5, 1.0, {0.1, 0.5, 0.0, 0.5}); }) == ErrorCode::DomainError);
  CHECK(code_of([] { k2_objective(0.5, 1.0, {0.1, 0.5, 0.5, 1.0}); }) == ErrorCode::DomainError);
  CHECK(code_of([] { k2_objective(0.5, 0.0, {0.1, 0.5, 0.5, 0.5}); }) == ErrorCode::DomainError);
}

TEST_CASE("k2 lower bound") {
  const auto zero = k2_lower_bound(0.0, 1.0);
  CHECK(zero.value == 0.0);
  CHECK(zero.raw <= 0.0);

  const auto c4 = k2_lower_bound(1.0, 2.0);
  CHECK(c4.value == 0.0);
  CHECK(c4.raw <= 1e-6);

  const auto lz = k2_lower_bound(0.5, 1.0);
  CHECK(lz.value > 0.0);
  CHECK(lz.value <= 0.75);
  CHECK(lz.raw == lz.value);
  CHECK(k2_objective(0.5, 1.0, lz.argmax) == lz.value);

  // Deterministic to the bit.
  const auto again = k2_lower_bound(0.5, 1.0);
  CHECK(again.value == lz.value);
  CHECK(again.argmax == lz.argmax);

  // A fine grid for K = 2 never finds a positive value.
  double best = -1.0;
  for (int a = 1; a < 40; ++a)
    for (int b = 1; b < 40; ++b)
      for (int c = 1; c < 40; ++c) {
        const double d = 0.5 * a / 40.0, e1 = b / 40.0, e = c / 40.0;
        best = std::max(best, k2_objective(1.0, 2.0, {d, e1, e1, e}));
      }
  CHECK(best <= 1e-6);

  CHECK(code_of([] { k2_lower_bound(0.5, 0.0); }) == ErrorCode::DomainError);
  CHECK(code_of([] { k2_lower_bound(0.5, 2.5); }) == ErrorCode::DomainError);
}

TEST_CASE("verdicts") {
  const auto none = make_verdict(0.0, 1.0, 2.0, 0.0);
  CHECK_FALSE(none.has_gap);
  CHECK_FALSE(none.cond_kK);
  CHECK_FALSE(none.cond_k2);
  CHECK(none.consistent);
  CHECK_FALSE(make_verdict(0.5, 1.0, 2.0, 0.3).consistent);

  const auto c4 = classify(MarkovChain::build(fixtures::cycle4()));
  CHECK_FALSE(c4.has_gap);
  CHECK_FALSE(c4.cond_kK);
  CHECK_FALSE(c4.cond_k2);
  CHECK(c4.consistent);

  const auto lz = classify(MarkovChain::build(fixtures::lazy_cycle4()));
  CHECK(lz.has_gap);
  CHECK(lz.cond_kK);
  CHECK(lz.cond_k2);
  CHECK(lz.consistent);

  const auto sw = classify(MarkovChain::build(fixtures::swap2()));
  CHECK_FALSE(sw.has_gap);
  CHECK_FALSE(sw.cond_kK);
  CHECK_FALSE(sw.cond_k2);
  CHECK(sw.consistent);
}

TEST_CASE("verify report on the fixtures") {
  const auto c4 = verify_report(MarkovChain::build(fixtures::cycle4()));
  CHECK(c4.certified);
  CHECK(c4.all_passed());
  CHECK(c4.K.value == doctest::Approx(2.0));
  CHECK_FALSE(c4.verdict.has_gap);
  CHECK(c4.k2_bound.value == 0.0);

  const auto lz = verify_report(MarkovChain::build(fixtures::lazy_cycle4()));
  CHECK(lz.all_passed());
  CHECK(lz.lawler_sokal_closed.hi == doctest::Approx(lz.spectrum.gap_at_one));
  for (const Check& c : lz.checks) {
    INFO(c.name);
    CHECK_FALSE(c.skipped);
    CHECK(c.passed);
  }

  const auto sw = verify_report(MarkovChain::build(fixtures::swap2()));
  CHECK_FALSE(sw.k_strict.has_value());
  CHECK(sw.all_passed());
}

TEST_CASE("an inflated kappa fails the lower-bound checks") {
  BoundParams params;
  params.kappa = 50.0;
  const auto rep = verify_report(MarkovChain::build(fixtures::lazy_cycle4()), params);
  CHECK_FALSE(rep.all_passed());
  const Check* lower = find(rep.checks, "lawler_sokal_lower[closed-half]");
  REQUIRE(lower != nullptr);
  CHECK_FALSE(lower->passed);
}

TEST_CASE("heuristic reports are uncertified and skip exact-only checks") {
  CutOptions opts;
  opts.strategy = Strategy::heuristic;
  const auto rep = verify_report(MarkovChain::build(fixtures::corpus(8)[6].p), {}, opts);
  CHECK_FALSE(rep.certified);
  CHECK(rep.all_passed());
  const Check* enc = find(rep.checks, "spectrum_enclosure");
  REQUIRE(enc != nullptr);
  CHECK(enc->skipped);
}

TEST_CASE("invariant suite") {
  for (const auto& item : fixtures::corpus(24)) {
    const auto checks = invariant_suite(MarkovChain::build(item.p));
    for (const Check& c : checks) {
      INFO(item.label << " " << c.name << " slack " << c.slack);
      CHECK((c.skipped || c.passed));
    }
  }
  for (auto p : {fixtures::cycle4(), fixtures::swap2(), fixtures::cycle(6), fixtures::birth_death3()}) {
    const auto checks = invariant_suite(MarkovChain::build(p));
    for (const Check& c : checks) {
      INFO(c.name);
      CHECK((c.skipped || c.passed));
    }
    const Check* half = find(checks, "near_two_mass_half");
    REQUIRE(half != nullptr);
    CHECK_FALSE(half->skipped);
  }
}
