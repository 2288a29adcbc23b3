#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "l2gap/cli/chain_io.hpp"
#include "l2gap/cli/commands.hpp"
#include "l2gap/cli/generate.hpp"
#include "l2gap/cli/record.hpp"
#include "l2gap/error.hpp"

using namespace l2gap;
using namespace l2gap::cli;

namespace {

const std::filesystem::path kData = L2GAP_TEST_DATA;

std::string data(const char* name) { return (kData / name).string(); }

Error error_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e;
  }
  FAIL("expected an l2gap::Error");
  return Error(ErrorCode::ValidationError, "unreachable");
}

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run analyze_run(RunOptions o) {
  std::ostringstream out, err;
  const int code = run_analyze(o, out, err);
  return {code, out.str(), err.str()};
}

RunOptions gen_options(const std::string& spec) {
  RunOptions o;
  o.gen = spec;
  o.timing = false;
  return o;
}

}  // namespace

TEST_CASE("matrix-text parsing") {
  const auto f = parse_chain_file(data("cycle4.txt"));
  CHECK(f.n == 4);
  CHECK(f.P == fixtures::cycle4());
  CHECK_FALSE(f.pi.has_value());

  const auto s = parse_chain_file(data("swap_commented.txt"));
  CHECK(s.P == fixtures::swap2());

  const auto bad = error_of([] { parse_chain_file(data("bad_token.txt")); });
  CHECK(bad.code() == ErrorCode::ParseError);
  CHECK(std::string(bad.what()).find("line 3, column 3") != std::string::npos);

  const auto ragged = error_of([] { parse_chain_file(data("ragged.txt")); });
  CHECK(ragged.code() == ErrorCode::DimensionMismatch);
  CHECK(std::string(ragged.what()).find("line 2") != std::string::npos);

  CHECK(error_of([] { parse_chain_text("", InputFormat::matrix_text); }).code() == ErrorCode::ParseError);
  CHECK(error_of([] { parse_chain_file(data("missing.txt")); }).code() == ErrorCode::ParseError);
}

TEST_CASE("structured parsing") {
  const auto f = parse_chain_file(data("cycle4_with_pi.json"));
  CHECK(f.n == 4);
  CHECK(f.name == "4-cycle");
  REQUIRE(f.pi.has_value());
  const auto chain = build_chain(f);
  CHECK(chain.size() == 4);

  CHECK(error_of([] { parse_chain_file(data("wrong_length_pi.json")); }).code() ==
        ErrorCode::DimensionMismatch);
  CHECK(error_of([] { build_chain(parse_chain_file(data("corrupted_pi.json"))); }).code() ==
        ErrorCode::ValidationError);

  const auto syn = error_of([] { parse_chain_file(data("syntax_error.json")); });
  CHECK(syn.code() == ErrorCode::ParseError);
  CHECK(std::string(syn.what()).find("line 2, column 19") != std::string::npos);

  CHECK(error_of([] { parse_chain_text(R"({"n": 3, "P": [[0, 1], [1, 0]]})"); }).code() ==
        ErrorCode::DimensionMismatch);
  CHECK(error_of([] { parse_chain_text(R"({"P": [[0, "x"], [1, 0]]})"); }).code() == ErrorCode::ParseError);
  CHECK(error_of([] { parse_chain_text(R"({"n": 2})"); }).code() == ErrorCode::ParseError);
}

TEST_CASE("format sniffing follows the first non-space byte") {
  CHECK(parse_chain_text("  \n {\"P\": [[0, 1], [1, 0]]}").P == fixtures::swap2());
  CHECK(parse_chain_text("0 1\n1 0\n").P == fixtures::swap2());
  CHECK(error_of([] { parse_chain_text("0 1\n1 0\n", InputFormat::structured); }).code() ==
        ErrorCode::ParseError);
}

TEST_CASE("write and re-read both formats exactly") {
  auto f = generate(parse_gen_spec("random-reversible:7:0.6:9"));
  const auto chain = build_chain(f);
  f.pi = std::vector<double>(chain.pi().begin(), chain.pi().end());
  for (InputFormat fmt : {InputFormat::matrix_text, InputFormat::structured}) {
    const auto back = parse_chain_text(write_chain(f, fmt));
    CHECK(back.P == f.P);
  }
  const auto back = parse_chain_text(write_chain(f, InputFormat::structured));
  CHECK(back.pi == f.pi);
  CHECK(back.name == f.name);
  CHECK(format_number(0.1) == "0.1");
  CHECK(std::stod(format_number(1.0 / 3.0)) == 1.0 / 3.0);
}

TEST_CASE("generators") {
  CHECK(generate(parse_gen_spec("cycle:4")).P == fixtures::cycle4());
  CHECK(max_abs_diff(generate(parse_gen_spec("lazy-cycle:4:0.5")).P, fixtures::lazy_cycle4()) == 0.0);
  CHECK(generate(parse_gen_spec("cycle:2")).P == fixtures::swap2());

  const auto lazy = MarkovChain::build(generate(parse_gen_spec("lazy-cycle:6:0.3")).P);
  const auto via_lazify = lazify(MarkovChain::build(fixtures::cycle(6)), 0.3);
  CHECK(max_abs_diff(lazy.kernel().matrix(), via_lazify.kernel().matrix()) < 1e-15);

  const auto complete = MarkovChain::build(generate(parse_gen_spec("complete:5")).P);
  for (std::uint64_t m = 1; m < 31; ++m)
    CHECK(std::abs(k_of_set(complete, StateSubset::from_mask(complete.pi(), m)) - 1.0) < 1e-12);

  const auto bd = generate(parse_gen_spec("birth-death:4:0.3,0.2"));
  CHECK(bd.P(0, 1) == 0.3);
  CHECK(bd.P(0, 0) == doctest::Approx(0.7));
  CHECK(bd.P(2, 1) == 0.2);
  CHECK(bd.P(3, 3) == doctest::Approx(0.8));
  CHECK(MarkovChain::build(bd.P).reversible());

  const auto a = generate(parse_gen_spec("random-reversible:6::42"));
  const auto b = generate(parse_gen_spec("random-reversible:6::42"));
  CHECK(write_chain(a, InputFormat::structured) == write_chain(b, InputFormat::structured));
  CHECK(a.P != generate(parse_gen_spec("random-reversible:6::43")).P);
  for (const char* spec : {"random-reversible:9:0.2:5", "random-reversible:12:1:8"}) {
    const auto chain = MarkovChain::build(generate(parse_gen_spec(spec)).P);
    CHECK(chain.reversible());
  }

  for (const char* bad : {"cycle", "cycle:1", "cycle:x", "cycle:4:0.5", "lazy-cycle:4:1", "torus:4",
                          "birth-death:4:0.7,0.7", "random-reversible:5:0", "cycle:4::1:2"})
    CHECK(error_of([&] { generate(parse_gen_spec(bad)); }).code() == ErrorCode::BadParams);
}

TEST_CASE("analysis record round-trips losslessly") {
  for (const char* spec : {"cycle:4", "lazy-cycle:4:0.5", "cycle:2", "random-reversible:8::3"}) {
    RunOptions o = gen_options(spec);
    o.timing = true;
    o.steps = {1, 2, 3};
    const auto rec = analyze(o);
    const std::string text = dump_record(rec);
    const auto back = parse_record(text);
    CHECK(dump_record(back) == text);
    CHECK(back.report.k_closed.value == rec.report.k_closed.value);
    CHECK(back.report.spectrum.eigenvalues == rec.report.spectrum.eigenvalues);
    CHECK(back.report.k2_bound.argmax == rec.report.k2_bound.argmax);
    CHECK(back.steps.size() == 3);
  }
  CHECK(error_of([] { parse_record(R"({"schema": "2"})"); }).code() == ErrorCode::ParseError);
  CHECK(error_of([] { parse_record("not json"); }).code() == ErrorCode::ParseError);
}

TEST_CASE("analyze exit codes") {
  const auto c4 = analyze_run(gen_options("cycle:4"));
  CHECK(c4.code == kExitOk);
  const auto rec = parse_record(c4.out);
  CHECK(rec.report.K.value == doctest::Approx(2.0));
  CHECK(rec.report.k2.value == doctest::Approx(0.0));
  CHECK(rec.report.spectrum.spectral_gap == doctest::Approx(0.0));
  CHECK(rec.report.verdict.consistent);

  CHECK(analyze_run(gen_options("lazy-cycle:4")).code == kExitOk);

  const auto big = analyze_run(gen_options("random-reversible:30::1"));
  CHECK(big.code == kExitInputError);
  CHECK(big.err.find("StateSpaceTooLarge") != std::string::npos);
  RunOptions heuristic = gen_options("random-reversible:30::1");
  heuristic.heuristic = true;
  const auto h = analyze_run(heuristic);
  CHECK(h.code == kExitOk);
  CHECK(parse_record(h.out).strategy == "heuristic");
  CHECK_FALSE(parse_record(h.out).report.certified);

  RunOptions kappa = gen_options("lazy-cycle:4");
  kappa.kappa = 50;
  CHECK(analyze_run(kappa).code == kExitCheckFailed);
  kappa.kappa = 0.5;
  CHECK(analyze_run(kappa).code == kExitInputError);

  RunOptions corrupted;
  corrupted.file = data("corrupted_pi.json");
  CHECK(analyze_run(corrupted).code == kExitInputError);
  RunOptions accepted;
  accepted.file = data("cycle4_with_pi.json");
  CHECK(analyze_run(accepted).code == kExitOk);

  RunOptions non_reversible;
  non_reversible.gen = "";
  non_reversible.file = "";
  CHECK(analyze_run(non_reversible).code == kExitInputError);
}

TEST_CASE("structured output is byte-identical without timing") {
  const auto a = analyze_run(gen_options("random-reversible:6::42"));
  const auto b = analyze_run(gen_options("random-reversible:6::42"));
  CHECK(a.out == b.out);
  CHECK(a.out.find("timing") == std::string::npos);
  RunOptions text = gen_options("random-reversible:6::42");
  text.format = OutputFormat::text;
  CHECK(analyze_run(text).out == analyze_run(text).out);
}

TEST_CASE("generate, write, parse, analyze equals generate, analyze") {
  const auto dir = std::filesystem::temp_directory_path() / "l2gap_cli_test";
  std::filesystem::create_directories(dir);
  for (const char* spec : {"random-reversible:7::11", "birth-death:5:0.4,0.3", "lazy-cycle:5:0.25"}) {
    const GenSpec g = parse_gen_spec(spec);
    for (OutputFormat fmt : {OutputFormat::json, OutputFormat::text}) {
      const auto path = dir / (std::string("chain") + (fmt == OutputFormat::json ? ".json" : ".txt"));
      std::ostringstream out, err;
      REQUIRE(run_gen(g, fmt, path.string(), out, err) == kExitOk);
      RunOptions from_file;
      from_file.file = path.string();
      from_file.timing = false;
      auto direct = analyze(gen_options(spec));
      auto via_file = analyze(from_file);
      // Only the label may differ: matrix-text carries no name.
      via_file.name = direct.name;
      CHECK(dump_record(via_file) == dump_record(direct));
    }
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("spectrum and verify commands") {
  std::ostringstream out, err;
  RunOptions o = gen_options("lazy-cycle:4");
  o.vectors = true;
  CHECK(run_spectrum(o, out, err) == kExitOk);
  CHECK(out.str().find("\"eigenfunctions\"") != std::string::npos);

  std::ostringstream vout, verr;
  CHECK(run_verify(gen_options("random-reversible:6::2"), vout, verr) == kExitOk);
  CHECK(vout.str().find("\"all_passed\": true") != std::string::npos);

  std::ostringstream nout, nerr;
  RunOptions cyc3;
  cyc3.file = (std::filesystem::temp_directory_path() / "l2gap_cyc3.txt").string();
  std::ofstream(cyc3.file) << "0 1 0\n0 0 1\n1 0 0\n";
  CHECK(run_spectrum(cyc3, nout, nerr) == kExitInputError);
  CHECK(nerr.str().find("NotReversible") != std::string::npos);
  std::filesystem::remove(cyc3.file);
}
