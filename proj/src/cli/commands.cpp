#include "l2gap/cli/commands.hpp"

#include <chrono>
#include <fstream>
#include <map>
#include <ostream>

#include <json.hpp>

#include "l2gap/error.hpp"
#include "l2gap/simd/kernels.hpp"

namespace l2gap::cli {
namespace {

using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

CutOptions cut_options(const RunOptions& o) {
  CutOptions c;
  c.strategy = o.heuristic ? Strategy::automatic : Strategy::exact;
  c.exact_limit = o.exact_limit;
  c.threads = o.threads;
  c.seed = o.seed;
  c.restarts = o.restarts;
  return c;
}

BoundParams bound_params(const RunOptions& o) {
  BoundParams p;
  p.kappa = o.kappa;
  p.gap_tol = o.gap_tol;
  validate(p);
  return p;
}

bool wants(const RunOptions& o, SubsetFamily f) {
  for (SubsetFamily g : o.families)
    if (g == f) return true;
  return false;
}

bool runs_exact(const RunOptions& o, const MarkovChain& chain) {
  return !o.heuristic || chain.size() <= o.exact_limit;
}

json chain_json(const std::string& name, const MarkovChain& chain) {
  return {{"name", name}, {"n", chain.size()}, {"pi", chain.pi()}, {"reversible", chain.reversible()}};
}

int fail_input(std::ostream& err, const std::exception& e) {
  err << "error: " << e.what() << "\n";
  return kExitInputError;
}

std::string num(double v) { return format_number(v); }

std::string cut_line(const CutReport& c) {
  return num(c.value) + "  witness " + c.witness.to_string() + "  mass " + num(c.witness.mass()) + "  (" +
         std::string(mode_name(c.mode)) + ")";
}

std::string interval_text(const Interval& iv) { return "[" + num(iv.lo) + ", " + num(iv.hi) + "]"; }

void print_checks(std::ostream& out, const std::vector<Check>& checks) {
  out << "checks\n";
  for (const Check& c : checks) {
    if (c.skipped) {
      out << "  SKIP " << c.name << "  (" << c.detail << ")\n";
      continue;
    }
    out << "  " << (c.passed ? "PASS " : "FAIL ") << c.name << "  measured " << num(c.measured)
        << "  bound " << num(c.bound) << "  slack " << num(c.slack) << "\n";
  }
}

void print_timing(std::ostream& out, const Timing& t) {
  out << "timing (ms)  load " << num(t.load_ms) << "  cuts " << num(t.cuts_ms) << "  spectrum "
      << num(t.spectrum_ms) << "  bounds " << num(t.bounds_ms) << "  total " << num(t.total_ms) << "\n";
}

void print_text(std::ostream& out, const AnalysisRecord& r) {
  const BoundReport& b = r.report;
  out << "chain      " << r.name << "  (" << r.pi.size() << " states"
      << (r.reversible ? ", reversible" : "") << ")\n";
  out << "strategy   " << r.strategy << "  simd " << r.simd << "  kappa " << num(r.kappa) << "\n";
  for (const StepCuts& s : r.steps) {
    const std::string n = std::to_string(s.n_steps);
    if (s.k_strict) out << "k_" << n << "[strict-half]  " << cut_line(*s.k_strict) << "\n";
    if (s.k_closed) out << "k_" << n << "[closed-half]  " << cut_line(*s.k_closed) << "\n";
  }
  out << "K          " << cut_line(b.K) << "\n";
  out << "k2         " << cut_line(b.k2) << "\n";
  out << "spectrum  ";
  for (double v : b.spectrum.eigenvalues) out << " " << num(v);
  out << "\n";
  out << "gaps       r1 " << num(b.spectrum.gap_at_one) << "  r-1 " << num(b.spectrum.gap_at_minus_one)
      << "  r " << num(b.spectrum.spectral_gap) << "\n";
  if (b.lawler_sokal_strict)
    out << "lawler-sokal[strict-half]  " << interval_text(*b.lawler_sokal_strict) << "\n";
  out << "lawler-sokal[closed-half]  " << interval_text(b.lawler_sokal_closed) << "\n";
  out << "enclosure  " << interval_text(b.enclosure) << "\n";
  out << "k2 bound   " << num(b.k2_bound.value) << "  (raw " << num(b.k2_bound.raw) << ")\n";
  out << std::boolalpha << "verdict    has_gap " << b.verdict.has_gap << "  cond_kK " << b.verdict.cond_kK
      << "  cond_k2 " << b.verdict.cond_k2 << "  consistent " << b.verdict.consistent << "\n";
  print_checks(out, b.checks);
  out << "result     " << (b.all_passed() ? "all checks passed" : "CHECK FAILED") << "\n";
  if (r.timing) print_timing(out, *r.timing);
}

}  // namespace

MarkovChain load_chain(const RunOptions& options, std::string* name) {
  ChainFile file;
  std::string label;
  if (!options.gen.empty()) {
    file = generate(parse_gen_spec(options.gen));
    label = *file.name;
  } else {
    if (options.file.empty()) throw Error(ErrorCode::BadParams, "no chain file or --gen spec given");
    file = parse_chain_file(options.file, options.input);
    label = file.name.value_or(options.file);
  }
  MarkovChain chain = build_chain(file, options.tol);
  if (name) *name = label;
  return chain;
}

AnalysisRecord analyze(const RunOptions& options) {
  const auto start = Clock::now();
  AnalysisRecord r;
  const BoundParams params = bound_params(options);
  const MarkovChain chain = load_chain(options, &r.name);
  Timing timing;
  timing.load_ms = ms_since(start);

  r.pi.assign(chain.pi().begin(), chain.pi().end());
  r.reversible = chain.reversible();
  r.kappa = options.kappa;
  r.simd = std::string(simd::isa_name(simd::best_kernels().isa));
  const bool exact = runs_exact(options, chain);
  r.strategy = exact ? "exact" : "heuristic";
  const CutOptions cuts = cut_options(options);

  auto t = Clock::now();
  std::map<std::uint64_t, ExactExtremes> cache;
  auto extremes = [&](std::uint64_t n) -> const ExactExtremes& {
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, enumerate_extremes(chain, n, cuts)).first;
    return it->second;
  };
  auto strict = [&](std::uint64_t n) -> std::optional<CutReport> {
    if (exact) return extremes(n).inf_strict;
    try {
      return k_inf(chain, n, SubsetFamily::strict_half, cuts);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyFamily) throw;
      return std::nullopt;
    }
  };
  auto closed = [&](std::uint64_t n) -> CutReport {
    return exact ? extremes(n).inf_closed : k_inf(chain, n, SubsetFamily::closed_half, cuts);
  };

  for (std::uint64_t n : options.steps) {
    StepCuts s;
    s.n_steps = n;
    if (wants(options, SubsetFamily::strict_half)) s.k_strict = strict(n);
    if (wants(options, SubsetFamily::closed_half)) s.k_closed = closed(n);
    r.steps.push_back(std::move(s));
  }
  std::optional<CutReport> k_strict = strict(1);
  CutReport k_closed = closed(1);
  CutReport K = exact ? extremes(1).sup_all : K_sup(chain, cuts);
  CutReport k2 = closed(2);
  timing.cuts_ms = ms_since(t);

  t = Clock::now();
  SpectrumReport spec = spectrum(chain);
  timing.spectrum_ms = ms_since(t);

  t = Clock::now();
  r.report = assemble_report(std::move(k_strict), std::move(k_closed), std::move(K), std::move(k2),
                             std::move(spec), params);
  timing.bounds_ms = ms_since(t);
  timing.total_ms = ms_since(start);
  if (options.timing) r.timing = timing;
  return r;
}

int run_analyze(const RunOptions& options, std::ostream& out, std::ostream& err) {
  AnalysisRecord r;
  try {
    r = analyze(options);
  } catch (const std::exception& e) {
    return fail_input(err, e);
  }
  if (options.format == OutputFormat::json)
    out << dump_record(r);
  else
    print_text(out, r);
  return r.report.all_passed() ? kExitOk : kExitCheckFailed;
}

int run_spectrum(const RunOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto start = Clock::now();
    std::string name;
    const MarkovChain chain = load_chain(options, &name);
    EigenOptions eo;
    eo.vectors = options.vectors;
    const SpectrumReport s = spectrum(chain, eo);
    const double total = ms_since(start);

    if (options.format == OutputFormat::json) {
      json doc;
      doc["schema"] = kSchemaVersion;
      doc["chain"] = chain_json(name, chain);
      json sj;
      sj["eigenvalues"] = s.eigenvalues;
      sj["gap_at_one"] = s.gap_at_one;
      sj["gap_at_minus_one"] = s.gap_at_minus_one;
      sj["spectral_gap"] = s.spectral_gap;
      sj["has_gap"] = has_spectral_gap(s, options.gap_tol);
      sj["sweeps"] = s.sweeps;
      if (s.eigenfunctions) {
        sj["eigenfunctions"] = s.eigenfunctions->to_rows();
        sj["max_residual"] = s.max_residual;
      }
      doc["spectrum"] = std::move(sj);
      if (options.timing) doc["timing"] = {{"total_ms", total}};
      out << doc.dump(2) << "\n";
    } else {
      out << "chain      " << name << "  (" << chain.size() << " states)\n";
      out << "spectrum  ";
      for (double v : s.eigenvalues) out << " " << num(v);
      out << "\n";
      out << "gaps       r1 " << num(s.gap_at_one) << "  r-1 " << num(s.gap_at_minus_one) << "  r "
          << num(s.spectral_gap) << "\n";
      if (s.eigenfunctions) {
        for (std::size_t k = 0; k < chain.size(); ++k) {
          out << "f_" << k << "       ";
          for (double v : s.eigenfunctions->row(k)) out << " " << num(v);
          out << "\n";
        }
      }
      if (options.timing) out << "timing (ms)  total " << num(total) << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return fail_input(err, e);
  }
}

int run_verify(const RunOptions& options, std::ostream& out, std::ostream& err) {
  std::vector<Check> checks;
  std::string name;
  std::optional<MarkovChain> chain;
  bool exact = true;
  const auto start = Clock::now();
  try {
    const BoundParams params = bound_params(options);
    chain = load_chain(options, &name);
    exact = runs_exact(options, *chain);
    checks = invariant_suite(*chain, params, cut_options(options));
  } catch (const std::exception& e) {
    return fail_input(err, e);
  }
  const double total = ms_since(start);
  bool ok = true;
  for (const Check& c : checks) ok = ok && (c.skipped || c.passed);

  if (options.format == OutputFormat::json) {
    json doc;
    doc["schema"] = kSchemaVersion;
    doc["chain"] = chain_json(name, *chain);
    doc["strategy"] = exact ? "exact" : "heuristic";
    json arr = json::array();
    for (const Check& c : checks)
      arr.push_back({{"name", c.name},      {"passed", c.passed}, {"skipped", c.skipped},
                     {"measured", c.measured}, {"bound", c.bound},  {"slack", c.slack},
                     {"margin", c.margin},  {"detail", c.detail}});
    doc["checks"] = std::move(arr);
    doc["all_passed"] = ok;
    if (options.timing) doc["timing"] = {{"total_ms", total}};
    out << doc.dump(2) << "\n";
  } else {
    out << "chain      " << name << "  (" << chain->size() << " states)\n";
    out << "strategy   " << (exact ? "exact" : "heuristic") << "\n";
    print_checks(out, checks);
    out << "result     " << (ok ? "all checks passed" : "CHECK FAILED") << "\n";
    if (options.timing) out << "timing (ms)  total " << num(total) << "\n";
  }
  return ok ? kExitOk : kExitCheckFailed;
}

int run_gen(const GenSpec& spec, OutputFormat format, const std::string& output_path,
            std::ostream& out, std::ostream& err) {
  std::string text;
  try {
    ChainFile file = generate(spec);
    const MarkovChain chain = build_chain(file);
    file.pi = std::vector<double>(chain.pi().begin(), chain.pi().end());
    text = write_chain(file, format == OutputFormat::json ? InputFormat::structured : InputFormat::matrix_text);
  } catch (const std::exception& e) {
    return fail_input(err, e);
  }
  if (output_path.empty() || output_path == "-") {
    out << text;
    return kExitOk;
  }
  std::ofstream f(output_path, std::ios::binary);
  if (!(f << text)) {
    err << "error: cannot write '" << output_path << "'\n";
    return kExitInputError;
  }
  return kExitOk;
}

}  // namespace l2gap::cli
