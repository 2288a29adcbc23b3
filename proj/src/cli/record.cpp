#include "l2gap/cli/record.hpp"

#include <json.hpp>

#include "l2gap/error.hpp"

namespace l2gap::cli {
namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void bad_record(const std::string& what) {
  throw Error(ErrorCode::ParseError, "analysis record: " + what);
}

const json& field(const json& obj, const char* key) {
  if (!obj.is_object() || !obj.contains(key)) bad_record(std::string("missing field \"") + key + "\"");
  return obj.at(key);
}

double num(const json& obj, const char* key) {
  const json& v = field(obj, key);
  if (!v.is_number()) bad_record(std::string("field \"") + key + "\" must be a number");
  return v.get<double>();
}

CutMode parse_mode(const std::string& s) {
  for (CutMode m : {CutMode::exact, CutMode::sweep_heuristic, CutMode::local_search_heuristic})
    if (s == mode_name(m)) return m;
  bad_record("unknown cut mode '" + s + "'");
}

json interval_json(const Interval& iv) { return json::array({iv.lo, iv.hi}); }

Interval parse_interval(const json& v) {
  if (!v.is_array() || v.size() != 2) bad_record("interval must be [lo, hi]");
  return {v[0].get<double>(), v[1].get<double>()};
}

json cut_json(const CutReport& c) {
  json out;
  out["value"] = c.value;
  out["witness"] = c.witness.states();
  out["witness_mass"] = c.witness.mass();
  out["n_steps"] = c.n_steps;
  out["mode"] = mode_name(c.mode);
  out["family"] = family_name(c.family);
  return out;
}

json optional_cut_json(const std::optional<CutReport>& c) { return c ? cut_json(*c) : json(nullptr); }

CutReport parse_cut(const json& v, std::span<const double> pi) {
  CutReport c;
  c.value = num(v, "value");
  const auto states = field(v, "witness").get<std::vector<std::size_t>>();
  c.witness = StateSubset::from_states(pi, states);
  c.n_steps = field(v, "n_steps").get<std::uint64_t>();
  c.mode = parse_mode(field(v, "mode").get<std::string>());
  const auto family = parse_family(field(v, "family").get<std::string>());
  if (!family) bad_record("unknown family");
  c.family = *family;
  return c;
}

std::optional<CutReport> parse_optional_cut(const json& v, std::span<const double> pi) {
  if (v.is_null()) return std::nullopt;
  return parse_cut(v, pi);
}

json spectrum_json(const SpectrumReport& s) {
  json out;
  out["eigenvalues"] = s.eigenvalues;
  out["gap_at_one"] = s.gap_at_one;
  out["gap_at_minus_one"] = s.gap_at_minus_one;
  out["spectral_gap"] = s.spectral_gap;
  out["sweeps"] = s.sweeps;
  if (s.eigenfunctions) {
    out["eigenfunctions"] = s.eigenfunctions->to_rows();
    out["max_residual"] = s.max_residual;
  }
  return out;
}

SpectrumReport parse_spectrum(const json& v) {
  SpectrumReport s;
  s.eigenvalues = field(v, "eigenvalues").get<std::vector<double>>();
  s.gap_at_one = num(v, "gap_at_one");
  s.gap_at_minus_one = num(v, "gap_at_minus_one");
  s.spectral_gap = num(v, "spectral_gap");
  s.sweeps = field(v, "sweeps").get<int>();
  if (v.contains("eigenfunctions")) {
    s.eigenfunctions = Matrix::from_rows(v["eigenfunctions"].get<std::vector<std::vector<double>>>());
    s.max_residual = num(v, "max_residual");
  }
  return s;
}

json check_json(const Check& c) {
  json out;
  out["name"] = c.name;
  out["passed"] = c.passed;
  out["skipped"] = c.skipped;
  out["measured"] = c.measured;
  out["bound"] = c.bound;
  out["slack"] = c.slack;
  out["margin"] = c.margin;
  out["detail"] = c.detail;
  return out;
}

Check parse_check(const json& v) {
  Check c;
  c.name = field(v, "name").get<std::string>();
  c.passed = field(v, "passed").get<bool>();
  c.skipped = field(v, "skipped").get<bool>();
  c.measured = num(v, "measured");
  c.bound = num(v, "bound");
  c.slack = num(v, "slack");
  c.margin = num(v, "margin");
  c.detail = field(v, "detail").get<std::string>();
  return c;
}

}  // namespace

std::string dump_record(const AnalysisRecord& r, int indent) {
  json doc;
  doc["schema"] = kSchemaVersion;
  doc["chain"] = {{"name", r.name}, {"n", r.pi.size()}, {"pi", r.pi}, {"reversible", r.reversible}};
  doc["strategy"] = r.strategy;
  doc["simd"] = r.simd;
  doc["kappa"] = r.kappa;

  json steps = json::array();
  for (const StepCuts& s : r.steps)
    steps.push_back({{"n_steps", s.n_steps},
                     {"k_strict", optional_cut_json(s.k_strict)},
                     {"k_closed", optional_cut_json(s.k_closed)}});
  doc["steps"] = std::move(steps);

  const BoundReport& b = r.report;
  doc["k_strict"] = optional_cut_json(b.k_strict);
  doc["k_closed"] = cut_json(b.k_closed);
  doc["K"] = cut_json(b.K);
  doc["k2"] = cut_json(b.k2);
  doc["spectrum"] = spectrum_json(b.spectrum);
  doc["bounds"] = {
      {"lawler_sokal_strict", b.lawler_sokal_strict ? interval_json(*b.lawler_sokal_strict) : json(nullptr)},
      {"lawler_sokal_closed", interval_json(b.lawler_sokal_closed)},
      {"enclosure", interval_json(b.enclosure)},
      {"k2_lower_bound",
       {{"value", b.k2_bound.value},
        {"raw", b.k2_bound.raw},
        {"argmax",
         {{"delta", b.k2_bound.argmax.delta},
          {"eps1", b.k2_bound.argmax.eps1},
          {"eps2", b.k2_bound.argmax.eps2},
          {"eps", b.k2_bound.argmax.eps}}}}}};
  doc["verdict"] = {{"has_gap", b.verdict.has_gap},
                    {"cond_kK", b.verdict.cond_kK},
                    {"cond_k2", b.verdict.cond_k2},
                    {"consistent", b.verdict.consistent}};
  doc["certified"] = b.certified;
  json checks = json::array();
  for (const Check& c : b.checks) checks.push_back(check_json(c));
  doc["checks"] = std::move(checks);
  doc["all_passed"] = b.all_passed();
  if (r.timing)
    doc["timing"] = {{"load_ms", r.timing->load_ms},
                     {"cuts_ms", r.timing->cuts_ms},
                     {"spectrum_ms", r.timing->spectrum_ms},
                     {"bounds_ms", r.timing->bounds_ms},
                     {"total_ms", r.timing->total_ms}};
  return doc.dump(indent) + "\n";
}

AnalysisRecord parse_record(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    bad_record(e.what());
  }
  try {
    if (field(doc, "schema").get<std::string>() != kSchemaVersion) bad_record("unsupported schema");
    AnalysisRecord r;
    const json& chain = field(doc, "chain");
    r.name = field(chain, "name").get<std::string>();
    r.pi = field(chain, "pi").get<std::vector<double>>();
    r.reversible = field(chain, "reversible").get<bool>();
    r.strategy = field(doc, "strategy").get<std::string>();
    r.simd = field(doc, "simd").get<std::string>();
    r.kappa = num(doc, "kappa");
    const std::span<const double> pi = r.pi;

    for (const json& s : field(doc, "steps"))
      r.steps.push_back({field(s, "n_steps").get<std::uint64_t>(),
                         parse_optional_cut(field(s, "k_strict"), pi),
                         parse_optional_cut(field(s, "k_closed"), pi)});

    BoundReport& b = r.report;
    b.k_strict = parse_optional_cut(field(doc, "k_strict"), pi);
    b.k_closed = parse_cut(field(doc, "k_closed"), pi);
    b.K = parse_cut(field(doc, "K"), pi);
    b.k2 = parse_cut(field(doc, "k2"), pi);
    b.spectrum = parse_spectrum(field(doc, "spectrum"));

    const json& bounds = field(doc, "bounds");
    if (!field(bounds, "lawler_sokal_strict").is_null())
      b.lawler_sokal_strict = parse_interval(bounds["lawler_sokal_strict"]);
    b.lawler_sokal_closed = parse_interval(field(bounds, "lawler_sokal_closed"));
    b.enclosure = parse_interval(field(bounds, "enclosure"));
    const json& lb = field(bounds, "k2_lower_bound");
    b.k2_bound.value = num(lb, "value");
    b.k2_bound.raw = num(lb, "raw");
    const json& am = field(lb, "argmax");
    b.k2_bound.argmax = {num(am, "delta"), num(am, "eps1"), num(am, "eps2"), num(am, "eps")};

    const json& v = field(doc, "verdict");
    b.verdict = {field(v, "has_gap").get<bool>(), field(v, "cond_kK").get<bool>(),
                 field(v, "cond_k2").get<bool>(), field(v, "consistent").get<bool>()};
    b.certified = field(doc, "certified").get<bool>();
    for (const json& c : field(doc, "checks")) b.checks.push_back(parse_check(c));

    if (doc.contains("timing")) {
      const json& t = doc["timing"];
      r.timing = Timing{num(t, "load_ms"), num(t, "cuts_ms"), num(t, "spectrum_ms"),
                        num(t, "bounds_ms"), num(t, "total_ms")};
    }
    return r;
  } catch (const json::exception& e) {
    bad_record(e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::ParseError) throw;
    bad_record(e.what());
  }
}

}  // namespace l2gap::cli
