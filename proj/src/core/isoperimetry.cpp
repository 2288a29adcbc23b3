#include "l2gap/isoperimetry.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <thread>

#include "l2gap/error.hpp"
#include "l2gap/spectral.hpp"

namespace l2gap {

// ---------------------------------------------------------------------------
// StateSubset

StateSubset::StateSubset(std::size_t n, std::vector<std::uint64_t> words,
                         std::span<const double> pi)
    : n_(n), words_(std::move(words)) {
  if (const std::size_t rem = n % 64; rem != 0) words_.back() &= (std::uint64_t{1} << rem) - 1;
  std::size_t members = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (contains(i)) {
      mass_ += pi[i];
      ++members;
    } else {
      complement_mass_ += pi[i];
    }
  }
  if (members == 0 || members == n)
    throw Error(ErrorCode::InvalidSubset, "subset must be nonempty and proper");
}

StateSubset StateSubset::from_states(std::span<const double> pi,
                                     std::span<const std::size_t> states) {
  std::vector<std::uint64_t> words((pi.size() + 63) / 64, 0);
  for (std::size_t s : states) {
    if (s >= pi.size())
      throw Error(ErrorCode::InvalidSubset, "state " + std::to_string(s) + " out of range");
    words[s / 64] |= std::uint64_t{1} << (s % 64);
  }
  return StateSubset(pi.size(), std::move(words), pi);
}

StateSubset StateSubset::from_mask(std::span<const double> pi, std::uint64_t mask) {
  if (pi.size() < 64 && (mask >> pi.size()) != 0)
    throw Error(ErrorCode::InvalidSubset, "mask has bits beyond the state count");
  std::vector<std::uint64_t> words((pi.size() + 63) / 64, 0);
  words[0] = mask;
  return StateSubset(pi.size(), std::move(words), pi);
}

StateSubset StateSubset::from_indicator(std::span<const double> pi, const std::vector<bool>& in) {
  if (in.size() != pi.size())
    throw Error(ErrorCode::InvalidSubset, "indicator length differs from the state count");
  std::vector<std::uint64_t> words((pi.size() + 63) / 64, 0);
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in[i]) words[i / 64] |= std::uint64_t{1} << (i % 64);
  return StateSubset(pi.size(), std::move(words), pi);
}

std::size_t StateSubset::count() const noexcept {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

std::vector<std::size_t> StateSubset::states() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < n_; ++i)
    if (contains(i)) out.push_back(i);
  return out;
}

StateSubset StateSubset::complement(std::span<const double> pi) const {
  std::vector<std::uint64_t> words(words_.size());
  for (std::size_t w = 0; w < words_.size(); ++w) words[w] = ~words_[w];
  return StateSubset(n_, std::move(words), pi);
}

std::string StateSubset::to_string() const {
  std::string out = "{";
  bool first = true;
  for (std::size_t s : states()) {
    if (!first) out += ',';
    out += std::to_string(s);
    first = false;
  }
  return out + "}";
}

bool operator<(const StateSubset& a, const StateSubset& b) {
  if (a.words_.size() != b.words_.size()) return a.words_.size() < b.words_.size();
  for (std::size_t w = a.words_.size(); w-- > 0;)
    if (a.words_[w] != b.words_[w]) return a.words_[w] < b.words_[w];
  return false;
}

// ---------------------------------------------------------------------------
// Names and families

std::string_view family_name(SubsetFamily family) noexcept {
  switch (family) {
    case SubsetFamily::strict_half: return "strict-half";
    case SubsetFamily::closed_half: return "closed-half";
    case SubsetFamily::all_proper: return "all-proper";
  }
  return "unknown";
}

std::string_view mode_name(CutMode mode) noexcept {
  switch (mode) {
    case CutMode::exact: return "exact";
    case CutMode::sweep_heuristic: return "sweep-heuristic";
    case CutMode::local_search_heuristic: return "local-search-heuristic";
  }
  return "unknown";
}

std::optional<SubsetFamily> parse_family(std::string_view name) noexcept {
  if (name == "strict" || name == "strict-half") return SubsetFamily::strict_half;
  if (name == "closed" || name == "closed-half") return SubsetFamily::closed_half;
  if (name == "all" || name == "all-proper") return SubsetFamily::all_proper;
  return std::nullopt;
}

bool in_family(double mass, SubsetFamily family) noexcept {
  switch (family) {
    case SubsetFamily::strict_half: return mass > 0.0 && mass < 0.5 - kHalfMassTol;
    case SubsetFamily::closed_half: return mass > 0.0 && mass <= 0.5 + kHalfMassTol;
    case SubsetFamily::all_proper: return mass > 0.0 && mass < 1.0;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Per-set quantities

Matrix n_step_flow(const MarkovChain& chain, std::uint64_t n) {
  if (n == 1) return chain.flow();
  Matrix q = n_step_kernel(chain, n).p_n;
  for (std::size_t i = 0; i < q.rows(); ++i)
    for (double& v : q.row(i)) v *= chain.pi()[i];
  return q;
}

double flow_out(const Matrix& flow, const StateSubset& a) noexcept {
  double total = 0.0;
  for (std::size_t x = 0; x < flow.rows(); ++x) {
    if (!a.contains(x)) continue;
    for (std::size_t y = 0; y < flow.cols(); ++y)
      if (!a.contains(y)) total += flow(x, y);
  }
  return total;
}

double flow_out(const MarkovChain& chain, const StateSubset& a, std::uint64_t n) {
  if (a.universe() != chain.size())
    throw Error(ErrorCode::InvalidSubset, "subset universe differs from the chain size");
  return flow_out(n_step_flow(chain, n), a);
}

double k_of_set(const Matrix& flow, const StateSubset& a) noexcept {
  return flow_out(flow, a) / (a.mass() * a.complement_mass());
}

double k_of_set(const MarkovChain& chain, const StateSubset& a, std::uint64_t n) {
  return flow_out(chain, a, n) / (a.mass() * a.complement_mass());
}

namespace {

const simd::Kernels& resolve(const CutOptions& options) {
  return options.kernels != nullptr ? *options.kernels : simd::best_kernels();
}

// Incremental cut bookkeeping shared by the enumerator and the heuristics.
// With W = Q + Q^T (zero diagonal) and out_s = sum_{j != s} Q_sj, moving s
// into A changes the flow by out_s - sum_{j in A} W_sj, and moving it out
// changes it by the negation over A \ {s}.
struct CutGeometry {
  Matrix w;
  std::vector<double> out;

  explicit CutGeometry(const Matrix& q) : w(q.rows(), q.cols()), out(q.rows(), 0.0) {
    const std::size_t n = q.rows();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) {
          w(i, j) = q(i, j) + q(j, i);
          out[i] += q(i, j);
        }
  }

  // `words` describes A before the move; s must not be in it for an insert.
  double insert_delta(std::size_t s, const std::uint64_t* words, const simd::Kernels& k) const {
    return out[s] - k.masked_sum(w.row(s).data(), words, w.cols());
  }
};

double exact_flow(const Matrix& q, std::uint64_t mask) {
  double total = 0.0;
  for (std::size_t x = 0; x < q.rows(); ++x) {
    if (!((mask >> x) & 1u)) continue;
    for (std::size_t y = 0; y < q.cols(); ++y)
      if (!((mask >> y) & 1u)) total += q(x, y);
  }
  return total;
}

struct Best {
  double value = 0.0;
  std::uint64_t mask = 0;
  bool set = false;

  void offer_min(double v, std::uint64_t m) {
    if (!set || v < value || (v == value && m < mask)) *this = {v, m, true};
  }
  void offer_max(double v, std::uint64_t m) {
    if (!set || v > value || (v == value && m < mask)) *this = {v, m, true};
  }
};

struct ChunkBest {
  Best strict, closed, sup;
};

constexpr std::uint64_t kChunk = 1024;

ChunkBest scan_chunk(const Matrix& q, const CutGeometry& geo, std::span<const double> pi,
                     std::uint64_t first, std::uint64_t length, const simd::Kernels& kernels) {
  const std::size_t n = q.rows();
  const std::uint64_t full = (n == 64) ? ~std::uint64_t{0} : (std::uint64_t{1} << n) - 1;
  ChunkBest best;

  std::uint64_t a = 1u | ((first ^ (first >> 1)) << 1);
  double flow = exact_flow(q, a);
  double in_mass = 0.0, out_mass = 0.0;
  for (std::size_t i = 0; i < n; ++i) ((a >> i) & 1u ? in_mass : out_mass) += pi[i];

  auto visit = [&] {
    if (a == full) return;
    const double v = flow / (in_mass * out_mass);
    best.sup.offer_max(v, a);
    const bool a_lighter = in_mass <= out_mass;
    const double light = a_lighter ? in_mass : out_mass;
    const std::uint64_t witness = a_lighter ? a : (full & ~a);
    if (in_family(light, SubsetFamily::closed_half)) best.closed.offer_min(v, witness);
    if (in_family(light, SubsetFamily::strict_half)) best.strict.offer_min(v, witness);
  };

  visit();
  for (std::uint64_t i = first + 1; i < first + length; ++i) {
    const std::size_t s = static_cast<std::size_t>(std::countr_zero(i)) + 1;
    const std::uint64_t bit = std::uint64_t{1} << s;
    if (a & bit) {
      a ^= bit;
      flow -= geo.insert_delta(s, &a, kernels);
      in_mass -= pi[s];
      out_mass += pi[s];
    } else {
      flow += geo.insert_delta(s, &a, kernels);
      a |= bit;
      in_mass += pi[s];
      out_mass -= pi[s];
    }
    visit();
  }
  return best;
}

CutReport finish(const Matrix& q, std::span<const double> pi, const Best& best,
                 std::uint64_t n_steps, CutMode mode, SubsetFamily family) {
  CutReport r;
  r.witness = StateSubset::from_mask(pi, best.mask);
  r.value = k_of_set(q, r.witness);
  r.n_steps = n_steps;
  r.mode = mode;
  r.family = family;
  return r;
}

bool use_exact(const MarkovChain& chain, const CutOptions& options) {
  switch (options.strategy) {
    case Strategy::exact: return true;
    case Strategy::heuristic: return false;
    case Strategy::automatic: return chain.size() <= options.exact_limit;
  }
  return true;
}

// Orientation used for sup-type witnesses: the side containing state 0.
StateSubset canonical_side(const StateSubset& a, std::span<const double> pi) {
  return a.contains(0) ? a : a.complement(pi);
}

StateSubset lighter_side(const StateSubset& a, std::span<const double> pi) {
  if (a.mass() < a.complement_mass()) return a;
  if (a.mass() > a.complement_mass()) return a.complement(pi);
  return canonical_side(a, pi);
}

bool better(double v, const StateSubset& s, const CutReport& incumbent, bool have, Objective obj) {
  if (!have) return true;
  if (v != incumbent.value) return obj == Objective::min ? v < incumbent.value : v > incumbent.value;
  return s < incumbent.witness;
}

// Dynamic bitset helpers for the heuristics.
std::vector<std::uint64_t> empty_words(std::size_t n) {
  return std::vector<std::uint64_t>((n + 63) / 64, 0);
}
inline bool test(const std::vector<std::uint64_t>& w, std::size_t s) {
  return (w[s / 64] >> (s % 64)) & 1u;
}
inline void flip(std::vector<std::uint64_t>& w, std::size_t s) {
  w[s / 64] ^= std::uint64_t{1} << (s % 64);
}

std::vector<bool> to_indicator(const std::vector<std::uint64_t>& w, std::size_t n) {
  std::vector<bool> in(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = test(w, i);
  return in;
}

// Best admissible prefix cut along `order`.
void scan_prefixes(const Matrix& q, const CutGeometry& geo, std::span<const double> pi,
                   const std::vector<std::size_t>& order, SubsetFamily inf_family,
                   std::uint64_t n_steps, CutReport& inf, bool& have_inf, CutReport& sup,
                   bool& have_sup) {
  const std::size_t n = q.rows();
  const simd::Kernels& kernels = simd::best_kernels();
  auto words = empty_words(n);
  double flow = 0.0, in_mass = 0.0;
  double out_mass = std::accumulate(pi.begin(), pi.end(), 0.0);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const std::size_t s = order[j];
    flow += geo.insert_delta(s, words.data(), kernels);
    flip(words, s);
    in_mass += pi[s];
    out_mass -= pi[s];
    const double v = std::max(flow, 0.0) / (in_mass * out_mass);
    const StateSubset prefix = StateSubset::from_indicator(pi, to_indicator(words, n));

    const StateSubset canon = canonical_side(prefix, pi);
    if (better(v, canon, sup, have_sup, Objective::max)) {
      sup = {v, canon, n_steps, CutMode::sweep_heuristic, SubsetFamily::all_proper};
      have_sup = true;
    }
    const StateSubset light = lighter_side(prefix, pi);
    if (in_family(light.mass(), inf_family) && better(v, light, inf, have_inf, Objective::min)) {
      inf = {v, light, n_steps, CutMode::sweep_heuristic, inf_family};
      have_inf = true;
    }
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_inf_family(SubsetFamily family) {
  if (family == SubsetFamily::all_proper)
    throw Error(ErrorCode::BadParams, "infimum family must be strict-half or closed-half");
}

}  // namespace

// ---------------------------------------------------------------------------
// Exact enumeration

ExactExtremes enumerate_extremes(const MarkovChain& chain, std::uint64_t n,
                                 const CutOptions& options) {
  const std::size_t size = chain.size();
  if (size > options.exact_limit || size > 63)
    throw Error(ErrorCode::StateSpaceTooLarge,
                std::to_string(size) + " states exceed the exact-enumeration limit of " +
                    std::to_string(std::min<std::size_t>(options.exact_limit, 63)));
  const simd::Kernels& kernels = resolve(options);
  const Matrix q = n_step_flow(chain, n);
  const CutGeometry geo(q);
  const auto pi = chain.pi();

  const std::uint64_t total = std::uint64_t{1} << (size - 1);
  const std::uint64_t chunk = std::min(total, kChunk);
  const std::uint64_t chunks = total / chunk;
  std::vector<ChunkBest> results(chunks);

  unsigned workers = options.threads == 0 ? std::thread::hardware_concurrency() : options.threads;
  workers = static_cast<unsigned>(std::clamp<std::uint64_t>(workers, 1, chunks));
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t c; (c = next.fetch_add(1)) < chunks;)
      results[c] = scan_chunk(q, geo, pi, c * chunk, chunk, kernels);
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned t = 0; t < workers; ++t) pool.emplace_back(work);
  }

  ChunkBest merged;
  for (const ChunkBest& r : results) {
    if (r.strict.set) merged.strict.offer_min(r.strict.value, r.strict.mask);
    if (r.closed.set) merged.closed.offer_min(r.closed.value, r.closed.mask);
    if (r.sup.set) merged.sup.offer_max(r.sup.value, r.sup.mask);
  }

  ExactExtremes ex;
  if (merged.strict.set)
    ex.inf_strict = finish(q, pi, merged.strict, n, CutMode::exact, SubsetFamily::strict_half);
  ex.inf_closed = finish(q, pi, merged.closed, n, CutMode::exact, SubsetFamily::closed_half);
  ex.sup_all = finish(q, pi, merged.sup, n, CutMode::exact, SubsetFamily::all_proper);
  return ex;
}

// ---------------------------------------------------------------------------
// Heuristics

SweepBounds sweep_cut_bound(const MarkovChain& chain, std::uint64_t n, SubsetFamily inf_family) {
  require_inf_family(inf_family);
  if (!chain.reversible())
    throw Error(ErrorCode::NotReversible, "sweep cuts need the symmetrized kernel");
  EigenOptions eo;
  eo.vectors = true;
  const SpectrumReport spec = spectrum(chain, eo);
  const Matrix& f = *spec.eigenfunctions;
  const std::size_t size = chain.size();
  const Matrix q = n_step_flow(chain, n);
  const CutGeometry geo(q);
  const auto pi = chain.pi();

  auto order_by = [&](std::size_t row) {
    std::vector<std::size_t> order(size);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return f(row, a) < f(row, b); });
    return order;
  };

  SweepBounds out;
  bool have_inf = false, have_sup = false;
  CutReport unused_inf;
  bool unused_have = false;
  scan_prefixes(q, geo, pi, order_by(1), inf_family, n, out.inf_bound, have_inf, out.sup_bound,
                have_sup);
  scan_prefixes(q, geo, pi, order_by(size - 1), inf_family, n, unused_inf, unused_have,
                out.sup_bound, have_sup);
  if (!have_inf)
    throw Error(ErrorCode::EmptyFamily, "no sweep prefix lies in the " +
                                            std::string(family_name(inf_family)) + " family");
  out.inf_bound.value = k_of_set(q, out.inf_bound.witness);
  out.sup_bound.value = k_of_set(q, out.sup_bound.witness);
  return out;
}

CutReport local_search_bound(const MarkovChain& chain, std::uint64_t n, Objective objective,
                             std::uint64_t seed, int restarts, SubsetFamily inf_family) {
  require_inf_family(inf_family);
  if (restarts < 1) throw Error(ErrorCode::BadParams, "restarts must be positive");
  const std::size_t size = chain.size();
  const Matrix q = n_step_flow(chain, n);
  const CutGeometry geo(q);
  const auto pi = chain.pi();
  const simd::Kernels& kernels = simd::best_kernels();
  const SubsetFamily family = objective == Objective::min ? inf_family : SubsetFamily::all_proper;

  CutReport best;
  bool have_best = false;
  const double sign = objective == Objective::min ? 1.0 : -1.0;  // minimize sign * value

  for (int r = 0; r < restarts; ++r) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(r))));
    auto words = empty_words(size);
    std::size_t members = 0;
    for (std::size_t i = 0; i < size; ++i)
      if (rng() >> 63) {
        flip(words, i);
        ++members;
      }
    if (members == 0 || members == size) {
      const auto s = static_cast<std::size_t>(rng() % size);
      members += test(words, s) ? -1 : 1;
      flip(words, s);
    }

    double in_mass = 0.0, out_mass = 0.0;
    for (std::size_t i = 0; i < size; ++i) (test(words, i) ? in_mass : out_mass) += pi[i];
    auto admissible = [&](double in_m, double out_m) {
      return in_m > 0.0 && out_m > 0.0 && in_family(std::min(in_m, out_m), family);
    };
    auto exact = [&] {
      return flow_out(q, StateSubset::from_indicator(pi, to_indicator(words, size)));
    };
    double flow = exact();
    double score = admissible(in_mass, out_mass)
                       ? sign * flow / (in_mass * out_mass)
                       : std::numeric_limits<double>::infinity();

    for (std::size_t iter = 0; iter < 100 * size; ++iter) {
      std::size_t move = size;
      double move_score = score;
      for (std::size_t s = 0; s < size; ++s) {
        const bool inside = test(words, s);
        // Properness is decided by count; the running masses can drift.
        if (inside && members == 1) continue;
        if (!inside && members + 1 == size) continue;
        double f, im, om;
        if (inside) {
          flip(words, s);
          f = flow - geo.insert_delta(s, words.data(), kernels);
          flip(words, s);
          im = in_mass - pi[s];
          om = out_mass + pi[s];
        } else {
          f = flow + geo.insert_delta(s, words.data(), kernels);
          im = in_mass + pi[s];
          om = out_mass - pi[s];
        }
        if (!admissible(im, om)) continue;
        const double cand = sign * std::max(f, 0.0) / (im * om);
        if (cand < move_score - 1e-15) {
          move_score = cand;
          move = s;
        }
      }
      if (move == size) break;
      const bool inside = test(words, move);
      flip(words, move);
      members += inside ? -1 : 1;
      in_mass += inside ? -pi[move] : pi[move];
      out_mass += inside ? pi[move] : -pi[move];
      flow = exact();
      score = move_score;
    }
    if (!admissible(in_mass, out_mass)) continue;

    const StateSubset current = StateSubset::from_indicator(pi, to_indicator(words, size));
    const StateSubset witness =
        objective == Objective::min ? lighter_side(current, pi) : canonical_side(current, pi);
    const double v = k_of_set(q, witness);
    if (better(v, witness, best, have_best, objective)) {
      best = {v, witness, n, CutMode::local_search_heuristic, family};
      have_best = true;
    }
  }
  if (!have_best)
    throw Error(ErrorCode::EmptyFamily, "local search found no set in the " +
                                            std::string(family_name(family)) + " family");
  return best;
}

// ---------------------------------------------------------------------------
// Front ends

CutReport k_inf(const MarkovChain& chain, std::uint64_t n, SubsetFamily family,
                const CutOptions& options) {
  require_inf_family(family);
  if (use_exact(chain, options)) {
    ExactExtremes ex = enumerate_extremes(chain, n, options);
    if (family == SubsetFamily::closed_half) return ex.inf_closed;
    if (!ex.inf_strict)
      throw Error(ErrorCode::EmptyFamily,
                  "every proper subset has mass 1/2; closed-half value is " +
                      std::to_string(ex.inf_closed.value));
    return *ex.inf_strict;
  }
  CutReport best = local_search_bound(chain, n, Objective::min, options.seed, options.restarts, family);
  if (chain.reversible()) {
    try {
      CutReport sweep = sweep_cut_bound(chain, n, family).inf_bound;
      if (sweep.value <= best.value) best = sweep;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyFamily) throw;
    }
  }
  return best;
}

CutReport K_sup(const MarkovChain& chain, const CutOptions& options) {
  if (use_exact(chain, options)) return enumerate_extremes(chain, 1, options).sup_all;
  CutReport best = local_search_bound(chain, 1, Objective::max, options.seed, options.restarts);
  if (chain.reversible()) {
    CutReport sweep = sweep_cut_bound(chain, 1).sup_bound;
    if (sweep.value >= best.value) best = sweep;
  }
  return best;
}

}  // namespace l2gap
