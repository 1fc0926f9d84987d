#include "schedrate/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "schedrate/errors.hpp"

namespace schedrate {

namespace {

void check_probability_vector(const std::vector<double>& p, const std::string& what) {
  double sum = 0.0;
  for (double x : p) {
    if (!(x >= 0.0) || !std::isfinite(x)) {
      throw DomainError(what + " has a negative or non-finite entry");
    }
    sum += x;
  }
  if (std::abs(sum - 1.0) > kStochasticTolerance) {
    std::ostringstream os;
    os.precision(17);
    os << what << " sums to " << sum << ", expected 1";
    throw DomainError(os.str());
  }
}

void check_distinct(const std::vector<std::string>& symbols) {
  if (symbols.empty()) throw DomainError("job process needs at least one symbol");
  std::vector<std::string> sorted = symbols;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw DomainError("job process lists a symbol more than once");
  }
}

bool is_irreducible(const std::vector<std::vector<double>>& transition) {
  const std::size_t k = transition.size();
  for (std::size_t start = 0; start < k; ++start) {
    std::vector<char> seen(k, 0);
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (std::size_t v = 0; v < k; ++v) {
        if (transition[u][v] > 0.0 && !seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    if (count != k) return false;
  }
  return true;
}

std::vector<std::size_t> permutation_to(const std::vector<std::string>& from, const std::vector<std::string>& to) {
  if (from.size() != to.size()) throw DomainError("reorder: symbol sets differ in size");
  std::vector<std::size_t> perm(to.size());
  for (std::size_t i = 0; i < to.size(); ++i) {
    auto it = std::find(from.begin(), from.end(), to[i]);
    if (it == from.end()) throw DomainError("reorder: symbol '" + to[i] + "' not in process");
    perm[i] = static_cast<std::size_t>(it - from.begin());
  }
  return perm;
}

}  // namespace

IIDModel::IIDModel(std::vector<std::string> symbols, std::vector<double> probs)
    : symbols_(std::move(symbols)), probs_(std::move(probs)) {
  check_distinct(symbols_);
  if (symbols_.size() != probs_.size()) throw DomainError("i.i.d. model: symbol and probability counts differ");
  check_probability_vector(probs_, "i.i.d. probability vector");
}

IIDModel IIDModel::over(const JobAlphabet& alphabet, const std::map<std::string, double>& probs) {
  std::vector<double> p(alphabet.size(), 0.0);
  for (const auto& [symbol, prob] : probs) p[alphabet.index_of(symbol)] = prob;
  return IIDModel(alphabet.symbols(), std::move(p));
}

MarkovModel::MarkovModel(std::vector<std::string> symbols, std::vector<std::vector<double>> transition,
                         std::vector<double> initial)
    : symbols_(std::move(symbols)), transition_(std::move(transition)), initial_(std::move(initial)) {
  check_distinct(symbols_);
  const auto k = symbols_.size();
  if (transition_.size() != k || initial_.size() != k) {
    throw DomainError("Markov model: transition matrix and initial vector must match the symbol count");
  }
  for (std::size_t i = 0; i < k; ++i) {
    if (transition_[i].size() != k) throw DomainError("Markov model: transition row '" + symbols_[i] + "' has wrong length");
    check_probability_vector(transition_[i], "transition row '" + symbols_[i] + "'");
  }
  check_probability_vector(initial_, "initial distribution");
  if (!is_irreducible(transition_)) throw DomainError("Markov model: chain is reducible");
}

MixtureModel::MixtureModel(std::vector<double> weights, std::vector<JobProcess> components)
    : weights_(std::move(weights)) {
  if (weights_.size() < 2) throw DomainError("mixture needs at least two components");
  if (weights_.size() != components.size()) throw DomainError("mixture: weight and component counts differ");
  for (double w : weights_) {
    if (!(w > 0.0)) throw DomainError("mixture weights must be positive");
  }
  check_probability_vector(weights_, "mixture weight vector");
  symbols_ = components.front().symbols();
  for (auto& c : components) {
    if (c.symbols() != symbols_) {
      auto a = c.symbols();
      auto b = symbols_;
      std::sort(a.begin(), a.end());
      std::sort(b.begin(), b.end());
      if (a != b) throw DomainError("mixture components must share one alphabet");
      c = c.reordered(symbols_);
    }
    components_.push_back(std::make_shared<const JobProcess>(std::move(c)));
  }
}

bool operator==(const MixtureModel& a, const MixtureModel& b) {
  if (a.weights_ != b.weights_ || a.symbols_ != b.symbols_) return false;
  for (std::size_t i = 0; i < a.components_.size(); ++i) {
    if (!(*a.components_[i] == *b.components_[i])) return false;
  }
  return true;
}

const std::vector<std::string>& JobProcess::symbols() const {
  return std::visit([](const auto& m) -> const std::vector<std::string>& { return m.symbols(); }, model_);
}

std::vector<std::pair<double, JobProcess>> JobProcess::flattened() const {
  std::vector<std::pair<double, JobProcess>> out;
  if (const auto* mix = as_mixture()) {
    for (std::size_t i = 0; i < mix->size(); ++i) {
      for (auto& [w, leaf] : mix->component(i).flattened()) out.emplace_back(mix->weights()[i] * w, std::move(leaf));
    }
  } else {
    out.emplace_back(1.0, *this);
  }
  return out;
}

JobProcess JobProcess::reordered(const std::vector<std::string>& order) const {
  auto perm = permutation_to(symbols(), order);
  return std::visit(
      [&](const auto& m) -> JobProcess {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, IIDModel>) {
          std::vector<double> p(perm.size());
          for (std::size_t i = 0; i < perm.size(); ++i) p[i] = m.probs()[perm[i]];
          return IIDModel(order, std::move(p));
        } else if constexpr (std::is_same_v<M, MarkovModel>) {
          std::vector<std::vector<double>> t(perm.size(), std::vector<double>(perm.size()));
          std::vector<double> init(perm.size());
          for (std::size_t i = 0; i < perm.size(); ++i) {
            init[i] = m.initial()[perm[i]];
            for (std::size_t j = 0; j < perm.size(); ++j) t[i][j] = m.transition()[perm[i]][perm[j]];
          }
          return MarkovModel(order, std::move(t), std::move(init));
        } else {
          std::vector<JobProcess> comps;
          for (std::size_t i = 0; i < m.size(); ++i) comps.push_back(m.component(i).reordered(order));
          return MixtureModel(m.weights(), std::move(comps));
        }
      },
      model_);
}

SumDistribution::SumDistribution(std::int64_t n, std::int64_t min_sum, std::vector<double> mass,
                                 std::vector<char> reachable)
    : n_(n), min_sum_(min_sum), mass_(std::move(mass)), reachable_(std::move(reachable)) {
  if (mass_.empty() || mass_.size() != reachable_.size()) throw DomainError("sum distribution: malformed table");
  const auto k = mass_.size();
  upper_.assign(k + 1, 0.0);
  for (std::size_t i = k; i-- > 0;) upper_[i] = upper_[i + 1] + mass_[i];
  lower_.assign(k, 0.0);
  double acc = 0.0;
  for (std::size_t i = 0; i < k; ++i) lower_[i] = (acc += mass_[i]);
}

double SumDistribution::probability(std::int64_t s) const {
  if (s < min_sum_ || s > max_sum()) return 0.0;
  return mass_[static_cast<std::size_t>(s - min_sum_)];
}

bool SumDistribution::reachable(std::int64_t s) const {
  if (s < min_sum_ || s > max_sum()) return false;
  return reachable_[static_cast<std::size_t>(s - min_sum_)] != 0;
}

double SumDistribution::tail_greater(std::int64_t s) const {
  if (s < min_sum_) return upper_.front();
  if (s >= max_sum()) return 0.0;
  return upper_[static_cast<std::size_t>(s - min_sum_ + 1)];
}

double SumDistribution::tail_less(std::int64_t s) const {
  if (s <= min_sum_) return 0.0;
  if (s > max_sum()) return lower_.back();
  return lower_[static_cast<std::size_t>(s - min_sum_ - 1)];
}

double SumDistribution::total_mass() const { return upper_.front(); }

double SumDistribution::mean() const {
  double acc = 0.0;
  for (std::size_t i = 0; i < mass_.size(); ++i) acc += mass_[i] * static_cast<double>(min_sum_ + static_cast<std::int64_t>(i));
  return acc;
}

std::vector<std::int64_t> SumDistribution::support() const {
  std::vector<std::int64_t> out;
  for (std::size_t i = 0; i < reachable_.size(); ++i) {
    if (reachable_[i]) out.push_back(min_sum_ + static_cast<std::int64_t>(i));
  }
  return out;
}

std::optional<std::int64_t> SumDistribution::max_reachable_at_most(std::int64_t s) const {
  if (s < min_sum_) return std::nullopt;
  auto i = static_cast<std::size_t>(std::min(s, max_sum()) - min_sum_);
  for (;; --i) {
    if (reachable_[i]) return min_sum_ + static_cast<std::int64_t>(i);
    if (i == 0) return std::nullopt;
  }
}

namespace {

struct SumRange {
  std::int64_t lo;
  std::int64_t hi;
  std::size_t width() const { return static_cast<std::size_t>(hi - lo + 1); }
};

SumRange checked_range(const JobAlphabet& alphabet, std::int64_t n) {
  if (n < 1) throw DomainError("sum distribution needs n >= 1, got " + std::to_string(n));
  if (n > std::numeric_limits<std::int64_t>::max() / alphabet.t_max()) {
    throw DomainError("n * T_max overflows 64-bit integers at n = " + std::to_string(n));
  }
  SumRange r{n * alphabet.t_min(), n * alphabet.t_max()};
  if (r.hi - r.lo + 1 > kMaxSumSpan) {
    throw ResourceError("sum distribution table for n = " + std::to_string(n) + " exceeds " +
                        std::to_string(kMaxSumSpan) + " entries");
  }
  return r;
}

SumDistribution iid_sum_distribution(const IIDModel& model, const JobAlphabet& alphabet, std::int64_t n) {
  const SumRange range = checked_range(alphabet, n);
  const auto& p = model.probs();
  const std::int64_t t_min = alphabet.t_min();
  // Offsets relative to k * t_min after k jobs.
  std::vector<std::pair<std::size_t, double>> steps;
  for (SymbolIndex j = 0; j < alphabet.size(); ++j) {
    if (p[j] > 0.0) steps.emplace_back(static_cast<std::size_t>(alphabet.time(j) - t_min), p[j]);
  }
  std::vector<double> cur(range.width(), 0.0), next(range.width(), 0.0);
  std::vector<char> reach(range.width(), 0), next_reach(range.width(), 0);
  cur[0] = 1.0;
  reach[0] = 1;
  const auto delta = static_cast<std::size_t>(alphabet.t_max() - t_min);
  std::size_t used = 1;  // cells [0, used) may be nonzero
  for (std::int64_t k = 0; k < n; ++k) {
    const std::size_t next_used = used + delta;
    std::fill(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(next_used), 0.0);
    std::fill(next_reach.begin(), next_reach.begin() + static_cast<std::ptrdiff_t>(next_used), 0);
    for (std::size_t s = 0; s < used; ++s) {
      if (!reach[s]) continue;
      const double m = cur[s];
      for (const auto& [off, prob] : steps) {
        next[s + off] += m * prob;
        next_reach[s + off] = 1;
      }
    }
    std::swap(cur, next);
    std::swap(reach, next_reach);
    used = next_used;
  }
  return SumDistribution(n, range.lo, std::move(cur), std::move(reach));
}

SumDistribution markov_sum_distribution(const MarkovModel& model, const JobAlphabet& alphabet, std::int64_t n) {
  const SumRange range = checked_range(alphabet, n);
  const std::size_t k = alphabet.size();
  const std::int64_t t_min = alphabet.t_min();
  const auto width = range.width();
  std::vector<std::size_t> off(k);
  for (SymbolIndex j = 0; j < k; ++j) off[j] = static_cast<std::size_t>(alphabet.time(j) - t_min);

  // dp[state][sum offset] after the first job.
  std::vector<std::vector<double>> cur(k, std::vector<double>(width, 0.0)), next = cur;
  std::vector<std::vector<char>> reach(k, std::vector<char>(width, 0)), next_reach = reach;
  for (SymbolIndex j = 0; j < k; ++j) {
    if (model.initial()[j] > 0.0) {
      cur[j][off[j]] = model.initial()[j];
      reach[j][off[j]] = 1;
    }
  }
  const auto delta = static_cast<std::size_t>(alphabet.t_max() - t_min);
  std::size_t used = delta + 1;
  for (std::int64_t step = 1; step < n; ++step) {
    const std::size_t next_used = used + delta;
    for (SymbolIndex j = 0; j < k; ++j) {
      std::fill(next[j].begin(), next[j].begin() + static_cast<std::ptrdiff_t>(next_used), 0.0);
      std::fill(next_reach[j].begin(), next_reach[j].begin() + static_cast<std::ptrdiff_t>(next_used), 0);
    }
    for (SymbolIndex from = 0; from < k; ++from) {
      const auto& row = model.transition()[from];
      for (std::size_t s = 0; s < used; ++s) {
        if (!reach[from][s]) continue;
        const double m = cur[from][s];
        for (SymbolIndex to = 0; to < k; ++to) {
          if (row[to] <= 0.0) continue;
          next[to][s + off[to]] += m * row[to];
          next_reach[to][s + off[to]] = 1;
        }
      }
    }
    std::swap(cur, next);
    std::swap(reach, next_reach);
    used = next_used;
  }
  std::vector<double> mass(width, 0.0);
  std::vector<char> reachable(width, 0);
  for (SymbolIndex j = 0; j < k; ++j) {
    for (std::size_t s = 0; s < width; ++s) {
      mass[s] += cur[j][s];
      reachable[s] = static_cast<char>(reachable[s] | reach[j][s]);
    }
  }
  return SumDistribution(n, range.lo, std::move(mass), std::move(reachable));
}

SumDistribution sum_distribution_aligned(const JobProcess& process, const JobAlphabet& alphabet, std::int64_t n) {
  if (const auto* iid = process.as_iid()) return iid_sum_distribution(*iid, alphabet, n);
  if (const auto* markov = process.as_markov()) return markov_sum_distribution(*markov, alphabet, n);
  const auto& mix = *process.as_mixture();
  const SumRange range = checked_range(alphabet, n);
  std::vector<double> mass(range.width(), 0.0);
  std::vector<char> reachable(range.width(), 0);
  for (std::size_t i = 0; i < mix.size(); ++i) {
    auto part = sum_distribution_aligned(mix.component(i), alphabet, n);
    const double w = mix.weights()[i];
    for (std::size_t s = 0; s < mass.size(); ++s) {
      mass[s] += w * part.masses()[s];
      reachable[s] = static_cast<char>(reachable[s] | (part.reachable(range.lo + static_cast<std::int64_t>(s)) ? 1 : 0));
    }
  }
  return SumDistribution(n, range.lo, std::move(mass), std::move(reachable));
}

JobProcess aligned(const JobProcess& process, const JobAlphabet& alphabet) {
  if (process.symbols() == alphabet.symbols()) return process;
  return process.reordered(alphabet.symbols());
}

}  // namespace

SumDistribution sum_distribution(const JobProcess& process, const JobAlphabet& alphabet, std::int64_t n) {
  if (process.symbols() == alphabet.symbols()) return sum_distribution_aligned(process, alphabet, n);
  return sum_distribution_aligned(aligned(process, alphabet), alphabet, n);
}

std::uint64_t stream_seed(std::uint64_t master_seed, std::uint64_t worker, std::uint64_t trial) {
  // SplitMix64 finalizer applied to a mix of the three inputs.
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(mix(master_seed) ^ worker) ^ (trial * 0xd1342543de82ef95ULL));
}

namespace {

void sample_into(const JobProcess& process, std::int64_t n, std::mt19937_64& rng, std::vector<SymbolIndex>& out) {
  if (const auto* iid = process.as_iid()) {
    std::discrete_distribution<SymbolIndex> pick(iid->probs().begin(), iid->probs().end());
    for (std::int64_t i = 0; i < n; ++i) out.push_back(pick(rng));
    return;
  }
  if (const auto* markov = process.as_markov()) {
    std::discrete_distribution<SymbolIndex> first(markov->initial().begin(), markov->initial().end());
    std::vector<std::discrete_distribution<SymbolIndex>> rows;
    rows.reserve(markov->transition().size());
    for (const auto& row : markov->transition()) rows.emplace_back(row.begin(), row.end());
    SymbolIndex state = first(rng);
    out.push_back(state);
    for (std::int64_t i = 1; i < n; ++i) {
      state = rows[state](rng);
      out.push_back(state);
    }
    return;
  }
  const auto& mix = *process.as_mixture();
  std::discrete_distribution<std::size_t> which(mix.weights().begin(), mix.weights().end());
  sample_into(mix.component(which(rng)), n, rng, out);
}

}  // namespace

JobSequence sample_sequence(const JobProcess& process, const JobAlphabet& alphabet, std::int64_t n,
                            std::uint64_t seed) {
  if (n < 1) throw DomainError("sample_sequence needs n >= 1");
  const JobProcess local = aligned(process, alphabet);
  std::mt19937_64 rng(seed);
  std::vector<SymbolIndex> items;
  items.reserve(static_cast<std::size_t>(n));
  sample_into(local, n, rng, items);
  return JobSequence(std::move(items), alphabet);
}

std::vector<double> stationary_distribution(const MarkovModel& model) {
  const auto k = static_cast<Eigen::Index>(model.symbols().size());
  Eigen::MatrixXd a(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) {
      a(i, j) = model.transition()[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] - (i == j ? 1.0 : 0.0);
    }
  }
  // Replace the last balance equation by the normalization constraint.
  a.row(k - 1).setOnes();
  Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
  b(k - 1) = 1.0;
  Eigen::VectorXd pi = a.fullPivLu().solve(b);

  std::vector<double> out(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = std::max(0.0, pi(i));
  const double total = std::accumulate(out.begin(), out.end(), 0.0);
  for (double& x : out) x /= total;

  double residual = 0.0;
  for (std::size_t j = 0; j < out.size(); ++j) {
    double flow = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) flow += out[i] * model.transition()[i][j];
    residual = std::max(residual, std::abs(flow - out[j]));
  }
  if (!(residual <= 1e-10)) {
    std::ostringstream os;
    os << "stationary distribution solve failed, residual " << residual;
    throw NumericError(os.str());
  }
  return out;
}

namespace {

std::vector<double> leaf_symbol_law(const JobProcess& leaf) {
  if (const auto* iid = leaf.as_iid()) return iid->probs();
  return stationary_distribution(*leaf.as_markov());
}

double mean_under(const std::vector<double>& law, const JobAlphabet& alphabet) {
  double acc = 0.0;
  for (SymbolIndex j = 0; j < law.size(); ++j) acc += law[j] * static_cast<double>(alphabet.time(j));
  return acc;
}

const IIDModel& require_iid(const JobProcess& process, const char* what) {
  const auto* iid = process.as_iid();
  if (iid == nullptr) {
    throw DomainError(std::string(what) +
                      " is defined for i.i.d. processes only; apply it to each mixture component separately");
  }
  return *iid;
}

}  // namespace

std::vector<double> expected_processing_time(const JobProcess& process, const JobAlphabet& alphabet) {
  std::vector<double> out;
  for (const auto& [weight, leaf] : aligned(process, alphabet).flattened()) {
    out.push_back(mean_under(leaf_symbol_law(leaf), alphabet));
  }
  return out;
}

double variance_processing_time(const JobProcess& process, const JobAlphabet& alphabet) {
  const JobProcess local = aligned(process, alphabet);
  const auto& p = require_iid(local, "variance_processing_time").probs();
  const double mu = mean_under(p, alphabet);
  double acc = 0.0;
  for (SymbolIndex j = 0; j < p.size(); ++j) {
    const double d = static_cast<double>(alphabet.time(j)) - mu;
    acc += p[j] * d * d;
  }
  return acc;
}

double third_abs_central_moment(const JobProcess& process, const JobAlphabet& alphabet) {
  const JobProcess local = aligned(process, alphabet);
  const auto& p = require_iid(local, "third_abs_central_moment").probs();
  const double mu = mean_under(p, alphabet);
  double acc = 0.0;
  for (SymbolIndex j = 0; j < p.size(); ++j) {
    const double d = std::abs(static_cast<double>(alphabet.time(j)) - mu);
    acc += p[j] * d * d * d;
  }
  return acc;
}

}  // namespace schedrate
