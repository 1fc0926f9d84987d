#include "schedrate/core.hpp"

#include <algorithm>
#include <numeric>

#include "schedrate/errors.hpp"

namespace schedrate {

JobAlphabet::JobAlphabet(std::vector<std::string> symbols, std::vector<std::int64_t> times)
    : symbols_(std::move(symbols)), times_(std::move(times)) {
  if (symbols_.empty()) throw DomainError("job alphabet must contain at least one symbol");
  if (symbols_.size() != times_.size()) {
    throw DomainError("job alphabet: symbol and time lists differ in length");
  }
  for (SymbolIndex i = 0; i < symbols_.size(); ++i) {
    if (times_[i] < 1) {
      throw DomainError("processing time of '" + symbols_[i] + "' must be a positive integer, got " +
                        std::to_string(times_[i]));
    }
    if (!lookup_.emplace(symbols_[i], i).second) {
      throw DomainError("job symbol '" + symbols_[i] + "' defined more than once");
    }
  }
  auto [lo, hi] = std::minmax_element(times_.begin(), times_.end());
  t_min_ = *lo;
  t_max_ = *hi;
}

JobAlphabet::JobAlphabet(std::initializer_list<std::pair<std::string, std::int64_t>> entries)
    : JobAlphabet(
          [&] {
            std::vector<std::string> s;
            for (const auto& e : entries) s.push_back(e.first);
            return s;
          }(),
          [&] {
            std::vector<std::int64_t> t;
            for (const auto& e : entries) t.push_back(e.second);
            return t;
          }()) {}

SymbolIndex JobAlphabet::index_of(const std::string& symbol) const {
  auto it = lookup_.find(symbol);
  if (it == lookup_.end()) throw DomainError("unknown job symbol '" + symbol + "'");
  return it->second;
}

MachineSet::MachineSet(std::vector<Rational> speeds) : speeds_(std::move(speeds)) {
  if (speeds_.empty()) throw DomainError("machine set must contain at least one machine");
  for (std::size_t i = 0; i < speeds_.size(); ++i) {
    if (speeds_[i] <= 0) {
      throw DomainError("speed of machine " + std::to_string(i) + " must be positive, got " +
                        to_string(speeds_[i]));
    }
  }
  v_sum_ = std::accumulate(speeds_.begin(), speeds_.end(), Rational(0));
  auto [lo, hi] = std::minmax_element(speeds_.begin(), speeds_.end());
  v_min_ = *lo;
  v_max_ = *hi;

  denom_ = 1;
  for (const auto& v : speeds_) denom_ = std::lcm(denom_, v.denominator());
  weights_.reserve(speeds_.size());
  for (const auto& v : speeds_) weights_.push_back(v.numerator() * (denom_ / v.denominator()));
}

MachineSet MachineSet::scaled(const Rational& factor) const {
  std::vector<Rational> out;
  out.reserve(speeds_.size());
  for (const auto& v : speeds_) out.push_back(v * factor);
  return MachineSet(std::move(out));
}

JobSequence::JobSequence(std::vector<SymbolIndex> items, const JobAlphabet& alphabet)
    : items_(std::move(items)) {
  if (items_.empty()) throw DomainError("job sequence must contain at least one job");
  for (auto idx : items_) {
    if (idx >= alphabet.size()) {
      throw DomainError("job index " + std::to_string(idx) + " is outside the alphabet");
    }
  }
}

JobSequence JobSequence::from_symbols(const std::vector<std::string>& symbols, const JobAlphabet& alphabet) {
  std::vector<SymbolIndex> items;
  items.reserve(symbols.size());
  for (const auto& s : symbols) items.push_back(alphabet.index_of(s));
  return JobSequence(std::move(items), alphabet);
}

std::int64_t total_processing_time(const JobSequence& seq, const JobAlphabet& alphabet) {
  std::int64_t sum = 0;
  for (auto idx : seq.items()) sum += alphabet.time(idx);
  return sum;
}

std::vector<std::int64_t> machine_loads(const Assignment& assignment, const JobSequence& seq,
                                        const JobAlphabet& alphabet, const MachineSet& machines) {
  if (assignment.machine_of.size() != seq.size()) {
    throw DomainError("assignment covers " + std::to_string(assignment.machine_of.size()) +
                      " jobs but the sequence has " + std::to_string(seq.size()));
  }
  std::vector<std::int64_t> loads(machines.size(), 0);
  for (std::size_t i = 0; i < seq.size(); ++i) {
    auto machine = assignment.machine_of[i];
    if (machine >= machines.size()) {
      throw DomainError("assignment uses machine " + std::to_string(machine) + " but only " +
                        std::to_string(machines.size()) + " exist");
    }
    loads[machine] += alphabet.time(seq[i]);
  }
  return loads;
}

Rational makespan_of_loads(std::span<const std::int64_t> loads, const MachineSet& machines) {
  if (loads.size() != machines.size()) throw DomainError("load vector does not match machine count");
  const auto& w = machines.integer_weights();
  std::size_t worst = 0;
  for (std::size_t i = 1; i < loads.size(); ++i) {
    // loads[i] / w[i] > loads[worst] / w[worst]
    if (static_cast<__int128>(loads[i]) * w[worst] > static_cast<__int128>(loads[worst]) * w[i]) {
      worst = i;
    }
  }
  return Rational(loads[worst]) / machines.speed(worst);
}

Rational makespan(const Assignment& assignment, const JobSequence& seq, const JobAlphabet& alphabet,
                  const MachineSet& machines) {
  auto loads = machine_loads(assignment, seq, alphabet, machines);
  return makespan_of_loads(loads, machines);
}

Rational span_lower_bound(const JobSequence& seq, const JobAlphabet& alphabet, const MachineSet& machines) {
  return Rational(total_processing_time(seq, alphabet)) / machines.v_sum();
}

Rational span_upper_bound(const JobSequence& seq, const JobAlphabet& alphabet, const MachineSet& machines) {
  return span_lower_bound(seq, alphabet, machines) + Rational(alphabet.t_max()) / machines.v_min();
}

std::optional<std::int64_t> max_attainable_sum_at_most(const JobAlphabet& alphabet, std::int64_t n,
                                                       std::int64_t bound) {
  if (n < 1) throw DomainError("sequence length must be >= 1");
  const std::int64_t lo = n * alphabet.t_min();
  const std::int64_t hi = n * alphabet.t_max();
  if (bound < lo) return std::nullopt;
  if (bound >= hi) return hi;
  const auto t_min = alphabet.t_min();
  const auto width = static_cast<std::size_t>(hi - lo + 1);
  std::vector<char> cur(width, 0), next(width, 0);
  cur[0] = 1;
  std::size_t used = 1;
  const auto delta = static_cast<std::size_t>(alphabet.t_max() - t_min);
  for (std::int64_t k = 0; k < n; ++k) {
    std::fill(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(used + delta), 0);
    for (std::size_t s = 0; s < used; ++s) {
      if (!cur[s]) continue;
      for (auto t : alphabet.times()) next[s + static_cast<std::size_t>(t - t_min)] = 1;
    }
    std::swap(cur, next);
    used += delta;
  }
  for (auto s = static_cast<std::size_t>(bound - lo);; --s) {
    if (cur[s]) return lo + static_cast<std::int64_t>(s);
    if (s == 0) break;
  }
  return std::nullopt;
}

CostPerJobBracket lemma1_cost_per_job_bracket(std::int64_t n, const JobAlphabet& alphabet,
                                              const MachineSet& machines) {
  if (n < 1) throw DomainError("lemma 1 bracket needs n >= 1, got " + std::to_string(n));
  const auto m = static_cast<std::int64_t>(machines.size());
  Rational inv_m(1, m);
  Rational ratio(m, n);
  return {inv_m * (Rational(1) - ratio) * Rational(alphabet.t_min()) / machines.v_max(),
          inv_m * (Rational(1) + ratio) * Rational(alphabet.t_max()) / machines.v_min()};
}

}  // namespace schedrate
