#include "schedrate/schedulers.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "schedrate/errors.hpp"

namespace schedrate {

Strategy parse_strategy(std::string_view name) {
  if (name == "brute-force") return Strategy::BruteForce;
  if (name == "eft") return Strategy::EarliestFinishTime;
  if (name == "lpt") return Strategy::LPT;
  throw DomainError("unknown scheduler '" + std::string(name) + "' (expected brute-force, eft or lpt)");
}

std::string_view strategy_name(Strategy s) {
  switch (s) {
    case Strategy::BruteForce: return "brute-force";
    case Strategy::EarliestFinishTime: return "eft";
    case Strategy::LPT: return "lpt";
  }
  return "?";
}

namespace {

std::uint64_t saturating_pow(std::uint64_t base, std::uint64_t exp) {
  std::uint64_t r = 1;
  for (std::uint64_t i = 0; i < exp; ++i) {
    if (base != 0 && r > std::numeric_limits<std::uint64_t>::max() / base) return std::numeric_limits<std::uint64_t>::max();
    r *= base;
  }
  return r;
}

// a_load / v_a < b_load / v_b with v = weight / common denominator.
bool finishes_before(std::int64_t a_load, std::int64_t a_weight, std::int64_t b_load, std::int64_t b_weight) {
  return static_cast<__int128>(a_load) * b_weight < static_cast<__int128>(b_load) * a_weight;
}

struct BruteForceSearch {
  const std::vector<std::int64_t>& times;       // per position
  const std::vector<std::int64_t>& weights;     // per machine
  const std::vector<std::size_t>& group_first;  // lowest index among machines of equal speed
  std::vector<std::int64_t> loads;
  std::vector<MachineIndex> current;
  std::vector<MachineIndex> best;
  bool have_best = false;
  std::int64_t best_load = 0;
  std::int64_t best_weight = 1;
  std::int64_t floor_load = 0;  // T_n
  std::int64_t floor_weight = 1;  // v_sum in weight units
  bool done = false;

  bool at_least_best(std::int64_t load, std::int64_t weight) const {
    return have_best && !finishes_before(load, weight, best_load, best_weight);
  }

  void run(std::size_t pos, std::size_t worst) {
    if (done) return;
    if (pos == times.size()) {
      best = current;
      best_load = loads[worst];
      best_weight = weights[worst];
      have_best = true;
      // Nothing can beat T_n / v_sum.
      if (!finishes_before(floor_load, floor_weight, best_load, best_weight)) done = true;
      return;
    }
    const std::int64_t t = times[pos];
    for (MachineIndex i = 0; i < loads.size(); ++i) {
      // Equal-speed machines are interchangeable: only open the first empty one.
      if (loads[i] == 0 && group_first[i] != i) {
        bool earlier_empty = false;
        for (std::size_t k = group_first[i]; k < i; ++k) {
          if (weights[k] == weights[i] && loads[k] == 0) {
            earlier_empty = true;
            break;
          }
        }
        if (earlier_empty) continue;
      }
      loads[i] += t;
      std::size_t new_worst = finishes_before(loads[worst], weights[worst], loads[i], weights[i]) ? i : worst;
      if (!at_least_best(loads[new_worst], weights[new_worst])) {
        current[pos] = i;
        run(pos + 1, new_worst);
      }
      loads[i] -= t;
      if (done) return;
    }
  }
};

Assignment eft_in_order(const JobSequence& seq, const std::vector<std::size_t>& order, const JobAlphabet& alphabet,
                        const MachineSet& machines) {
  const auto& w = machines.integer_weights();
  std::vector<std::int64_t> loads(machines.size(), 0);
  Assignment out{std::vector<MachineIndex>(seq.size(), 0)};
  for (auto pos : order) {
    const std::int64_t t = alphabet.time(seq[pos]);
    MachineIndex pick = 0;
    for (MachineIndex i = 1; i < loads.size(); ++i) {
      if (finishes_before(loads[i] + t, w[i], loads[pick] + t, w[pick])) pick = i;
    }
    loads[pick] += t;
    out.machine_of[pos] = pick;
  }
  return out;
}

}  // namespace

OptimalSchedule brute_force_optimal(const JobSequence& seq, const JobAlphabet& alphabet, const MachineSet& machines,
                                    std::uint64_t budget) {
  const auto leaves = saturating_pow(machines.size(), seq.size());
  if (leaves > budget) {
    throw ResourceError("brute force needs m^n = " + std::to_string(machines.size()) + "^" +
                        std::to_string(seq.size()) + " assignments, budget is " + std::to_string(budget) +
                        "; use the eft scheduler instead");
  }
  std::vector<std::int64_t> times;
  times.reserve(seq.size());
  for (auto j : seq.items()) times.push_back(alphabet.time(j));
  const auto& w = machines.integer_weights();
  std::vector<std::size_t> group_first(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    group_first[i] = i;
    for (std::size_t k = 0; k < i; ++k) {
      if (w[k] == w[i]) {
        group_first[i] = k;
        break;
      }
    }
  }
  BruteForceSearch search{times, w, group_first, std::vector<std::int64_t>(w.size(), 0),
                          std::vector<MachineIndex>(seq.size(), 0), {}};
  search.floor_load = std::accumulate(times.begin(), times.end(), std::int64_t{0});
  search.floor_weight = std::accumulate(w.begin(), w.end(), std::int64_t{0});
  search.run(0, 0);
  Assignment a{std::move(search.best)};
  Rational span = makespan(a, seq, alphabet, machines);
  return {std::move(a), span};
}

Assignment eft_list_schedule(const JobSequence& seq, const JobAlphabet& alphabet, const MachineSet& machines) {
  std::vector<std::size_t> order(seq.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return eft_in_order(seq, order, alphabet, machines);
}

Assignment lpt_schedule(const JobSequence& seq, const JobAlphabet& alphabet, const MachineSet& machines) {
  std::vector<std::size_t> order(seq.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto ta = alphabet.time(seq[a]);
    const auto tb = alphabet.time(seq[b]);
    if (ta != tb) return ta > tb;
    return seq[a] < seq[b];
  });
  return eft_in_order(seq, order, alphabet, machines);
}

Assignment Scheduler::assign(const JobSequence& seq, const JobAlphabet& alphabet, const MachineSet& machines) const {
  switch (strategy) {
    case Strategy::BruteForce: return brute_force_optimal(seq, alphabet, machines, budget).assignment;
    case Strategy::EarliestFinishTime: return eft_list_schedule(seq, alphabet, machines);
    case Strategy::LPT: return lpt_schedule(seq, alphabet, machines);
  }
  throw DomainError("unknown scheduling strategy");
}

Rational Scheduler::span(const JobSequence& seq, const JobAlphabet& alphabet, const MachineSet& machines) const {
  if (strategy == Strategy::BruteForce) return brute_force_optimal(seq, alphabet, machines, budget).makespan;
  return makespan(assign(seq, alphabet, machines), seq, alphabet, machines);
}

ThresholdDiscardSet::ThresholdDiscardSet(std::int64_t n, Rational alpha) : n_(n), alpha_(alpha) {
  if (n_ < 1) throw DomainError("discard set needs n >= 1");
  if (alpha_ < 0) throw DomainError("discard threshold alpha must be non-negative");
}

std::int64_t ThresholdDiscardSet::max_kept_sum(const MachineSet& machines) const {
  return floor(Rational(n_) * machines.v_sum() * alpha_);
}

bool ThresholdDiscardSet::discards(std::int64_t total_time, const MachineSet& machines) const {
  return total_time > max_kept_sum(machines);
}

bool ThresholdDiscardSet::kept_nonempty(const JobAlphabet& alphabet, const MachineSet& machines) const {
  return !discards(n_ * alphabet.t_min(), machines);
}

std::uint64_t cost_enumeration_size(const Scheduler& scheduler, std::int64_t n, const JobAlphabet& alphabet) {
  const auto k = static_cast<std::uint64_t>(alphabet.size());
  const auto nn = static_cast<std::uint64_t>(n);
  if (!scheduler.order_invariant()) return saturating_pow(k, nn);
  // C(n + k - 1, k - 1)
  unsigned __int128 c = 1;
  for (std::uint64_t i = 1; i < k; ++i) {
    c = c * (nn + i) / i;
    if (c > std::numeric_limits<std::uint64_t>::max()) return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(c);
}

namespace {

struct CostSearch {
  const Scheduler& scheduler;
  const JobAlphabet& alphabet;
  const MachineSet& machines;
  std::int64_t n;
  std::int64_t max_sum;
  std::vector<std::int64_t> counts;
  std::vector<SymbolIndex> items;
  bool have = false;
  Rational worst{0};

  void evaluate(const std::vector<SymbolIndex>& seq_items) {
    JobSequence seq(seq_items, alphabet);
    Rational span = scheduler.span(seq, alphabet, machines);
    if (!have || span > worst) {
      worst = span;
      have = true;
    }
  }

  // Multisets: counts per symbol, canonical sequence in alphabet order.
  void multisets(SymbolIndex j, std::int64_t remaining, std::int64_t sum) {
    if (j + 1 == alphabet.size()) {
      if (sum + remaining * alphabet.time(j) > max_sum) return;
      counts[j] = remaining;
      items.clear();
      for (SymbolIndex s = 0; s < alphabet.size(); ++s) items.insert(items.end(), static_cast<std::size_t>(counts[s]), s);
      evaluate(items);
      return;
    }
    for (std::int64_t c = 0; c <= remaining; ++c) {
      const std::int64_t s = sum + c * alphabet.time(j);
      // Cheapest completion uses T_min for the rest.
      if (s + (remaining - c) * alphabet.t_min() > max_sum) break;
      counts[j] = c;
      multisets(j + 1, remaining - c, s);
    }
  }

  void sequences(std::size_t pos, std::int64_t sum) {
    const auto left = static_cast<std::int64_t>(static_cast<std::size_t>(n) - pos);
    if (sum + left * alphabet.t_min() > max_sum) return;
    if (left == 0) {
      evaluate(items);
      return;
    }
    for (SymbolIndex j = 0; j < alphabet.size(); ++j) {
      items[pos] = j;
      sequences(pos + 1, sum + alphabet.time(j));
    }
  }
};

}  // namespace

Rational cost_exact(const Scheduler& scheduler, const ThresholdDiscardSet& discard, const JobAlphabet& alphabet,
                    const MachineSet& machines) {
  if (!discard.kept_nonempty(alphabet, machines)) {
    throw DomainError("discard set at alpha = " + to_string(discard.alpha()) +
                      " removes every sequence; COST over an empty kept set is undefined");
  }
  const auto size = cost_enumeration_size(scheduler, discard.n(), alphabet);
  if (size > scheduler.budget) {
    throw ResourceError("cost enumeration at n = " + std::to_string(discard.n()) + " visits " +
                        (size == std::numeric_limits<std::uint64_t>::max() ? std::string("more than 2^64")
                                                                            : std::to_string(size)) +
                        " items, budget is " + std::to_string(scheduler.budget));
  }
  CostSearch search{scheduler, alphabet, machines, discard.n(), discard.max_kept_sum(machines),
                    std::vector<std::int64_t>(alphabet.size(), 0), {}};
  if (scheduler.order_invariant()) {
    search.multisets(0, discard.n(), 0);
  } else {
    search.items.assign(static_cast<std::size_t>(discard.n()), 0);
    search.sequences(0, 0);
  }
  return search.worst;
}

double discard_probability(const ThresholdDiscardSet& discard, const SchedulingProblem& problem) {
  auto dist = sum_distribution(problem.process(), problem.alphabet(), discard.n());
  return dist.tail_greater(discard.max_kept_sum(problem.machines()));
}

SandwichAudit sandwich_audit(const SchedulingProblem& problem, const Scheduler& scheduler, std::int64_t n,
                             std::int64_t trials, std::uint64_t master_seed) {
  if (trials < 1) throw DomainError("sandwich audit needs at least one trial");
  const auto& alphabet = problem.alphabet();
  const auto& machines = problem.machines();
  const bool optimum_fits = saturating_pow(machines.size(), static_cast<std::uint64_t>(n)) <= scheduler.budget;
  SandwichAudit audit;
  for (std::int64_t t = 0; t < trials; ++t) {
    auto seq = sample_sequence(problem.process(), alphabet, n, stream_seed(master_seed, 0, static_cast<std::uint64_t>(t)));
    const Rational lo = span_lower_bound(seq, alphabet, machines);
    const Rational hi = span_upper_bound(seq, alphabet, machines);
    const Rational span = scheduler.span(seq, alphabet, machines);
    bool ok = lo <= span && span <= hi;
    if (optimum_fits) {
      const Rational opt = brute_force_optimal(seq, alphabet, machines, scheduler.budget).makespan;
      ok = ok && lo <= opt && opt <= hi && opt <= span;
      ++audit.optimum_checked;
    }
    ++audit.samples;
    if (!ok) ++audit.violations;
  }
  return audit;
}

}  // namespace schedrate
