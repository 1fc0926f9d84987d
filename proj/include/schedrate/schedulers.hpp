#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include "schedrate/core.hpp"
#include "schedrate/problem.hpp"

namespace schedrate {

enum class Strategy { BruteForce, EarliestFinishTime, LPT };

inline constexpr std::uint64_t kDefaultBudget = 10'000'000;

// "brute-force", "eft", "lpt".
Strategy parse_strategy(std::string_view name);
std::string_view strategy_name(Strategy s);

struct OptimalSchedule {
  Assignment assignment;
  Rational makespan;
};

// Exhaustive search with pruning. Returns the lexicographically smallest
// optimal machine_of vector. ResourceError if m^n exceeds `budget`.
OptimalSchedule brute_force_optimal(const JobSequence& seq, const JobAlphabet& alphabet, const MachineSet& machines,
                                    std::uint64_t budget = kDefaultBudget);

// Each job, in sequence order, goes to the machine that completes it
// earliest (ties: lowest machine index).
Assignment eft_list_schedule(const JobSequence& seq, const JobAlphabet& alphabet, const MachineSet& machines);

// Longest processing time first: stable sort by decreasing time (ties by
// alphabet order), then earliest-finish-time placement.
Assignment lpt_schedule(const JobSequence& seq, const JobAlphabet& alphabet, const MachineSet& machines);

struct Scheduler {
  Strategy strategy = Strategy::EarliestFinishTime;
  // Brute force: max assignments per sequence. Cost evaluation: max
  // sequences or job multisets enumerated.
  std::uint64_t budget = kDefaultBudget;

  Assignment assign(const JobSequence& seq, const JobAlphabet& alphabet, const MachineSet& machines) const;
  Rational span(const JobSequence& seq, const JobAlphabet& alphabet, const MachineSet& machines) const;

  // True when the makespan depends only on the job multiset.
  bool order_invariant() const noexcept { return strategy != Strategy::EarliestFinishTime; }
};

// S_n = { j^n : T_n(j^n) / (n * v_sum) > alpha }, kept by (n, alpha) alone.
class ThresholdDiscardSet {
 public:
  ThresholdDiscardSet(std::int64_t n, Rational alpha);

  std::int64_t n() const noexcept { return n_; }
  const Rational& alpha() const noexcept { return alpha_; }

  // Largest T_n that is kept: floor(n * v_sum * alpha).
  std::int64_t max_kept_sum(const MachineSet& machines) const;
  bool discards(std::int64_t total_time, const MachineSet& machines) const;
  // The all-T_min sequence is kept.
  bool kept_nonempty(const JobAlphabet& alphabet, const MachineSet& machines) const;

 private:
  std::int64_t n_;
  Rational alpha_;
};

// COST(phi_n, S_n): worst makespan of the scheduler over the kept sequences.
// Order-invariant schedulers enumerate job multisets (one canonical sequence
// each); EFT enumerates raw sequences. ResourceError past the budget;
// DomainError if nothing is kept.
Rational cost_exact(const Scheduler& scheduler, const ThresholdDiscardSet& discard, const JobAlphabet& alphabet,
                    const MachineSet& machines);
inline Rational cost_exact(const Scheduler& scheduler, const ThresholdDiscardSet& discard,
                           const SchedulingProblem& problem) {
  return cost_exact(scheduler, discard, problem.alphabet(), problem.machines());
}

// Number of items cost_exact would enumerate (multisets or sequences),
// saturating at UINT64_MAX.
std::uint64_t cost_enumeration_size(const Scheduler& scheduler, std::int64_t n, const JobAlphabet& alphabet);

// P(S_n) = P(T_n > n * v_sum * alpha), exact DP.
double discard_probability(const ThresholdDiscardSet& discard, const SchedulingProblem& problem);

// Sampled check of T_n/v_sum <= SPAN <= T_n/v_sum + T_max/v_min for the
// scheduler and, where brute force fits the budget, for the optimum.
struct SandwichAudit {
  std::int64_t samples = 0;
  std::int64_t violations = 0;
  std::int64_t optimum_checked = 0;
};
SandwichAudit sandwich_audit(const SchedulingProblem& problem, const Scheduler& scheduler, std::int64_t n,
                             std::int64_t trials, std::uint64_t master_seed);

}  // namespace schedrate
