#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "schedrate/rational.hpp"

namespace schedrate {

using SymbolIndex = std::size_t;
using MachineIndex = std::size_t;

// The finite job set with its processing-time map (time units at unit speed).
class JobAlphabet {
 public:
  JobAlphabet(std::vector<std::string> symbols, std::vector<std::int64_t> times);
  // Convenience: symbols in the given order.
  JobAlphabet(std::initializer_list<std::pair<std::string, std::int64_t>> entries);

  std::size_t size() const noexcept { return symbols_.size(); }
  const std::vector<std::string>& symbols() const noexcept { return symbols_; }
  const std::vector<std::int64_t>& times() const noexcept { return times_; }

  const std::string& symbol(SymbolIndex i) const { return symbols_.at(i); }
  std::int64_t time(SymbolIndex i) const { return times_.at(i); }
  std::int64_t time(const std::string& symbol) const { return times_[index_of(symbol)]; }

  // Throws DomainError naming the symbol when it is not in the alphabet.
  SymbolIndex index_of(const std::string& symbol) const;
  bool contains(const std::string& symbol) const { return lookup_.contains(symbol); }

  std::int64_t t_min() const noexcept { return t_min_; }
  std::int64_t t_max() const noexcept { return t_max_; }

  friend bool operator==(const JobAlphabet& a, const JobAlphabet& b) {
    return a.symbols_ == b.symbols_ && a.times_ == b.times_;
  }

 private:
  std::vector<std::string> symbols_;
  std::vector<std::int64_t> times_;
  std::unordered_map<std::string, SymbolIndex> lookup_;
  std::int64_t t_min_ = 0;
  std::int64_t t_max_ = 0;
};

// Machine speeds, exact positive rationals.
class MachineSet {
 public:
  explicit MachineSet(std::vector<Rational> speeds);

  std::size_t size() const noexcept { return speeds_.size(); }
  const std::vector<Rational>& speeds() const noexcept { return speeds_; }
  const Rational& speed(MachineIndex i) const { return speeds_.at(i); }

  const Rational& v_sum() const noexcept { return v_sum_; }
  const Rational& v_min() const noexcept { return v_min_; }
  const Rational& v_max() const noexcept { return v_max_; }

  // Speeds as integer weights over a common denominator: speed(i) = weight(i) / denom.
  // Lets inner loops compare load_a / v_a against load_b / v_b in integers.
  const std::vector<std::int64_t>& integer_weights() const noexcept { return weights_; }
  std::int64_t common_denominator() const noexcept { return denom_; }

  MachineSet scaled(const Rational& factor) const;

  friend bool operator==(const MachineSet& a, const MachineSet& b) { return a.speeds_ == b.speeds_; }

 private:
  std::vector<Rational> speeds_;
  Rational v_sum_;
  Rational v_min_;
  Rational v_max_;
  std::vector<std::int64_t> weights_;
  std::int64_t denom_ = 1;
};

// A nonempty list of jobs, stored as alphabet indices.
class JobSequence {
 public:
  JobSequence(std::vector<SymbolIndex> items, const JobAlphabet& alphabet);
  static JobSequence from_symbols(const std::vector<std::string>& symbols, const JobAlphabet& alphabet);

  std::size_t size() const noexcept { return items_.size(); }
  const std::vector<SymbolIndex>& items() const noexcept { return items_; }
  SymbolIndex operator[](std::size_t i) const { return items_[i]; }

  friend bool operator==(const JobSequence&, const JobSequence&) = default;

 private:
  std::vector<SymbolIndex> items_;
};

// Machine index for every position of a sequence.
struct Assignment {
  std::vector<MachineIndex> machine_of;

  friend bool operator==(const Assignment&, const Assignment&) = default;
};

std::int64_t total_processing_time(const JobSequence& seq, const JobAlphabet& alphabet);

// Per-machine integer work (sum of unit-speed times) under an assignment.
std::vector<std::int64_t> machine_loads(const Assignment& assignment, const JobSequence& seq,
                                        const JobAlphabet& alphabet, const MachineSet& machines);

// max_i load_i / v_i.
Rational makespan(const Assignment& assignment, const JobSequence& seq, const JobAlphabet& alphabet,
                  const MachineSet& machines);

// Makespan of integer loads; loads.size() must equal machines.size().
Rational makespan_of_loads(std::span<const std::int64_t> loads, const MachineSet& machines);

// T_n / v_sum: no assignment finishes earlier.
Rational span_lower_bound(const JobSequence& seq, const JobAlphabet& alphabet, const MachineSet& machines);

// T_n / v_sum + T_max / v_min: the optimum, EFT and LPT never finish later.
Rational span_upper_bound(const JobSequence& seq, const JobAlphabet& alphabet, const MachineSet& machines);

// Largest T_n of some length-n sequence over the alphabet with T_n <= bound
// (probabilities ignored).
std::optional<std::int64_t> max_attainable_sum_at_most(const JobAlphabet& alphabet, std::int64_t n,
                                                       std::int64_t bound);

struct CostPerJobBracket {
  Rational lo;
  Rational hi;
};

// Bracket on COST/n of an optimal scheduler for any admissible discard set:
// lo = (1/m)(1 - m/n) T_min / v_max, hi = (1/m)(1 + m/n) T_max / v_min.
// The hi side assumes every machine runs at v_min and is not tight for mixed speeds.
CostPerJobBracket lemma1_cost_per_job_bracket(std::int64_t n, const JobAlphabet& alphabet,
                                              const MachineSet& machines);

}  // namespace schedrate
