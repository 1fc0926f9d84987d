#pragma once

#include "schedrate/core.hpp"
#include "schedrate/stochastic.hpp"

namespace schedrate {

// The problem tuple (J, T, V, P).
class SchedulingProblem {
 public:
  // The process must range over exactly the alphabet's symbols; it is
  // reordered to alphabet order if necessary.
  SchedulingProblem(JobAlphabet alphabet, MachineSet machines, JobProcess process);

  const JobAlphabet& alphabet() const noexcept { return alphabet_; }
  const MachineSet& machines() const noexcept { return machines_; }
  const JobProcess& process() const noexcept { return process_; }

  std::size_t machine_count() const noexcept { return machines_.size(); }

 private:
  JobAlphabet alphabet_;
  MachineSet machines_;
  JobProcess process_;
};

}  // namespace schedrate
