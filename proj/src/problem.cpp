#include "schedrate/problem.hpp"

#include <algorithm>

#include "schedrate/errors.hpp"

namespace schedrate {

namespace {

JobProcess align_process(const JobAlphabet& alphabet, JobProcess process) {
  if (process.symbols() == alphabet.symbols()) return process;
  auto a = process.symbols();
  auto b = alphabet.symbols();
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a != b) throw DomainError("job process symbols do not match the job alphabet");
  return process.reordered(alphabet.symbols());
}

}  // namespace

SchedulingProblem::SchedulingProblem(JobAlphabet alphabet, MachineSet machines, JobProcess process)
    : alphabet_(std::move(alphabet)),
      machines_(std::move(machines)),
      process_(align_process(alphabet_, std::move(process))) {}

}  // namespace schedrate
