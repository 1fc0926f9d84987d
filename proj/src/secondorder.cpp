#include "schedrate/secondorder.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "schedrate/errors.hpp"
#include "schedrate/parallel.hpp"

namespace schedrate {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

// Acklam's rational approximation, relative error ~1.15e-9.
double acklam_quantile(double p) {
  static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                                 1.383577518672690e+02,  -3.066479806614716e+01, 2.506628277459239e+00};
  static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                                 6.680131188771972e+01,  -1.328068155288572e+01};
  static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                                 -2.549732539343734e+00, 4.374664141464968e+00,  2.938163982698783e+00};
  static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                                 3.754408661907416e+00};
  constexpr double p_low = 0.02425;
  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

// p <= 0.5: the lower tail is where erfc keeps full relative precision.
double lower_quantile(double p) {
  double x = acklam_quantile(p);
  const double sqrt_2pi = std::sqrt(2.0 * std::numbers::pi);
  for (int iter = 0; iter < 8; ++iter) {
    const double e = normal_cdf(x) - p;
    if (std::abs(e) <= 1e-15 * std::max(p, 1e-300)) break;
    const double u = e * sqrt_2pi * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
  }
  return x;
}

const IIDModel& require_iid(const SchedulingProblem& problem, const char* what) {
  const auto* iid = problem.process().as_iid();
  if (iid == nullptr) throw DomainError(std::string(what) + " requires an i.i.d. job process");
  return *iid;
}

struct Moments {
  double mean;
  double variance;
  double third_abs;
};

Moments iid_moments(const SchedulingProblem& problem, const char* what) {
  require_iid(problem, what);
  Moments m{expected_processing_time(problem.process(), problem.alphabet()).front(),
            variance_processing_time(problem.process(), problem.alphabet()),
            third_abs_central_moment(problem.process(), problem.alphabet())};
  if (!(m.variance > 0.0)) {
    throw DomainError(std::string(what) + " needs V(T(J)) > 0; the degenerate case is exact via r_n_plus");
  }
  return m;
}

void require_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    std::ostringstream os;
    os << "epsilon must lie in (0, 1), got " << epsilon;
    throw DomainError(os.str());
  }
}

std::int64_t quantile_sum(const SumDistribution& dist, double epsilon) {
  for (auto s : dist.support()) {
    if (dist.tail_greater(s) <= epsilon) return s;
  }
  return dist.max_sum();
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    std::ostringstream os;
    os << "normal_quantile needs p in (0, 1), got " << p;
    throw DomainError(os.str());
  }
  if (p == 0.5) return 0.0;
  // 1 - p is exact for p > 0.5.
  if (p > 0.5) return -lower_quantile(1.0 - p);
  return lower_quantile(p);
}

Rational r_n_plus(std::int64_t n, double epsilon, const SchedulingProblem& problem) {
  require_epsilon(epsilon);
  auto dist = sum_distribution(problem.process(), problem.alphabet(), n);
  return Rational(quantile_sum(dist, epsilon)) / (Rational(n) * problem.machines().v_sum());
}

double berry_esseen_prediction(std::int64_t n, double epsilon, const SchedulingProblem& problem) {
  require_epsilon(epsilon);
  if (n < 1) throw DomainError("prediction needs n >= 1");
  const auto m = iid_moments(problem, "berry_esseen_prediction");
  const double v_sum = to_double(problem.machines().v_sum());
  const double nn = static_cast<double>(n);
  return nn * m.mean / v_sum - std::sqrt(m.variance * nn) * normal_quantile(epsilon) / v_sum;
}

double berry_esseen_error_bound(std::int64_t n, const SchedulingProblem& problem) {
  if (n < 1) throw DomainError("error bound needs n >= 1");
  const auto m = iid_moments(problem, "berry_esseen_error_bound");
  return m.third_abs / (std::pow(m.variance, 1.5) * std::sqrt(static_cast<double>(n)));
}

std::vector<SecondOrderRow> second_order_table(const std::vector<std::int64_t>& n_grid, double epsilon,
                                               const SchedulingProblem& problem, bool strict_window,
                                               unsigned workers) {
  require_epsilon(epsilon);
  if (n_grid.empty()) throw DomainError("n grid must not be empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1 || (i > 0 && n_grid[i] <= n_grid[i - 1])) {
      throw DomainError("n grid must be strictly increasing positive integers");
    }
  }
  const auto m = iid_moments(problem, "second_order_table");
  const double bound_constant = m.third_abs / std::pow(m.variance, 1.5);
  if (strict_window) {
    const double room = std::min(epsilon, 1.0 - epsilon);
    if (bound_constant / std::sqrt(static_cast<double>(n_grid.front())) >= room) {
      const auto smallest = static_cast<std::int64_t>(std::floor(std::pow(bound_constant / room, 2.0))) + 1;
      std::ostringstream os;
      os << "epsilon " << epsilon << " +- Berry-Esseen bound leaves (0, 1) at n = " << n_grid.front()
         << "; smallest feasible n is " << smallest;
      throw DomainError(os.str());
    }
  }

  const auto& machines = problem.machines();
  const Rational slack = Rational(problem.alphabet().t_max()) / machines.v_min();
  std::vector<SecondOrderRow> rows(n_grid.size());
  parallel_for(n_grid.size(), workers, [&](std::size_t i) {
    const std::int64_t n = n_grid[i];
    auto dist = sum_distribution(problem.process(), problem.alphabet(), n);
    const std::int64_t s = quantile_sum(dist, epsilon);
    SecondOrderRow row;
    row.n = n;
    row.epsilon = epsilon;
    row.r_n_plus = Rational(s) / (Rational(n) * machines.v_sum());
    row.cost_lo = Rational(s) / machines.v_sum();
    row.cost_hi = row.cost_lo + slack;
    row.prediction = berry_esseen_prediction(n, epsilon, problem);
    row.residual = to_double((row.cost_lo + row.cost_hi) / Rational(2)) - row.prediction;
    const double nn = static_cast<double>(n);
    row.gaussian_tail = normal_cdf(-(static_cast<double>(s) - nn * m.mean) / std::sqrt(m.variance * nn));
    row.be_bound = bound_constant / std::sqrt(nn);
    row.atom = dist.probability(s);
    row.inside_window = epsilon - row.be_bound > 0.0 && epsilon + row.be_bound < 1.0;
    rows[i] = row;
  });
  return rows;
}

}  // namespace schedrate
