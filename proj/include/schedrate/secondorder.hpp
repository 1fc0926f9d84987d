#pragma once

#include <cstdint>
#include <vector>

#include "schedrate/problem.hpp"

namespace schedrate {

// Phi(x), standard normal CDF via erfc.
double normal_cdf(double x);

// Phi^{-1}(p) for p in (0, 1), |Phi(x) - p| <= 1e-10. Rational initial
// approximation polished with Halley steps against normal_cdf.
double normal_quantile(double p);

// R_n^+(eps) = inf{ alpha >= 0 : P(T_n / (n v_sum) > alpha) <= eps },
// attained at a support point s: returns s / (n v_sum) exactly.
Rational r_n_plus(std::int64_t n, double epsilon, const SchedulingProblem& problem);

// n E[T] / v_sum - sqrt(V n) Phi^{-1}(eps) / v_sum. I.i.d. with V > 0 only.
double berry_esseen_prediction(std::int64_t n, double epsilon, const SchedulingProblem& problem);

// rho / (sigma^3 sqrt(n)) for X = (T(J) - E[T]) / v_sum; the v_sum factors
// cancel to E|T - E T|^3 / (V^{3/2} sqrt(n)).
double berry_esseen_error_bound(std::int64_t n, const SchedulingProblem& problem);

struct SecondOrderRow {
  std::int64_t n = 0;
  double epsilon = 0.0;
  Rational r_n_plus;
  // [n R_n^+, n R_n^+ + T_max / v_min]: the optimal COST at discard probability <= eps.
  Rational cost_lo;
  Rational cost_hi;
  double prediction = 0.0;
  double residual = 0.0;  // midpoint(cost) - prediction

  // Gaussian sandwich terms at R = R_n^+:
  // gaussian_tail = Phi(-(n v_sum R - n E[T]) / sqrt(V n)) must lie in
  // [eps - be_bound - atom, eps + be_bound + atom].
  double gaussian_tail = 0.0;
  double be_bound = 0.0;
  double atom = 0.0;  // P(T_n = n v_sum R)
  // eps +- be_bound inside (0, 1)
  bool inside_window = false;

  bool sandwich_holds() const noexcept {
    return gaussian_tail >= epsilon - be_bound - atom && gaussian_tail <= epsilon + be_bound + atom;
  }
};

// With `strict_window`, DomainError (naming the smallest feasible n) when
// eps +- be_bound leaves (0, 1) at the smallest grid n.
std::vector<SecondOrderRow> second_order_table(const std::vector<std::int64_t>& n_grid, double epsilon,
                                               const SchedulingProblem& problem, bool strict_window = false,
                                               unsigned workers = 1);

}  // namespace schedrate
