#pragma once

#include <cstddef>
#include <vector>

#include "bmo/space.hpp"

namespace bmo {

/// One value per point of the bound space.
using Field = std::vector<double>;

double ball_average(const Space& X, const Field& f, const std::vector<int>& members);

struct NormResult {
  double value = 0.0;
  std::size_t ball_index = 0;  // argmax into canonical_balls(); ties keep the earliest
};

/// Mean oscillation norm: max over canonical balls of the average of
/// |f - f_B| over B.
NormResult bmo_norm(const Space& X, const Field& f);

/// Dual characterization: per ball the supremum over mean-zero test
/// functions with |g| <= 1 of the pairing equals the average of |f - m_B|
/// for a weighted median m_B; the lower median is used. Always lands in
/// [norm/2, norm].
NormResult dual_norm(const Space& X, const Field& f);

/// Measure of {x in B : |f(x) - f_B| > lambda} (>= lambda when inclusive).
double tail_measure(const Space& X, const Field& f, const CanonicalBall& ball,
                    double lambda, bool inclusive = false);

struct TailRecord {
  std::size_t ball_index = 0;
  double lambda = 0.0;
  double tail = 0.0;
  double ball_measure = 0.0;
};

struct TailProfile {
  double norm = 0.0;                 // mean oscillation norm of the profiled field
  std::vector<double> grid;          // lambda grid: norm * 2^i, i = -4..6
  std::vector<TailRecord> records;   // one per (canonical ball, grid lambda)
};

TailProfile jn_profile(const Space& X, const Field& f);

/// Largest A with tail <= 2 mu(B) exp(-A lambda / norm) across the
/// profile: min over records with positive tail of
/// (norm/lambda) ln(2 mu(B)/tail). Constant fields give +infinity.
double jn_constant(const TailProfile& profile);
double jn_constant(const Space& X, const Field& f);

/// min of mu({f >= t} in B) and mu({f <= s} in B), s <= t.
double two_sided_tail(const Space& X, const Field& f, const CanonicalBall& ball,
                      double s, double t);

struct TwoSidedReport {
  bool pass = true;
  double constant = 0.0;       // exponent constant used: jn_constant / 2
  double worst_ratio = 0.0;    // max of tail / bound over checked records
  std::size_t witness_ball = 0;
  double witness_s = 0.0, witness_t = 0.0;
  long long checked = 0;
};

/// Checks min-tail <= 2 mu(B) exp(-C (t-s)/norm) with C = jn_constant/2
/// over every canonical ball and every realized value pair s <= t.
TwoSidedReport two_sided_check(const Space& X, const Field& f);

struct ConverseReport {
  bool hypothesis_ok = true;
  double worst_ratio = 0.0;  // max of min-tail / hypothesis bound
  std::size_t witness_ball = 0;
  double witness_s = 0.0, witness_t = 0.0;
  double bound = 0.0;  // 4 (C1+1) C2^-1 exp(2 C2)
  double norm = 0.0;
  bool pass = false;   // hypothesis_ok and norm <= bound
};

/// Converse direction: if min{mu(f<=s), mu(f>=t)} <= C1 mu(B) e^(-C2(t-s))
/// on every ball then the norm is at most 4(C1+1)/C2 * e^(2 C2). The
/// hypothesis is verified on realized value pairs, which is exact for
/// step distributions. Throws if the hypothesis holds but the conclusion
/// fails, since that would be a computation bug.
ConverseReport jn_converse(const Space& X, const Field& f, double C1, double C2);

/// Right-continuous step cdf: value(t) = v[i] for the largest t_i <= t,
/// 0 before the first breakpoint.
struct StepCdf {
  std::vector<double> t;  // ascending breakpoints
  std::vector<double> v;  // non-decreasing values in [0,1]
  double operator()(double x) const;
};

/// Normalized cdf of f restricted to a ball.
StepCdf empirical_cdf(const Space& X, const Field& f, const CanonicalBall& ball);

struct T0Result {
  bool hypothesis_ok = true;
  double hyp_worst_ratio = 0.0;
  bool feasible = false;
  double t0 = 0.0;
  double lo = 0.0, hi = 0.0;  // exact feasibility interval [lo, hi]
};

/// Centering point of a distribution with two-sided exponential decay:
/// smallest t0 with max{cdf(t0-t), 1-cdf(t0+t)} <= (C1+1)e^(2C2) e^(-C2 t)
/// for all t >= 0. The feasible set is an interval computed in closed
/// form from the breakpoints; candidates also include breakpoints and
/// midpoints, and the smallest feasible candidate is returned.
T0Result find_t0(const StepCdf& df, double C1, double C2);

/// Direct verification of the find_t0 conclusion for a given t0.
bool check_t0(const StepCdf& df, double C1, double C2, double t0);

struct StrombergResult {
  double value = 0.0;  // sup over balls of the inner infimum
  struct PerBall {
    std::size_t ball_index = 0;
    double inf = 0.0;     // min over centers c of mu({|f-c| >= lambda} in B)/mu(B)
    double center = 0.0;  // a minimizing c
  };
  std::vector<PerBall> per_ball;
};

/// sup_B inf_c mu({x in B : |f(x)-c| >= lambda})/mu(B). The inner
/// infimum is exact: the retained set {|f-c| < lambda} is a value window
/// of width < 2 lambda, so a max-weight window scan over sorted values
/// finds the optimum and its center.
StrombergResult stromberg_functional(const Space& X, const Field& f, double lambda);

/// 1 + 2 sum_{m>=1} (m+1) 2^(-m/2), the lambda-multiplier in the
/// Stromberg-type bound (about 22.3137).
double stromberg_majorant();

struct StrombergVerdict {
  bool applicable = false;   // functional <= gamma and gamma below the cap
  double functional = 0.0;
  double gamma_cap = 0.0;    // (4 c_D^3)^-1
  double majorant = 0.0;
  double norm = 0.0;
  double bound = 0.0;        // majorant * lambda
  bool pass = false;
};

/// If the Stromberg functional at level lambda stays below a small gamma
/// (below the doubling cap), the norm is at most majorant * lambda.
/// Not applicable inputs return a verdict without asserting anything;
/// applicable ones throw if the bound fails, since it is a theorem.
StrombergVerdict stromberg_bound(const Space& X, const Field& f, double lambda,
                                 double gamma, double c_D);

}  // namespace bmo
