#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "bmo/oscillation.hpp"
#include "bmo/space.hpp"

namespace bmo {

/// Subset of a space's points with cached mask and measure.
struct PointSet {
  std::vector<int> ids;     // sorted, unique
  std::vector<char> mask;   // length n
  double measure = 0.0;
};

PointSet make_point_set(const Space& X, std::vector<int> ids);

/// Density exponent log_{c}( mu(B) / mu(E cap B) ); +infinity when the
/// intersection is empty. Larger values mean E is thinner in B.
double g_value(const Space& X, const PointSet& E, const CanonicalBall& ball, double c);

struct GMonotonicity {
  bool applicable = false;  // members(B1) within B2 and c^k mu(B1) >= mu(B2)
  bool ok = false;          // g(B1) >= g(B2) - k, infinity-aware
  double lhs = 0.0, rhs = 0.0;
};

GMonotonicity g_monotonicity_check(const Space& X, const PointSet& E,
                                   const CanonicalBall& B1, const CanonicalBall& B2,
                                   int k, double c);

/// Minimal positive q with 1 + N c^6 q <= 2^q.
int choose_q(double c, int N);

struct DensityReport {
  double value = 0.0;       // sup over canonical balls of min_j density of E_j
  double lambda_max = 0.0;  // -log_c(value)/4, +infinity when value = 0
  std::size_t witness_ball = 0;
};

DensityReport density_functional(const Space& X, const std::vector<PointSet>& sets,
                                 double c);

/// Closed-form small-target construction: f_j = (1 - chi_{E_j}) / #{k : x not in E_k}.
/// Requires that no point lies in every set.
std::vector<Field> trivial_construction(const Space& X, const std::vector<PointSet>& sets);

struct BuildParams {
  double lambda = 2.0;
  int q = 0;            // 0: minimal q from choose_q
  double c_off = 0.0;   // 0: measured off-center doubling constant
  int depth = 0;        // 0: smallest h with 2^(-h q) below the minimum gap
  double trivial_threshold = 1.5;  // lambda below this routes to trivial_construction
  double tol = 1e-9;
  bool record_trace = false;
};

struct LevelReport {
  int level = 0;
  double radius = 0.0;
  int ball_count = 0;
  int removal_count = 0;  // total size of the removal families
  double max_sum_dev = 0.0;
  double min_value = 0.0, max_value = 0.0;
  double max_g_excess = 0.0;
  double max_drop_excess = 0.0;
  double max_monotone_violation = 0.0;
  double max_mass_dev = 0.0;
  bool lipschitz_checked = false;
  double max_lip_excess = 0.0;
};

struct TraceLevel {
  std::vector<Field> fields;                       // f_{j,k} per j
  std::vector<std::vector<int>> removal_centers;   // per j, centers of the removal family
};

struct Construction {
  BuildParams params;  // with q, c_off, depth resolved to their effective values
  int n_sets = 0;
  bool used_trivial = false;
  bool lipschitz_certified = false;  // q satisfies 1 + N c^6 q <= 2^q
  int root_owner = -1;               // index carrying the initial constant
  std::vector<Field> fields;         // normalized outputs, sum to 1
  std::vector<Field> raw_fields;     // pre-normalization final level
  std::vector<LevelReport> levels;
  std::vector<TraceLevel> trace;
};

/// Raised when the density hypothesis mu-density <= c^(-4 lambda) fails.
class HypothesisError : public std::runtime_error {
 public:
  HypothesisError(double density, double lambda_max, const std::string& msg)
      : std::runtime_error(msg), density(density), lambda_max(lambda_max) {}
  double density, lambda_max;
};

/// Multi-scale extremal construction: starting from one field carrying the
/// constant lambda, each level removes mass over balls where the field
/// exceeds the density exponent of its own set and redistributes it to
/// the field selected by the thin-set rule s(B). Every level's invariants
/// (sum, range, g-bound, one-step drop, monotonicity off the removal
/// region, mass conservation, and the Lipschitz bound when q satisfies
/// the growth inequality) are asserted; violations throw. Below the
/// trivial threshold the closed-form construction is returned instead.
Construction uchiyama_construct(const Space& X, const std::vector<PointSet>& sets,
                                BuildParams params);

struct VerifyReport {
  double sum_dev = 0.0;
  bool sum_ok = false;  // <= 1e-12
  double range_dev = 0.0;
  bool range_ok = false;
  double vanish_dev = 0.0;
  bool vanish_ok = false;  // exact zero on own sets
  std::vector<double> norms;
  double c1_emp = 0.0;  // lambda * max norm
};

VerifyReport verify_construction(const Space& X, const std::vector<Field>& fields,
                                 const std::vector<PointSet>& sets, double lambda);

struct NecessityReport {
  bool applicable = false;  // fields pass verify and max norm <= c2/lambda
  bool inclusion_ok = false;
  double density = 0.0;   // sup over balls of the selected set's density
  double exponent = 0.0;  // -log_c(density)/4
  double reference = 0.0; // c^(-4 lambda)
  std::size_t witness_ball = 0;
};

/// Converse direction: on each ball some field has average >= 1/N, and
/// its set, where the field vanishes, must then be thin in the ball; the
/// set is contained in the inclusive deviation tail at that threshold.
NecessityReport necessity_check(const Space& X, const std::vector<Field>& fields,
                                const std::vector<PointSet>& sets, double lambda,
                                double c2, double c);

struct LevelBoundReport {
  bool ok = true;
  double max_excess = 0.0;
  long long checked = 0;
};

/// Small-ball height bound: on balls of radius r <= 4 r_h the raw field
/// stays below g_j(B) - (1/3) log2(r/r_h) + 8*2^q + 6.
LevelBoundReport level_bound_check(const Space& X, const Construction& built,
                                   const std::vector<PointSet>& sets);

}  // namespace bmo
