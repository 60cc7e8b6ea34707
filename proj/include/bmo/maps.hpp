#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "bmo/oscillation.hpp"
#include "bmo/space.hpp"
#include "bmo/uchiyama.hpp"

namespace bmo {

/// Self-map of a space's points: x maps to F[x].
using PointMap = std::vector<int>;

void check_map(const Space& X, const PointMap& F);
PointSet preimage(const Space& X, const PointMap& F, const PointSet& E);
Field compose_field(const Field& f, const PointMap& F);  // f after F

/// Sup over canonical balls of min(density of A, density of B).
double two_set_density(const Space& X, const PointSet& A, const PointSet& B);

/// Deterministic trial family of set pairs. Trial 0 is (X, X); the rest
/// cycle through random subsets, canonical ball members, distance level
/// sets, complementary halves, and sparse pairs sharing a point.
std::vector<std::pair<PointSet, PointSet>> make_pair_family(const Space& X,
                                                            std::uint64_t seed,
                                                            int trials);

struct FitResult {
  double K = 0.0;
  double alpha = 0.0;
  bool degenerate = false;  // a trial had zero input density but positive output
  std::size_t trials = 0;
  std::size_t witness = 0;  // trial attaining K at the fitted alpha
};

/// Fits the power bound: output density <= K * (input density)^alpha over
/// the trial pairs. Alpha ranges over {0.05 i : i = 1..20}; K(alpha) is the
/// max ratio and the fit minimizes K(alpha)/alpha, ties to the larger alpha.
FitResult condition_i_fit(const Space& X, const PointMap& F,
                          const std::vector<std::pair<PointSet, PointSet>>& pairs);

/// Same fit over every pair of nonempty subsets; spaces up to 12 points.
FitResult condition_i_fit_exhaustive(const Space& X, const PointMap& F);

struct ThresholdReport {
  bool pass = false;
  double gamma = 0.0, lambda = 0.0;
  double gamma_cap = 0.0;  // stricter threshold (4 c^3)^{-1}
  bool below_cap = false;
  std::size_t violations = 0, checked = 0;
  std::size_t witness = 0;
  double witness_x = 0.0, witness_y = 0.0;
};

/// Checks: input density below lambda forces output density below gamma.
ThresholdReport condition_ii_check(const Space& X, const PointMap& F,
                                   const std::vector<std::pair<PointSet, PointSet>>& pairs,
                                   double gamma, double lambda);

struct OpNormResult {
  double value = 0.0;
  std::size_t fields_used = 0;
  std::size_t witness = 0;
};

/// Log-distance fields, random indicator fields, and closed-form
/// construction outputs on a two-set split; used as composition probes.
std::vector<Field> default_field_family(const Space& X, std::uint64_t seed);

/// Max over the family (zero-norm inputs excluded) of the composition
/// norm ratio. Each ratio is re-checked on scaled copies of the field;
/// scaling must not change it.
OpNormResult operator_norm_estimate(const Space& X, const PointMap& F,
                                    const std::vector<Field>& family);

struct ChainRecord {
  double norm = 0.0;           // input field norm
  double jn_a = 0.0;           // its John-Nirenberg constant
  double c1 = 0.0, c2 = 0.0;   // derived two-sided constants for the composition
  bool hypothesis_ok = false;
  double bound = 0.0;
  double composed_norm = 0.0;
  bool pass = false;
};

struct ChainReport {
  double K = 0.0, alpha = 0.0;
  double opnorm = 0.0;
  double c_emp = 0.0;  // measured constant with opnorm <= c_emp K / alpha
  bool ok = false;
  std::vector<ChainRecord> records;
};

/// Level-set chain: the fitted power bound turns the two-sided tail bound
/// for f into one for the composition with C1 = K 2^alpha and
/// C2 = alpha A_f / (2 |f|), then the tail-to-norm converse bounds the
/// composition norm.
ChainReport condition_chain_check(const Space& X, const PointMap& F,
                                  const std::vector<Field>& family,
                                  std::uint64_t seed, int trials);

struct ImplicationReport {
  bool applicable = false;  // gamma = K lambda^alpha lands below 1/4
  double K = 0.0, alpha = 0.0, gamma = 0.0, lambda = 0.0;
  std::size_t counterexamples = 0, checked = 0;
};

/// Power bound at the fitted constants implies the threshold condition
/// with gamma = K lambda^alpha whenever that value is below 1/4.
ImplicationReport implication_check(const Space& X, const PointMap& F,
                                    std::uint64_t seed, int trials, double lambda);

struct RoundtripResult {
  bool degenerate = false;  // empty set or no separation; nothing to test
  double density = 0.0, lambda_star = 0.0;
  bool used_trivial = false;
  double opnorm = 0.0;
  double jn_a = 0.0, c1_emp = 0.0, constant = 0.0;
  double measured = 0.0, predicted = 0.0;
  bool pass = false;
  std::size_t witness_ball = 0;
};

/// Builds the extremal pair for the two sets at the largest admissible
/// lambda, composes with the map, and compares the measured preimage
/// density against the predicted power 2 * density^(C / opnorm) where C
/// comes from the composed fields' John-Nirenberg constant.
RoundtripResult gotoh_roundtrip(const Space& X, const PointMap& F,
                                const PointSet& E1, const PointSet& E2,
                                std::uint64_t seed);

}  // namespace bmo
