#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace bmo {

/// Open metric ball: members are the points at distance strictly below
/// `radius` from `center`.
struct Ball {
  int center = 0;
  double radius = 0.0;
};

/// Ball together with its resolved member set (ascending point ids) and
/// measure. Canonical lists contain one entry per realizable member set
/// per center.
struct CanonicalBall {
  int center = 0;
  double radius = 0.0;
  std::vector<int> members;
  double measure = 0.0;
};

/// One level of the multiscale ball system: a maximal net at separation
/// radius/2 plus the ball of that radius around every net point.
struct BallFamily {
  int level = 0;
  int step = 1;
  double radius = 0.0;
  std::vector<int> net;
  std::vector<CanonicalBall> balls;
};

struct DoublingConstants {
  double centered = 1.0;    // sup mu(B(x,2r)) / mu(B(x,r))
  double off_center = 1.0;  // sup mu(B(x,2r)) / mu(B(y,r)) over intersecting pairs
};

struct LowerMassReport {
  long long checked = 0;
  double min_slack = 0.0;  // min of lhs - rhs over checked configurations
  int witness_x = -1, witness_y = -1;
  double witness_R = 0.0, witness_r = 0.0;
};

/// Finite metric measure space: n points, a full distance matrix and one
/// positive weight per point. Instances are immutable after construction;
/// all queries are const. Derived data (canonical balls, doubling
/// constants) is cached lazily on first use; the cache fill is not
/// thread-safe, so warm it from one thread before sharing.
class Space {
 public:
  /// Builds from a full row-major distance matrix. Validates symmetry,
  /// zero diagonal, positive off-diagonal entries, the triangle
  /// inequality and positive weights.
  static Space from_matrix(std::string label, int n, std::vector<double> dist,
                           std::vector<double> weight);

  /// Points 0..n-1 on a line, d(i,j) = |i-j|. Weights are (1+i)^power;
  /// power must stay above -1 so the measure remains doubling.
  static Space grid_1d(int n, double power = 0.0, bool normalize = false);

  /// Integer grid nx * ny with the Euclidean metric; id = i*ny + j.
  /// Weights are (1+|x|)^power with |x| the Euclidean norm; power > -2.
  static Space grid_2d(int nx, int ny, double power = 0.0, bool normalize = false);

  /// Path graph: same metric as grid_1d, unit weights.
  static Space path_graph(int n, bool normalize = false);

  /// Complete binary tree of the given depth, shortest-path (hop) metric,
  /// unit weights. Node 0 is the root, children of k are 2k+1 and 2k+2.
  static Space binary_tree(int depth, bool normalize = false);

  /// Returns a copy with all distances scaled so the diameter is 1/2.
  Space normalized() const;

  int size() const { return n_; }
  const std::string& label() const { return label_; }
  double dist(int i, int j) const { return dist_[std::size_t(i) * n_ + j]; }
  double weight(int i) const { return weight_[i]; }
  const std::vector<double>& weights() const { return weight_; }
  const std::vector<double>& dist_matrix() const { return dist_; }
  double total_measure() const { return total_; }
  double diameter() const { return diameter_; }
  /// Smallest positive distance (0 for a 1-point space).
  double min_gap() const { return min_gap_; }

  std::vector<int> ball_members(const Ball& b) const;
  double ball_measure(const Ball& b) const { return ball_measure(b.center, b.radius); }
  double ball_measure(int center, double radius) const;
  CanonicalBall resolve(const Ball& b) const;

  /// Canonical ball list: per center, radii at midpoints between
  /// consecutive distinct realized distances plus one radius beyond the
  /// largest, so every realizable member set appears exactly once per
  /// center. Sorted by center id then radius.
  const std::vector<CanonicalBall>& canonical_balls() const;

  /// Exact suprema over all radii; candidate radii are the breakpoints
  /// where either ball in the ratio changes (realized distances and their
  /// halves). Also checks off_center <= centered^3.
  const DoublingConstants& doubling() const;

  /// Greedy net: scan ids ascending, keep a point iff it is at distance
  /// >= r/2 from every kept point.
  std::vector<int> maximal_net(double r) const;

  /// Level family at radius 2^(-level*step); verifies that the balls
  /// cover the space.
  BallFamily ball_family(int level, int step) const;

  /// Verifies mu(B(y,r))/mu(B(x,R)) >= centered^-2 * (r/R)^log2(centered)
  /// for y in B(x,R), r <= R. Exhaustive for small n, strided otherwise.
  LowerMassReport lower_mass_check(long long max_configs = 6'000'000) const;

 private:
  Space() = default;
  void finalize();  // validation + per-center sorted structures

  int n_ = 0;
  std::string label_;
  std::vector<double> dist_;    // n*n
  std::vector<double> weight_;  // n
  double total_ = 0.0;
  double diameter_ = 0.0;
  double min_gap_ = 0.0;

  // per-center: point ids sorted by distance, the sorted distances, and
  // weight prefix sums (prefix_[c][k] = sum of first k weights)
  std::vector<std::vector<int>> order_;
  std::vector<std::vector<double>> sdist_;
  std::vector<std::vector<double>> prefix_;

  mutable std::optional<std::vector<CanonicalBall>> canonical_;
  mutable std::optional<DoublingConstants> doubling_;
};

/// Greedy disjoint subfamily: process balls by descending radius (ties:
/// ascending center id, then input order), keep a ball iff its member set
/// meets no kept member set. Verifies that every input ball's member set
/// lies inside the 5-dilate of some kept ball. Returns indices into the
/// input, in processing order.
std::vector<std::size_t> vitali_disjoint(const Space& X, const std::vector<Ball>& balls);

/// Bump adapted to a ball: clamp(2 - d(center,x)/radius, 0, 1); equals 1
/// on the ball, vanishes outside the 2-dilate, Lipschitz <= 1/radius.
std::vector<double> adapted_bump(const Space& X, const Ball& b);

}  // namespace bmo
