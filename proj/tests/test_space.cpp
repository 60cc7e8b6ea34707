#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <vector>

#include "bmo/io.hpp"
#include "bmo/space.hpp"
#include "doctest.h"
#include "oracles.hpp"

using bmo::Ball;
using bmo::Space;

namespace {

std::vector<int> sorted(std::vector<int> v) {
  std::sort(v.begin(), v.end());
  return v;
}

// Every canonical member set must appear in the oracle enumeration and
// vice versa (as per-center multisets of sets).
void check_ball_agreement(const Space& X) {
  const auto& balls = X.canonical_balls();
  auto reference = oracle::ball_sets(X);
  REQUIRE(balls.size() == reference.size());
  std::multiset<std::vector<int>> got, want;
  for (const auto& b : balls) got.insert(sorted(b.members));
  for (auto& m : reference) want.insert(sorted(m));
  CHECK(got == want);
}

}  // namespace

TEST_CASE("canonical ball enumeration matches the closed-ball oracle") {
  check_ball_agreement(Space::grid_1d(8));
  check_ball_agreement(Space::grid_1d(5, 1.0));
  check_ball_agreement(Space::grid_2d(3, 3));
  check_ball_agreement(Space::grid_2d(4, 2, 0.7));
  check_ball_agreement(Space::binary_tree(2));
  check_ball_agreement(Space::path_graph(6, true));
}

TEST_CASE("canonical ball counts are frozen") {
  CHECK(Space::grid_1d(8).canonical_balls().size() == 52);
  Space two = Space::from_matrix("pair", 2, {0, 1, 1, 0}, {1, 1});
  CHECK(two.canonical_balls().size() == 4);
  Space one = Space::from_matrix("point", 1, {0}, {2.5});
  REQUIRE(one.canonical_balls().size() == 1);
  CHECK(one.canonical_balls()[0].members == std::vector<int>{0});
  CHECK(one.canonical_balls()[0].measure == 2.5);
}

TEST_CASE("balls are open and sorted by center then radius") {
  Space X = Space::grid_1d(8);
  CHECK(X.ball_members({3, 1.0}) == std::vector<int>{3});
  CHECK(sorted(X.ball_members({3, 1.5})) == std::vector<int>{2, 3, 4});
  CHECK(X.ball_measure(0, 2.5) == 3.0);
  const auto& balls = X.canonical_balls();
  for (std::size_t i = 1; i < balls.size(); ++i) {
    const bool order = balls[i - 1].center < balls[i].center ||
                       (balls[i - 1].center == balls[i].center &&
                        balls[i - 1].radius < balls[i].radius);
    REQUIRE(order);
  }
  for (const auto& b : balls)
    for (int z : b.members) REQUIRE(X.dist(b.center, z) < b.radius);
}

TEST_CASE("doubling constants are exact on the frozen examples") {
  Space X = Space::grid_1d(8);
  CHECK(X.doubling().centered == 3.0);
  CHECK(X.doubling().off_center == 3.5);
  Space two = Space::from_matrix("pair", 2, {0, 1, 1, 0}, {1, 1});
  CHECK(two.doubling().centered == 2.0);
  CHECK(two.doubling().off_center == 2.0);
}

TEST_CASE("off-center constant stays within the cube of the centered one") {
  for (const Space& X : {Space::grid_1d(12), Space::grid_1d(9, 1.0),
                         Space::grid_2d(4, 4), Space::binary_tree(3)}) {
    const auto& d = X.doubling();
    CHECK(d.off_center <= d.centered * d.centered * d.centered * (1 + 1e-9));
    CHECK(d.centered >= 1.0);
  }
}

TEST_CASE("greedy nets are separated and covering") {
  Space X = Space::grid_1d(8);
  CHECK(X.maximal_net(4.0) == std::vector<int>{0, 2, 4, 6});
  for (double r : {0.7, 1.0, 2.0, 4.0, 9.0}) {
    auto net = X.maximal_net(r);
    for (std::size_t a = 0; a < net.size(); ++a)
      for (std::size_t b = a + 1; b < net.size(); ++b)
        REQUIRE(X.dist(net[a], net[b]) >= r / 2);
    for (int x = 0; x < X.size(); ++x) {
      double best = 1e300;
      for (int p : net) best = std::min(best, X.dist(x, p));
      REQUIRE(best < r);
    }
  }
}

TEST_CASE("ball families cover the space at every level") {
  Space X = Space::grid_1d(8).normalized();
  auto fam0 = X.ball_family(0, 3);
  CHECK(fam0.radius == 1.0);
  CHECK(fam0.net == std::vector<int>{0, 7});
  for (const auto& b : fam0.balls) CHECK(b.members.size() == 8);
  auto fam1 = X.ball_family(1, 3);
  CHECK(fam1.radius == 0.125);
  std::vector<char> covered(8, 0);
  for (const auto& b : fam1.balls)
    for (int z : b.members) covered[z] = 1;
  CHECK(std::count(covered.begin(), covered.end(), 1) == 8);
}

TEST_CASE("vitali selection keeps disjoint balls with covering dilates") {
  Space X = Space::grid_1d(8);
  std::vector<Ball> balls = {{1, 2.0}, {3, 2.0}, {6, 2.0}};
  auto kept = bmo::vitali_disjoint(X, balls);
  REQUIRE(kept.size() == 2);
  CHECK(balls[kept[0]].center == 1);
  CHECK(balls[kept[1]].center == 6);
}

TEST_CASE("lower mass bound holds on the sample spaces") {
  for (const Space& X : {Space::grid_1d(10), Space::grid_1d(7, 1.0),
                         Space::grid_2d(3, 4), Space::binary_tree(2)}) {
    auto rep = X.lower_mass_check();
    CHECK(rep.checked > 0);
    CHECK(rep.min_slack >= -1e-12);
  }
}

TEST_CASE("adapted bumps are certified Lipschitz and supported on the dilate") {
  Space X = Space::grid_1d(8);
  Ball b{3, 2.0};
  auto bump = bmo::adapted_bump(X, b);
  for (int z : X.ball_members(b)) CHECK(bump[z] == 1.0);
  for (int x = 0; x < 8; ++x) {
    if (X.dist(3, x) >= 2 * b.radius) CHECK(bump[x] == 0.0);
    for (int y = 0; y < 8; ++y)
      REQUIRE(std::abs(bump[x] - bump[y]) <= X.dist(x, y) / b.radius + 1e-15);
  }
}

TEST_CASE("normalization scales the diameter to one half") {
  Space X = Space::grid_1d(8);
  Space Y = X.normalized();
  CHECK(Y.diameter() == 0.5);
  CHECK(Y.dist(0, 1) == doctest::Approx(0.5 / 7).epsilon(1e-15));
  CHECK(Y.total_measure() == X.total_measure());
  CHECK(Y.min_gap() == doctest::Approx(0.5 / 7).epsilon(1e-15));
}

TEST_CASE("generator weights and metrics") {
  Space P = Space::grid_1d(4, 1.0);
  CHECK(P.weight(0) == 1.0);
  CHECK(P.weight(3) == 4.0);
  Space G = Space::grid_2d(2, 2);
  CHECK(G.dist(0, 3) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  Space T = Space::binary_tree(2);
  REQUIRE(T.size() == 7);
  CHECK(T.dist(3, 4) == 2.0);  // siblings under node 1
  CHECK(T.dist(3, 2) == 3.0);  // across the root
  CHECK(T.dist(0, 6) == 2.0);
}

TEST_CASE("matrix validation rejects malformed input") {
  CHECK_THROWS_AS(Space::from_matrix("bad", 2, {0, 1, 2, 0}, {1, 1}),
                  std::invalid_argument);  // asymmetric
  CHECK_THROWS_AS(Space::from_matrix("bad", 2, {0, 0, 0, 0}, {1, 1}),
                  std::invalid_argument);  // zero off-diagonal
  CHECK_THROWS_AS(Space::from_matrix("bad", 2, {0, 1, 1, 0}, {1, -1}),
                  std::invalid_argument);  // negative weight
  CHECK_THROWS_AS(
      Space::from_matrix("bad", 3, {0, 1, 5, 1, 0, 1, 5, 1, 0}, {1, 1, 1}),
      std::invalid_argument);  // triangle violation
}

TEST_CASE("space files round-trip exactly") {
  Space X = Space::grid_2d(3, 2, 0.5);
  const char* path = "roundtrip_space.tmp";
  bmo::save_space(X, path);
  Space Y = bmo::load_space(path);
  std::remove(path);
  REQUIRE(Y.size() == X.size());
  CHECK(Y.dist_matrix() == X.dist_matrix());
  CHECK(Y.weights() == X.weights());
  const auto& a = X.canonical_balls();
  const auto& b = Y.canonical_balls();
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].center == b[i].center);
    CHECK(a[i].radius == b[i].radius);
    CHECK(a[i].members == b[i].members);
  }
  CHECK(X.doubling().centered == Y.doubling().centered);
  CHECK(X.doubling().off_center == Y.doubling().off_center);
}
