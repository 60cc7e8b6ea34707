#include <cmath>
#include <numeric>
#include <vector>

#include "bmo/maps.hpp"
#include "doctest.h"

using bmo::make_point_set;
using bmo::PointMap;
using bmo::PointSet;
using bmo::Space;

namespace {

PointMap identity_map(int n) {
  PointMap F(n);
  std::iota(F.begin(), F.end(), 0);
  return F;
}

PointMap reflection_map(int n) {
  PointMap F(n);
  for (int x = 0; x < n; ++x) F[x] = n - 1 - x;
  return F;
}

std::vector<PointSet> halves(const Space& X) {
  std::vector<int> a, b;
  for (int x = 0; x < X.size(); ++x) (x < X.size() / 2 ? a : b).push_back(x);
  return {make_point_set(X, a), make_point_set(X, b)};
}

}  // namespace

TEST_CASE("preimages and compositions") {
  Space X = Space::grid_1d(8);
  auto F = reflection_map(8);
  auto pre = bmo::preimage(X, F, make_point_set(X, {0, 1}));
  CHECK(pre.ids == std::vector<int>{6, 7});
  bmo::Field f = {0, 1, 2, 3, 4, 5, 6, 7};
  auto g = bmo::compose_field(f, F);
  CHECK(g[0] == 7.0);
  CHECK(g[7] == 0.0);
  CHECK_THROWS_AS(bmo::check_map(X, PointMap{0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(bmo::check_map(X, PointMap(8, 9)), std::invalid_argument);
}

TEST_CASE("joint density of set pairs") {
  Space X = Space::grid_1d(8);
  auto sets = halves(X);
  CHECK(bmo::two_set_density(X, sets[0], sets[1]) == 0.5);
  CHECK(bmo::two_set_density(X, make_point_set(X, {0}), make_point_set(X, {7})) ==
        0.125);
}

TEST_CASE("trial families are deterministic in the seed") {
  Space X = Space::grid_1d(8);
  auto a = bmo::make_pair_family(X, 9, 32);
  auto b = bmo::make_pair_family(X, 9, 32);
  REQUIRE(a.size() == 32);
  REQUIRE(b.size() == 32);
  bool all_equal = true;
  for (std::size_t i = 0; i < a.size(); ++i)
    all_equal = all_equal && a[i].first.ids == b[i].first.ids &&
                a[i].second.ids == b[i].second.ids;
  CHECK(all_equal);
  CHECK(a[0].first.ids.size() == 8);  // trial zero pairs the whole space
  auto c = bmo::make_pair_family(X, 10, 32);
  bool differs = false;
  for (std::size_t i = 0; i < a.size(); ++i)
    differs = differs || a[i].first.ids != c[i].first.ids;
  CHECK(differs);
}

TEST_CASE("identity fits the exact power bound") {
  Space X = Space::grid_1d(8);
  auto F = identity_map(8);
  auto fit = bmo::condition_i_fit(X, F, bmo::make_pair_family(X, 5, 64));
  CHECK(fit.K == 1.0);
  CHECK(fit.alpha == 1.0);
  CHECK(!fit.degenerate);
  CHECK(fit.witness == 0);
  auto ex = bmo::condition_i_fit_exhaustive(Space::grid_1d(6), identity_map(6));
  CHECK(ex.K == 1.0);
  CHECK(ex.alpha == 1.0);
}

TEST_CASE("reflection is an isometry and fits the same bound") {
  Space X = Space::grid_1d(8);
  auto F = reflection_map(8);
  auto fit = bmo::condition_i_fit(X, F, bmo::make_pair_family(X, 5, 64));
  CHECK(fit.K == 1.0);
  CHECK(fit.alpha == 1.0);
  auto ex = bmo::condition_i_fit_exhaustive(Space::grid_1d(6), reflection_map(6));
  CHECK(ex.K == 1.0);
  CHECK(ex.alpha == 1.0);
}

TEST_CASE("exhaustive fit rejects large spaces") {
  CHECK_THROWS_AS(
      bmo::condition_i_fit_exhaustive(Space::grid_1d(13), identity_map(13)),
      std::invalid_argument);
}

TEST_CASE("operator norms of the basic maps") {
  Space X = Space::grid_1d(8);
  auto fam = bmo::default_field_family(X, 7);
  REQUIRE(fam.size() >= 5);
  auto id = bmo::operator_norm_estimate(X, identity_map(8), fam);
  CHECK(id.value == 1.0);
  CHECK(id.fields_used >= 5);
  auto refl = bmo::operator_norm_estimate(X, reflection_map(8), fam);
  CHECK(refl.value == doctest::Approx(1.0).epsilon(1e-12));
  // composing with a constant map leaves only summation roundoff
  auto constant = bmo::operator_norm_estimate(X, PointMap(8, 3), fam);
  CHECK(constant.value <= 1e-12);
}

TEST_CASE("constant maps fail the threshold condition with a full witness") {
  Space X = Space::grid_1d(8);
  auto pairs = bmo::make_pair_family(X, 5, 64);
  auto rep = bmo::condition_ii_check(X, PointMap(8, 3), pairs, 0.2, 1.5);
  CHECK(!rep.pass);
  CHECK(rep.violations >= 1);
  CHECK(rep.witness == 0);
  CHECK(rep.witness_x == 1.0);
  CHECK(rep.witness_y == 1.0);
  CHECK(rep.checked == pairs.size());  // every pair has density below 1.5
  // the identity passes the same check at a threshold matching gamma
  auto ok = bmo::condition_ii_check(X, identity_map(8), pairs, 0.2, 0.2);
  CHECK(ok.pass);
}

TEST_CASE("fitted power bound implies the threshold condition") {
  Space X = Space::grid_1d(8);
  for (const auto& F : {identity_map(8), reflection_map(8)}) {
    auto rep = bmo::implication_check(X, F, 11, 501, 0.2);
    REQUIRE(rep.applicable);
    CHECK(rep.gamma == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(rep.counterexamples == 0);
    CHECK(rep.checked >= 1);  // pairs below the threshold are rare but present
  }
}

TEST_CASE("level-set chain bounds the composition norm") {
  Space X = Space::grid_1d(8);
  auto fam = bmo::default_field_family(X, 7);
  auto rep = bmo::condition_chain_check(X, identity_map(8), fam, 5, 48);
  CHECK(rep.ok);
  CHECK(rep.K == 1.0);
  CHECK(rep.alpha == 1.0);
  CHECK(rep.opnorm == 1.0);
  CHECK(rep.c_emp == 1.0);
  REQUIRE(!rep.records.empty());
  for (const auto& r : rep.records) {
    CHECK(r.hypothesis_ok);
    CHECK(r.pass);
    CHECK(r.bound >= r.composed_norm);
  }
}

TEST_CASE("roundtrip through the extremal pair is tight for isometries") {
  Space X = Space::grid_1d(8);
  auto sets = halves(X);
  auto rt = bmo::gotoh_roundtrip(X, identity_map(8), sets[0], sets[1], 21);
  CHECK(!rt.degenerate);
  CHECK(rt.used_trivial);  // the admissible lambda sits below the threshold
  CHECK(rt.pass);
  CHECK(rt.measured == 0.5);
  CHECK(rt.predicted == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rt.constant == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(rt.opnorm == 1.0);

  auto rr = bmo::gotoh_roundtrip(X, reflection_map(8), sets[0], sets[1], 21);
  CHECK(rr.pass);
  CHECK(rr.measured == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rr.predicted == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("roundtrip validates disjointness and handles empty sets") {
  Space X = Space::grid_1d(8);
  CHECK_THROWS_AS(bmo::gotoh_roundtrip(X, identity_map(8), make_point_set(X, {0, 1}),
                                       make_point_set(X, {1, 2}), 1),
                  std::invalid_argument);
  auto rt = bmo::gotoh_roundtrip(X, identity_map(8), make_point_set(X, {}),
                                 make_point_set(X, {1, 2}), 1);
  CHECK(rt.degenerate);
  CHECK(rt.pass);
}
