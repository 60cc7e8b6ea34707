#include "bmo/maps.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <unordered_map>

#include "bmo/rng.hpp"

namespace bmo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void check_map(const Space& X, const PointMap& F) {
  if (static_cast<int>(F.size()) != X.size())
    throw std::invalid_argument("map does not match the space");
  for (int v : F)
    if (v < 0 || v >= X.size()) throw std::invalid_argument("map target out of range");
}

PointSet preimage(const Space& X, const PointMap& F, const PointSet& E) {
  check_map(X, F);
  if (static_cast<int>(E.mask.size()) != X.size())
    throw std::invalid_argument("point set does not match the space");
  std::vector<int> ids;
  for (int x = 0; x < X.size(); ++x)
    if (E.mask[F[x]]) ids.push_back(x);
  return make_point_set(X, std::move(ids));
}

Field compose_field(const Field& f, const PointMap& F) {
  Field g(F.size());
  for (std::size_t x = 0; x < F.size(); ++x) {
    if (F[x] < 0 || F[x] >= static_cast<int>(f.size()))
      throw std::invalid_argument("map target out of range");
    g[x] = f[F[x]];
  }
  return g;
}

double two_set_density(const Space& X, const PointSet& A, const PointSet& B) {
  return density_functional(X, {A, B}, 2.0).value;
}

namespace {

PointSet random_subset(const Space& X, Rng& rng, double p) {
  std::vector<int> ids;
  for (int x = 0; x < X.size(); ++x)
    if (rng.uniform() < p) ids.push_back(x);
  if (ids.empty()) ids.push_back(rng.index(X.size()));
  return make_point_set(X, std::move(ids));
}

PointSet level_set(const Space& X, Rng& rng) {
  const int p = rng.index(X.size());
  const double thr = rng.uniform() * X.diameter();
  std::vector<int> ids;
  for (int x = 0; x < X.size(); ++x)
    if (X.dist(p, x) <= thr) ids.push_back(x);
  return make_point_set(X, std::move(ids));
}

}  // namespace

std::vector<std::pair<PointSet, PointSet>> make_pair_family(const Space& X,
                                                            std::uint64_t seed,
                                                            int trials) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  const int n = X.size();
  Rng rng(seed);
  std::vector<std::pair<PointSet, PointSet>> out;
  out.reserve(trials);
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  out.emplace_back(make_point_set(X, all), make_point_set(X, all));
  const auto& balls = X.canonical_balls();
  for (int t = 1; t < trials; ++t) {
    switch (n >= 2 ? (t - 1) % 5 : 0) {
      case 0:
        out.emplace_back(random_subset(X, rng, 0.5), random_subset(X, rng, 0.5));
        break;
      case 1: {
        const auto& b1 = balls[rng.index(balls.size())];
        const auto& b2 = balls[rng.index(balls.size())];
        out.emplace_back(make_point_set(X, b1.members), make_point_set(X, b2.members));
        break;
      }
      case 2:
        out.emplace_back(level_set(X, rng), level_set(X, rng));
        break;
      case 3: {
        const int p = rng.index(n);
        std::vector<int> ord(n);
        std::iota(ord.begin(), ord.end(), 0);
        std::sort(ord.begin(), ord.end(), [&](int a, int b) {
          if (X.dist(p, a) != X.dist(p, b)) return X.dist(p, a) < X.dist(p, b);
          return a < b;
        });
        const int half = (n + 1) / 2;
        out.emplace_back(
            make_point_set(X, {ord.begin(), ord.begin() + half}),
            make_point_set(X, {ord.begin() + half, ord.end()}));
        break;
      }
      default: {
        const int z = rng.index(n);
        auto s1 = random_subset(X, rng, 0.125);
        auto s2 = random_subset(X, rng, 0.125);
        auto ids1 = s1.ids;
        auto ids2 = s2.ids;
        ids1.push_back(z);
        ids2.push_back(z);
        out.emplace_back(make_point_set(X, std::move(ids1)),
                         make_point_set(X, std::move(ids2)));
        break;
      }
    }
  }
  return out;
}

namespace {

// Shared fit core over precomputed (input, output) density pairs.
FitResult fit_from_samples(const std::vector<std::pair<double, double>>& xy) {
  FitResult res;
  res.trials = xy.size();
  for (std::size_t i = 0; i < xy.size(); ++i)
    if (xy[i].first <= 0.0 && xy[i].second > 0.0) {
      res.degenerate = true;
      res.K = kInf;
      res.alpha = 1.0;
      res.witness = i;
      return res;
    }
  double best_obj = kInf;
  for (int i = 20; i >= 1; --i) {
    const double alpha = 0.05 * i;
    double K = 0.0;
    std::size_t wit = 0;
    for (std::size_t t = 0; t < xy.size(); ++t) {
      if (xy[t].first <= 0.0) continue;
      const double v = xy[t].second / std::pow(xy[t].first, alpha);
      if (v > K) {
        K = v;
        wit = t;
      }
    }
    const double obj = K / alpha;
    if (obj < best_obj) {
      best_obj = obj;
      res.K = K;
      res.alpha = alpha;
      res.witness = wit;
    }
  }
  return res;
}

}  // namespace

FitResult condition_i_fit(const Space& X, const PointMap& F,
                          const std::vector<std::pair<PointSet, PointSet>>& pairs) {
  check_map(X, F);
  std::vector<std::pair<double, double>> xy;
  xy.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    const double x = two_set_density(X, a, b);
    const double y = two_set_density(X, preimage(X, F, a), preimage(X, F, b));
    xy.emplace_back(x, y);
  }
  return fit_from_samples(xy);
}

FitResult condition_i_fit_exhaustive(const Space& X, const PointMap& F) {
  check_map(X, F);
  const int n = X.size();
  if (n > 12) throw std::invalid_argument("exhaustive mode handles at most 12 points");
  const std::uint32_t M = 1u << n;
  const auto& balls = X.canonical_balls();
  const std::size_t nb = balls.size();

  // Per ball, density of every subset within the ball.
  std::vector<std::vector<double>> tab(nb, std::vector<double>(M, 0.0));
  for (std::size_t b = 0; b < nb; ++b) {
    std::vector<double> wm(n, 0.0);
    for (int x : balls[b].members) wm[x] = X.weight(x) / balls[b].measure;
    auto& t = tab[b];
    for (std::uint32_t S = 1; S < M; ++S) {
      const int low = std::countr_zero(S);
      t[S] = t[S & (S - 1)] + wm[low];
    }
  }
  std::vector<std::uint32_t> pre(M, 0);
  for (std::uint32_t S = 1; S < M; ++S) {
    std::uint32_t m = 0;
    for (int x = 0; x < n; ++x)
      if (S >> F[x] & 1u) m |= 1u << x;
    pre[S] = m;
  }

  // Only the max output density per distinct input density matters.
  std::unordered_map<double, double> frontier;
  for (std::uint32_t S1 = 1; S1 < M; ++S1)
    for (std::uint32_t S2 = 1; S2 < M; ++S2) {
      double x = 0.0, y = 0.0;
      const std::uint32_t p1 = pre[S1], p2 = pre[S2];
      for (std::size_t b = 0; b < nb; ++b) {
        x = std::max(x, std::min(tab[b][S1], tab[b][S2]));
        if (p1 && p2) y = std::max(y, std::min(tab[b][p1], tab[b][p2]));
      }
      auto& ym = frontier[x];
      ym = std::max(ym, y);
    }
  std::vector<std::pair<double, double>> xy(frontier.begin(), frontier.end());
  std::sort(xy.begin(), xy.end());
  FitResult res = fit_from_samples(xy);
  res.trials = (M - 1) * static_cast<std::size_t>(M - 1);
  return res;
}

ThresholdReport condition_ii_check(const Space& X, const PointMap& F,
                                   const std::vector<std::pair<PointSet, PointSet>>& pairs,
                                   double gamma, double lambda) {
  check_map(X, F);
  if (!(gamma > 0.0 && gamma < 0.25))
    throw std::invalid_argument("gamma must lie in (0, 1/4)");
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  ThresholdReport rep;
  rep.gamma = gamma;
  rep.lambda = lambda;
  const double c = X.doubling().off_center;
  rep.gamma_cap = 1.0 / (4.0 * std::pow(c, 3));
  rep.below_cap = gamma < rep.gamma_cap;
  for (std::size_t t = 0; t < pairs.size(); ++t) {
    const double x = two_set_density(X, pairs[t].first, pairs[t].second);
    if (!(x < lambda)) continue;
    ++rep.checked;
    const double y = two_set_density(X, preimage(X, F, pairs[t].first),
                                     preimage(X, F, pairs[t].second));
    if (y >= gamma * (1.0 + 1e-9)) {
      if (rep.violations == 0) {
        rep.witness = t;
        rep.witness_x = x;
        rep.witness_y = y;
      }
      ++rep.violations;
    }
  }
  rep.pass = rep.violations == 0;
  return rep;
}

std::vector<Field> default_field_family(const Space& X, std::uint64_t seed) {
  const int n = X.size();
  Rng rng(seed);
  std::vector<Field> fam;
  std::vector<int> centers = {0, n / 2, n - 1};
  centers.erase(std::unique(centers.begin(), centers.end()), centers.end());
  const double eps = X.min_gap() > 0.0 ? 0.5 * X.min_gap() : 1e-3;
  for (int p : centers) {
    Field f(n);
    for (int x = 0; x < n; ++x) f[x] = std::log(eps + X.dist(p, x));
    fam.push_back(std::move(f));
  }
  if (n >= 2) {
    for (int rep = 0; rep < 3; ++rep) {
      std::vector<int> ids;
      while (ids.empty() || static_cast<int>(ids.size()) == n) {
        ids.clear();
        for (int x = 0; x < n; ++x)
          if (rng.coin(0.5)) ids.push_back(x);
      }
      Field f(n, 0.0);
      for (int x : ids) f[x] = 1.0;
      fam.push_back(std::move(f));
    }
    const int p = rng.index(n);
    std::vector<int> ord(n);
    std::iota(ord.begin(), ord.end(), 0);
    std::sort(ord.begin(), ord.end(), [&](int a, int b) {
      if (X.dist(p, a) != X.dist(p, b)) return X.dist(p, a) < X.dist(p, b);
      return a < b;
    });
    const int half = (n + 1) / 2;
    const auto s1 = make_point_set(X, {ord.begin(), ord.begin() + half});
    const auto s2 = make_point_set(X, {ord.begin() + half, ord.end()});
    for (auto& f : trivial_construction(X, {s1, s2})) fam.push_back(std::move(f));
  }
  return fam;
}

OpNormResult operator_norm_estimate(const Space& X, const PointMap& F,
                                    const std::vector<Field>& family) {
  check_map(X, F);
  OpNormResult res;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const double nf = bmo_norm(X, family[i]).value;
    if (!(nf > 0.0)) continue;
    const double ng = bmo_norm(X, compose_field(family[i], F)).value;
    const double ratio = ng / nf;
    for (double tau : {3.7, 0.25}) {
      Field sf(family[i].size());
      for (std::size_t x = 0; x < sf.size(); ++x) sf[x] = tau * family[i][x];
      const double rs = bmo_norm(X, compose_field(sf, F)).value / bmo_norm(X, sf).value;
      if (std::abs(rs - ratio) > 1e-9 * std::max(1.0, ratio))
        throw std::runtime_error("composition ratio changed under scaling");
    }
    ++res.fields_used;
    if (ratio > res.value) {
      res.value = ratio;
      res.witness = i;
    }
  }
  return res;
}

ChainReport condition_chain_check(const Space& X, const PointMap& F,
                                  const std::vector<Field>& family,
                                  std::uint64_t seed, int trials) {
  check_map(X, F);
  ChainReport rep;
  const FitResult fit = condition_i_fit(X, F, make_pair_family(X, seed, trials));
  rep.K = fit.K;
  rep.alpha = fit.alpha;
  rep.opnorm = operator_norm_estimate(X, F, family).value;
  rep.c_emp = fit.K > 0.0 ? rep.opnorm * fit.alpha / fit.K : 0.0;
  rep.ok = true;
  for (const auto& f : family) {
    const double nf = bmo_norm(X, f).value;
    if (!(nf > 0.0)) continue;
    const double a = jn_constant(X, f);
    if (!std::isfinite(a)) continue;
    ChainRecord rec;
    rec.norm = nf;
    rec.jn_a = a;
    rec.c1 = fit.K * std::pow(2.0, fit.alpha);
    rec.c2 = fit.alpha * a / (2.0 * nf);
    const ConverseReport cv = jn_converse(X, compose_field(f, F), rec.c1, rec.c2);
    rec.hypothesis_ok = cv.hypothesis_ok;
    rec.bound = cv.bound;
    rec.composed_norm = cv.norm;
    rec.pass = cv.pass;
    if (rec.hypothesis_ok && !rec.pass) rep.ok = false;
    rep.records.push_back(rec);
  }
  if (rep.c_emp > 0.0 &&
      rep.opnorm > rep.c_emp * rep.K / rep.alpha * (1.0 + 1e-9))
    throw std::runtime_error("operator norm escapes the fitted power bound");
  return rep;
}

ImplicationReport implication_check(const Space& X, const PointMap& F,
                                    std::uint64_t seed, int trials, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  ImplicationReport rep;
  rep.lambda = lambda;
  const auto pairs = make_pair_family(X, seed, trials);
  const FitResult fit = condition_i_fit(X, F, pairs);
  rep.K = fit.K;
  rep.alpha = fit.alpha;
  rep.gamma = fit.K * std::pow(lambda, fit.alpha);
  rep.applicable = std::isfinite(rep.gamma) && rep.gamma > 0.0 && rep.gamma < 0.25;
  if (!rep.applicable) return rep;
  const ThresholdReport th = condition_ii_check(X, F, pairs, rep.gamma, lambda);
  rep.counterexamples = th.violations;
  rep.checked = th.checked;
  return rep;
}

RoundtripResult gotoh_roundtrip(const Space& X, const PointMap& F,
                                const PointSet& E1, const PointSet& E2,
                                std::uint64_t seed) {
  check_map(X, F);
  for (int x = 0; x < X.size(); ++x)
    if (E1.mask[x] && E2.mask[x])
      throw std::invalid_argument("the two sets must be disjoint");
  const Space Xn =
      X.diameter() <= 0.5 * (1.0 + 1e-12) ? X : X.normalized();

  RoundtripResult res;
  res.density = two_set_density(Xn, E1, E2);
  if (!(res.density > 0.0)) {
    res.degenerate = true;
    res.pass = true;
    return res;
  }
  const double c = Xn.doubling().off_center;
  res.lambda_star = -std::log(res.density) / (4.0 * std::log(c));
  if (!(res.lambda_star > 0.0)) {
    res.degenerate = true;
    res.pass = true;
    return res;
  }

  BuildParams bp;
  bp.lambda = res.lambda_star;
  const Construction built = uchiyama_construct(Xn, {E1, E2}, bp);
  res.used_trivial = built.used_trivial;

  std::vector<Field> g;
  double norm_max = 0.0;
  for (const auto& f : built.fields) {
    g.push_back(compose_field(f, F));
    norm_max = std::max(norm_max, bmo_norm(Xn, f).value);
  }
  res.c1_emp = res.lambda_star * norm_max;
  res.opnorm = operator_norm_estimate(Xn, F, default_field_family(Xn, seed)).value;
  res.jn_a = kInf;
  for (const auto& gk : g) res.jn_a = std::min(res.jn_a, jn_constant(Xn, gk));
  res.constant = res.jn_a / (8.0 * res.c1_emp * std::log(c));

  std::vector<PointSet> pre;
  pre.push_back(preimage(Xn, F, E1));
  pre.push_back(preimage(Xn, F, E2));

  const auto& balls = Xn.canonical_balls();
  for (std::size_t b = 0; b < balls.size(); ++b) {
    int k0 = -1;
    double best = -1.0;
    int arg = 0;
    for (int k = 0; k < 2; ++k) {
      const double avg = ball_average(Xn, g[k], balls[b].members);
      if (avg > best) {
        best = avg;
        arg = k;
      }
      if (k0 < 0 && avg >= 0.5) k0 = k;
    }
    if (k0 < 0) k0 = arg;
    const double avg = ball_average(Xn, g[k0], balls[b].members);
    double me = 0.0;
    for (int x : balls[b].members)
      if (pre[k0].mask[x]) me += Xn.weight(x);
    const double tail =
        tail_measure(Xn, g[k0], balls[b], std::min(0.5, avg), true);
    if (me > tail * (1.0 + 1e-9)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "preimage mass " << me << " escapes the deviation tail " << tail
          << " on ball " << b;
      throw std::runtime_error(msg.str());
    }
    const double density = me / balls[b].measure;
    if (density > res.measured) {
      res.measured = density;
      res.witness_ball = b;
    }
  }
  res.predicted = 2.0 * std::pow(res.density, res.constant / res.opnorm);
  res.pass = res.measured <= res.predicted * (1.0 + 1e-9);
  return res;
}

}  // namespace bmo
