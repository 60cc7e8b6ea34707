#include "bmo/uchiyama.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace bmo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_sets(const Space& X, const std::vector<PointSet>& sets) {
  const int n = X.size();
  for (const auto& s : sets) {
    if (static_cast<int>(s.mask.size()) != n)
      throw std::invalid_argument("point set does not match the space");
  }
}

double set_ball_measure(const Space& X, const PointSet& E, const CanonicalBall& ball) {
  double m = 0.0;
  for (int x : ball.members)
    if (E.mask[x]) m += X.weight(x);
  return m;
}

}  // namespace

PointSet make_point_set(const Space& X, std::vector<int> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  PointSet s;
  s.mask.assign(X.size(), 0);
  for (int i : ids) {
    if (i < 0 || i >= X.size()) throw std::invalid_argument("point id out of range");
    s.mask[i] = 1;
    s.measure += X.weight(i);
  }
  s.ids = std::move(ids);
  return s;
}

double g_value(const Space& X, const PointSet& E, const CanonicalBall& ball, double c) {
  if (!(c > 1.0)) throw std::invalid_argument("doubling constant must exceed 1");
  if (ball.members.empty()) throw std::invalid_argument("empty ball");
  const double me = set_ball_measure(X, E, ball);
  if (me <= 0.0) return kInf;
  return std::log(ball.measure / me) / std::log(c);
}

GMonotonicity g_monotonicity_check(const Space& X, const PointSet& E,
                                   const CanonicalBall& B1, const CanonicalBall& B2,
                                   int k, double c) {
  GMonotonicity r;
  std::vector<char> in2(X.size(), 0);
  for (int x : B2.members) in2[x] = 1;
  bool subset = true;
  for (int x : B1.members)
    if (!in2[x]) { subset = false; break; }
  r.applicable = subset && std::pow(c, k) * B1.measure * (1.0 + 1e-12) >= B2.measure;
  r.lhs = g_value(X, E, B1, c);
  r.rhs = g_value(X, E, B2, c);
  if (std::isinf(r.rhs))
    r.ok = std::isinf(r.lhs);
  else
    r.ok = r.lhs >= r.rhs - k - 1e-9;
  return r;
}

int choose_q(double c, int N) {
  if (!(c > 1.0)) throw std::invalid_argument("doubling constant must exceed 1");
  if (N < 2) throw std::invalid_argument("need at least two sets");
  const double c6 = std::pow(c, 6);
  for (int q = 1; q <= 4096; ++q) {
    if (1.0 + N * c6 * q <= std::pow(2.0, q)) return q;
  }
  throw std::runtime_error("no feasible scale exponent below 4096");
}

DensityReport density_functional(const Space& X, const std::vector<PointSet>& sets,
                                 double c) {
  if (!(c > 1.0)) throw std::invalid_argument("doubling constant must exceed 1");
  if (sets.size() < 2) throw std::invalid_argument("need at least two sets");
  check_sets(X, sets);
  DensityReport rep;
  const auto& balls = X.canonical_balls();
  for (std::size_t b = 0; b < balls.size(); ++b) {
    double mn = kInf;
    for (const auto& E : sets)
      mn = std::min(mn, set_ball_measure(X, E, balls[b]) / balls[b].measure);
    if (mn > rep.value) {
      rep.value = mn;
      rep.witness_ball = b;
    }
  }
  rep.lambda_max = rep.value > 0.0 ? -std::log(rep.value) / (4.0 * std::log(c)) : kInf;
  return rep;
}

std::vector<Field> trivial_construction(const Space& X, const std::vector<PointSet>& sets) {
  if (sets.empty()) throw std::invalid_argument("need at least one set");
  check_sets(X, sets);
  const int n = X.size();
  const int N = static_cast<int>(sets.size());
  std::vector<Field> f(N, Field(n, 0.0));
  for (int x = 0; x < n; ++x) {
    int den = 0;
    for (const auto& E : sets)
      if (!E.mask[x]) ++den;
    if (den == 0) throw std::invalid_argument("a point lies in every set");
    for (int j = 0; j < N; ++j)
      if (!sets[j].mask[x]) f[j][x] = 1.0 / den;
  }
  return f;
}

namespace {

struct Removal {
  std::size_t ball;                        // index into the level family
  std::vector<std::pair<int, double>> a;   // sparse removal coefficients
};

// Invariant checks shared by every level; throws on violation.
void assert_level(const LevelReport& rep, double lambda, double tol) {
  std::ostringstream msg;
  msg.precision(17);
  if (rep.max_sum_dev > tol * std::max(1.0, lambda))
    msg << "sum deviates by " << rep.max_sum_dev;
  else if (rep.min_value < 0.0)
    msg << "negative value " << rep.min_value;
  else if (rep.max_value > lambda + tol * std::max(1.0, lambda))
    msg << "value " << rep.max_value << " exceeds " << lambda;
  else if (rep.max_g_excess > tol)
    msg << "density exponent bound exceeded by " << rep.max_g_excess;
  else if (rep.max_drop_excess > tol)
    msg << "one-step drop bound exceeded by " << rep.max_drop_excess;
  else if (rep.max_monotone_violation > tol)
    msg << "field decreased off the removal region by " << rep.max_monotone_violation;
  else if (rep.max_mass_dev > tol * std::max(1.0, lambda))
    msg << "transferred mass deviates by " << rep.max_mass_dev;
  else if (rep.lipschitz_checked && rep.max_lip_excess > tol)
    msg << "scale Lipschitz bound exceeded by " << rep.max_lip_excess;
  else
    return;
  throw std::runtime_error("construction invariant failed at level " +
                           std::to_string(rep.level) + ": " + msg.str());
}

}  // namespace

Construction uchiyama_construct(const Space& X, const std::vector<PointSet>& sets,
                                BuildParams params) {
  const int n = X.size();
  const int N = static_cast<int>(sets.size());
  if (n < 2) throw std::invalid_argument("need at least two points");
  if (N < 2) throw std::invalid_argument("need at least two sets");
  check_sets(X, sets);
  if (!(params.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(X.diameter() <= 0.5 * (1.0 + 1e-12)))
    throw std::invalid_argument("space must be normalized to diameter 1/2");

  const double c = params.c_off > 0.0 ? params.c_off : X.doubling().off_center;
  if (!(c > 1.0)) throw std::invalid_argument("doubling constant must exceed 1");
  params.c_off = c;

  const double lambda = params.lambda;
  const DensityReport dens = density_functional(X, sets, c);
  const double reference = std::pow(c, -4.0 * lambda);
  if (dens.value > reference * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "density " << dens.value << " exceeds " << reference
        << "; largest admissible lambda is " << dens.lambda_max;
    throw HypothesisError(dens.value, dens.lambda_max, msg.str());
  }

  Construction out;
  out.n_sets = N;

  if (lambda < params.trivial_threshold) {
    out.used_trivial = true;
    out.fields = trivial_construction(X, sets);
    out.raw_fields = out.fields;
    params.q = params.q > 0 ? params.q : 0;
    params.depth = 0;
    out.params = params;
    return out;
  }
  if (!(lambda > 1.0))
    throw std::invalid_argument("multi-scale construction requires lambda > 1");

  const int q = params.q > 0 ? params.q : choose_q(c, N);
  params.q = q;
  out.lipschitz_certified = 1.0 + N * std::pow(c, 6) * q <= std::pow(2.0, q) * (1.0 + 1e-12);

  int depth = params.depth;
  if (depth > 0) {
    if (!(std::pow(2.0, -static_cast<double>(depth) * q) < X.min_gap()))
      throw std::invalid_argument("depth too shallow to separate all points");
  } else {
    depth = 1;
    while (!(std::pow(2.0, -static_cast<double>(depth) * q) < X.min_gap()) && depth < 10000)
      ++depth;
  }
  params.depth = depth;
  out.params = params;

  const double four_lambda = 4.0 * lambda;
  // Owner of a ball: first set whose density exponent on the 4-dilate
  // clears 4 lambda. Small slack absorbs rounding at the hypothesis boundary.
  auto owner_of = [&](const Ball& b) {
    CanonicalBall dil = X.resolve({b.center, 4.0 * b.radius});
    for (int j = 0; j < N; ++j)
      if (g_value(X, sets[j], dil, c) >= four_lambda - 1e-9) return j;
    throw std::runtime_error("no admissible owner index; density hypothesis violated");
  };

  const BallFamily fam0 = X.ball_family(0, q);
  const Ball root{fam0.balls.front().center, fam0.balls.front().radius};
  out.root_owner = owner_of(root);

  std::vector<Field> cur(N, Field(n, 0.0));
  cur[out.root_owner].assign(n, lambda);

  // Level 0 report: the single constant field against the family's exponents.
  {
    LevelReport rep;
    rep.level = 0;
    rep.radius = fam0.radius;
    rep.ball_count = static_cast<int>(fam0.balls.size());
    rep.min_value = 0.0;
    rep.max_value = lambda;
    for (const auto& B : fam0.balls)
      for (int j = 0; j < N; ++j) {
        const double gv = g_value(X, sets[j], B, c);
        if (std::isinf(gv)) continue;
        for (int x : B.members)
          rep.max_g_excess = std::max(rep.max_g_excess, cur[j][x] - gv);
      }
    assert_level(rep, lambda, params.tol);
    out.levels.push_back(rep);
    if (params.record_trace)
      out.trace.push_back({cur, std::vector<std::vector<int>>(N)});
  }

  const double drop_cap = std::pow(c, 3) * q;
  for (int k = 1; k <= depth; ++k) {
    const BallFamily fam = X.ball_family(k, q);
    const double r = fam.radius;
    const std::size_t nb = fam.balls.size();

    std::vector<int> owner_cache(nb, -1);
    auto owner = [&](std::size_t bi) {
      if (owner_cache[bi] < 0)
        owner_cache[bi] = owner_of({fam.balls[bi].center, fam.balls[bi].radius});
      return owner_cache[bi];
    };

    std::vector<std::vector<double>> g(N, std::vector<double>(nb));
    for (int j = 0; j < N; ++j)
      for (std::size_t bi = 0; bi < nb; ++bi)
        g[j][bi] = g_value(X, sets[j], fam.balls[bi], c);

    std::vector<Field> vt(N), w(N, Field(n, 0.0));
    std::vector<std::vector<Removal>> removals(N);
    std::vector<std::vector<char>> touched(N, std::vector<char>(n, 0));
    for (int j = 0; j < N; ++j) {
      Field rem = cur[j];
      for (std::size_t bi = 0; bi < nb; ++bi) {
        if (std::isinf(g[j][bi])) continue;
        double sup = 0.0;
        for (int x : fam.balls[bi].members) sup = std::max(sup, cur[j][x]);
        if (!(sup > g[j][bi])) continue;
        Removal rm;
        rm.ball = bi;
        const int center = fam.balls[bi].center;
        for (int x : X.ball_members({center, 2.0 * r})) {
          touched[j][x] = 1;
          const double bump = std::min(1.0, 2.0 - X.dist(center, x) / r);
          const double a = std::min(q * bump, rem[x]);
          rem[x] -= a;  // exact zero when the removal takes everything
          if (a != 0.0) rm.a.emplace_back(x, a);
        }
        removals[j].push_back(std::move(rm));
      }
      vt[j] = std::move(rem);
    }

    for (int j = 0; j < N; ++j)
      for (const auto& rm : removals[j]) {
        const int dst = owner(rm.ball);
        for (const auto& [x, a] : rm.a) w[dst][x] += a;
      }

    std::vector<Field> next(N, Field(n, 0.0));
    for (int j = 0; j < N; ++j)
      for (int x = 0; x < n; ++x) next[j][x] = vt[j][x] + w[j][x];

    LevelReport rep;
    rep.level = k;
    rep.radius = r;
    rep.ball_count = static_cast<int>(nb);
    rep.min_value = kInf;
    rep.max_value = -kInf;
    for (int j = 0; j < N; ++j) rep.removal_count += static_cast<int>(removals[j].size());
    for (int x = 0; x < n; ++x) {
      double sum = 0.0, moved = 0.0, added = 0.0;
      for (int j = 0; j < N; ++j) {
        const double v = next[j][x];
        sum += v;
        moved += cur[j][x] - vt[j][x];
        added += w[j][x];
        rep.min_value = std::min(rep.min_value, v);
        rep.max_value = std::max(rep.max_value, v);
        rep.max_drop_excess = std::max(rep.max_drop_excess, cur[j][x] - v - drop_cap);
        if (!touched[j][x])
          rep.max_monotone_violation = std::max(rep.max_monotone_violation, cur[j][x] - v);
      }
      rep.max_sum_dev = std::max(rep.max_sum_dev, std::abs(sum - lambda));
      rep.max_mass_dev = std::max(rep.max_mass_dev, std::abs(added - moved));
    }
    for (std::size_t bi = 0; bi < nb; ++bi)
      for (int j = 0; j < N; ++j) {
        if (std::isinf(g[j][bi])) continue;
        for (int x : fam.balls[bi].members)
          rep.max_g_excess = std::max(rep.max_g_excess, next[j][x] - g[j][bi]);
      }
    rep.lipschitz_checked = out.lipschitz_certified;
    if (rep.lipschitz_checked) {
      const double L = std::pow(2.0, static_cast<double>(k + 1) * q);
      for (int j = 0; j < N; ++j)
        for (int x = 0; x < n; ++x)
          for (int y = x + 1; y < n; ++y)
            rep.max_lip_excess = std::max(
                rep.max_lip_excess,
                std::abs(next[j][x] - next[j][y]) - L * X.dist(x, y));
    }
    assert_level(rep, lambda, params.tol);
    out.levels.push_back(rep);

    if (params.record_trace) {
      TraceLevel tl;
      tl.fields = next;
      tl.removal_centers.resize(N);
      for (int j = 0; j < N; ++j)
        for (const auto& rm : removals[j])
          tl.removal_centers[j].push_back(fam.balls[rm.ball].center);
      out.trace.push_back(std::move(tl));
    }
    cur = std::move(next);
  }

  for (int j = 0; j < N; ++j)
    for (int x : sets[j].ids)
      if (cur[j][x] != 0.0) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "field " << j << " does not vanish exactly on its set at point " << x
            << " (value " << cur[j][x] << "); a larger scale exponent separates the sets";
        throw std::runtime_error(msg.str());
      }

  out.raw_fields = cur;
  out.fields.assign(N, Field(n, 0.0));
  for (int j = 0; j < N; ++j)
    for (int x = 0; x < n; ++x) out.fields[j][x] = cur[j][x] / lambda;
  return out;
}

VerifyReport verify_construction(const Space& X, const std::vector<Field>& fields,
                                 const std::vector<PointSet>& sets, double lambda) {
  if (fields.size() != sets.size() || fields.empty())
    throw std::invalid_argument("fields and sets must match");
  check_sets(X, sets);
  const int n = X.size();
  const int N = static_cast<int>(fields.size());
  for (const auto& f : fields)
    if (static_cast<int>(f.size()) != n)
      throw std::invalid_argument("field does not match the space");

  VerifyReport rep;
  for (int x = 0; x < n; ++x) {
    double sum = 0.0;
    for (int j = 0; j < N; ++j) {
      const double v = fields[j][x];
      sum += v;
      rep.range_dev = std::max({rep.range_dev, -v, v - 1.0});
    }
    rep.sum_dev = std::max(rep.sum_dev, std::abs(sum - 1.0));
  }
  for (int j = 0; j < N; ++j)
    for (int x : sets[j].ids)
      rep.vanish_dev = std::max(rep.vanish_dev, std::abs(fields[j][x]));
  rep.sum_ok = rep.sum_dev <= 1e-12;
  rep.range_ok = rep.range_dev <= 1e-12;
  rep.vanish_ok = rep.vanish_dev == 0.0;
  rep.norms.resize(N);
  double mx = 0.0;
  for (int j = 0; j < N; ++j) {
    rep.norms[j] = bmo_norm(X, fields[j]).value;
    mx = std::max(mx, rep.norms[j]);
  }
  rep.c1_emp = lambda * mx;
  return rep;
}

NecessityReport necessity_check(const Space& X, const std::vector<Field>& fields,
                                const std::vector<PointSet>& sets, double lambda,
                                double c2, double c) {
  if (!(c > 1.0)) throw std::invalid_argument("doubling constant must exceed 1");
  if (!(lambda > 0.0) || !(c2 > 0.0)) throw std::invalid_argument("need positive constants");
  NecessityReport rep;
  const VerifyReport v = verify_construction(X, fields, sets, lambda);
  double mx = 0.0;
  for (double nm : v.norms) mx = std::max(mx, nm);
  if (v.sum_dev > 1e-9 || v.range_dev > 1e-9 || v.vanish_dev > 1e-9 ||
      mx > (c2 / lambda) * (1.0 + 1e-9))
    return rep;
  rep.applicable = true;
  rep.inclusion_ok = true;

  const int N = static_cast<int>(fields.size());
  const auto& balls = X.canonical_balls();
  for (std::size_t b = 0; b < balls.size(); ++b) {
    int j0 = -1;
    double best = -1.0;
    for (int j = 0; j < N; ++j) {
      const double avg = ball_average(X, fields[j], balls[b].members);
      if (avg > best) best = avg;
      if (j0 < 0 && avg >= 1.0 / N - 1e-12) j0 = j;
    }
    if (j0 < 0) j0 = 0;  // pigeonhole: some average reaches 1/N up to rounding
    const double avg = ball_average(X, fields[j0], balls[b].members);
    const double me = set_ball_measure(X, sets[j0], balls[b]);
    // On its own set the field nearly vanishes, so the deviation there is
    // at least the average; the threshold allows for that slack.
    const double thresh = std::min(1.0 / N, avg) - 1e-9;
    const double tail = tail_measure(X, fields[j0], balls[b], thresh, true);
    if (me > tail * (1.0 + 1e-9)) rep.inclusion_ok = false;
    const double density = me / balls[b].measure;
    if (density > rep.density) {
      rep.density = density;
      rep.witness_ball = b;
    }
  }
  rep.exponent = rep.density > 0.0 ? -std::log(rep.density) / (4.0 * std::log(c)) : kInf;
  rep.reference = std::pow(c, -4.0 * lambda);
  return rep;
}

LevelBoundReport level_bound_check(const Space& X, const Construction& built,
                                   const std::vector<PointSet>& sets) {
  LevelBoundReport rep;
  if (built.used_trivial) return rep;
  check_sets(X, sets);
  const double c = built.params.c_off;
  const int q = built.params.q;
  const double rh = std::pow(2.0, -static_cast<double>(built.params.depth) * q);
  const double cap = 8.0 * std::pow(2.0, q) + 6.0;
  const auto& balls = X.canonical_balls();
  for (const auto& B : balls) {
    if (B.radius > 4.0 * rh * (1.0 + 1e-12)) continue;
    for (std::size_t j = 0; j < sets.size(); ++j) {
      const double gv = g_value(X, sets[j], B, c);
      if (std::isinf(gv)) continue;
      const double bound = gv - std::log2(B.radius / rh) / 3.0 + cap;
      for (int x : B.members)
        rep.max_excess = std::max(rep.max_excess, built.raw_fields[j][x] - bound);
      ++rep.checked;
    }
  }
  rep.ok = rep.max_excess <= 1e-9;
  return rep;
}

}  // namespace bmo
