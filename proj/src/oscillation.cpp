#include "bmo/oscillation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace bmo {

namespace {

constexpr double kSlack = 1.0 + 1e-9;
constexpr double kInf = std::numeric_limits<double>::infinity();

void check_field(const Space& X, const Field& f) {
  if (f.size() != std::size_t(X.size()))
    throw std::invalid_argument("field: value count does not match the space");
  for (double v : f)
    if (!std::isfinite(v)) throw std::invalid_argument("field: values must be finite");
}

// ball values sorted ascending, deduplicated, with the measures of
// {f <= v_i} (le) and {f >= v_i} (ge) inside the ball
struct BallLevels {
  std::vector<double> v;
  std::vector<double> le, ge;
  double measure = 0.0;
};

BallLevels ball_levels(const Space& X, const Field& f, const CanonicalBall& b) {
  std::vector<std::pair<double, double>> vw;
  vw.reserve(b.members.size());
  for (int p : b.members) vw.emplace_back(f[p], X.weight(p));
  std::sort(vw.begin(), vw.end(),
            [](const auto& a, const auto& c) { return a.first < c.first; });
  BallLevels out;
  out.measure = b.measure;
  for (std::size_t i = 0; i < vw.size();) {
    std::size_t j = i;
    double w = 0.0;
    while (j < vw.size() && vw[j].first == vw[i].first) w += vw[j++].second;
    out.v.push_back(vw[i].first);
    out.le.push_back((out.le.empty() ? 0.0 : out.le.back()) + w);
    i = j;
  }
  out.ge.resize(out.v.size());
  double acc = 0.0;
  for (std::size_t i = out.v.size(); i-- > 0;) {
    acc += out.le[i] - (i ? out.le[i - 1] : 0.0);
    out.ge[i] = acc;
  }
  return out;
}

}  // namespace

double ball_average(const Space& X, const Field& f, const std::vector<int>& members) {
  if (members.empty()) throw std::invalid_argument("ball_average: empty member set");
  double num = 0.0, den = 0.0;
  for (int p : members) {
    num += X.weight(p) * f[p];
    den += X.weight(p);
  }
  return num / den;
}

NormResult bmo_norm(const Space& X, const Field& f) {
  check_field(X, f);
  const auto& balls = X.canonical_balls();
  NormResult res;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const auto& b = balls[i];
    double avg = ball_average(X, f, b.members);
    double dev = 0.0;
    for (int p : b.members) dev += X.weight(p) * std::abs(f[p] - avg);
    dev /= b.measure;
    if (dev > res.value) {
      res.value = dev;
      res.ball_index = i;
    }
  }
  return res;
}

NormResult dual_norm(const Space& X, const Field& f) {
  check_field(X, f);
  const auto& balls = X.canonical_balls();
  NormResult res;
  for (std::size_t i = 0; i < balls.size(); ++i) {
    const auto& b = balls[i];
    const auto lv = ball_levels(X, f, b);
    double half = 0.5 * lv.measure;
    double median = lv.v.back();
    for (std::size_t k = 0; k < lv.v.size(); ++k)
      if (lv.le[k] >= half) {
        median = lv.v[k];
        break;
      }
    double dev = 0.0;
    for (int p : b.members) dev += X.weight(p) * std::abs(f[p] - median);
    dev /= lv.measure;
    if (dev > res.value) {
      res.value = dev;
      res.ball_index = i;
    }
  }
  return res;
}

double tail_measure(const Space& X, const Field& f, const CanonicalBall& ball,
                    double lambda, bool inclusive) {
  check_field(X, f);
  if (lambda < 0.0) throw std::invalid_argument("tail_measure: threshold must be >= 0");
  double avg = ball_average(X, f, ball.members);
  double tail = 0.0;
  for (int p : ball.members) {
    double dev = std::abs(f[p] - avg);
    if (inclusive ? dev >= lambda : dev > lambda) tail += X.weight(p);
  }
  return tail;
}

TailProfile jn_profile(const Space& X, const Field& f) {
  check_field(X, f);
  TailProfile prof;
  prof.norm = bmo_norm(X, f).value;
  if (prof.norm == 0.0) return prof;
  for (int i = -4; i <= 6; ++i) prof.grid.push_back(prof.norm * std::pow(2.0, i));
  const auto& balls = X.canonical_balls();
  for (std::size_t bi = 0; bi < balls.size(); ++bi)
    for (double lam : prof.grid)
      prof.records.push_back(
          {bi, lam, tail_measure(X, f, balls[bi], lam), balls[bi].measure});
  return prof;
}

double jn_constant(const TailProfile& prof) {
  double A = kInf;
  for (const auto& r : prof.records)
    if (r.tail > 0.0 && r.lambda > 0.0)
      A = std::min(A, (prof.norm / r.lambda) * std::log(2.0 * r.ball_measure / r.tail));
  return A;
}

double jn_constant(const Space& X, const Field& f) { return jn_constant(jn_profile(X, f)); }

double two_sided_tail(const Space& X, const Field& f, const CanonicalBall& ball,
                      double s, double t) {
  check_field(X, f);
  if (s > t) throw std::invalid_argument("two_sided_tail: need s <= t");
  double lo = 0.0, hi = 0.0;
  for (int p : ball.members) {
    if (f[p] <= s) lo += X.weight(p);
    if (f[p] >= t) hi += X.weight(p);
  }
  return std::min(lo, hi);
}

TwoSidedReport two_sided_check(const Space& X, const Field& f) {
  check_field(X, f);
  TwoSidedReport rep;
  double norm = bmo_norm(X, f).value;
  double A = norm > 0.0 ? jn_constant(X, f) : kInf;
  rep.constant = std::isfinite(A) ? A / 2.0 : kInf;
  const auto& balls = X.canonical_balls();
  for (std::size_t bi = 0; bi < balls.size(); ++bi) {
    const auto lv = ball_levels(X, f, balls[bi]);
    for (std::size_t i = 0; i < lv.v.size(); ++i)
      for (std::size_t j = i; j < lv.v.size(); ++j) {
        double mn = std::min(lv.le[i], lv.ge[j]);
        ++rep.checked;
        if (mn <= 0.0) continue;
        double expo = j > i ? -rep.constant * (lv.v[j] - lv.v[i]) / norm : 0.0;
        double bound = 2.0 * lv.measure * std::exp(expo);
        double ratio = mn / bound;
        if (ratio > rep.worst_ratio) {
          rep.worst_ratio = ratio;
          rep.witness_ball = bi;
          rep.witness_s = lv.v[i];
          rep.witness_t = lv.v[j];
        }
      }
  }
  rep.pass = rep.worst_ratio <= kSlack;
  return rep;
}

ConverseReport jn_converse(const Space& X, const Field& f, double C1, double C2) {
  check_field(X, f);
  if (!(C1 > 0.0) || !(C2 > 0.0))
    throw std::invalid_argument("jn_converse: constants must be positive");
  ConverseReport rep;
  const auto& balls = X.canonical_balls();
  for (std::size_t bi = 0; bi < balls.size(); ++bi) {
    const auto lv = ball_levels(X, f, balls[bi]);
    for (std::size_t i = 0; i < lv.v.size(); ++i)
      for (std::size_t j = i; j < lv.v.size(); ++j) {
        double mn = std::min(lv.le[i], lv.ge[j]);
        if (mn <= 0.0) continue;
        double bound = C1 * lv.measure * std::exp(-C2 * (lv.v[j] - lv.v[i]));
        double ratio = mn / bound;
        if (ratio > rep.worst_ratio) {
          rep.worst_ratio = ratio;
          rep.witness_ball = bi;
          rep.witness_s = lv.v[i];
          rep.witness_t = lv.v[j];
        }
      }
  }
  rep.hypothesis_ok = rep.worst_ratio <= kSlack;
  rep.bound = 4.0 * (C1 + 1.0) / C2 * std::exp(2.0 * C2);
  rep.norm = bmo_norm(X, f).value;
  rep.pass = rep.hypothesis_ok && rep.norm <= rep.bound * kSlack;
  if (rep.hypothesis_ok && !rep.pass)
    throw std::runtime_error("jn_converse: hypothesis holds but the norm bound failed");
  return rep;
}

double StepCdf::operator()(double x) const {
  auto it = std::upper_bound(t.begin(), t.end(), x);
  if (it == t.begin()) return 0.0;
  return v[(it - t.begin()) - 1];
}

StepCdf empirical_cdf(const Space& X, const Field& f, const CanonicalBall& ball) {
  check_field(X, f);
  const auto lv = ball_levels(X, f, ball);
  StepCdf cdf;
  cdf.t = lv.v;
  cdf.v.resize(lv.v.size());
  for (std::size_t i = 0; i < lv.v.size(); ++i) cdf.v[i] = lv.le[i] / lv.le.back();
  return cdf;
}

bool check_t0(const StepCdf& df, double C1, double C2, double t0) {
  const double K = (C1 + 1.0) * std::exp(2.0 * C2);
  std::size_t m = df.t.size();
  if (m == 0 || df.v[m - 1] < 1.0) return false;
  for (std::size_t i = 0; i < m; ++i) {
    // decay to the left: the cdf piece starting at t_i binds at t0 - t_i
    if (df.t[i] <= t0 && df.v[i] > K * std::exp(-C2 * (t0 - df.t[i])) * (1.0 + 1e-9))
      return false;
    // decay to the right: the piece below t_i binds as its argument
    // approaches t_i from the left
    double prev = i ? df.v[i - 1] : 0.0;
    double gap = std::max(0.0, df.t[i] - t0);
    if (1.0 - prev > K * std::exp(-C2 * gap) * (1.0 + 1e-9)) return false;
  }
  return true;
}

T0Result find_t0(const StepCdf& df, double C1, double C2) {
  if (!(C1 > 0.0) || !(C2 > 0.0))
    throw std::invalid_argument("find_t0: constants must be positive");
  std::size_t m = df.t.size();
  if (m == 0) throw std::invalid_argument("find_t0: empty distribution");
  for (std::size_t i = 0; i < m; ++i) {
    if (df.v[i] < 0.0 || df.v[i] > 1.0)
      throw std::invalid_argument("find_t0: values must lie in [0,1]");
    if (i && (df.t[i] <= df.t[i - 1] || df.v[i] < df.v[i - 1]))
      throw std::invalid_argument("find_t0: breakpoints/values must be sorted");
  }

  T0Result res;
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j) {
      double mn = std::min(df.v[i], 1.0 - df.v[j]);
      if (mn <= 0.0) continue;
      double ratio = mn / (C1 * std::exp(-C2 * (df.t[j] - df.t[i])));
      res.hyp_worst_ratio = std::max(res.hyp_worst_ratio, ratio);
    }
  res.hypothesis_ok = res.hyp_worst_ratio <= kSlack;

  if (df.v[m - 1] < 1.0) return res;  // right tail never decays: infeasible
  const double K = (C1 + 1.0) * std::exp(2.0 * C2);

  // feasible t0 form an interval [lo, hi] determined piece by piece:
  // left decay caps t0 at t_i + ln(K/v_i)/C2, right decay floors it at
  // t_{i+1} - ln(K/(1-v_i))/C2 with a virtual zero level before t_0
  double hi = kInf, lo = -kInf;
  for (std::size_t i = 0; i < m; ++i) {
    if (df.v[i] > 0.0)
      hi = std::min(hi, df.t[i] + std::log(K / df.v[i]) / C2);
    double prev = i ? df.v[i - 1] : 0.0;
    if (prev < 1.0)
      lo = std::max(lo, df.t[i] - std::log(K / (1.0 - prev)) / C2);
  }
  res.lo = lo;
  res.hi = hi;
  if (!(lo <= hi + 1e-12 * std::max(1.0, std::abs(hi)))) return res;

  // candidate scan (breakpoints, midpoints, interval endpoint); the
  // smallest feasible candidate is the interval's left endpoint itself
  double best = kInf;
  std::vector<double> cand{lo};
  for (std::size_t i = 0; i < m; ++i) {
    cand.push_back(df.t[i]);
    if (i + 1 < m) cand.push_back(0.5 * (df.t[i] + df.t[i + 1]));
  }
  for (double c : cand)
    if (c >= lo && c <= hi && check_t0(df, C1, C2, c)) best = std::min(best, c);
  if (best == kInf) return res;
  res.feasible = true;
  res.t0 = best;
  return res;
}

StrombergResult stromberg_functional(const Space& X, const Field& f, double lambda) {
  check_field(X, f);
  if (!(lambda > 0.0)) throw std::invalid_argument("stromberg_functional: need lambda > 0");
  const auto& balls = X.canonical_balls();
  StrombergResult res;
  bool first = true;
  for (std::size_t bi = 0; bi < balls.size(); ++bi) {
    const auto& b = balls[bi];
    std::vector<std::pair<double, double>> vw;
    vw.reserve(b.members.size());
    for (int p : b.members) vw.emplace_back(f[p], X.weight(p));
    std::sort(vw.begin(), vw.end(),
              [](const auto& a, const auto& c) { return a.first < c.first; });
    // keep set {|f-c| < lambda} is a value window of width < 2*lambda;
    // slide a max-weight window over the sorted values
    double bestw = -1.0, bestc = 0.0, winw = 0.0;
    std::size_t i = 0;
    for (std::size_t j = 0; j < vw.size(); ++j) {
      winw += vw[j].second;
      while (vw[j].first - vw[i].first >= 2.0 * lambda) winw -= vw[i++].second;
      if (winw > bestw) {
        bestw = winw;
        bestc = 0.5 * (vw[i].first + vw[j].first);
      }
    }
    StrombergResult::PerBall pb;
    pb.ball_index = bi;
    pb.inf = (b.measure - bestw) / b.measure;
    pb.center = bestc;
    res.per_ball.push_back(pb);
    if (first || pb.inf > res.value) res.value = pb.inf;
    first = false;
  }
  return res;
}

double stromberg_majorant() {
  double sum = 0.0;
  for (int m = 1;; ++m) {
    double term = (m + 1) * std::pow(2.0, -0.5 * m);
    sum += term;
    if (term < 1e-18) break;
  }
  return 1.0 + 2.0 * sum;
}

StrombergVerdict stromberg_bound(const Space& X, const Field& f, double lambda,
                                 double gamma, double c_D) {
  check_field(X, f);
  if (!(lambda > 0.0) || gamma < 0.0 || !(c_D >= 1.0))
    throw std::invalid_argument("stromberg_bound: bad parameters");
  StrombergVerdict v;
  v.functional = stromberg_functional(X, f, lambda).value;
  v.gamma_cap = 1.0 / (4.0 * c_D * c_D * c_D);
  v.majorant = stromberg_majorant();
  v.applicable = v.functional <= gamma * kSlack && gamma < v.gamma_cap;
  if (!v.applicable) return v;
  v.norm = bmo_norm(X, f).value;
  v.bound = v.majorant * lambda;
  v.pass = v.norm <= v.bound * kSlack;
  if (!v.pass)
    throw std::runtime_error("stromberg_bound: applicable but the norm bound failed");
  return v;
}

}  // namespace bmo
