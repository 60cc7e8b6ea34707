#include "bmo/space.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace bmo {

namespace {

std::string fmt(const char* pattern, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

}  // namespace

Space Space::from_matrix(std::string label, int n, std::vector<double> dist,
                         std::vector<double> weight) {
  if (n <= 0) throw std::invalid_argument("space: need at least one point");
  if (dist.size() != std::size_t(n) * n)
    throw std::invalid_argument("space: distance matrix size mismatch");
  if (weight.size() != std::size_t(n))
    throw std::invalid_argument("space: weight vector size mismatch");
  Space X;
  X.n_ = n;
  X.label_ = std::move(label);
  X.dist_ = std::move(dist);
  X.weight_ = std::move(weight);
  X.finalize();
  return X;
}

void Space::finalize() {
  const int n = n_;
  for (int i = 0; i < n; ++i) {
    if (dist_[std::size_t(i) * n + i] != 0.0)
      throw std::invalid_argument("space: nonzero diagonal at point " + std::to_string(i));
    if (!(weight_[i] > 0.0) || !std::isfinite(weight_[i]))
      throw std::invalid_argument("space: weight of point " + std::to_string(i) +
                                  " must be positive");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < i; ++j) {
      double a = dist_[std::size_t(i) * n + j], b = dist_[std::size_t(j) * n + i];
      if (std::abs(a - b) > 1e-12 * std::max(1.0, std::abs(a)))
        throw std::invalid_argument("space: asymmetric distances for pair (" +
                                    std::to_string(j) + "," + std::to_string(i) + ")");
      // lower triangle is authoritative; mirror it so lookups agree exactly
      dist_[std::size_t(j) * n + i] = a;
      if (!(a > 0.0) || !std::isfinite(a))
        throw std::invalid_argument("space: distance for pair (" + std::to_string(j) +
                                    "," + std::to_string(i) + ") must be positive");
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      double dik = dist(i, k);
      for (int j = 0; j < n; ++j) {
        double direct = dist(i, j);
        if (direct > dik + dist(k, j) + 1e-12 * std::max(1.0, direct))
          throw std::invalid_argument("space: triangle inequality fails for (" +
                                      std::to_string(i) + "," + std::to_string(j) +
                                      ") via " + std::to_string(k));
      }
    }
  }

  total_ = 0.0;
  for (double w : weight_) total_ += w;
  diameter_ = 0.0;
  min_gap_ = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < i; ++j) {
      double d = dist(i, j);
      diameter_ = std::max(diameter_, d);
      if (min_gap_ == 0.0 || d < min_gap_) min_gap_ = d;
    }

  order_.assign(n, {});
  sdist_.assign(n, {});
  prefix_.assign(n, {});
  for (int c = 0; c < n; ++c) {
    auto& ord = order_[c];
    ord.resize(n);
    for (int i = 0; i < n; ++i) ord[i] = i;
    std::sort(ord.begin(), ord.end(), [&](int a, int b) {
      double da = dist(c, a), db = dist(c, b);
      if (da != db) return da < db;
      return a < b;
    });
    auto& sd = sdist_[c];
    auto& pf = prefix_[c];
    sd.resize(n);
    pf.resize(n + 1);
    pf[0] = 0.0;
    for (int i = 0; i < n; ++i) {
      sd[i] = dist(c, ord[i]);
      pf[i + 1] = pf[i] + weight_[ord[i]];
    }
  }
}

Space Space::grid_1d(int n, double power, bool normalize) {
  if (n <= 0) throw std::invalid_argument("grid_1d: need n >= 1");
  if (power <= -1.0)
    throw std::invalid_argument("grid_1d: exponent must exceed -1 to keep the measure doubling");
  std::vector<double> d(std::size_t(n) * n), w(n);
  for (int i = 0; i < n; ++i) {
    w[i] = std::pow(1.0 + i, power);
    for (int j = 0; j < n; ++j) d[std::size_t(i) * n + j] = std::abs(i - j);
  }
  std::string label = "grid1d(" + std::to_string(n) +
                      (power != 0.0 ? ",a=" + fmt("%g", power) : "") + ")";
  Space X = from_matrix(label, n, std::move(d), std::move(w));
  return normalize ? X.normalized() : X;
}

Space Space::grid_2d(int nx, int ny, double power, bool normalize) {
  if (nx <= 0 || ny <= 0) throw std::invalid_argument("grid_2d: need positive extents");
  if (power <= -2.0)
    throw std::invalid_argument("grid_2d: exponent must exceed -2 to keep the measure doubling");
  int n = nx * ny;
  std::vector<double> d(std::size_t(n) * n), w(n);
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      int id = i * ny + j;
      w[id] = std::pow(1.0 + std::hypot(double(i), double(j)), power);
      for (int i2 = 0; i2 < nx; ++i2)
        for (int j2 = 0; j2 < ny; ++j2)
          d[std::size_t(id) * n + (i2 * ny + j2)] = std::hypot(double(i - i2), double(j - j2));
    }
  std::string label = "grid2d(" + std::to_string(nx) + "x" + std::to_string(ny) +
                      (power != 0.0 ? ",a=" + fmt("%g", power) : "") + ")";
  Space X = from_matrix(label, n, std::move(d), std::move(w));
  return normalize ? X.normalized() : X;
}

Space Space::path_graph(int n, bool normalize) {
  Space X = grid_1d(n, 0.0, false);
  X.label_ = "path(" + std::to_string(n) + ")";
  return normalize ? X.normalized() : X;
}

Space Space::binary_tree(int depth, bool normalize) {
  if (depth < 0) throw std::invalid_argument("binary_tree: depth must be >= 0");
  int n = (1 << (depth + 1)) - 1;
  auto level = [](int v) {
    int l = 0;
    while (v > 0) {
      v = (v - 1) / 2;
      ++l;
    }
    return l;
  };
  std::vector<double> d(std::size_t(n) * n), w(n, 1.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) {
      int a = i, b = j, hops = 0;
      int la = level(a), lb = level(b);
      while (la > lb) {
        a = (a - 1) / 2;
        --la;
        ++hops;
      }
      while (lb > la) {
        b = (b - 1) / 2;
        --lb;
        ++hops;
      }
      while (a != b) {
        a = (a - 1) / 2;
        b = (b - 1) / 2;
        hops += 2;
      }
      d[std::size_t(i) * n + j] = hops;
      d[std::size_t(j) * n + i] = hops;
    }
  Space X = from_matrix("tree(" + std::to_string(depth) + ")", n, std::move(d), std::move(w));
  return normalize ? X.normalized() : X;
}

Space Space::normalized() const {
  if (diameter_ <= 0.0)
    throw std::invalid_argument("normalized: space has zero diameter");
  std::vector<double> d(dist_);
  for (double& v : d) v = (v / diameter_) * 0.5;
  return from_matrix(label_ + "/norm", n_, std::move(d), weight_);
}

std::vector<int> Space::ball_members(const Ball& b) const {
  if (!(b.radius > 0.0)) throw std::invalid_argument("ball_members: radius must be positive");
  const auto& sd = sdist_[b.center];
  auto k = std::lower_bound(sd.begin(), sd.end(), b.radius) - sd.begin();
  std::vector<int> out(order_[b.center].begin(), order_[b.center].begin() + k);
  std::sort(out.begin(), out.end());
  return out;
}

double Space::ball_measure(int center, double radius) const {
  const auto& sd = sdist_[center];
  auto k = std::lower_bound(sd.begin(), sd.end(), radius) - sd.begin();
  return prefix_[center][k];
}

CanonicalBall Space::resolve(const Ball& b) const {
  CanonicalBall cb;
  cb.center = b.center;
  cb.radius = b.radius;
  cb.members = ball_members(b);
  cb.measure = ball_measure(b.center, b.radius);
  return cb;
}

const std::vector<CanonicalBall>& Space::canonical_balls() const {
  if (canonical_) return *canonical_;
  std::vector<CanonicalBall> out;
  for (int c = 0; c < n_; ++c) {
    const auto& sd = sdist_[c];
    std::vector<double> radii;
    for (std::size_t i = 0; i + 1 < sd.size(); ++i)
      if (sd[i] != sd[i + 1]) radii.push_back(0.5 * (sd[i] + sd[i + 1]));
    double dmax = sd.back();
    radii.push_back(dmax > 0.0 ? 1.5 * dmax : 1.0);
    for (double r : radii) out.push_back(resolve({c, r}));
  }
  canonical_ = std::move(out);
  return *canonical_;
}

const DoublingConstants& Space::doubling() const {
  if (doubling_) return *doubling_;
  const int n = n_;
  DoublingConstants dc;

  // centered: ratio is piecewise constant in r, changing only where one of
  // the two member sets changes; each piece is attained at a realized
  // distance or half of one
  for (int x = 0; x < n; ++x) {
    for (int z = 0; z < n; ++z) {
      if (z == x) continue;
      for (double r : {dist(x, z), dist(x, z) * 0.5}) {
        double num = ball_measure(x, 2.0 * r), den = ball_measure(x, r);
        dc.centered = std::max(dc.centered, num / den);
      }
    }
  }

  // rho[x][y]: infimum of radii r for which B(x,2r) meets B(y,r)
  std::vector<double> rho(std::size_t(n) * n);
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      double best = std::numeric_limits<double>::infinity();
      for (int z = 0; z < n; ++z)
        best = std::min(best, std::max(dist(x, z) * 0.5, dist(y, z)));
      rho[std::size_t(x) * n + y] = best;
    }

  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      double rxy = rho[std::size_t(x) * n + y];
      auto consider = [&](double r) {
        if (!(rxy < r)) return;  // intersection B(x,2r) with B(y,r) is empty
        double num = ball_measure(x, 2.0 * r), den = ball_measure(y, r);
        dc.off_center = std::max(dc.off_center, num / den);
      };
      for (int z = 0; z < n; ++z) {
        if (z != x) consider(dist(x, z) * 0.5);
        if (z != y) consider(dist(y, z));
      }
    }

  if (dc.off_center > dc.centered * dc.centered * dc.centered * (1.0 + 1e-9))
    throw std::runtime_error("doubling: off-center constant exceeds the cube of the centered one");
  doubling_ = dc;
  return *doubling_;
}

std::vector<int> Space::maximal_net(double r) const {
  if (!(r > 0.0)) throw std::invalid_argument("maximal_net: radius must be positive");
  std::vector<int> net;
  for (int p = 0; p < n_; ++p) {
    bool ok = true;
    for (int q : net)
      if (dist(p, q) < 0.5 * r) {
        ok = false;
        break;
      }
    if (ok) net.push_back(p);
  }
  return net;
}

BallFamily Space::ball_family(int level, int step) const {
  if (step < 1) throw std::invalid_argument("ball_family: step must be >= 1");
  BallFamily fam;
  fam.level = level;
  fam.step = step;
  fam.radius = std::pow(2.0, double(-level) * step);
  fam.net = maximal_net(fam.radius);
  for (int c : fam.net) fam.balls.push_back(resolve({c, fam.radius}));
  std::vector<char> covered(n_, 0);
  for (const auto& b : fam.balls)
    for (int p : b.members) covered[p] = 1;
  for (int p = 0; p < n_; ++p)
    if (!covered[p])
      throw std::runtime_error("ball_family: point " + std::to_string(p) +
                               " is not covered at level " + std::to_string(level));
  return fam;
}

LowerMassReport Space::lower_mass_check(long long max_configs) const {
  const int n = n_;
  const double c = doubling().centered;
  LowerMassReport rep;
  rep.min_slack = std::numeric_limits<double>::infinity();
  if (n == 1 || c <= 1.0) {
    rep.min_slack = 1.0 - 1.0 / (c * c);  // r=R, y=x case only
    rep.checked = 1;
    return rep;
  }
  const double alpha = std::log2(c);
  const double inv_c2 = 1.0 / (c * c);

  // the bound survives one-sided limits, so the sharp finite form uses a
  // closed ball at radius R and an open one at radius r, with both radii
  // running over realized distances
  long long budget_per_x = std::max<long long>(1, max_configs / n);
  int stride = 1;
  while ((long long)(n / stride + 1) * (n / stride + 1) * (n / stride + 1) > budget_per_x)
    ++stride;

  for (int x = 0; x < n; ++x) {
    const auto& sdx = sdist_[x];
    for (int iR = n - 1; iR >= 1; iR -= stride) {
      double R = sdx[iR];
      if (R <= 0.0) continue;
      // closed ball: members with dist <= R
      auto kR = std::upper_bound(sdx.begin(), sdx.end(), R) - sdx.begin();
      double muR = prefix_[x][kR];
      for (int iy = 0; iy < (int)kR; iy += stride) {
        int y = order_[x][iy];
        const auto& sdy = sdist_[y];
        for (int ir = 1; ir < n; ir += stride) {
          double r = sdy[ir];
          if (r <= 0.0) continue;
          if (r > R) break;
          double lhs = ball_measure(y, r) / muR;
          double rhs = inv_c2 * std::pow(r / R, alpha);
          double slack = lhs - rhs;
          ++rep.checked;
          if (slack < rep.min_slack) {
            rep.min_slack = slack;
            rep.witness_x = x;
            rep.witness_y = y;
            rep.witness_R = R;
            rep.witness_r = r;
          }
        }
      }
    }
  }
  return rep;
}

std::vector<std::size_t> vitali_disjoint(const Space& X, const std::vector<Ball>& balls) {
  if (balls.empty()) throw std::invalid_argument("vitali_disjoint: empty ball list");
  std::vector<std::size_t> idx(balls.size());
  for (std::size_t i = 0; i < balls.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (balls[a].radius != balls[b].radius) return balls[a].radius > balls[b].radius;
    if (balls[a].center != balls[b].center) return balls[a].center < balls[b].center;
    return a < b;
  });
  std::vector<char> taken(X.size(), 0);
  std::vector<std::size_t> kept;
  for (std::size_t i : idx) {
    auto mem = X.ball_members(balls[i]);
    bool meets = false;
    for (int p : mem)
      if (taken[p]) {
        meets = true;
        break;
      }
    if (meets) continue;
    for (int p : mem) taken[p] = 1;
    kept.push_back(i);
  }
  // every input ball must sit inside the 5-dilate of some kept ball
  for (const Ball& b : balls) {
    auto mem = X.ball_members(b);
    bool inside = false;
    for (std::size_t k : kept) {
      const Ball& K = balls[k];
      bool all = true;
      for (int p : mem)
        if (!(X.dist(K.center, p) < 5.0 * K.radius)) {
          all = false;
          break;
        }
      if (all) {
        inside = true;
        break;
      }
    }
    if (!inside)
      throw std::runtime_error("vitali_disjoint: 5-dilate coverage failed");
  }
  return kept;
}

std::vector<double> adapted_bump(const Space& X, const Ball& b) {
  if (!(b.radius > 0.0)) throw std::invalid_argument("adapted_bump: radius must be positive");
  std::vector<double> f(X.size());
  for (int p = 0; p < X.size(); ++p)
    f[p] = std::clamp(2.0 - X.dist(b.center, p) / b.radius, 0.0, 1.0);
  return f;
}

}  // namespace bmo
