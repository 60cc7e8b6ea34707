#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bmo/io.hpp"
#include "bmo/maps.hpp"
#include "bmo/oscillation.hpp"
#include "bmo/space.hpp"
#include "bmo/uchiyama.hpp"

namespace {

using namespace bmo;

std::vector<std::string> split_commas(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::string yn(bool b) { return b ? "yes" : "no"; }

void emit(const Report& rep, const std::string& out_path) {
  std::cout << rep.str();
  if (!out_path.empty()) rep.save(out_path);
}

void describe_ball(Report& rep, const Space& X, const std::string& prefix,
                   std::size_t index) {
  const auto& b = X.canonical_balls().at(index);
  rep.kv(prefix + "_ball", std::to_string(index));
  rep.kv(prefix + "_center", std::to_string(b.center));
  rep.kv(prefix + "_radius", fmt17(b.radius));
}

struct GenSpaceCfg {
  std::string kind, out;
  int n = 0, nx = 0, ny = 0, depth = 0;
  double power = 0.0;
  bool normalize = false;
};

int run_gen_space(const GenSpaceCfg& cfg) {
  std::vector<std::string> params;
  if (cfg.kind == "grid_1d") {
    if (cfg.n < 1) throw std::invalid_argument("gen-space grid_1d needs --n");
    params = {std::to_string(cfg.n), fmt17(cfg.power), cfg.normalize ? "1" : "0"};
  } else if (cfg.kind == "grid_2d") {
    if (cfg.nx < 1 || cfg.ny < 1)
      throw std::invalid_argument("gen-space grid_2d needs --nx and --ny");
    params = {std::to_string(cfg.nx), std::to_string(cfg.ny), fmt17(cfg.power),
              cfg.normalize ? "1" : "0"};
  } else if (cfg.kind == "path") {
    if (cfg.n < 1) throw std::invalid_argument("gen-space path needs --n");
    params = {std::to_string(cfg.n), cfg.normalize ? "1" : "0"};
  } else if (cfg.kind == "tree") {
    if (cfg.depth < 0) throw std::invalid_argument("gen-space tree needs --depth");
    params = {std::to_string(cfg.depth), cfg.normalize ? "1" : "0"};
  } else {
    throw std::invalid_argument("unknown kind: " + cfg.kind +
                                " (want grid_1d, grid_2d, path, or tree)");
  }
  const Space X = space_from_generator(cfg.kind, params);
  save_space(X, cfg.out);

  Report rep("gen-space");
  rep.kv("config.kind", cfg.kind);
  for (std::size_t i = 0; i < params.size(); ++i)
    rep.kv("config.param" + std::to_string(i), params[i]);
  rep.kv("config.out", cfg.out);
  rep.kv("label", X.label());
  rep.kv("n", std::to_string(X.size()));
  rep.kv("total_measure", fmt17(X.total_measure()));
  rep.kv("diameter", fmt17(X.diameter()));
  rep.kv("min_gap", fmt17(X.min_gap()));
  rep.kv("canonical_balls", std::to_string(X.canonical_balls().size()));
  const auto dc = X.doubling();
  rep.kv("doubling_centered", fmt17(dc.centered));
  rep.kv("doubling_off_center", fmt17(dc.off_center));
  emit(rep, "");
  return 0;
}

struct NormCfg {
  std::string space, field, out;
};

int run_bmo_norm(const NormCfg& cfg) {
  const Space X = load_space(cfg.space);
  const Field f = load_field(X, cfg.field);
  const NormResult r = bmo_norm(X, f);
  Report rep("bmo-norm");
  rep.kv("config.space", cfg.space);
  rep.kv("config.field", cfg.field);
  rep.kv("norm", fmt17(r.value));
  describe_ball(rep, X, "witness", r.ball_index);
  emit(rep, cfg.out);
  return 0;
}

int run_dual_norm(const NormCfg& cfg) {
  const Space X = load_space(cfg.space);
  const Field f = load_field(X, cfg.field);
  const NormResult primal = bmo_norm(X, f);
  const NormResult dual = dual_norm(X, f);
  Report rep("dual-norm");
  rep.kv("config.space", cfg.space);
  rep.kv("config.field", cfg.field);
  rep.kv("dual", fmt17(dual.value));
  rep.kv("norm", fmt17(primal.value));
  describe_ball(rep, X, "witness", dual.ball_index);
  const bool upper = dual.value <= primal.value * (1.0 + 1e-12);
  const bool lower = primal.value <= 2.0 * dual.value * (1.0 + 1e-12);
  rep.kv("sandwich_ok", yn(upper && lower));
  emit(rep, cfg.out);
  if (!(upper && lower)) {
    std::cerr << "error: sandwich inequality failed: norm " << fmt17(primal.value)
              << " dual " << fmt17(dual.value) << "\n";
    return 2;
  }
  return 0;
}

int run_jn_profile(const NormCfg& cfg) {
  const Space X = load_space(cfg.space);
  const Field f = load_field(X, cfg.field);
  const TailProfile prof = jn_profile(X, f);
  const double a = jn_constant(prof);
  Report rep("jn-profile");
  rep.kv("config.space", cfg.space);
  rep.kv("config.field", cfg.field);
  rep.kv("norm", fmt17(prof.norm));
  rep.kv("jn_constant", fmt17(a));
  rep.kv("grid_size", std::to_string(prof.grid.size()));
  rep.table("tails", {"ball", "lambda", "tail", "ball_measure"});
  for (const auto& r : prof.records)
    rep.row({std::to_string(r.ball_index), fmt17(r.lambda), fmt17(r.tail),
             fmt17(r.ball_measure)});
  const TwoSidedReport two = two_sided_check(X, f);
  rep.kv("two_sided_constant", fmt17(two.constant));
  rep.kv("two_sided_checked", std::to_string(two.checked));
  rep.kv("two_sided_worst_ratio", fmt17(two.worst_ratio));
  rep.kv("two_sided_ok", yn(two.pass));
  emit(rep, cfg.out);
  if (!two.pass) {
    std::cerr << "error: two-sided tail bound failed on ball " << two.witness_ball
              << " at s " << fmt17(two.witness_s) << " t " << fmt17(two.witness_t)
              << "\n";
    return 2;
  }
  return 0;
}

struct UchiyamaCfg {
  std::string space, sets, out_prefix;
  double lambda = 2.0;
  int q = 0, depth = 0;
  double cd = 0.0, trivial_threshold = 1.5, tol = 1e-9;
  bool trace = false;
};

void level_table(Report& rep, const Construction& built) {
  rep.table("levels", {"level", "radius", "balls", "removals", "sum_dev", "min",
                       "max", "g_excess", "drop_excess", "monotone", "mass_dev",
                       "lip_checked", "lip_excess"});
  for (const auto& lv : built.levels)
    rep.row({std::to_string(lv.level), fmt17(lv.radius), std::to_string(lv.ball_count),
             std::to_string(lv.removal_count), fmt17(lv.max_sum_dev),
             fmt17(lv.min_value), fmt17(lv.max_value), fmt17(lv.max_g_excess),
             fmt17(lv.max_drop_excess), fmt17(lv.max_monotone_violation),
             fmt17(lv.max_mass_dev), yn(lv.lipschitz_checked),
             fmt17(lv.max_lip_excess)});
}

void save_trace(const Construction& built, const std::string& path) {
  std::ostringstream out;
  out << "bmo-trace 1\n";
  out << "levels: " << built.trace.size() << "\n";
  out << "sets: " << built.n_sets << "\n";
  for (std::size_t k = 0; k < built.trace.size(); ++k) {
    out << "level " << k << "\n";
    const auto& tl = built.trace[k];
    for (std::size_t j = 0; j < tl.fields.size(); ++j) {
      out << "f " << j << ":";
      for (double v : tl.fields[j]) out << ' ' << fmt17(v);
      out << "\n";
    }
    for (std::size_t j = 0; j < tl.removal_centers.size(); ++j) {
      out << "removed " << j << ":";
      for (int c : tl.removal_centers[j]) out << ' ' << c;
      out << "\n";
    }
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::invalid_argument("cannot write " + path);
  f << out.str();
}

int run_uchiyama(const UchiyamaCfg& cfg) {
  const Space X = load_space(cfg.space);
  std::vector<PointSet> sets;
  for (const auto& p : split_commas(cfg.sets)) sets.push_back(load_set(X, p));

  BuildParams bp;
  bp.lambda = cfg.lambda;
  bp.q = cfg.q;
  bp.depth = cfg.depth;
  bp.c_off = cfg.cd;
  bp.trivial_threshold = cfg.trivial_threshold;
  bp.tol = cfg.tol;
  bp.record_trace = cfg.trace;
  const Construction built = uchiyama_construct(X, sets, bp);
  const VerifyReport ver = verify_construction(X, built.fields, sets, cfg.lambda);

  Report rep("uchiyama");
  rep.kv("config.space", cfg.space);
  rep.kv("config.sets", cfg.sets);
  rep.kv("config.lambda", fmt17(cfg.lambda));
  rep.kv("config.q", std::to_string(cfg.q));
  rep.kv("config.depth", std::to_string(cfg.depth));
  rep.kv("config.cd", fmt17(cfg.cd));
  rep.kv("config.trivial_threshold", fmt17(cfg.trivial_threshold));
  rep.kv("config.tol", fmt17(cfg.tol));
  rep.kv("q_overridden", yn(cfg.q > 0));
  rep.kv("cd_overridden", yn(cfg.cd > 0.0));
  rep.kv("resolved_q", std::to_string(built.params.q));
  rep.kv("resolved_depth", std::to_string(built.params.depth));
  rep.kv("resolved_cd", fmt17(built.params.c_off));
  rep.kv("used_trivial", yn(built.used_trivial));
  rep.kv("lipschitz_certified", yn(built.lipschitz_certified));
  rep.kv("root_owner", std::to_string(built.root_owner));
  level_table(rep, built);
  rep.kv("sum_dev", fmt17(ver.sum_dev));
  rep.kv("range_dev", fmt17(ver.range_dev));
  rep.kv("vanish_dev", fmt17(ver.vanish_dev));
  rep.kv("vanish_exact", yn(ver.vanish_ok));
  for (std::size_t j = 0; j < ver.norms.size(); ++j)
    rep.kv("norm_" + std::to_string(j), fmt17(ver.norms[j]));
  rep.kv("c1_emp", fmt17(ver.c1_emp));
  const LevelBoundReport lb = level_bound_check(X, built, sets);
  rep.kv("level_bound_checked", std::to_string(lb.checked));
  rep.kv("level_bound_excess", fmt17(lb.max_excess));
  rep.kv("level_bound_ok", yn(lb.ok));

  std::string report_out;
  if (!cfg.out_prefix.empty()) {
    report_out = cfg.out_prefix + "_report.txt";
    for (std::size_t j = 0; j < built.fields.size(); ++j)
      save_field(built.fields[j], cfg.out_prefix + "_f" + std::to_string(j) + ".txt");
    if (cfg.trace) save_trace(built, cfg.out_prefix + "_trace.txt");
  }
  emit(rep, report_out);
  if (!ver.sum_ok || !ver.range_ok || !ver.vanish_ok || !lb.ok) {
    std::cerr << "error: output verification failed (sum_dev " << fmt17(ver.sum_dev)
              << ", range_dev " << fmt17(ver.range_dev) << ", vanish_dev "
              << fmt17(ver.vanish_dev) << ")\n";
    return 2;
  }
  return 0;
}

struct VerifyCfg {
  std::string space, sets, fields, out;
  double lambda = 2.0, c2 = 0.0, cd = 0.0;
};

int run_verify(const VerifyCfg& cfg) {
  const Space X = load_space(cfg.space);
  std::vector<PointSet> sets;
  for (const auto& p : split_commas(cfg.sets)) sets.push_back(load_set(X, p));
  std::vector<Field> fields;
  for (const auto& p : split_commas(cfg.fields)) fields.push_back(load_field(X, p));

  const VerifyReport ver = verify_construction(X, fields, sets, cfg.lambda);
  const double c = cfg.cd > 0.0 ? cfg.cd : X.doubling().off_center;
  const double c2 = cfg.c2 > 0.0 ? cfg.c2 : ver.c1_emp;
  const NecessityReport nec =
      c2 > 0.0 ? necessity_check(X, fields, sets, cfg.lambda, c2, c) : NecessityReport{};

  Report rep("verify-construction");
  rep.kv("config.space", cfg.space);
  rep.kv("config.sets", cfg.sets);
  rep.kv("config.fields", cfg.fields);
  rep.kv("config.lambda", fmt17(cfg.lambda));
  rep.kv("config.c2", fmt17(cfg.c2));
  rep.kv("config.cd", fmt17(cfg.cd));
  rep.kv("sum_dev", fmt17(ver.sum_dev));
  rep.kv("sum_ok", yn(ver.sum_ok));
  rep.kv("range_dev", fmt17(ver.range_dev));
  rep.kv("range_ok", yn(ver.range_ok));
  rep.kv("vanish_dev", fmt17(ver.vanish_dev));
  rep.kv("vanish_exact", yn(ver.vanish_ok));
  for (std::size_t j = 0; j < ver.norms.size(); ++j)
    rep.kv("norm_" + std::to_string(j), fmt17(ver.norms[j]));
  rep.kv("c1_emp", fmt17(ver.c1_emp));
  rep.kv("necessity_applicable", yn(nec.applicable));
  if (nec.applicable) {
    rep.kv("necessity_inclusion_ok", yn(nec.inclusion_ok));
    rep.kv("necessity_density", fmt17(nec.density));
    rep.kv("necessity_exponent", fmt17(nec.exponent));
    rep.kv("necessity_reference", fmt17(nec.reference));
    describe_ball(rep, X, "necessity_witness", nec.witness_ball);
  }
  emit(rep, cfg.out);
  if (!ver.sum_ok || !ver.range_ok || !ver.vanish_ok ||
      (nec.applicable && !nec.inclusion_ok)) {
    std::cerr << "error: verification failed (sum_dev " << fmt17(ver.sum_dev)
              << ", range_dev " << fmt17(ver.range_dev) << ", vanish_dev "
              << fmt17(ver.vanish_dev) << ")\n";
    return 2;
  }
  return 0;
}

struct DensityCfg {
  std::string space, sets, out;
  double cd = 0.0;
};

int run_density(const DensityCfg& cfg) {
  const Space X = load_space(cfg.space);
  std::vector<PointSet> sets;
  for (const auto& p : split_commas(cfg.sets)) sets.push_back(load_set(X, p));
  const double c = cfg.cd > 0.0 ? cfg.cd : X.doubling().off_center;
  const DensityReport d = density_functional(X, sets, c);
  Report rep("density");
  rep.kv("config.space", cfg.space);
  rep.kv("config.sets", cfg.sets);
  rep.kv("config.cd", fmt17(cfg.cd));
  rep.kv("c", fmt17(c));
  rep.kv("density", fmt17(d.value));
  rep.kv("lambda_max", fmt17(d.lambda_max));
  describe_ball(rep, X, "witness", d.witness_ball);
  emit(rep, cfg.out);
  return 0;
}

struct MapCheckCfg {
  std::string space, map, out;
  int trials = 64;
  std::uint64_t seed = 1;
  double gamma = 0.2, lambda_thresh = 1.5, impl_lambda = 0.2;
  bool exhaustive = false;
};

int run_map_check(const MapCheckCfg& cfg) {
  const Space X = load_space(cfg.space);
  const PointMap F = load_map(X, cfg.map);
  const auto pairs = make_pair_family(X, cfg.seed, cfg.trials);
  const FitResult fit = condition_i_fit(X, F, pairs);
  const ThresholdReport th = condition_ii_check(X, F, pairs, cfg.gamma, cfg.lambda_thresh);
  const auto family = default_field_family(X, cfg.seed);
  const OpNormResult on = operator_norm_estimate(X, F, family);
  const ImplicationReport impl =
      implication_check(X, F, cfg.seed, cfg.trials, cfg.impl_lambda);
  const ChainReport chain = condition_chain_check(X, F, family, cfg.seed, cfg.trials);

  Report rep("map-check");
  rep.kv("config.space", cfg.space);
  rep.kv("config.map", cfg.map);
  rep.kv("config.trials", std::to_string(cfg.trials));
  rep.kv("config.seed", std::to_string(cfg.seed));
  rep.kv("config.gamma", fmt17(cfg.gamma));
  rep.kv("config.lambda_thresh", fmt17(cfg.lambda_thresh));
  rep.kv("config.impl_lambda", fmt17(cfg.impl_lambda));
  rep.kv("config.exhaustive", yn(cfg.exhaustive));
  rep.kv("fit_K", fmt17(fit.K));
  rep.kv("fit_alpha", fmt17(fit.alpha));
  rep.kv("fit_degenerate", yn(fit.degenerate));
  rep.kv("fit_trials", std::to_string(fit.trials));
  rep.kv("fit_witness", std::to_string(fit.witness));
  if (cfg.exhaustive) {
    const FitResult fx = condition_i_fit_exhaustive(X, F);
    rep.kv("exhaustive_K", fmt17(fx.K));
    rep.kv("exhaustive_alpha", fmt17(fx.alpha));
    rep.kv("exhaustive_pairs", std::to_string(fx.trials));
  }
  rep.kv("threshold_pass", yn(th.pass));
  rep.kv("threshold_gamma", fmt17(th.gamma));
  rep.kv("threshold_lambda", fmt17(th.lambda));
  rep.kv("threshold_gamma_cap", fmt17(th.gamma_cap));
  rep.kv("threshold_below_cap", yn(th.below_cap));
  rep.kv("threshold_checked", std::to_string(th.checked));
  rep.kv("threshold_violations", std::to_string(th.violations));
  if (th.violations > 0) {
    rep.kv("threshold_witness", std::to_string(th.witness));
    rep.kv("threshold_witness_x", fmt17(th.witness_x));
    rep.kv("threshold_witness_y", fmt17(th.witness_y));
  }
  rep.kv("opnorm", fmt17(on.value));
  rep.kv("opnorm_fields", std::to_string(on.fields_used));
  rep.kv("implication_applicable", yn(impl.applicable));
  rep.kv("implication_gamma", fmt17(impl.gamma));
  rep.kv("implication_checked", std::to_string(impl.checked));
  rep.kv("implication_counterexamples", std::to_string(impl.counterexamples));
  rep.kv("chain_c_emp", fmt17(chain.c_emp));
  rep.kv("chain_ok", yn(chain.ok));
  rep.table("chain", {"norm", "jn_constant", "c1", "c2", "hypothesis_ok", "bound",
                      "composed_norm", "pass"});
  for (const auto& r : chain.records)
    rep.row({fmt17(r.norm), fmt17(r.jn_a), fmt17(r.c1), fmt17(r.c2),
             yn(r.hypothesis_ok), fmt17(r.bound), fmt17(r.composed_norm), yn(r.pass)});
  emit(rep, cfg.out);
  return 0;
}

struct ComposeCfg {
  std::string space, map, field, family = "default", out;
  std::uint64_t seed = 1;
};

int run_compose_norm(const ComposeCfg& cfg) {
  const Space X = load_space(cfg.space);
  const PointMap F = load_map(X, cfg.map);
  Report rep("compose-norm");
  rep.kv("config.space", cfg.space);
  rep.kv("config.map", cfg.map);
  rep.kv("config.seed", std::to_string(cfg.seed));
  if (!cfg.field.empty()) {
    rep.kv("config.field", cfg.field);
    const Field f = load_field(X, cfg.field);
    const double nf = bmo_norm(X, f).value;
    const double ng = bmo_norm(X, compose_field(f, F)).value;
    rep.kv("norm", fmt17(nf));
    rep.kv("composed_norm", fmt17(ng));
    rep.kv("ratio", fmt17(nf > 0.0 ? ng / nf : 0.0));
  } else {
    if (cfg.family != "default")
      throw std::invalid_argument("unknown family: " + cfg.family);
    rep.kv("config.family", cfg.family);
    const auto family = default_field_family(X, cfg.seed);
    const OpNormResult on = operator_norm_estimate(X, F, family);
    rep.table("ratios", {"field", "norm", "composed_norm", "ratio"});
    for (std::size_t i = 0; i < family.size(); ++i) {
      const double nf = bmo_norm(X, family[i]).value;
      const double ng = bmo_norm(X, compose_field(family[i], F)).value;
      rep.row({std::to_string(i), fmt17(nf), fmt17(ng),
               fmt17(nf > 0.0 ? ng / nf : 0.0)});
    }
    rep.kv("opnorm", fmt17(on.value));
    rep.kv("opnorm_fields", std::to_string(on.fields_used));
    rep.kv("opnorm_witness", std::to_string(on.witness));
  }
  emit(rep, cfg.out);
  return 0;
}

struct RoundtripCfg {
  std::string space, map, sets, out;
  std::uint64_t seed = 1;
};

int run_roundtrip(const RoundtripCfg& cfg) {
  const Space X = load_space(cfg.space);
  const PointMap F = load_map(X, cfg.map);
  const auto paths = split_commas(cfg.sets);
  if (paths.size() != 2)
    throw std::invalid_argument("gotoh-roundtrip needs exactly two sets");
  const PointSet E1 = load_set(X, paths[0]);
  const PointSet E2 = load_set(X, paths[1]);
  const RoundtripResult r = gotoh_roundtrip(X, F, E1, E2, cfg.seed);
  Report rep("gotoh-roundtrip");
  rep.kv("config.space", cfg.space);
  rep.kv("config.map", cfg.map);
  rep.kv("config.sets", cfg.sets);
  rep.kv("config.seed", std::to_string(cfg.seed));
  rep.kv("degenerate", yn(r.degenerate));
  rep.kv("density", fmt17(r.density));
  rep.kv("lambda_star", fmt17(r.lambda_star));
  rep.kv("used_trivial", yn(r.used_trivial));
  rep.kv("opnorm", fmt17(r.opnorm));
  rep.kv("jn_constant", fmt17(r.jn_a));
  rep.kv("c1_emp", fmt17(r.c1_emp));
  rep.kv("exponent_constant", fmt17(r.constant));
  rep.kv("measured", fmt17(r.measured));
  rep.kv("predicted", fmt17(r.predicted));
  rep.kv("witness_ball", std::to_string(r.witness_ball));
  rep.kv("pass", yn(r.pass));
  emit(rep, cfg.out);
  if (!r.pass) {
    std::cerr << "error: measured preimage density " << fmt17(r.measured)
              << " exceeds predicted bound " << fmt17(r.predicted) << " (ball "
              << r.witness_ball << ")\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite doubling metric measure spaces: oscillation norms, "
               "multi-scale extremal constructions, and self-map checks"};
  app.require_subcommand(1);

  GenSpaceCfg gen;
  auto* sc_gen = app.add_subcommand("gen-space", "generate a space file");
  sc_gen->add_option("--kind", gen.kind, "grid_1d, grid_2d, path, or tree")->required();
  sc_gen->add_option("--n", gen.n, "point count (grid_1d, path)");
  sc_gen->add_option("--nx", gen.nx, "grid width (grid_2d)");
  sc_gen->add_option("--ny", gen.ny, "grid height (grid_2d)");
  sc_gen->add_option("--power", gen.power, "weight exponent (grids)");
  sc_gen->add_option("--depth", gen.depth, "tree depth");
  sc_gen->add_flag("--normalize", gen.normalize, "rescale diameter to 1/2");
  sc_gen->add_option("--out", gen.out, "output space file")->required();

  NormCfg norm_cfg, dual_cfg, jn_cfg;
  auto* sc_norm = app.add_subcommand("bmo-norm", "mean oscillation norm of a field");
  sc_norm->add_option("--space", norm_cfg.space)->required();
  sc_norm->add_option("--field", norm_cfg.field)->required();
  sc_norm->add_option("--out", norm_cfg.out, "report file");
  auto* sc_dual = app.add_subcommand("dual-norm", "median-deviation norm and sandwich check");
  sc_dual->add_option("--space", dual_cfg.space)->required();
  sc_dual->add_option("--field", dual_cfg.field)->required();
  sc_dual->add_option("--out", dual_cfg.out, "report file");
  auto* sc_jn = app.add_subcommand("jn-profile", "deviation tails and exponential constant");
  sc_jn->add_option("--space", jn_cfg.space)->required();
  sc_jn->add_option("--field", jn_cfg.field)->required();
  sc_jn->add_option("--out", jn_cfg.out, "report file");

  UchiyamaCfg uch;
  auto* sc_uch = app.add_subcommand("uchiyama", "multi-scale extremal construction");
  sc_uch->add_option("--space", uch.space)->required();
  sc_uch->add_option("--sets", uch.sets, "comma-separated set files")->required();
  sc_uch->add_option("--lambda", uch.lambda, "target height")->required();
  sc_uch->add_option("--q", uch.q, "scale exponent override (0 = auto)");
  sc_uch->add_option("--depth", uch.depth, "level count override (0 = auto)");
  sc_uch->add_option("--cd", uch.cd, "doubling constant override (0 = measured)");
  sc_uch->add_option("--trivial-threshold", uch.trivial_threshold,
                     "lambda below this uses the closed form");
  sc_uch->add_option("--tol", uch.tol, "invariant tolerance");
  sc_uch->add_flag("--trace", uch.trace, "dump per-level fields");
  sc_uch->add_option("--out-prefix", uch.out_prefix, "prefix for report/field files");

  VerifyCfg ver;
  auto* sc_ver = app.add_subcommand("verify-construction", "check construction outputs");
  sc_ver->add_option("--space", ver.space)->required();
  sc_ver->add_option("--sets", ver.sets, "comma-separated set files")->required();
  sc_ver->add_option("--fields", ver.fields, "comma-separated field files")->required();
  sc_ver->add_option("--lambda", ver.lambda, "target height")->required();
  sc_ver->add_option("--c2", ver.c2, "norm cap for the converse (0 = measured)");
  sc_ver->add_option("--cd", ver.cd, "doubling constant override (0 = measured)");
  sc_ver->add_option("--out", ver.out, "report file");

  DensityCfg den;
  auto* sc_den = app.add_subcommand("density", "joint density functional of sets");
  sc_den->add_option("--space", den.space)->required();
  sc_den->add_option("--sets", den.sets, "comma-separated set files")->required();
  sc_den->add_option("--cd", den.cd, "doubling constant override (0 = measured)");
  sc_den->add_option("--out", den.out, "report file");

  MapCheckCfg mc;
  auto* sc_mc = app.add_subcommand("map-check", "power and threshold conditions for a self-map");
  sc_mc->add_option("--space", mc.space)->required();
  sc_mc->add_option("--map", mc.map)->required();
  sc_mc->add_option("--trials", mc.trials, "trial pair count");
  sc_mc->add_option("--seed", mc.seed, "random seed");
  sc_mc->add_option("--gamma", mc.gamma, "output density threshold");
  sc_mc->add_option("--lambda-thresh", mc.lambda_thresh, "input density threshold");
  sc_mc->add_option("--impl-lambda", mc.impl_lambda, "threshold for the implication check");
  sc_mc->add_flag("--exhaustive", mc.exhaustive, "fit over all subset pairs (n <= 12)");
  sc_mc->add_option("--out", mc.out, "report file");

  ComposeCfg cmp;
  auto* sc_cmp = app.add_subcommand("compose-norm", "composition norm ratios");
  sc_cmp->add_option("--space", cmp.space)->required();
  sc_cmp->add_option("--map", cmp.map)->required();
  sc_cmp->add_option("--field", cmp.field, "single field file");
  sc_cmp->add_option("--family", cmp.family, "field family name (default)");
  sc_cmp->add_option("--seed", cmp.seed, "random seed");
  sc_cmp->add_option("--out", cmp.out, "report file");

  RoundtripCfg rt;
  auto* sc_rt = app.add_subcommand("gotoh-roundtrip", "preimage density versus predicted bound");
  sc_rt->add_option("--space", rt.space)->required();
  sc_rt->add_option("--map", rt.map)->required();
  sc_rt->add_option("--sets", rt.sets, "two comma-separated set files")->required();
  sc_rt->add_option("--seed", rt.seed, "random seed");
  sc_rt->add_option("--out", rt.out, "report file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*sc_gen) return run_gen_space(gen);
    if (*sc_norm) return run_bmo_norm(norm_cfg);
    if (*sc_dual) return run_dual_norm(dual_cfg);
    if (*sc_jn) return run_jn_profile(jn_cfg);
    if (*sc_uch) return run_uchiyama(uch);
    if (*sc_ver) return run_verify(ver);
    if (*sc_den) return run_density(den);
    if (*sc_mc) return run_map_check(mc);
    if (*sc_cmp) return run_compose_norm(cmp);
    if (*sc_rt) return run_roundtrip(rt);
  } catch (const bmo::HypothesisError& e) {
    std::cout << "hypothesis_failed: yes\n";
    std::cout << "density: " << fmt17(e.density) << "\n";
    std::cout << "lambda_max: " << fmt17(e.lambda_max) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::runtime_error& e) {
    std::cerr << "assertion: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
