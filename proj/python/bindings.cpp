#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "bmo/io.hpp"
#include "bmo/maps.hpp"
#include "bmo/oscillation.hpp"
#include "bmo/space.hpp"
#include "bmo/uchiyama.hpp"

namespace py = pybind11;
using namespace bmo;

namespace {

std::vector<PointSet> to_sets(const Space& X, const std::vector<std::vector<int>>& ids) {
  std::vector<PointSet> out;
  out.reserve(ids.size());
  for (const auto& s : ids) out.push_back(make_point_set(X, s));
  return out;
}

}  // namespace

PYBIND11_MODULE(pybmo, m) {
  m.doc() = "finite doubling metric measure spaces: oscillation norms, "
            "multi-scale extremal constructions, self-map checks";

  py::class_<Space>(m, "Space")
      .def_static("grid_1d", &Space::grid_1d, py::arg("n"), py::arg("power") = 0.0,
                  py::arg("normalize") = false)
      .def_static("grid_2d", &Space::grid_2d, py::arg("nx"), py::arg("ny"),
                  py::arg("power") = 0.0, py::arg("normalize") = false)
      .def_static("path_graph", &Space::path_graph, py::arg("n"),
                  py::arg("normalize") = false)
      .def_static("binary_tree", &Space::binary_tree, py::arg("depth"),
                  py::arg("normalize") = false)
      .def_static("from_matrix", &Space::from_matrix, py::arg("label"), py::arg("n"),
                  py::arg("dist"), py::arg("weights"))
      .def("normalized", &Space::normalized)
      .def_property_readonly("n", &Space::size)
      .def_property_readonly("label", [](const Space& X) { return X.label(); })
      .def_property_readonly("diameter", &Space::diameter)
      .def_property_readonly("min_gap", &Space::min_gap)
      .def_property_readonly("total_measure", &Space::total_measure)
      .def("dist", &Space::dist, py::arg("i"), py::arg("j"))
      .def("weight", &Space::weight, py::arg("i"))
      .def("ball_count",
           [](const Space& X) { return X.canonical_balls().size(); })
      .def("doubling", [](const Space& X) {
        const auto d = X.doubling();
        return py::make_tuple(d.centered, d.off_center);
      });

  m.def("bmo_norm",
        [](const Space& X, const Field& f) { return bmo_norm(X, f).value; },
        py::arg("space"), py::arg("field"));
  m.def("dual_norm",
        [](const Space& X, const Field& f) { return dual_norm(X, f).value; },
        py::arg("space"), py::arg("field"));
  m.def("jn_constant",
        [](const Space& X, const Field& f) { return jn_constant(X, f); },
        py::arg("space"), py::arg("field"));
  m.def("stromberg_majorant", &stromberg_majorant);
  m.def("choose_q", &choose_q, py::arg("c"), py::arg("n_sets"));

  m.def(
      "density",
      [](const Space& X, const std::vector<std::vector<int>>& sets, double c) {
        const auto d = density_functional(X, to_sets(X, sets), c);
        return py::make_tuple(d.value, d.lambda_max);
      },
      py::arg("space"), py::arg("sets"), py::arg("c") = 2.0);

  m.def(
      "uchiyama",
      [](const Space& X, const std::vector<std::vector<int>>& sets, double lam,
         int q, double cd, int depth) {
        BuildParams bp;
        bp.lambda = lam;
        bp.q = q;
        bp.c_off = cd;
        bp.depth = depth;
        const auto built = uchiyama_construct(X, to_sets(X, sets), bp);
        return py::make_tuple(built.fields, built.used_trivial);
      },
      py::arg("space"), py::arg("sets"), py::arg("lam"), py::arg("q") = 0,
      py::arg("cd") = 0.0, py::arg("depth") = 0);

  m.def(
      "verify",
      [](const Space& X, const std::vector<Field>& fields,
         const std::vector<std::vector<int>>& sets, double lam) {
        const auto r = verify_construction(X, fields, to_sets(X, sets), lam);
        return py::make_tuple(r.sum_dev, r.range_dev, r.vanish_ok, r.c1_emp);
      },
      py::arg("space"), py::arg("fields"), py::arg("sets"), py::arg("lam"));

  m.def(
      "fit_map",
      [](const Space& X, const PointMap& F, std::uint64_t seed, int trials) {
        const auto fit = condition_i_fit(X, F, make_pair_family(X, seed, trials));
        return py::make_tuple(fit.K, fit.alpha);
      },
      py::arg("space"), py::arg("map"), py::arg("seed") = 1, py::arg("trials") = 64);

  m.def(
      "opnorm",
      [](const Space& X, const PointMap& F, std::uint64_t seed) {
        return operator_norm_estimate(X, F, default_field_family(X, seed)).value;
      },
      py::arg("space"), py::arg("map"), py::arg("seed") = 1);

  m.def(
      "roundtrip",
      [](const Space& X, const PointMap& F, const std::vector<int>& e1,
         const std::vector<int>& e2, std::uint64_t seed) {
        const auto r = gotoh_roundtrip(X, F, make_point_set(X, e1),
                                       make_point_set(X, e2), seed);
        return py::make_tuple(r.measured, r.predicted, r.pass);
      },
      py::arg("space"), py::arg("map"), py::arg("e1"), py::arg("e2"),
      py::arg("seed") = 1);
}
