#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstring>
#include <optional>
#include <string>

#include "cacti/analysis.hpp"
#include "cacti/calibration.hpp"
#include "cacti/forward_model.hpp"
#include "cacti/gap_solver.hpp"
#include "cacti/io.hpp"
#include "cacti/scene.hpp"
#include "cacti/transforms.hpp"

namespace py = pybind11;
using namespace cacti;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

// Cubes cross the boundary as (frames, rows, cols) arrays; 2D arrays are
// single-frame cubes.
Cube to_cube(const Array& a) {
  if (a.ndim() == 2) {
    Cube c(a.shape(0), a.shape(1), 1);
    std::memcpy(c.data(), a.data(), c.size() * sizeof(double));
    return c;
  }
  if (a.ndim() != 3) throw py::value_error("expected a 2D or 3D array");
  Cube c(a.shape(1), a.shape(2), a.shape(0));
  std::memcpy(c.data(), a.data(), c.size() * sizeof(double));
  return c;
}

Array to_array(const Cube& c) {
  Array a({c.frames(), c.rows(), c.cols()});
  std::memcpy(a.mutable_data(), c.data(), c.size() * sizeof(double));
  return a;
}

Array to_image(const Cube& c) {
  Array a({c.rows(), c.cols()});
  std::memcpy(a.mutable_data(), c.data(), c.size() * sizeof(double));
  return a;
}

SolverSettings settings(const std::string& transform, const std::string& partition, bool subband_weights,
                        std::size_t max_iterations, double tol) {
  SolverSettings s;
  if (transform == "mostly_static") {
    s.transform = {AxisKind::haar, AxisKind::haar, AxisKind::dct};
  } else if (transform != "moving") {
    const AxisKind k = parse_axis_kind(transform);
    s.transform = {k, k, k};
  }
  s.partition = parse_partition_scheme(partition);
  s.subband_weights = subband_weights;
  s.max_iterations = max_iterations;
  s.stop_tolerance = tol;
  return s;
}

}  // namespace

PYBIND11_MODULE(_cacti, m) {
  m.doc() = "Coded aperture compressive temporal imaging and GAP reconstruction";

  py::register_exception<Error>(m, "CactiError", PyExc_ValueError);

  m.def(
      "generate_mask",
      [](std::size_t rows, std::size_t cols, double fill, std::uint64_t seed, std::size_t upsample) {
        return to_image(generate_mask(rows, cols, fill, seed, upsample).to_cube());
      },
      py::arg("rows"), py::arg("cols"), py::arg("fill") = 0.5, py::arg("seed"), py::arg("upsample") = 1);

  m.def(
      "triangle_positions", [](double c, double d) { return triangle_positions(c, d).positions; },
      py::arg("compression"), py::arg("step") = 1.0);

  py::class_<ForwardOperator>(m, "ForwardOperator")
      .def(py::init([](const Array& planes) { return ForwardOperator(to_cube(planes)); }), py::arg("planes"))
      .def_property_readonly("rows", &ForwardOperator::rows)
      .def_property_readonly("cols", &ForwardOperator::cols)
      .def_property_readonly("frames", &ForwardOperator::frames)
      .def_property_readonly("planes", [](const ForwardOperator& op) { return to_array(op.planes()); })
      .def_property_readonly("zero_code_pixels", &ForwardOperator::zero_code_pixels)
      .def(
          "forward",
          [](const ForwardOperator& op, const Array& f, double sigma, std::uint64_t seed) {
            const NoiseModel noise = sigma > 0.0 ? NoiseModel::gaussian(sigma, seed) : NoiseModel{};
            return to_image(forward(op, to_cube(f), noise));
          },
          py::arg("cube"), py::arg("noise_sigma") = 0.0, py::arg("noise_seed") = 0)
      .def("adjoint", [](const ForwardOperator& op, const Array& g) { return to_array(adjoint(op, to_cube(g))); });

  m.def(
      "build_operator",
      [](const Array& mask, double c, double d, std::size_t rows, std::size_t cols) {
        return build_operator(Mask::from_cube(to_cube(mask)), triangle_positions(c, d), rows, cols);
      },
      py::arg("mask"), py::arg("compression"), py::arg("step"), py::arg("rows"), py::arg("cols"));

  m.def("build_rerandomized_operator", &build_rerandomized_operator, py::arg("rows"), py::arg("cols"),
        py::arg("frames"), py::arg("fill"), py::arg("seed"));

  m.def(
      "generate_scene",
      [](const std::string& kind, std::size_t rows, std::size_t cols, std::size_t frames, std::uint64_t seed,
         double velocity_row, double velocity_col, double texture) {
        SceneSpec s;
        s.kind = parse_scene_kind(kind);
        s.rows = rows;
        s.cols = cols;
        s.frames = frames;
        s.seed = seed;
        s.velocity_row = velocity_row;
        s.velocity_col = velocity_col;
        s.texture = texture;
        return to_array(generate_scene(s).cube);
      },
      py::arg("kind"), py::arg("rows"), py::arg("cols"), py::arg("frames"), py::arg("seed"),
      py::arg("velocity_row") = 0.0, py::arg("velocity_col") = 1.0, py::arg("texture") = 0.0);

  m.def(
      "solve",
      [](const ForwardOperator& op, const Array& g, const std::string& transform, const std::string& partition,
         bool subband_weights, std::size_t max_iterations, double tol) {
        const SolverSettings st = settings(transform, partition, subband_weights, max_iterations, tol);
        const SolveResult r = solve(op, to_cube(g), make_solver_config(op, st));
        py::dict out;
        out["estimate"] = to_array(r.estimate);
        out["theta"] = to_array(r.state.theta);
        out["iterations"] = r.state.iteration;
        out["status"] = std::string(to_string(r.state.status));
        out["gap_norms"] = r.state.gap_norm_history;
        out["residuals"] = r.state.residual_history;
        return out;
      },
      py::arg("op"), py::arg("snapshot"), py::arg("transform") = "dct", py::arg("partition") = "blocks",
      py::arg("subband_weights") = false, py::arg("max_iterations") = 300, py::arg("tol") = 1e-6);

  m.def(
      "project_linear_manifold",
      [](const ForwardOperator& op, const Array& g, const Array& theta) {
        return to_array(project_linear_manifold(op, to_cube(g), to_cube(theta)).f);
      },
      py::arg("op"), py::arg("snapshot"), py::arg("theta"));

  m.def(
      "normalized_residual",
      [](const ForwardOperator& op, const Array& f, const Array& g) {
        return normalized_residual(op, to_cube(f), to_cube(g)).value;
      },
      py::arg("op"), py::arg("estimate"), py::arg("snapshot"));

  m.def(
      "transform",
      [](const Array& cube, const std::string& kinds, bool inverse) {
        const Cube c = to_cube(cube);
        std::array<AxisKind, 3> k{};
        if (kinds == "mostly_static") {
          k = {AxisKind::haar, AxisKind::haar, AxisKind::dct};
        } else {
          const AxisKind a = parse_axis_kind(kinds == "moving" ? "dct" : kinds);
          k = {a, a, a};
        }
        const TransformSpec spec(k, c.rows(), c.cols(), c.frames());
        return to_array(inverse ? apply_inverse(spec, c) : apply(spec, c));
      },
      py::arg("cube"), py::arg("kinds") = "dct", py::arg("inverse") = false);

  m.def(
      "psnr",
      [](const Array& ref, const Array& est, std::optional<double> peak) {
        const Cube r = to_cube(ref);
        return (peak ? psnr(r, to_cube(est), *peak) : psnr(r, to_cube(est))).db;
      },
      py::arg("reference"), py::arg("estimate"), py::arg("peak") = py::none());

  m.def("sum_frames", [](const Array& f) { return to_image(sum_frames(to_cube(f))); });
  m.def(
      "baseline_replicate",
      [](const Array& g, std::size_t frames) { return to_array(baseline_replicate(to_cube(g), frames)); },
      py::arg("snapshot"), py::arg("frames"));

  m.def(
      "temporal_spectrum_check",
      [](const Array& video, const std::vector<double>& code, long velocity) {
        if (video.ndim() != 2) throw py::value_error("video must be a 2D (x, t) array");
        using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
        const Eigen::MatrixXd v = Eigen::Map<const RowMajor>(video.data(), video.shape(0), video.shape(1));
        const SpectrumReport r = temporal_spectrum_check(v, code, velocity);
        return py::make_tuple(r.discrepancy, r.kernel_only_discrepancy);
      },
      py::arg("video"), py::arg("code"), py::arg("velocity"));

  m.def("write_ccv1", [](const std::string& path, const Array& a) { write_ccv1(path, to_cube(a)); });
  m.def("read_ccv1", [](const std::string& path) { return to_array(read_ccv1(path)); });
  m.def("encode_ccv1", [](const Array& a) {
    const auto bytes = encode_ccv1(to_cube(a));
    return py::bytes(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  });
  m.def("decode_ccv1", [](const py::bytes& b) {
    const std::string s = b;
    return to_array(decode_ccv1(std::span(reinterpret_cast<const std::uint8_t*>(s.data()), s.size())));
  });
}
