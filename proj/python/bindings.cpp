// Python bindings: thin numpy-centric wrappers over the core library.
// Images are float64 (H, W) arrays in [0,1]; disparity maps are float64
// (H, W) with NaN marking invalid pixels; masks are bool (H, W).
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <optional>
#include <utility>

#include "stereoct/attack.hpp"
#include "stereoct/cost_volume.hpp"
#include "stereoct/eval.hpp"
#include "stereoct/gradient.hpp"
#include "stereoct/imageio.hpp"
#include "stereoct/matcher.hpp"
#include "stereoct/synth.hpp"

namespace py = pybind11;
using namespace stereoct;

namespace {

using DArray = py::array_t<double, py::array::c_style | py::array::forcecast>;
using BArray = py::array_t<bool, py::array::c_style | py::array::forcecast>;

GrayImage to_image(const DArray& arr) {
  if (arr.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  GrayImage img(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)));
  std::copy(arr.data(), arr.data() + arr.size(), img.data.begin());
  return img;
}

DisparityMap to_disparity(const DArray& arr) {
  if (arr.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  DisparityMap d(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)));
  const double* p = arr.data();
  for (size_t i = 0; i < d.size(); ++i) {
    d.data[i] = p[i];
    d.valid[i] = std::isnan(p[i]) ? 0 : 1;
    if (!d.valid[i]) d.data[i] = 0.0;
  }
  return d;
}

Mask to_mask(const BArray& arr) {
  if (arr.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  Mask m(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)));
  const bool* p = arr.data();
  for (size_t i = 0; i < m.data.size(); ++i) m.data[i] = p[i] ? 1 : 0;
  return m;
}

py::array from_image(const GrayImage& img) {
  py::array_t<double> arr({img.height, img.width});
  std::copy(img.data.begin(), img.data.end(), arr.mutable_data());
  return arr;
}

py::array from_disparity(const DisparityMap& d) {
  py::array_t<double> arr({d.height, d.width});
  double* p = arr.mutable_data();
  for (size_t i = 0; i < d.size(); ++i)
    p[i] = d.valid[i] ? d.data[i] : std::numeric_limits<double>::quiet_NaN();
  return arr;
}

py::array from_mask(const Mask& m) {
  py::array_t<bool> arr({m.height, m.width});
  bool* p = arr.mutable_data();
  for (size_t i = 0; i < m.data.size(); ++i) p[i] = m.data[i] != 0;
  return arr;
}

PipelineConfig make_config(const std::string& descriptor, std::optional<std::vector<int>> scales,
                           int max_disp, double steepness, int window, double tau) {
  PipelineConfig cfg;
  cfg.descriptor = parse_descriptor(descriptor);
  if (scales) cfg.scales = *scales;
  cfg.max_disp = max_disp;
  cfg.steepness = steepness;
  cfg.match.agg_window = window;
  cfg.match.temperature = tau;
  cfg.validate();
  return cfg;
}

PerturbationMap to_pert(const DArray& arr, double eps) {
  if (arr.ndim() != 2) throw std::invalid_argument("expected a 2-D array");
  PerturbationMap p(static_cast<int>(arr.shape(1)), static_cast<int>(arr.shape(0)), eps);
  std::copy(arr.data(), arr.data() + arr.size(), p.data.begin());
  return p;
}

py::array from_pert(const PerturbationMap& p) {
  py::array_t<double> arr({p.height, p.width});
  std::copy(p.data.begin(), p.data.end(), arr.mutable_data());
  return arr;
}

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["epe"] = m.epe;
  d["bad1"] = m.bad1;
  d["bad3"] = m.bad3;
  d["pixels"] = m.pixels;
  d["mask_fraction"] = m.mask_fraction;
  return d;
}

std::optional<Rect> to_rect(const std::optional<std::vector<int>>& r) {
  if (!r) return std::nullopt;
  if (r->size() != 4) throw std::invalid_argument("rect must be [x, y, w, h]");
  return Rect{(*r)[0], (*r)[1], (*r)[2], (*r)[3]};
}

}  // namespace

PYBIND11_MODULE(_stereoct, m) {
  m.doc() = "Stereo census robustness toolkit";

  py::class_<CostVolume>(m, "CostVolume")
      .def_readonly("height", &CostVolume::height)
      .def_readonly("width", &CostVolume::width)
      .def_readonly("max_disp", &CostVolume::max_disp)
      .def_property_readonly("cost",
                             [](const CostVolume& v) {
                               py::array_t<double> arr({v.height, v.width, v.max_disp});
                               std::copy(v.cost.begin(), v.cost.end(), arr.mutable_data());
                               return arr;
                             })
      .def_property_readonly("valid", [](const CostVolume& v) {
        py::array_t<bool> arr({v.height, v.width, v.max_disp});
        bool* p = arr.mutable_data();
        for (size_t i = 0; i < v.valid.size(); ++i) p[i] = v.valid[i] != 0;
        return arr;
      });

  m.def(
      "build_cost_volume",
      [](const DArray& left, const DArray& right, const std::string& descriptor,
         std::optional<std::vector<int>> scales, int max_disp, double steepness) {
        const GrayImage l = to_image(left), r = to_image(right);
        const PipelineConfig cfg = make_config(descriptor, std::move(scales), max_disp,
                                               steepness, 7, 0.1);
        switch (cfg.descriptor) {
          case Descriptor::census_hard:
            return build_census_volume_reduced(l, r, cfg.scales, cfg.max_disp);
          case Descriptor::census_soft:
            return build_soft_census_volume_reduced(l, r, cfg.scales, cfg.max_disp,
                                                    cfg.steepness);
          default:
            return build_sad_volume_reduced(l, r, cfg.scales, cfg.max_disp);
        }
      },
      py::arg("left"), py::arg("right"), py::arg("descriptor") = "census",
      py::arg("scales") = std::nullopt, py::arg("max_disp") = 64, py::arg("steepness") = 1e5,
      "Scale-reduced matching cost volume; invalid entries carry cost 1.0.");

  m.def(
      "sgm_aggregate",
      [](const CostVolume& vol, double p1, double p2, int directions) {
        SgmParams params;
        params.p1 = p1;
        params.p2 = p2;
        params.directions = directions;
        return sgm_aggregate(vol, params);
      },
      py::arg("volume"), py::arg("p1") = 0.05, py::arg("p2") = 0.5, py::arg("directions") = 8);

  m.def(
      "wta", [](const CostVolume& vol) { return from_disparity(wta(vol)); }, py::arg("volume"),
      "Winner-take-all disparities; NaN where no candidate is valid.");

  m.def(
      "soft_argmin",
      [](const CostVolume& vol, int window, double tau) {
        SoftMatchParams params;
        params.agg_window = window;
        params.temperature = tau;
        params.validate();
        return from_disparity(soft_argmin(vol, params));
      },
      py::arg("volume"), py::arg("window") = 7, py::arg("tau") = 0.1);

  m.def(
      "occlusion_mask",
      [](const DArray& gt) { return from_mask(occlusion_mask(to_disparity(gt))); },
      py::arg("gt"), "Left-view pixels whose correspondence is hidden or out of frame.");

  m.def(
      "eval_mask",
      [](const DArray& gt, const BArray& occl, int max_disp,
         std::optional<std::vector<int>> crop) {
        return from_mask(
            build_eval_mask(to_disparity(gt), to_mask(occl), to_rect(crop), max_disp));
      },
      py::arg("gt"), py::arg("occl"), py::arg("max_disp"), py::arg("crop") = std::nullopt);

  m.def(
      "metrics",
      [](const DArray& pred, const DArray& gt, const BArray& mask) {
        return metrics_dict(compute_metrics(to_disparity(pred), to_disparity(gt), to_mask(mask)));
      },
      py::arg("pred"), py::arg("gt"), py::arg("mask"));

  m.def(
      "make_scene",
      [](int width, int height, const std::string& kind, double d0, double d1, double sx,
         double sy, int step_x, double tex_lo, double tex_hi, uint64_t seed, bool subpixel) {
        SceneSpec spec;
        spec.width = width;
        spec.height = height;
        spec.kind = parse_scene_kind(kind);
        spec.d0 = d0;
        spec.d1 = d1;
        spec.sx = sx;
        spec.sy = sy;
        spec.step_x = step_x;
        spec.tex_lo = tex_lo;
        spec.tex_hi = tex_hi;
        spec.seed = seed;
        spec.subpixel = subpixel;
        const SyntheticScene sc = make_scene(spec);
        py::dict d;
        d["left"] = from_image(sc.left);
        d["right"] = from_image(sc.right);
        d["gt"] = from_disparity(sc.gt);
        d["occl"] = from_mask(sc.occl);
        return d;
      },
      py::arg("width") = 64, py::arg("height") = 48, py::arg("kind") = "plane",
      py::arg("d0") = 5.0, py::arg("d1") = 0.0, py::arg("sx") = 0.0, py::arg("sy") = 0.0,
      py::arg("step_x") = -1, py::arg("tex_lo") = 0.0, py::arg("tex_hi") = 1.0,
      py::arg("seed") = 1, py::arg("subpixel") = false,
      "Random-dot stereo scene with exact ground truth and occlusion mask.");

  m.def(
      "forward_loss",
      [](const DArray& left, const DArray& right, const DArray& gt, const DArray& pert,
         const std::string& descriptor, std::optional<std::vector<int>> scales, int max_disp,
         double steepness, int window, double tau) {
        const PipelineConfig cfg =
            make_config(descriptor, std::move(scales), max_disp, steepness, window, tau);
        return forward_loss(to_image(left), to_image(right), to_disparity(gt),
                            to_pert(pert, 1.0), cfg);
      },
      py::arg("left"), py::arg("right"), py::arg("gt"), py::arg("pert"),
      py::arg("descriptor") = "census-soft", py::arg("scales") = std::nullopt,
      py::arg("max_disp") = 64, py::arg("steepness") = 1e5, py::arg("window") = 7,
      py::arg("tau") = 0.1);

  m.def(
      "grad_loss",
      [](const DArray& left, const DArray& right, const DArray& gt, const DArray& pert,
         const std::string& descriptor, std::optional<std::vector<int>> scales, int max_disp,
         double steepness, int window, double tau) {
        const PipelineConfig cfg =
            make_config(descriptor, std::move(scales), max_disp, steepness, window, tau);
        const LossGradient g = grad_loss(to_image(left), to_image(right), to_disparity(gt),
                                         to_pert(pert, 1.0), cfg);
        py::array_t<double> arr({g.height, g.width});
        std::copy(g.d_pert.begin(), g.d_pert.end(), arr.mutable_data());
        return py::make_tuple(g.loss, arr, g.blocked);
      },
      py::arg("left"), py::arg("right"), py::arg("gt"), py::arg("pert"),
      py::arg("descriptor") = "census-soft", py::arg("scales") = std::nullopt,
      py::arg("max_disp") = 64, py::arg("steepness") = 1e5, py::arg("window") = 7,
      py::arg("tau") = 0.1, "Returns (loss, dL/dP, blocked).");

  m.def(
      "apply_perturbation",
      [](const DArray& left, const DArray& right, const DArray& gt, const BArray& occl,
         const DArray& pert) {
        const auto [ladv, radv] = apply_perturbation(to_image(left), to_image(right),
                                                     to_disparity(gt), to_mask(occl),
                                                     to_pert(pert, 1.0));
        return py::make_tuple(from_image(ladv), from_image(radv));
      },
      py::arg("left"), py::arg("right"), py::arg("gt"), py::arg("occl"), py::arg("pert"));

  m.def(
      "pgd_attack",
      [](const DArray& left, const DArray& right, const DArray& gt, const BArray& occl,
         const std::string& mode, double eps, double alpha, int steps,
         std::optional<std::vector<int>> patch, const std::string& descriptor,
         std::optional<std::vector<int>> scales, int max_disp, double steepness, int window,
         double tau, bool allow_zero_grad) {
        AttackConfig cfg;
        cfg.mode = parse_attack_mode(mode);
        cfg.eps = eps;
        cfg.alpha = alpha;
        cfg.steps = steps;
        cfg.patch_rect = to_rect(patch);
        cfg.pipeline = make_config(descriptor, std::move(scales), max_disp, steepness, window, tau);
        cfg.allow_zero_grad = allow_zero_grad;

        const GrayImage l = to_image(left), r = to_image(right);
        const DisparityMap g = to_disparity(gt);
        const Mask o = to_mask(occl);
        py::dict out;
        if (cfg.mode == AttackMode::unconstrained) {
          const UnconstrainedResult res = unconstrained_pgd(l, r, g, cfg);
          out["pert_left"] = from_pert(res.pert_left);
          out["pert_right"] = from_pert(res.pert_right);
          out["trace"] = res.loss_trace;
          out["blocked"] = res.blocked;
          return out;
        }
        const AttackResult res =
            cfg.mode == AttackMode::patch
                ? patch_attack(l, r, g, o, *cfg.patch_rect, cfg)
                : pgd_attack(l, r, g, o, cfg);
        const auto [ladv, radv] = apply_perturbation(l, r, g, o, res.pert);
        out["pert"] = from_pert(res.pert);
        out["trace"] = res.loss_trace;
        out["blocked"] = res.blocked;
        out["left_adv"] = from_image(ladv);
        out["right_adv"] = from_image(radv);
        return out;
      },
      py::arg("left"), py::arg("right"), py::arg("gt"), py::arg("occl"),
      py::arg("mode") = "constrained", py::arg("eps") = 0.03, py::arg("alpha") = 0.01,
      py::arg("steps") = 20, py::arg("patch") = std::nullopt,
      py::arg("descriptor") = "census-soft", py::arg("scales") = std::nullopt,
      py::arg("max_disp") = 64, py::arg("steepness") = 1e5, py::arg("window") = 7,
      py::arg("tau") = 0.1, py::arg("allow_zero_grad") = false,
      "Sign-gradient ascent on the matching loss; see AttackConfig for modes.");

  m.def(
      "read_pgm", [](const std::string& path) { return from_image(read_pgm(path)); },
      py::arg("path"));
  m.def(
      "write_pgm",
      [](const DArray& img, const std::string& path, int maxval) {
        write_pgm(to_image(img), path, maxval);
      },
      py::arg("image"), py::arg("path"), py::arg("maxval") = 65535);
  m.def(
      "read_pfm", [](const std::string& path) { return from_disparity(read_pfm(path)); },
      py::arg("path"));
  m.def(
      "write_pfm",
      [](const DArray& disp, const std::string& path) { write_pfm(to_disparity(disp), path); },
      py::arg("disparity"), py::arg("path"));

  m.attr("__version__") = "0.1.0";
}
