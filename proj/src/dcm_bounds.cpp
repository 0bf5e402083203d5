#include "alipmpc/dcm_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "alipmpc/alip_model.hpp"

namespace alipmpc {
namespace {

constexpr double kViolationTol = 1e-9;
constexpr std::size_t kMaxViolationsKept = 1000;

struct AxisBox {
  double lo, hi;
};

double clamp(double v, double lo, double hi) {
  return std::min(std::max(v, lo), hi);
}

// Best interior clearance achievable in one axis when the reachable image is
// the interval [img_lo, img_hi] and the target box is [box.lo, box.hi].
// Negative when the two do not intersect (half of nothing: minus the gap).
double axis_clearance(double img_lo, double img_hi, const AxisBox& box) {
  const double lo = std::max(img_lo, box.lo);
  const double hi = std::min(img_hi, box.hi);
  if (lo > hi) return hi - lo;  // negative gap
  const double pt = clamp(0.5 * (box.lo + box.hi), lo, hi);
  return std::min(box.hi - pt, pt - box.lo);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  if (n == 1) {
    v[0] = 0.5 * (lo + hi);
    return v;
  }
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return v;
}

struct SideGrid {
  SwingSide side;
  std::vector<double> zx, zy;
  AxisBox target_x, target_y;   // box of the next side
  AxisBox ux, uy;               // admissible step positions for this side
};

SideGrid make_side_grid(SwingSide side, const DcmBounds& bounds,
                        const GaitLimits& limits, const ModelParams& p,
                        std::size_t g) {
  SideGrid sg;
  sg.side = side;
  const Vec2 ybox = bounds.y_box(side);
  const Vec2 ybox_next = bounds.y_box(other_side(side));
  sg.zx = linspace(bounds.z_x_min(), bounds.z_x_max, g);
  sg.zy = linspace(ybox.x(), ybox.y(), g);
  sg.target_x = {bounds.z_x_min(), bounds.z_x_max};
  sg.target_y = {ybox_next.x(), ybox_next.y()};
  sg.ux = {limits.L_min, limits.L_max};
  sg.uy = {limits.w(side) + limits.W_min(side),
           limits.w(side) + limits.W_max(side)};
  return sg;
}

void fold_grid_into_report(const SideGrid& sg, std::size_t g,
                           const std::vector<double>& margin,
                           const std::vector<double>& best_dist,
                           bool with_contraction, BoundednessReport& rep) {
  for (std::size_t ix = 0; ix < g; ++ix) {
    for (std::size_t iy = 0; iy < g; ++iy) {
      const std::size_t at = ix * g + iy;
      rep.worst_margin = std::min(rep.worst_margin, margin[at]);
      ++rep.checked;
      if (margin[at] < -kViolationTol &&
          rep.violations.size() < kMaxViolationsKept) {
        rep.violations.push_back(
            {DcmVec(sg.zx[ix], sg.zy[iy]), sg.side, margin[at]});
      }
      if (!with_contraction || margin[at] < -kViolationTol) continue;
      const bool interior = ix > 0 && ix + 1 < g && iy > 0 && iy + 1 < g;
      if (!interior) continue;
      const double d0 = std::abs(sg.zx[ix]);
      if (d0 <= 1e-9) continue;
      const double ratio = best_dist[at] / d0;
      rep.worst_contraction = std::max(rep.worst_contraction, ratio);
      if (!(best_dist[at] < d0)) rep.contraction_ok = false;
    }
  }
}

}  // namespace

DcmBounds compute_dcm_bounds(const GaitLimits& limits, const ModelParams& p) {
  limits.validate();
  const double e1 = std::exp(p.lambda * limits.T_min);
  const double e2 = e1 * e1;  // e^{2 lambda T_min}

  DcmBounds b;
  b.z_x_max = limits.L_max / (e1 - 1.0);
  const double width_term = limits.w_l / (e1 + 1.0);
  b.z_yl_min = width_term + (-limits.W_l_max + limits.W_l_min * e1) / (e2 - 1.0);
  b.z_yl_max = width_term + (-limits.W_l_min + limits.W_l_max * e1) / (e2 - 1.0);
  return b;
}

BoundednessReport verify_boundedness(const DcmBounds& bounds,
                                     const GaitLimits& limits,
                                     const ModelParams& p,
                                     std::size_t grid_density,
                                     const BoundednessOptions& opts) {
  if (grid_density < 10) {
    throw std::invalid_argument("verify_boundedness: grid_density < 10");
  }
  const std::size_t g = grid_density;
  const std::size_t tg =
      opts.duration_grid > 0 ? static_cast<std::size_t>(opts.duration_grid) : g;
  const std::vector<double> ts = linspace(limits.T_min, limits.T_max, tg);
  std::vector<double> sigmas(tg);
  for (std::size_t i = 0; i < tg; ++i) sigmas[i] = std::exp(p.lambda * ts[i]);

  BoundednessReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();

  for (SwingSide side : {SwingSide::LeftSwing, SwingSide::RightSwing}) {
    const SideGrid sg = make_side_grid(side, bounds, limits, p, g);
    std::vector<double> margin(g * g);
    std::vector<double> best_dist(g * g);

    const int64_t rows = static_cast<int64_t>(g);
#pragma omp parallel for schedule(static) if (opts.parallel)
    for (int64_t ix = 0; ix < rows; ++ix) {
      for (std::size_t iy = 0; iy < g; ++iy) {
        const double zx = sg.zx[static_cast<std::size_t>(ix)];
        const double zy = sg.zy[iy];
        double best_m = -std::numeric_limits<double>::infinity();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t it = 0; it < tg; ++it) {
          const double s = sigmas[it];
          const double img_x_lo = s * zx - sg.ux.hi;
          const double img_x_hi = s * zx - sg.ux.lo;
          const double img_y_lo = s * zy - sg.uy.hi;
          const double img_y_hi = s * zy - sg.uy.lo;
          const double m =
              std::min(axis_clearance(img_x_lo, img_x_hi, sg.target_x),
                       axis_clearance(img_y_lo, img_y_hi, sg.target_y));
          best_m = std::max(best_m, m);
          if (m >= -1e-12) {
            // Forward-walking contraction acts on the x component: the
            // closest admissible image magnitude at this duration.
            const double px = clamp(0.0, std::max(img_x_lo, sg.target_x.lo),
                                    std::min(img_x_hi, sg.target_x.hi));
            best_d = std::min(best_d, std::abs(px));
          }
        }
        const std::size_t at = static_cast<std::size_t>(ix) * g + iy;
        margin[at] = best_m;
        best_dist[at] = best_d;
      }
    }
    fold_grid_into_report(sg, g, margin, best_dist, /*with_contraction=*/true,
                          rep);
  }
  return rep;
}

BoundednessReport verify_boundedness_bruteforce(const DcmBounds& bounds,
                                                const GaitLimits& limits,
                                                const ModelParams& p,
                                                std::size_t grid_density) {
  if (grid_density < 10) {
    throw std::invalid_argument("verify_boundedness: grid_density < 10");
  }
  const std::size_t g = grid_density;
  const std::vector<double> ts = linspace(limits.T_min, limits.T_max, g);

  BoundednessReport rep;
  rep.worst_margin = std::numeric_limits<double>::infinity();

  for (SwingSide side : {SwingSide::LeftSwing, SwingSide::RightSwing}) {
    const SideGrid sg = make_side_grid(side, bounds, limits, p, g);
    const std::vector<double> uxs = linspace(sg.ux.lo, sg.ux.hi, g);
    const std::vector<double> uys = linspace(sg.uy.lo, sg.uy.hi, g);
    std::vector<double> margin(g * g);
    std::vector<double> best_dist(g * g);

    for (std::size_t ix = 0; ix < g; ++ix) {
      for (std::size_t iy = 0; iy < g; ++iy) {
        const DcmVec z(sg.zx[ix], sg.zy[iy]);
        double best_m = -std::numeric_limits<double>::infinity();
        double best_d = std::numeric_limits<double>::infinity();
        for (double T : ts) {
          for (double ux : uxs) {
            for (double uy : uys) {
              Footstep step{Vec2(ux, uy), T, side};
              const DcmVec img = reset_map(z, step, p);
              const double m = std::min(
                  std::min(sg.target_x.hi - img.x(), img.x() - sg.target_x.lo),
                  std::min(sg.target_y.hi - img.y(), img.y() - sg.target_y.lo));
              best_m = std::max(best_m, m);
              if (m >= -1e-12) best_d = std::min(best_d, std::abs(img.x()));
            }
          }
        }
        margin[ix * g + iy] = best_m;
        best_dist[ix * g + iy] = best_d;
      }
    }
    // Contraction needs the optimal u, which a gridded u cannot represent
    // faithfully; the brute-force path only certifies feasibility margins.
    fold_grid_into_report(sg, g, margin, best_dist, /*with_contraction=*/false,
                          rep);
  }
  return rep;
}

}  // namespace alipmpc
