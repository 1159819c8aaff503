#pragma once

#include <optional>
#include <vector>

#include "pixelarray/array.hpp"
#include "pixelarray/expr.hpp"
#include "pixelarray/model.hpp"

namespace pixelarray {

// Half-open box of one pixel: per-port interval [lo[k], hi[k]).
struct PixelBox {
  std::vector<double> lo;
  std::vector<double> hi;
};

struct Tolerance {
  double epsilon = 0.05;
};

PixelBox pixel_box(const Pack& pack, const Entry& e);
std::vector<double> pixel_center(const Pack& pack, const Entry& e);

// l_infinity radius of one pixel: max over ports of half the cell width.
// Zero for the empty pack.
double pack_radius(const Pack& pack);

struct PlotOptions {
  int threads = 1;
  // Lipschitz bound of the relation's expression on the box, enabling the
  // coarse skip pre-pass below.
  std::optional<double> lipschitz;
  // When set (and a Lipschitz bound is given), plot first on blocks of up to
  // 8 cells per axis with tolerance eps + L*(8-1)*radius and skip the fine
  // cells of blocks that stay off. Never changes the result.
  bool coarse_prepass = false;
};

// Turns entry e on iff the distance from the expression's value at the pixel
// center to the target set is at most epsilon. Undefined centers stay off.
BoolArray sample_in_center_plot(const Relation& rel, const Pack& pack, Tolerance tol,
                                const PlotOptions& opts = {});

struct ErrorBand {
  double min_seen = 0.0;
  double max_seen = 0.0;
  bool any_undefined = false;
};

// Evaluates the distance to the target on a samples^dim midpoint sub-grid of
// Pixel(e), plus the center. Test oracle for the plot error predicates.
ErrorBand error_band(const Relation& rel, const Pack& pack, const Entry& e, int samples);

// Estimates a Lipschitz bound by sampled central differences and suggests
// epsilon = 1.1 * L * pack_radius(pack).
Tolerance suggest_tolerance(const Relation& rel, const Pack& pack);

}  // namespace pixelarray
