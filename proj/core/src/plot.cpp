#include "pixelarray/plot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pixelarray/detail/parallel.hpp"

namespace pixelarray {

namespace {

void check_entry(const Pack& pack, const Entry& e) {
  if (e.coords.size() != pack.size()) {
    fail(Errc::index_out_of_range, "entry has wrong arity");
  }
  for (std::size_t k = 0; k < pack.size(); ++k) {
    if (e.coords[k] < 1 || e.coords[k] > pack.port(k).resolution) {
      fail(Errc::index_out_of_range,
           "coordinate of port '" + pack.port(k).name + "' out of range");
    }
  }
}

// Coordinate of the point at fraction t through cell k of the port's range.
// Written as a single scaled ratio so that cell edges land exactly on the
// box bounds and symmetric grids stay symmetric.
double port_point(const Port& p, int cell, double t) {
  double frac = (static_cast<double>(cell - 1) + t) / static_cast<double>(p.resolution);
  return p.lower + (p.upper - p.lower) * frac;
}

void check_pack_matches(const Relation& rel, const Pack& pack) {
  if (pack.size() != rel.variables.size()) {
    fail(Errc::pack_mismatch, "pack ports do not match relation variables");
  }
  for (std::size_t k = 0; k < pack.size(); ++k) {
    if (pack.port(k).name != rel.variables[k]) {
      fail(Errc::pack_mismatch, "pack ports do not match relation variables");
    }
  }
}

void check_tolerance(Tolerance tol) {
  if (!(tol.epsilon > 0.0)) fail(Errc::bad_input, "tolerance must be positive");
}

// Plots the fine cells within one block (given by 1-based inclusive cell
// ranges per port), writing on-pixels into `out`.
void plot_range(const Relation& rel, const Pack& pack, double eps,
                const std::vector<int>& first, const std::vector<int>& last, BoolArray& out) {
  const std::size_t dim = pack.size();
  std::vector<int> coords(first);
  std::vector<double> point(dim);
  for (std::size_t k = 0; k < dim; ++k) point[k] = port_point(pack.port(k), coords[k], 0.5);
  const std::vector<std::uint64_t> strides = out.strides();

  while (true) {
    std::uint64_t off = 0;
    for (std::size_t k = 0; k < dim; ++k) {
      off += static_cast<std::uint64_t>(coords[k] - 1) * strides[k];
    }
    double d = distance_to_target(eval_sorted(*rel.lhs, rel.variables, point), rel.target);
    if (d <= eps) out.put(off, BoolSemiring::one());

    std::size_t k = dim;
    while (k-- > 0) {
      if (coords[k] < last[k]) {
        ++coords[k];
        point[k] = port_point(pack.port(k), coords[k], 0.5);
        break;
      }
      coords[k] = first[k];
      point[k] = port_point(pack.port(k), coords[k], 0.5);
      if (k == 0) return;
    }
    if (dim == 0) return;
  }
}

}  // namespace

PixelBox pixel_box(const Pack& pack, const Entry& e) {
  check_entry(pack, e);
  PixelBox box;
  box.lo.reserve(pack.size());
  box.hi.reserve(pack.size());
  for (std::size_t k = 0; k < pack.size(); ++k) {
    box.lo.push_back(port_point(pack.port(k), e.coords[k], 0.0));
    box.hi.push_back(port_point(pack.port(k), e.coords[k], 1.0));
  }
  return box;
}

std::vector<double> pixel_center(const Pack& pack, const Entry& e) {
  check_entry(pack, e);
  std::vector<double> c;
  c.reserve(pack.size());
  for (std::size_t k = 0; k < pack.size(); ++k) {
    c.push_back(port_point(pack.port(k), e.coords[k], 0.5));
  }
  return c;
}

double pack_radius(const Pack& pack) {
  double radius = 0.0;
  for (const Port& p : pack.ports()) {
    radius = std::max(radius, (p.upper - p.lower) / p.resolution / 2.0);
  }
  return radius;
}

BoolArray sample_in_center_plot(const Relation& rel, const Pack& pack, Tolerance tol,
                                const PlotOptions& opts) {
  check_pack_matches(rel, pack);
  check_tolerance(tol);
  BoolArray out(pack);
  const std::size_t dim = pack.size();

  if (opts.coarse_prepass && opts.lipschitz && dim > 0) {
    // Coarse pass: each block spans up to 8 cells per axis; a block whose
    // sample point (the midpoint of the covered cell centers) sits further
    // than eps + L*(8-1)*radius from the target cannot contain an on-cell.
    const double slack = tol.epsilon + *opts.lipschitz * 7.0 * pack_radius(pack);
    std::vector<int> blocks(dim);
    for (std::size_t k = 0; k < dim; ++k) {
      blocks[k] = (pack.port(k).resolution + 7) / 8;
    }
    EntryCursor cursor(blocks);
    std::vector<int> first(dim), last(dim);
    std::vector<double> point(dim);
    while (!cursor.done()) {
      for (std::size_t k = 0; k < dim; ++k) {
        const Port& p = pack.port(k);
        first[k] = (cursor.coords()[k] - 1) * 8 + 1;
        last[k] = std::min(cursor.coords()[k] * 8, p.resolution);
        // midpoint of the covered cell centers
        double mid = 0.5 * (first[k] + last[k] - 1);
        point[k] = p.lower + (p.upper - p.lower) * (mid / p.resolution);
      }
      double d = distance_to_target(eval_sorted(*rel.lhs, rel.variables, point), rel.target);
      if (d <= slack) {
        plot_range(rel, pack, tol.epsilon, first, last, out);
      }
      cursor.advance();
    }
    return out;
  }

  const std::uint64_t total = out.size();
  const std::vector<std::uint64_t> strides = out.strides();
  auto run = [&](std::uint64_t begin, std::uint64_t end) {
    std::vector<int> coords(dim);
    std::uint64_t rest = begin;
    for (std::size_t k = 0; k < dim; ++k) {
      coords[k] = static_cast<int>(rest / strides[k]) + 1;
      rest %= strides[k];
    }
    std::vector<double> point(dim);
    for (std::size_t k = 0; k < dim; ++k) point[k] = port_point(pack.port(k), coords[k], 0.5);

    for (std::uint64_t off = begin; off < end; ++off) {
      double d = distance_to_target(eval_sorted(*rel.lhs, rel.variables, point), rel.target);
      if (d <= tol.epsilon) out.put(off, BoolSemiring::one());
      std::size_t k = dim;
      while (k-- > 0) {
        if (coords[k] < pack.port(k).resolution) {
          ++coords[k];
          point[k] = port_point(pack.port(k), coords[k], 0.5);
          break;
        }
        coords[k] = 1;
        point[k] = port_point(pack.port(k), 1, 0.5);
      }
    }
  };
  detail::parallel_blocks(total, detail::resolve_threads(opts.threads), run);
  return out;
}

ErrorBand error_band(const Relation& rel, const Pack& pack, const Entry& e, int samples) {
  check_pack_matches(rel, pack);
  check_entry(pack, e);
  if (samples < 1) fail(Errc::bad_input, "samples must be >= 1");

  ErrorBand band;
  band.min_seen = std::numeric_limits<double>::infinity();
  band.max_seen = 0.0;

  const std::size_t dim = pack.size();
  std::vector<double> point(dim);
  auto probe = [&](const std::vector<double>& p) {
    double d = distance_to_target(eval_sorted(*rel.lhs, rel.variables, p), rel.target);
    if (std::isinf(d)) band.any_undefined = true;
    band.min_seen = std::min(band.min_seen, d);
    band.max_seen = std::max(band.max_seen, d);
  };

  // samples^dim midpoint sub-grid
  std::vector<int> sub(dim, 1);
  while (true) {
    for (std::size_t k = 0; k < dim; ++k) {
      double t = (sub[k] - 0.5) / samples;
      point[k] = port_point(pack.port(k), e.coords[k], t);
    }
    probe(point);
    std::size_t k = dim;
    bool carried = true;
    while (k-- > 0) {
      if (sub[k] < samples) {
        ++sub[k];
        carried = false;
        break;
      }
      sub[k] = 1;
    }
    if (dim == 0 || carried) break;
  }

  // the center, so odd and even sample counts both include it
  for (std::size_t k = 0; k < dim; ++k) {
    point[k] = port_point(pack.port(k), e.coords[k], 0.5);
  }
  probe(point);
  return band;
}

Tolerance suggest_tolerance(const Relation& rel, const Pack& pack) {
  check_pack_matches(rel, pack);
  const std::size_t dim = pack.size();
  if (dim == 0) return Tolerance{1e-9};

  // Sample a small stratified grid; at each defined point take the l1 norm
  // of a central-difference gradient as a local Lipschitz estimate.
  std::vector<int> strata(dim);
  for (std::size_t k = 0; k < dim; ++k) strata[k] = std::min(pack.port(k).resolution, 5);

  double best = 0.0;
  bool any = false;
  EntryCursor cursor(strata);
  std::vector<double> point(dim), shifted(dim);
  while (!cursor.done()) {
    for (std::size_t k = 0; k < dim; ++k) {
      const Port& p = pack.port(k);
      double frac = (cursor.coords()[k] - 0.5) / strata[k];
      point[k] = p.lower + (p.upper - p.lower) * frac;
    }
    double l1 = 0.0;
    bool ok = true;
    for (std::size_t k = 0; k < dim && ok; ++k) {
      const Port& p = pack.port(k);
      double h = (p.upper - p.lower) / p.resolution / 4.0;
      shifted = point;
      shifted[k] = point[k] + h;
      auto up = eval_sorted(*rel.lhs, rel.variables, shifted);
      shifted[k] = point[k] - h;
      auto down = eval_sorted(*rel.lhs, rel.variables, shifted);
      if (!up || !down) {
        ok = false;
        break;
      }
      l1 += std::fabs(*up - *down) / (2.0 * h);
    }
    if (ok) {
      best = std::max(best, l1);
      any = true;
    }
    cursor.advance();
  }
  if (!any) {
    fail(Errc::bad_input, "could not estimate a Lipschitz bound (expression undefined on grid)");
  }
  return Tolerance{std::max(1.1 * best * pack_radius(pack), 1e-9)};
}

}  // namespace pixelarray
