#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "pixelarray/array.hpp"
#include "pixelarray/detail/parallel.hpp"
#include "pixelarray/model.hpp"

namespace pixelarray {

struct MultiplyOptions {
  int threads = 1;
};

namespace detail {

// Precomputed strides of every link into each input array and the output:
// the offset of array i at link entry e is sum over links of
// (e[l] - 1) * coeff[i][l]. A pack touching a link through several ports
// accumulates all their strides, which realizes diagonal (trace-like) reads.
struct GamPlan {
  std::vector<int> exposed;  // link indices read by the outer pack
  std::vector<int> latent;   // remaining link indices
  std::vector<int> exposed_res;
  std::vector<int> latent_res;
  std::uint64_t exposed_cells = 1;
  std::uint64_t latent_cells = 1;
  std::vector<std::vector<std::int64_t>> coeff;  // [array][link]
  std::vector<std::int64_t> outer_coeff;         // [link]

  // Per-array offset deltas for advancing latent digit j (the digits after
  // it wrap back to 1), and the same for the full link odometer.
  std::vector<std::vector<std::int64_t>> latent_delta;  // [array][latent j]

  static GamPlan build(const WiringDiagram& wd);
};

inline GamPlan GamPlan::build(const WiringDiagram& wd) {
  GamPlan plan;
  const std::size_t n_links = wd.links().size();
  const std::size_t n_arrays = wd.inner_count();

  plan.coeff.assign(n_arrays, std::vector<std::int64_t>(n_links, 0));
  for (std::size_t i = 0; i < n_arrays; ++i) {
    const std::vector<std::uint64_t> strides = wd.inner_pack(i).strides();
    for (std::size_t k = 0; k < wd.inner_pack(i).size(); ++k) {
      plan.coeff[i][wd.link_of(i, k)] += static_cast<std::int64_t>(strides[k]);
    }
  }
  plan.outer_coeff.assign(n_links, 0);
  {
    const std::vector<std::uint64_t> strides = wd.outer().strides();
    for (std::size_t k = 0; k < wd.outer().size(); ++k) {
      plan.outer_coeff[wd.outer_link_of(k)] += static_cast<std::int64_t>(strides[k]);
    }
  }

  std::vector<bool> is_exposed(n_links, false);
  for (std::size_t k = 0; k < wd.outer().size(); ++k) {
    is_exposed[wd.outer_link_of(k)] = true;
  }
  for (std::size_t l = 0; l < n_links; ++l) {
    int res = wd.links()[l].resolution;
    if (is_exposed[l]) {
      plan.exposed.push_back(static_cast<int>(l));
      plan.exposed_res.push_back(res);
      plan.exposed_cells = checked_mul(plan.exposed_cells, res, "exposed cells");
    } else {
      plan.latent.push_back(static_cast<int>(l));
      plan.latent_res.push_back(res);
      plan.latent_cells = checked_mul(plan.latent_cells, res, "latent cells");
    }
  }

  plan.latent_delta.assign(n_arrays, std::vector<std::int64_t>(plan.latent.size(), 0));
  for (std::size_t i = 0; i < n_arrays; ++i) {
    std::int64_t rollback = 0;
    for (std::size_t j = plan.latent.size(); j-- > 0;) {
      plan.latent_delta[i][j] = plan.coeff[i][plan.latent[j]] - rollback;
      rollback += static_cast<std::int64_t>(plan.latent_res[j] - 1) * plan.coeff[i][plan.latent[j]];
    }
  }
  return plan;
}

inline void decompose_cell(std::uint64_t cell, const std::vector<int>& res,
                           std::vector<int>& coords) {
  coords.assign(res.size(), 1);
  for (std::size_t j = res.size(); j-- > 0;) {
    coords[j] = static_cast<int>(cell % static_cast<std::uint64_t>(res[j])) + 1;
    cell /= static_cast<std::uint64_t>(res[j]);
  }
}

template <class S>
void check_multiply_inputs(const WiringDiagram& wd, std::span<const PixelArray<S>> arrays) {
  if (arrays.size() != wd.inner_count()) {
    fail(Errc::pack_mismatch, "expected one array per inner pack");
  }
  for (std::size_t i = 0; i < arrays.size(); ++i) {
    if (arrays[i].pack() != wd.inner_pack(i)) {
      fail(Errc::pack_mismatch, "array " + std::to_string(i) + " does not match its inner pack");
    }
  }
}

}  // namespace detail

// Generalized array multiplication: the output value at outer entry e' is
// the semiring sum, over link entries projecting to e', of the product of
// the input arrays at their projected entries. Short-circuits (skipping the
// rest of a product after a zero factor, and the rest of a cell after a
// boolean cell saturates to 1) never change the result.
template <class S>
PixelArray<S> general_multiply(const WiringDiagram& wd, std::span<const PixelArray<S>> arrays,
                               const MultiplyOptions& opts = {}) {
  detail::check_multiply_inputs(wd, arrays);
  const detail::GamPlan plan = detail::GamPlan::build(wd);
  const std::size_t n = arrays.size();

  PixelArray<S> out(wd.outer());
  auto* out_data = out.data().data();

  std::vector<const typename S::Value*> in(n);
  for (std::size_t i = 0; i < n; ++i) in[i] = arrays[i].data().data();

  auto run = [&](std::uint64_t cell_begin, std::uint64_t cell_end) {
    std::vector<int> ecoords;
    detail::decompose_cell(cell_begin, plan.exposed_res, ecoords);
    std::vector<std::int64_t> base(n), off(n);
    std::vector<int> lcoords;

    for (std::uint64_t cell = cell_begin; cell < cell_end; ++cell) {
      std::int64_t out_off = 0;
      for (std::size_t j = 0; j < plan.exposed.size(); ++j) {
        out_off += static_cast<std::int64_t>(ecoords[j] - 1) * plan.outer_coeff[plan.exposed[j]];
      }
      for (std::size_t i = 0; i < n; ++i) {
        std::int64_t b = 0;
        for (std::size_t j = 0; j < plan.exposed.size(); ++j) {
          b += static_cast<std::int64_t>(ecoords[j] - 1) * plan.coeff[i][plan.exposed[j]];
        }
        base[i] = b;
      }

      lcoords.assign(plan.latent.size(), 1);
      off = base;
      typename S::Value acc = S::zero();
      for (std::uint64_t step = 0; step < plan.latent_cells; ++step) {
        typename S::Value prod = S::one();
        for (std::size_t i = 0; i < n; ++i) {
          typename S::Value v = in[i][off[i]];
          if (v == S::zero()) {
            prod = S::zero();
            break;
          }
          prod = S::mul(prod, v);
        }
        if constexpr (S::idempotent_add) {
          if (prod != S::zero()) {
            acc = S::one();
            break;
          }
        } else {
          acc = S::add(acc, prod);
        }
        // advance latent odometer
        for (std::size_t j = plan.latent.size(); j-- > 0;) {
          if (lcoords[j] < plan.latent_res[j]) {
            ++lcoords[j];
            for (std::size_t i = 0; i < n; ++i) off[i] += plan.latent_delta[i][j];
            break;
          }
          lcoords[j] = 1;
        }
      }
      out_data[out_off] = acc;

      // advance exposed odometer
      for (std::size_t j = plan.exposed.size(); j-- > 0;) {
        if (ecoords[j] < plan.exposed_res[j]) {
          ++ecoords[j];
          break;
        }
        ecoords[j] = 1;
      }
    }
  };

  detail::parallel_blocks(plan.exposed_cells, detail::resolve_threads(opts.threads), run);
  return out;
}

// Literal, unclustered multiplication: one pass over every link entry with
// no short-circuits. Same result as general_multiply; used as the reference
// cost model when timing clustering speedups.
template <class S>
PixelArray<S> naive_multiply(const WiringDiagram& wd, std::span<const PixelArray<S>> arrays) {
  detail::check_multiply_inputs(wd, arrays);
  const std::size_t n = arrays.size();
  const std::size_t n_links = wd.links().size();
  const detail::GamPlan plan = detail::GamPlan::build(wd);

  // Per-array (and output) deltas for the full link odometer.
  std::vector<std::vector<std::int64_t>> delta(n + 1, std::vector<std::int64_t>(n_links, 0));
  std::vector<int> res(n_links);
  for (std::size_t l = 0; l < n_links; ++l) res[l] = wd.links()[l].resolution;
  for (std::size_t i = 0; i <= n; ++i) {
    const std::vector<std::int64_t>& c = i < n ? plan.coeff[i] : plan.outer_coeff;
    std::int64_t rollback = 0;
    for (std::size_t l = n_links; l-- > 0;) {
      delta[i][l] = c[l] - rollback;
      rollback += static_cast<std::int64_t>(res[l] - 1) * c[l];
    }
  }

  PixelArray<S> out(wd.outer());
  std::vector<std::int64_t> off(n + 1, 0);
  std::vector<int> coords(n_links, 1);
  const std::uint64_t total = link_entry_count(wd);
  for (std::uint64_t step = 0; step < total; ++step) {
    typename S::Value prod = S::one();
    for (std::size_t i = 0; i < n; ++i) {
      prod = S::mul(prod, arrays[i].data()[off[i]]);
    }
    auto& cell = out.data()[off[n]];
    cell = S::add(cell, prod);
    for (std::size_t l = n_links; l-- > 0;) {
      if (coords[l] < res[l]) {
        ++coords[l];
        for (std::size_t i = 0; i <= n; ++i) off[i] += delta[i][l];
        break;
      }
      coords[l] = 1;
    }
  }
  return out;
}

// Dimension bundles for the three classical specializations.
struct MatmulDims {
  int m = 2, n = 2, p = 2;
};
struct TraceDims {
  int n = 2;
};
struct KroneckerDims {
  int m1 = 2, n1 = 2, m2 = 2, n2 = 2;
};

// Matrix product: inner packs {m,n} and {n,p}, outer {m,p}, three links.
WiringDiagram specialization_diagram(const MatmulDims& dims);
// Trace: one inner pack whose two ports share a single link; empty outer.
WiringDiagram specialization_diagram(const TraceDims& dims);
// Kronecker product: two inner packs, all four links exposed.
WiringDiagram specialization_diagram(const KroneckerDims& dims);

}  // namespace pixelarray
