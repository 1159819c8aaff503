#pragma once

#include <cstdint>
#include <vector>

#include "pixelarray/model.hpp"
#include "pixelarray/semiring.hpp"

namespace pixelarray {

// Dense semiring-valued array indexed by the entries of a pack, stored
// row-major over the pack's sorted ports.
template <class S>
class PixelArray {
 public:
  using Semiring = S;
  using Value = typename S::Value;

  PixelArray() = default;

  explicit PixelArray(Pack pack)
      : pack_(std::move(pack)),
        strides_(pack_.strides()),
        data_(pack_.entry_count(), S::zero()) {}

  static PixelArray filled(Pack pack, Value v) {
    PixelArray a(std::move(pack));
    std::fill(a.data_.begin(), a.data_.end(), v);
    return a;
  }

  const Pack& pack() const { return pack_; }
  std::uint64_t size() const { return data_.size(); }

  std::uint64_t offset(const Entry& e) const {
    if (e.coords.size() != pack_.size()) {
      fail(Errc::index_out_of_range, "entry has wrong arity");
    }
    std::uint64_t off = 0;
    for (std::size_t k = 0; k < e.coords.size(); ++k) {
      int c = e.coords[k];
      if (c < 1 || c > pack_.port(k).resolution) {
        fail(Errc::index_out_of_range,
             "coordinate of port '" + pack_.port(k).name + "' out of range");
      }
      off += static_cast<std::uint64_t>(c - 1) * strides_[k];
    }
    return off;
  }

  Value get(const Entry& e) const { return data_[offset(e)]; }
  void set(const Entry& e, Value v) { data_[offset(e)] = v; }

  // Unchecked flat access for kernels.
  Value at(std::uint64_t flat) const { return data_[flat]; }
  void put(std::uint64_t flat, Value v) { data_[flat] = v; }
  const std::vector<Value>& data() const { return data_; }
  std::vector<Value>& data() { return data_; }
  const std::vector<std::uint64_t>& strides() const { return strides_; }

  bool operator==(const PixelArray&) const = default;

 private:
  Pack pack_;
  std::vector<std::uint64_t> strides_;
  std::vector<Value> data_;
};

using BoolArray = PixelArray<BoolSemiring>;
using CountArray = PixelArray<CountSemiring>;

}  // namespace pixelarray
