#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "advper/error.hpp"

namespace advper {

inline constexpr int kMaxDim = 8;

enum class Norm { L1, L2, LInf };

std::string to_string(Norm n);
Norm parse_norm(const std::string& s);

// Volume of the unit ball of the given norm in R^dim.
double unit_ball_volume(int dim, Norm norm);

struct GridSpec {
  int dim = 1;
  std::vector<double> lo;
  std::vector<double> hi;
  double h = 0.0;
  Norm norm = Norm::L2;
  std::size_t max_cells = std::size_t{1} << 26;
};

// Uniform cell-centered grid. Cell i along axis k has center lo[k] + (i + 1/2) h.
// Flat indices are row-major (last axis fastest).
class Grid {
 public:
  explicit Grid(GridSpec spec);

  const GridSpec& spec() const { return spec_; }
  int dim() const { return spec_.dim; }
  double h() const { return spec_.h; }
  Norm norm() const { return spec_.norm; }
  std::size_t size() const { return size_; }
  std::size_t extent(int axis) const { return shape_[axis]; }
  std::size_t stride(int axis) const { return strides_[axis]; }
  double cell_volume() const { return cell_volume_; }
  double omega() const { return omega_; }

  void unravel(std::size_t idx, std::ptrdiff_t* out) const;
  double center(std::size_t idx, int axis) const;
  std::vector<double> center(std::size_t idx) const;
  double coord_norm(std::span<const double> v) const;

  // Length of an integer cell offset under the grid norm, in domain units.
  // Every distance the library reports is produced here so that distance
  // transforms and per-cell stencil scans agree to the last bit.
  double offset_length(const std::ptrdiff_t* offset) const;
  double units_length(std::int64_t units) const;  // for L2 units are squared

  // Distance from a cell center to the nearest out-of-window lattice cell.
  double exterior_distance(std::size_t idx) const;

  bool same_as(const Grid& other) const;

 private:
  GridSpec spec_;
  std::vector<std::size_t> shape_;
  std::vector<std::size_t> strides_;
  std::size_t size_ = 0;
  double cell_volume_ = 0.0;
  double omega_ = 0.0;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr make_grid(GridSpec spec);

// Bitset over grid cells plus a label for everything outside the window.
// The exterior label is what makes complement() a true complement in R^d.
class CellSet {
 public:
  CellSet() = default;
  explicit CellSet(GridPtr grid, bool outside = false);

  static CellSet full(GridPtr grid, bool outside = false);

  const GridPtr& grid_ptr() const { return grid_; }
  const Grid& grid() const { return *grid_; }
  std::size_t size() const { return n_; }

  bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1u; }
  void set(std::size_t i, bool v = true) {
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (v)
      words_[i >> 6] |= bit;
    else
      words_[i >> 6] &= ~bit;
  }
  void flip(std::size_t i) { words_[i >> 6] ^= std::uint64_t{1} << (i & 63); }

  bool outside() const { return outside_; }
  void set_outside(bool v) { outside_ = v; }

  std::size_t count() const;
  // True when no in-window cell is set (the exterior label is ignored).
  bool none() const;

  CellSet complement() const;
  // Complement inside the window only; the result has exterior label 0.
  CellSet window_complement() const;

  CellSet& operator|=(const CellSet& o);
  CellSet& operator&=(const CellSet& o);
  CellSet& operator-=(const CellSet& o);
  friend CellSet operator|(CellSet a, const CellSet& b) { return a |= b; }
  friend CellSet operator&(CellSet a, const CellSet& b) { return a &= b; }
  friend CellSet operator-(CellSet a, const CellSet& b) { return a -= b; }

  bool subset_of(const CellSet& o) const;
  bool intersects(const CellSet& o) const;
  bool operator==(const CellSet& o) const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::vector<std::size_t> indices() const;

  template <class F>
  void for_each(F&& f) const {
    for (std::size_t w = 0; w < words_.size(); ++w) {
      std::uint64_t bits = words_[w];
      while (bits) {
        const int b = __builtin_ctzll(bits);
        f(w * 64 + static_cast<std::size_t>(b));
        bits &= bits - 1;
      }
    }
  }

  // Run-length encoding of the in-window mask: "v:len,v:len,..." starting at cell 0.
  std::string to_rle() const;
  static CellSet from_rle(GridPtr grid, const std::string& rle, bool outside = false);

 private:
  void check_same_grid(const CellSet& o) const;
  void clear_tail();

  GridPtr grid_;
  std::size_t n_ = 0;
  std::vector<std::uint64_t> words_;
  bool outside_ = false;
};

// Exact distance from every cell center to the nearest cell of `src`
// (including the exterior when src.outside()). +inf when src is empty.
std::vector<double> distance_transform(const CellSet& src);

CellSet dilate(const CellSet& a, double eps);
CellSet erode(const CellSet& a, double eps);
CellSet ball(const GridPtr& grid, std::span<const double> center, double r);

// Hausdorff distance between the in-window parts of a∩k and b∩k.
// 0 when both are empty, +inf when exactly one is.
double hausdorff_distance(const CellSet& a, const CellSet& b, const CellSet& k);

// True if some lattice offset has length exactly eps (open/closed ball tie).
bool has_lattice_tie(const Grid& grid, double eps);

}  // namespace advper
