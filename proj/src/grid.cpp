#include "advper/grid.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <deque>
#include <limits>
#include <numbers>

namespace advper {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::int64_t kFar = std::numeric_limits<std::int64_t>::max() / 4;

std::size_t word_count(std::size_t n) { return (n + 63) / 64; }

// Lower envelope of parabolas (exact squared Euclidean distance along one line).
void edt_line(const std::int64_t* f, std::int64_t* d, std::size_t n, std::vector<std::size_t>& v,
              std::vector<double>& z) {
  v.resize(n);
  z.resize(n + 1);
  std::size_t k = 0;
  std::size_t first = n;
  for (std::size_t q = 0; q < n; ++q)
    if (f[q] < kFar) {
      first = q;
      break;
    }
  if (first == n) {
    for (std::size_t q = 0; q < n; ++q) d[q] = kFar;
    return;
  }
  v[0] = first;
  z[0] = -kInf;
  z[1] = kInf;
  auto isect = [&](std::size_t q, std::size_t p) {
    const double qd = static_cast<double>(q), pd = static_cast<double>(p);
    return (static_cast<double>(f[q]) + qd * qd - (static_cast<double>(f[p]) + pd * pd)) /
           (2.0 * qd - 2.0 * pd);
  };
  for (std::size_t q = first + 1; q < n; ++q) {
    if (f[q] >= kFar) continue;
    double s = isect(q, v[k]);
    while (s <= z[k]) {
      --k;
      s = isect(q, v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < static_cast<double>(q)) ++k;
    const auto diff = static_cast<std::int64_t>(q) - static_cast<std::int64_t>(v[k]);
    d[q] = diff * diff + f[v[k]];
  }
}

// Applies `fn(line_ptr_in, line_ptr_out, n)` to every 1D line along `axis`.
template <class F>
void for_each_line(const Grid& g, int axis, std::vector<std::int64_t>& data, F&& fn) {
  const std::size_t n = g.extent(axis);
  const std::size_t stride = g.stride(axis);
  const std::size_t total = g.size();
  std::vector<std::int64_t> in(n), out(n);
  const std::size_t block = stride * n;
  for (std::size_t base = 0; base < total; base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      const std::size_t start = base + off;
      for (std::size_t i = 0; i < n; ++i) in[i] = data[start + i * stride];
      fn(in.data(), out.data(), n);
      for (std::size_t i = 0; i < n; ++i) data[start + i * stride] = out[i];
    }
  }
}

std::vector<std::int64_t> units_l2(const CellSet& src) {
  const Grid& g = src.grid();
  std::vector<std::int64_t> f(g.size(), kFar);
  src.for_each([&](std::size_t i) { f[i] = 0; });
  std::vector<std::size_t> v;
  std::vector<double> z;
  for (int axis = g.dim() - 1; axis >= 0; --axis)
    for_each_line(g, axis, f, [&](const std::int64_t* in, std::int64_t* out, std::size_t n) {
      edt_line(in, out, n, v, z);
    });
  return f;
}

std::vector<std::int64_t> units_l1(const CellSet& src) {
  const Grid& g = src.grid();
  std::vector<std::int64_t> f(g.size(), kFar);
  src.for_each([&](std::size_t i) { f[i] = 0; });
  for (int axis = 0; axis < g.dim(); ++axis)
    for_each_line(g, axis, f, [](const std::int64_t* in, std::int64_t* out, std::size_t n) {
      std::copy(in, in + n, out);
      for (std::size_t i = 1; i < n; ++i) out[i] = std::min(out[i], out[i - 1] + 1);
      for (std::size_t i = n - 1; i-- > 0;) out[i] = std::min(out[i], out[i + 1] + 1);
    });
  return f;
}

// Chessboard distance is the shortest-path metric of the king-move lattice graph.
std::vector<std::int64_t> units_linf(const CellSet& src) {
  const Grid& g = src.grid();
  const int d = g.dim();
  std::vector<std::int64_t> f(g.size(), kFar);
  std::deque<std::size_t> queue;
  src.for_each([&](std::size_t i) {
    f[i] = 0;
    queue.push_back(i);
  });
  std::vector<std::ptrdiff_t> c(d), o(d);
  std::size_t moves = 1;
  for (int k = 0; k < d; ++k) moves *= 3;
  while (!queue.empty()) {
    const std::size_t cur = queue.front();
    queue.pop_front();
    g.unravel(cur, c.data());
    for (std::size_t m = 0; m < moves; ++m) {
      std::size_t mm = m;
      bool inside = true, zero = true;
      std::size_t idx = 0;
      for (int k = d - 1; k >= 0; --k) {
        const auto step = static_cast<std::ptrdiff_t>(mm % 3) - 1;
        mm /= 3;
        if (step != 0) zero = false;
        const std::ptrdiff_t nk = c[k] + step;
        if (nk < 0 || nk >= static_cast<std::ptrdiff_t>(g.extent(k))) {
          inside = false;
          break;
        }
        idx += static_cast<std::size_t>(nk) * g.stride(k);
      }
      if (!inside || zero) continue;
      if (f[idx] > f[cur] + 1) {
        f[idx] = f[cur] + 1;
        queue.push_back(idx);
      }
    }
  }
  return f;
}

std::int64_t exterior_units(const Grid& g, std::size_t idx) {
  std::int64_t best = kFar;
  std::size_t rem = idx;
  for (int k = 0; k < g.dim(); ++k) {
    const auto i = static_cast<std::int64_t>(rem / g.stride(k));
    rem %= g.stride(k);
    const auto n = static_cast<std::int64_t>(g.extent(k));
    best = std::min({best, i + 1, n - i});
  }
  return best;
}

}  // namespace

std::string to_string(Norm n) {
  switch (n) {
    case Norm::L1:
      return "L1";
    case Norm::L2:
      return "L2";
    case Norm::LInf:
      return "LINF";
  }
  return "?";
}

Norm parse_norm(const std::string& s) {
  if (s == "L1") return Norm::L1;
  if (s == "L2") return Norm::L2;
  if (s == "LINF") return Norm::LInf;
  fail(ErrorCode::InvalidArgument, "unknown norm '" + s + "' (expected L1, L2 or LINF)");
}

double unit_ball_volume(int dim, Norm norm) {
  require(dim >= 1, ErrorCode::InvalidArgument, "dimension must be >= 1");
  const double d = dim;
  switch (norm) {
    case Norm::LInf:
      return std::pow(2.0, d);
    case Norm::L1:
      return std::pow(2.0, d) / std::tgamma(d + 1.0);
    case Norm::L2:
      return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
  }
  return 0.0;
}

Grid::Grid(GridSpec spec) : spec_(std::move(spec)) {
  const int d = spec_.dim;
  require(d >= 1 && d <= kMaxDim, ErrorCode::InvalidArgument, "grid dimension must be in [1, 8]");
  require(spec_.lo.size() == static_cast<std::size_t>(d) && spec_.hi.size() == static_cast<std::size_t>(d),
          ErrorCode::InvalidArgument, "window must give [lo, hi] for every axis");
  require(std::isfinite(spec_.h) && spec_.h > 0.0, ErrorCode::InvalidArgument, "spacing h must be > 0");
  shape_.resize(d);
  strides_.resize(d);
  long double total = 1.0L;
  for (int k = 0; k < d; ++k) {
    const double len = spec_.hi[k] - spec_.lo[k];
    require(std::isfinite(len) && len > 0.0, ErrorCode::InvalidArgument, "window axis must have hi > lo");
    const double n = std::round(len / spec_.h);
    const double tol = 1e-12 * spec_.h + 4.0 * std::numeric_limits<double>::epsilon() * std::abs(len);
    require(n >= 1.0 && std::abs(n * spec_.h - len) <= tol, ErrorCode::InvalidArgument,
            "window extent on axis " + std::to_string(k) + " is not an integer multiple of h");
    total *= n;
    require(total <= static_cast<long double>(spec_.max_cells), ErrorCode::InvalidArgument,
            "grid exceeds the cell cap");
    shape_[k] = static_cast<std::size_t>(n);
  }
  std::size_t s = 1;
  for (int k = d - 1; k >= 0; --k) {
    strides_[k] = s;
    s *= shape_[k];
  }
  size_ = s;
  cell_volume_ = std::pow(spec_.h, d);
  omega_ = unit_ball_volume(d, spec_.norm);
}

void Grid::unravel(std::size_t idx, std::ptrdiff_t* out) const {
  for (int k = 0; k < dim(); ++k) {
    out[k] = static_cast<std::ptrdiff_t>(idx / strides_[k]);
    idx %= strides_[k];
  }
}

double Grid::center(std::size_t idx, int axis) const {
  const std::size_t i = (idx / strides_[axis]) % shape_[axis];
  return spec_.lo[axis] + (static_cast<double>(i) + 0.5) * spec_.h;
}

std::vector<double> Grid::center(std::size_t idx) const {
  std::vector<double> c(dim());
  for (int k = 0; k < dim(); ++k) c[k] = center(idx, k);
  return c;
}

double Grid::coord_norm(std::span<const double> v) const {
  double acc = 0.0;
  for (double x : v) {
    switch (spec_.norm) {
      case Norm::L1:
        acc += std::abs(x);
        break;
      case Norm::L2:
        acc += x * x;
        break;
      case Norm::LInf:
        acc = std::max(acc, std::abs(x));
        break;
    }
  }
  return spec_.norm == Norm::L2 ? std::sqrt(acc) : acc;
}

double Grid::units_length(std::int64_t units) const {
  if (spec_.norm == Norm::L2) return spec_.h * std::sqrt(static_cast<double>(units));
  return spec_.h * static_cast<double>(units);
}

double Grid::offset_length(const std::ptrdiff_t* offset) const {
  std::int64_t u = 0;
  for (int k = 0; k < dim(); ++k) {
    const std::int64_t o = offset[k] < 0 ? -offset[k] : offset[k];
    switch (spec_.norm) {
      case Norm::L1:
        u += o;
        break;
      case Norm::L2:
        u += o * o;
        break;
      case Norm::LInf:
        u = std::max(u, o);
        break;
    }
  }
  return units_length(u);
}

double Grid::exterior_distance(std::size_t idx) const {
  const std::int64_t u = exterior_units(*this, idx);
  return units_length(spec_.norm == Norm::L2 ? u * u : u);
}

bool Grid::same_as(const Grid& o) const {
  return this == &o || (spec_.dim == o.spec_.dim && spec_.lo == o.spec_.lo && spec_.hi == o.spec_.hi &&
                        spec_.h == o.spec_.h && spec_.norm == o.spec_.norm);
}

GridPtr make_grid(GridSpec spec) { return std::make_shared<const Grid>(std::move(spec)); }

// ---------------------------------------------------------------------------

CellSet::CellSet(GridPtr grid, bool outside)
    : grid_(std::move(grid)), n_(grid_ ? grid_->size() : 0), words_(word_count(n_), 0), outside_(outside) {
  require(grid_ != nullptr, ErrorCode::InvalidArgument, "CellSet needs a grid");
}

CellSet CellSet::full(GridPtr grid, bool outside) {
  CellSet s(std::move(grid), outside);
  std::fill(s.words_.begin(), s.words_.end(), ~std::uint64_t{0});
  s.clear_tail();
  return s;
}

void CellSet::clear_tail() {
  if (n_ % 64 != 0 && !words_.empty()) words_.back() &= (std::uint64_t{1} << (n_ % 64)) - 1;
}

void CellSet::check_same_grid(const CellSet& o) const {
  require(grid_ && o.grid_ && grid_->same_as(*o.grid_), ErrorCode::GridMismatch,
          "cell sets live on different grids");
}

std::size_t CellSet::count() const {
  std::size_t c = 0;
  for (auto w : words_) c += static_cast<std::size_t>(std::popcount(w));
  return c;
}

bool CellSet::none() const {
  return std::all_of(words_.begin(), words_.end(), [](std::uint64_t w) { return w == 0; });
}

CellSet CellSet::complement() const {
  CellSet r = window_complement();
  r.outside_ = !outside_;
  return r;
}

CellSet CellSet::window_complement() const {
  CellSet r = *this;
  for (auto& w : r.words_) w = ~w;
  r.clear_tail();
  r.outside_ = false;
  return r;
}

CellSet& CellSet::operator|=(const CellSet& o) {
  check_same_grid(o);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= o.words_[i];
  outside_ = outside_ || o.outside_;
  return *this;
}

CellSet& CellSet::operator&=(const CellSet& o) {
  check_same_grid(o);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
  outside_ = outside_ && o.outside_;
  return *this;
}

CellSet& CellSet::operator-=(const CellSet& o) {
  check_same_grid(o);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
  outside_ = outside_ && !o.outside_;
  return *this;
}

bool CellSet::subset_of(const CellSet& o) const {
  check_same_grid(o);
  if (outside_ && !o.outside_) return false;
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & ~o.words_[i]) return false;
  return true;
}

bool CellSet::intersects(const CellSet& o) const {
  check_same_grid(o);
  for (std::size_t i = 0; i < words_.size(); ++i)
    if (words_[i] & o.words_[i]) return true;
  return false;
}

bool CellSet::operator==(const CellSet& o) const {
  return grid_ && o.grid_ && grid_->same_as(*o.grid_) && outside_ == o.outside_ && words_ == o.words_;
}

std::vector<std::size_t> CellSet::indices() const {
  std::vector<std::size_t> out;
  out.reserve(count());
  for_each([&](std::size_t i) { out.push_back(i); });
  return out;
}

std::string CellSet::to_rle() const {
  std::string out;
  std::size_t i = 0;
  while (i < n_) {
    const bool v = test(i);
    std::size_t j = i;
    while (j < n_ && test(j) == v) ++j;
    if (!out.empty()) out += ',';
    out += (v ? "1:" : "0:") + std::to_string(j - i);
    i = j;
  }
  return out;
}

CellSet CellSet::from_rle(GridPtr grid, const std::string& rle, bool outside) {
  CellSet s(std::move(grid), outside);
  std::size_t pos = 0, at = 0;
  while (pos < rle.size()) {
    const std::size_t comma = std::min(rle.find(',', pos), rle.size());
    const std::string tok = rle.substr(pos, comma - pos);
    require(tok.size() >= 3 && (tok[0] == '0' || tok[0] == '1') && tok[1] == ':', ErrorCode::InvalidArgument,
            "malformed run '" + tok + "'");
    const std::size_t len = std::stoul(tok.substr(2));
    require(at + len <= s.n_, ErrorCode::InvalidArgument, "run-length mask longer than grid");
    if (tok[0] == '1')
      for (std::size_t i = at; i < at + len; ++i) s.set(i);
    at += len;
    pos = comma + 1;
  }
  require(at == s.n_, ErrorCode::InvalidArgument, "run-length mask shorter than grid");
  return s;
}

// ---------------------------------------------------------------------------

std::vector<double> distance_transform(const CellSet& src) {
  const Grid& g = src.grid();
  std::vector<std::int64_t> units;
  switch (g.norm()) {
    case Norm::L2:
      units = units_l2(src);
      break;
    case Norm::L1:
      units = units_l1(src);
      break;
    case Norm::LInf:
      units = units_linf(src);
      break;
  }
  std::vector<double> out(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::int64_t u = units[i];
    if (src.outside()) {
      const std::int64_t e = exterior_units(g, i);
      u = std::min(u, g.norm() == Norm::L2 ? e * e : e);
    }
    out[i] = u >= kFar ? kInf : g.units_length(u);
  }
  return out;
}

CellSet dilate(const CellSet& a, double eps) {
  require(eps >= 0.0, ErrorCode::InvalidArgument, "dilation radius must be >= 0");
  if (eps == 0.0) return a;
  const auto dist = distance_transform(a);
  CellSet r(a.grid_ptr(), a.outside());
  for (std::size_t i = 0; i < dist.size(); ++i)
    if (dist[i] < eps) r.set(i);
  return r;
}

CellSet erode(const CellSet& a, double eps) {
  require(eps >= 0.0, ErrorCode::InvalidArgument, "erosion radius must be >= 0");
  return dilate(a.complement(), eps).complement();
}

CellSet ball(const GridPtr& grid, std::span<const double> center, double r) {
  require(r >= 0.0, ErrorCode::InvalidArgument, "ball radius must be >= 0");
  require(center.size() == static_cast<std::size_t>(grid->dim()), ErrorCode::InvalidArgument,
          "ball center has wrong dimension");
  CellSet s(grid);
  std::vector<double> diff(grid->dim());
  for (std::size_t i = 0; i < grid->size(); ++i) {
    for (int k = 0; k < grid->dim(); ++k) diff[k] = grid->center(i, k) - center[k];
    if (grid->coord_norm(diff) < r) s.set(i);
  }
  return s;
}

double hausdorff_distance(const CellSet& a, const CellSet& b, const CellSet& k) {
  CellSet ak = a & k, bk = b & k;
  ak.set_outside(false);
  bk.set_outside(false);
  const bool ea = ak.none(), eb = bk.none();
  if (ea && eb) return 0.0;
  if (ea || eb) return kInf;
  const auto da = distance_transform(ak);
  const auto db = distance_transform(bk);
  double best = 0.0;
  ak.for_each([&](std::size_t i) { best = std::max(best, db[i]); });
  bk.for_each([&](std::size_t i) { best = std::max(best, da[i]); });
  return best;
}

bool has_lattice_tie(const Grid& g, double eps) {
  if (eps <= 0.0) return false;
  const double tol = 1e-12 * eps;
  const double r = eps / g.h();
  const auto kmax = static_cast<std::int64_t>(std::ceil(r)) + 1;
  // Offsets with nonnegative coordinates in nondecreasing order cover all norms' lengths.
  std::vector<std::ptrdiff_t> off(g.dim(), 0);
  const int d = g.dim();
  while (true) {
    if (std::abs(g.offset_length(off.data()) - eps) <= tol) return true;
    int k = d - 1;
    while (k >= 0) {
      if (off[k] < kmax) {
        ++off[k];
        for (int j = k + 1; j < d; ++j) off[j] = off[k];
        break;
      }
      --k;
    }
    if (k < 0) return false;
  }
}

}  // namespace advper
