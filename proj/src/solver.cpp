#include "advper/solver.hpp"

#include <cmath>

#include "advper/parallel.hpp"
#include "advper/sampling.hpp"

namespace advper {

std::string to_string(SolverMethod m) {
  switch (m) {
    case SolverMethod::Brute:
      return "BRUTE";
    case SolverMethod::Local:
      return "LOCAL";
    case SolverMethod::Interval:
      return "INTERVAL";
  }
  return "?";
}

std::string to_string(MoveKind m) {
  switch (m) {
    case MoveKind::CellFlip:
      return "CELL_FLIP";
    case MoveKind::BallAddRemove:
      return "BALL_ADD_REMOVE";
    case MoveKind::BandShift:
      return "BAND_SHIFT";
  }
  return "?";
}

std::string to_string(Certificate c) { return c == Certificate::Global ? "global" : "local-opt"; }

SolverMethod parse_solver_method(const std::string& s) {
  if (s == "BRUTE") return SolverMethod::Brute;
  if (s == "LOCAL") return SolverMethod::Local;
  if (s == "INTERVAL") return SolverMethod::Interval;
  fail(ErrorCode::InvalidArgument, "unknown solver method '" + s + "'");
}

MoveKind parse_move(const std::string& s) {
  if (s == "CELL_FLIP") return MoveKind::CellFlip;
  if (s == "BALL_ADD_REMOVE") return MoveKind::BallAddRemove;
  if (s == "BAND_SHIFT") return MoveKind::BandShift;
  fail(ErrorCode::InvalidArgument, "unknown move '" + s + "'");
}

// ---------------------------------------------------------------------------

EnergyState::EnergyState(const Attack& phi, const DensityPair& dp, CellSet a)
    : phi_(phi), dp_(dp), a_(std::move(a)) {
  require(a_.grid().same_as(dp.g()) && phi.grid().same_as(dp.g()), ErrorCode::GridMismatch,
          "solver inputs live on different grids");
  att_ = phi_.attacked(a_);
  value_ = risk_from_lambda(a_, lambda_sets_from(a_, att_), dp_).total_exact;
  const Stencil st(dp.g(), phi.reach(), true);
  offsets_ = st.offsets();
  noffsets_ = st.size();
}

Mass EnergyState::contribution(std::size_t y, bool attacked) const {
  const bool in = a_.test(y);
  Mass m;
  if (in || attacked) m += dp_.weighted0[y];
  if (!in || attacked) m += dp_.weighted1[y];
  return m;
}

template <class F>
void EnergyState::for_each_affected(std::size_t c, F&& f) const {
  const Grid& g = dp_.g();
  std::array<std::ptrdiff_t, kMaxDim> base{};
  g.unravel(c, base.data());
  for (std::size_t s = 0; s < noffsets_; ++s) {
    const std::ptrdiff_t* off = &offsets_[s * g.dim()];
    std::size_t idx = 0;
    bool inside = true;
    for (int k = 0; k < g.dim() && inside; ++k) {
      const std::ptrdiff_t v = base[k] + off[k];
      inside = v >= 0 && v < static_cast<std::ptrdiff_t>(g.extent(k));
      idx += static_cast<std::size_t>(v) * g.stride(k);
    }
    if (inside) f(idx);
  }
}

Mass EnergyState::flip_delta(std::size_t c) {
  Mass before, after;
  for_each_affected(c, [&](std::size_t y) { before += contribution(y, att_.test(y)); });
  a_.flip(c);
  for_each_affected(c, [&](std::size_t y) { after += contribution(y, phi_.attacked_at(y, a_)); });
  a_.flip(c);
  return after - before;
}

void EnergyState::flip(std::size_t c) {
  Mass before, after;
  for_each_affected(c, [&](std::size_t y) { before += contribution(y, att_.test(y)); });
  a_.flip(c);
  for_each_affected(c, [&](std::size_t y) {
    const bool hit = phi_.attacked_at(y, a_);
    att_.set(y, hit);
    after += contribution(y, hit);
  });
  value_ += after - before;
}

bool mask_less(const CellSet& a, const CellSet& b) {
  const auto wa = a.words(), wb = b.words();
  for (std::size_t i = wa.size(); i-- > 0;)
    if (wa[i] != wb[i]) return wa[i] < wb[i];
  return false;
}

namespace {

void finish(SolveResult& r, const Attack& phi, const DensityPair& dp) {
  const RiskReport check = risk_total(phi, r.argmin, dp);
  if (std::abs(check.total - r.value_exact.to_double()) > 1e-12)
    fail(ErrorCode::Internal, "solver energy drifted from the recomputed risk");
  r.value = check.total;
  r.value_exact = check.total_exact;
  r.quantization_warning = phi.eps() < 8.0 * dp.g().h();
}

bool better(Mass v, const CellSet& s, Mass best, const CellSet& best_set) {
  return v < best || (v == best && mask_less(s, best_set));
}

}  // namespace

SolveResult minimize_brute(const Attack& phi, const DensityPair& dp) {
  const std::size_t n = dp.g().size();
  require(n <= kBruteCellCap, ErrorCode::InvalidArgument,
          "BRUTE is limited to " + std::to_string(kBruteCellCap) + " cells");
  EnergyState st(phi, dp, CellSet(dp.grid));
  std::uint32_t mask = 0, best_mask = 0;
  Mass best = st.value();
  const std::uint64_t total = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < total; ++i) {
    const int bit = __builtin_ctzll(i);
    st.flip(static_cast<std::size_t>(bit));
    mask ^= std::uint32_t{1} << bit;
    const Mass v = st.value();
    if (v < best || (v == best && mask < best_mask)) {
      best = v;
      best_mask = mask;
    }
  }
  SolveResult r;
  r.argmin = CellSet(dp.grid);
  for (std::size_t i = 0; i < n; ++i)
    if (best_mask >> i & 1u) r.argmin.set(i);
  r.value_exact = best;
  r.certificate = Certificate::Global;
  r.iterations = static_cast<std::size_t>(total);
  finish(r, phi, dp);
  return r;
}

namespace {

struct Descent {
  CellSet set;
  Mass value;
  std::size_t iterations = 0;
};

Descent descend(const Attack& phi, const DensityPair& dp, const SolverConfig& cfg, CellSet start,
                std::uint64_t stream) {
  const Grid& g = dp.g();
  const double eps = phi.eps();
  auto state = std::make_unique<EnergyState>(phi, dp, std::move(start));
  std::size_t iter = 0;
  auto has = [&](MoveKind m) { return std::find(cfg.move_set.begin(), cfg.move_set.end(), m) != cfg.move_set.end(); };
  for (; iter < static_cast<std::size_t>(std::max(cfg.max_iters, 0)); ++iter) {
    Mass best_delta;
    std::ptrdiff_t best_cell = -1;
    std::optional<CellSet> best_set;

    if (has(MoveKind::CellFlip))
      for (std::size_t c = 0; c < g.size(); ++c) {
        const Mass d = state->flip_delta(c);
        if (d < best_delta) {
          best_delta = d;
          best_cell = static_cast<std::ptrdiff_t>(c);
        }
      }

    auto consider = [&](CellSet cand) {
      const Mass v = risk_total(phi, cand, dp).total_exact;
      const Mass d = v - state->value();
      if (d < best_delta) {
        best_delta = d;
        best_cell = -1;
        best_set = std::move(cand);
      }
    };

    if (has(MoveKind::BallAddRemove)) {
      auto rng = make_stream(cfg.seed ^ (stream * 0x9e3779b97f4a7c15ull), iter);
      for (int b = 0; b < 8; ++b) {
        const auto center = g.center(uniform_index(rng, g.size()));
        const double r = 2.0 * eps * (1.0 - uniform01(rng));
        const CellSet bl = ball(dp.grid, center, r);
        consider(state->set() | bl);
        consider(state->set() - bl);
      }
    }
    if (has(MoveKind::BandShift)) {
      const double layer = g.h() * (1.0 + 1e-9);
      CellSet grow = dilate(state->set(), layer);
      grow.set_outside(state->set().outside());
      consider(grow);
      consider(erode(state->set(), layer));
    }

    if (!(best_delta.to_double() < -1e-14)) break;
    if (best_cell >= 0)
      state->flip(static_cast<std::size_t>(best_cell));
    else
      state = std::make_unique<EnergyState>(phi, dp, std::move(*best_set));
  }
  return {state->set(), state->value(), iter};
}

}  // namespace

SolveResult minimize_local(const Attack& phi, const DensityPair& dp, const SolverConfig& cfg) {
  require(cfg.restarts >= 1, ErrorCode::InvalidArgument, "restarts must be >= 1");
  const auto restarts = static_cast<std::size_t>(cfg.restarts);
  std::vector<Descent> runs(restarts);
  parallel_for(restarts, cfg.threads, [&](std::size_t r) {
    CellSet start(dp.grid);
    switch (r % 4) {
      case 0:
        break;
      case 1:
        start = bayes_max(dp);
        break;
      case 2:
        for (std::size_t i = 0; i < dp.g().size(); ++i)
          if (dp.rho0[i] > 0.0 || dp.rho1[i] > 0.0) start.set(i);
        break;
      default: {
        auto rng = make_stream(cfg.seed, r);
        start = random_set(dp.grid, rng);
      }
    }
    runs[r] = descend(phi, dp, cfg, std::move(start), r + 1);
  });
  std::size_t best = 0, iters = 0;
  for (std::size_t r = 0; r < restarts; ++r) {
    iters += runs[r].iterations;
    if (r > 0 && better(runs[r].value, runs[r].set, runs[best].value, runs[best].set)) best = r;
  }
  SolveResult res;
  res.argmin = runs[best].set;
  res.value_exact = runs[best].value;
  res.certificate = Certificate::LocalOpt;
  res.iterations = iters;
  finish(res, phi, dp);
  return res;
}

SolveResult minimize_interval_1d(const Attack& phi, const DensityPair& dp, const SolverConfig&) {
  const Grid& g = dp.g();
  require(g.dim() == 1, ErrorCode::Precondition, "interval solver needs a 1D grid");
  const auto m = signed_margin(dp);
  int last = 0, changes = 0;
  bool wrong_way = false;
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (dp.rho0[i] == 0.0 && dp.rho1[i] == 0.0) continue;
    const int s = m[i] > 0.0 ? 1 : (m[i] < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (last != 0 && s != last) {
      ++changes;
      wrong_way = wrong_way || s > 0;
    }
    last = s;
  }
  require(changes <= 1 && !wrong_way, ErrorCode::Precondition,
          "interval restriction needs a single margin crossing from class 0 (left) to class 1 (right)");

  const std::size_t n = g.size();
  EnergyState st(phi, dp, CellSet(dp.grid));
  Mass best = st.value();
  std::size_t best_j = n;
  // Ties keep the larger t, i.e. the smaller bitmask.
  for (std::size_t j = n; j-- > 0;) {
    st.flip(j);
    if (st.value() < best) {
      best = st.value();
      best_j = j;
    }
  }
  SolveResult r;
  r.argmin = CellSet(dp.grid);
  for (std::size_t i = best_j; i < n; ++i) r.argmin.set(i);
  r.value_exact = best;
  r.certificate = Certificate::LocalOpt;
  r.iterations = n + 1;
  r.boundary = g.spec().lo[0] + static_cast<double>(best_j) * g.h();
  finish(r, phi, dp);
  return r;
}

SolveResult minimize(const Attack& phi, const DensityPair& dp, const SolverConfig& cfg) {
  switch (cfg.method) {
    case SolverMethod::Brute:
      return minimize_brute(phi, dp);
    case SolverMethod::Local:
      return minimize_local(phi, dp, cfg);
    case SolverMethod::Interval:
      return minimize_interval_1d(phi, dp, cfg);
  }
  fail(ErrorCode::InvalidArgument, "unknown solver method");
}

SlicingReport slicing_disjointness_check(const Attack& phi, const SolveResult& result, const DensityPair& dp,
                                         std::span<const double> center, double r, double delta) {
  const Grid& g = dp.g();
  require(r > 0.0 && delta > 0.0, ErrorCode::InvalidArgument, "R and delta must be > 0");
  const CellSet big = ball(dp.grid, center, 2.0 * r);
  require(big.subset_of(margin_region(dp, delta)), ErrorCode::Precondition,
          "ball of radius 2R must lie inside the margin region");
  const int d = g.dim();
  const double omega = g.omega();
  const double alpha = dp.M * omega * d * std::pow(2.0, d);
  const double c_next = std::pow(2.0, d * (d + 1) / 2.0 + 3.0 * d + 1.0) * alpha * std::pow(dp.M, d);

  SlicingReport rep;
  rep.eps = phi.eps();
  if (phi.kind() == AttackKind::Eps) {
    rep.constant = omega / c_next;
    rep.radius_checked = r / std::pow(2.0, d + 1);
  } else {
    const double beta = phi.volume_beta();
    require(beta > 0.0 && beta < omega, ErrorCode::Precondition, "attack needs a volume constant beta in (0, omega_d)");
    rep.constant = (omega - beta) / c_next;
    rep.radius_checked = r / std::pow(2.0, d + 2);
  }
  rep.threshold = std::min(r / std::pow(2.0, d + 2), rep.constant * r * std::pow(delta, d + 1));
  rep.below_threshold = rep.eps <= rep.threshold;
  rep.minimality_verified = result.certificate == Certificate::Global;
  rep.asserted = rep.below_threshold && rep.minimality_verified;
  rep.intersect_cells = (result.argmin & ball(dp.grid, center, rep.radius_checked)).count();
  rep.passed = !rep.asserted || rep.intersect_cells == 0;
  if (!rep.minimality_verified)
    rep.note = "advisory: minimality unverified";
  else if (!rep.below_threshold)
    rep.note = "advisory: eps above threshold";
  return rep;
}

}  // namespace advper
