#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "advper/risks.hpp"

namespace advper {

enum class SolverMethod { Brute, Local, Interval };
enum class MoveKind { CellFlip, BallAddRemove, BandShift };
enum class Certificate { Global, LocalOpt };

std::string to_string(SolverMethod m);
std::string to_string(MoveKind m);
std::string to_string(Certificate c);
SolverMethod parse_solver_method(const std::string& s);
MoveKind parse_move(const std::string& s);

inline constexpr std::size_t kBruteCellCap = 24;

struct SolverConfig {
  SolverMethod method = SolverMethod::Local;
  std::uint64_t seed = 0;
  int max_iters = 200;
  int restarts = 4;
  std::vector<MoveKind> move_set = {MoveKind::CellFlip, MoveKind::BallAddRemove, MoveKind::BandShift};
  int threads = 1;
};

struct SolveResult {
  CellSet argmin;
  double value = 0.0;
  Mass value_exact;
  Certificate certificate = Certificate::LocalOpt;
  std::size_t iterations = 0;
  bool quantization_warning = false;  // eps < 8h
  double boundary = 0.0;              // interval solver: left end t of [t, right]
};

// Classifier state with exact incremental energy under single-cell flips.
class EnergyState {
 public:
  EnergyState(const Attack& phi, const DensityPair& dp, CellSet a);

  const CellSet& set() const { return a_; }
  Mass value() const { return value_; }
  // Energy change if cell c flipped; the state is left unchanged.
  Mass flip_delta(std::size_t c);
  void flip(std::size_t c);

 private:
  Mass contribution(std::size_t y, bool attacked) const;
  template <class F>
  void for_each_affected(std::size_t c, F&& f) const;

  const Attack& phi_;
  const DensityPair& dp_;
  CellSet a_;
  CellSet att_;
  Mass value_;
  std::vector<std::ptrdiff_t> offsets_;
  std::size_t noffsets_ = 0;
};

// Lexicographic order on bitmasks with cell i as bit i.
bool mask_less(const CellSet& a, const CellSet& b);

SolveResult minimize(const Attack& phi, const DensityPair& dp, const SolverConfig& cfg);
SolveResult minimize_brute(const Attack& phi, const DensityPair& dp);
SolveResult minimize_local(const Attack& phi, const DensityPair& dp, const SolverConfig& cfg);
// Exact minimization over classifiers [t, window right end] (1D, single margin crossing).
SolveResult minimize_interval_1d(const Attack& phi, const DensityPair& dp, const SolverConfig& cfg);

struct SlicingReport {
  double threshold = 0.0;
  double constant = 0.0;      // C in C R delta^{d+1}
  double radius_checked = 0.0;
  double eps = 0.0;
  bool below_threshold = false;
  bool minimality_verified = false;  // GLOBAL certificate
  bool asserted = false;             // both hypotheses hold
  std::size_t intersect_cells = 0;
  bool passed = true;                // meaningful only when asserted
  std::string note;
};

SlicingReport slicing_disjointness_check(const Attack& phi, const SolveResult& result, const DensityPair& dp,
                                         std::span<const double> center, double r, double delta);

}  // namespace advper
