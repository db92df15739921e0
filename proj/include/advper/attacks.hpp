#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "advper/grid.hpp"

namespace advper {

enum class AttackKind { Eps, Prob, Custom };

std::string to_string(AttackKind k);

enum class KernelProfile { Uniform };

struct Kernel {
  KernelProfile profile = KernelProfile::Uniform;
  double c = 0.0;  // lower bound of xi on the unit ball

  static Kernel uniform(int dim, Norm norm);
  // xi(z) for ||z|| = r (closed unit-ball support).
  double value(double r) const { return r <= 1.0 ? c : 0.0; }
};

// Integer lattice offsets within a radius, grouped into runs along the last axis.
class Stencil {
 public:
  Stencil(const Grid& g, double radius, bool closed);

  struct Run {
    std::vector<std::ptrdiff_t> head;  // offsets on axes 0..d-2
    std::ptrdiff_t half = 0;           // last-axis offsets in [-half, half]
  };

  const std::vector<std::ptrdiff_t>& offsets() const { return offsets_; }  // flattened, dim per offset
  std::size_t size() const { return count_; }
  const std::vector<Run>& runs() const { return runs_; }
  int dim() const { return dim_; }

 private:
  int dim_;
  std::size_t count_ = 0;
  std::vector<std::ptrdiff_t> offsets_;
  std::vector<Run> runs_;
};

// Deterministic attack function phi(x; A) bound to one grid.
class Attack {
 public:
  Attack(GridPtr grid, double eps);
  virtual ~Attack() = default;

  virtual AttackKind kind() const = 0;
  virtual std::string name() const = 0;

  // Whole-set evaluation: bit x set iff phi(x; A) = 1. Default loops attacked_at.
  virtual CellSet attacked(const CellSet& a) const;
  // Literal per-cell evaluation from the definition.
  virtual bool attacked_at(std::size_t x, const CellSet& a) const = 0;

  // Radius of the closed ball that phi(x; .) may read. Drives incremental updates.
  virtual double reach() const { return eps_; }
  // True when phi reads the closed eps-ball (open/closed tie possible).
  virtual bool closed_support() const { return false; }
  // Assumption 5 constant when known analytically.
  virtual double volume_beta() const { return 0.0; }

  double eps() const { return eps_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const Grid& grid() const { return *grid_; }

 protected:
  GridPtr grid_;
  double eps_;
};

using AttackPtr = std::shared_ptr<const Attack>;

class EpsAttack final : public Attack {
 public:
  EpsAttack(GridPtr grid, double eps);
  AttackKind kind() const override { return AttackKind::Eps; }
  std::string name() const override;
  CellSet attacked(const CellSet& a) const override;
  bool attacked_at(std::size_t x, const CellSet& a) const override;
  double volume_beta() const override { return grid_->omega() / 2.0; }

 private:
  Stencil open_;
};

class ProbAttack final : public Attack {
 public:
  ProbAttack(GridPtr grid, double eps, double p, Kernel kernel);
  AttackKind kind() const override { return AttackKind::Prob; }
  std::string name() const override;
  CellSet attacked(const CellSet& a) const override;
  bool attacked_at(std::size_t x, const CellSet& a) const override;
  bool closed_support() const override { return true; }
  double volume_beta() const override { return p_ / kernel_.c; }

  double p() const { return p_; }
  const Kernel& kernel() const { return kernel_; }
  double cell_weight() const { return weight_; }
  // Probability that a kernel draw around x lands in s (exterior counted by label).
  double probability(std::size_t x, const CellSet& s) const;
  std::vector<double> probabilities(const CellSet& s) const;

 private:
  double p_;
  Kernel kernel_;
  double weight_;
  Stencil closed_;
};

AttackPtr attack_eps(const GridPtr& grid, double eps);
AttackPtr attack_prob(const GridPtr& grid, double eps, double p, Kernel kernel);

struct PerturbationResult {
  double probability = 0.0;
  bool quantization_warning = false;  // eps < 8h
};

PerturbationResult perturbation_probability(std::size_t x, const CellSet& s, double eps, const Kernel& kernel);

struct LambdaSets {
  CellSet lam0, lam1, tilde0, tilde1;
};

LambdaSets lambda_sets(const Attack& phi, const CellSet& a);
LambdaSets lambda_sets_from(const CellSet& a, const CellSet& attacked);

// ---- validators -----------------------------------------------------------

struct ViolationReport {
  std::size_t checked = 0;
  std::size_t violations = 0;
  std::vector<std::size_t> cells;  // first few offending cells

  void record(std::size_t cell) {
    ++violations;
    if (cells.size() < 16) cells.push_back(cell);
  }
  bool ok() const { return violations == 0; }
};

ViolationReport check_complement_property(const Attack& phi, const CellSet& a);

struct MonotonicityReport {
  std::array<ViolationReport, 4> items;  // (i)..(iv)
  bool ok() const;
};

MonotonicityReport check_lambda_monotonicity(const Attack& phi, const CellSet& a, const CellSet& e);

struct MetricReport {
  ViolationReport locality;
  ViolationReport trivial_sets;  // phi(x; empty) = phi(x; R^d) = 0
  bool ok() const { return locality.ok() && trivial_sets.ok(); }
};

MetricReport check_metric_property(const Attack& phi, std::size_t trials, std::uint64_t seed);

struct VolumeBoundReport {
  ViolationReport violations;
  std::size_t hypothesis_met = 0;
  double beta = 0.0;
};

VolumeBoundReport check_volume_attack_bound(const Attack& phi, double beta, std::size_t trials, std::uint64_t seed);

}  // namespace advper
