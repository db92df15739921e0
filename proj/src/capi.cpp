#include <iostream>
#include <string>

#include "advper.h"
#include "advper/exchange.hpp"
#include "advper/parallel.hpp"
#include "advper/solver.hpp"
#include "advper/runner.hpp"
#include "json.hpp"

struct advper_grid {
  advper::GridPtr ptr;
};
struct advper_set {
  advper::CellSet value;
};
struct advper_density {
  advper::DensityPair value;
};
struct advper_attack {
  advper::AttackPtr ptr;
};

namespace {

thread_local std::string g_last_error;

advper_status to_status(advper::ErrorCode c) {
  switch (c) {
    case advper::ErrorCode::InvalidArgument:
      return ADVPER_INVALID_ARGUMENT;
    case advper::ErrorCode::GridMismatch:
      return ADVPER_GRID_MISMATCH;
    case advper::ErrorCode::Precondition:
      return ADVPER_PRECONDITION;
    case advper::ErrorCode::Io:
      return ADVPER_IO;
    case advper::ErrorCode::Schema:
      return ADVPER_SCHEMA;
    case advper::ErrorCode::Internal:
      return ADVPER_INTERNAL;
  }
  return ADVPER_INTERNAL;
}

template <class F>
advper_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return ADVPER_OK;
  } catch (const advper::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return ADVPER_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return ADVPER_INTERNAL;
  }
}

advper_status null_handle() {
  g_last_error = "null handle or output pointer";
  return ADVPER_NULL_HANDLE;
}

advper_set* wrap(advper::CellSet s) { return new advper_set{std::move(s)}; }

}  // namespace

extern "C" {

const char* advper_version(void) { return advper::kVersion; }

const char* advper_status_string(advper_status s) {
  switch (s) {
    case ADVPER_OK:
      return "ok";
    case ADVPER_INVALID_ARGUMENT:
      return "invalid argument";
    case ADVPER_GRID_MISMATCH:
      return "grid mismatch";
    case ADVPER_PRECONDITION:
      return "precondition failed";
    case ADVPER_IO:
      return "i/o error";
    case ADVPER_SCHEMA:
      return "schema error";
    case ADVPER_INTERNAL:
      return "internal error";
    case ADVPER_NULL_HANDLE:
      return "null handle";
  }
  return "unknown status";
}

const char* advper_last_error(void) { return g_last_error.c_str(); }

advper_status advper_grid_create(int dim, const double* lo, const double* hi, double h, advper_norm norm,
                                 advper_grid** out) {
  if (!lo || !hi || !out) return null_handle();
  return guarded([&] {
    if (dim < 1 || dim > advper::kMaxDim) throw advper::Error(advper::ErrorCode::InvalidArgument, "bad dimension");
    advper::GridSpec spec;
    spec.dim = dim;
    spec.lo.assign(lo, lo + dim);
    spec.hi.assign(hi, hi + dim);
    spec.h = h;
    switch (norm) {
      case ADVPER_NORM_L1:
        spec.norm = advper::Norm::L1;
        break;
      case ADVPER_NORM_L2:
        spec.norm = advper::Norm::L2;
        break;
      case ADVPER_NORM_LINF:
        spec.norm = advper::Norm::LInf;
        break;
      default:
        throw advper::Error(advper::ErrorCode::InvalidArgument, "unknown norm");
    }
    *out = new advper_grid{advper::make_grid(std::move(spec))};
  });
}

void advper_grid_destroy(advper_grid* grid) { delete grid; }

advper_status advper_grid_cell_count(const advper_grid* grid, size_t* out) {
  if (!grid || !out) return null_handle();
  *out = grid->ptr->size();
  return ADVPER_OK;
}

advper_status advper_grid_center(const advper_grid* grid, size_t cell, double* coords) {
  if (!grid || !coords) return null_handle();
  return guarded([&] {
    if (cell >= grid->ptr->size()) throw advper::Error(advper::ErrorCode::InvalidArgument, "cell out of range");
    for (int k = 0; k < grid->ptr->dim(); ++k) coords[k] = grid->ptr->center(cell, k);
  });
}

advper_status advper_set_create(const advper_grid* grid, const uint8_t* mask, advper_set** out) {
  if (!grid || !out) return null_handle();
  return guarded([&] {
    advper::CellSet s(grid->ptr);
    if (mask)
      for (size_t i = 0; i < s.size(); ++i)
        if (mask[i]) s.set(i);
    *out = wrap(std::move(s));
  });
}

void advper_set_destroy(advper_set* set) { delete set; }

advper_status advper_set_to_mask(const advper_set* set, uint8_t* mask, size_t len) {
  if (!set || !mask) return null_handle();
  return guarded([&] {
    if (len < set->value.size()) throw advper::Error(advper::ErrorCode::InvalidArgument, "mask buffer too small");
    for (size_t i = 0; i < set->value.size(); ++i) mask[i] = set->value.test(i) ? 1 : 0;
  });
}

advper_status advper_set_count(const advper_set* set, size_t* out) {
  if (!set || !out) return null_handle();
  *out = set->value.count();
  return ADVPER_OK;
}

advper_status advper_set_ball(const advper_grid* grid, const double* center, double r, advper_set** out) {
  if (!grid || !center || !out) return null_handle();
  return guarded([&] {
    *out = wrap(advper::ball(grid->ptr, std::span<const double>(center, grid->ptr->dim()), r));
  });
}

advper_status advper_set_dilate(const advper_set* set, double eps, advper_set** out) {
  if (!set || !out) return null_handle();
  return guarded([&] { *out = wrap(advper::dilate(set->value, eps)); });
}

advper_status advper_set_erode(const advper_set* set, double eps, advper_set** out) {
  if (!set || !out) return null_handle();
  return guarded([&] { *out = wrap(advper::erode(set->value, eps)); });
}

advper_status advper_set_complement(const advper_set* set, advper_set** out) {
  if (!set || !out) return null_handle();
  return guarded([&] { *out = wrap(set->value.complement()); });
}

advper_status advper_set_union(const advper_set* a, const advper_set* b, advper_set** out) {
  if (!a || !b || !out) return null_handle();
  return guarded([&] { *out = wrap(a->value | b->value); });
}

advper_status advper_set_intersect(const advper_set* a, const advper_set* b, advper_set** out) {
  if (!a || !b || !out) return null_handle();
  return guarded([&] { *out = wrap(a->value & b->value); });
}

advper_status advper_set_difference(const advper_set* a, const advper_set* b, advper_set** out) {
  if (!a || !b || !out) return null_handle();
  return guarded([&] { *out = wrap(a->value - b->value); });
}

advper_status advper_hausdorff(const advper_set* a, const advper_set* b, const advper_set* k, double* out) {
  if (!a || !b || !k || !out) return null_handle();
  return guarded([&] { *out = advper::hausdorff_distance(a->value, b->value, k->value); });
}

advper_status advper_density_preset(const advper_grid* grid, const char* preset, const char* params_json,
                                    advper_density** out) {
  if (!grid || !preset || !out) return null_handle();
  return guarded([&] {
    advper::DensityParams params;
    if (params_json && *params_json) {
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(params_json);
      } catch (const nlohmann::json::parse_error& e) {
        throw advper::Error(advper::ErrorCode::Schema, e.what());
      }
      if (!j.is_object()) throw advper::Error(advper::ErrorCode::Schema, "params must be a JSON object");
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!it.value().is_number())
          throw advper::Error(advper::ErrorCode::Schema, "param '" + it.key() + "' must be a number");
        params[it.key()] = it.value().get<double>();
      }
    }
    *out = new advper_density{advper::build_density(grid->ptr, preset, params)};
  });
}

advper_status advper_density_csv(const advper_grid* grid, const char* path, double w0, double w1,
                                 advper_density** out) {
  if (!grid || !path || !out) return null_handle();
  return guarded([&] { *out = new advper_density{advper::load_density_csv(grid->ptr, path, w0, w1)}; });
}

void advper_density_destroy(advper_density* dp) { delete dp; }

advper_status advper_density_bayes_max(const advper_density* dp, advper_set** out) {
  if (!dp || !out) return null_handle();
  return guarded([&] { *out = wrap(advper::bayes_max(dp->value)); });
}

advper_status advper_density_bayes_min(const advper_density* dp, advper_set** out) {
  if (!dp || !out) return null_handle();
  return guarded([&] { *out = wrap(advper::bayes_min(dp->value)); });
}

advper_status advper_density_margin_region(const advper_density* dp, double delta, advper_set** out) {
  if (!dp || !out) return null_handle();
  return guarded([&] { *out = wrap(advper::margin_region(dp->value, delta)); });
}

advper_status advper_measure(const advper_set* set, int cls, const advper_density* dp, double* out) {
  if (!set || !dp || !out) return null_handle();
  return guarded([&] {
    if (cls != 0 && cls != 1) throw advper::Error(advper::ErrorCode::InvalidArgument, "class must be 0 or 1");
    *out = advper::measure(set->value, cls, dp->value);
  });
}

advper_status advper_bayes_risk(const advper_set* set, const advper_density* dp, double* out) {
  if (!set || !dp || !out) return null_handle();
  return guarded([&] { *out = advper::bayes_risk(set->value, dp->value); });
}

advper_status advper_attack_eps(const advper_grid* grid, double eps, advper_attack** out) {
  if (!grid || !out) return null_handle();
  return guarded([&] { *out = new advper_attack{advper::attack_eps(grid->ptr, eps)}; });
}

advper_status advper_attack_prob(const advper_grid* grid, double eps, double p, advper_attack** out) {
  if (!grid || !out) return null_handle();
  return guarded([&] {
    const auto& g = *grid->ptr;
    *out = new advper_attack{advper::attack_prob(grid->ptr, eps, p, advper::Kernel::uniform(g.dim(), g.norm()))};
  });
}

void advper_attack_destroy(advper_attack* attack) { delete attack; }

advper_status advper_attacked(const advper_attack* attack, const advper_set* a, advper_set** out) {
  if (!attack || !a || !out) return null_handle();
  return guarded([&] { *out = wrap(attack->ptr->attacked(a->value)); });
}

advper_status advper_lambda_sets(const advper_attack* attack, const advper_set* a, advper_set** lam0,
                                 advper_set** lam1, advper_set** tilde0, advper_set** tilde1) {
  if (!attack || !a) return null_handle();
  return guarded([&] {
    auto l = advper::lambda_sets(*attack->ptr, a->value);
    if (lam0) *lam0 = wrap(std::move(l.lam0));
    if (lam1) *lam1 = wrap(std::move(l.lam1));
    if (tilde0) *tilde0 = wrap(std::move(l.tilde0));
    if (tilde1) *tilde1 = wrap(std::move(l.tilde1));
  });
}

advper_status advper_risk_total(const advper_attack* attack, const advper_set* a, const advper_density* dp,
                                advper_risk* out) {
  if (!attack || !a || !dp || !out) return null_handle();
  return guarded([&] {
    const auto r = advper::risk_total(*attack->ptr, a->value, dp->value);
    *out = {r.bayes, r.deficit, r.total, r.class0, r.class1};
  });
}

advper_status advper_eps_perimeter(const advper_set* a, double eps, const advper_density* dp, double* scaled) {
  if (!a || !dp || !scaled) return null_handle();
  return guarded([&] { *scaled = advper::eps_perimeter(a->value, eps, dp->value).scaled; });
}

advper_status advper_energy_exchange(const advper_attack* attack, const advper_set* a, const advper_set* e,
                                     const advper_density* dp, double delta, advper_exchange* out) {
  if (!attack || !a || !e || !dp || !out) return null_handle();
  return guarded([&] {
    const auto& phi = *attack->ptr;
    const auto rep = advper::energy_exchange_check(phi, a->value, e->value, dp->value, delta);
    const auto dec = advper::u_decomposition(phi, a->value, e->value);
    const auto ids = advper::verify_appendix_identities(dec, phi, a->value, e->value, dp->value);
    const auto diff = advper::exact_energy_difference(phi, a->value, e->value, dp->value);
    *out = {rep.hypothesis_met ? 1 : 0, rep.violated ? 1 : 0, rep.lhs, rep.rhs, rep.energy_diff, diff.rhs,
            ids.ok() ? 1 : 0};
  });
}

advper_status advper_minimize(const advper_attack* attack, const advper_density* dp,
                              const advper_solve_options* options, advper_solve_result* result, advper_set** argmin) {
  if (!attack || !dp || !options || !result) return null_handle();
  return guarded([&] {
    advper::SolverConfig cfg;
    switch (options->method) {
      case ADVPER_SOLVER_BRUTE:
        cfg.method = advper::SolverMethod::Brute;
        break;
      case ADVPER_SOLVER_LOCAL:
        cfg.method = advper::SolverMethod::Local;
        break;
      case ADVPER_SOLVER_INTERVAL:
        cfg.method = advper::SolverMethod::Interval;
        break;
      default:
        throw advper::Error(advper::ErrorCode::InvalidArgument, "unknown solver method");
    }
    cfg.seed = options->seed;
    cfg.max_iters = options->max_iters;
    cfg.restarts = options->restarts;
    cfg.threads = advper::resolve_threads(options->threads);
    auto r = advper::minimize(*attack->ptr, dp->value, cfg);
    *result = {r.value, r.certificate == advper::Certificate::Global ? 1 : 0, r.iterations, r.boundary};
    if (argmin) *argmin = wrap(std::move(r.argmin));
  });
}

advper_status advper_run(const char* subcommand, const char* config_path, const char* out_dir, int threads,
                         int has_seed, uint64_t seed, int* exit_code) {
  if (!subcommand || !config_path || !exit_code) return null_handle();
  return guarded([&] {
    advper::RunOptions opts;
    opts.config_path = config_path;
    opts.out_dir = out_dir ? out_dir : "";
    opts.threads = threads;
    if (has_seed) opts.seed = seed;
    *exit_code = advper::run_command(subcommand, opts, std::cerr);
  });
}

}  // extern "C"
