#ifndef ADVPER_H
#define ADVPER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ADVPER_API __declspec(dllexport)
#else
#define ADVPER_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum advper_status {
  ADVPER_OK = 0,
  ADVPER_INVALID_ARGUMENT = 1,
  ADVPER_GRID_MISMATCH = 2,
  ADVPER_PRECONDITION = 3,
  ADVPER_IO = 4,
  ADVPER_SCHEMA = 5,
  ADVPER_INTERNAL = 6,
  ADVPER_NULL_HANDLE = 7
} advper_status;

typedef enum advper_norm { ADVPER_NORM_L1 = 0, ADVPER_NORM_L2 = 1, ADVPER_NORM_LINF = 2 } advper_norm;

typedef enum advper_attack_kind { ADVPER_ATTACK_EPS = 0, ADVPER_ATTACK_PROB = 1 } advper_attack_kind;

typedef enum advper_solver_method {
  ADVPER_SOLVER_BRUTE = 0,
  ADVPER_SOLVER_LOCAL = 1,
  ADVPER_SOLVER_INTERVAL = 2
} advper_solver_method;

typedef struct advper_grid advper_grid;
typedef struct advper_set advper_set;
typedef struct advper_density advper_density;
typedef struct advper_attack advper_attack;

typedef struct advper_risk {
  double bayes;
  double deficit;
  double total;
  double class0;
  double class1;
} advper_risk;

typedef struct advper_exchange {
  int hypothesis_met;
  int violated;
  double lhs;
  double rhs;
  double energy_diff;
  double exact_diff_rhs; /* energy difference rebuilt from the U-sets */
  int identities_ok;
} advper_exchange;

typedef struct advper_solve_options {
  advper_solver_method method;
  uint64_t seed;
  int max_iters;
  int restarts;
  int threads;
} advper_solve_options;

typedef struct advper_solve_result {
  double value;
  int global; /* 1 when the certificate is GLOBAL */
  size_t iterations;
  double boundary;
} advper_solve_result;

ADVPER_API const char* advper_version(void);
ADVPER_API const char* advper_status_string(advper_status status);
/* Message of the last failed call on this thread ("" if none). */
ADVPER_API const char* advper_last_error(void);

ADVPER_API advper_status advper_grid_create(int dim, const double* lo, const double* hi, double h, advper_norm norm,
                                            advper_grid** out);
ADVPER_API void advper_grid_destroy(advper_grid* grid);
ADVPER_API advper_status advper_grid_cell_count(const advper_grid* grid, size_t* out);
ADVPER_API advper_status advper_grid_center(const advper_grid* grid, size_t cell, double* coords);

/* Masks are one byte per cell (0/1) in row-major order. */
ADVPER_API advper_status advper_set_create(const advper_grid* grid, const uint8_t* mask, advper_set** out);
ADVPER_API void advper_set_destroy(advper_set* set);
ADVPER_API advper_status advper_set_to_mask(const advper_set* set, uint8_t* mask, size_t len);
ADVPER_API advper_status advper_set_count(const advper_set* set, size_t* out);
ADVPER_API advper_status advper_set_ball(const advper_grid* grid, const double* center, double r, advper_set** out);
ADVPER_API advper_status advper_set_dilate(const advper_set* set, double eps, advper_set** out);
ADVPER_API advper_status advper_set_erode(const advper_set* set, double eps, advper_set** out);
ADVPER_API advper_status advper_set_complement(const advper_set* set, advper_set** out);
ADVPER_API advper_status advper_set_union(const advper_set* a, const advper_set* b, advper_set** out);
ADVPER_API advper_status advper_set_intersect(const advper_set* a, const advper_set* b, advper_set** out);
ADVPER_API advper_status advper_set_difference(const advper_set* a, const advper_set* b, advper_set** out);
ADVPER_API advper_status advper_hausdorff(const advper_set* a, const advper_set* b, const advper_set* k, double* out);

/* params_json: flat JSON object of numbers, or NULL. */
ADVPER_API advper_status advper_density_preset(const advper_grid* grid, const char* preset, const char* params_json,
                                               advper_density** out);
ADVPER_API advper_status advper_density_csv(const advper_grid* grid, const char* path, double w0, double w1,
                                            advper_density** out);
ADVPER_API void advper_density_destroy(advper_density* dp);
ADVPER_API advper_status advper_density_bayes_max(const advper_density* dp, advper_set** out);
ADVPER_API advper_status advper_density_bayes_min(const advper_density* dp, advper_set** out);
ADVPER_API advper_status advper_density_margin_region(const advper_density* dp, double delta, advper_set** out);
ADVPER_API advper_status advper_measure(const advper_set* set, int cls, const advper_density* dp, double* out);
ADVPER_API advper_status advper_bayes_risk(const advper_set* set, const advper_density* dp, double* out);

ADVPER_API advper_status advper_attack_eps(const advper_grid* grid, double eps, advper_attack** out);
ADVPER_API advper_status advper_attack_prob(const advper_grid* grid, double eps, double p, advper_attack** out);
ADVPER_API void advper_attack_destroy(advper_attack* attack);
ADVPER_API advper_status advper_attacked(const advper_attack* attack, const advper_set* a, advper_set** out);
/* Outputs lam0, lam1, tilde0, tilde1 (any may be NULL). */
ADVPER_API advper_status advper_lambda_sets(const advper_attack* attack, const advper_set* a, advper_set** lam0,
                                            advper_set** lam1, advper_set** tilde0, advper_set** tilde1);

ADVPER_API advper_status advper_risk_total(const advper_attack* attack, const advper_set* a, const advper_density* dp,
                                           advper_risk* out);
ADVPER_API advper_status advper_eps_perimeter(const advper_set* a, double eps, const advper_density* dp,
                                              double* scaled);
ADVPER_API advper_status advper_energy_exchange(const advper_attack* attack, const advper_set* a, const advper_set* e,
                                                const advper_density* dp, double delta, advper_exchange* out);
ADVPER_API advper_status advper_minimize(const advper_attack* attack, const advper_density* dp,
                                         const advper_solve_options* options, advper_solve_result* result,
                                         advper_set** argmin);

/* Runs a CLI subcommand: risk, exchange, convergence, validate-assumptions, solve.
 * threads <= 0 falls back to ADVPER_THREADS. *exit_code gets 0/1/2. */
ADVPER_API advper_status advper_run(const char* subcommand, const char* config_path, const char* out_dir, int threads,
                                    int has_seed, uint64_t seed, int* exit_code);

#ifdef __cplusplus
}
#endif

#endif
