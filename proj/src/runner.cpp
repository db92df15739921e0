#include "advper/runner.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "advper/config.hpp"
#include "advper/convergence.hpp"
#include "advper/exchange.hpp"
#include "advper/parallel.hpp"
#include "advper/sampling.hpp"
#include "json.hpp"

namespace advper {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json jnum(double v) {
  if (std::isfinite(v)) return v;
  return num(v);
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorCode::Io, "cannot write '" + p.string() + "'");
  out << body;
}

std::string hex(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct Context {
  RunConfig cfg;
  GridPtr grid;
  DensityPair dp;
  fs::path out;
  int threads = 1;
  std::uint64_t seed = 0;
  std::ostream* log = nullptr;
  json violations = json::array();
  std::vector<std::string> summary;
};

AttackPtr make_attack(const Context& c, double eps) {
  if (c.cfg.kind == AttackKind::Prob)
    return attack_prob(c.grid, eps, c.cfg.p, Kernel::uniform(c.grid->dim(), c.grid->norm()));
  return attack_eps(c.grid, eps);
}

CellSet region_of(const Context& c, double eps_max) {
  if (!c.cfg.experiment.region) return default_region(c.grid, eps_max);
  const auto& box = *c.cfg.experiment.region;
  CellSet k(c.grid);
  for (std::size_t i = 0; i < c.grid->size(); ++i) {
    bool in = true;
    for (int a = 0; a < c.grid->dim(); ++a) {
      const double x = c.grid->center(i, a);
      in = in && x >= box.lo[a] && x <= box.hi[a];
    }
    if (in) k.set(i);
  }
  return k;
}

void violation(Context& c, json v) { c.violations.push_back(std::move(v)); }

// ---- risk -------------------------------------------------------------------

void run_risk(Context& c) {
  std::ostringstream csv;
  csv << "eps,classifier,bayes,deficit,total,eps_perimeter,supform\n";
  const CellSet support = support_set(c.dp);
  const std::vector<std::pair<std::string, CellSet>> named = {
      {"empty", CellSet(c.grid)}, {"bayes_max", bayes_max(c.dp)}, {"bayes_min", bayes_min(c.dp)}, {"support", support}};
  const std::size_t trials = c.cfg.experiment.trials;
  for (std::size_t ei = 0; ei < c.cfg.eps_list.size(); ++ei) {
    const double eps = c.cfg.eps_list[ei];
    const AttackPtr phi = make_attack(c, eps);
    for (const auto& [name, a] : named) {
      const RiskReport r = risk_total(*phi, a, c.dp);
      csv << num(eps) << ',' << name << ',' << num(r.bayes) << ',' << num(r.deficit) << ',' << num(r.total) << ','
          << num(eps_perimeter(a, eps, c.dp).scaled) << ',' << num(risk_atp_supform(a, eps, c.dp)) << '\n';
    }
    // Dual-path sweep on random classifiers.
    std::vector<json> found(trials);
    const EpsAttack eps_phi(c.grid, eps);
    parallel_for(trials, c.threads, [&](std::size_t t) {
      auto rng = make_stream(c.seed, (ei << 32) | t);
      const CellSet a = random_set(c.grid, rng);
      const RiskReport r = risk_total(*phi, a, c.dp);
      double sup = 0.0;
      try {
        sup = risk_atp_supform(a, eps, c.dp);
      } catch (const Error& e) {
        found[t] = {{"check", "supform"}, {"eps", eps}, {"trial", t}, {"detail", e.what()}};
        return;
      }
      if (c.cfg.kind == AttackKind::Prob && r.total > sup + 1e-12)
        found[t] = {{"check", "J_prob<=J_eps"}, {"eps", eps}, {"trial", t}, {"lhs", r.total}, {"rhs", sup}};
    });
    std::size_t bad = 0;
    for (auto& f : found)
      if (!f.is_null()) {
        ++bad;
        violation(c, std::move(f));
      }
    c.summary.push_back("eps=" + num(eps) + ": " + std::to_string(trials) + " random classifiers, " +
                        std::to_string(bad) + " dual-path violations");
  }
  write_file(c.out / "risk.csv", csv.str());
}

// ---- exchange ---------------------------------------------------------------

struct TrialOutcome {
  std::string row;
  std::vector<json> issues;
  bool hypothesis = false;
};

void run_exchange(Context& c) {
  const double delta = c.cfg.experiment.delta;
  const CellSet margin = margin_region(c.dp, delta);
  require(!margin.none(), ErrorCode::Precondition, "margin region is empty for this delta");
  const std::size_t trials = c.cfg.experiment.trials;
  const bool literal = c.grid->size() <= 10000;
  RandomSetOptions e_opt;
  e_opt.max_balls = 3;
  e_opt.min_radius = 0.02;
  e_opt.max_radius = 0.15;
  e_opt.halfspace_prob = 0.0;
  e_opt.noise = 0.0;

  std::ostringstream csv;
  csv << "eps,trial,hypothesis_met,lhs,rhs,energy_diff,identities_ok,difference_residual,emptiness_ok,literal_ok\n";
  for (std::size_t ei = 0; ei < c.cfg.eps_list.size(); ++ei) {
    const double eps = c.cfg.eps_list[ei];
    const AttackPtr phi = make_attack(c, eps);
    std::vector<TrialOutcome> res(trials);
    parallel_for(trials, c.threads, [&](std::size_t t) {
      auto rng = make_stream(c.seed, (ei << 32) | t);
      const CellSet a = random_set(c.grid, rng);
      const CellSet e = random_subset(margin, rng, e_opt);
      auto& o = res[t];
      auto issue = [&](const std::string& check, double lhs, double rhs) {
        o.issues.push_back({{"check", check}, {"eps", eps}, {"trial", t}, {"seed", c.seed}, {"lhs", jnum(lhs)},
                            {"rhs", jnum(rhs)}, {"A", a.to_rle()}, {"E", e.to_rle()}});
      };
      const USetDecomposition dec = u_decomposition(*phi, a, e);
      const IdentityReport ids = verify_appendix_identities(dec, *phi, a, e, c.dp);
      for (const auto& name : ids.failures()) issue("identity:" + name, 0, 0);
      const EnergyDifference diff = energy_difference_from(dec, risk_total(*phi, a, c.dp),
                                                           risk_total(*phi, a - e, c.dp), c.dp);
      const double residual = std::abs(diff.lhs - diff.rhs);
      if (residual > 1e-12) issue("energy_difference", diff.lhs, diff.rhs);
      const ExchangeReport ex = energy_exchange_check(*phi, a, e, c.dp, delta);
      if (ex.violated) issue("exchange_inequality", ex.lhs, ex.rhs);
      if (ex.eps_form_violated) issue("exchange_inequality_eps_form", ex.lhs, ex.rhs - ex.correction1);
      bool empt = true;
      if (phi->kind() == AttackKind::Eps) {
        const EmptinessReport em = emptiness_of(dec);
        empt = em.ok();
        if (!empt) issue("emptiness", static_cast<double>(em.hat1 + em.tilde3 + em.tilde10), 0);
      }
      bool lit = true;
      if (literal) {
        const USetDecomposition ref = u_decomposition_literal(*phi, a, e);
        for (int i = 0; i < 13; ++i)
          lit = lit && ref.u[i] == dec.u[i] && ref.hat[i] == dec.hat[i] && ref.tilde[i] == dec.tilde[i];
        if (!lit) issue("literal_decomposition", 0, 0);
      }
      o.hypothesis = ex.hypothesis_met;
      o.row = num(eps) + ',' + std::to_string(t) + ',' + (ex.hypothesis_met ? "1" : "0") + ',' + num(ex.lhs) + ',' +
              num(ex.rhs) + ',' + num(ex.energy_diff) + ',' + (ids.ok() ? "1" : "0") + ',' + num(residual) + ',' +
              (empt ? "1" : "0") + ',' + (literal ? (lit ? "1" : "0") : "") + '\n';
    });
    std::size_t hits = 0, bad = 0;
    for (auto& o : res) {
      csv << o.row;
      hits += o.hypothesis ? 1 : 0;
      bad += o.issues.size();
      for (auto& v : o.issues) violation(c, std::move(v));
    }
    c.summary.push_back("eps=" + num(eps) + ": " + std::to_string(trials) + " trials, hypothesis met in " +
                        std::to_string(hits) + " (" + num(100.0 * static_cast<double>(hits) / static_cast<double>(trials)) +
                        "%), " + std::to_string(bad) + " violations");
  }
  write_file(c.out / "exchange.csv", csv.str());
}

// ---- convergence ------------------------------------------------------------

void run_convergence(Context& c) {
  ConvergenceConfig cc;
  cc.eps_list = c.cfg.eps_list;
  cc.kind = c.cfg.kind;
  cc.p = c.cfg.p;
  cc.solver = c.cfg.solver;
  cc.solver.seed = c.seed;
  cc.threads = c.threads;
  cc.timing = c.cfg.experiment.timing;
  cc.region = region_of(c, cc.eps_list.front());
  const auto records = run_convergence_experiment(c.dp, cc);
  const double h = c.grid->h();
  const int d = c.grid->dim();

  std::ostringstream csv;
  csv << "eps,hausdorff,eta_corral,j_value,bayes_value,certificate,wall_ms\n";
  json recs = json::array();
  for (const auto& r : records) {
    csv << num(r.eps) << ',' << num(r.hausdorff) << ',' << num(r.eta_corral) << ',' << num(r.j_value) << ','
        << num(r.bayes_value) << ',' << to_string(r.certificate) << ',' << (cc.timing ? num(r.wall_ms) : "") << '\n';
    recs.push_back({{"eps", r.eps},
                    {"hausdorff", jnum(r.hausdorff)},
                    {"hausdorff_max_side", jnum(r.hausdorff_max)},
                    {"hausdorff_min_side", jnum(r.hausdorff_min)},
                    {"degenerate", r.degenerate},
                    {"eta_corral", jnum(r.eta_corral)},
                    {"boundary", r.boundary},
                    {"certificate", to_string(r.certificate)},
                    {"argmin_rle", r.argmin.to_rle()}});
  }
  write_file(c.out / "convergence.csv", csv.str());
  write_file(c.out / "convergence_records.json", recs.dump(2) + "\n");

  // Monotone envelope with 2h slack, and the guaranteed-rate bound calibrated
  // at the largest eps.
  const double guaranteed = 1.0 / (d + 2);
  double envelope = 0.0;
  for (std::size_t i = records.size(); i-- > 0;) {
    envelope = std::max(envelope, records[i].hausdorff);
    if (i > 0 && envelope > records[i - 1].hausdorff + 2.0 * h && std::isfinite(records[i - 1].hausdorff))
      violation(c, {{"check", "monotone_envelope"}, {"eps", records[i].eps}, {"lhs", jnum(envelope)},
                    {"rhs", jnum(records[i - 1].hausdorff + 2.0 * h)}});
  }
  const double c0 = records.front().hausdorff / std::pow(records.front().eps, guaranteed);
  for (const auto& r : records) {
    const double bound = c0 * std::pow(r.eps, guaranteed);
    if (std::isfinite(c0) && r.hausdorff > bound * (1.0 + 1e-12) + 1e-15)
      violation(c, {{"check", "rate_bound"}, {"eps", r.eps}, {"lhs", jnum(r.hausdorff)}, {"rhs", bound}});
  }

  json rate = {{"guaranteed_exponent", guaranteed}, {"conjectured_exponent", 1.0}, {"calibrated_constant", jnum(c0)}};
  try {
    const RateFit fit = fit_rate(records, h);
    rate["fit"] = {{"exponent", fit.exponent}, {"constant", fit.constant}, {"r2", fit.r2}, {"used", fit.used}};
    c.summary.push_back("fitted exponent " + num(fit.exponent) + " from " + std::to_string(fit.used) + " records");
  } catch (const Error& e) {
    rate["fit"] = nullptr;
    rate["fit_refused"] = e.what();
    c.summary.push_back(std::string("rate fit refused: ") + e.what());
  }
  write_file(c.out / "rate.json", rate.dump(2) + "\n");
  for (const auto& r : records)
    c.summary.push_back("eps=" + num(r.eps) + " d_H=" + num(r.hausdorff) + " eta=" + num(r.eta_corral) +
                        " J=" + num(r.j_value) + " (" + to_string(r.certificate) + ")");
}

// ---- validate-assumptions ----------------------------------------------------

json violation_summary(const ViolationReport& v) {
  return {{"checked", v.checked}, {"violations", v.violations}, {"cells", v.cells}};
}

void run_validate(Context& c) {
  const std::size_t trials = c.cfg.experiment.trials;
  json out = json::array();
  for (std::size_t ei = 0; ei < c.cfg.eps_list.size(); ++ei) {
    const double eps = c.cfg.eps_list[ei];
    const AttackPtr phi = make_attack(c, eps);
    std::vector<std::array<std::size_t, 8>> counts(trials);
    parallel_for(trials, c.threads, [&](std::size_t t) {
      auto rng = make_stream(c.seed, (ei << 32) | t);
      const CellSet a = random_set(c.grid, rng);
      const CellSet e = random_set(c.grid, rng);
      auto& k = counts[t];
      k.fill(0);
      k[0] = check_complement_property(*phi, a).violations;
      const auto lm = check_lambda_monotonicity(*phi, a, e);
      for (int i = 0; i < 4; ++i) k[1 + i] = lm.items[i].violations;
      const auto dom = deficit_domination_check(*phi, a, e, c.dp);
      k[5] = (dom.domination_ok ? 0 : 1) + (dom.domination_rel_ok ? 0 : 1);
      k[6] = dom.isolation.violations;
    });
    std::array<std::size_t, 8> tot{};
    for (const auto& k : counts)
      for (int i = 0; i < 8; ++i) tot[i] += k[i];
    const MetricReport metric = check_metric_property(*phi, trials, c.seed ^ 0x6d657472ull);
    const VolumeBoundReport vol = check_volume_attack_bound(*phi, phi->volume_beta(), trials, c.seed ^ 0x766f6cull);
    json entry = {{"eps", eps},
                  {"attack", phi->name()},
                  {"trials", trials},
                  {"lattice_tie", has_lattice_tie(*c.grid, eps)},
                  {"complement_property", tot[0]},
                  {"lambda_monotonicity", {tot[1], tot[2], tot[3], tot[4]}},
                  {"deficit_domination", tot[5]},
                  {"isolation", tot[6]},
                  {"metric_locality", violation_summary(metric.locality)},
                  {"metric_trivial_sets", violation_summary(metric.trivial_sets)},
                  {"volume_bound", {{"beta", vol.beta}, {"hypothesis_met", vol.hypothesis_met},
                                    {"violations", vol.violations.violations}}}};
    const std::size_t bad = tot[0] + tot[1] + tot[2] + tot[3] + tot[4] + tot[5] + tot[6] + metric.locality.violations +
                            metric.trivial_sets.violations + vol.violations.violations;
    if (bad > 0) violation(c, {{"check", "assumption_validators"}, {"eps", eps}, {"report", entry}});
    c.summary.push_back("eps=" + num(eps) + ": " + std::to_string(bad) + " validator violations over " +
                        std::to_string(trials) + " trials");
    out.push_back(std::move(entry));
  }
  const NondegeneracyReport nd = nondegeneracy_check(c.dp, 0.0);
  json doc = {{"attacks", out},
              {"nondegeneracy", {{"passed", nd.passed}, {"vacuous", nd.vacuous}, {"min_gradient", jnum(nd.min_gradient)},
                                 {"bayes_gap", jnum(nd.bayes_gap)}}}};
  write_file(c.out / "validate.json", doc.dump(2) + "\n");
}

// ---- solve ------------------------------------------------------------------

void run_solve(Context& c) {
  SolverConfig sc = c.cfg.solver;
  sc.seed = c.seed;
  sc.threads = c.threads;
  std::ostringstream csv;
  csv << "eps,value,certificate,iterations,cells,boundary\n";
  json out = json::array();
  for (double eps : c.cfg.eps_list) {
    const AttackPtr phi = make_attack(c, eps);
    const SolveResult r = minimize(*phi, c.dp, sc);
    csv << num(eps) << ',' << num(r.value) << ',' << to_string(r.certificate) << ',' << r.iterations << ','
        << r.argmin.count() << ',' << (sc.method == SolverMethod::Interval ? num(r.boundary) : "") << '\n';
    out.push_back({{"eps", eps},
                   {"value", r.value},
                   {"certificate", to_string(r.certificate)},
                   {"iterations", r.iterations},
                   {"quantization_warning", r.quantization_warning},
                   {"argmin_rle", r.argmin.to_rle()}});
    c.summary.push_back("eps=" + num(eps) + ": J=" + num(r.value) + " (" + to_string(r.certificate) + ")");
  }
  write_file(c.out / "solve.csv", csv.str());
  write_file(c.out / "solve.json", out.dump(2) + "\n");
}

}  // namespace

std::vector<std::string> subcommands() { return {"risk", "exchange", "convergence", "validate-assumptions", "solve"}; }

int run_command(const std::string& sub, const RunOptions& opts, std::ostream& log) {
  const auto subs = subcommands();
  if (std::find(subs.begin(), subs.end(), sub) == subs.end()) {
    log << "error: unknown subcommand '" << sub << "'\n";
    return 2;
  }
  Context c;
  c.log = &log;
  try {
    c.cfg = load_config(opts.config_path);
    c.seed = opts.seed.value_or(c.cfg.experiment.seed);
    c.threads = resolve_threads(opts.threads);
    c.grid = make_grid(c.cfg.grid);
    if (c.cfg.csv_path) {
      fs::path p(*c.cfg.csv_path);
      if (p.is_relative()) p = fs::path(opts.config_path).parent_path() / p;
      c.dp = load_density_csv(c.grid, p.string(), c.cfg.csv_w0, c.cfg.csv_w1);
    } else {
      c.dp = build_density(c.grid, c.cfg.preset, c.cfg.params);
    }
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  }

  try {
    c.out = opts.out_dir.empty() ? fs::path("out") : fs::path(opts.out_dir);
    fs::create_directories(c.out);
    const json manifest = {{"tool", "advper"},
                           {"version", kVersion},
                           {"subcommand", sub},
                           {"config", opts.config_path},
                           {"config_hash", hex(c.cfg.hash)},
                           {"seed", c.seed}};
    write_file(c.out / "manifest.json", manifest.dump(2) + "\n");

    if (sub == "risk")
      run_risk(c);
    else if (sub == "exchange")
      run_exchange(c);
    else if (sub == "convergence")
      run_convergence(c);
    else if (sub == "validate-assumptions")
      run_validate(c);
    else
      run_solve(c);
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return 2;
  }

  write_file(c.out / "violations.json", c.violations.dump(2) + "\n");
  std::ostringstream summary;
  summary << "advper " << kVersion << " " << sub << "\nconfig " << opts.config_path << " (hash " << hex(c.cfg.hash)
          << ")\nseed " << c.seed << "\n";
  for (const auto& line : c.summary) summary << line << '\n';
  summary << c.violations.size() << " violations\n";
  write_file(c.out / "summary.txt", summary.str());
  log << summary.str();
  if (!c.violations.empty()) {
    log << "violation report: " << (c.out / "violations.json").string() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace advper
