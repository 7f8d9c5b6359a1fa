#include <omp.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "etm/config.hpp"
#include "etm/errors.hpp"
#include "etm/scan.hpp"
#include "etm/simulator.hpp"
#include "etm/spectrum.hpp"
#include "etm/steady_state.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using etm::format_double;

struct Ctx {
  etm::Config cfg;
  fs::path out;
};

std::vector<std::string> with_model_keys(std::vector<std::string> extra) {
  auto keys = etm::model_config_keys();
  keys.insert(keys.end(), extra.begin(), extra.end());
  return keys;
}

void write_summary(const Ctx& ctx, const json& j) {
  etm::write_text_file((ctx.out / "summary.json").string(), j.dump(2) + "\n");
}

std::vector<etm::SteadyState> certified_states(const etm::FiringModel& model,
                                               const etm::Config& cfg) {
  auto states = etm::find_steady_states(model, cfg.get_num("steady.r_max", 0.0),
                                        cfg.get_int("steady.n_scan", 2000));
  std::vector<etm::SteadyState> out;
  for (auto& s : states)
    if (!s.fold_suspect) out.push_back(s);
  return out;
}

etm::SteadyState select_state(const std::vector<etm::SteadyState>& states,
                              const etm::Config& cfg) {
  if (states.empty()) throw etm::NumericalError("no certified steady state found");
  if (cfg.has("run.r_star")) {
    const double target = cfg.get_num("run.r_star");
    const etm::SteadyState* best = &states[0];
    for (const auto& s : states)
      if (std::abs(s.r_star - target) < std::abs(best->r_star - target)) best = &s;
    return *best;
  }
  if (states.size() > 1)
    throw etm::ConfigError(
        "multiple steady states; select one with run.r_star = <value>");
  return states[0];
}

int cmd_steady(Ctx& ctx) {
  ctx.cfg.check_known(with_model_keys({"steady.r_max", "steady.n_scan"}));
  const auto model = etm::model_from_config(ctx.cfg);
  const auto states = etm::find_steady_states(
      model, ctx.cfg.get_num("steady.r_max", 0.0),
      ctx.cfg.get_int("steady.n_scan", 2000));

  std::ostringstream csv;
  csv << "r_star,A_star,slope_inv_I,phi,mass_residual,fold_suspect\n";
  json jr = json::array();
  for (const auto& s : states) {
    csv << format_double(s.r_star) << ',' << format_double(s.A_star) << ','
        << format_double(s.slope_inv_I) << ',' << format_double(s.phi_at_r)
        << ',' << format_double(s.mass_residual) << ','
        << (s.fold_suspect ? 1 : 0) << '\n';
    jr.push_back({{"r_star", s.r_star},
                  {"A_star", s.A_star},
                  {"slope_inv_I", s.slope_inv_I},
                  {"fold_suspect", s.fold_suspect}});
  }
  etm::write_text_file((ctx.out / "steady.csv").string(), csv.str());
  write_summary(ctx, json{{"n_states", states.size()}, {"states", jr}});
  return states.empty() ? 2 : 0;
}

int cmd_stability(Ctx& ctx) {
  ctx.cfg.check_known(
      with_model_keys({"run.d", "steady.r_max", "steady.n_scan"}));
  const auto model = etm::model_from_config(ctx.cfg);
  const double d = ctx.cfg.get_num("run.d");
  const auto states = certified_states(model, ctx.cfg);

  std::ostringstream csv;
  csv << "r_star,verdict,clause,re_z0,im_z0,root_residual,notes\n";
  json jr = json::array();
  bool any_verdict = false;
  for (const auto& s : states) {
    const auto rep = etm::classify_stability(model, s, d);
    if (rep.verdict != etm::Verdict::Inconclusive) any_verdict = true;
    csv << format_double(s.r_star) << ',' << etm::to_string(rep.verdict) << ','
        << etm::to_string(rep.clause) << ',';
    json jroot;
    if (rep.dominant) {
      csv << format_double(rep.dominant->z.real()) << ','
          << format_double(rep.dominant->z.imag()) << ','
          << format_double(rep.dominant->residual);
      jroot = {{"re", rep.dominant->z.real()}, {"im", rep.dominant->z.imag()}};
    } else {
      csv << ",,";
    }
    csv << ',' << rep.notes << '\n';
    jr.push_back({{"r_star", s.r_star},
                  {"verdict", etm::to_string(rep.verdict)},
                  {"clause", etm::to_string(rep.clause)},
                  {"dominant", jroot}});
  }
  etm::write_text_file((ctx.out / "stability.csv").string(), csv.str());
  write_summary(ctx, json{{"d", d}, {"reports", jr}});
  if (states.empty()) return 2;
  return any_verdict ? 0 : 3;
}

int cmd_critical_delays(Ctx& ctx) {
  ctx.cfg.check_known(with_model_keys(
      {"run.d_lo", "run.d_hi", "run.r_star", "steady.r_max", "steady.n_scan"}));
  const auto model = etm::model_from_config(ctx.cfg);
  const auto ss = select_state(certified_states(model, ctx.cfg), ctx.cfg);
  const auto cds = etm::critical_delays(model, ss, ctx.cfg.get_num("run.d_lo"),
                                        ctx.cfg.get_num("run.d_hi"));

  std::ostringstream csv;
  csv << "d_crit,frequency,direction\n";
  json jr = json::array();
  for (const auto& c : cds) {
    const char* dir = c.stable_to_unstable ? "stable->unstable" : "unstable->stable";
    csv << format_double(c.d) << ',' << format_double(c.frequency) << ',' << dir
        << '\n';
    jr.push_back({{"d", c.d}, {"frequency", c.frequency}, {"direction", dir}});
  }
  etm::write_text_file((ctx.out / "critical_delays.csv").string(), csv.str());
  write_summary(ctx, json{{"r_star", ss.r_star},
                          {"n_crossings", cds.size()},
                          {"crossings", jr}});
  return 0;
}

int cmd_trace_root(Ctx& ctx) {
  ctx.cfg.check_known(with_model_keys({"run.d_lo", "run.d_hi", "run.n_points",
                                       "run.r_star", "steady.r_max",
                                       "steady.n_scan"}));
  const auto model = etm::model_from_config(ctx.cfg);
  const auto ss = select_state(certified_states(model, ctx.cfg), ctx.cfg);
  const double d_lo = ctx.cfg.get_num("run.d_lo");
  const double d_hi = ctx.cfg.get_num("run.d_hi");
  const long n = ctx.cfg.get_int("run.n_points", 200);
  if (!(d_lo > 0.0 && d_hi > d_lo && n >= 2))
    throw etm::ConfigError("trace-root: need 0 < run.d_lo < run.d_hi, n_points >= 2");

  std::vector<double> grid(n);
  for (long i = 0; i < n; ++i)
    grid[i] = d_lo + (d_hi - d_lo) * static_cast<double>(i) / (n - 1);
  const auto trace = etm::trace_dominant_root(model, ss, grid);

  std::ostringstream csv;
  csv << "d,re_z0,im_z0,residual\n";
  json errs = json::array();
  for (const auto& tp : trace) {
    if (tp.root) {
      csv << format_double(tp.d) << ',' << format_double(tp.root->z.real())
          << ',' << format_double(tp.root->z.imag()) << ','
          << format_double(tp.root->residual) << '\n';
    } else {
      errs.push_back({{"d", tp.d}, {"error", tp.error}});
    }
  }
  etm::write_text_file((ctx.out / "trace_root.csv").string(), csv.str());
  write_summary(ctx, json{{"r_star", ss.r_star},
                          {"n_points", trace.size()},
                          {"failures", errs}});
  return 0;
}

int cmd_bifurcation(Ctx& ctx) {
  ctx.cfg.check_known(with_model_keys(
      {"scan.b_lo", "scan.b_hi", "scan.n_points", "scan.d_probe"}));
  const std::string hz = ctx.cfg.get_str("model.hazard");
  double sigma_default = hz == "sigmoid9" ? 0.5 : 1.0;
  const double sigma = ctx.cfg.get_num("model.sigma", sigma_default);
  etm::ModelFamily family;
  if (hz == "sigmoid9") {
    family = [sigma](double b) {
      return etm::FiringModel::refractory(sigma, etm::HazardCurve::sigmoid9(b));
    };
  } else if (hz == "satquad") {
    family = [sigma](double b) {
      return etm::FiringModel::refractory(sigma, etm::HazardCurve::sat_quad(b * b));
    };
  } else if (hz == "constant") {
    family = [sigma](double b) {
      return etm::FiringModel::refractory(sigma, etm::HazardCurve::constant(b));
    };
  } else {
    throw etm::ConfigError("model.hazard must be sigmoid9, satquad or constant");
  }

  const auto rows = etm::bifurcation_scan(
      family, ctx.cfg.get_num("scan.b_lo"), ctx.cfg.get_num("scan.b_hi"),
      static_cast<int>(ctx.cfg.get_int("scan.n_points", 200)),
      ctx.cfg.get_num("scan.d_probe", 0.1));

  std::ostringstream csv;
  csv << "b,branch_id,r_star,A_star,slope_inv_I,verdict_d0,verdict_dpos,"
         "fold_suspect\n";
  for (const auto& r : rows) {
    if (!r.error.empty()) continue;
    csv << format_double(r.b) << ',' << r.branch_id << ','
        << format_double(r.r_star) << ',' << format_double(r.A_star) << ','
        << format_double(r.slope_inv_I) << ',' << etm::to_string(r.verdict_d0)
        << ',' << etm::to_string(r.verdict_dpos) << ','
        << (r.fold_suspect ? 1 : 0) << '\n';
  }
  etm::write_text_file((ctx.out / "bifurcation.csv").string(), csv.str());

  const auto folds = etm::find_fold_points(family, rows);
  const auto a1 = etm::find_level_crossings(family, rows, etm::LevelKind::A_eq_1);
  const auto a1sp =
      etm::find_level_crossings(family, rows, etm::LevelKind::A_eq_1_plus_sigma_phi);
  json jf = json::array(), ja1 = json::array(), ja2 = json::array();
  for (double b : folds) jf.push_back(b);
  for (const auto& c : a1) ja1.push_back({{"b", c.b}, {"branch_id", c.branch_id}});
  for (const auto& c : a1sp) ja2.push_back({{"b", c.b}, {"branch_id", c.branch_id}});
  write_summary(ctx, json{{"folds", jf},
                          {"A_eq_1_crossings", ja1},
                          {"A_eq_1_plus_sigma_phi_crossings", ja2}});
  return 0;
}

int cmd_simulate(Ctx& ctx) {
  ctx.cfg.check_known(with_model_keys(
      {"run.d", "run.T", "run.window", "run.r_star", "grid.delta_a",
       "grid.a_max", "init.kind", "init.rate", "init.scale", "init.r0",
       "steady.r_max", "steady.n_scan"}));
  const auto model = etm::model_from_config(ctx.cfg);
  const double d = ctx.cfg.get_num("run.d");
  const double T = ctx.cfg.get_num("run.T");
  const auto states = certified_states(model, ctx.cfg);
  const auto ss = select_state(states, ctx.cfg);

  std::function<double(double)> n0, r0;
  const std::string kind = ctx.cfg.get_str("init.kind");
  if (kind == "steady") {
    const double rs = ss.r_star;
    n0 = [&model, rs](double a) { return etm::density_n_star(model, rs, a); };
    r0 = [rs](double) { return rs; };
  } else if (kind == "exp") {
    const double rate = ctx.cfg.get_num("init.rate");
    const double scale = ctx.cfg.get_num("init.scale", 1.0);
    const double rv = ctx.cfg.get_num("init.r0");
    n0 = [rate, scale](double a) { return scale * std::exp(-rate * a); };
    r0 = [rv](double) { return rv; };
  } else if (kind == "shifted-exp") {
    const double rate = ctx.cfg.get_num("init.rate");
    const double scale = ctx.cfg.get_num("init.scale", 1.0);
    const double rv = ctx.cfg.get_num("init.r0");
    const double sigma = model.sigma();
    n0 = [rate, scale, sigma](double a) {
      return scale * std::exp(-rate * std::max(a - sigma, 0.0));
    };
    r0 = [rv](double) { return rv; };
  } else {
    throw etm::ConfigError("init.kind must be steady, exp or shifted-exp");
  }

  const auto grid = etm::make_age_grid(model, ctx.cfg.get_num("grid.delta_a", 0.0),
                                       ctx.cfg.get_num("grid.a_max", 0.0));
  const auto res = etm::simulate(model, grid, n0, r0, d, T);

  std::ostringstream tcsv;
  tcsv << "# " << res.trace.meta << "\n";
  tcsv << "t,r\n";
  for (std::size_t k = 0; k < res.trace.values.size(); ++k)
    tcsv << format_double(k * res.trace.delta_t) << ','
         << format_double(res.trace.values[k]) << '\n';
  etm::write_text_file((ctx.out / "trace.csv").string(), tcsv.str());

  std::ostringstream dcsv;
  dcsv << "# final density at t=" << format_double(res.state.t) << "\n";
  dcsv << "a,n\n";
  for (std::size_t j = 0; j < res.state.mass.size(); ++j)
    dcsv << format_double(res.grid.cell_mid(j)) << ','
         << format_double(res.state.mass[j] / res.grid.delta_a) << '\n';
  etm::write_text_file((ctx.out / "density.csv").string(), dcsv.str());

  const double window =
      std::min(ctx.cfg.get_num("run.window", 20.0), 0.5 * res.trace.duration());
  const auto period = etm::detect_period(res.trace, window);
  const double dist = etm::distance_to_equilibrium(
      res.trace, ss.r_star, std::min(10.0, 0.25 * res.trace.duration()));

  json jp;
  switch (period.kind) {
    case etm::PeriodReport::Kind::Converged:
      jp = {{"kind", "converged"}, {"value", period.value}};
      break;
    case etm::PeriodReport::Kind::Periodic:
      jp = {{"kind", "periodic"}, {"period", period.period}};
      break;
    default:
      jp = {{"kind", "undetermined"}};
  }
  write_summary(ctx, json{{"r_star", ss.r_star},
                          {"d", res.trace.d},
                          {"delta_a", res.grid.delta_a},
                          {"final_r", res.trace.values.back()},
                          {"final_distance", dist},
                          {"total_mass", res.state.total_mass},
                          {"renorm_warning", res.state.renorm_warning},
                          {"period", jp}});
  return 0;
}

int cmd_pseudo_eq(Ctx& ctx) {
  ctx.cfg.check_known(
      with_model_keys({"run.x0", "run.K", "steady.r_max", "steady.n_scan"}));
  const auto model = etm::model_from_config(ctx.cfg);
  const auto seq = etm::pseudo_equilibrium_sequence(
      model, ctx.cfg.get_num("run.x0"),
      static_cast<int>(ctx.cfg.get_int("run.K", 200)));

  std::ostringstream csv;
  csv << "k,x_k\n";
  for (std::size_t k = 0; k < seq.x.size(); ++k)
    csv << k << ',' << format_double(seq.x[k]) << '\n';
  etm::write_text_file((ctx.out / "pseudo_eq.csv").string(), csv.str());

  json j{{"converged", seq.converged}, {"divergent", seq.divergent}};
  if (seq.fixed_point) j["fixed_point"] = *seq.fixed_point;
  write_summary(ctx, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Linear stability toolkit for the delayed elapsed-time neuron model"};
  app.require_subcommand(1);

  std::string config_path, out_dir = ".";
  int threads = 0;

  const std::vector<std::pair<std::string, int (*)(Ctx&)>> commands = {
      {"steady", cmd_steady},
      {"stability", cmd_stability},
      {"critical-delays", cmd_critical_delays},
      {"trace-root", cmd_trace_root},
      {"bifurcation", cmd_bifurcation},
      {"simulate", cmd_simulate},
      {"pseudo-eq", cmd_pseudo_eq},
  };
  for (const auto& [name, fn] : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--threads", threads, "OpenMP thread count (0 = default)");
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (threads > 0) omp_set_num_threads(threads);
    Ctx ctx;
    ctx.cfg = etm::Config::from_file(config_path);
    ctx.out = out_dir;
    std::filesystem::create_directories(ctx.out);
    const std::string name = app.get_subcommands().front()->get_name();
    for (const auto& [cname, fn] : commands)
      if (cname == name) return fn(ctx);
    std::cerr << "unknown command\n";
    return 1;
  } catch (const etm::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
