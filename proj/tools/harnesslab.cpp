// harnesslab: experiment driver around the harness library. JSON configs in,
// CSV tables + meta.json out; --assert turns the built-in comparisons into
// pass/fail exit codes for CI.
//
// Exit codes: 0 success, 2 config rejection (machine-readable JSON on stdout),
// 3 failed acceptance assertion under --assert.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "harness/config.hpp"
#include "harness/fluct.hpp"
#include "harness/invariant.hpp"
#include "harness/process.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace harness;

namespace {

constexpr const char* kVersion = "0.2.0";

// Tracks files written by a run; unless the run commits (writes meta.json),
// partial outputs are removed on the way out.
struct Outputs {
  fs::path dir;
  std::vector<fs::path> written;
  bool committed = false;

  explicit Outputs(const std::string& out_dir) : dir(out_dir) { fs::create_directories(dir); }

  ~Outputs() {
    if (committed) return;
    for (const auto& p : written) {
      std::error_code ec;
      fs::remove(p, ec);
    }
  }

  std::ofstream open(const std::string& name) {
    fs::path p = dir / name;
    written.push_back(p);
    std::ofstream f(p, std::ios::binary);
    if (!f) throw ConfigError("cannot open output file " + p.string());
    return f;
  }
};

json load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return j;
}

struct Common {
  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  int threads = 1;
  bool assert_mode = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config_path, "experiment config (JSON)")->required();
  cmd->add_option("--seed", c.seed, "base RNG seed");
  cmd->add_option("--threads", c.threads, "worker threads for replica loops");
  cmd->add_option("--out", c.out_dir, "output directory");
  cmd->add_flag("--assert", c.assert_mode, "fail (exit 3) when built-in comparisons do not pass");
}

void write_meta(Outputs& out, const std::string& subcommand, const Common& c, const json& config,
                double seconds, const json& extra = json::object()) {
  json meta;
  meta["subcommand"] = subcommand;
  meta["version"] = kVersion;
  meta["seed"] = c.seed;
  meta["threads"] = c.threads;
  meta["config"] = config;
  meta["timing_seconds"] = seconds;
  for (auto it = extra.begin(); it != extra.end(); ++it) meta[it.key()] = it.value();
  out.open("meta.json") << meta.dump(2) << "\n";
  out.committed = true;
}

KernelAnalysis kernel_from_config(const json& cfg) {
  if (!cfg.contains("kernel")) throw ConfigError("config lacks a \"kernel\" object");
  return validate_kernel(kernel_spec_from_json(cfg.at("kernel")));
}

NoiseModel noise_from_config(const json& cfg) {
  if (!cfg.contains("noise")) throw ConfigError("config lacks a \"noise\" object");
  return noise_from_json(cfg.at("noise"));
}

// --- subcommands ---------------------------------------------------------------

int run_validate(const Common& c) {
  json cfg = load_config(c.config_path);
  const json& kj = cfg.contains("kernel") ? cfg.at("kernel") : cfg;
  auto t0 = std::chrono::steady_clock::now();
  KernelAnalysis analysis = validate_kernel(kernel_spec_from_json(kj));
  Outputs out(c.out_dir);
  json res;
  res["accepted"] = true;
  res["d"] = analysis.dim();
  res["range"] = analysis.range();
  res["mean"] = analysis.mean_vector();
  if (analysis.dim() == 1) {
    res["sigma1_sq"] = analysis.sigma1sq();
    res["drift_b"] = analysis.drift_b();
  }
  json qtab = json::array();
  for (const auto& a : analysis.atoms(WalkKernel::Q))
    qtab.push_back({{"offset", a.offset}, {"prob", a.prob}});
  res["q"] = qtab;
  out.open("analysis.json") << res.dump(2) << "\n";
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_meta(out, "validate", c, cfg, secs);
  std::cout << res.dump(2) << "\n";
  return 0;
}

int run_simulate(const Common& c) {
  json cfg = load_config(c.config_path);
  auto t0 = std::chrono::steady_clock::now();
  KernelAnalysis analysis = kernel_from_config(cfg);
  NoiseModel noise = noise_from_config(cfg);
  const long t_final = cfg.at("t_final").get<long>();
  const int lo = cfg.at("window").at("lo").get<int>();
  const int hi = cfg.at("window").at("hi").get<int>();
  if (analysis.dim() != 1) throw ConfigError("simulate drives the d=1 trajectory dump");
  Box eval{Site{lo}, Site{hi}};

  InitialIncrementLaw law = cfg.contains("initial")
                                ? initial_law_from_json(cfg.at("initial"), analysis, noise)
                                : InitialIncrementLaw::flat(0.0);
  Box start = cone_window(analysis, eval, t_final);
  auto [eta0, h0] = law.sample_initial(start.lo[0] + 1, start.hi[0], c.seed, 0);

  Outputs out(c.out_dir);
  auto csv = out.open("trajectory.csv");
  csv << "t,x,h\n";
  HeightField cur = h0;
  auto dump = [&](const HeightField& h) {
    Box vis{Site{std::max(lo, h.box.lo[0])}, Site{std::min(hi, h.box.hi[0])}};
    for (int x = vis.lo[0]; x <= vis.hi[0]; ++x)
      csv << h.t << "," << x << "," << format_double(h.at(Site{x})) << "\n";
  };
  dump(cur);
  for (long t = 1; t <= t_final; ++t) {
    cur = evolve_height_step(cur, analysis, noise, c.seed, 0);
    dump(cur);
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_meta(out, "simulate", c, cfg, secs);
  return 0;
}

int run_invariant(const Common& c) {
  json cfg = load_config(c.config_path);
  auto t0 = std::chrono::steady_clock::now();
  KernelAnalysis analysis = kernel_from_config(cfg);
  NoiseModel noise = noise_from_config(cfg);
  if (analysis.dim() != 1) throw ConfigError("invariant experiment runs in d=1");
  const int lags = cfg.value("lags", 5);
  const int replicas = cfg.value("replicas", 20000);

  StationarySamplerConfig scfg;
  if (cfg.contains("sampler")) {
    scfg.depth = cfg.at("sampler").value("depth", scfg.depth);
    scfg.gaussian_closure = cfg.at("sampler").value("closure", scfg.gaussian_closure);
  }
  StationarySampler sampler(analysis, noise, scfg);
  LagCovariance mc = pi0_lag_covariance(sampler, lags, replicas, c.seed, c.threads);

  Outputs out(c.out_dir);
  auto csv = out.open("v0.csv");
  csv << "x,v0_fourier,v0_kernel,v0_mc,stderr\n";
  bool ok = true;
  double worst_route = 0.0, worst_z = 0.0;
  for (int x = 0; x <= lags; ++x) {
    double vf = v0(analysis, noise.variance, x, V0Method::Fourier);
    double vk = v0(analysis, noise.variance, x, V0Method::KernelA);
    worst_route = std::max(worst_route, std::abs(vf - vk));
    double z = (mc.est[static_cast<size_t>(x)] - vf) / mc.stderr_[static_cast<size_t>(x)];
    worst_z = std::max(worst_z, std::abs(z));
    csv << x << "," << format_double(vf) << "," << format_double(vk) << ","
        << format_double(mc.est[static_cast<size_t>(x)]) << ","
        << format_double(mc.stderr_[static_cast<size_t>(x)]) << "\n";
  }
  ok = worst_route <= 1e-6 && worst_z <= 3.0;

  json extra;
  extra["tail_bound"] = sampler.tail_bound();
  extra["sampler_depth"] = sampler.depth();
  extra["closure"] = sampler.closed();
  extra["worst_route_diff"] = worst_route;
  extra["worst_mc_z"] = worst_z;

  if (cfg.contains("probe")) {
    const auto& pj = cfg.at("probe");
    InitialIncrementLaw law = initial_law_from_json(pj.at("initial"), analysis, noise);
    std::vector<long> ts = pj.at("t_list").get<std::vector<long>>();
    int pr = pj.value("replicas", 2000);
    auto rows = convergence_probe(
        analysis, noise,
        [&](int lo, int hi, std::uint64_t seed, std::uint32_t replica) {
          return law.sample_eta(lo, hi, seed, replica);
        },
        ts, pr, c.seed + 1, c.threads);
    double v00 = v0(analysis, noise.variance, 0, V0Method::Fourier);
    auto pcsv = out.open("probe.csv");
    pcsv << "t,var,stderr,theory\n";
    for (const auto& r : rows)
      pcsv << r.t << "," << format_double(r.variance) << "," << format_double(r.stderr_) << ","
           << format_double(v00) << "\n";
  }

  if (cfg.contains("charfn")) {
    const auto& cj = cfg.at("charfn");
    double alpha = cj.value("alpha", 1.0);
    std::vector<long> ts = cj.at("t_list").get<std::vector<long>>();
    int cr = cj.value("replicas", 20000);
    auto rows = charfn_diagnostic(analysis, noise, alpha, ts, cr, c.seed + 2, c.threads);
    auto ccsv = out.open("charfn.csv");
    ccsv << "t,empirical,theory,stderr\n";
    for (const auto& r : rows)
      ccsv << r.t << "," << format_double(r.empirical) << "," << format_double(r.theory) << ","
           << format_double(r.boot_stderr) << "\n";
  }

  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_meta(out, "invariant", c, cfg, secs, extra);
  if (c.assert_mode && !ok) {
    std::cerr << "assertion failed: route diff " << worst_route << ", worst |z| " << worst_z << "\n";
    return 3;
  }
  return 0;
}

int run_fluct(const Common& c) {
  json cfg = load_config(c.config_path);
  auto t0 = std::chrono::steady_clock::now();
  KernelAnalysis analysis = kernel_from_config(cfg);
  NoiseModel noise = noise_from_config(cfg);
  InitialIncrementLaw law = initial_law_from_json(cfg.at("initial"), analysis, noise);
  FluctExperiment ex{analysis, noise, law, cfg.at("n").get<long>(), {}};
  for (const auto& p : cfg.at("points"))
    ex.points.push_back(SpaceTimePoint{p.at("t").get<double>(), p.at("r").get<double>()});
  const int replicas = cfg.at("replicas").get<int>();

  CovEstimate est = estimate_cov(ex, replicas, c.seed, c.threads);
  LimitParams params{analysis.sigma1sq(), noise.variance, law.rho0()};
  CompareReport rep = compare(est, params);

  Outputs out(c.out_dir);
  auto pcsv = out.open("points.csv");
  pcsv << "i,t,r\n";
  for (size_t i = 0; i < ex.points.size(); ++i)
    pcsv << i << "," << format_double(ex.points[i].t) << "," << format_double(ex.points[i].r) << "\n";
  auto csv = out.open("cov_estimate.csv");
  csv << "i,j,est,stderr,theory,z\n";
  for (const auto& e : rep.entries)
    csv << e.i << "," << e.j << "," << format_double(e.est) << "," << format_double(e.stderr_) << ","
        << format_double(e.theory) << "," << format_double(e.z) << "\n";

  json extra;
  extra["rho0"] = law.rho0();
  extra["max_abs_z"] = rep.max_abs_z;
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_meta(out, "fluct", c, cfg, secs, extra);
  if (c.assert_mode && !rep.all_within(3.0)) {
    std::cerr << "assertion failed: max |z| = " << rep.max_abs_z << "\n";
    return 3;
  }
  return 0;
}

int run_hydro(const Common& c) {
  json cfg = load_config(c.config_path);
  auto t0 = std::chrono::steady_clock::now();
  KernelAnalysis analysis = kernel_from_config(cfg);
  NoiseModel noise = noise_from_config(cfg);
  std::vector<long> ns = cfg.at("n_list").get<std::vector<long>>();
  double t = cfg.value("t", 1.0);
  double r_box = cfg.value("r_box", 2.0);

  std::function<double(double)> u0;
  std::string name = cfg.at("u0").at("name").get<std::string>();
  double amp = cfg.at("u0").value("amplitude", 1.0);
  double slope = cfg.at("u0").value("slope", 0.0);
  if (name == "sin")
    u0 = [amp](double x) { return amp * std::sin(x); };
  else if (name == "zero")
    u0 = [](double) { return 0.0; };
  else if (name == "linear")
    u0 = [slope](double x) { return slope * x; };
  else
    throw ConfigError("unknown u0 profile: " + name);

  auto rows = hydro_check(analysis, noise, u0, ns, t, r_box, c.seed);
  Outputs out(c.out_dir);
  auto csv = out.open("hydro.csv");
  csv << "n,sup_error\n";
  for (const auto& r : rows) csv << r.n << "," << format_double(r.sup_error) << "\n";

  bool decreasing = true;
  for (size_t i = 1; i < rows.size(); ++i)
    if (rows[i].sup_error >= rows[i - 1].sup_error) decreasing = false;
  double max_final = cfg.value("max_final_error", 0.05);
  bool ok = decreasing && rows.back().sup_error < max_final;

  json extra;
  extra["decreasing"] = decreasing;
  extra["final_error"] = rows.back().sup_error;
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_meta(out, "hydro", c, cfg, secs, extra);
  if (c.assert_mode && !ok) {
    std::cerr << "assertion failed: errors not decreasing below " << max_final << "\n";
    return 3;
  }
  return 0;
}

int run_scaling(const Common& c) {
  json cfg = load_config(c.config_path);
  auto t0 = std::chrono::steady_clock::now();
  KernelAnalysis analysis = kernel_from_config(cfg);
  NoiseModel noise = noise_from_config(cfg);
  std::vector<long> ts = cfg.at("t_list").get<std::vector<long>>();
  int replicas = cfg.value("replicas", 1000);

  ScalingReport rep = variance_scaling(analysis, noise, ts, replicas, c.seed, c.threads);
  Outputs out(c.out_dir);
  auto csv = out.open("scaling.csv");
  csv << "t,var_mc,stderr,var_exact\n";
  bool mc_ok = true;
  for (const auto& r : rep.rows) {
    csv << r.t << "," << format_double(r.mc) << "," << format_double(r.mc_stderr) << ","
        << format_double(r.exact) << "\n";
    if (std::abs(r.mc - r.exact) > 3.0 * r.mc_stderr) mc_ok = false;
  }
  double slope_tol = cfg.value("slope_tol", 0.02);
  bool ok = mc_ok && std::abs(rep.slope_exact - 0.5) <= slope_tol;

  json extra;
  extra["slope_exact"] = rep.slope_exact;
  extra["slope_mc"] = rep.slope_mc;
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_meta(out, "scaling", c, cfg, secs, extra);
  if (c.assert_mode && !ok) {
    std::cerr << "assertion failed: slope_exact = " << rep.slope_exact << ", mc within 3se: " << mc_ok
              << "\n";
    return 3;
  }
  return 0;
}

int run_limits(const Common& c) {
  json cfg = load_config(c.config_path);
  auto t0 = std::chrono::steady_clock::now();
  LimitParams params;
  params.sigma1_sq = cfg.value("sigma1_sq", 0.25);
  params.sigma_xi_sq = cfg.value("sigma_xi_sq", 1.0);
  params.rho0 = cfg.contains("rho0") ? cfg.at("rho0").get<double>()
                                     : params.sigma_xi_sq / params.sigma1_sq;
  std::vector<SpaceTimePoint> pts;
  if (cfg.contains("points")) {
    for (const auto& p : cfg.at("points"))
      pts.push_back(SpaceTimePoint{p.at("t").get<double>(), p.at("r").get<double>()});
  } else {
    for (double t : {0.25, 0.5, 1.0, 2.0})
      for (double r : {-1.0, 0.0, 1.0}) pts.push_back(SpaceTimePoint{t, r});
  }

  Outputs out(c.out_dir);
  auto csv = out.open("limits.csv");
  csv << "s,q,t,r,gamma1,gamma2,zcov\n";
  for (const auto& a : pts)
    for (const auto& b : pts) {
      double g1 = gamma1(a, b, params.sigma1_sq);
      double g2 = gamma2(a, b, params.sigma1_sq);
      double zc = params.sigma_xi_sq / params.sigma1_sq * g1 + params.rho0 * g2;
      csv << format_double(a.t) << "," << format_double(a.r) << "," << format_double(b.t) << ","
          << format_double(b.r) << "," << format_double(g1) << "," << format_double(g2) << ","
          << format_double(zc) << "\n";
    }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_meta(out, "limits", c, cfg, secs);
  return 0;
}

json error_json(const std::string& kind, const std::string& what, const std::string& reason = "") {
  json j;
  j["error"] = kind;
  j["message"] = what;
  if (!reason.empty()) j["reason"] = reason;
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"harness process lab: exact kernel analytics and Monte Carlo experiments"};
  app.require_subcommand(1);

  Common c;
  std::string chosen;
  for (const char* name : {"validate", "simulate", "invariant", "fluct", "hydro", "scaling", "limits"}) {
    CLI::App* sub = app.add_subcommand(name);
    add_common(sub, c);
    sub->callback([&chosen, name]() { chosen = name; });
  }

  CLI11_PARSE(app, argc, argv);

  try {
    if (chosen == "validate") return run_validate(c);
    if (chosen == "simulate") return run_simulate(c);
    if (chosen == "invariant") return run_invariant(c);
    if (chosen == "fluct") return run_fluct(c);
    if (chosen == "hydro") return run_hydro(c);
    if (chosen == "scaling") return run_scaling(c);
    if (chosen == "limits") return run_limits(c);
    std::cerr << "unknown subcommand\n";
    return 2;
  } catch (const RejectedKernel& e) {
    std::cout << error_json("rejected-kernel", e.what(), to_string(e.reason())).dump(2) << "\n";
    return 2;
  } catch (const Error& e) {
    std::cout << error_json("config-error", e.what()).dump(2) << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cout << error_json("internal-error", e.what()).dump(2) << "\n";
    return 2;
  }
}
