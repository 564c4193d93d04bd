// osc-lab: experiment driver for the oscillation-functional laboratory.
//
// Subcommands: measure check, fn check, theta, martingale, lil,
// kernel report, kernel compare, sharpness.  Exit codes: 0 ok, 1 assertion
// failure, 2 configuration error, 3 quadrature budget exhaustion; every
// failure also emits a one-line JSON error report on stderr.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "osclab/experiments.hpp"
#include "osclab/json_io.hpp"
#include "osclab/version.hpp"

using namespace osclab;
using nlohmann::json;

namespace {

constexpr int kExitAssertion = 1;
constexpr int kExitConfig = 2;
constexpr int kExitBudget = 3;

void emit_error(int code, const std::string& kind, const std::string& message) {
  json err;
  err["error"] = {{"code", code}, {"kind", kind}, {"message", message}};
  std::cerr << err.dump() << "\n";
}

// "2^-1..2^-14", a comma list, or a single value
std::vector<double> parse_eps_grid(const std::string& spec) {
  std::vector<double> out;
  const auto dots = spec.find("..");
  if (dots != std::string::npos && spec.rfind("2^-", 0) == 0) {
    const int a = std::stoi(spec.substr(3, dots - 3));
    const auto second = spec.substr(dots + 2);
    if (second.rfind("2^-", 0) != 0)
      throw std::runtime_error("eps grid: expected 2^-a..2^-b");
    const int b = std::stoi(second.substr(3));
    for (int n = std::min(a, b); n <= std::max(a, b); ++n)
      out.push_back(std::ldexp(1.0, -n));
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
  }
  size_t pos = 0;
  while (pos < spec.size()) {
    const size_t comma = spec.find(',', pos);
    const std::string tok = spec.substr(pos, comma - pos);
    out.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) throw std::runtime_error("eps grid: empty");
  return out;
}

long long env_budget(long long fallback) {
  if (const char* v = std::getenv("OSC_LAB_BUDGET")) {
    const long long b = std::atoll(v);
    if (b > 0) return b;
  }
  return fallback;
}

struct OutputSink {
  std::string out_path;
  bool want_svg = false;

  void deliver(const ExperimentOutcome& result, const json& config,
               const std::string& title) const {
    if (!out_path.empty()) {
      CsvWriter csv(out_path, result.csv_header);
      for (const auto& row : result.csv_rows) csv.row(row);
      write_manifest(out_path, config);
      if (want_svg && !result.plot.empty())
        svg_line_chart(out_path + ".svg", title, result.plot_xlabel,
                       result.plot_ylabel, result.plot, result.plot_log_x,
                       result.plot_log_y);
    }
    for (const auto& line : result.summary) std::cout << line << "\n";
  }

  int exit_code(const ExperimentOutcome& result) const {
    if (!result.budget_ok) {
      emit_error(kExitBudget, "budget", "quadrature evaluation budget exhausted");
      return kExitBudget;
    }
    if (!result.pass) {
      emit_error(kExitAssertion, "assertion", "experiment assertion failed");
      return kExitAssertion;
    }
    return 0;
  }
};

std::vector<double> seeded_samples(int count, uint64_t seed, double lo, double hi) {
  SplitMix64 rng(seed);
  std::vector<double> xs;
  for (int i = 0; i < count; ++i) xs.push_back(rng.uniform(lo, hi));
  return xs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"osc-lab: oscillation functionals, dyadic martingales and "
               "Calderon-Zygmund kernels"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  int threads = default_threads();
  app.add_option("--threads", threads, "worker threads for sweeps");
  app.fallthrough();  // lets subcommands pass --threads up to the app

  int exit_code = 0;

  // measure check ------------------------------------------------------------
  auto* measure_cmd = app.add_subcommand("measure", "measure utilities");
  measure_cmd->require_subcommand(1);
  auto* measure_check = measure_cmd->add_subcommand("check", "moment vanishing");
  static std::string mc_file;
  static int mc_order = 0;
  static OutputSink mc_sink;
  measure_check->add_option("--file", mc_file, "measure descriptor")->required();
  measure_check->add_option("--order", mc_order, "max degree")->required();
  measure_check->add_option("--out", mc_sink.out_path, "CSV output");
  measure_check->callback([&] {
    const SignedMeasure sigma = load_measure(mc_file);
    const ExperimentOutcome r = run_moments(sigma, mc_order);
    mc_sink.deliver(r, {{"experiment", "moments"}, {"file", mc_file},
                        {"order", mc_order}},
                    "moment check");
    exit_code = mc_sink.exit_code(r);
  });

  // fn check -------------------------------------------------------------
  auto* fn_cmd = app.add_subcommand("fn", "function utilities");
  fn_cmd->require_subcommand(1);
  auto* fn_check = fn_cmd->add_subcommand("check", "smoothness-class membership");
  static std::string fc_file;
  static int fc_m = 0, fc_ell = 1;
  static double fc_alpha = 0.5;
  static OutputSink fc_sink;
  fn_check->add_option("--file", fc_file, "function descriptor")->required();
  fn_check->add_option("--m", fc_m, "derivative order");
  fn_check->add_option("--alpha", fc_alpha, "Hoelder exponent")->required();
  fn_check->add_option("--ell", fc_ell, "difference order")->required();
  fn_check->add_option("--out", fc_sink.out_path, "CSV output");
  fn_check->add_flag("--svg", fc_sink.want_svg, "write <out>.svg");
  fn_check->callback([&] {
    const FunctionSpec f = load_function(fc_file);
    const ExperimentOutcome r = run_fn_check(f, fc_m, fc_alpha, fc_ell);
    fc_sink.deliver(r, {{"experiment", "fn-check"}, {"file", fc_file},
                        {"m", fc_m}, {"alpha", fc_alpha}, {"ell", fc_ell}},
                    "membership check");
    exit_code = fc_sink.exit_code(r);
  });

  // theta ---------------------------------------------------------------
  auto* theta_cmd = app.add_subcommand("theta", "oscillation functional");
  static std::string th_fn, th_measure, th_grid;
  static double th_x = 0.0, th_eps = 0.01, th_alpha = 0.5, th_tol = 1e-8;
  static int th_m = 0, th_samples = 0;
  static uint64_t th_seed = 1;
  static OutputSink th_sink;
  theta_cmd->add_option("--fn", th_fn, "function descriptor")->required();
  theta_cmd->add_option("--measure", th_measure, "measure descriptor")->required();
  theta_cmd->add_option("--x", th_x, "evaluation point");
  theta_cmd->add_option("--eps", th_eps, "lower cutoff");
  theta_cmd->add_option("--eps-grid", th_grid, "eps grid, e.g. 2^-4..2^-16");
  theta_cmd->add_option("--m", th_m, "derivative order");
  theta_cmd->add_option("--alpha", th_alpha, "Hoelder exponent")->required();
  theta_cmd->add_option("--quad-tol", th_tol, "quadrature tolerance");
  theta_cmd->add_option("--samples", th_samples, "seeded x samples (sweep)");
  theta_cmd->add_option("--seed", th_seed, "sample seed");
  theta_cmd->add_option("--out", th_sink.out_path, "CSV output");
  theta_cmd->add_flag("--svg", th_sink.want_svg, "write <out>.svg");
  theta_cmd->callback([&] {
    const FunctionSpec f = load_function(th_fn);
    const SignedMeasure sigma = load_measure(th_measure);
    const long long budget = env_budget(1'000'000);
    const std::vector<double> eps_grid =
        th_grid.empty() ? std::vector<double>{th_eps} : parse_eps_grid(th_grid);
    const std::vector<double> xs = th_samples > 0
                                       ? seeded_samples(th_samples, th_seed, 0, 1)
                                       : std::vector<double>{th_x};
    const ExperimentOutcome r = run_theta_sweep(f, sigma, xs, eps_grid, th_m,
                                                th_alpha, th_tol, budget, threads);
    if (xs.size() == 1 && eps_grid.size() == 1 && !r.csv_rows.empty()) {
      std::cout << "theta = " << csv_format(r.csv_rows[0][2])
                << "  (error estimate " << csv_format(r.csv_rows[0][3])
                << ", evals " << csv_format(r.csv_rows[0][4]) << ")\n";
    }
    th_sink.deliver(r, {{"experiment", "theta-sweep"}, {"fn", th_fn},
                        {"measure", th_measure}, {"m", th_m}, {"alpha", th_alpha},
                        {"quad_tol", th_tol}, {"seed", th_seed},
                        {"samples", th_samples}, {"eps_grid", th_grid},
                        {"eps", th_eps}, {"x", th_x}},
                    "theta sweep");
    exit_code = th_sink.exit_code(r);
  });

  // martingale ------------------------------------------------------------
  auto* mart_cmd = app.add_subcommand("martingale", "dyadic martingale build");
  static std::string ma_fn, ma_measure;
  static int ma_nmax = 10, ma_m = 0;
  static double ma_alpha = 0.5, ma_tol = 1e-8;
  static uint64_t ma_seed = 1;
  static OutputSink ma_sink;
  mart_cmd->add_option("--fn", ma_fn, "function descriptor")->required();
  mart_cmd->add_option("--measure", ma_measure, "measure descriptor")->required();
  mart_cmd->add_option("--nmax", ma_nmax, "deepest generation")->required();
  mart_cmd->add_option("--m", ma_m, "derivative order");
  mart_cmd->add_option("--alpha", ma_alpha, "Hoelder exponent")->required();
  mart_cmd->add_option("--quad-tol", ma_tol, "quadrature tolerance");
  mart_cmd->add_option("--seed", ma_seed, "comparison sample seed");
  mart_cmd->add_option("--out", ma_sink.out_path, "CSV output");
  mart_cmd->callback([&] {
    const FunctionSpec f = load_function(ma_fn);
    const SignedMeasure sigma = load_measure(ma_measure);
    const ExperimentOutcome r =
        run_martingale(f, sigma, ma_nmax, ma_m, ma_alpha, ma_tol, ma_seed,
                       threads, env_budget(400'000));
    ma_sink.deliver(r, {{"experiment", "martingale"}, {"fn", ma_fn},
                        {"measure", ma_measure}, {"nmax", ma_nmax}, {"m", ma_m},
                        {"alpha", ma_alpha}, {"quad_tol", ma_tol},
                        {"seed", ma_seed}},
                    "martingale diagnostics");
    exit_code = ma_sink.exit_code(r);
  });

  // lil ---------------------------------------------------------------------
  auto* lil_cmd = app.add_subcommand("lil", "law of the iterated logarithm");
  static std::string li_fn, li_measure, li_mode = "theta";
  static int li_nmax = 16, li_m = 0, li_samples = 256;
  static double li_alpha = 0.5, li_tol = 1e-8;
  static uint64_t li_seed = 1;
  static OutputSink li_sink;
  lil_cmd->add_option("--mode", li_mode, "theta | martingale")
      ->check(CLI::IsMember({"theta", "martingale"}));
  lil_cmd->add_option("--fn", li_fn, "function descriptor")->required();
  lil_cmd->add_option("--measure", li_measure, "measure descriptor")->required();
  lil_cmd->add_option("--nmax", li_nmax, "deepest generation");
  lil_cmd->add_option("--m", li_m, "derivative order");
  lil_cmd->add_option("--alpha", li_alpha, "Hoelder exponent")->required();
  lil_cmd->add_option("--quad-tol", li_tol, "quadrature tolerance");
  lil_cmd->add_option("--samples", li_samples, "seeded x samples");
  lil_cmd->add_option("--seed", li_seed, "sample seed");
  lil_cmd->add_option("--out", li_sink.out_path, "CSV output");
  lil_cmd->add_flag("--svg", li_sink.want_svg, "write <out>.svg");
  lil_cmd->callback([&] {
    const FunctionSpec f = load_function(li_fn);
    const SignedMeasure sigma = load_measure(li_measure);
    LilConfig cfg;
    cfg.mode = (li_mode == "theta") ? LilMode::theta : LilMode::martingale;
    cfg.n_min = (cfg.mode == LilMode::theta) ? 4 : 3;
    cfg.n_max = li_nmax;
    cfg.samples = li_samples;
    cfg.seed = li_seed;
    cfg.quad_tol = li_tol;
    cfg.budget = env_budget(1'000'000);
    cfg.threads = threads;
    const ExperimentOutcome r = run_lil(f, sigma, li_m, li_alpha, cfg);
    li_sink.deliver(r, {{"experiment", "lil"}, {"mode", li_mode}, {"fn", li_fn},
                        {"measure", li_measure}, {"nmax", li_nmax}, {"m", li_m},
                        {"alpha", li_alpha}, {"quad_tol", li_tol},
                        {"samples", li_samples}, {"seed", li_seed}},
                    "LIL ratio vs n");
    exit_code = li_sink.exit_code(r);
  });

  // kernel --------------------------------------------------------------
  auto* kernel_cmd = app.add_subcommand("kernel", "Calderon-Zygmund kernel");
  kernel_cmd->require_subcommand(1);

  auto* kr = kernel_cmd->add_subcommand("report", "size/smoothness/cancellation");
  static std::string kr_measure, kr_out;
  kr->add_option("--measure", kr_measure, "measure descriptor")->required();
  kr->add_option("--out", kr_out, "JSON report output");
  kr->callback([&] {
    const SignedMeasure sigma = load_measure(kr_measure);
    const KernelPropertyReport rep = kernel_report(sigma);
    json j;
    j["M"] = rep.M;
    j["total_variation"] = rep.total_variation;
    j["sup_tK0"] = rep.sup_tK0;
    j["sup_t2dK0"] = rep.sup_t2dK0;
    j["cancel_sup"] = rep.cancel_sup;
    j["A1"] = rep.A1;
    j["A2"] = rep.A2;
    j["A3"] = rep.A3;
    j["deriv_fd_mismatch"] = rep.deriv_fd_mismatch;
    j["bounds_applicable"] = rep.bounds_applicable;
    j["size_pass"] = rep.size_pass;
    j["smoothness_pass"] = rep.smoothness_pass;
    j["cancellation_pass"] = rep.cancellation_pass;
    if (!kr_out.empty()) {
      std::ofstream out(kr_out, std::ios::binary);
      out << j.dump(2) << "\n";
      write_manifest(kr_out, {{"experiment", "kernel-report"},
                              {"measure", kr_measure}});
    }
    std::cout << j.dump(2) << "\n";
    if (rep.bounds_applicable &&
        !(rep.size_pass && rep.smoothness_pass && rep.cancellation_pass)) {
      emit_error(kExitAssertion, "assertion", "kernel bound violated");
      exit_code = kExitAssertion;
    }
  });

  auto* kc = kernel_cmd->add_subcommand("compare", "theta_tilde vs transform");
  static std::string kc_fn, kc_measure, kc_grid = "2^-1..2^-14";
  static double kc_tol = 1e-8;
  static int kc_samples = 17;
  static uint64_t kc_seed = 1;
  static OutputSink kc_sink;
  kc->add_option("--fn", kc_fn, "function descriptor")->required();
  kc->add_option("--measure", kc_measure, "measure descriptor")->required();
  kc->add_option("--eps-grid", kc_grid, "eps grid, e.g. 2^-1..2^-14");
  kc->add_option("--quad-tol", kc_tol, "quadrature tolerance");
  kc->add_option("--samples", kc_samples, "x-grid size over the support");
  kc->add_option("--seed", kc_seed, "unused, recorded in the manifest");
  kc->add_option("--out", kc_sink.out_path, "CSV output");
  kc->add_flag("--svg", kc_sink.want_svg, "write <out>.svg");
  kc->callback([&] {
    const FunctionSpec f = load_function(kc_fn);
    const SignedMeasure sigma = load_measure(kc_measure);
    if (!f.support_interval())
      throw std::runtime_error("kernel compare: f must be compactly supported");
    const auto [lo, hi] = *f.support_interval();
    const KernelEngine eng(sigma);
    std::vector<double> xs;
    for (int i = 0; i < kc_samples; ++i)
      xs.push_back(lo - eng.M() +
                   (hi - lo + 2.0 * eng.M()) * i / std::max(1, kc_samples - 1));
    const ExperimentOutcome r = run_kernel_compare(
        f, sigma, parse_eps_grid(kc_grid), xs, kc_tol, threads,
        env_budget(1'000'000));
    kc_sink.deliver(r, {{"experiment", "kernel-compare"}, {"fn", kc_fn},
                        {"measure", kc_measure}, {"eps_grid", kc_grid},
                        {"quad_tol", kc_tol}, {"samples", kc_samples}},
                    "CZ comparison");
    exit_code = kc_sink.exit_code(r);
  });

  // sharpness -----------------------------------------------------------
  auto* sharp_cmd = app.add_subcommand("sharpness", "Zygmund sharpness (Upsilon)");
  static double sh_b = 2.0, sh_tol = 1e-8;
  static int sh_nmax = 16, sh_samples = 256;
  static uint64_t sh_seed = 1;
  static OutputSink sh_sink;
  sharp_cmd->add_option("--b", sh_b, "lacunary base (>= 1.1)");
  sharp_cmd->add_option("--nmax", sh_nmax, "finest eps = 2^-nmax");
  sharp_cmd->add_option("--samples", sh_samples, "seeded x samples");
  sharp_cmd->add_option("--seed", sh_seed, "sample seed");
  sharp_cmd->add_option("--quad-tol", sh_tol, "quadrature tolerance");
  sharp_cmd->add_option("--out", sh_sink.out_path, "CSV output");
  sharp_cmd->add_flag("--svg", sh_sink.want_svg, "write <out>.svg");
  sharp_cmd->callback([&] {
    if (sh_b < 1.1)
      throw std::runtime_error("sharpness: b >= 1.1 (N(eps) blows up near 1)");
    SharpnessConfig cfg;
    cfg.b = sh_b;
    cfg.quad_tol = sh_tol;
    for (int n = 4; n <= sh_nmax; ++n) cfg.eps_grid.push_back(std::ldexp(1.0, -n));
    cfg.xs = seeded_samples(sh_samples, sh_seed, 0.0, 2.0 * M_PI);
    const ExperimentOutcome r = run_sharpness(cfg);
    sh_sink.deliver(r, {{"experiment", "sharpness"}, {"b", sh_b},
                        {"nmax", sh_nmax}, {"samples", sh_samples},
                        {"seed", sh_seed}, {"quad_tol", sh_tol}},
                    "lacunary gap vs n");
    exit_code = sh_sink.exit_code(r);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() != 0)
      emit_error(kExitConfig, "config", e.what());
    return e.get_exit_code() == 0 ? 0 : kExitConfig;
  } catch (const std::invalid_argument& e) {
    emit_error(kExitConfig, "config", e.what());
    return kExitConfig;
  } catch (const std::runtime_error& e) {
    emit_error(kExitConfig, "config", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    emit_error(kExitConfig, "config", e.what());
    return kExitConfig;
  }
  return exit_code;
}
