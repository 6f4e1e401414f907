#include "decoh/cli/app.hpp"

#include <filesystem>

#include "CLI11.hpp"
#include "decoh/cli/analysis.hpp"
#include "decoh/cli/config.hpp"
#include "decoh/cli/csv.hpp"
#include "decoh/cli/plot.hpp"
#include "decoh/cli/sweep.hpp"
#include "decoh/cli/verify.hpp"

namespace decoh::cli {

namespace fs = std::filesystem;

namespace {

struct SweepArgs {
  std::string config;
  std::string out;
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::string backend;
  std::optional<int> chi_max;
  bool resume = false;
  bool quiet = false;
};

struct FitArgs {
  std::string input;
  std::string out = "results";
  std::string windows;
  int width = 3;
};

struct CollapseArgs {
  std::string input;
  std::string out = "results";
  double pc = 0.4, nu = 2.0, zeta = 0.0;
  scaling::CollapseBounds bounds;
  std::optional<double> p_min, p_max;
  int restarts = 16;
  std::uint64_t seed = 1;
  std::string model, channel;
  std::optional<double> delta;
};

struct VerifyArgs {
  std::string model = "tfim";
  double delta = 0.45;
  std::vector<int> sizes = {6, 8};
  int chi_max = 64;
  std::uint64_t seed = 1;
  std::string out;
  bool no_mps = false;
  bool no_invariants = false;
  bool corrupt_state = false;
};

struct PlotArgs {
  std::string input = "results";
  std::string out;
};

int do_sweep(const SweepArgs& a, std::ostream& out) {
  SweepOverrides o;
  o.workers = a.workers;
  o.seed = a.seed;
  o.chi_max = a.chi_max;
  if (!a.backend.empty()) o.backend = parse_backend(a.backend);
  if (!a.out.empty()) o.out_dir = a.out;
  const SweepConfig c = apply_overrides(load_config(a.config), o);
  const SweepSummary s = run_sweep(c, a.resume, a.quiet ? nullptr : &out);
  out << "sweep: " << s.ok << " ok, " << s.failed << " failed of " << s.points << " points";
  if (s.resumed) out << " (" << s.resumed << " from the earlier run)";
  out << "\n  " << s.csv.string() << "\n  " << s.manifest.string() << "\n";
  return s.failed > 0 ? kExitNumerical : kExitOk;
}

int do_fit(const FitArgs& a, std::ostream& out) {
  FitCommandOptions o;
  o.out_dir = a.out;
  o.sweep_csv = a.input.empty() ? fs::path(a.out) / kSweepCsv : fs::path(a.input);
  o.window_width = a.width;
  if (!a.windows.empty()) {
    for (const auto& w : split_fields(a.windows)) o.windows.push_back(scaling::parse_window_label(w));
  }
  const auto s = run_fit(o);
  out << "fit: " << s.fits << " fits, " << s.extrapolations << " extrapolations";
  if (s.skipped_windows) out << ", " << s.skipped_windows << " windows skipped";
  out << "\n  " << (fs::path(a.out) / kFitsCsv).string() << "\n";
  return kExitOk;
}

int do_collapse(const CollapseArgs& a, std::ostream& out) {
  CollapseCommandOptions o;
  o.out_dir = a.out;
  o.fits_csv = a.input.empty() ? fs::path(a.out) / kFitsCsv : fs::path(a.input);
  o.init = {a.pc, a.nu, a.zeta};
  o.bounds = a.bounds;
  o.collapse.restarts = a.restarts;
  o.collapse.seed = a.seed;
  if (a.p_min || a.p_max) o.collapse.p_window = std::pair{a.p_min.value_or(0.0), a.p_max.value_or(0.5)};
  if (!a.model.empty()) o.model = a.model;
  if (!a.channel.empty()) o.channel = a.channel;
  o.delta = a.delta;
  const auto r = run_collapse(o);
  out << "collapse: p_c=" << format_double(r.p_c) << " nu=" << format_double(r.nu)
      << " zeta=" << format_double(r.zeta) << " quality=" << format_double(r.quality) << "\n  "
      << (fs::path(a.out) / kCollapseJson).string() << "\n";
  return kExitOk;
}

int do_verify(const VerifyArgs& a, std::ostream& out) {
  VerifyOptions o;
  o.model = parse_model_kind(a.model);
  o.delta = a.delta;
  o.sizes = a.sizes;
  o.chi_max = a.chi_max;
  o.seed = a.seed;
  o.mps = !a.no_mps;
  o.channel_invariants = !a.no_invariants;
  o.corrupt_state = a.corrupt_state;
  const VerifyReport report = run_verify(o);
  for (const auto& c : report.checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << " L=" << c.L
        << " value=" << format_double(c.value) << " tol=" << format_double(c.tolerance);
    if (!c.pass && !c.detail.empty()) out << "  (" << c.detail << ")";
    out << "\n";
  }
  if (!a.out.empty()) {
    fs::create_directories(a.out);
    write_verify_json(report, fs::path(a.out) / kVerifyJson);
  }
  out << "verify: " << report.checks.size() - report.failures() << "/" << report.checks.size()
      << " checks passed\n";
  return report.passed() ? kExitOk : kExitVerification;
}

int do_plot(const PlotArgs& a, std::ostream& out) {
  for (const auto& f : run_plot(a.input, a.out)) out << f.string() << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Strong-to-weak decoherence sweeps, fits and finite-size scaling", "decoh"};
  app.require_subcommand(1);
  app.set_version_flag("--version", tool_version());

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "run the (L, p) grid of a config file");
  sweep->add_option("--config", sw.config, "config file (INI)")->required();
  sweep->add_option("--out", sw.out, "output directory (overrides config and DECOH_OUT_DIR)");
  sweep->add_option("--workers", sw.workers, "worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", sw.seed, "ground-state seed");
  sweep->add_option("--backend", sw.backend, "dense, mps or auto");
  sweep->add_option("--chi-max", sw.chi_max, "MPS bond dimension")->check(CLI::PositiveNumber);
  sweep->add_flag("--resume", sw.resume, "continue an interrupted run in the output directory");
  sweep->add_flag("--quiet", sw.quiet, "no per-point log");

  FitArgs ft;
  auto* fit = app.add_subcommand("fit", "fit S_SE = alpha L - s0 per p and size window");
  fit->add_option("--input", ft.input, "sweep CSV (default OUT/see_sweep.csv)");
  fit->add_option("--out", ft.out, "output directory");
  fit->add_option("--windows", ft.windows, "comma-separated windows, e.g. 6-8-10,8-10-12");
  fit->add_option("--width", ft.width, "sizes per default window")->check(CLI::Range(3, 32));

  CollapseArgs cl;
  auto* collapse = app.add_subcommand("collapse", "finite-size-scaling collapse of e^{s0}");
  collapse->add_option("--input", cl.input, "fits CSV (default OUT/fits.csv)");
  collapse->add_option("--out", cl.out, "output directory");
  collapse->add_option("--pc", cl.pc, "initial p_c");
  collapse->add_option("--nu", cl.nu, "initial nu");
  collapse->add_option("--zeta", cl.zeta, "initial zeta");
  collapse->add_option("--pc-min", cl.bounds.p_c_min);
  collapse->add_option("--pc-max", cl.bounds.p_c_max);
  collapse->add_option("--nu-min", cl.bounds.nu_min);
  collapse->add_option("--nu-max", cl.bounds.nu_max);
  collapse->add_option("--zeta-min", cl.bounds.zeta_min);
  collapse->add_option("--zeta-max", cl.bounds.zeta_max);
  collapse->add_option("--p-min", cl.p_min, "drop points below this p");
  collapse->add_option("--p-max", cl.p_max, "drop points above this p");
  collapse->add_option("--restarts", cl.restarts)->check(CLI::PositiveNumber);
  collapse->add_option("--seed", cl.seed);
  collapse->add_option("--model", cl.model);
  collapse->add_option("--delta", cl.delta);
  collapse->add_option("--channel", cl.channel);

  VerifyArgs vf;
  auto* verify = app.add_subcommand("verify", "identity suite and MPS equivalence");
  verify->add_option("--model", vf.model, "tfim or xxz");
  verify->add_option("--delta", vf.delta, "XXZ anisotropy");
  verify->add_option("--L", vf.sizes, "system sizes")->delimiter(',');
  verify->add_option("--chi-max", vf.chi_max)->check(CLI::PositiveNumber);
  verify->add_option("--seed", vf.seed);
  verify->add_option("--out", vf.out, "directory for verify.json");
  verify->add_flag("--no-mps", vf.no_mps, "skip the MPS checks");
  verify->add_flag("--no-invariants", vf.no_invariants, "skip the p-grid channel checks");
  verify->add_flag("--corrupt-state", vf.corrupt_state,
                   "perturb the ground state (the sign check must fail)");

  PlotArgs pl;
  auto* plot = app.add_subcommand("plot", "emit plotting scripts and tidy data");
  plot->add_option("--input", pl.input, "results directory");
  plot->add_option("--out", pl.out, "script directory (default INPUT/plots)");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << tool_version() << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "decoh: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (sweep->parsed()) return do_sweep(sw, out);
    if (fit->parsed()) return do_fit(ft, out);
    if (collapse->parsed()) return do_collapse(cl, out);
    if (verify->parsed()) return do_verify(vf, out);
    if (plot->parsed()) return do_plot(pl, out);
  } catch (const InvalidInput& e) {
    err << "decoh: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalFailure& e) {
    err << "decoh: numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "decoh: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitConfig;
}

}  // namespace decoh::cli
