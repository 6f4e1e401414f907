#include <gtest/gtest.h>
#include <unistd.h>

#include <cmath>
#include <fstream>
#include <sstream>

#include "decoh/cli/analysis.hpp"
#include "decoh/cli/app.hpp"
#include "decoh/cli/config.hpp"
#include "decoh/cli/csv.hpp"
#include "decoh/cli/plot.hpp"
#include "decoh/cli/sweep.hpp"
#include "decoh/cli/verify.hpp"
#include "json.hpp"

namespace {

namespace fs = std::filesystem;
using namespace decoh::cli;

const char* kTfimConfig = R"([model]
name = tfim
boundary = periodic

[channel]
kind = zz
p = 0, 0.25, 0.5

[sweep]
L = 4, 6, 8
seed = 3
)";

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("decoh_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter_++));
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  static inline int counter_ = 0;
  fs::path path_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void spit(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
}

int cli(std::vector<std::string> args, std::string* err_text = nullptr) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  if (err_text) *err_text = err.str();
  return code;
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) out.push_back(line);
  return out;
}

TEST(Csv, SeventeenSignificantDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(0.5), "0.5");
  EXPECT_EQ(format_double(-0.0), "0");
  EXPECT_EQ(format_double(1.0 / 3.0), "0.33333333333333331");
  EXPECT_EQ(std::stod(format_double(M_PI)), M_PI);
  EXPECT_EQ(split_fields("a,,b"), (std::vector<std::string>{"a", "", "b"}));
}

TEST(Config, ParsesAndNormalizes) {
  const SweepConfig c = parse_config(R"([model]
name = XXZ
delta = 0.45
boundary = open
[channel]
kind = x+zz
p_linspace = 0, 0.5, 5
[sweep]
L = 8, 6, 8
backend = dense
)");
  EXPECT_EQ(c.model, decoh::ModelKind::Xxz);
  EXPECT_EQ(c.boundary, decoh::Boundary::Open);
  EXPECT_EQ(c.channel, decoh::ChannelKind::XplusZZ);
  EXPECT_EQ(c.p_grid, (std::vector<double>{0.0, 0.125, 0.25, 0.375, 0.5}));
  EXPECT_EQ(c.sizes, (std::vector<int>{6, 8}));
  EXPECT_EQ(c.backend, decoh::Backend::Dense);
}

TEST(Config, DiagnosticsNameLineAndField) {
  auto message = [](const std::string& text) {
    try {
      parse_config(text, "bad.ini");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string("no error");
  };
  const std::string base = "[model]\nname = tfim\n[channel]\nkind = zz\n";
  EXPECT_NE(message(base + "p = 0, 0.7\n[sweep]\nL = 6\n").find("bad.ini:5: [channel] p"),
            std::string::npos);
  EXPECT_NE(message(base + "p = 0.1\n[sweep]\nL = 6\ncolour = red\n").find("bad.ini:8"),
            std::string::npos);
  EXPECT_NE(message(base + "p = 0.1\n[sweep]\nL = 6, x\n").find("[sweep] L"), std::string::npos);
  EXPECT_NE(message(base + "p = 0.1\n").find("missing required key [sweep] L"),
            std::string::npos);
  EXPECT_NE(message(base + "p = 0.1\np_linspace = 0, 0.5, 3\n[sweep]\nL = 6\n").find("exactly one"),
            std::string::npos);
  EXPECT_NE(message("[model]\nname = tfim\n[[broken\n").find("bad.ini:3"), std::string::npos);
  // Periodic chains beyond the dense limit have no backend.
  EXPECT_NE(message(base + "p = 0.1\n[sweep]\nL = 14\n").find("open boundaries"),
            std::string::npos);
  EXPECT_NE(message(base + "p = 0.1\n[sweep]\nL = 14\nbackend = dense\n").find("dense limit"),
            std::string::npos);
}

TEST(Config, HashIgnoresKeyOrderAndPresentation) {
  const SweepConfig a = parse_config(kTfimConfig);
  const SweepConfig b = parse_config(R"([sweep]
seed = 3
L = 8,4,6
workers = 7
[channel]
p = 0.5, 0.25, 0.0
kind = ZZ
[model]
boundary = periodic
name = tfim
[output]
dir = elsewhere
)");
  EXPECT_EQ(config_hash(a), config_hash(b));
  SweepConfig c = a;
  c.seed = 4;
  EXPECT_NE(config_hash(a), config_hash(c));
  EXPECT_EQ(config_hash(a).size(), 64u);
  EXPECT_EQ(sha256_hex("abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

TEST(Config, AutoBackendUsesDenseLimit) {
  SweepConfig c = parse_config(R"([model]
name = tfim
boundary = open
[channel]
kind = zz
p = 0.1
[sweep]
L = 6, 14
)");
  EXPECT_EQ(resolve_backend(c, 12), decoh::Backend::Dense);
  EXPECT_EQ(resolve_backend(c, 14), decoh::Backend::Mps);
  c.dense_limit = 8;
  EXPECT_EQ(resolve_backend(c, 10), decoh::Backend::Mps);
}

TEST(Sweep, DeterministicAcrossRunsAndWorkerCounts) {
  TempDir dir;
  SweepConfig c = parse_config(kTfimConfig);
  c.out_dir = dir.path() / "a";
  run_sweep(c);
  c.out_dir = dir.path() / "b";
  c.workers = 4;
  run_sweep(c);
  const std::string a = slurp(dir.path() / "a" / kSweepCsv);
  EXPECT_EQ(a, slurp(dir.path() / "b" / kSweepCsv));

  const auto rows = lines_of(a);
  ASSERT_EQ(rows.size(), 10u);
  EXPECT_EQ(rows[0],
            "model,delta,L,boundary,channel,p_zz,p_x,backend,chi_max,S_SE,chi2,c2_half,"
            "c1_half,trunc_weight,seed");
  // (L, p) order, and S_SE(p = 0) vanishes.
  const CsvTable t = read_csv(dir.path() / "a" / kSweepCsv, sweep_header());
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_EQ(parse_int_field(t, i, 2), 4 + 2 * static_cast<int>(i / 3));
    if (i % 3 == 0) EXPECT_LT(std::abs(parse_double_field(t, i, 9)), 1e-10);
    if (i % 3 == 2) EXPECT_NEAR(parse_double_field(t, i, 10), 1.0, 1e-10);
  }
}

TEST(Sweep, ManifestMatchesCsvAndResumeCompletesIdentically) {
  TempDir dir;
  SweepConfig c = parse_config(kTfimConfig);
  c.out_dir = dir.path() / "full";
  run_sweep(c);
  const std::string full_csv = slurp(dir.path() / "full" / kSweepCsv);
  const auto manifest = lines_of(slurp(dir.path() / "full" / kManifest));
  ASSERT_EQ(manifest.size(), 10u);
  const auto header = nlohmann::json::parse(manifest[0]);
  EXPECT_EQ(header["schema_version"], kSchemaVersion);
  EXPECT_EQ(header["config_hash"], config_hash(c));
  for (std::size_t i = 1; i < manifest.size(); ++i) {
    EXPECT_EQ(nlohmann::json::parse(manifest[i])["status"], "ok");
  }

  // A run killed after writing the fifth CSV row but before its manifest line,
  // with a torn manifest line after that.
  c.out_dir = dir.path() / "crashed";
  fs::create_directories(c.out_dir);
  const auto csv_rows = lines_of(full_csv);
  std::string csv_part, man_part;
  for (int i = 0; i <= 5; ++i) csv_part += csv_rows[i] + "\n";
  for (int i = 0; i <= 4; ++i) man_part += manifest[i] + "\n";
  spit(c.out_dir / kSweepCsv, csv_part);
  spit(c.out_dir / kManifest, man_part + manifest[5].substr(0, 12));
  const SweepSummary s = run_sweep(c, true);
  EXPECT_EQ(s.resumed, 4);
  EXPECT_EQ(s.ok, 9);
  EXPECT_EQ(slurp(c.out_dir / kSweepCsv), full_csv);
  EXPECT_EQ(lines_of(slurp(c.out_dir / kManifest)).size(), 10u);

  // Resuming under a different configuration is refused.
  SweepConfig other = c;
  other.seed = 99;
  EXPECT_THROW(run_sweep(other, true), ConfigError);
}

TEST(Sweep, InjectedFailureIsRecordedAndRunContinues) {
  TempDir dir;
  SweepConfig c = parse_config(std::string(kTfimConfig) + "inject_failure = 6:0.25\n");
  c.out_dir = dir.path();
  const SweepSummary s = run_sweep(c);
  EXPECT_EQ(s.failed, 1);
  EXPECT_EQ(s.ok, 8);
  const auto manifest = lines_of(slurp(dir.path() / kManifest));
  int ok_lines = 0;
  for (std::size_t i = 1; i < manifest.size(); ++i) {
    const auto j = nlohmann::json::parse(manifest[i]);
    if (j["status"] == "ok") ++ok_lines;
    if (j["L"] == 6 && j["p"] == 0.25) {
      EXPECT_EQ(j["status"], "error");
      EXPECT_EQ(j["reason"], "injected failure");
    }
  }
  EXPECT_EQ(ok_lines + 1, static_cast<int>(lines_of(slurp(dir.path() / kSweepCsv)).size()));
}

TEST(Sweep, MpsBackendRowsCarryTruncation) {
  TempDir dir;
  SweepConfig c = parse_config(R"([model]
name = tfim
boundary = open
[channel]
kind = zz
p = 0.3
[sweep]
L = 6
backend = mps
chi_max = 64
)");
  c.out_dir = dir.path();
  run_sweep(c);
  const CsvTable t = read_csv(dir.path() / kSweepCsv, sweep_header());
  ASSERT_EQ(t.rows.size(), 1u);
  EXPECT_EQ(t.rows[0][t.column("backend")], "mps");
  EXPECT_EQ(t.rows[0][t.column("chi_max")], "64");
  c.backend = decoh::Backend::Dense;
  c.out_dir = dir.path() / "dense";
  run_sweep(c);
  const CsvTable d = read_csv(dir.path() / "dense" / kSweepCsv, sweep_header());
  // DMRG convergence and the SVD cutoff leave ~1e-8 differences.
  EXPECT_NEAR(parse_double_field(t, 0, 9), parse_double_field(d, 0, 9), 1e-6);
  EXPECT_NEAR(parse_double_field(t, 0, 10), parse_double_field(d, 0, 10), 1e-6);
}

std::string synthetic_sweep(double alpha, double s0) {
  std::string text = join(sweep_header()) + "\n";
  for (int L : {6, 8, 10, 12}) {
    for (double p : {0.25, 0.5}) {
      text += join({"xxz", "0.45000000000000001", std::to_string(L), "periodic", "zz",
                    format_double(p), "0", "dense", "0", format_double(alpha * L * p * 2 - s0),
                    "0", "0", "0", "0", "1"}) +
              "\n";
    }
  }
  return text;
}

TEST(Fit, RecoversSyntheticLinearData) {
  TempDir dir;
  spit(dir.path() / "sweep.csv", synthetic_sweep(0.4, 0.9));
  FitCommandOptions o;
  o.sweep_csv = dir.path() / "sweep.csv";
  o.out_dir = dir.path();
  const auto s = run_fit(o);
  EXPECT_EQ(s.fits, 4);
  const CsvTable t = read_csv(dir.path() / kFitsCsv, fits_header());
  ASSERT_EQ(t.rows.size(), 4u);
  EXPECT_EQ(t.rows[0][t.column("window")], "6-8-10");
  EXPECT_EQ(t.rows[1][t.column("window")], "8-10-12");
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    EXPECT_NEAR(parse_double_field(t, i, t.column("s0")), 0.9, 1e-12);
    EXPECT_LT(parse_double_field(t, i, t.column("residual_rms")), 1e-12);
  }
  EXPECT_NEAR(parse_double_field(t, 2, t.column("alpha")), 0.4, 1e-12);

  const CsvTable ref = read_csv(dir.path() / kFitReferenceCsv, reference_header());
  ASSERT_EQ(ref.rows.size(), 2u);
  const double g_ref = parse_double_field(ref, 0, ref.column("g_reference"));
  EXPECT_NEAR(g_ref, 2.483, 5e-4);
  EXPECT_NEAR(parse_double_field(ref, 0, ref.column("rel_deviation")),
              (std::exp(0.9) - g_ref) / g_ref, 1e-12);
}

TEST(Fit, ErrorsOnMalformedInputOrMissingSizes) {
  TempDir dir;
  FitCommandOptions o;
  o.out_dir = dir.path();
  o.sweep_csv = dir.path() / "sweep.csv";
  spit(o.sweep_csv, "model,delta\nxxz,0.45\n");
  EXPECT_THROW(run_fit(o), decoh::InvalidInput);
  std::string text = synthetic_sweep(0.4, 0.9);
  spit(o.sweep_csv, text + "xxz,0.45,oops\n");
  EXPECT_THROW(run_fit(o), decoh::InvalidInput);
  spit(o.sweep_csv, text);
  o.windows = {{6, 8, 14}};
  try {
    run_fit(o);
    FAIL();
  } catch (const decoh::InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("L=14"), std::string::npos);
  }
}

TEST(Fit, StderrFromResidual) {
  // Three points with residuals (e, -2e, e): rms = sqrt(2) e.
  const double e = 1e-3;
  EXPECT_NEAR(s0_stderr(std::sqrt(2.0) * e, {6, 8, 10}), std::sqrt(6 * e * e * (1.0 / 3 + 8)),
              1e-15);
  EXPECT_EQ(s0_stderr(0.0, {6, 8, 10}), 0.0);
}

TEST(Collapse, ReportCarriesSchemaAndReference) {
  TempDir dir;
  std::string text = join(fits_header()) + "\n";
  for (int L : {8, 16, 32}) {
    for (int k = 0; k <= 12; ++k) {
      const double p = 0.2 + 0.025 * k;
      const double g = 1.5 + std::tanh(1.5 * (p - 0.44) * std::pow(L, 0.4));
      const std::string w = std::to_string(L) + "-" + std::to_string(L + 2) + "-" +
                            std::to_string(L + 4);
      text += join({"xxz", "0.45", "zz", format_double(p), w, "0", format_double(std::log(g)),
                    format_double(g), "0.001"}) +
              "\n";
    }
  }
  spit(dir.path() / kFitsCsv, text);
  CollapseCommandOptions o;
  o.fits_csv = dir.path() / kFitsCsv;
  o.out_dir = dir.path();
  o.collapse.restarts = 4;
  const auto r = run_collapse(o);
  EXPECT_NEAR(r.p_c, 0.44, 0.01);
  const auto j = nlohmann::json::parse(slurp(dir.path() / kCollapseJson));
  EXPECT_EQ(j["schema_version"], kSchemaVersion);
  EXPECT_EQ(j["trace"].size(), 4u);
  EXPECT_EQ(j["reference"]["p_c"], 0.439);
  EXPECT_EQ(j["curves"].size(), 3u);

  // One size only.
  std::string single = join(fits_header()) + "\n";
  for (const auto& line : lines_of(text)) {
    if (line.find(",8-10-12,") != std::string::npos) single += line + "\n";
  }
  spit(dir.path() / "single.csv", single);
  o.fits_csv = dir.path() / "single.csv";
  EXPECT_THROW(run_collapse(o), decoh::InvalidInput);
}

TEST(Verify, CorruptedStateFailsWithDiagnostic) {
  const auto checks = identity_checks(decoh::ModelKind::Tfim, 0.0, 6, 1, true);
  bool sign_failed = false;
  for (const auto& c : checks) {
    if (c.name == "parity_pair_sign") {
      sign_failed = !c.pass;
      EXPECT_NE(c.detail.find("parity"), std::string::npos);
    }
  }
  EXPECT_TRUE(sign_failed);
  for (const auto& c : identity_checks(decoh::ModelKind::Tfim, 0.0, 6, 1)) {
    EXPECT_TRUE(c.pass) << c.name << ": " << c.detail;
  }
}

TEST(Plot, DeterministicScriptsAndEmptyDirError) {
  TempDir dir;
  SweepConfig c = parse_config(kTfimConfig);
  c.out_dir = dir.path();
  run_sweep(c);
  FitCommandOptions f;
  f.sweep_csv = dir.path() / kSweepCsv;
  f.out_dir = dir.path();
  run_fit(f);
  const auto first = run_plot(dir.path(), dir.path() / "p1");
  const auto second = run_plot(dir.path(), dir.path() / "p2");
  ASSERT_EQ(first.size(), 4u);
  for (std::size_t i = 0; i < first.size(); ++i) {
    EXPECT_EQ(first[i].filename(), second[i].filename());
    EXPECT_EQ(slurp(first[i]), slurp(second[i]));
  }
  fs::create_directories(dir.path() / "empty");
  try {
    run_plot(dir.path() / "empty");
    FAIL();
  } catch (const decoh::InvalidInput& e) {
    const std::string m = e.what();
    EXPECT_NE(m.find("see_sweep.csv"), std::string::npos);
    EXPECT_NE(m.find("fits.csv"), std::string::npos);
    EXPECT_NE(m.find("collapse.json"), std::string::npos);
  }
}

TEST(ExitCodes, Contract) {
  TempDir dir;
  spit(dir.path() / "good.ini", kTfimConfig);
  spit(dir.path() / "bad.ini", "[model]\nname = hubbard\n");
  spit(dir.path() / "inject.ini", std::string(kTfimConfig) + "inject_failure = 4:0.5\n");
  const std::string out = (dir.path() / "out").string();
  EXPECT_EQ(cli({"sweep", "--config", (dir.path() / "good.ini").string(), "--out", out,
                 "--quiet"}),
            kExitOk);
  std::string err;
  EXPECT_EQ(cli({"sweep", "--config", (dir.path() / "bad.ini").string(), "--out", out}, &err),
            kExitConfig);
  EXPECT_NE(err.find("hubbard"), std::string::npos);
  EXPECT_EQ(cli({"sweep", "--config", (dir.path() / "missing.ini").string()}), kExitConfig);
  EXPECT_EQ(cli({"sweep"}), kExitConfig);
  EXPECT_EQ(cli({"frobnicate"}), kExitConfig);
  EXPECT_EQ(cli({"sweep", "--config", (dir.path() / "good.ini").string(), "--out", out,
                 "--backend", "gpu"}),
            kExitConfig);
  EXPECT_EQ(cli({"sweep", "--config", (dir.path() / "inject.ini").string(), "--out",
                 (dir.path() / "inj").string(), "--quiet"}),
            kExitNumerical);
  EXPECT_EQ(cli({"verify", "--model", "tfim", "--L", "6", "--no-mps", "--no-invariants"}),
            kExitOk);
  EXPECT_EQ(cli({"verify", "--model", "tfim", "--L", "6", "--no-mps", "--no-invariants",
                 "--corrupt-state", "--out", (dir.path() / "v").string()}),
            kExitVerification);
  const auto v = nlohmann::json::parse(slurp(dir.path() / "v" / kVerifyJson));
  EXPECT_EQ(v["passed"], false);
  EXPECT_EQ(v["schema_version"], kSchemaVersion);
  EXPECT_EQ(cli({"plot", "--input", (dir.path() / "nothing").string()}), kExitConfig);
  EXPECT_EQ(cli({"--help"}), kExitOk);
}

}  // namespace
