#include "decoh/cli/plot.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "decoh/cli/analysis.hpp"
#include "decoh/cli/csv.hpp"
#include "decoh/cli/sweep.hpp"
#include "decoh/error.hpp"
#include "json.hpp"

namespace decoh::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kPrelude = R"py(import csv
import os
from collections import defaultdict

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))


def read_rows(name):
    with open(os.path.join(HERE, name), newline="") as f:
        return list(csv.DictReader(f))

)py";

constexpr const char* kChiScript = R"py(
rows = read_rows("chi_vs_p.csv")
curves = defaultdict(list)
for r in rows:
    curves[(r["series"], int(r["L"]))].append((float(r["p"]), float(r["chi2"]), float(r["S_SE"])))

fig, (ax_chi, ax_see) = plt.subplots(1, 2, figsize=(10, 4))
for (series, L), pts in sorted(curves.items()):
    pts.sort()
    ps = [p for p, _, _ in pts]
    ax_chi.plot(ps, [c for _, c, _ in pts], marker="o", label=f"{series} L={L}")
    ax_see.plot(ps, [s for _, _, s in pts], marker="o", label=f"{series} L={L}")
ax_chi.set_xlabel("p")
ax_chi.set_ylabel("chi^II")
ax_see.set_xlabel("p")
ax_see.set_ylabel("S_SE")
ax_chi.legend(fontsize=7)
fig.tight_layout()
fig.savefig(os.path.join(HERE, "chi_vs_p.png"), dpi=150)
)py";

constexpr const char* kGScript = R"py(
rows = read_rows("g_vs_p.csv")
curves = defaultdict(list)
for r in rows:
    curves[(r["series"], r["window"])].append((float(r["p"]), float(r["g"])))

fig, ax = plt.subplots(figsize=(5, 4))
for (series, window), pts in sorted(curves.items()):
    pts.sort()
    ax.plot([p for p, _ in pts], [g for _, g in pts], marker="o", label=f"{series} L={window}")
ax.set_xlabel("p")
ax.set_ylabel("e^{s0}")
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(os.path.join(HERE, "g_vs_p.png"), dpi=150)
)py";

constexpr const char* kCollapseScript = R"py(
rows = read_rows("collapse_master.csv")
curves = defaultdict(list)
for r in rows:
    curves[int(r["L_sd"])].append((float(r["x"]), float(r["y"]), float(r["sigma"])))

fig, ax = plt.subplots(figsize=(5, 4))
for L, pts in sorted(curves.items()):
    pts.sort()
    ax.errorbar([x for x, _, _ in pts], [y for _, y, _ in pts], yerr=[s for _, _, s in pts],
                marker="o", capsize=2, label=f"L_sd={L}")
ax.set_xlabel("(p - p_c) L_sd^(1/nu)")
ax.set_ylabel("e^{s0} L_sd^(-zeta/nu)")
ax.legend(fontsize=7)
fig.tight_layout()
fig.savefig(os.path.join(HERE, "collapse_master.png"), dpi=150)
)py";

void write_file(const fs::path& path, const std::string& text, std::vector<fs::path>& written) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  out << text;
  if (!out) throw InvalidInput("cannot write " + path.string());
  written.push_back(path);
}

std::string series_name(const std::string& model, const std::string& delta,
                        const std::string& channel) {
  return model == "xxz" ? model + "(" + delta + ")/" + channel : model + "/" + channel;
}

}  // namespace

std::vector<fs::path> run_plot(const fs::path& results_dir, fs::path out_dir) {
  const fs::path sweep = results_dir / kSweepCsv;
  const fs::path fits = results_dir / kFitsCsv;
  const fs::path collapse = results_dir / kCollapseJson;
  const bool has_sweep = fs::exists(sweep), has_fits = fs::exists(fits),
             has_collapse = fs::exists(collapse);
  if (!has_sweep && !has_fits && !has_collapse) {
    throw InvalidInput("plot: nothing to render in " + results_dir.string() +
                       "; expected at least one of " + kSweepCsv + " (from sweep), " +
                       kFitsCsv + " (from fit), " + kCollapseJson + " (from collapse)");
  }
  if (out_dir.empty()) out_dir = results_dir / "plots";
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) throw InvalidInput("cannot create " + out_dir.string());
  std::vector<fs::path> written;

  if (has_sweep) {
    const CsvTable t = read_csv(sweep, sweep_header());
    std::string data = "series,L,p,chi2,S_SE\n";
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      const auto& r = t.rows[i];
      const bool x_only = r[t.column("channel")] == "x";
      data += join({series_name(r[t.column("model")], r[t.column("delta")], r[t.column("channel")]),
                    r[t.column("L")], x_only ? r[t.column("p_x")] : r[t.column("p_zz")],
                    r[t.column("chi2")], r[t.column("S_SE")]}) +
              "\n";
    }
    write_file(out_dir / "chi_vs_p.csv", data, written);
    write_file(out_dir / "plot_chi.py", std::string(kPrelude) + kChiScript, written);
  }
  if (has_fits) {
    const CsvTable t = read_csv(fits, fits_header());
    std::string data = "series,window,p,g\n";
    for (const auto& r : t.rows) {
      data += join({series_name(r[t.column("model")], r[t.column("delta")], r[t.column("channel")]),
                    r[t.column("window")], r[t.column("p")], r[t.column("g")]}) +
              "\n";
    }
    write_file(out_dir / "g_vs_p.csv", data, written);
    write_file(out_dir / "plot_g.py", std::string(kPrelude) + kGScript, written);
  }
  if (has_collapse) {
    nlohmann::json j;
    try {
      std::ifstream in(collapse);
      j = nlohmann::json::parse(in);
      const double p_c = j.at("result").at("p_c").get<double>();
      const double nu = j.at("result").at("nu").get<double>();
      const double zeta = j.at("result").at("zeta").get<double>();
      std::string data = "L_sd,x,y,sigma\n";
      for (const auto& curve : j.at("curves")) {
        const int L = curve.at("L_sd").get<int>();
        const double lx = std::pow(L, 1.0 / nu), ly = std::pow(L, -zeta / nu);
        for (const auto& pt : curve.at("points")) {
          data += join({std::to_string(L), format_double((pt.at(0).get<double>() - p_c) * lx),
                        format_double(pt.at(1).get<double>() * ly),
                        format_double(pt.at(2).get<double>() * ly)}) +
                  "\n";
        }
      }
      write_file(out_dir / "collapse_master.csv", data, written);
    } catch (const nlohmann::json::exception& e) {
      throw InvalidInput(collapse.string() + ": malformed collapse report: " + e.what());
    }
    write_file(out_dir / "plot_collapse.py", std::string(kPrelude) + kCollapseScript, written);
  }
  return written;
}

}  // namespace decoh::cli
