#include "decoh/cli/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <tuple>

#include "decoh/cli/csv.hpp"
#include "decoh/cli/sweep.hpp"
#include "decoh/error.hpp"
#include "json.hpp"

namespace decoh::cli {

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scaling;

namespace {

struct GroupKey {
  std::string model;
  double delta;
  std::string channel;
  auto operator<=>(const GroupKey&) const = default;
};

struct SweepPoint {
  int L;
  double S_SE;
  Backend backend;
  double trunc_weight;
};

struct Group {
  std::string boundary;
  std::map<double, std::vector<SweepPoint>> by_p;
};

std::string group_label(const GroupKey& k) {
  return k.model + " delta=" + format_double(k.delta) + " channel=" + k.channel;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc | std::ios::binary);
  out << text;
  if (!out) throw InvalidInput("cannot write " + path.string());
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw InvalidInput("cannot create output directory " + dir.string());
  }
}

std::map<GroupKey, Group> read_sweep(const fs::path& path) {
  const CsvTable t = read_csv(path, sweep_header());
  const std::size_t c_model = t.column("model"), c_delta = t.column("delta"),
                    c_L = t.column("L"), c_boundary = t.column("boundary"),
                    c_channel = t.column("channel"), c_pzz = t.column("p_zz"),
                    c_px = t.column("p_x"), c_backend = t.column("backend"),
                    c_see = t.column("S_SE"), c_tw = t.column("trunc_weight");
  std::map<GroupKey, Group> groups;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const auto& row = t.rows[i];
    const std::string where = path.string() + ":" + std::to_string(t.line_numbers[i]);
    GroupKey key{row[c_model], parse_double_field(t, i, c_delta), row[c_channel]};
    const ChannelKind kind = parse_channel_kind(key.channel);
    const double p_zz = parse_double_field(t, i, c_pzz);
    const double p_x = parse_double_field(t, i, c_px);
    if (kind == ChannelKind::XplusZZ && p_zz != p_x) {
      throw InvalidInput(where + ": x+zz rows need p_zz == p_x for a single fit variable");
    }
    Backend backend;
    try {
      backend = parse_backend(row[c_backend]);
    } catch (const InvalidInput& e) {
      throw InvalidInput(where + ": " + e.what());
    }
    Group& g = groups[key];
    if (g.boundary.empty()) g.boundary = row[c_boundary];
    if (g.boundary != row[c_boundary]) {
      throw InvalidInput(where + ": " + group_label(key) +
                         " mixes boundaries; fit one boundary at a time");
    }
    const double p = kind == ChannelKind::X ? p_x : p_zz;
    g.by_p[p].push_back({parse_int_field(t, i, c_L), parse_double_field(t, i, c_see), backend,
                         parse_double_field(t, i, c_tw)});
  }
  if (groups.empty()) throw InvalidInput(path.string() + ": no data rows");
  return groups;
}

}  // namespace

double s0_stderr(double residual_rms, const std::vector<int>& window) {
  const auto n = static_cast<double>(window.size());
  if (window.size() < 3) return 0.0;
  double mx = 0.0;
  for (int L : window) mx += L;
  mx /= n;
  double sxx = 0.0;
  for (int L : window) sxx += (L - mx) * (L - mx);
  const double ssr = n * residual_rms * residual_rms;
  return std::sqrt(ssr / (n - 2.0) * (1.0 / n + mx * mx / sxx));
}

FitCommandSummary run_fit(const FitCommandOptions& options) {
  const auto groups = read_sweep(options.sweep_csv);
  ensure_dir(options.out_dir);
  FitCommandSummary summary;

  std::string fits_text = join(fits_header()) + "\n";
  std::string ref_text = join(reference_header()) + "\n";
  json report = {{"schema_version", kSchemaVersion},
                 {"tool_version", tool_version()},
                 {"groups", json::array()}};

  for (const auto& [key, group] : groups) {
    const ModelKind model = parse_model_kind(key.model);
    const ChannelKind channel = parse_channel_kind(key.channel);
    json jg = {{"model", key.model}, {"delta", key.delta}, {"channel", key.channel},
               {"boundary", group.boundary}, {"extrapolations", json::array()},
               {"skipped", json::array()}};
    for (const auto& [p, points] : group.by_p) {
      std::vector<int> sizes;
      for (const auto& pt : points) sizes.push_back(pt.L);
      std::sort(sizes.begin(), sizes.end());
      sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

      std::vector<std::vector<int>> windows = options.windows;
      if (windows.empty()) windows = consecutive_windows(sizes, options.window_width);
      if (windows.empty()) {
        throw InvalidInput(group_label(key) + " p=" + format_double(p) + ": only " +
                           std::to_string(sizes.size()) + " sizes, need at least " +
                           std::to_string(options.window_width));
      }
      std::sort(windows.begin(), windows.end(), [](const auto& a, const auto& b) {
        return std::tie(a.front(), a) < std::tie(b.front(), b);
      });

      std::map<std::size_t, std::vector<std::pair<int, double>>> s0_by_width;
      std::map<std::size_t, std::vector<std::string>> labels_by_width;
      for (const auto& window : windows) {
        const std::string label = window_label(window);
        std::vector<SeeSample> samples;
        for (int L : window) {
          bool found = false;
          for (const auto& pt : points) {
            if (pt.L == L) {
              samples.push_back({pt.L, p, pt.S_SE, pt.backend, pt.trunc_weight});
              found = true;
            }
          }
          if (!found) {
            throw InvalidInput(group_label(key) + " p=" + format_double(p) + ": window " +
                               label + " needs L=" + std::to_string(L) +
                               ", which is missing from the sweep");
          }
        }
        const bool mixed = std::any_of(samples.begin(), samples.end(), [&](const auto& s) {
          return s.backend != samples.front().backend;
        });
        if (mixed) {
          jg["skipped"].push_back({{"p", p}, {"window", label}, {"reason", "mixed backends"}});
          ++summary.skipped_windows;
          continue;
        }
        const FitResult fit = fit_linear_s0(samples);
        fits_text += join({key.model, format_double(key.delta), key.channel, format_double(p),
                           label, format_double(fit.alpha), format_double(fit.s0),
                           format_double(fit.g()), format_double(fit.residual_rms)}) +
                     "\n";
        ++summary.fits;
        s0_by_width[window.size()].emplace_back(fit.L_sd(), fit.s0);
        labels_by_width[window.size()].push_back(label);

        if (p == 0.5) {
          double ref = 0.0;
          try {
            ref = reference_g_value(model, key.delta, channel);
          } catch (const InvalidInput&) {
            continue;
          }
          ref_text += join({key.model, format_double(key.delta), key.channel, format_double(p),
                            label, format_double(fit.g()), format_double(ref),
                            format_double((fit.g() - ref) / ref)}) +
                      "\n";
        }
      }
      for (const auto& [width, pts] : s0_by_width) {
        if (pts.size() < 3) continue;
        const LineFit line = extrapolate_s0(pts);
        jg["extrapolations"].push_back({{"p", p},
                                        {"window_width", width},
                                        {"windows", labels_by_width[width]},
                                        {"slope", line.slope},
                                        {"intercept", line.intercept},
                                        {"residual_rms", line.residual_rms}});
        ++summary.extrapolations;
      }
    }
    report["groups"].push_back(jg);
  }
  write_text(options.out_dir / kFitsCsv, fits_text);
  write_text(options.out_dir / kFitReferenceCsv, ref_text);
  write_text(options.out_dir / kFitReport, report.dump(2) + "\n");
  return summary;
}

CollapseCurves read_collapse_curves(const CollapseCommandOptions& o, std::string* label) {
  const CsvTable t = read_csv(o.fits_csv, fits_header());
  const std::size_t c_model = t.column("model"), c_delta = t.column("delta"),
                    c_channel = t.column("channel"), c_p = t.column("p"),
                    c_window = t.column("window"), c_g = t.column("g"),
                    c_rms = t.column("residual_rms");
  std::set<GroupKey> keys;
  std::vector<std::size_t> selected;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    const GroupKey key{t.rows[i][c_model], parse_double_field(t, i, c_delta),
                       t.rows[i][c_channel]};
    if (o.model && key.model != *o.model) continue;
    if (o.delta && key.delta != *o.delta) continue;
    if (o.channel && key.channel != *o.channel) continue;
    keys.insert(key);
    selected.push_back(i);
  }
  if (keys.empty()) throw InvalidInput(o.fits_csv.string() + ": no rows match the selection");
  if (keys.size() > 1) {
    std::string list;
    for (const auto& k : keys) list += "\n  " + group_label(k);
    throw InvalidInput(o.fits_csv.string() +
                       " holds several groups; select one with --model/--delta/--channel:" +
                       list);
  }
  if (label) *label = group_label(*keys.begin());

  CollapseCurves curves;
  std::map<int, std::string> window_of;
  for (std::size_t i : selected) {
    const std::vector<int> window = parse_window_label(t.rows[i][c_window]);
    const int L_sd = window.front();
    const auto [it, inserted] = window_of.emplace(L_sd, t.rows[i][c_window]);
    if (!inserted && it->second != t.rows[i][c_window]) {
      throw InvalidInput(o.fits_csv.string() + ":" + std::to_string(t.line_numbers[i]) +
                         ": windows " + it->second + " and " + t.rows[i][c_window] +
                         " share L_sd=" + std::to_string(L_sd));
    }
    const double g = parse_double_field(t, i, c_g);
    const double sigma = g * s0_stderr(parse_double_field(t, i, c_rms), window);
    curves[L_sd].push_back({parse_double_field(t, i, c_p), g, std::max(sigma, kSigmaFloor)});
  }
  return curves;
}

CollapseResult run_collapse(const CollapseCommandOptions& o) {
  std::string label;
  const CollapseCurves curves = read_collapse_curves(o, &label);
  ensure_dir(o.out_dir);
  const CollapseResult r = fss_collapse(curves, o.init, o.bounds, o.collapse);

  auto params = [](const CollapseParams& q) {
    return json{{"p_c", q.p_c}, {"nu", q.nu}, {"zeta", q.zeta}};
  };
  json trace = json::array();
  for (const auto& s : r.trace) {
    trace.push_back({{"start", params(s.start)},
                     {"end", params(s.end)},
                     {"quality", std::isfinite(s.quality) ? json(s.quality) : json(nullptr)},
                     {"evaluations", s.evaluations},
                     {"converged", s.converged}});
  }
  json jc = json::array();
  for (const auto& [L, pts] : curves) {
    json jp = json::array();
    for (const auto& pt : pts) jp.push_back({pt.p, pt.y, pt.sigma});
    jc.push_back({{"L_sd", L}, {"points", jp}});
  }
  json window = nullptr;
  if (o.collapse.p_window) window = {o.collapse.p_window->first, o.collapse.p_window->second};
  const json report = {
      {"schema_version", kSchemaVersion},
      {"tool_version", tool_version()},
      {"group", label},
      {"ansatz", "e^{s0} = L_sd^{zeta/nu} g((p - p_c) L_sd^{1/nu})"},
      {"p_window", window},
      {"init", params(o.init)},
      {"bounds",
       {{"p_c", {o.bounds.p_c_min, o.bounds.p_c_max}},
        {"nu", {o.bounds.nu_min, o.bounds.nu_max}},
        {"zeta", {o.bounds.zeta_min, o.bounds.zeta_max}}}},
      {"restarts", o.collapse.restarts},
      {"seed", o.collapse.seed},
      {"result",
       {{"p_c", r.p_c}, {"nu", r.nu}, {"zeta", r.zeta}, {"quality", r.quality},
        {"best_restart", r.best_restart}, {"total_evaluations", r.total_evaluations}}},
      {"trace", trace},
      {"curves", jc},
      {"reference",
       {{"p_c", 0.439}, {"nu", 2.519}, {"zeta", 0.007},
        {"note", "XXZ delta=0.45 estimate from periodic chains with L_sd up to ~34 and "
                 "0.2 <= p <= 0.5; not expected to be reproduced at these sizes"}}}};
  write_text(o.out_dir / kCollapseJson, report.dump(2) + "\n");
  return r;
}

}  // namespace decoh::cli
