#include "decoh/cli/sweep.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <fstream>
#include <map>
#include <mutex>
#include "json.hpp"
#include <set>
#include <thread>

#include "decoh/cli/csv.hpp"
#include "decoh/engine/doubled_state.hpp"
#include "decoh/mps/chain.hpp"
#include "decoh/mps/ladder.hpp"
#include "decoh/spin/ground_state.hpp"
#include "decoh/spin/hamiltonian.hpp"

#ifndef DECOH_VERSION
#define DECOH_VERSION "0.0.0"
#endif

namespace decoh::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string tool_version() { return DECOH_VERSION; }

namespace {

// The doubled bond is the square of the chain bond and is capped at 4096.
constexpr int kDmrgBondLimit = 64;

// Appends whole lines and forces them to disk before returning.
class DurableAppender {
 public:
  DurableAppender(const fs::path& path, bool truncate) : path_(path) {
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | (truncate ? O_TRUNC : 0), 0644);
    if (fd_ < 0) throw InvalidInput("cannot open " + path.string() + " for writing");
  }
  ~DurableAppender() {
    if (fd_ >= 0) ::close(fd_);
  }
  DurableAppender(const DurableAppender&) = delete;
  DurableAppender& operator=(const DurableAppender&) = delete;

  void line(const std::string& text) {
    const std::string data = text + "\n";
    std::size_t done = 0;
    while (done < data.size()) {
      const ssize_t n = ::write(fd_, data.data() + done, data.size() - done);
      if (n < 0) throw Error("write failed on " + path_.string());
      done += static_cast<std::size_t>(n);
    }
    ::fsync(fd_);
  }

 private:
  fs::path path_;
  int fd_ = -1;
};

struct Task {
  int L;
  double p;
};

struct Outcome {
  bool ok = false;
  SweepRow row;
  std::string reason;
  double wall_s = 0.0;
};

// Ground states are shared by all points of one size and built on first use.
class GroundStates {
 public:
  explicit GroundStates(const SweepConfig& c) : config_(c) {
    for (int L : c.sizes) slots_[L];
  }

  const PureState& dense(int L) {
    Slot& s = slots_.at(L);
    std::call_once(s.once, [&] {
      const ModelSpec spec{config_.model, L, config_.delta, config_.boundary, true};
      s.pure = ground_state(build_hamiltonian(spec), config_.seed);
    });
    return s.pure;
  }

  const mps::MpsLadder& ladder(int L) {
    Slot& s = slots_.at(L);
    std::call_once(s.once, [&] {
      const ModelSpec spec{config_.model, L, config_.delta, config_.boundary, true};
      mps::DmrgOptions o;
      o.chi_max = std::min(config_.chi_max, kDmrgBondLimit);
      o.seed = config_.seed;
      const auto gs = mps::ground_state_mps(spec, o);
      s.ladder = mps::doubled_mps(gs.mps, policy());
    });
    return s.ladder;
  }

  mps::TruncationPolicy policy() const {
    mps::TruncationPolicy p;
    p.chi_max = config_.chi_max;
    p.svd_cutoff = config_.svd_cutoff;
    return p;
  }

 private:
  struct Slot {
    std::once_flag once;
    PureState pure;
    mps::MpsLadder ladder;
  };
  const SweepConfig& config_;
  std::map<int, Slot> slots_;
};

double profile_at(const std::vector<std::pair<int, double>>& profile, int r) {
  for (const auto& [d, v] : profile) {
    if (d == r) return v;
  }
  throw NumericalFailure("correlator profile lacks r=" + std::to_string(r));
}

SweepRow compute_point(const SweepConfig& c, GroundStates& states, const Task& t) {
  for (const auto& [L, p] : c.inject_failures) {
    if (L == t.L && p == t.p) throw NumericalFailure("injected failure");
  }
  const ChannelSpec channel = ChannelSpec::with_strength(c.channel, t.p);
  SweepRow row;
  row.L = t.L;
  row.p_zz = channel.p_zz;
  row.p_x = channel.p_x;
  row.backend = resolve_backend(c, t.L);
  ObservableReport report;
  if (row.backend == Backend::Dense) {
    report = observe(apply_channel(vectorize(states.dense(t.L), c.dense_limit), channel),
                     channel);
  } else {
    row.chi_max = c.chi_max;
    const auto ladder =
        mps::apply_filter_gates_mps(states.ladder(t.L), channel, states.policy());
    report = mps::observe_mps(ladder, channel);
    row.trunc_weight = ladder.truncation_weight;
  }
  row.S_SE = report.S_SE;
  row.chi2 = report.chi2;
  row.c2_half = profile_at(report.c2_profile, t.L / 2);
  row.c1_half = profile_at(report.c1_profile, t.L / 2);
  return row;
}

json header_line(const SweepConfig& c) {
  return {{"type", "header"},
          {"schema_version", kSchemaVersion},
          {"tool_version", tool_version()},
          {"config_hash", config_hash(c)},
          {"points", c.sizes.size() * c.p_grid.size()}};
}

json point_line(const Task& t, const Outcome& o) {
  json j = {{"type", "point"}, {"L", t.L}, {"p", t.p},
            {"status", o.ok ? "ok" : "error"}, {"wall_s", o.wall_s}};
  if (o.ok) {
    j["backend"] = std::string(to_string(o.row.backend));
    j["trunc_weight"] = o.row.trunc_weight;
  } else {
    j["reason"] = o.reason;
  }
  return j;
}

struct Recorded {
  std::size_t points = 0;  // leading tasks already in the manifest
  std::size_t ok = 0;
  std::size_t failed = 0;
  std::vector<std::string> manifest_lines;
};

// Reads a manifest left by an earlier run. Trailing partial lines are ignored.
Recorded read_manifest(const fs::path& path, const SweepConfig& c,
                       const std::vector<Task>& tasks) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("--resume: no manifest at " + path.string());
  Recorded rec;
  std::string line;
  bool header = false;
  while (std::getline(in, line)) {
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error&) {
      break;
    }
    if (!header) {
      if (j.value("type", "") != "header") throw InvalidInput(path.string() + ": no header line");
      if (j.value("config_hash", "") != config_hash(c)) {
        throw ConfigError("--resume: " + path.string() +
                          " was written for a different configuration");
      }
      header = true;
      rec.manifest_lines.push_back(line);
      continue;
    }
    if (rec.points >= tasks.size()) throw InvalidInput(path.string() + ": too many points");
    const Task& t = tasks[rec.points];
    if (j.value("L", -1) != t.L || j.value("p", -1.0) != t.p) {
      throw InvalidInput(path.string() + ": points out of order; cannot resume");
    }
    (j.value("status", "") == "ok" ? rec.ok : rec.failed) += 1;
    ++rec.points;
    rec.manifest_lines.push_back(line);
  }
  if (!header) throw InvalidInput(path.string() + ": empty manifest");
  return rec;
}

// Keeps the header and the first `rows` data rows of the CSV.
void truncate_csv(const fs::path& path, std::size_t rows) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("--resume: no " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (lines.size() < rows + 1 && std::getline(in, line)) lines.push_back(line);
  in.close();
  if (lines.empty() || split_fields(lines[0]) != sweep_header()) {
    throw InvalidInput(path.string() + ": unexpected header");
  }
  if (lines.size() < rows + 1) {
    throw InvalidInput(path.string() + ": fewer rows than the manifest records");
  }
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    for (const auto& l : lines) out << l << '\n';
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

void rewrite_lines(const fs::path& path, const std::vector<std::string>& lines) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    for (const auto& l : lines) out << l << '\n';
    if (!out) throw Error("cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

}  // namespace

std::string format_row(const SweepConfig& c, const SweepRow& r) {
  return join({std::string(to_string(c.model)), format_double(c.delta), std::to_string(r.L),
               std::string(to_string(c.boundary)), std::string(to_string(c.channel)),
               format_double(r.p_zz), format_double(r.p_x), std::string(to_string(r.backend)),
               std::to_string(r.chi_max), format_double(r.S_SE), format_double(r.chi2),
               format_double(r.c2_half), format_double(r.c1_half), format_double(r.trunc_weight),
               std::to_string(c.seed)});
}

SweepConfig apply_overrides(SweepConfig c, const SweepOverrides& o) {
  if (o.workers) c.workers = *o.workers;
  if (o.seed) c.seed = *o.seed;
  if (o.backend) c.backend = *o.backend;
  if (o.chi_max) c.chi_max = *o.chi_max;
  if (o.out_dir) c.out_dir = *o.out_dir;
  validate(c);
  return c;
}

SweepSummary run_sweep(const SweepConfig& c, bool resume, std::ostream* log) {
  validate(c);
  std::vector<Task> tasks;
  for (int L : c.sizes) {
    for (double p : c.p_grid) tasks.push_back({L, p});
  }

  std::error_code ec;
  fs::create_directories(c.out_dir, ec);
  if (ec || !fs::is_directory(c.out_dir)) {
    throw InvalidInput("cannot create output directory " + c.out_dir.string());
  }
  SweepSummary summary;
  summary.points = static_cast<int>(tasks.size());
  summary.csv = c.out_dir / kSweepCsv;
  summary.manifest = c.out_dir / kManifest;

  std::size_t start = 0;
  if (resume) {
    const Recorded rec = read_manifest(summary.manifest, c, tasks);
    truncate_csv(summary.csv, rec.ok);
    rewrite_lines(summary.manifest, rec.manifest_lines);
    start = rec.points;
    summary.ok = static_cast<int>(rec.ok);
    summary.failed = static_cast<int>(rec.failed);
    summary.resumed = static_cast<int>(rec.points);
  }
  DurableAppender csv(summary.csv, !resume);
  DurableAppender manifest(summary.manifest, !resume);
  if (!resume) {
    csv.line(join(sweep_header()));
    manifest.line(header_line(c).dump());
  }

  GroundStates states(c);
  std::vector<std::optional<Outcome>> results(tasks.size());
  std::mutex mutex;
  std::condition_variable ready;
  std::atomic<std::size_t> next{start};

  auto worker = [&] {
    while (true) {
      const std::size_t i = next.fetch_add(1);
      if (i >= tasks.size()) return;
      Outcome o;
      const auto t0 = std::chrono::steady_clock::now();
      try {
        o.row = compute_point(c, states, tasks[i]);
        o.ok = true;
      } catch (const std::exception& e) {
        o.reason = e.what();
      }
      o.wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      {
        std::lock_guard lock(mutex);
        results[i] = std::move(o);
      }
      ready.notify_all();
    }
  };
  const int n_workers =
      std::max(1, std::min<int>(c.workers, static_cast<int>(tasks.size() - start)));
  std::vector<std::thread> pool;
  for (int w = 0; w < n_workers && start < tasks.size(); ++w) pool.emplace_back(worker);

  std::exception_ptr write_error;
  for (std::size_t i = start; i < tasks.size(); ++i) {
    Outcome o;
    {
      std::unique_lock lock(mutex);
      ready.wait(lock, [&] { return results[i].has_value(); });
      o = std::move(*results[i]);
      results[i].reset();
    }
    if (write_error) continue;
    try {
      if (o.ok) {
        csv.line(format_row(c, o.row));
        ++summary.ok;
      } else {
        ++summary.failed;
      }
      manifest.line(point_line(tasks[i], o).dump());
      if (log) {
        *log << "L=" << tasks[i].L << " p=" << format_double(tasks[i].p) << " "
             << (o.ok ? "ok" : "error: " + o.reason) << '\n';
      }
    } catch (...) {
      write_error = std::current_exception();
    }
  }
  for (auto& t : pool) t.join();
  if (write_error) std::rethrow_exception(write_error);
  return summary;
}

}  // namespace decoh::cli
