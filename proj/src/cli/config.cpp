#include "decoh/cli/config.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "decoh/cli/csv.hpp"
#include "decoh/engine/doubled_state.hpp"

namespace decoh::cli {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>>& allowed_keys() {
  static const std::map<std::string, std::set<std::string>> keys = {
      {"model", {"name", "delta", "boundary"}},
      {"channel", {"kind", "p", "p_linspace"}},
      {"sweep",
       {"L", "backend", "chi_max", "svd_cutoff", "dense_limit", "seed", "workers",
        "inject_failure"}},
      {"output", {"dir"}},
  };
  return keys;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t");
  return s.substr(first, last - first + 1);
}

// Line of `key` inside `[section]`, for diagnostics; 0 when not found.
int line_of(const std::string& text, const std::string& section, const std::string& key) {
  std::istringstream in(text);
  std::string line, current;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string t = trim(line);
    if (t.size() > 2 && t.front() == '[' && t.back() == ']') {
      current = t.substr(1, t.size() - 2);
    } else if (current == section) {
      const auto eq = t.find('=');
      if (eq != std::string::npos && trim(t.substr(0, eq)) == key) return number;
    }
  }
  return 0;
}

class Reader {
 public:
  Reader(const pt::ptree& tree, const std::string& text, std::string source)
      : tree_(tree), text_(text), source_(std::move(source)) {}

  [[noreturn]] void fail(const std::string& section, const std::string& key,
                         const std::string& message) const {
    std::ostringstream msg;
    msg << source_;
    if (const int line = line_of(text_, section, key)) msg << ":" << line;
    msg << ": [" << section << "] " << key << ": " << message;
    throw ConfigError(msg.str());
  }

  std::optional<std::string> get(const std::string& section, const std::string& key) const {
    const auto s = tree_.get_child_optional(section);
    if (!s) return std::nullopt;
    const auto v = s->get_optional<std::string>(key);
    if (!v) return std::nullopt;
    return trim(*v);
  }

  std::string require(const std::string& section, const std::string& key) const {
    auto v = get(section, key);
    if (!v || v->empty()) {
      throw ConfigError(source_ + ": missing required key [" + section + "] " + key);
    }
    return *v;
  }

  double to_double(const std::string& section, const std::string& key,
                   const std::string& s) const {
    double value = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(value)) {
      fail(section, key, "'" + s + "' is not a finite number");
    }
    return value;
  }

  template <class Int>
  Int to_int(const std::string& section, const std::string& key, const std::string& s) const {
    Int value = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), value);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
      fail(section, key, "'" + s + "' is not an integer");
    }
    return value;
  }

  std::vector<std::string> list(const std::string& section, const std::string& key) const {
    std::vector<std::string> out;
    for (auto& f : split_fields(require(section, key))) {
      f = trim(f);
      if (f.empty()) fail(section, key, "empty list element");
      out.push_back(f);
    }
    return out;
  }

  template <class Parse>
  auto parse_enum(const std::string& section, const std::string& key, const std::string& s,
                  Parse parse) const {
    try {
      return parse(s);
    } catch (const InvalidInput& e) {
      fail(section, key, e.what());
    }
  }

  void check_keys() const {
    for (const auto& [section, body] : tree_) {
      const auto it = allowed_keys().find(section);
      if (it == allowed_keys().end()) {
        throw ConfigError(source_ + ": unknown section [" + section + "]");
      }
      if (!body.data().empty()) {
        throw ConfigError(source_ + ": key '" + section + "' outside any section");
      }
      for (const auto& [key, value] : body) {
        if (!it->second.contains(key)) fail(section, key, "unknown key");
      }
    }
  }

 private:
  const pt::ptree& tree_;
  const std::string& text_;
  std::string source_;
};

}  // namespace

SweepConfig parse_config(const std::string& text, const std::string& source) {
  pt::ptree tree;
  try {
    std::istringstream in(text);
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  const Reader r(tree, text, source);
  r.check_keys();

  SweepConfig c;
  c.model = r.parse_enum("model", "name", r.require("model", "name"), parse_model_kind);
  if (auto v = r.get("model", "delta")) c.delta = r.to_double("model", "delta", *v);
  if (c.model == ModelKind::Tfim) c.delta = 0.0;
  if (auto v = r.get("model", "boundary")) {
    c.boundary = r.parse_enum("model", "boundary", *v, parse_boundary);
  }

  c.channel = r.parse_enum("channel", "kind", r.require("channel", "kind"), parse_channel_kind);
  const bool has_list = r.get("channel", "p").has_value();
  const bool has_linspace = r.get("channel", "p_linspace").has_value();
  if (has_list == has_linspace) {
    throw ConfigError(source + ": [channel] needs exactly one of 'p' or 'p_linspace'");
  }
  if (has_list) {
    for (const auto& s : r.list("channel", "p")) c.p_grid.push_back(r.to_double("channel", "p", s));
  } else {
    const auto parts = r.list("channel", "p_linspace");
    if (parts.size() != 3) r.fail("channel", "p_linspace", "expected 'start, stop, count'");
    const double a = r.to_double("channel", "p_linspace", parts[0]);
    const double b = r.to_double("channel", "p_linspace", parts[1]);
    const int n = r.to_int<int>("channel", "p_linspace", parts[2]);
    if (n < 1) r.fail("channel", "p_linspace", "count must be >= 1");
    for (int i = 0; i < n; ++i) {
      // Endpoints are exact; interior points are a + i (b - a) / (n - 1).
      c.p_grid.push_back(i == n - 1 ? b : (n == 1 ? a : a + i * (b - a) / (n - 1)));
    }
  }
  for (double p : c.p_grid) {
    if (p < 0.0 || p > 0.5) r.fail("channel", has_list ? "p" : "p_linspace",
                                   "strength " + format_double(p) + " outside [0, 1/2]");
  }
  std::sort(c.p_grid.begin(), c.p_grid.end());
  c.p_grid.erase(std::unique(c.p_grid.begin(), c.p_grid.end()), c.p_grid.end());

  for (const auto& s : r.list("sweep", "L")) c.sizes.push_back(r.to_int<int>("sweep", "L", s));
  std::sort(c.sizes.begin(), c.sizes.end());
  c.sizes.erase(std::unique(c.sizes.begin(), c.sizes.end()), c.sizes.end());

  if (auto v = r.get("sweep", "backend")) {
    c.backend = r.parse_enum("sweep", "backend", *v, parse_backend);
  }
  if (auto v = r.get("sweep", "chi_max")) c.chi_max = r.to_int<int>("sweep", "chi_max", *v);
  if (auto v = r.get("sweep", "svd_cutoff")) {
    c.svd_cutoff = r.to_double("sweep", "svd_cutoff", *v);
  }
  if (auto v = r.get("sweep", "dense_limit")) {
    c.dense_limit = r.to_int<int>("sweep", "dense_limit", *v);
  }
  if (auto v = r.get("sweep", "seed")) c.seed = r.to_int<std::uint64_t>("sweep", "seed", *v);
  if (auto v = r.get("sweep", "workers")) c.workers = r.to_int<int>("sweep", "workers", *v);
  if (r.get("sweep", "inject_failure")) {
    for (const auto& s : r.list("sweep", "inject_failure")) {
      const auto colon = s.find(':');
      if (colon == std::string::npos) r.fail("sweep", "inject_failure", "expected L:p");
      c.inject_failures.emplace_back(
          r.to_int<int>("sweep", "inject_failure", s.substr(0, colon)),
          r.to_double("sweep", "inject_failure", s.substr(colon + 1)));
    }
    std::sort(c.inject_failures.begin(), c.inject_failures.end());
  }
  if (auto v = r.get("output", "dir")) c.out_dir = *v;

  try {
    validate(c);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

SweepConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  SweepConfig c = parse_config(buf.str(), path.string());
  if (const char* dir = std::getenv("DECOH_OUT_DIR"); dir && *dir) c.out_dir = dir;
  return c;
}

void validate(const SweepConfig& c) {
  if (c.p_grid.empty()) throw ConfigError("[channel] p grid is empty");
  if (c.sizes.empty()) throw ConfigError("[sweep] L list is empty");
  if (c.chi_max < 1) throw ConfigError("[sweep] chi_max must be >= 1");
  if (!(c.svd_cutoff >= 0.0 && c.svd_cutoff < 1e-2)) {
    throw ConfigError("[sweep] svd_cutoff must lie in [0, 1e-2)");
  }
  if (c.dense_limit < 2 || c.dense_limit > kDoubledSiteLimit) {
    throw ConfigError("[sweep] dense_limit must lie in [2, " +
                      std::to_string(kDoubledSiteLimit) + "]");
  }
  if (c.workers < 1) throw ConfigError("[sweep] workers must be >= 1");
  if (c.model == ModelKind::Xxz && !(std::abs(c.delta) < 1.0)) {
    throw ConfigError("[model] delta must satisfy |delta| < 1 for the critical XXZ chain");
  }
  for (int L : c.sizes) {
    try {
      decoh::validate(ModelSpec{c.model, L, c.delta, c.boundary, true});
    } catch (const InvalidInput& e) {
      throw ConfigError(std::string("[sweep] L: ") + e.what());
    }
    const Backend b = resolve_backend(c, L);
    if (b == Backend::Dense && L > c.dense_limit) {
      throw ConfigError("[sweep] L=" + std::to_string(L) + " exceeds the dense limit " +
                        std::to_string(c.dense_limit) + "; use backend mps or auto");
    }
    if (b == Backend::Mps && c.boundary != Boundary::Open) {
      throw ConfigError("[sweep] L=" + std::to_string(L) +
                        " needs the MPS backend, which supports open boundaries only");
    }
  }
  for (const auto& [L, p] : c.inject_failures) {
    if (!std::binary_search(c.sizes.begin(), c.sizes.end(), L) ||
        !std::binary_search(c.p_grid.begin(), c.p_grid.end(), p)) {
      throw ConfigError("[sweep] inject_failure " + std::to_string(L) + ":" +
                        format_double(p) + " is not a grid point");
    }
  }
  ChannelSpec::with_strength(c.channel, c.p_grid.back()).validate();
}

Backend resolve_backend(const SweepConfig& c, int L) {
  if (c.backend != Backend::Auto) return c.backend;
  return L <= c.dense_limit ? Backend::Dense : Backend::Mps;
}

std::string canonical_form(const SweepConfig& c) {
  std::map<std::string, std::string> kv;
  kv["model.name"] = std::string(to_string(c.model));
  kv["model.delta"] = format_double(c.delta);
  kv["model.boundary"] = std::string(to_string(c.boundary));
  kv["channel.kind"] = std::string(to_string(c.channel));
  std::vector<std::string> ps, ls, inj;
  for (double p : c.p_grid) ps.push_back(format_double(p));
  for (int L : c.sizes) ls.push_back(std::to_string(L));
  for (const auto& [L, p] : c.inject_failures) {
    inj.push_back(std::to_string(L) + ":" + format_double(p));
  }
  kv["channel.p"] = join(ps);
  kv["sweep.L"] = join(ls);
  kv["sweep.backend"] = std::string(to_string(c.backend));
  kv["sweep.chi_max"] = std::to_string(c.chi_max);
  kv["sweep.svd_cutoff"] = format_double(c.svd_cutoff);
  kv["sweep.dense_limit"] = std::to_string(c.dense_limit);
  kv["sweep.seed"] = std::to_string(c.seed);
  kv["sweep.inject_failure"] = join(inj);
  std::string out;
  for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
  return out;
}

std::string sha256_hex(const std::string& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static constexpr char hex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string config_hash(const SweepConfig& c) { return sha256_hex(canonical_form(c)); }

}  // namespace decoh::cli
