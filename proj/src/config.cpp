#include "gbt/config.hpp"

#include "gbt/error.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace gbt {

std::vector<Vec3> ObserverGrid::points() const {
  std::vector<Vec3> pts;
  pts.reserve(count());
  for (std::size_t j = 0; j < nv; ++j) {
    for (std::size_t i = 0; i < nu; ++i) {
      pts.push_back(origin + static_cast<double>(i) * u + static_cast<double>(j) * v);
    }
  }
  return pts;
}

std::vector<Vec3> ProbeLine::points() const {
  std::vector<Vec3> pts;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = n == 1 ? x_min : x_min + (x_max - x_min) * i / (n - 1);
    pts.emplace_back(x, 0.0, z);
  }
  return pts;
}

Atmosphere CaseConfig::atmosphere() const { return Atmosphere::from_conditions(ta_c, hr_pct, pa_atm); }

SourceSpec CaseConfig::source_spec() const {
  SourceSpec s;
  s.position = source;
  s.frequencies_hz = freqs_hz;
  s.amplitude_phi = amplitude_phi;
  s.beam_param_im = im_b;
  s.beam_eps_m = beam_eps_m;
  return s;
}

std::vector<Vec3> CaseConfig::observers() const {
  std::vector<Vec3> pts;
  if (obs_grid) {
    pts = obs_grid->points();
  } else if (obs_file) {
    std::filesystem::path p(*obs_file);
    if (p.is_relative()) p = base_dir / p;
    pts = load_observers(p);
  }
  if (pts.size() != n_obs) {
    throw InputError("n_obs = " + std::to_string(n_obs) + " but the observer spec gives " +
                     std::to_string(pts.size()) + " points");
  }
  return pts;
}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

struct Entry {
  std::string value;
  std::size_t line;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries) : entries_(std::move(entries)) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    const auto it = entries_.find(key);
    const std::string where = it == entries_.end() ? "" : " (line " + std::to_string(it->second.line) + ")";
    throw InputError("config key '" + key + "'" + where + ": " + what);
  }

  const std::string& raw(const std::string& key) {
    const auto it = entries_.find(key);
    if (it == entries_.end()) throw InputError("config key '" + key + "' is missing");
    used_.insert(key);
    return it->second.value;
  }

  double real(const std::string& key) { return parse_real(key, raw(key)); }

  double real_or(const std::string& key, double fallback) { return has(key) ? real(key) : fallback; }

  long long integer(const std::string& key) {
    const std::string& s = raw(key);
    long long v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) fail(key, "expected an integer, got '" + s + "'");
    return v;
  }

  std::size_t count(const std::string& key, long long min) {
    const long long v = integer(key);
    if (v < min) fail(key, "must be >= " + std::to_string(min));
    return static_cast<std::size_t>(v);
  }

  std::size_t count_or(const std::string& key, long long min, std::size_t fallback) {
    return has(key) ? count(key, min) : fallback;
  }

  std::vector<double> list(const std::string& key) {
    const std::string& s = raw(key);
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(key, trim(item)));
    if (out.empty()) fail(key, "empty list");
    return out;
  }

  Vec3 vec3(const std::string& key) {
    const auto v = list(key);
    if (v.size() != 3) fail(key, "expected three comma-separated numbers");
    return {v[0], v[1], v[2]};
  }

  void reject_unused() const {
    for (const auto& [key, entry] : entries_) {
      if (!used_.count(key)) {
        throw InputError("unknown config key '" + key + "' (line " + std::to_string(entry.line) + ")");
      }
    }
  }

 private:
  double parse_real(const std::string& key, const std::string& s) const {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size() || !std::isfinite(v)) {
      fail(key, "expected a finite number, got '" + s + "'");
    }
    return v;
  }

  std::map<std::string, Entry> entries_;
  std::set<std::string> used_;
};

constexpr const char* kCategoryKeys[kCategoryCount] = {"n_b", "n_t", "n_r", "n_w", "n_tree"};

std::string num(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

std::string num_list(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

std::string vec(const Vec3& v) { return num(v.x()) + "," + num(v.y()) + "," + num(v.z()); }

}  // namespace

CaseConfig parse_config(std::istream& in, const std::filesystem::path& base_dir) {
  std::map<std::string, Entry> entries;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = trim(std::string_view(line).substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw InputError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw InputError("config line " + std::to_string(line_no) + ": empty key or value");
    }
    if (!entries.emplace(key, Entry{value, line_no}).second) {
      throw InputError("config line " + std::to_string(line_no) + ": repeated key '" + key + "'");
    }
  }

  Reader r(std::move(entries));
  CaseConfig c;
  c.base_dir = base_dir;

  c.ta_c = r.real("ta_c");
  if (!(c.ta_c > -273.15)) r.fail("ta_c", "must be above -273.15");
  c.hr_pct = r.real("hr_pct");
  if (c.hr_pct < 0.0 || c.hr_pct > 100.0) r.fail("hr_pct", "must lie in [0, 100]");
  c.pa_atm = r.real("pa_atm");
  if (!(c.pa_atm > 0.0)) r.fail("pa_atm", "must be positive");

  const std::size_t f_s = r.count("f_s", 1);
  c.freqs_hz = r.list("freqs_hz");
  if (c.freqs_hz.size() != f_s) {
    r.fail("freqs_hz", "has " + std::to_string(c.freqs_hz.size()) + " entries but f_s = " +
                           std::to_string(f_s));
  }
  for (double f : c.freqs_hz) {
    if (!(f > 0.0)) r.fail("freqs_hz", "frequencies must be positive");
  }
  c.im_b = r.real("im_b");
  if (!(c.im_b < 0.0)) r.fail("im_b", "must be negative");
  if (r.has("beam_eps_m")) {
    c.beam_eps_m = r.real("beam_eps_m");
    if (!(*c.beam_eps_m > 0.0)) r.fail("beam_eps_m", "must be positive");
  }
  c.amplitude_phi = r.real_or("amplitude_phi", 1.0);
  if (!(c.amplitude_phi > 0.0)) r.fail("amplitude_phi", "must be positive");

  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    c.categories.counts[i] = static_cast<int>(r.integer(kCategoryKeys[i]));
  }

  c.dim = static_cast<int>(r.integer("dim"));
  if (c.dim != 3) r.fail("dim", "only 3-D simulation is supported");

  c.grid.theta_min_deg = r.real("theta_min_deg");
  c.grid.theta_max_deg = r.real("theta_max_deg");
  c.grid.phi_min_deg = r.real("phi_min_deg");
  c.grid.phi_max_deg = r.real("phi_max_deg");
  if (c.grid.theta_min_deg < 0.0 || c.grid.theta_max_deg > 180.0 ||
      !(c.grid.theta_max_deg > c.grid.theta_min_deg)) {
    r.fail("theta_max_deg", "theta range must be a non-empty part of [0, 180]");
  }
  if (c.grid.phi_min_deg < 0.0 || c.grid.phi_max_deg > 360.0 ||
      !(c.grid.phi_max_deg > c.grid.phi_min_deg)) {
    r.fail("phi_max_deg", "phi range must be a non-empty part of [0, 360]");
  }
  c.grid.n_theta = r.count("n_theta", 1);
  c.grid.n_phi = r.count("n_phi", 1);

  c.trace.n_steps = r.count("n_steps", 1);
  c.trace.r_max = r.count("r_max", 1);
  c.trace.dt = r.real("dt_s");
  if (!(c.trace.dt > 0.0)) r.fail("dt_s", "must be positive");

  c.n_obs = r.count("n_obs", 1);
  c.source = r.vec3("source");

  const bool has_grid = r.has("obs_origin");
  const bool has_file = r.has("obs_file");
  if (has_grid == has_file) {
    throw InputError("config needs exactly one observer spec: obs_origin/obs_u/obs_v/obs_nu/obs_nv or obs_file");
  }
  if (has_grid) {
    ObserverGrid g;
    g.origin = r.vec3("obs_origin");
    g.u = r.vec3("obs_u");
    g.v = r.vec3("obs_v");
    g.nu = r.count("obs_nu", 1);
    g.nv = r.count("obs_nv", 1);
    if (g.count() != c.n_obs) {
      r.fail("n_obs", "grid holds " + std::to_string(g.count()) + " points");
    }
    c.obs_grid = g;
  } else {
    c.obs_file = r.raw("obs_file");
  }

  if (r.has("mode")) c.plan.mode = parse_mode(r.raw("mode"));
  c.plan.workers = r.count_or("workers", 1, 1);
  c.plan.split_threshold = r.count_or("split_threshold", 1, kDefaultSplitThreshold);
  c.plan.memory_budget = r.count_or("memory_budget", 0, 0);

  c.probe.x_min = r.real_or("probe_x_min", c.probe.x_min);
  c.probe.x_max = r.real_or("probe_x_max", c.probe.x_max);
  c.probe.z = r.real_or("probe_z", c.probe.z);
  c.probe.n = r.count_or("probe_n", 1, c.probe.n);
  if (!(c.probe.x_max >= c.probe.x_min)) r.fail("probe_x_max", "must be >= probe_x_min");

  c.calib_n_theta = r.count_or("calib_n_theta", 64, c.calib_n_theta);
  c.calib_n_phi = r.count_or("calib_n_phi", 64, c.calib_n_phi);
  if (r.has("calib_freqs_hz")) {
    c.calib_freqs_hz = r.list("calib_freqs_hz");
    for (double f : c.calib_freqs_hz) {
      if (!(f > 0.0)) r.fail("calib_freqs_hz", "frequencies must be positive");
    }
  }

  r.reject_unused();
  return c;
}

CaseConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path.string());
  return parse_config(in, path.parent_path());
}

std::string echo_config(const CaseConfig& c) {
  std::ostringstream o;
  o << "ta_c = " << num(c.ta_c) << "\n";
  o << "hr_pct = " << num(c.hr_pct) << "\n";
  o << "pa_atm = " << num(c.pa_atm) << "\n";
  o << "f_s = " << c.freqs_hz.size() << "\n";
  o << "freqs_hz = " << num_list(c.freqs_hz) << "\n";
  o << "im_b = " << num(c.im_b) << "\n";
  if (c.beam_eps_m) o << "beam_eps_m = " << num(*c.beam_eps_m) << "\n";
  o << "amplitude_phi = " << num(c.amplitude_phi) << "\n";
  for (std::size_t i = 0; i < kCategoryCount; ++i) {
    o << kCategoryKeys[i] << " = " << c.categories.counts[i] << "\n";
  }
  o << "dim = " << c.dim << "\n";
  o << "theta_min_deg = " << num(c.grid.theta_min_deg) << "\n";
  o << "theta_max_deg = " << num(c.grid.theta_max_deg) << "\n";
  o << "phi_min_deg = " << num(c.grid.phi_min_deg) << "\n";
  o << "phi_max_deg = " << num(c.grid.phi_max_deg) << "\n";
  o << "n_theta = " << c.grid.n_theta << "\n";
  o << "n_phi = " << c.grid.n_phi << "\n";
  o << "n_steps = " << c.trace.n_steps << "\n";
  o << "r_max = " << c.trace.r_max << "\n";
  o << "dt_s = " << num(c.trace.dt) << "\n";
  o << "n_obs = " << c.n_obs << "\n";
  o << "source = " << vec(c.source) << "\n";
  if (c.obs_grid) {
    o << "obs_origin = " << vec(c.obs_grid->origin) << "\n";
    o << "obs_u = " << vec(c.obs_grid->u) << "\n";
    o << "obs_v = " << vec(c.obs_grid->v) << "\n";
    o << "obs_nu = " << c.obs_grid->nu << "\n";
    o << "obs_nv = " << c.obs_grid->nv << "\n";
  }
  if (c.obs_file) o << "obs_file = " << *c.obs_file << "\n";
  o << "mode = " << mode_name(c.plan.mode) << "\n";
  o << "workers = " << c.plan.workers << "\n";
  o << "split_threshold = " << c.plan.split_threshold << "\n";
  o << "memory_budget = " << c.plan.memory_budget << "\n";
  o << "probe_x_min = " << num(c.probe.x_min) << "\n";
  o << "probe_x_max = " << num(c.probe.x_max) << "\n";
  o << "probe_z = " << num(c.probe.z) << "\n";
  o << "probe_n = " << c.probe.n << "\n";
  o << "calib_n_theta = " << c.calib_n_theta << "\n";
  o << "calib_n_phi = " << c.calib_n_phi << "\n";
  if (!c.calib_freqs_hz.empty()) o << "calib_freqs_hz = " << num_list(c.calib_freqs_hz) << "\n";
  return o.str();
}

std::vector<Vec3> load_observers(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open observer file " + path.string());
  std::vector<Vec3> pts;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    std::string body = line.substr(0, hash);
    for (char& ch : body) {
      if (ch == ',') ch = ' ';
    }
    std::istringstream ls(body);
    Vec3 p;
    if (!(ls >> p.x())) continue;
    std::string extra;
    if (!(ls >> p.y() >> p.z()) || (ls >> extra) || !p.allFinite()) {
      throw InputError("observer file line " + std::to_string(line_no) + ": expected 'x y z'");
    }
    pts.push_back(p);
  }
  return pts;
}

}  // namespace gbt
