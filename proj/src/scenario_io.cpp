#include "lorasg/scenario_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <utility>
#include <vector>

#include <json.hpp>

namespace lorasg::scenario_io {

namespace {

using nlohmann::json;

constexpr double kPi = 3.14159265358979323846;

const std::vector<std::pair<int, double>> kPresetTable1 = {
    {12, -137.0}, {11, -135.0}, {10, -133.0}, {9, -130.0},
    {8, -127.0},  {7, -124.0},  {6, -121.0}};

const std::vector<std::pair<int, double>> kPresetRecommended = {
    {12, -137.0}, {11, -135.0}, {10, -133.0}, {9, -131.0},
    {8, -129.0},  {7, -126.0},  {6, -121.0}};

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string lower(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::invalid_argument(where + ": " + what);
}

double as_number(const json& v, const std::string& where) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    const std::string s = trim(v.get<std::string>());
    try {
      size_t used = 0;
      double x = std::stod(s, &used);
      if (used == s.size()) return x;
    } catch (const std::exception&) {
    }
  }
  fail(where, "expected a number");
}

long as_integer(const json& v, const std::string& where) {
  double x = as_number(v, where);
  if (std::floor(x) != x || std::fabs(x) > 9e15) fail(where, "expected an integer");
  return static_cast<long>(x);
}

std::uint64_t as_uint64(const json& v, const std::string& where) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    auto x = v.get<std::int64_t>();
    if (x < 0) fail(where, "expected a nonnegative integer");
    return static_cast<std::uint64_t>(x);
  }
  if (v.is_string()) {
    const std::string s = trim(v.get<std::string>());
    try {
      size_t used = 0;
      std::uint64_t x = std::stoull(s, &used);
      if (used == s.size() && s.find('-') == std::string::npos) return x;
    } catch (const std::exception&) {
    }
  }
  fail(where, "expected a nonnegative integer");
}

bool as_bool(const json& v, const std::string& where) {
  if (v.is_boolean()) return v.get<bool>();
  if (v.is_string()) {
    const std::string s = lower(trim(v.get<std::string>()));
    if (s == "true" || s == "on" || s == "yes" || s == "1") return true;
    if (s == "false" || s == "off" || s == "no" || s == "0") return false;
  }
  fail(where, "expected a boolean");
}

std::string as_text(const json& v, const std::string& where) {
  if (v.is_string()) return trim(v.get<std::string>());
  fail(where, "expected a string");
}

// returns nullptr when the section or key is absent
const json* find_key(const json& root, const char* section, const char* key) {
  auto s = root.find(section);
  if (s == root.end()) return nullptr;
  auto k = s->find(key);
  if (k == s->end()) return nullptr;
  return &*k;
}

double num_or(const json& root, const char* section, const char* key, double dflt) {
  const json* v = find_key(root, section, key);
  return v ? as_number(*v, std::string("[") + section + "] " + key) : dflt;
}

void check_keys(const json& root, const std::string& section,
                const std::set<std::string>& allowed) {
  auto s = root.find(section);
  if (s == root.end()) return;
  if (!s->is_object()) fail("[" + section + "]", "expected a key/value table");
  for (const auto& item : s->items()) {
    if (section == "classes" && item.key().rfind("sf", 0) == 0) continue;
    if (!allowed.count(item.key()))
      fail("[" + section + "]", "unknown key '" + item.key() + "'");
  }
}

int parse_cr(const json& v) {
  const std::string where = "[radio] cr";
  if (v.is_number_integer()) {
    long c = v.get<long>();
    if (c >= 1 && c <= 4) return static_cast<int>(c);
    fail(where, "expected 4/5..4/8 or 1..4");
  }
  const std::string s = as_text(v, where);
  if (s == "4/5") return 1;
  if (s == "4/6") return 2;
  if (s == "4/7") return 3;
  if (s == "4/8") return 4;
  if (s.size() == 1 && s[0] >= '1' && s[0] <= '4') return s[0] - '0';
  fail(where, "expected 4/5..4/8 or 1..4");
}

channel::FadingKind parse_fading(const json& v) {
  const std::string s = lower(as_text(v, "[channel] fading"));
  if (s == "none") return channel::FadingKind::None;
  if (s == "rayleigh") return channel::FadingKind::Rayleigh;
  if (s == "lognormal" || s == "log-normal" || s == "log_normal")
    return channel::FadingKind::LogNormal;
  fail("[channel] fading", "expected none, rayleigh, or lognormal");
}

LoadedScenario apply(const json& root) {
  if (!root.is_object()) fail("configuration", "root must be a key/value table");
  static const std::set<std::string> kSections = {"network", "channel", "radio",
                                                  "classes", "sim"};
  for (const auto& item : root.items())
    if (!kSections.count(item.key()))
      fail("configuration", "unknown section '" + item.key() + "'");
  check_keys(root, "network",
             {"n_nodes", "lambda_s", "lambda_t", "alpha", "norm_radius_m"});
  check_keys(root, "channel",
             {"beta", "hata_antenna_height_m", "kappa", "p_tr_dbm", "fading",
              "sigma_db"});
  check_keys(root, "radio",
             {"bw_hz", "n_preamble_extra", "payload_bytes", "header",
              "low_rate_opt", "cr"});
  check_keys(root, "classes", {"preset"});
  check_keys(root, "sim", {"replications", "seed", "tail_epsilon",
                           "disk_truncation_m", "workers"});

  LoadedScenario out;
  analytic::Scenario& scn = out.scenario;

  scn.alpha = num_or(root, "network", "alpha", 0.0);
  scn.norm_radius_m = num_or(root, "network", "norm_radius_m", 8000.0);
  scn.lambda_t = num_or(root, "network", "lambda_t", 0.001);
  const json* jn = find_key(root, "network", "n_nodes");
  const json* jl = find_key(root, "network", "lambda_s");
  if (jn && jl)
    fail("[network]", "n_nodes and lambda_s are mutually exclusive");
  if (jl) {
    scn.lambda_s = as_number(*jl, "[network] lambda_s");
  } else {
    double n = jn ? as_number(*jn, "[network] n_nodes") : 1000.0;
    if (!(n >= 0.0)) fail("[network] n_nodes", "must be nonnegative");
    out.n_nodes = n;
    scn.lambda_s = lambda_s_for_nodes(n, scn.alpha, scn.norm_radius_m);
  }

  const json* jb = find_key(root, "channel", "beta");
  const json* jh = find_key(root, "channel", "hata_antenna_height_m");
  if (jb && jh)
    fail("[channel]", "beta and hata_antenna_height_m are mutually exclusive");
  if (jh) {
    scn.pathloss.beta =
        channel::hata_exponent(as_number(*jh, "[channel] hata_antenna_height_m"));
  } else if (jb) {
    scn.pathloss.beta = as_number(*jb, "[channel] beta");
  }
  scn.pathloss.kappa = num_or(root, "channel", "kappa", scn.pathloss.kappa);
  scn.p_tr_mw = channel::dbm_to_mw(num_or(root, "channel", "p_tr_dbm", 10.0));
  if (const json* jf = find_key(root, "channel", "fading"))
    scn.fading.kind = parse_fading(*jf);
  scn.fading.sigma_db = num_or(root, "channel", "sigma_db", scn.fading.sigma_db);

  scn.radio.bandwidth_hz = num_or(root, "radio", "bw_hz", scn.radio.bandwidth_hz);
  if (const json* v = find_key(root, "radio", "n_preamble_extra"))
    scn.radio.n_preamble_extra =
        static_cast<int>(as_integer(*v, "[radio] n_preamble_extra"));
  if (const json* v = find_key(root, "radio", "payload_bytes"))
    scn.radio.payload_bytes =
        static_cast<int>(as_integer(*v, "[radio] payload_bytes"));
  if (const json* v = find_key(root, "radio", "header")) {
    const std::string s = lower(as_text(*v, "[radio] header"));
    if (s == "present")
      scn.radio.header_present = true;
    else if (s == "absent")
      scn.radio.header_present = false;
    else
      fail("[radio] header", "expected present or absent");
  }
  if (const json* v = find_key(root, "radio", "low_rate_opt"))
    scn.radio.low_rate_opt = as_bool(*v, "[radio] low_rate_opt");
  if (const json* v = find_key(root, "radio", "cr")) scn.radio.cr_code = parse_cr(*v);

  std::vector<std::pair<int, double>> sf_dbm;
  const json* jp = find_key(root, "classes", "preset");
  bool has_explicit = false;
  if (auto s = root.find("classes"); s != root.end()) {
    for (const auto& item : s->items()) {
      const std::string& key = item.key();
      if (key.rfind("sf", 0) != 0) continue;
      has_explicit = true;
      const std::string where = "[classes] " + key;
      int sf = 0;
      try {
        size_t used = 0;
        sf = std::stoi(key.substr(2), &used);
        if (used != key.size() - 2) sf = 0;
      } catch (const std::exception&) {
        sf = 0;
      }
      if (sf < 6 || sf > 12) fail(where, "spreading factor must be sf6..sf12");
      sf_dbm.emplace_back(sf, as_number(item.value(), where));
    }
  }
  if (jp && has_explicit)
    fail("[classes]", "preset and explicit sf entries are mutually exclusive");
  if (jp) {
    const std::string name = lower(as_text(*jp, "[classes] preset"));
    if (name == "table1")
      sf_dbm = kPresetTable1;
    else if (name == "lora_recommended")
      sf_dbm = kPresetRecommended;
    else
      fail("[classes] preset", "expected table1 or lora_recommended");
  } else if (!has_explicit) {
    sf_dbm = kPresetTable1;
  }
  scn.classes = analytic::make_classes(scn.radio, sf_dbm);

  if (const json* v = find_key(root, "sim", "replications"))
    out.sim.replications = as_integer(*v, "[sim] replications");
  if (const json* v = find_key(root, "sim", "seed"))
    out.sim.seed = as_uint64(*v, "[sim] seed");
  if (const json* v = find_key(root, "sim", "tail_epsilon"))
    out.sim.tail_epsilon = as_number(*v, "[sim] tail_epsilon");
  if (const json* v = find_key(root, "sim", "disk_truncation_m"))
    out.sim.disk_truncation_m = as_number(*v, "[sim] disk_truncation_m");
  if (const json* v = find_key(root, "sim", "workers"))
    out.sim.workers = static_cast<int>(as_integer(*v, "[sim] workers"));

  analytic::validate(scn);
  montecarlo::validate(out.sim);
  return out;
}

json ini_to_json(std::istream& in) {
  json out = json::object();
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = "line " + std::to_string(lineno);
    size_t cut = line.find_first_of("#;");
    if (cut != std::string::npos) line.erase(cut);
    const std::string text = trim(line);
    if (text.empty()) continue;
    if (text.front() == '[') {
      if (text.back() != ']') fail(where, "unterminated section header");
      section = trim(text.substr(1, text.size() - 2));
      if (section.empty()) fail(where, "empty section name");
      if (out.contains(section)) fail(where, "duplicate section '" + section + "'");
      out[section] = json::object();
      continue;
    }
    size_t eq = text.find('=');
    if (eq == std::string::npos) fail(where, "expected key = value");
    const std::string key = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (key.empty()) fail(where, "empty key");
    if (value.empty()) fail(where, "missing value for '" + key + "'");
    if (section.empty()) fail(where, "key outside any section");
    if (out[section].contains(key)) fail(where, "duplicate key '" + key + "'");
    out[section][key] = value;
  }
  return out;
}

std::string fmt_g(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

}  // namespace

LoadedScenario load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open configuration file: " + path);
  bool is_json = path.size() >= 5 && lower(path.substr(path.size() - 5)) == ".json";
  return is_json ? parse_json(in) : parse_ini(in);
}

LoadedScenario parse_ini(std::istream& in) { return apply(ini_to_json(in)); }

LoadedScenario parse_json(std::istream& in) {
  json root;
  try {
    root = json::parse(in);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("JSON parse error: ") + e.what());
  }
  return apply(root);
}

double lambda_s_for_nodes(double n_nodes, double alpha, double norm_radius_m) {
  if (!(n_nodes >= 0.0) || !std::isfinite(n_nodes))
    throw std::invalid_argument("n_nodes must be nonnegative");
  if (!(alpha > -2.0)) throw std::invalid_argument("alpha must be greater than -2");
  if (!(norm_radius_m > 0.0))
    throw std::invalid_argument("norm_radius_m must be positive");
  double m = alpha + 2.0;
  return n_nodes * m / (2.0 * kPi * std::pow(norm_radius_m, m));
}

void set_node_count(LoadedScenario& loaded, double n_nodes) {
  loaded.scenario.lambda_s = lambda_s_for_nodes(n_nodes, loaded.scenario.alpha,
                                                loaded.scenario.norm_radius_m);
  loaded.n_nodes = n_nodes;
}

std::string resolved_scenario_header(const LoadedScenario& loaded) {
  const analytic::Scenario& scn = loaded.scenario;
  std::ostringstream out;
  out << "# network: n_nodes=";
  if (loaded.n_nodes)
    out << fmt_g(*loaded.n_nodes);
  else
    out << "none";
  out << " lambda_s=" << fmt_g(scn.lambda_s) << " lambda_t=" << fmt_g(scn.lambda_t)
      << " alpha=" << fmt_g(scn.alpha)
      << " norm_radius_m=" << fmt_g(scn.norm_radius_m) << "\n";
  out << "# channel: beta=" << fmt_g(scn.pathloss.beta)
      << " kappa=" << fmt_g(scn.pathloss.kappa)
      << " p_tr_dbm=" << fmt_g(channel::mw_to_dbm(scn.p_tr_mw)) << " fading=";
  switch (scn.fading.kind) {
    case channel::FadingKind::None:
      out << "none";
      break;
    case channel::FadingKind::Rayleigh:
      out << "rayleigh";
      break;
    case channel::FadingKind::LogNormal:
      out << "lognormal sigma_db=" << fmt_g(scn.fading.sigma_db);
      break;
  }
  out << "\n";
  out << "# radio: bw_hz=" << fmt_g(scn.radio.bandwidth_hz)
      << " n_preamble_extra=" << scn.radio.n_preamble_extra
      << " payload_bytes=" << scn.radio.payload_bytes
      << " header=" << (scn.radio.header_present ? "present" : "absent")
      << " low_rate_opt=" << (scn.radio.low_rate_opt ? "on" : "off") << " cr=4/"
      << scn.radio.cr_code + 4 << "\n";
  out << "# classes:";
  for (const analytic::SfClass& c : scn.classes)
    out << " sf" << c.sf << "=" << fmt_g(channel::mw_to_dbm(c.sensitivity_mw));
  out << " (dBm, ascending sensitivity)\n";
  out << "# sim: replications=" << loaded.sim.replications
      << " seed=" << loaded.sim.seed
      << " tail_epsilon=" << fmt_g(loaded.sim.tail_epsilon)
      << " disk_truncation_m=";
  if (loaded.sim.disk_truncation_m)
    out << fmt_g(*loaded.sim.disk_truncation_m);
  else
    out << "none";
  out << " workers=";
  if (loaded.sim.workers > 0)
    out << loaded.sim.workers;
  else
    out << "auto";
  out << "\n";
  out << "# note: received powers below the weakest sensitivity belong to no "
         "class; such arrivals are ignored by the model and the simulator\n";
  return out.str();
}

}  // namespace lorasg::scenario_io
