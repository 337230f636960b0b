#include "ppf/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

#include "ppf/error.hpp"

namespace ppf::io {

namespace {

[[noreturn]] void bad_key(const std::string& key, const std::string& why) {
  throw Error(ErrorCode::InvalidConfig, key + ": " + why);
}

double get_number(const json& j, const std::string& key, const std::string& path) {
  const auto& v = j.at(key);
  if (!v.is_number()) bad_key(path, "expected a number");
  return v.get<double>();
}

InitialCondition ic_from_json(const json& j) {
  if (!j.is_object()) bad_key("ic", "expected an object");
  static const std::vector<std::string> allowed{"kind", "eps", "lambda", "alpha", "beta", "x0"};
  for (const auto& [k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) bad_key("ic." + k, "unknown key");
  if (!j.contains("kind") || !j["kind"].is_string()) bad_key("ic.kind", "expected one of gaussian, exp_decay, oscillatory");
  const std::string kind = j["kind"];
  InitialCondition ic;
  if (kind == "gaussian") {
    ic.kind = InitialCondition::Kind::Gaussian;
  } else if (kind == "exp_decay") {
    ic.kind = InitialCondition::Kind::ExpDecay;
  } else if (kind == "oscillatory") {
    ic.kind = InitialCondition::Kind::Oscillatory;
  } else {
    bad_key("ic.kind", "unknown kind '" + kind + "'");
  }
  const std::pair<const char*, double*> fields[] = {
      {"eps", &ic.eps}, {"lambda", &ic.lambda}, {"alpha", &ic.alpha}, {"beta", &ic.beta}, {"x0", &ic.x0}};
  for (auto [k, dst] : fields)
    if (j.contains(k)) *dst = get_number(j, k, std::string("ic.") + k);
  return ic;
}

}  // namespace

const char* version() { return PPF_VERSION; }

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

SimConfig config_from_json(const json& j) {
  if (!j.is_object()) bad_key("<root>", "expected a JSON object");
  SimConfig c;
  static const std::vector<std::string> allowed{"nonlinearity", "u_u",           "ic",
                                                "L",            "dx",            "dt",
                                                "t_end",        "snapshot_times", "front_threshold",
                                                "divergence_threshold", "diagnostics_every"};
  for (const auto& [k, v] : j.items())
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) bad_key(k, "unknown key");
  if (j.contains("nonlinearity")) {
    if (!j["nonlinearity"].is_string()) bad_key("nonlinearity", "expected a string");
    c.nonlinearity = j["nonlinearity"].get<std::string>();
    try {
      Nonlinearity::from_name(c.nonlinearity);
    } catch (const Error&) {
      bad_key("nonlinearity", "unknown name '" + c.nonlinearity + "'");
    }
  }
  const std::pair<const char*, double*> fields[] = {{"u_u", &c.u_u},
                                                     {"L", &c.L},
                                                     {"dx", &c.dx},
                                                     {"dt", &c.dt},
                                                     {"t_end", &c.t_end},
                                                     {"front_threshold", &c.front_threshold},
                                                     {"divergence_threshold", &c.divergence_threshold}};
  for (auto [k, dst] : fields)
    if (j.contains(k)) *dst = get_number(j, k, k);
  if (j.contains("diagnostics_every")) {
    if (!j["diagnostics_every"].is_number_integer()) bad_key("diagnostics_every", "expected an integer");
    c.diagnostics_every = j["diagnostics_every"].get<int>();
  }
  if (j.contains("ic")) c.ic = ic_from_json(j["ic"]);
  if (j.contains("snapshot_times")) {
    if (!j["snapshot_times"].is_array()) bad_key("snapshot_times", "expected an array of numbers");
    for (const auto& v : j["snapshot_times"]) {
      if (!v.is_number()) bad_key("snapshot_times", "expected an array of numbers");
      c.snapshot_times.push_back(v.get<double>());
    }
  }
  c.validate();
  return c;
}

json config_to_json(const SimConfig& c) {
  json ic{{"kind", to_string(c.ic.kind)}, {"eps", c.ic.eps}};
  switch (c.ic.kind) {
    case InitialCondition::Kind::Gaussian:
      break;
    case InitialCondition::Kind::ExpDecay:
      ic["lambda"] = c.ic.lambda;
      break;
    case InitialCondition::Kind::Oscillatory:
      ic["alpha"] = c.ic.alpha;
      ic["beta"] = c.ic.beta;
      ic["x0"] = c.ic.x0;
      break;
  }
  return json{{"nonlinearity", c.nonlinearity},
              {"u_u", c.u_u},
              {"ic", ic},
              {"L", c.L},
              {"dx", c.dx},
              {"dt", c.dt},
              {"t_end", c.t_end},
              {"snapshot_times", c.snapshot_times},
              {"front_threshold", c.front_threshold},
              {"divergence_threshold", c.divergence_threshold},
              {"diagnostics_every", c.diagnostics_every}};
}

SimConfig load_config(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::MissingInput, "config file not found: " + path.string());
  json j;
  try {
    j = read_json(path);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  return config_from_json(j);
}

std::string config_hash(const SimConfig& config) {
  const std::string text = config_to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

json to_json(const FrontPrediction& p) {
  return json{{"Phi_u", p.Phi_u},
              {"xi_star", p.xi_star},
              {"xi_star_bisection", p.xi_star_bisection},
              {"p_star", {{"re", p.p_star.real()}, {"im", p.p_star.imag()}}},
              {"lambda_star", p.lambda_star},
              {"F_star", {{"re", p.F_star.real()}, {"im", p.F_star.imag()}}},
              {"T", p.T},
              {"X", p.X},
              {"D", {{"re", p.D.real()}, {"im", p.D.imag()}}},
              {"nu", p.nu},
              {"newton_iterations", p.newton_iterations}};
}

SnapshotFiles write_snapshot(const fs::path& dir, int index, const FieldState& state, const std::string& hash) {
  char stem[32];
  std::snprintf(stem, sizeof stem, "snapshot_%04d", index);
  SnapshotFiles files{dir / (std::string(stem) + ".csv"), dir / (std::string(stem) + ".json")};
  std::ofstream out(files.csv);
  if (!out) throw Error(ErrorCode::MissingInput, "cannot write " + files.csv.string());
  out << "x,u\n";
  for (int i = 0; i < state.grid.n; ++i) out << format_double(state.grid.x(i)) << ',' << format_double(state.u[i]) << '\n';
  write_json(files.sidecar, json{{"t", state.t},
                                 {"step_count", state.step_count},
                                 {"mass", mass(state)},
                                 {"first_moment", first_moment(state)},
                                 {"config_hash", hash},
                                 {"L", state.grid.L},
                                 {"n", state.grid.n}});
  return files;
}

std::vector<FieldState> read_snapshots(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error(ErrorCode::MissingInput, "not a directory: " + dir.string());
  static const std::regex pattern(R"(snapshot_(\d+)\.json)");
  std::vector<std::pair<int, fs::path>> found;
  for (const auto& entry : fs::directory_iterator(dir)) {
    std::smatch m;
    const std::string name = entry.path().filename().string();
    if (std::regex_match(name, m, pattern)) found.emplace_back(std::stoi(m[1]), entry.path());
  }
  if (found.empty()) throw Error(ErrorCode::MissingInput, "no snapshots in " + dir.string());
  std::sort(found.begin(), found.end());
  std::vector<FieldState> out;
  for (const auto& [index, sidecar] : found) {
    const json meta = read_json(sidecar);
    FieldState s;
    s.t = meta.at("t").get<double>();
    s.step_count = meta.at("step_count").get<long>();
    s.grid = Grid1D::from_nodes(meta.at("L").get<double>(), meta.at("n").get<int>());
    fs::path csv = sidecar;
    csv.replace_extension(".csv");
    std::ifstream in(csv);
    if (!in) throw Error(ErrorCode::MissingInput, "missing " + csv.string());
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw Error(ErrorCode::InvalidConfig, "malformed row in " + csv.string());
      s.u.push_back(std::stod(line.substr(comma + 1)));
    }
    if (static_cast<int>(s.u.size()) != s.grid.n)
      throw Error(ErrorCode::InvalidConfig, csv.string() + ": row count does not match sidecar n");
    out.push_back(std::move(s));
  }
  return out;
}

void write_diagnostics(const fs::path& path, const DiagnosticsTrace& d) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::MissingInput, "cannot write " + path.string());
  out << "t,mass,first_moment,max_abs,u_max,u_min,right_front,left_front\n";
  for (std::size_t k = 0; k < d.size(); ++k) {
    out << format_double(d.t[k]) << ',' << format_double(d.mass[k]) << ',' << format_double(d.first_moment[k]) << ','
        << format_double(d.max_abs[k]) << ',' << format_double(d.u_max[k]) << ',' << format_double(d.u_min[k]) << ','
        << format_double(d.right_front[k]) << ',' << format_double(d.left_front[k]) << '\n';
  }
}

DiagnosticsTrace read_diagnostics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingInput, "missing " + path.string());
  DiagnosticsTrace d;
  std::string line;
  std::getline(in, line);
  auto parse = [](const std::string& cell) {
    if (cell == "nan") return std::numeric_limits<double>::quiet_NaN();
    return std::stod(cell);
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(parse(cell));
    if (row.size() != 8) throw Error(ErrorCode::InvalidConfig, "malformed row in " + path.string());
    d.t.push_back(row[0]);
    d.mass.push_back(row[1]);
    d.first_moment.push_back(row[2]);
    d.max_abs.push_back(row[3]);
    d.u_max.push_back(row[4]);
    d.u_min.push_back(row[5]);
    d.right_front.push_back(row[6]);
    d.left_front.push_back(row[7]);
  }
  return d;
}

json RunManifest::to_json() const {
  return json{{"config_hash", config_hash}, {"tool_version", tool_version}, {"command", command},
              {"outputs", outputs},         {"wall_time", wall_time},       {"status", status},
              {"message", message}};
}

RunManifest RunManifest::from_json(const json& j) {
  RunManifest m;
  m.config_hash = j.value("config_hash", "");
  m.tool_version = j.value("tool_version", "");
  m.command = j.value("command", "");
  m.outputs = j.value("outputs", std::vector<std::string>{});
  m.wall_time = j.value("wall_time", 0.0);
  m.status = j.value("status", "ok");
  m.message = j.value("message", "");
  return m;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::MissingInput, "cannot write " + path.string());
  out << j.dump(2) << '\n';
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::MissingInput, "missing " + path.string());
  return json::parse(in);
}

}  // namespace ppf::io
