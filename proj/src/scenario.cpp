#include "pursuit/scenario.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pursuit/error.hpp"

#ifndef PURSUIT_DEFAULT_SCENARIO_DIR
#define PURSUIT_DEFAULT_SCENARIO_DIR "scenarios"
#endif

namespace pursuit {

using nlohmann::json;

namespace {

// Collects schema violations while walking the document so a single load
// reports every problem at once.
class Reader {
 public:
  std::vector<Violation> violations;

  void fail(const std::string &path, const std::string &reason) {
    violations.push_back({path, reason});
  }

  const json *member(const json &obj, const std::string &path,
                     const char *key, bool required) {
    if (!obj.is_object()) return nullptr;
    const auto it = obj.find(key);
    if (it == obj.end()) {
      if (required) fail(path + "." + key, "missing required field");
      return nullptr;
    }
    return &*it;
  }

  std::optional<double> number(const json &obj, const std::string &path,
                               const char *key, bool required) {
    const json *v = member(obj, path, key, required);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      fail(path + "." + key, "expected a number");
      return std::nullopt;
    }
    return v->get<double>();
  }

  std::optional<Vec2> point(const json &v, const std::string &path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() ||
        !v[1].is_number()) {
      fail(path, "expected [x, y]");
      return std::nullopt;
    }
    return Vec2{v[0].get<double>(), v[1].get<double>()};
  }

  std::optional<std::vector<std::vector<int>>> id_lists(
      const json &v, const std::string &path,
      const std::vector<PursuerInit> &pursuers) {
    if (!v.is_array()) {
      fail(path, "expected a list of {id, neighbors} entries");
      return std::nullopt;
    }
    std::vector<std::vector<int>> out(pursuers.size());
    std::vector<bool> seen(pursuers.size(), false);
    for (std::size_t k = 0; k < v.size(); ++k) {
      const std::string at = path + "[" + std::to_string(k) + "]";
      const json &entry = v[k];
      const json *id = member(entry, at, "id", true);
      const json *nb = member(entry, at, "neighbors", true);
      if (!id || !nb) continue;
      if (!id->is_number_integer() || !nb->is_array()) {
        fail(at, "expected integer id and neighbor id list");
        continue;
      }
      const int self = id->get<int>();
      const auto pos = index_of(pursuers, self);
      if (!pos) {
        fail(at + ".id", "unknown pursuer id " + std::to_string(self));
        continue;
      }
      seen[*pos] = true;
      for (const json &j : *nb) {
        if (!j.is_number_integer() || !index_of(pursuers, j.get<int>())) {
          fail(at + ".neighbors", "unknown pursuer id " + j.dump());
          continue;
        }
        out[*pos].push_back(j.get<int>());
      }
    }
    for (std::size_t i = 0; i < pursuers.size(); ++i) {
      if (!seen[i]) {
        fail(path, "no entry for pursuer id " + std::to_string(pursuers[i].id));
      }
    }
    return out;
  }

  static std::optional<std::size_t> index_of(
      const std::vector<PursuerInit> &pursuers, int id) {
    for (std::size_t i = 0; i < pursuers.size(); ++i) {
      if (pursuers[i].id == id) return i;
    }
    return std::nullopt;
  }
};

json to_json(const Vec2 &v) { return json::array({v.x, v.y}); }

json id_lists_to_json(const std::vector<std::vector<int>> &lists,
                      const std::vector<PursuerInit> &pursuers) {
  json out = json::array();
  for (std::size_t i = 0; i < lists.size(); ++i) {
    out.push_back({{"id", pursuers[i].id}, {"neighbors", lists[i]}});
  }
  return out;
}

std::string format_violations(const std::vector<Violation> &vs) {
  std::ostringstream msg;
  msg << "invalid scenario:";
  for (const Violation &v : vs) msg << "\n  " << v.path << ": " << v.reason;
  return msg.str();
}

}  // namespace

std::string_view to_string(ControlMode mode) {
  return mode == ControlMode::kSp5 ? "sp5" : "sp2";
}

std::optional<ControlMode> parse_control_mode(std::string_view name) {
  if (name == "sp2") return ControlMode::kSp2;
  if (name == "sp5") return ControlMode::kSp5;
  return std::nullopt;
}

double lambda_min(const ScenarioDoc &doc) {
  double out = 1.0;
  for (const PursuerInit &p : doc.pursuers) {
    out = std::min(out, p.max_speed / doc.evader.max_speed);
  }
  return out;
}

std::vector<Violation> validate(const ScenarioDoc &doc) {
  std::vector<Violation> v;
  auto fail = [&v](std::string path, std::string reason) {
    v.push_back({std::move(path), std::move(reason)});
  };

  if (doc.pursuers.empty()) fail("pursuers", "at least one pursuer required");
  if (!(doc.evader.max_speed > 0.0)) {
    fail("evader.max_speed", "must be > 0");
  }
  if (!(doc.evader.flee_gain >= 0.0)) {
    fail("evader.flee_gain", "must be >= 0");
  }
  if (!is_finite(doc.evader_position)) {
    fail("evader.position", "must be finite");
  }
  if (!(doc.d_c > 0.0)) fail("capture.d_c", "must be > 0");

  std::set<int> ids;
  for (std::size_t i = 0; i < doc.pursuers.size(); ++i) {
    const PursuerInit &p = doc.pursuers[i];
    const std::string at = "pursuers[" + std::to_string(i) + "]";
    if (!ids.insert(p.id).second) {
      fail(at + ".id", "duplicate id " + std::to_string(p.id));
    }
    if (!is_finite(p.position)) fail(at + ".position", "must be finite");
    if (!(p.max_speed > 0.0)) {
      fail(at + ".max_speed", "must be > 0");
    } else if (doc.evader.max_speed > 0.0 &&
               !(p.max_speed < doc.evader.max_speed)) {
      fail(at + ".max_speed",
           "speed ratio to the evader must be < 1 (pursuers are slower)");
    }
    if (doc.d_c > 0.0 && !(distance(p.position, doc.evader_position) > doc.d_c)) {
      fail(at + ".position", "must start farther than d_c from the evader");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (doc.pursuers[j].position == p.position) {
        fail(at + ".position", "coincides with pursuers[" +
                                   std::to_string(j) + "]");
      }
    }
  }

  if (doc.fields) {
    const FieldParams &f = *doc.fields;
    if (!(f.r_o > 0.0)) fail("fields.R_o", "must be > 0");
    if (!(f.r_o < f.r_b)) fail("fields.R_b", "ordering R_o < R_b violated");
    if (!(f.r_b < f.r_c)) fail("fields.R_b", "ordering R_b < R_c violated");
    if (!(f.r_c < f.r_f)) fail("fields.R_c", "ordering R_c < R_f violated");
    if (!(f.b > 0.0)) fail("fields.b", "must be > 0");
  }
  if (doc.sim.mode == ControlMode::kSp5 && !doc.fields) {
    fail("fields", "required when sim.mode is sp5");
  }
  if (!(doc.neighbor.sensing_radius > 0.0)) {
    fail("neighbor.sensing_radius", "must be > 0");
  }
  auto check_lists = [&](const std::optional<std::vector<std::vector<int>>> &l,
                         const std::string &name) {
    if (!l) return;
    if (l->size() != doc.pursuers.size()) {
      fail("neighbor." + name, "must have one entry per pursuer");
      return;
    }
    for (std::size_t i = 0; i < l->size(); ++i) {
      for (int id : (*l)[i]) {
        if (!ids.count(id)) {
          fail("neighbor." + name + "[" + std::to_string(i) + "]",
               "unknown pursuer id " + std::to_string(id));
        } else if (id == doc.pursuers[i].id) {
          fail("neighbor." + name + "[" + std::to_string(i) + "]",
               "a pursuer cannot list itself");
        }
      }
    }
  };
  check_lists(doc.neighbor.omega, "omega");
  check_lists(doc.neighbor.polygon, "polygon");
  if (doc.neighbor.polygon) {
    for (std::size_t i = 0; i < doc.neighbor.polygon->size(); ++i) {
      if ((*doc.neighbor.polygon)[i].size() != 2 && doc.pursuers.size() >= 3) {
        fail("neighbor.polygon[" + std::to_string(i) + "]",
             "a polygon vertex has exactly two neighbors");
      }
    }
  }

  if (doc.evader.strategy == EvaderStrategy::kScripted &&
      doc.evader.waypoints.empty()) {
    fail("evader.waypoints", "scripted strategy needs at least one waypoint");
  }
  if (!(doc.sim.dt > 0.0)) fail("sim.dt", "must be > 0");
  if (!(doc.sim.horizon > doc.sim.dt)) fail("sim.horizon", "must exceed dt");
  return v;
}

void require_valid(const ScenarioDoc &doc) {
  const auto violations = validate(doc);
  if (!violations.empty()) {
    throw Error(ErrorKind::kValidation, format_violations(violations));
  }
}

ScenarioDoc parse_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::kParse, std::string("scenario: ") + e.what());
  }
  if (!root.is_object()) {
    throw Error(ErrorKind::kParse, "scenario: top level must be an object");
  }

  Reader rd;
  ScenarioDoc doc;
  if (const json *name = rd.member(root, "", "name", false)) {
    if (name->is_string()) doc.name = name->get<std::string>();
  }

  if (const json *ps = rd.member(root, "", "pursuers", true)) {
    if (!ps->is_array()) rd.fail("pursuers", "expected a list");
    for (std::size_t i = 0; ps->is_array() && i < ps->size(); ++i) {
      const std::string at = "pursuers[" + std::to_string(i) + "]";
      const json &p = (*ps)[i];
      PursuerInit init;
      init.id = static_cast<int>(i + 1);
      if (const json *id = rd.member(p, at, "id", false)) {
        if (id->is_number_integer()) {
          init.id = id->get<int>();
        } else {
          rd.fail(at + ".id", "expected an integer");
        }
      }
      if (const json *pos = rd.member(p, at, "position", true)) {
        if (auto v = rd.point(*pos, at + ".position")) init.position = *v;
      }
      init.max_speed = rd.number(p, at, "max_speed", true).value_or(0.0);
      doc.pursuers.push_back(init);
    }
  }

  if (const json *ev = rd.member(root, "", "evader", true)) {
    if (const json *pos = rd.member(*ev, "evader", "position", true)) {
      if (auto v = rd.point(*pos, "evader.position")) doc.evader_position = *v;
    }
    doc.evader.max_speed = rd.number(*ev, "evader", "max_speed", true).value_or(0.0);
    doc.evader.flee_gain =
        rd.number(*ev, "evader", "flee_gain", false).value_or(140.0);
    if (const json *s = rd.member(*ev, "evader", "strategy", false)) {
      const auto parsed =
          s->is_string() ? parse_evader_strategy(s->get<std::string>())
                         : std::nullopt;
      if (parsed) {
        doc.evader.strategy = *parsed;
      } else {
        rd.fail("evader.strategy",
                "expected one of flee, static, scripted, external, random");
      }
    }
    if (const json *o = rd.member(*ev, "evader", "origin_term", false)) {
      if (o->is_boolean()) {
        doc.evader.origin_term = o->get<bool>();
      } else {
        rd.fail("evader.origin_term", "expected a boolean");
      }
    }
    if (const json *w = rd.member(*ev, "evader", "waypoints", false)) {
      if (!w->is_array()) rd.fail("evader.waypoints", "expected a list");
      for (std::size_t k = 0; w->is_array() && k < w->size(); ++k) {
        if (auto v = rd.point((*w)[k],
                              "evader.waypoints[" + std::to_string(k) + "]")) {
          doc.evader.waypoints.push_back(*v);
        }
      }
    }
    doc.evader.retarget_interval =
        rd.number(*ev, "evader", "retarget_interval", false).value_or(1.0);
  }

  if (const json *cap = rd.member(root, "", "capture", true)) {
    doc.d_c = rd.number(*cap, "capture", "d_c", true).value_or(0.0);
  }

  if (const json *f = rd.member(root, "", "fields", false)) {
    FieldParams fp;
    fp.r_c = rd.number(*f, "fields", "R_c", true).value_or(0.0);
    fp.r_f = rd.number(*f, "fields", "R_f", true).value_or(0.0);
    fp.r_o = rd.number(*f, "fields", "R_o", true).value_or(0.0);
    fp.r_b = rd.number(*f, "fields", "R_b", true).value_or(0.0);
    fp.b = rd.number(*f, "fields", "b", false).value_or(1.0);
    doc.fields = fp;
  }

  if (const json *nb = rd.member(root, "", "neighbor", false)) {
    doc.neighbor.sensing_radius =
        rd.number(*nb, "neighbor", "sensing_radius", false).value_or(100.0);
    if (const json *o = rd.member(*nb, "neighbor", "omega", false)) {
      doc.neighbor.omega = rd.id_lists(*o, "neighbor.omega", doc.pursuers);
    }
    if (const json *p = rd.member(*nb, "neighbor", "polygon", false)) {
      doc.neighbor.polygon = rd.id_lists(*p, "neighbor.polygon", doc.pursuers);
    }
  }

  if (const json *sim = rd.member(root, "", "sim", false)) {
    doc.sim.dt = rd.number(*sim, "sim", "dt", false).value_or(0.01);
    doc.sim.horizon = rd.number(*sim, "sim", "horizon", false).value_or(200.0);
    if (const json *m = rd.member(*sim, "sim", "mode", false)) {
      const auto parsed = m->is_string()
                              ? parse_control_mode(m->get<std::string>())
                              : std::nullopt;
      if (parsed) {
        doc.sim.mode = *parsed;
      } else {
        rd.fail("sim.mode", "expected sp2 or sp5");
      }
    }
    if (const json *s = rd.member(*sim, "sim", "seed", false)) {
      if (s->is_number_unsigned()) {
        doc.sim.seed = s->get<std::uint64_t>();
      } else {
        rd.fail("sim.seed", "expected a non-negative integer");
      }
    }
  }

  // Semantic checks on fields that already failed structurally would only
  // repeat the complaint.
  for (const Violation &v : validate(doc)) {
    bool repeated = false;
    for (const Violation &seen : rd.violations) {
      repeated = repeated || v.path.rfind(seen.path, 0) == 0 ||
                 seen.path.rfind(v.path, 0) == 0;
    }
    if (!repeated) rd.violations.push_back(v);
  }
  if (!rd.violations.empty()) {
    throw Error(ErrorKind::kValidation, format_violations(rd.violations));
  }
  return doc;
}

ScenarioDoc load_scenario(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open scenario " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    ScenarioDoc doc = parse_scenario(buf.str());
    if (doc.name.empty()) doc.name = path.stem().string();
    return doc;
  } catch (const Error &e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

std::string dump_scenario(const ScenarioDoc &doc) {
  json root;
  root["name"] = doc.name;
  json ps = json::array();
  for (const PursuerInit &p : doc.pursuers) {
    ps.push_back({{"id", p.id},
                  {"position", to_json(p.position)},
                  {"max_speed", p.max_speed}});
  }
  root["pursuers"] = ps;
  json ev{{"position", to_json(doc.evader_position)},
          {"max_speed", doc.evader.max_speed},
          {"strategy", std::string(to_string(doc.evader.strategy))},
          {"flee_gain", doc.evader.flee_gain},
          {"origin_term", doc.evader.origin_term},
          {"retarget_interval", doc.evader.retarget_interval}};
  if (!doc.evader.waypoints.empty()) {
    json w = json::array();
    for (const Vec2 &p : doc.evader.waypoints) w.push_back(to_json(p));
    ev["waypoints"] = w;
  }
  root["evader"] = ev;
  root["capture"] = {{"d_c", doc.d_c}};
  if (doc.fields) {
    root["fields"] = {{"R_c", doc.fields->r_c},
                      {"R_f", doc.fields->r_f},
                      {"R_o", doc.fields->r_o},
                      {"R_b", doc.fields->r_b},
                      {"b", doc.fields->b}};
  }
  json nb{{"sensing_radius", doc.neighbor.sensing_radius}};
  if (doc.neighbor.omega) {
    nb["omega"] = id_lists_to_json(*doc.neighbor.omega, doc.pursuers);
  }
  if (doc.neighbor.polygon) {
    nb["polygon"] = id_lists_to_json(*doc.neighbor.polygon, doc.pursuers);
  }
  root["neighbor"] = nb;
  root["sim"] = {{"dt", doc.sim.dt},
                 {"horizon", doc.sim.horizon},
                 {"mode", std::string(to_string(doc.sim.mode))},
                 {"seed", doc.sim.seed}};
  return root.dump(2);
}

void save_scenario(const ScenarioDoc &doc, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot write scenario " + path.string());
  }
  out << dump_scenario(doc) << '\n';
  if (!out) throw Error(ErrorKind::kIo, "write failed: " + path.string());
}

std::filesystem::path resolve_scenario_path(std::string_view name_or_path) {
  namespace fs = std::filesystem;
  const fs::path given(name_or_path);
  if (fs::exists(given)) return given;
  if (given.has_parent_path()) return given;
  std::vector<fs::path> dirs;
  if (const char *env = std::getenv("PURSUIT_SCENARIO_DIR")) {
    dirs.emplace_back(env);
  }
  dirs.emplace_back(PURSUIT_DEFAULT_SCENARIO_DIR);
  for (const fs::path &dir : dirs) {
    for (const fs::path &candidate :
         {dir / given, dir / (std::string(name_or_path) + ".json")}) {
      if (fs::exists(candidate)) return candidate;
    }
  }
  return given;
}

}  // namespace pursuit
