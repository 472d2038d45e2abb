#include "dfdse/io.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <sstream>

#include "dfdse/caps_hms.hpp"

namespace dfdse {

namespace {

double unit_factor(const std::string& unit) {
  static const std::map<std::string, double> units = {
      {"", 1},         {"B", 1},          {"kB", 1e3},          {"KB", 1e3},         {"MB", 1e6},
      {"GB", 1e9},     {"KiB", 1024.0},   {"MiB", 1048576.0},   {"GiB", 1073741824.0}};
  auto it = units.find(unit);
  return it == units.end() ? -1 : it->second;
}

double parse_quantity(const json& v, const std::string& where, bool rate) {
  if (v.is_number()) return v.get<double>();
  if (!v.is_string()) throw InputError(where, "expected a number or a unit string");
  static const std::regex re(R"(^\s*([0-9]+(?:\.[0-9]+)?(?:[eE][+-]?[0-9]+)?)\s*([A-Za-z]*)(/s)?\s*$)");
  const std::string s = v.get<std::string>();
  std::smatch m;
  if (!std::regex_match(s, m, re)) throw InputError(where, "cannot parse quantity '" + s + "'");
  if (m[3].matched != rate) throw InputError(where, rate ? "bandwidth needs a '/s' unit" : "unexpected '/s' unit");
  const double f = unit_factor(m[2].str());
  if (f < 0) throw InputError(where, "unknown unit '" + m[2].str() + "'");
  return std::stod(m[1].str()) * f;
}

std::optional<Bytes> parse_memory(const json& v, const std::string& where) {
  if (v.is_null() || (v.is_string() && v.get<std::string>() == "unbounded")) return std::nullopt;
  return parse_bytes(v, where);
}

template <class T>
T field(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key)) throw InputError(where, std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InputError(where, std::string("field '") + key + "' has the wrong type");
  }
}

template <class T>
T field_or(const json& j, const char* key, T fallback, const std::string& where) {
  return j.contains(key) ? field<T>(j, key, where) : fallback;
}

std::string_view kind_name(TaskKind k) {
  switch (k) {
    case TaskKind::Actor: return "actor";
    case TaskKind::Write: return "write";
    case TaskKind::Read: return "read";
  }
  return "?";
}

}  // namespace

Bytes parse_bytes(const json& v, const std::string& where) {
  return static_cast<Bytes>(std::llround(parse_quantity(v, where, false)));
}

double parse_bandwidth(const json& v, const std::string& where) { return parse_quantity(v, where, true); }

json read_json_file(const std::filesystem::path& p) {
  std::ifstream f(p);
  if (!f) throw InputError(p.string(), "cannot open file");
  try {
    return json::parse(f);
  } catch (const json::parse_error& e) {
    throw InputError(p.string(), e.what());
  }
}

void write_text_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(p, std::ios::binary);
  f << text;
  if (!f) throw std::runtime_error("cannot write " + p.string());
}

ApplicationGraph application_from_json(const json& j) {
  ApplicationGraph app;
  if (!j.is_object()) throw InputError("application", "expected an object");
  for (const auto& a : field<json>(j, "actors", "application")) {
    Actor actor;
    actor.id = field<std::string>(a, "id", "actor");
    const std::string where = "actor " + actor.id;
    const json exec = field<json>(a, "exec_times", where);
    for (const auto& [type, t] : exec.items()) {
      if (!t.is_number_integer()) throw InputError(where, "execution time for " + type + " must be an integer");
      actor.exec_times[type] = t.get<Ticks>();
    }
    try {
      app.add_actor(std::move(actor));
    } catch (const ModelError& e) {
      throw InputError(where, e.what());
    }
  }
  for (const auto& c : field<json>(j, "channels", "application")) {
    Channel ch;
    ch.id = field<std::string>(c, "id", "channel");
    const std::string where = "channel " + ch.id;
    ch.delay = field_or<int>(c, "delay", 0, where);
    ch.capacity = field<int>(c, "capacity", where);
    ch.token_bytes = parse_bytes(field<json>(c, "token_size", where), where);
    ch.is_mrb = field_or<bool>(c, "mrb", false, where);
    ch.decision_from = field_or<std::string>(c, "decision_from", "", where);
    std::vector<std::string> consumers;
    if (c.contains("consumers")) {
      consumers = field<std::vector<std::string>>(c, "consumers", where);
    } else {
      consumers.push_back(field<std::string>(c, "consumer", where));
    }
    const auto producer = field<std::string>(c, "producer", where);
    try {
      app.add_channel(std::move(ch));
      const std::string id = field<std::string>(c, "id", "channel");
      app.add_write(producer, id);
      for (const auto& a : consumers) app.add_read(id, a);
    } catch (const ModelError& e) {
      throw InputError(where, e.what());
    }
  }
  return app;
}

json application_to_json(const ApplicationGraph& app) {
  json j;
  j["actors"] = json::array();
  for (const auto& [id, a] : app.actors()) {
    json e;
    e["id"] = id;
    e["exec_times"] = json::object();
    for (const auto& [type, t] : a.exec_times) e["exec_times"][type] = t;
    j["actors"].push_back(e);
  }
  j["channels"] = json::array();
  for (const auto& [id, c] : app.channels()) {
    json e;
    e["id"] = id;
    auto prod = app.producers(id);
    e["producer"] = prod.empty() ? "" : prod.front();
    e["consumers"] = app.consumers(id);
    e["delay"] = c.delay;
    e["capacity"] = c.capacity;
    e["token_size"] = c.token_bytes;
    if (c.is_mrb) e["mrb"] = true;
    if (!c.decision_from.empty()) e["decision_from"] = c.decision_from;
    j["channels"].push_back(e);
  }
  return j;
}

ArchitectureGraph architecture_from_json(const json& j) {
  ArchitectureGraph arch;
  if (!j.is_object()) throw InputError("architecture", "expected an object");
  try {
    if (j.contains("tick_seconds")) arch.set_tick_seconds(field<double>(j, "tick_seconds", "architecture"));
    for (const auto& t : field<json>(j, "core_types", "architecture")) {
      const auto id = field<std::string>(t, "id", "core type");
      arch.add_core_type(id, field<double>(t, "cost", "core type " + id));
    }
    const json defaults = j.value("defaults", json::object());
    auto pick = [&](const json& obj, const char* key, const char* dkey) -> json {
      if (obj.contains(key)) return obj.at(key);
      if (defaults.contains(dkey)) return defaults.at(dkey);
      throw InputError("architecture", std::string("no value or default for '") + key + "'");
    };
    const json noc = field<json>(j, "noc", "architecture");
    arch.set_noc(noc.value("id", std::string("h_NoC")), parse_bandwidth(field<json>(noc, "bandwidth", "noc"), "noc"));
    if (j.contains("global_memory")) arch.set_global_memory(field<std::string>(j.at("global_memory"), "id", "global memory"));
    for (const auto& t : field<json>(j, "tiles", "architecture")) {
      const auto id = field<std::string>(t, "id", "tile");
      const std::string where = "tile " + id;
      const int ti = arch.add_tile(id, parse_memory(pick(t, "memory", "tile_memory"), where),
                                   parse_bandwidth(pick(t, "crossbar_bandwidth", "crossbar_bandwidth"), where),
                                   t.value("memory_id", std::string()), t.value("crossbar_id", std::string()));
      for (const auto& c : field<json>(t, "cores", where)) {
        const auto cid = field<std::string>(c, "id", "core");
        arch.add_core(ti, cid, field<std::string>(c, "type", "core " + cid),
                      parse_memory(pick(c, "memory", "core_memory"), "core " + cid), c.value("memory_id", std::string()));
      }
    }
  } catch (const ModelError& e) {
    throw InputError("architecture", e.what());
  }
  return arch;
}

SpecificationGraph load_spec(const std::filesystem::path& app, const std::filesystem::path& arch) {
  SpecificationGraph s;
  s.app = application_from_json(read_json_file(app));
  s.arch = architecture_from_json(read_json_file(arch));
  return s;
}

Genotype genotype_from_json(const json& j, const Problem& problem) {
  Genotype g;
  const json xi = j.value("xi", json::object());
  for (const auto& a : problem.multicast_actors()) {
    bool bit = false;
    if (xi.contains(a)) {
      const auto& v = xi.at(a);
      bit = v.is_boolean() ? v.get<bool>() : v.get<int>() != 0;
    }
    g.xi.push_back(bit);
  }
  for (const auto& [key, v] : xi.items())
    if (std::find(problem.multicast_actors().begin(), problem.multicast_actors().end(), key) ==
        problem.multicast_actors().end())
      throw InputError("genotype", key + " is not a multi-cast actor");
  const json dec = j.value("decisions", json::object());
  for (const auto& c : problem.channel_ids()) {
    ChannelDecision d = ChannelDecision::Global;
    if (dec.contains(c)) {
      auto p = parse_decision(dec.at(c).get<std::string>());
      if (!p) throw InputError("genotype", "unknown channel decision for " + c);
      d = *p;
    }
    g.decisions.push_back(d);
  }
  const json bind = field<json>(j, "binding", "genotype");
  const auto& arch = problem.spec().arch;
  for (const auto& a : problem.actor_ids()) {
    if (!bind.contains(a)) throw InputError("genotype", "actor " + a + " has no core");
    auto core = arch.find_core(bind.at(a).get<std::string>());
    if (!core) throw InputError("genotype", "actor " + a + " bound to an unknown core");
    g.binding.push_back(*core);
  }
  try {
    problem.check(g);
  } catch (const std::invalid_argument& e) {
    throw InputError("genotype", e.what());
  }
  return g;
}

json genotype_to_json(const Genotype& g, const Problem& problem) {
  json j;
  j["xi"] = json::object();
  for (std::size_t i = 0; i < g.xi.size(); ++i) j["xi"][problem.multicast_actors()[i]] = g.xi[i] ? 1 : 0;
  j["decisions"] = json::object();
  for (std::size_t i = 0; i < g.decisions.size(); ++i)
    j["decisions"][problem.channel_ids()[i]] = std::string(to_string(g.decisions[i]));
  j["binding"] = json::object();
  for (std::size_t i = 0; i < g.binding.size(); ++i)
    j["binding"][problem.actor_ids()[i]] = problem.spec().arch.cores()[g.binding[i]].id;
  return j;
}

json trace_to_json(const TaskSet& ts, const Schedule& s) {
  json j;
  j["period"] = s.period;
  j["resources"] = ts.resource_names;
  j["core_count"] = ts.core_count;
  j["channels"] = json::array();
  for (std::size_t c = 0; c < ts.channel_names.size(); ++c)
    j["channels"].push_back({{"id", ts.channel_names[c]}, {"delay", ts.channel_delay[c]}});
  j["tasks"] = json::array();
  for (std::size_t t = 0; t < ts.tasks.size(); ++t) {
    const Task& tk = ts.tasks[t];
    json e;
    e["name"] = tk.name;
    e["kind"] = std::string(kind_name(tk.kind));
    e["actor"] = tk.actor;
    e["channel"] = tk.channel;
    e["duration"] = tk.duration;
    e["resources"] = json::array();
    for (int r : tk.resources) e["resources"].push_back(ts.resource_names[r]);
    e["start"] = s.start.at(t);
    e["segments"] = json::array();
    if (tk.duration > 0 && tk.duration <= s.period && s.period > 0)
      for (const auto& iv : f_wrap(s.period, s.start[t], tk.duration)) e["segments"].push_back({iv.begin, iv.end});
    j["tasks"].push_back(e);
  }
  return j;
}

std::pair<TaskSet, Schedule> trace_from_json(const json& j) {
  TaskSet ts;
  Schedule s;
  s.period = field<Ticks>(j, "period", "trace");
  ts.resource_names = field<std::vector<std::string>>(j, "resources", "trace");
  ts.core_count = field<int>(j, "core_count", "trace");
  for (const auto& c : field<json>(j, "channels", "trace")) {
    ts.channel_names.push_back(field<std::string>(c, "id", "trace channel"));
    ts.channel_delay.push_back(field<int>(c, "delay", "trace channel"));
  }
  for (const auto& e : field<json>(j, "tasks", "trace")) {
    Task t;
    t.name = field<std::string>(e, "name", "trace task");
    const auto kind = field<std::string>(e, "kind", t.name);
    if (kind == "actor")
      t.kind = TaskKind::Actor;
    else if (kind == "write")
      t.kind = TaskKind::Write;
    else if (kind == "read")
      t.kind = TaskKind::Read;
    else
      throw InputError(t.name, "unknown task kind " + kind);
    t.actor = field<int>(e, "actor", t.name);
    t.channel = field<int>(e, "channel", t.name);
    t.duration = field<Ticks>(e, "duration", t.name);
    for (const auto& r : field<std::vector<std::string>>(e, "resources", t.name)) {
      auto it = std::find(ts.resource_names.begin(), ts.resource_names.end(), r);
      if (it == ts.resource_names.end()) throw InputError(t.name, "unknown resource " + r);
      t.resources.push_back(static_cast<int>(it - ts.resource_names.begin()));
    }
    s.start.push_back(field<Ticks>(e, "start", t.name));
    ts.tasks.push_back(std::move(t));
  }
  try {
    ts.rebuild_indices(static_cast<int>(ts.channel_names.size()));
  } catch (const std::out_of_range&) {
    throw InputError("trace", "task refers to an unknown channel, actor or resource");
  }
  return {std::move(ts), std::move(s)};
}

json report_to_json(const ValidationReport& r) {
  json j = json::array();
  for (const auto& v : r) j.push_back({{"code", v.code}, {"element", v.element}, {"message", v.message}});
  return j;
}

std::string gantt_svg(const TaskSet& ts, const Schedule& s, const std::string& title) {
  const int unit = 48;
  const int row_h = 30;
  const int left = 90;
  const int top = 40;
  std::vector<int> rows;
  for (std::size_t r = 0; r < ts.on_resource.size(); ++r) {
    bool busy = false;
    for (int t : ts.on_resource[r]) busy = busy || ts.tasks[t].duration > 0;
    if (busy) rows.push_back(static_cast<int>(r));
  }
  const Ticks P = std::max<Ticks>(s.period, 1);
  const long width = left + P * unit + 20;
  const long height = top + static_cast<long>(rows.size()) * row_h + 30;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
     << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  os << "<text x=\"4\" y=\"16\" font-size=\"13\">" << title << " (P = " << s.period << ")</text>\n";
  for (Ticks k = 0; k <= P; ++k)
    os << "<line x1=\"" << left + k * unit << "\" y1=\"" << top - 6 << "\" x2=\"" << left + k * unit << "\" y2=\""
       << height - 24 << "\" stroke=\"#ddd\"/><text x=\"" << left + k * unit - 3 << "\" y=\"" << height - 10
       << "\">" << k << "</text>\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const int r = rows[i];
    const long y = top + static_cast<long>(i) * row_h;
    os << "<text x=\"4\" y=\"" << y + 19 << "\">" << ts.resource_names[r] << "</text>\n";
    for (int t : ts.on_resource[r]) {
      const Task& tk = ts.tasks[t];
      if (tk.duration == 0 || tk.duration > P) continue;
      const char* fill = tk.kind == TaskKind::Actor ? "#f4b6b6" : tk.kind == TaskKind::Write ? "#7ccf7c" : "#c9f0c9";
      for (const auto& iv : f_wrap(P, s.start[t], tk.duration)) {
        os << "<rect x=\"" << left + iv.begin * unit << "\" y=\"" << y + 3 << "\" width=\"" << (iv.end - iv.begin) * unit
           << "\" height=\"" << row_h - 6 << "\" fill=\"" << fill << "\" stroke=\"#333\"/>";
        os << "<text x=\"" << left + iv.begin * unit + 3 << "\" y=\"" << y + 19 << "\">" << tk.name << "</text>\n";
      }
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace dfdse
