#include "acstar/instance_io.hpp"

#include <json.hpp>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <initializer_list>
#include <numbers>
#include <sstream>

namespace acstar {

using nlohmann::json;

namespace {

std::string number(double v) {
  if (!std::isfinite(v)) throw FormatError("cannot serialize a non-finite number");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quoted(const std::string& s) { return json(s).dump(); }

void require_keys(const json& obj, const std::string& where, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional = {}) {
  if (!obj.is_object()) throw FormatError(where + ": expected an object");
  for (const char* key : required)
    if (!obj.contains(key)) throw FormatError(where + ": missing key \"" + key + "\"");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const char* k : required) known = known || key == k;
    for (const char* k : optional) known = known || key == k;
    if (!known) throw FormatError(where + ": unknown key \"" + key + "\"");
  }
}

double get_number(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw FormatError(where + ": \"" + key + "\" must be a number");
  return v.get<double>();
}

std::string get_string(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_string()) throw FormatError(where + ": \"" + key + "\" must be a string");
  return v.get<std::string>();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

NetworkInstance parse_instance(const std::string& text) {
  const json doc = parse_json(text);
  require_keys(doc, "instance", {"buses", "lines"});
  if (!doc["buses"].is_array() || !doc["lines"].is_array())
    throw FormatError("instance: \"buses\" and \"lines\" must be arrays");

  NetworkInstance net;
  for (std::size_t i = 0; i < doc["buses"].size(); ++i) {
    const json& b = doc["buses"][i];
    const std::string where = "buses[" + std::to_string(i) + "]";
    if (!b.is_object()) throw FormatError(where + ": expected an object");
    const std::string kind = b.contains("kind") && b["kind"].is_string() ? b["kind"].get<std::string>() : "";
    if (kind == "generator") {
      require_keys(b, where, {"id", "kind"});
      net.buses.push_back(Bus::generator(get_string(b, "id", where)));
    } else if (kind == "load") {
      require_keys(b, where, {"id", "kind"}, {"p_demand", "q_demand"});
      net.buses.push_back(Bus::load(get_string(b, "id", where),
                                    b.contains("p_demand") ? get_number(b, "p_demand", where) : 0.0,
                                    b.contains("q_demand") ? get_number(b, "q_demand", where) : 0.0));
    } else {
      throw FormatError(where + ": \"kind\" must be \"generator\" or \"load\"");
    }
  }
  for (std::size_t i = 0; i < doc["lines"].size(); ++i) {
    const json& l = doc["lines"][i];
    const std::string where = "lines[" + std::to_string(i) + "]";
    require_keys(l, where, {"from", "to", "susceptance", "conductance", "delta_max"});
    net.lines.push_back({get_string(l, "from", where), get_string(l, "to", where),
                         {get_number(l, "susceptance", where), get_number(l, "conductance", where),
                          get_number(l, "delta_max", where)}});
  }

  if (auto violations = validate_network(net); !violations.empty()) {
    const Violation& v = violations.front();
    throw FormatError("invalid network: " + (v.element.empty() ? "" : v.element + ": ") + v.message);
  }
  return net;
}

std::string serialize_instance(const NetworkInstance& net) {
  std::ostringstream out;
  out << "{\n  \"buses\": [";
  for (std::size_t i = 0; i < net.buses.size(); ++i) {
    const Bus& b = net.buses[i];
    out << (i ? ",\n" : "\n") << "    {\"id\": " << quoted(b.id);
    if (b.kind == BusKind::Generator) {
      out << ", \"kind\": \"generator\"}";
    } else {
      out << ", \"kind\": \"load\", \"p_demand\": " << number(b.p_demand)
          << ", \"q_demand\": " << number(b.q_demand) << "}";
    }
  }
  out << "\n  ],\n  \"lines\": [";
  for (std::size_t i = 0; i < net.lines.size(); ++i) {
    const Line& l = net.lines[i];
    out << (i ? ",\n" : "\n") << "    {\"from\": " << quoted(l.from) << ", \"to\": " << quoted(l.to)
        << ", \"susceptance\": " << number(l.params.susceptance)
        << ", \"conductance\": " << number(l.params.conductance)
        << ", \"delta_max\": " << number(l.params.delta_max) << "}";
  }
  out << "\n  ]\n}\n";
  return out.str();
}

PhaseSolution parse_solution(const std::string& text) {
  const json doc = parse_json(text);
  require_keys(doc, "solution", {"angles_rad"});
  const json& angles = doc["angles_rad"];
  if (!angles.is_object()) throw FormatError("solution: \"angles_rad\" must be an object");
  PhaseSolution sol;
  for (const auto& [id, value] : angles.items()) {
    if (!value.is_number()) throw FormatError("solution: angle for \"" + id + "\" must be a number");
    sol.angles[id] = value.get<double>();
  }
  return sol;
}

std::string serialize_solution(const PhaseSolution& sol) {
  std::ostringstream out;
  out << "{\n  \"angles_rad\": {";
  bool first = true;
  for (const auto& [id, theta] : sol.angles) {
    out << (first ? "\n" : ",\n") << "    " << quoted(id) << ": " << number(theta);
    first = false;
  }
  out << "\n  }\n}\n";
  return out.str();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path.string());
  out << text;
  if (!out) throw FormatError("failed writing " + path.string());
}

double parse_angle(const std::string& raw) {
  std::string text;
  for (char c : raw)
    if (!std::isspace(static_cast<unsigned char>(c))) text += c;
  if (text.empty()) throw FormatError("empty angle");

  auto parse_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw FormatError("bad angle \"" + raw + "\"");
    }
    if (used != s.size() || !std::isfinite(v)) throw FormatError("bad angle \"" + raw + "\"");
    return v;
  };

  const auto pi_pos = text.find("pi");
  if (pi_pos == std::string::npos) return parse_double(text);

  // [sign][coef[*]]pi[/den]
  std::string coef = text.substr(0, pi_pos);
  if (!coef.empty() && coef.back() == '*') coef.pop_back();
  double factor = 1.0;
  if (coef == "-") factor = -1.0;
  else if (coef == "+" || coef.empty()) factor = 1.0;
  else factor = parse_double(coef);

  const std::string rest = text.substr(pi_pos + 2);
  double denominator = 1.0;
  if (!rest.empty()) {
    if (rest[0] != '/') throw FormatError("bad angle \"" + raw + "\"");
    denominator = parse_double(rest.substr(1));
    if (denominator == 0.0) throw FormatError("bad angle \"" + raw + "\": division by zero");
  }
  return factor * std::numbers::pi / denominator;
}

}  // namespace acstar
