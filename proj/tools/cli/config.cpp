#include "cubeval/config.hpp"

#include <charconv>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "cubeval/errors.hpp"

namespace cubeval::cli {
namespace {

template <class T>
T parse_integer(const std::string& key, const std::string& v) {
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) {
    throw InvalidInput("config: bad integer for '" + key + "': " + v);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  std::istringstream is(v);
  double out = 0;
  is >> out;
  if (!is || !is.eof()) throw InvalidInput("config: bad number for '" + key + "': " + v);
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw InvalidInput("config: bad boolean for '" + key + "': " + v);
}

std::string show(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  std::function<std::string(const ExperimentConfig&)> get;
  std::function<void(ExperimentConfig&, const std::string&, const std::string&)> set;
};

template <class T>
Field integer(T ExperimentConfig::*member) {
  return {[member](const ExperimentConfig& c) { return std::to_string(c.*member); },
          [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.*member = parse_integer<T>(k, v);
          }};
}

Field real(double ExperimentConfig::*member) {
  return {[member](const ExperimentConfig& c) { return show(c.*member); },
          [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.*member = parse_double(k, v);
          }};
}

Field text(std::string ExperimentConfig::*member) {
  return {[member](const ExperimentConfig& c) { return c.*member; },
          [member](ExperimentConfig& c, const std::string&, const std::string& v) {
            c.*member = v;
          }};
}

Field flag(bool ExperimentConfig::*member) {
  return {[member](const ExperimentConfig& c) { return std::string(c.*member ? "true" : "false"); },
          [member](ExperimentConfig& c, const std::string& k, const std::string& v) {
            c.*member = parse_bool(k, v);
          }};
}

const std::vector<std::pair<std::string, Field>>& fields() {
  static const std::vector<std::pair<std::string, Field>> table = {
      {"command", text(&ExperimentConfig::command)},
      {"form", text(&ExperimentConfig::form)},
      {"x", integer(&ExperimentConfig::x)},
      {"y", real(&ExperimentConfig::y)},
      {"q", integer(&ExperimentConfig::q)},
      {"a1", integer(&ExperimentConfig::a1)},
      {"a2", integer(&ExperimentConfig::a2)},
      {"z", real(&ExperimentConfig::z)},
      {"mode", text(&ExperimentConfig::mode)},
      {"pmax", integer(&ExperimentConfig::pmax)},
      {"dmax", integer(&ExperimentConfig::dmax)},
      {"umax", real(&ExperimentConfig::umax)},
      {"step", real(&ExperimentConfig::step)},
      {"threads", integer(&ExperimentConfig::threads)},
      {"coprime", flag(&ExperimentConfig::coprime)},
      {"bound", integer(&ExperimentConfig::bound)},
      {"kmax", integer(&ExperimentConfig::kmax)},
      {"p", integer(&ExperimentConfig::p)},
      {"k", integer(&ExperimentConfig::k)},
      {"g1", integer(&ExperimentConfig::g1)},
      {"g2", integer(&ExperimentConfig::g2)},
      {"restricted", flag(&ExperimentConfig::restricted)},
      {"gmax", integer(&ExperimentConfig::gmax)},
      {"level", text(&ExperimentConfig::level)},
      {"csv", text(&ExperimentConfig::csv)},
      {"seed", integer(&ExperimentConfig::seed)},
  };
  return table;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::string ExperimentConfig::serialize() const {
  std::string out;
  for (const auto& [key, field] : fields()) out += key + "=" + field.get(*this) + "\n";
  return out;
}

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
  ExperimentConfig c;
  c.merge(text);
  return c;
}

void ExperimentConfig::merge(const std::string& text) {
  static const std::map<std::string, const Field*> index = [] {
    std::map<std::string, const Field*> m;
    for (const auto& [key, field] : fields()) m.emplace(key, &field);
    return m;
  }();
  std::set<std::string> seen;
  std::istringstream is(text);
  std::string line;
  int number = 0;
  while (std::getline(is, line)) {
    ++number;
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw InvalidInput("config line " + std::to_string(number) + ": expected key=value");
    }
    const std::string key = trim(line.substr(0, eq)), value = trim(line.substr(eq + 1));
    const auto it = index.find(key);
    if (it == index.end()) throw InvalidInput("config: unknown key '" + key + "'");
    if (!seen.insert(key).second) throw InvalidInput("config: duplicate key '" + key + "'");
    it->second->set(*this, key, value);
  }
}

}  // namespace cubeval::cli
