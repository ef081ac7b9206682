#include "spshift/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "spshift/exceptions.hpp"

namespace spshift {

using nlohmann::json;

namespace {

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw ValidationError("config field '" + field + "': " + what);
}

template <class T>
T get_as(const json& j, const std::string& field) {
  try {
    return j.get<T>();
  } catch (const json::exception&) {
    field_error(field, "wrong type (" + std::string(j.type_name()) + ")");
  }
}

std::string location(const std::string& text, std::size_t byte) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

std::string variant_name(GreensVariant v) { return v == GreensVariant::m1 ? "m1" : "m2"; }

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ValidationError("config syntax error at " + location(text, e.byte > 0 ? e.byte - 1 : 0) + ": " + e.what());
  }
  if (!j.is_object()) throw ValidationError("config: top level must be a JSON object");

  RunConfig c;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    const json& v = it.value();
    const bool null = v.is_null();
    if (k == "example") c.example = get_as<std::string>(v, k);
    else if (k == "epsilon") c.epsilon = get_as<double>(v, k);
    else if (k == "epsilons") c.epsilons = get_as<std::vector<double>>(v, k);
    else if (k == "m") c.m = null ? std::nullopt : std::optional<int>(get_as<int>(v, k));
    else if (k == "q") c.q = get_as<std::vector<int>>(v, k);
    else if (k == "N") c.N = get_as<std::vector<int>>(v, k);
    else if (k == "bmesh") {
      try {
        c.bmesh = layer_family_from_string(get_as<std::string>(v, k));
      } catch (const ValidationError& e) {
        field_error(k, e.what());
      }
    } else if (k == "imesh") {
      try {
        c.imesh = mesh_family_from_string(get_as<std::string>(v, k));
      } catch (const ValidationError& e) {
        field_error(k, e.what());
      }
    } else if (k == "sigma") c.sigma = null ? std::nullopt : std::optional<double>(get_as<double>(v, k));
    else if (k == "weak_exponent") c.weak_exponent = null ? std::nullopt : std::optional<double>(get_as<double>(v, k));
    else if (k == "d") c.d = null ? std::nullopt : std::optional<double>(get_as<double>(v, k));
    else if (k == "out") c.out = get_as<std::string>(v, k);
    else if (k == "cache_dir") c.cache_dir = null ? std::nullopt : std::optional<std::string>(get_as<std::string>(v, k));
    else if (k == "q_ref") c.q_ref = get_as<int>(v, k);
    else if (k == "N_ref") c.N_ref = get_as<int>(v, k);
    else if (k == "samples_per_cell") c.samples_per_cell = get_as<int>(v, k);
    else if (k == "variant") {
      const auto s = get_as<std::string>(v, k);
      if (s == "m1") c.variant = GreensVariant::m1;
      else if (s == "m2") c.variant = GreensVariant::m2;
      else field_error(k, "expected \"m1\" or \"m2\", got \"" + s + "\"");
    } else if (k == "b") c.b = get_as<double>(v, k);
    else if (k == "c") c.c = get_as<double>(v, k);
    else if (k == "seed") c.seed = get_as<std::uint64_t>(v, k);
    else if (k == "check") c.check = get_as<bool>(v, k);
    else field_error(k, "unknown key");
  }
  validate(c);
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c) {
  json j;
  j["example"] = c.example;
  j["epsilon"] = c.epsilon;
  j["epsilons"] = c.epsilons;
  j["m"] = opt(c.m);
  j["q"] = c.q;
  j["N"] = c.N;
  j["bmesh"] = to_string(c.bmesh);
  j["imesh"] = to_string(c.imesh);
  j["sigma"] = opt(c.sigma);
  j["weak_exponent"] = opt(c.weak_exponent);
  j["d"] = opt(c.d);
  j["out"] = c.out;
  j["cache_dir"] = opt(c.cache_dir);
  j["q_ref"] = c.q_ref;
  j["N_ref"] = c.N_ref;
  j["samples_per_cell"] = c.samples_per_cell;
  j["variant"] = variant_name(c.variant);
  j["b"] = c.b;
  j["c"] = c.c;
  j["seed"] = c.seed;
  j["check"] = c.check;
  return j.dump(2) + "\n";
}

void validate(const RunConfig& c) {
  if (c.example != "ex1" && c.example != "ex2") field_error("example", "unknown example \"" + c.example + "\"");
  if (!(c.epsilon > 0.0 && c.epsilon <= 1.0)) field_error("epsilon", "must lie in (0,1]");
  for (std::size_t i = 0; i < c.epsilons.size(); ++i)
    if (!(c.epsilons[i] > 0.0 && c.epsilons[i] <= 1.0))
      field_error("epsilons[" + std::to_string(i) + "]", "must lie in (0,1]");
  if (c.m && *c.m != 1 && *c.m != 2) field_error("m", "must be 1 or 2");
  if (c.q.empty()) field_error("q", "empty list");
  for (std::size_t i = 0; i < c.q.size(); ++i)
    if (c.q[i] < 1 || c.q[i] > 8) field_error("q[" + std::to_string(i) + "]", "degree must lie in 1..8");
  if (c.N.empty()) field_error("N", "empty list");
  for (std::size_t i = 0; i < c.N.size(); ++i)
    if (c.N[i] < 8 || c.N[i] % 8 != 0)
      field_error("N[" + std::to_string(i) + "]", std::to_string(c.N[i]) + " is not a positive multiple of 8");
  if (c.sigma && !(*c.sigma > 0.0)) field_error("sigma", "must be positive");
  if (c.weak_exponent && !(*c.weak_exponent > 0.0 && *c.weak_exponent < 1.0))
    field_error("weak_exponent", "must lie in (0,1)");
  if (c.q_ref < 1) field_error("q_ref", "must be >= 1");
  if (c.N_ref < 8 || c.N_ref % 8 != 0) field_error("N_ref", "must be a positive multiple of 8");
  if (c.samples_per_cell < 1) field_error("samples_per_cell", "must be >= 1");
  if (!(c.b > 0.0)) field_error("b", "must be positive");
  if (!(c.c > 0.0)) field_error("c", "must be positive");
}

std::vector<double> parse_double_list(const std::string& text, const std::string& field) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      field_error(field, "cannot parse \"" + item + "\" as a number");
    }
  }
  if (out.empty()) field_error(field, "empty list");
  return out;
}

std::vector<int> parse_int_list(const std::string& text, const std::string& field) {
  std::vector<int> out;
  for (double v : parse_double_list(text, field)) {
    if (v != static_cast<int>(v)) field_error(field, "expected integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

}  // namespace spshift
