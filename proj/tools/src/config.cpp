// Copyright 2026 The nelsonfk Authors
// SPDX-License-Identifier: Apache-2.0

#include "config.hpp"

namespace nfk::cli {

Params::Params(const json& j, std::string path) : j_(j), path_(std::move(path)) {
  if (j_.is_null()) j_ = json::object();
  if (!j_.is_object()) throw ConfigError(path_ + ": expected an object");
}

bool Params::has(const char* key) const { return j_.contains(key); }

const json* Params::take(const char* key) {
  used_.insert(key);
  return j_.contains(key) ? &j_.at(key) : nullptr;
}

const json* Params::raw(const char* key) { return take(key); }

double Params::number(const char* key, std::optional<double> def) {
  const json* v = take(key);
  if (!v) {
    if (def) return *def;
    throw ConfigError(field(key) + ": missing");
  }
  if (!v->is_number()) throw ConfigError(field(key) + ": expected a number");
  return v->get<double>();
}

int Params::integer(const char* key, std::optional<int> def) {
  const json* v = take(key);
  if (!v) {
    if (def) return *def;
    throw ConfigError(field(key) + ": missing");
  }
  if (!v->is_number_integer()) throw ConfigError(field(key) + ": expected an integer");
  return v->get<int>();
}

std::size_t Params::count(const char* key, std::optional<std::size_t> def) {
  const json* v = take(key);
  if (!v) {
    if (def) return *def;
    throw ConfigError(field(key) + ": missing");
  }
  if (!v->is_number_integer() || v->get<long long>() < 1) {
    throw ConfigError(field(key) + ": expected a positive integer");
  }
  return v->get<std::size_t>();
}

bool Params::boolean(const char* key, std::optional<bool> def) {
  const json* v = take(key);
  if (!v) {
    if (def) return *def;
    throw ConfigError(field(key) + ": missing");
  }
  if (!v->is_boolean()) throw ConfigError(field(key) + ": expected true or false");
  return v->get<bool>();
}

std::string Params::string(const char* key, std::optional<std::string> def) {
  const json* v = take(key);
  if (!v) {
    if (def) return *def;
    throw ConfigError(field(key) + ": missing");
  }
  if (!v->is_string()) throw ConfigError(field(key) + ": expected a string");
  return v->get<std::string>();
}

RVec to_vector(const json& j, int d, const std::string& path) {
  if (j.is_number() && d == 1) {
    RVec v(1);
    v << j.get<double>();
    return v;
  }
  if (!j.is_array() || static_cast<int>(j.size()) != d) {
    throw ConfigError(path + ": expected " + std::to_string(d) + " numbers");
  }
  RVec v(d);
  for (int i = 0; i < d; ++i) {
    if (!j[i].is_number()) throw ConfigError(path + ": expected numbers");
    v[i] = j[i].get<double>();
  }
  return v;
}

RVec Params::vector(const char* key, int d, std::optional<RVec> def) {
  const json* v = take(key);
  if (!v) {
    if (def) return *def;
    throw ConfigError(field(key) + ": missing");
  }
  return to_vector(*v, d, field(key));
}

std::vector<double> Params::numbers(const char* key, std::optional<std::vector<double>> def) {
  const json* v = take(key);
  if (!v) {
    if (def) return *def;
    throw ConfigError(field(key) + ": missing");
  }
  if (!v->is_array() || v->empty()) throw ConfigError(field(key) + ": expected a list of numbers");
  std::vector<double> out;
  for (const auto& x : *v) {
    if (!x.is_number()) throw ConfigError(field(key) + ": expected a list of numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

std::vector<int> Params::integers(const char* key, std::optional<std::vector<int>> def) {
  const json* v = take(key);
  if (!v) {
    if (def) return *def;
    throw ConfigError(field(key) + ": missing");
  }
  if (!v->is_array()) throw ConfigError(field(key) + ": expected a list of integers");
  std::vector<int> out;
  for (const auto& x : *v) {
    if (!x.is_number_integer()) throw ConfigError(field(key) + ": expected a list of integers");
    out.push_back(x.get<int>());
  }
  return out;
}

std::vector<RVec> Params::vectors(const char* key, int d, std::optional<std::vector<RVec>> def) {
  const json* v = take(key);
  if (!v) {
    if (def) return *def;
    throw ConfigError(field(key) + ": missing");
  }
  if (!v->is_array() || v->empty()) throw ConfigError(field(key) + ": expected a list");
  std::vector<RVec> out;
  for (std::size_t i = 0; i < v->size(); ++i) {
    out.push_back(to_vector((*v)[i], d, field(key) + "[" + std::to_string(i) + "]"));
  }
  return out;
}

void Params::finish() const {
  for (const auto& [key, _] : j_.items()) {
    if (!used_.count(key)) throw ConfigError(path_ + "." + key + ": unknown key");
  }
}

TimeProfile read_profile(Params& p, const Model& model) {
  const json* v = p.raw("profile");
  if (!v || (v->is_string() && v->get<std::string>() == "nelson")) return nelson_profile(model);
  if (!v->is_object()) {
    throw ConfigError(p.field("profile") + ": expected \"nelson\" or an object");
  }
  Params q(*v, p.field("profile"));
  const std::string variant = q.string("variant");
  if (variant == "nelson") {
    q.finish();
    return nelson_profile(model);
  }
  if (variant != "modulated") {
    throw ConfigError(q.field("variant") + ": expected nelson or modulated");
  }
  const double a = q.number("a", 0.5), w = q.number("w", 3.0), b = q.number("b", 0.0);
  q.finish();
  if (!(std::abs(a) < 1.0)) throw ConfigError(q.field("a") + ": needs |a| < 1");
  if (!(w > 0.0)) throw ConfigError(q.field("w") + ": must be positive");
  return modulated_profile(model, a, w, b);
}

}  // namespace nfk::cli
