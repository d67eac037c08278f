#pragma once

// Small helpers over nlohmann::json shared by the config, spec and weight
// readers. Private to the library.

#include "tomo/types.hpp"

#include <json.hpp>

#include <cmath>
#include <limits>
#include <set>
#include <string>
#include <vector>

namespace tomo {

using json = nlohmann::json;

namespace jsonu {

inline json parse(const std::string& text, const std::string& what) {
  try {
    return json::parse(text, nullptr, /*allow_exceptions=*/true, /*ignore_comments=*/true);
  } catch (const json::parse_error& e) {
    throw TomoError(what + ": malformed JSON: " + e.what());
  }
}

inline void reject_unknown_keys(const json& j, const std::set<std::string>& allowed,
                                const std::string& where) {
  if (!j.is_object()) throw TomoError(where + " must be a JSON object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!allowed.contains(it.key())) {
      throw TomoError(where + ": unknown key '" + it.key() + "'");
    }
  }
}

inline double as_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw TomoError("key '" + key + "' must be a number");
  return v.get<double>();
}

inline double required_number(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw TomoError(where + ": missing required key '" + key + "'");
  return as_number(j.at(key), key);
}

inline double optional_number(const json& j, const std::string& key, double fallback) {
  return j.contains(key) ? as_number(j.at(key), key) : fallback;
}

inline int as_int(const json& v, const std::string& key) {
  if (!v.is_number_integer()) throw TomoError("key '" + key + "' must be an integer");
  return v.get<int>();
}

inline int required_int(const json& j, const std::string& key, const std::string& where) {
  if (!j.contains(key)) throw TomoError(where + ": missing required key '" + key + "'");
  return as_int(j.at(key), key);
}

inline int optional_int(const json& j, const std::string& key, int fallback) {
  return j.contains(key) ? as_int(j.at(key), key) : fallback;
}

inline bool get_bool(const json& v, const std::string& key) {
  if (!v.is_boolean()) throw TomoError("key '" + key + "' must be a boolean");
  return v.get<bool>();
}

inline std::string get_string(const json& v, const std::string& key) {
  if (!v.is_string()) throw TomoError("key '" + key + "' must be a string");
  return v.get<std::string>();
}

inline std::vector<double> number_array(const json& v, const std::string& key) {
  if (!v.is_array()) throw TomoError("key '" + key + "' must be an array of numbers");
  std::vector<double> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(as_number(x, key));
  return out;
}

inline std::vector<int> int_array(const json& v, const std::string& key) {
  if (!v.is_array()) throw TomoError("key '" + key + "' must be an array of integers");
  std::vector<int> out;
  for (const auto& x : v) out.push_back(as_int(x, key));
  return out;
}

inline Interval interval(const json& v, const std::string& key) {
  const auto vals = number_array(v, key);
  if (vals.size() != 2) throw TomoError("key '" + key + "' must be [lo, hi]");
  if (!(vals[1] > vals[0])) throw TomoError("key '" + key + "' is an empty interval");
  return {vals[0], vals[1]};
}

/// SNR in dB; accepts a number or the string "inf".
inline double snr(const json& v) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
    throw TomoError("snr_db must be a number or \"inf\", got \"" + s + "\"");
  }
  return as_number(v, "snr_db");
}

inline std::uint64_t seed(const json& v) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw TomoError("rng_seed must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

}  // namespace jsonu
}  // namespace tomo
