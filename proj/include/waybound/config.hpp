/*
 * This code is part of Waybound.
 *
 * (C) Copyright Waybound Contributors 2026.
 *
 * This code is licensed under the Apache License, Version 2.0. You may
 * obtain a copy of this license in the LICENSE.txt file in the root directory
 * of this source tree or at http://www.apache.org/licenses/LICENSE-2.0.
 *
 * Any modifications or derivative works of this code must retain this
 * copyright notice, and modified files need to carry a notice indicating
 * that they have been altered from the originals.
 */

#ifndef WAYBOUND_CONFIG_HPP
#define WAYBOUND_CONFIG_HPP

#include <cstddef>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "linops.hpp"
#include "scenarios.hpp"

namespace waybound {

/// Raised for any malformed configuration value. The message always names
/// the offending field so the CLI diagnostic points at the right place.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message),
        field_(field) {}

  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

using Json = nlohmann::json;

/// Parses "re" or "re,im" into a complex number; used for amplitude flags.
inline Complex parse_complex(const std::string& text,
                             const std::string& field) {
  std::size_t used = 0;
  double re = 0.0, im = 0.0;
  try {
    re = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError(field, "expected a number, got '" + text + "'");
  }
  if (used < text.size()) {
    if (text[used] != ',')
      throw ConfigError(field, "expected 're' or 're,im', got '" + text + "'");
    const std::string rest = text.substr(used + 1);
    std::size_t used_im = 0;
    try {
      im = std::stod(rest, &used_im);
    } catch (const std::exception&) {
      throw ConfigError(field, "bad imaginary part in '" + text + "'");
    }
    if (used_im < rest.size())
      throw ConfigError(field, "trailing characters in '" + text + "'");
  }
  return Complex(re, im);
}

/// A complex scalar in configuration files is a [re, im] pair.
inline Complex complex_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
    throw ConfigError(field, "expected a [re, im] pair");
  return Complex(j[0].get<double>(), j[1].get<double>());
}

/// Pure-state literal: an array of [re, im] pairs.
inline ComplexVector state_from_json(const Json& j, const std::string& field) {
  if (!j.is_array() || j.empty())
    throw ConfigError(field, "expected a non-empty array of [re, im] pairs");
  ComplexVector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Index>(i)) =
        complex_from_json(j[i], field + "[" + std::to_string(i) + "]");
  return v;
}

/// Matrix literal: a nested array of [re, im] pairs, row-major.
inline ComplexMatrix matrix_from_json(const Json& j,
                                      const std::string& field) {
  if (!j.is_array() || j.empty())
    throw ConfigError(field, "expected a non-empty array of rows");
  const std::size_t n_rows = j.size();
  std::size_t n_cols = 0;
  ComplexMatrix m;
  for (std::size_t r = 0; r < n_rows; ++r) {
    const Json& row = j[r];
    const std::string row_field = field + "[" + std::to_string(r) + "]";
    if (!row.is_array() || row.empty())
      throw ConfigError(row_field, "expected a non-empty row array");
    if (r == 0) {
      n_cols = row.size();
      m.resize(static_cast<Index>(n_rows), static_cast<Index>(n_cols));
    } else if (row.size() != n_cols) {
      throw ConfigError(row_field, "ragged row length");
    }
    for (std::size_t c = 0; c < n_cols; ++c)
      m(static_cast<Index>(r), static_cast<Index>(c)) = complex_from_json(
          row[c], row_field + "[" + std::to_string(c) + "]");
  }
  return m;
}

/// Observable entry: either the preset string "spin-z(n)", meaning the
/// collective half-unit spin-z on n qubits, or an explicit matrix literal.
inline ComplexMatrix observable_from_json(const Json& j,
                                          const std::string& field) {
  if (j.is_string()) {
    const std::string text = j.get<std::string>();
    const std::string prefix = "spin-z(";
    if (text.rfind(prefix, 0) != 0 || text.back() != ')')
      throw ConfigError(field, "unknown preset '" + text +
                                   "' (expected spin-z(n) or a matrix)");
    const std::string digits =
        text.substr(prefix.size(), text.size() - prefix.size() - 1);
    int n = 0;
    try {
      std::size_t used = 0;
      n = std::stoi(digits, &used);
      if (used != digits.size()) throw std::invalid_argument(digits);
    } catch (const std::exception&) {
      throw ConfigError(field, "bad spin count in '" + text + "'");
    }
    try {
      return spin_z(n);
    } catch (const std::exception& e) {
      throw ConfigError(field, e.what());
    }
  }
  const ComplexMatrix m = matrix_from_json(j, field);
  if (m.rows() != m.cols())
    throw ConfigError(field, "observable must be square");
  if (!is_hermitian(m))
    throw ConfigError(field, "observable must be Hermitian");
  return m;
}

inline Json load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open '" + path + "'");
  Json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError("config", std::string("parse error: ") + e.what());
  }
  if (!j.is_object())
    throw ConfigError("config", "top-level document must be an object");
  return j;
}

/// Typed config lookups. Each converts with a diagnostic naming the field;
/// `fallback` is returned when the field is absent.
inline long cfg_long(const Json& cfg, const std::string& field,
                     long fallback) {
  if (!cfg.contains(field)) return fallback;
  if (!cfg[field].is_number_integer())
    throw ConfigError(field, "expected an integer");
  return cfg[field].get<long>();
}

inline double cfg_double(const Json& cfg, const std::string& field,
                         double fallback) {
  if (!cfg.contains(field)) return fallback;
  if (!cfg[field].is_number()) throw ConfigError(field, "expected a number");
  return cfg[field].get<double>();
}

inline std::string cfg_string(const Json& cfg, const std::string& field,
                              const std::string& fallback) {
  if (!cfg.contains(field)) return fallback;
  if (!cfg[field].is_string()) throw ConfigError(field, "expected a string");
  return cfg[field].get<std::string>();
}

}  // namespace waybound

#endif  // WAYBOUND_CONFIG_HPP
