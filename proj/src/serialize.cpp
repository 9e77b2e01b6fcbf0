// Copyright 2026 The qrepeat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "qrepeat/serialize.hpp"

#include <algorithm>
#include <cmath>

namespace qrepeat {
namespace {

CompositeDims dims_from_json(const Json& j, const std::string& field, std::size_t total) {
  if (!j.contains("dims")) return CompositeDims{total};
  const Json& d = j.at("dims");
  if (!d.is_array() || d.empty()) throw FormatError(field + ".dims", "expected a non-empty array");
  std::vector<std::size_t> dims;
  for (const Json& x : d) {
    if (!x.is_number_integer() || x.get<long long>() <= 0) {
      throw FormatError(field + ".dims", "entries must be positive integers");
    }
    dims.push_back(x.get<std::size_t>());
  }
  CompositeDims out(std::move(dims));
  if (out.total() != total) {
    throw FormatError(field + ".dims", "product of dims does not match the data size");
  }
  return out;
}

bool is_entry(const Json& x) {
  return x.is_number() || (x.is_array() && x.size() == 2 && x[0].is_number() && x[1].is_number());
}

// Entries of a square matrix given either flat (n^2 entries) or as n rows of n
// entries. The readings cannot both be valid: a flat list of n^2 pairs would
// be n^2 rows of length 2.
std::vector<Complex> square_entries(const Json& j, const std::string& field, Eigen::Index* n) {
  if (!j.is_object() || !j.contains("data")) {
    throw FormatError(field, "expected an object with \"data\"");
  }
  const Json& data = j.at("data");
  if (!data.is_array() || data.empty()) throw FormatError(field + ".data", "expected a non-empty array");
  std::vector<Complex> out;
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(data.size()))));
  const bool flat = side * side == data.size() &&
                    std::all_of(data.begin(), data.end(), [](const Json& x) { return is_entry(x); });
  if (flat) {
    *n = static_cast<Eigen::Index>(side);
    for (std::size_t i = 0; i < data.size(); ++i) {
      out.push_back(complex_from_json(data[i], field + ".data[" + std::to_string(i) + "]"));
    }
    return out;
  }
  *n = static_cast<Eigen::Index>(data.size());
  for (std::size_t r = 0; r < data.size(); ++r) {
    const Json& row = data[r];
    const std::string rf = field + ".data[" + std::to_string(r) + "]";
    if (!row.is_array() || row.size() != data.size()) {
      throw FormatError(rf, "expected n^2 entries or n rows of n entries");
    }
    for (std::size_t c = 0; c < row.size(); ++c) {
      out.push_back(complex_from_json(row[c], rf + "[" + std::to_string(c) + "]"));
    }
  }
  return out;
}

template <typename Fn>
auto validated(const std::string& field, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const FormatError&) {
    throw;
  } catch (const Error& e) {
    throw FormatError(field, e.what());
  }
}

}  // namespace

Json complex_to_json(Complex z) { return Json::array({z.real(), z.imag()}); }

Json matrix_to_json(const Matrix& m, const CompositeDims& dims) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(complex_to_json(m(r, c)));
  }
  return {{"dims", dims.list()}, {"data", std::move(data)}};
}

Json vector_to_json(const Vector& v, const CompositeDims& dims) {
  Json data = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) data.push_back(complex_to_json(v(i)));
  return {{"dims", dims.list()}, {"data", std::move(data)}};
}

Json to_json(const StateVector& psi) { return vector_to_json(psi.amplitudes(), psi.dims()); }
Json to_json(const DensityOperator& rho) { return matrix_to_json(rho.matrix(), rho.dims()); }
Json to_json(const UnitaryOperator& u) { return matrix_to_json(u.matrix(), u.dims()); }

Complex complex_from_json(const Json& j, const std::string& field) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  throw FormatError(field, "expected a number or a [re, im] pair");
}

Matrix matrix_from_json(const Json& j, const std::string& field, CompositeDims* dims) {
  Eigen::Index rows = 0;
  const std::vector<Complex> e = square_entries(j, field, &rows);
  Matrix m(rows, rows);
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < rows; ++c) m(r, c) = e[static_cast<std::size_t>(r * rows + c)];
  }
  const CompositeDims d = dims_from_json(j, field, static_cast<std::size_t>(rows));
  if (dims) *dims = d;
  return m;
}

Vector vector_from_json(const Json& j, const std::string& field, CompositeDims* dims) {
  if (!j.is_object() || !j.contains("data") || !j.at("data").is_array()) {
    throw FormatError(field, "expected an object with a \"data\" array");
  }
  const Json& data = j.at("data");
  if (data.empty()) throw FormatError(field + ".data", "expected a non-empty array");
  Vector v(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) =
        complex_from_json(data[i], field + ".data[" + std::to_string(i) + "]");
  }
  const CompositeDims d = dims_from_json(j, field, data.size());
  if (dims) *dims = d;
  return v;
}

StateVector state_from_json(const Json& j, const std::string& field) {
  CompositeDims dims;
  Vector v = vector_from_json(j, field, &dims);
  return validated(field, [&] { return StateVector(std::move(v), dims); });
}

DensityOperator density_from_json(const Json& j, const std::string& field) {
  CompositeDims dims;
  Matrix m = matrix_from_json(j, field, &dims);
  return validated(field, [&] { return DensityOperator(std::move(m), dims); });
}

UnitaryOperator unitary_from_json(const Json& j, const std::string& field) {
  CompositeDims dims;
  Matrix m = matrix_from_json(j, field, &dims);
  return validated(field, [&] { return UnitaryOperator(std::move(m), dims); });
}

}  // namespace qrepeat
