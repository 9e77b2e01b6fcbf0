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


#pragma once

// JSON form of states and operators:
//   {"dims": [2, 2], "data": [[re, im], ...]}        row-major, flat
// Input additionally accepts "data" as nested rows, and real numbers in place
// of [re, im] pairs. Vectors use the same layout with one entry per
// amplitude.

#include <string>

#include <nlohmann/json.hpp>

#include "qrepeat/hilbert.hpp"

namespace qrepeat {

using Json = nlohmann::json;

// Malformed input. `what()` starts with the offending field path.
class FormatError : public Error {
 public:
  FormatError(const std::string& field, const std::string& message)
      : Error(field + ": " + message), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

Json complex_to_json(Complex z);
Json matrix_to_json(const Matrix& m, const CompositeDims& dims);
Json vector_to_json(const Vector& v, const CompositeDims& dims);
Json to_json(const StateVector& psi);
Json to_json(const DensityOperator& rho);
Json to_json(const UnitaryOperator& u);

Complex complex_from_json(const Json& j, const std::string& field);
// `dims` receives the declared factor dimensions (a single factor when the
// "dims" key is absent).
Matrix matrix_from_json(const Json& j, const std::string& field, CompositeDims* dims = nullptr);
Vector vector_from_json(const Json& j, const std::string& field, CompositeDims* dims = nullptr);

// Validated conversions; validation failures become FormatError naming the
// field.
StateVector state_from_json(const Json& j, const std::string& field);
DensityOperator density_from_json(const Json& j, const std::string& field);
UnitaryOperator unitary_from_json(const Json& j, const std::string& field);

}  // namespace qrepeat
