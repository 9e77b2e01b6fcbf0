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


#include <doctest.h>

#include "helpers.hpp"
#include "qrepeat/serialize.hpp"

using namespace qrepeat;

namespace {

std::string field_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const FormatError& e) {
    return e.field();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("round trips through text are exact") {
  for (Seed s = 0; s < 10; ++s) {
    const StateVector psi(random_state(6, s).amplitudes(), CompositeDims{2, 3});
    // full rank: rank-deficient inputs get their round-off eigenvalues clipped
    const DensityOperator rho(random_density(4, 4, s).matrix(), CompositeDims{2, 2});
    const UnitaryOperator u = random_unitary(3, s);
    const StateVector psi2 = state_from_json(Json::parse(to_json(psi).dump()), "psi");
    const DensityOperator rho2 = density_from_json(Json::parse(to_json(rho).dump()), "rho");
    const UnitaryOperator u2 = unitary_from_json(Json::parse(to_json(u).dump()), "u");
    CHECK(psi2.amplitudes() == psi.amplitudes());
    CHECK(psi2.dims() == psi.dims());
    CHECK(rho2.matrix() == rho.matrix());
    CHECK(rho2.dims() == rho.dims());
    CHECK(u2.matrix() == u.matrix());
  }
}

TEST_CASE("layout of the written form") {
  Matrix m(2, 2);
  m << Complex(1, 2), 3, Complex(0, -1), 4;
  const Json j = matrix_to_json(m, CompositeDims{2});
  CHECK(j.at("dims") == Json::array({2}));
  CHECK(j.at("data").size() == 4);  // row-major [re, im] pairs
  CHECK(j.at("data")[1] == Json::array({3.0, 0.0}));
  CHECK(j.at("data")[2] == Json::array({0.0, -1.0}));
  CHECK(complex_to_json(Complex(0.5, -0.25)) == Json::array({0.5, -0.25}));
}

TEST_CASE("readers accept rows, plain reals and omitted dims") {
  const Json rows = Json::parse(R"({"data": [[0.5, 0], [0, [0.5, 0]]]})");
  const DensityOperator rho = density_from_json(rows, "rho");
  CHECK(rho.dims() == CompositeDims{2});
  CHECK(qt::max_diff(rho.matrix(), 0.5 * Matrix::Identity(2, 2)) == 0.0);
  const StateVector psi = state_from_json(Json::parse(R"({"data": [0, 1]})"), "psi");
  CHECK(psi.amplitudes()(1) == Complex(1, 0));
  const UnitaryOperator x = unitary_from_json(Json::parse(R"({"data": [0, 1, 1, 0], "dims": [2]})"), "x");
  CHECK(x.matrix() == qt::pauli_x());
}

TEST_CASE("malformed input names the offending field") {
  CHECK(field_of([] { density_from_json(Json::parse("[1]"), "cfg.rho"); }) == "cfg.rho");
  CHECK(field_of([] { density_from_json(Json::parse(R"({"data": []})"), "cfg.rho"); }) == "cfg.rho.data");
  CHECK(field_of([] { density_from_json(Json::parse(R"({"data": [[1, 0], [0, "x"]]})"), "r"); }) == "r.data[1][1]");
  CHECK(field_of([] { density_from_json(Json::parse(R"({"data": [1, 0, 0, "x"]})"), "r"); }) == "r.data[0]");
  CHECK(field_of([] { density_from_json(Json::parse(R"({"data": [[1, 0], [0]]})"), "r"); }) == "r.data[1]");
  CHECK(field_of([] { state_from_json(Json::parse(R"({"data": [1, 0], "dims": [3]})"), "s"); }) == "s.dims");
  CHECK(field_of([] { state_from_json(Json::parse(R"({"data": [1, 0], "dims": [0, 2]})"), "s"); }) == "s.dims");
  // validation failures of the objects themselves
  CHECK(field_of([] { state_from_json(Json::parse(R"({"data": [1, 1]})"), "s"); }) == "s");
  CHECK(field_of([] { density_from_json(Json::parse(R"({"data": [1, 1, 1, 0]})"), "r"); }) == "r");
  CHECK(field_of([] { unitary_from_json(Json::parse(R"({"data": [1, 1, 0, 1]})"), "u"); }) == "u");
  CHECK(field_of([] { complex_from_json(Json::parse("[1, 2, 3]"), "z"); }) == "z");
}
