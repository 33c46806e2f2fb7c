// Copyright 2026 The qemerge Authors
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

#ifndef QEMERGE_IO_HPP_
#define QEMERGE_IO_HPP_

#include <cstdint>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "qemerge/classical_ensemble.hpp"
#include "qemerge/core.hpp"
#include "qemerge/generator_basis.hpp"
#include "qemerge/observables.hpp"
#include "qemerge/quantum_state.hpp"

namespace qemerge::io {

using Json = nlohmann::ordered_json;

/// Malformed input: bad JSON, unknown or missing keys, wrong shapes.
class ParseError : public Error {
 public:
  using Error::Error;
};

Json parse_json(std::string_view text, const std::string& source);
Json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);

/// Rejects keys outside `allowed` and reports the first missing `required` key.
void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                std::initializer_list<const char*> required, const std::string& context);

double get_number(const Json& j, const std::string& context);
RVector<double> get_real_vector(const Json& j, const std::string& context);

/// Complex matrices are arrays of rows of [re, im] pairs.
Json matrix_to_json(const CMatrix<double>& m);
CMatrix<double> matrix_from_json(const Json& j, const std::string& context);

/// Either an array of matrices or {"generators": [...]}.
GeneratorBasis<double> basis_from_json(const Json& j);
Json basis_report_to_json(const BasisReport& report);

/// Built-in Pauli-string basis for M = 2^q.
BasisPtr<double> builtin_basis(Index dimension);

Json bloch_to_json(const BlochState<double>& s);
/// {"M": int, "rho": [floats]} on the built-in basis for M.
BlochState<double> bloch_from_json(const Json& j);

Json density_to_json(const DensityMatrix<double>& rho);
Json wavefunction_to_json(const WaveFunction<double>& psi);

/// {"matrix": ...} or {"e0": x, "e": [...]}.
QuantumOperator<double> operator_from_json(const Json& j, const BasisPtr<double>& basis);
Json operator_to_json(const QuantumOperator<double>& a);

Json observable_to_json(const ProbabilisticObservable<double>& obs);
ProbabilisticObservable<double> observable_from_json(const Json& j);

Json outcome_table_to_json(const OutcomeTable<double>& t);

/// 17 significant digits, enough for a lossless round trip.
std::string format_double(double x);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a(std::string_view data);
std::string hex_digest(std::uint64_t h);

}  // namespace qemerge::io

#endif  // QEMERGE_IO_HPP_
