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


#include "qemerge/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace qemerge::io {

Json parse_json(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": " + e.what());
  }
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json read_json_file(const std::string& path) { return parse_json(read_text_file(path), path); }

void check_keys(const Json& obj, std::initializer_list<const char*> allowed,
                std::initializer_list<const char*> required, const std::string& context) {
  if (!obj.is_object()) throw ParseError(context + ": expected an object");
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) throw ParseError(context + ": unknown key '" + item.key() + "'");
  }
  for (const char* k : required)
    if (!obj.contains(k)) throw ParseError(context + ": missing key '" + std::string(k) + "'");
}

double get_number(const Json& j, const std::string& context) {
  if (!j.is_number()) throw ParseError(context + ": expected a number");
  return j.get<double>();
}

RVector<double> get_real_vector(const Json& j, const std::string& context) {
  if (!j.is_array()) throw ParseError(context + ": expected an array of numbers");
  RVector<double> v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i)
    v(static_cast<Index>(i)) = get_number(j[i], context + "[" + std::to_string(i) + "]");
  return v;
}

Json matrix_to_json(const CMatrix<double>& m) {
  Json rows = Json::array();
  for (Index a = 0; a < m.rows(); ++a) {
    Json row = Json::array();
    for (Index b = 0; b < m.cols(); ++b) row.push_back(Json::array({m(a, b).real(), m(a, b).imag()}));
    rows.push_back(std::move(row));
  }
  return rows;
}

CMatrix<double> matrix_from_json(const Json& j, const std::string& context) {
  if (!j.is_array() || j.empty()) throw ParseError(context + ": expected a non-empty array of rows");
  const Index rows = static_cast<Index>(j.size());
  const Index cols = j[0].is_array() ? static_cast<Index>(j[0].size()) : 0;
  if (cols == 0) throw ParseError(context + ": rows must be non-empty arrays");
  CMatrix<double> m(rows, cols);
  for (Index a = 0; a < rows; ++a) {
    const Json& row = j[static_cast<std::size_t>(a)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols)
      throw ParseError(context + ": ragged matrix at row " + std::to_string(a));
    for (Index b = 0; b < cols; ++b) {
      const Json& z = row[static_cast<std::size_t>(b)];
      if (!z.is_array() || z.size() != 2 || !z[0].is_number() || !z[1].is_number())
        throw ParseError(context + ": entries must be [re, im] pairs");
      m(a, b) = {z[0].get<double>(), z[1].get<double>()};
    }
  }
  return m;
}

GeneratorBasis<double> basis_from_json(const Json& j) {
  const Json* list = &j;
  if (j.is_object()) {
    check_keys(j, {"generators"}, {"generators"}, "basis");
    list = &j["generators"];
  }
  if (!list->is_array() || list->empty()) throw ParseError("basis: expected a non-empty array of matrices");
  std::vector<CMatrix<double>> gens;
  for (std::size_t k = 0; k < list->size(); ++k)
    gens.push_back(matrix_from_json((*list)[k], "basis generator " + std::to_string(k + 1)));
  const Index M = gens.front().rows();
  return GeneratorBasis<double>(M, std::move(gens));
}

Json basis_report_to_json(const BasisReport& report) {
  Json violations = Json::array();
  for (const auto& v : report.violations)
    violations.push_back({{"relation", v.relation}, {"generators", v.generators}, {"max_deviation", v.max_deviation}});
  return {{"ok", report.ok()}, {"violations", violations}};
}

BasisPtr<double> builtin_basis(Index dimension) {
  int q = 0;
  while ((Index(1) << q) < dimension) ++q;
  if (dimension < 2 || (Index(1) << q) != dimension)
    throw ParseError("built-in bases exist for M = 2, 4, 8, 16 only, got M = " + std::to_string(dimension));
  return build_pauli_string_basis<double>(q);
}

Json bloch_to_json(const BlochState<double>& s) {
  return {{"M", s.dimension()}, {"rho", std::vector<double>(s.rho().data(), s.rho().data() + s.rho().size())}};
}

BlochState<double> bloch_from_json(const Json& j) {
  check_keys(j, {"M", "rho"}, {"M", "rho"}, "state");
  if (!j["M"].is_number_integer()) throw ParseError("state: M must be an integer");
  auto basis = builtin_basis(j["M"].get<Index>());
  RVector<double> rho = get_real_vector(j["rho"], "state.rho");
  if (rho.size() > basis->size())
    throw ParseError("state: rho has " + std::to_string(rho.size()) + " entries, at most " +
                     std::to_string(basis->size()) + " allowed");
  return BlochState<double>(basis, rho);
}

Json density_to_json(const DensityMatrix<double>& rho) {
  return {{"M", rho.dimension()}, {"matrix", matrix_to_json(rho.matrix())}};
}

Json wavefunction_to_json(const WaveFunction<double>& psi) {
  Json comps = Json::array();
  for (Index a = 0; a < psi.dimension(); ++a) comps.push_back(Json::array({psi(a).real(), psi(a).imag()}));
  return {{"M", psi.dimension()}, {"psi", comps}};
}

QuantumOperator<double> operator_from_json(const Json& j, const BasisPtr<double>& basis) {
  check_keys(j, {"matrix", "e0", "e"}, {}, "operator");
  if (j.contains("matrix")) {
    if (j.contains("e") || j.contains("e0")) throw ParseError("operator: give either a matrix or coefficients");
    return operator_from_matrix<double>(matrix_from_json(j["matrix"], "operator.matrix"), basis);
  }
  if (!j.contains("e")) throw ParseError("operator: missing key 'matrix' or 'e'");
  RVector<double> e = RVector<double>::Zero(basis->size());
  const RVector<double> given = get_real_vector(j["e"], "operator.e");
  if (given.size() > e.size()) throw ParseError("operator: too many coefficients");
  e.head(given.size()) = given;
  const double e0 = j.contains("e0") ? get_number(j["e0"], "operator.e0") : 0.0;
  return operator_from_coefficients<double>(e0, e, basis);
}

Json operator_to_json(const QuantumOperator<double>& a) {
  return {{"e0", a.e0()}, {"e", std::vector<double>(a.e().data(), a.e().data() + a.e().size())}};
}

Json observable_to_json(const ProbabilisticObservable<double>& obs) {
  Json c = Json::array();
  for (Index a = 0; a < obs.c().rows(); ++a) {
    Json row = Json::array();
    for (Index k = 0; k < obs.c().cols(); ++k) row.push_back(obs.c()(a, k));
    c.push_back(std::move(row));
  }
  const auto& g = obs.gamma();
  const auto& c0 = obs.c0();
  return {{"gamma", std::vector<double>(g.data(), g.data() + g.size())},
          {"c0", std::vector<double>(c0.data(), c0.data() + c0.size())},
          {"c", c}};
}

ProbabilisticObservable<double> observable_from_json(const Json& j) {
  check_keys(j, {"gamma", "c0", "c"}, {"gamma", "c0", "c"}, "observable");
  RVector<double> gamma = get_real_vector(j["gamma"], "observable.gamma");
  RVector<double> c0 = get_real_vector(j["c0"], "observable.c0");
  const Json& c = j["c"];
  if (!c.is_array() || static_cast<Index>(c.size()) != gamma.size())
    throw ParseError("observable.c: expected one row per outcome");
  const Index n = c.empty() ? 0 : static_cast<Index>(c[0].size());
  RMatrix<double> cm(gamma.size(), n);
  for (Index a = 0; a < gamma.size(); ++a) {
    RVector<double> row = get_real_vector(c[static_cast<std::size_t>(a)], "observable.c");
    if (row.size() != n) throw ParseError("observable.c: ragged rows");
    cm.row(a) = row.transpose();
  }
  return ProbabilisticObservable<double>(gamma, cm, c0);
}

Json outcome_table_to_json(const OutcomeTable<double>& t) {
  return {{"++", t[0][0]}, {"+-", t[0][1]}, {"-+", t[1][0]}, {"--", t[1][1]}};
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex_digest(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace qemerge::io
