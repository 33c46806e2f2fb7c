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


#include "qemerge/cli.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <future>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "qemerge/io.hpp"
#include "qemerge/qemerge.hpp"

namespace qemerge::cli {
namespace {

using io::Json;
using io::ParseError;

constexpr double kPi = std::numbers::pi;

struct Context {
  std::string command;
  std::vector<std::string> args;
  std::vector<std::string> input_files;
  std::vector<std::string> formulas;

  std::string digest() const {
    std::string blob = command;
    for (const auto& a : args) blob += '\0' + a;
    for (const auto& f : input_files) blob += '\0' + io::read_text_file(f);
    return io::hex_digest(io::fnv1a(blob));
  }

  Json provenance() const {
    return {{"artifact", "qemerge"}, {"version", kVersion}, {"command", command},
            {"config_digest", digest()}, {"formulas", formulas}};
  }

  std::string csv_provenance() const {
    std::string s = "# artifact qemerge " + std::string(kVersion) + "\n# command " + command +
                    "\n# config_digest " + digest() + "\n";
    for (const auto& f : formulas) s += "# formula " + f + "\n";
    return s;
  }
};

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

void require_valid_state(const BlochState<double>& s) {
  const auto report = validate_quantum_state(s);
  if (!report.valid())
    throw InvalidStateError("input is not a quantum state (purity " + io::format_double(report.purity) +
                                ", smallest eigenvalue " + io::format_double(report.min_eigenvalue) + ")",
                            report.min_eigenvalue);
}

// ---------------------------------------------------------------- validate-basis

struct ValidateBasisOptions {
  int qubits = 2;
  std::string input;
};

int cmd_validate_basis(const ValidateBasisOptions& o, Context& ctx, std::string& result) {
  ctx.formulas = {"[L_k, L_l] = 2i f_klm L_m", "{L_k, L_l} = 2 delta_kl + 2 d_klm L_m", "tr(L_k L_l) = M delta_kl",
                  "L_k^2 = 1", "tr L_k = 0"};
  std::optional<GeneratorBasis<double>> custom;
  BasisPtr<double> builtin;
  if (!o.input.empty()) {
    ctx.input_files.push_back(o.input);
    custom = io::basis_from_json(io::read_json_file(o.input));
  } else {
    builtin = build_pauli_string_basis<double>(o.qubits);
  }
  const GeneratorBasis<double>& basis = custom ? *custom : *builtin;
  const BasisReport report = validate_basis(basis);
  Json j = {{"provenance", ctx.provenance()}, {"M", basis.dimension()}, {"generators", basis.size()}};
  if (basis.is_pauli()) {
    Json labels = Json::array();
    for (const auto& l : basis.index_table()) labels.push_back(l.str());
    j["labels"] = labels;
  }
  const Json r = io::basis_report_to_json(report);
  j["ok"] = r["ok"];
  j["violations"] = r["violations"];
  result = dump(j);
  return report.ok() ? kSuccess : kValidationFailure;
}

// ---------------------------------------------------------------- ensemble-build

struct EnsembleOptions {
  std::string operators;
  std::string state;
  std::optional<double> epsilon;
  std::string format = "json";
};

int cmd_ensemble_build(const EnsembleOptions& o, Context& ctx, std::string& result) {
  ctx.formulas = {"p_tau = prod_i w^(i)_{a_i(tau)}", "w_a = c_ak rho_k + c_a0", "<A> = sum_tau p_tau A_tau",
                  "tr[(A - B)^2] >= epsilon"};
  ctx.input_files = {o.operators, o.state};
  const BlochState<double> s = io::bloch_from_json(io::read_json_file(o.state));
  require_valid_state(s);
  const Json ops_json = io::read_json_file(o.operators);
  if (!ops_json.is_array() || ops_json.empty()) throw ParseError("operators: expected a non-empty array");
  std::vector<QuantumOperator<double>> ops;
  for (const auto& item : ops_json) ops.push_back(io::operator_from_json(item, s.basis()));
  const double eps = o.epsilon.value_or(default_independence_epsilon<double>(s.dimension()));

  const auto ens = assign_product_probabilities(build_product_ensemble(ops, eps), s);

  if (o.format == "csv") {
    std::ostringstream os;
    os << ctx.csv_provenance() << "tau";
    for (std::size_t i = 0; i < ens.slot_count(); ++i) os << ",a_" << i + 1;
    for (std::size_t i = 0; i < ens.slot_count(); ++i) os << ",A_" << i + 1;
    os << ",p\n";
    for (std::size_t tau = 0; tau < ens.state_count(); ++tau) {
      os << tau;
      for (auto a : ens.label(tau)) os << ',' << a;
      for (std::size_t i = 0; i < ens.slot_count(); ++i) os << ',' << io::format_double(ens.registered(i)[tau]);
      os << ',' << io::format_double(ens.probabilities()[tau]) << '\n';
    }
    result = os.str();
    return kSuccess;
  }

  Json slots = Json::array();
  for (std::size_t i = 0; i < ens.slot_count(); ++i) {
    Json slot = io::observable_to_json(ens.slot_observables()[i]);
    slot["classical_expectation"] = expectation(ens, ens.registered(i), thread_count());
    slot["quantum_expectation"] = expectation(s, ens.operators()[i]);
    slots.push_back(std::move(slot));
  }
  Json labels = Json::array();
  for (std::size_t tau = 0; tau < ens.state_count(); ++tau) labels.push_back(ens.label(tau));
  result = dump({{"provenance", ctx.provenance()},
                 {"M", s.dimension()},
                 {"epsilon", eps},
                 {"radices", ens.radices()},
                 {"states", ens.state_count()},
                 {"slots", slots},
                 {"labels", labels},
                 {"probabilities", ens.probabilities()}});
  return kSuccess;
}

// ---------------------------------------------------------------- measure

struct MeasureOptions {
  std::string state;
  std::string first;
  std::string second;
  std::string mode = "minimal";
};

int cmd_measure(const MeasureOptions& o, Context& ctx, std::string& result) {
  ctx.formulas = {"w_(+-) = (1 +- <A>)/2", "rho_(A+-) by state reduction", "<BA>_m = sum_s s w_s tr(B rho_(As))",
                  "<AB>_m = tr({A, B} rho)/2", "w_(ss') = (1 + s<A> + s'<B> + ss'<AB>_m)/4"};
  ctx.input_files = {o.state, o.first};
  if (!o.second.empty()) ctx.input_files.push_back(o.second);
  const BlochState<double> s = io::bloch_from_json(io::read_json_file(o.state));
  require_valid_state(s);
  const auto a = io::operator_from_json(io::read_json_file(o.first), s.basis());
  const ReductionMode mode =
      o.mode == "maximal" ? ReductionMode::MaximallyDestructive : ReductionMode::MinimallyDestructive;

  Json branches = Json::array();
  for (int sign : {1, -1}) {
    const auto outcome = measure(s, a, sign, mode);
    branches.push_back({{"sign", sign},
                        {"probability", outcome.probability},
                        {"post_state", outcome.post_state ? io::bloch_to_json(*outcome.post_state) : Json()}});
  }
  Json j = {{"provenance", ctx.provenance()},
            {"mode", to_string(mode)},
            {"A", {{"expectation", expectation(s, a)}, {"branches", branches}}}};
  if (!o.second.empty()) {
    const auto b = io::operator_from_json(io::read_json_file(o.second), s.basis());
    require_two_level(b);
    Json conditional = Json::object();
    for (int sign : {1, -1}) {
      const char* key = sign > 0 ? "+" : "-";
      if (branch_probability(s, a, sign) < tol::kBranch) {
        conditional[key] = nullptr;
        continue;
      }
      const auto [wp, wm] = conditional_probability(s, a, b, sign, mode);
      conditional[key] = {{"+", wp}, {"-", wm}};
    }
    j["B"] = {{"expectation", expectation(s, b)}};
    j["conditional"] = conditional;
    j["measurement_correlation"] = measurement_correlation(s, a, b, mode);
    j["quantum_correlation"] = anticommutator_correlation(s, a, b);
    j["commuting"] = is_commuting_pair(a, b);
    if (is_commuting_pair(a, b)) j["joint"] = io::outcome_table_to_json(joint_outcome_probabilities(s, a, b));
  }
  result = dump(j);
  return kSuccess;
}

// ---------------------------------------------------------------- evolve

struct EvolveOptions {
  std::string config;
  std::optional<double> dt;
  std::optional<double> t_final;
};

RateProfile<double> rate_from_json(const Json& d, Index M) {
  if (d.is_number()) return profiles::constant(d.get<double>());
  io::check_keys(d, {"profile", "rate"}, {"profile", "rate"}, "evolve.D");
  if (!d["profile"].is_string()) throw ParseError("evolve.D.profile must be a string");
  const std::string name = d["profile"].get<std::string>();
  const double rate = io::get_number(d["rate"], "evolve.D.rate");
  if (name == "constant") return profiles::constant(rate);
  if (name == "saturating") return profiles::saturating(rate, M);
  if (name == "cutoff") return profiles::cutoff(rate, M);
  throw ParseError("evolve.D.profile: unknown profile '" + name + "'");
}

int cmd_evolve(const EvolveOptions& o, Context& ctx, std::string& result) {
  ctx.formulas = {"d rho_k/dt = T_kl rho_l + D rho_k", "T_kl = -2 f_klm H_m + R_kl", "P = rho_k rho_k",
                  "copurity = tr[(rho^2 - rho)^2]"};
  ctx.input_files = {o.config};
  const Json cfg = io::read_json_file(o.config);
  io::check_keys(cfg, {"M", "rho", "H", "T_tilde", "D", "t_final", "dt", "stride"}, {"M", "rho", "t_final", "dt"},
                 "evolve");
  const BlochState<double> s = io::bloch_from_json({{"M", cfg["M"]}, {"rho", cfg["rho"]}});
  require_valid_state(s);
  const Index n = s.basis()->size();
  RVector<double> h = RVector<double>::Zero(n);
  if (cfg.contains("H")) {
    const RVector<double> given = io::get_real_vector(cfg["H"], "evolve.H");
    if (given.size() > n) throw ParseError("evolve.H: too many coefficients");
    h.head(given.size()) = given;
  }
  RMatrix<double> residual;
  if (cfg.contains("T_tilde")) {
    const Json& t = cfg["T_tilde"];
    if (!t.is_array() || static_cast<Index>(t.size()) != n) throw ParseError("evolve.T_tilde: expected n rows");
    residual.resize(n, n);
    for (Index k = 0; k < n; ++k) {
      const RVector<double> row = io::get_real_vector(t[static_cast<std::size_t>(k)], "evolve.T_tilde");
      if (row.size() != n) throw ParseError("evolve.T_tilde: expected n columns");
      residual.row(k) = row.transpose();
    }
  }
  const RateProfile<double> rate = cfg.contains("D") ? rate_from_json(cfg["D"], s.dimension()) : profiles::constant(0.0);
  const double t_final = o.t_final.value_or(io::get_number(cfg["t_final"], "evolve.t_final"));
  const double dt = o.dt.value_or(io::get_number(cfg["dt"], "evolve.dt"));
  long stride = 1;
  if (cfg.contains("stride")) {
    if (!cfg["stride"].is_number_integer() || cfg["stride"].get<long>() < 1)
      throw ParseError("evolve.stride must be a positive integer");
    stride = cfg["stride"].get<long>();
  }
  if (!(dt > 0) || !(t_final > 0)) throw ParseError("evolve: dt and t_final must be positive");

  const auto sc = structure_constants(*s.basis());
  const auto spec = make_evolution_spec<double>(h, residual, 0.0, sc);
  const RMatrix<double> T = spec.T;
  const auto traj = evolve_bloch<double>(
      s, GeneratorFn<double>([T, rate](const RVector<double>& rho) { return StepGenerator<double>{T, rate(rho)}; }),
      t_final, dt, stride);

  std::ostringstream os;
  os << ctx.csv_provenance() << 't';
  for (Index k = 0; k < n; ++k) os << ",rho_" << k + 1;
  os << ",P,copurity,valid_flag\n";
  for (std::size_t i = 0; i < traj.size(); ++i) {
    os << io::format_double(traj.times[i]);
    for (Index k = 0; k < n; ++k) os << ',' << io::format_double(traj.states[i].rho()(k));
    os << ',' << io::format_double(traj.purity[i]) << ',' << io::format_double(traj.copurity[i]) << ','
       << (traj.valid[i] ? 1 : 0) << '\n';
  }
  result = os.str();
  return kSuccess;
}

// ---------------------------------------------------------------- demos

std::vector<double> angle_grid(int points) {
  std::vector<double> g(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) g[static_cast<std::size_t>(i)] = kPi * double(i) / double(points - 1);
  return g;
}

struct BellOptions {
  int points = 37;
  std::string state = "singlet";
};

int cmd_demo_bell(const BellOptions& o, Context& ctx, std::string& result) {
  ctx.formulas = {"C(theta, phi) = c c' rho_3 + c s' rho_6 + s c' rho_10 + s s' rho_12",
                  "slack = 1 + C(theta1, theta2) - |C(theta1, 0) - C(theta2, 0)|"};
  const auto basis = build_pauli_string_basis<double>(2);
  const BlochState<double> s =
      o.state == "singlet" ? maximally_anticorrelated_state(basis, 1) : diagonal_anticorrelated_state(basis);
  const std::function<double(double, double)> corr = [&s](double t, double p) {
    return rotated_spin_correlation(s, t, p);
  };
  const auto grid = angle_grid(o.points);
  const std::size_t N = grid.size();
  std::vector<double> slack(N * N);
  std::vector<std::string> rows(N);

  auto fill = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < N; i += stride) {
      std::string text;
      for (std::size_t j = 0; j < N; ++j) {
        const auto r = bell_check(corr, grid[i], grid[j]);
        slack[i * N + j] = r.slack;
        text += io::format_double(grid[i]) + ',' + io::format_double(grid[j]) + ',' + io::format_double(r.slack) + '\n';
      }
      rows[i] = std::move(text);
    }
  };
  const unsigned threads = std::min<unsigned>(thread_count(), static_cast<unsigned>(N));
  if (threads <= 1) {
    fill(0, 1);
  } else {
    std::vector<std::future<void>> jobs;
    for (unsigned t = 0; t < threads; ++t) jobs.push_back(std::async(std::launch::async, fill, t, threads));
    for (auto& job : jobs) job.get();
  }

  std::size_t worst = 0;
  for (std::size_t k = 1; k < slack.size(); ++k)
    if (slack[k] < slack[worst]) worst = k;
  std::ostringstream os;
  os << ctx.csv_provenance() << "# state " << o.state << "\ntheta1,theta2,slack\n";
  for (const auto& r : rows) os << r;
  os << "# most violating pair: theta1=" << io::format_double(grid[worst / N])
     << " theta2=" << io::format_double(grid[worst % N]) << " slack=" << io::format_double(slack[worst])
     << (slack[worst] < -tol::kExact ? " (violated)" : " (obeyed)") << '\n';
  result = os.str();
  return kSuccess;
}

Json chain_json(const BitChain<double>& chain) {
  Json members = Json::array();
  for (std::size_t i = 0; i < chain.size(); ++i)
    members.push_back({{"name", chain.member_names[i]}, {"operator", describe_pauli(chain.members[i])}});
  Json products = Json::array();
  for (const auto& [key, p] : chain.product_table)
    products.push_back(chain.member_names[key.first] + " . " + chain.member_names[key.second] + " = " +
                       (p.sign < 0 ? "-" : "+") + chain.member_names[p.k]);
  return {{"name", chain.name}, {"members", members}, {"products", products}};
}

Json ks_json(const KsReport& r) {
  Json shared = Json::array();
  for (const auto& m : r.identifications)
    shared.push_back(m.member + " = " + (m.sign < 0 ? "-" : "+") + m.representative);
  Json trace = Json::array();
  int step = 1;
  for (const auto& id : r.witness)
    trace.push_back({{"step", step++}, {"identity", id.text()}});
  Json j = {{"variables", r.variables.size()}, {"equations", r.equation_count}, {"shared_members", shared}};
  if (r.consistent) {
    Json assignment = Json::object();
    for (std::size_t v = 0; v < r.variables.size(); ++v) assignment[r.variables[v]] = r.assignment[v];
    j["assignment"] = assignment;
  } else {
    int sign = 1;
    for (const auto& id : r.witness) sign *= id.sign;
    j["trace"] = trace;
    j["closing"] = "multiplying the " + std::to_string(r.witness.size()) +
                   " identities, every value appears an even number of times; the signs (with the shared-member "
                   "signs) multiply to -1, so +1 = -1";
  }
  j["conclusion"] = r.conclusion;
  return j;
}

Json ks_demo_json() {
  Json chains = Json::array();
  std::map<std::string, BitChain<double>> built;
  for (const auto& name : three_qubit_chain_names()) {
    auto chain = make_three_qubit_chain<double>(name);
    Json cj = chain_json(chain);
    cj["valid"] = true;
    cj["alone"] = ks_contradiction_check<double>({chain}).conclusion;
    chains.push_back(std::move(cj));
    built.emplace(name, std::move(chain));
  }
  std::vector<BitChain<double>> family;
  Json family_names = Json::array();
  for (const char* name : {"C", "F", "G", "H", "Q-candidate"}) {
    family.push_back(built.at(name));
    family_names.push_back(name);
  }
  const KsReport report = ks_contradiction_check(family);
  const int ctt_vs_qtt =
      detail::signed_match<double>(built.at("C").members[6], built.at("Q-candidate").members[6], tol::kExact);
  return {{"chains", chains},
          {"family", family_names},
          {"operator_identity", std::string("Q-candidate.Qtt = ") + (ctt_vs_qtt < 0 ? "-" : "+") + "C.Ctt"},
          {"report", ks_json(report)},
          {"conclusion", report.conclusion}};
}

int cmd_demo_ks(Context& ctx, std::string& result) {
  ctx.formulas = {"T_i T_j = c_ijk T_k", "T_j^2 = 1", "v(T_i) v(T_j) = c_ijk v(T_k)"};
  Json j = {{"provenance", ctx.provenance()}};
  const Json body = ks_demo_json();
  for (const auto& item : body.items()) j[item.key()] = item.value();
  result = dump(j);
  return kSuccess;
}

struct SingletOptions {
  int points = 13;
  int epsilon = 1;
};

int cmd_demo_singlet(const SingletOptions& o, Context& ctx, std::string& result) {
  ctx.formulas = {"rho_3 = epsilon rho_12 = -epsilon rho_14 = -1", "rho = (1 + rho_k L_k)/M", "psi from pure rho",
                  "C(theta, phi) = <A(theta) B(phi)>_m",
                  "slack = 1 + C(theta1, theta2) - |C(theta1, 0) - C(theta2, 0)|"};
  const auto basis = build_pauli_string_basis<double>(2);
  const auto s = maximally_anticorrelated_state(basis, o.epsilon);
  const auto rho = density_from_bloch(s);
  const auto psi = wavefunction_from_pure(rho);
  const auto grid = angle_grid(o.points);

  Json c_rows = Json::array();
  double pipeline_gap = 0;
  for (double t : grid) {
    Json row = Json::array();
    for (double p : grid) {
      const auto [a, b] = rotated_spin_operators(basis, t, p);
      const double c = measurement_correlation(s, a, b, ReductionMode::MinimallyDestructive);
      pipeline_gap = std::max(pipeline_gap, std::abs(c - rotated_spin_correlation(s, t, p)));
      row.push_back(c);
    }
    c_rows.push_back(std::move(row));
  }
  const std::function<double(double, double)> corr = [&s](double t, double p) {
    return rotated_spin_correlation(s, t, p);
  };
  Json bell = Json::array();
  for (double t1 : grid)
    for (double t2 : grid) {
      const auto r = bell_check(corr, t1, t2);
      bell.push_back({{"theta1", t1}, {"theta2", t2}, {"slack", r.slack}, {"violated", r.violated()}});
    }
  const auto report = validate_quantum_state(s);
  result = dump({{"provenance", ctx.provenance()},
                 {"epsilon", o.epsilon},
                 {"state", io::bloch_to_json(s)},
                 {"purity", report.purity},
                 {"copurity", copurity(rho)},
                 {"density_matrix", io::matrix_to_json(rho.matrix())},
                 {"wave_function", io::wavefunction_to_json(psi)["psi"]},
                 {"angles", grid},
                 {"correlation", c_rows},
                 {"closed_form_gap", pipeline_gap},
                 {"bell", bell}});
  return kSuccess;
}

int cmd_demo_chains(Context& ctx, std::string& result) {
  ctx.formulas = {"w_(s1 s2) = (1 + s1<T1> + s2<T2> + s1 s2 <T3>)/4", "T_i T_j = c_ijk T_k",
                  "v(T_i) v(T_j) = c_ijk v(T_k)"};
  const auto basis = build_pauli_string_basis<double>(2);
  struct Named {
    const char* name;
    std::vector<Index> members;  // 0-based generator indices
  };
  const std::vector<Named> m4 = {{"L1,L2,L3", {0, 1, 2}}, {"L8,L4,L12", {7, 3, 11}}};
  const std::vector<std::pair<const char*, BlochState<double>>> states = {
      {"rho_3 = -1", diagonal_anticorrelated_state(basis)}, {"singlet", maximally_anticorrelated_state(basis, 1)}};

  Json m4_json = Json::array();
  for (const auto& nc : m4) {
    std::vector<CMatrix<double>> ops;
    std::vector<std::string> names;
    for (Index k : nc.members) {
      ops.push_back((*basis)[k]);
      names.push_back("L" + std::to_string(k + 1));
    }
    const auto chain = make_chain<double>(ops, names, nc.name);
    Json cj = chain_json(chain);
    Json tables = Json::array();
    for (const auto& [label, st] : states) {
      const auto w = chain_outcome_probabilities(st, chain);
      // Classical realization: slots for T1 and T2, joint table equal to w.
      std::vector<QuantumOperator<double>> gens{operator_from_matrix<double>(ops[0], basis),
                                                operator_from_matrix<double>(ops[1], basis)};
      const auto ens = build_product_ensemble(gens, default_independence_epsilon<double>(4));
      const auto joint = assign_correlated_probabilities(ens, st, {w[0][0], w[0][1], w[1][0], w[1][1]});
      const auto classical = joint_value_probabilities(joint, joint.registered(0), joint.registered(1));
      tables.push_back({{"state", label},
                        {"quantum", io::outcome_table_to_json(w)},
                        {"classical", io::outcome_table_to_json(classical)}});
    }
    cj["outcomes"] = tables;
    m4_json.push_back(std::move(cj));
  }
  result = dump({{"provenance", ctx.provenance()}, {"m4_chains", m4_json}, {"m8_kochen_specker", ks_demo_json()}});
  return kSuccess;
}

void write_result(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ParseError("cannot write '" + path + "'");
  f << text;
}

}  // namespace

unsigned thread_count() {
  if (const char* env = std::getenv("QEMERGE_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qemerge: finite quantum systems from classical statistical ensembles"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);
  std::string output;
  app.add_option("-o,--output", output, "Write the result here instead of standard output");

  ValidateBasisOptions vb;
  auto* validate = app.add_subcommand("validate-basis", "Check the generator relations of a basis");
  validate->add_option("-q,--qubits", vb.qubits, "Built-in Pauli-string basis with M = 2^q")->check(CLI::Range(1, 4));
  validate->add_option("-i,--input", vb.input, "Basis JSON: array of matrices of [re, im] pairs")
      ->check(CLI::ExistingFile);

  EnsembleOptions eo;
  auto* ensemble = app.add_subcommand("ensemble-build", "Build a product classical ensemble for an operator list");
  ensemble->add_option("--operators", eo.operators, "JSON array of operators")->required()->check(CLI::ExistingFile);
  ensemble->add_option("--state", eo.state, "Bloch state JSON")->required()->check(CLI::ExistingFile);
  ensemble->add_option("--epsilon", eo.epsilon, "Independence threshold (default 1e-6 M)");
  ensemble->add_option("--format", eo.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));

  MeasureOptions mo;
  auto* meas = app.add_subcommand("measure", "Measurement probabilities, reductions and correlations");
  meas->add_option("--state", mo.state, "Bloch state JSON")->required()->check(CLI::ExistingFile);
  meas->add_option("--first", mo.first, "First two-level operator JSON")->required()->check(CLI::ExistingFile);
  meas->add_option("--second", mo.second, "Second two-level operator JSON")->check(CLI::ExistingFile);
  meas->add_option("--mode", mo.mode, "minimal or maximal reduction")->check(CLI::IsMember({"minimal", "maximal"}));

  EvolveOptions evo;
  auto* evolve = app.add_subcommand("evolve", "Integrate the Bloch-space evolution");
  evolve->add_option("--config", evo.config, "Evolution config JSON")->required()->check(CLI::ExistingFile);
  evolve->add_option("--dt", evo.dt, "Override the time step");
  evolve->add_option("--t-final", evo.t_final, "Override the final time");

  auto* demo = app.add_subcommand("demo", "Built-in demonstrations");
  demo->require_subcommand(1);
  BellOptions bo;
  auto* bell = demo->add_subcommand("bell", "Bell inequality slack over an angle grid (CSV)");
  bell->add_option("--points", bo.points, "Grid points on [0, pi] per angle")->check(CLI::Range(2, 2001));
  bell->add_option("--state", bo.state, "singlet or diagonal")->check(CLI::IsMember({"singlet", "diagonal"}));
  auto* ks = demo->add_subcommand("ks", "Sign contradiction among the three-qubit bit chains");
  SingletOptions so;
  auto* singlet = demo->add_subcommand("singlet", "Singlet density matrix, wave function and correlations");
  singlet->add_option("--points", so.points, "Grid points on [0, pi] per angle")->check(CLI::Range(2, 401));
  singlet->add_option("--epsilon", so.epsilon, "+1 singlet, -1 the companion state")
      ->check(CLI::IsMember({1, -1}));
  auto* chains = demo->add_subcommand("chains", "Two-qubit chain anticorrelation and the three-qubit chain check");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kParseFailure;
  }

  Context ctx;
  for (const auto& a : args) ctx.args.push_back(a);
  // The output path does not change the result.
  for (std::size_t i = 0; i + 1 < ctx.args.size(); ++i)
    if (ctx.args[i] == "-o" || ctx.args[i] == "--output") ctx.args.erase(ctx.args.begin() + i, ctx.args.begin() + i + 2);

  std::string result;
  try {
    int code = kSuccess;
    if (*validate) {
      ctx.command = "validate-basis";
      code = cmd_validate_basis(vb, ctx, result);
    } else if (*ensemble) {
      ctx.command = "ensemble-build";
      code = cmd_ensemble_build(eo, ctx, result);
    } else if (*meas) {
      ctx.command = "measure";
      code = cmd_measure(mo, ctx, result);
    } else if (*evolve) {
      ctx.command = "evolve";
      code = cmd_evolve(evo, ctx, result);
    } else if (*bell) {
      ctx.command = "demo bell";
      code = cmd_demo_bell(bo, ctx, result);
    } else if (*ks) {
      ctx.command = "demo ks";
      code = cmd_demo_ks(ctx, result);
    } else if (*singlet) {
      ctx.command = "demo singlet";
      code = cmd_demo_singlet(so, ctx, result);
    } else if (*chains) {
      ctx.command = "demo chains";
      code = cmd_demo_chains(ctx, result);
    }
    write_result(output, result, out);
    return code;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParseFailure;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed input: " << e.what() << '\n';
    return kParseFailure;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kParseFailure;
  } catch (const CapExceededError& e) {
    err << "error: " << e.what() << '\n';
    return kCapExceeded;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kValidationFailure;
  }
}

}  // namespace qemerge::cli
