#include "qmi/io.hpp"

#include <cmath>
#include <numbers>

namespace qmi::io {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw ParseError(where + ": " + what); }

const Json& field(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field \"") + key + "\"");
  return *it;
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(where, "expected a number");
  return j.get<double>();
}

int count(const Json& j, const std::string& where) {
  if (!j.is_number_integer() && !j.is_number_unsigned()) fail(where, "expected an integer");
  const long long v = j.get<long long>();
  if (v < 1 || v > 64) fail(where, "dimension must lie in [1, 64]");
  return static_cast<int>(v);
}

Complex complex_from(const Json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number()) {
    return {j[0].get<double>(), j[1].get<double>()};
  }
  fail(where, "expected a complex number [re, im] or a real number");
}

// Wraps library validation errors so that bad input surfaces as a parse failure.
template <typename F>
auto checked(const std::string& where, F&& f) {
  try {
    return f();
  } catch (const ParseError&) {
    throw;
  } catch (const ConsistencyError&) {
    throw;
  } catch (const Error& e) {
    fail(where, e.what());
  }
}

std::vector<std::vector<double>> table_from(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::string w = where + "[" + std::to_string(r) + "]";
    if (!j[r].is_array()) fail(w, "expected an array of numbers");
    std::vector<double> row;
    for (const auto& x : j[r]) row.push_back(number(x, w));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

ParseError::ParseError(const std::string& what, int line, int column)
    : Error(line > 0 ? what + " (line " + std::to_string(line) + ", column " + std::to_string(column) + ")" : what),
      line_(line),
      column_(column) {}

Json parse_document(const std::string& text, const std::string& source_name) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    // e.byte is the 1-based offset of the offending character.
    const std::size_t stop = std::min(e.byte == 0 ? 0 : e.byte - 1, text.size());
    int line = 1;
    int column = 1;
    for (std::size_t i = 0; i < stop; ++i) {
      if (text[i] == '\n') {
        ++line;
        column = 1;
      } else {
        ++column;
      }
    }
    std::string msg = e.what();
    if (auto pos = msg.find("syntax error"); pos != std::string::npos) msg = msg.substr(pos);
    throw ParseError(source_name + ": " + msg, line, column);
  }
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& where) {
  const int rows = count(field(j, "rows", where), where + ".rows");
  const int cols = count(field(j, "cols", where), where + ".cols");
  const Json& data = field(j, "data", where);
  if (!data.is_array()) fail(where + ".data", "expected an array");
  if (data.size() != static_cast<std::size_t>(rows) * cols) {
    fail(where + ".data", "expected " + std::to_string(rows * cols) + " entries, found " + std::to_string(data.size()));
  }
  ComplexMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * cols + c;
      m(r, c) = complex_from(data[i], where + ".data[" + std::to_string(i) + "]");
    }
  return m;
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json data = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back({m(r, c).real(), m(r, c).imag()});
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
}

ComplexVector vector_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of amplitudes");
  ComplexVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(i) = complex_from(j[i], where + "[" + std::to_string(i) + "]");
  return v;
}

DensityOperator state_from_json(const Json& j, const std::string& where) {
  if (!j.is_object()) fail(where, "expected an object");
  if (j.contains("diagonal")) {
    std::vector<double> p;
    const Json& d = j["diagonal"];
    if (!d.is_array() || d.empty()) fail(where + ".diagonal", "expected a non-empty array");
    for (const auto& x : d) p.push_back(number(x, where + ".diagonal"));
    return checked(where, [&] { return DensityOperator::diagonal(p); });
  }
  if (j.contains("pure")) {
    ComplexVector v = vector_from_json(j["pure"], where + ".pure");
    if (v.norm() == 0.0) fail(where + ".pure", "zero vector");
    v /= v.norm();
    return DensityOperator::pure(v);
  }
  if (j.contains("maximally_mixed")) return DensityOperator::maximally_mixed(count(j["maximally_mixed"], where));
  const ComplexMatrix m = matrix_from_json(j, where);
  return checked(where, [&] { return DensityOperator(m); });
}

std::vector<DensityOperator> states_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array of states");
  std::vector<DensityOperator> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(state_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

ProbabilityVector probabilities_from_json(const Json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) fail(where, "expected a non-empty array");
  std::vector<double> p;
  for (const auto& x : j) p.push_back(number(x, where));
  return checked(where, [&] { return ProbabilityVector(p); });
}

Povm povm_from_json(const Json& j, const std::string& where) {
  if (j.is_object() && j.contains("kind")) {
    const std::string kind = j["kind"].get<std::string>();
    if (kind == "computational") return Povm::computational(count(field(j, "dim", where), where + ".dim"));
    if (kind == "projective") {
      const ComplexMatrix b = matrix_from_json(field(j, "basis", where), where + ".basis");
      return checked(where, [&] { return Povm::projective(b); });
    }
    fail(where + ".kind", "unknown POVM kind '" + kind + "'");
  }
  if (!j.is_array() || j.empty()) fail(where, "expected an array of effect matrices");
  std::vector<ComplexMatrix> effects;
  for (std::size_t i = 0; i < j.size(); ++i) effects.push_back(matrix_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return checked(where, [&] { return Povm(std::move(effects)); });
}

KrausChannel channel_from_json(const Json& j, const std::string& where) {
  const Json& k = field(j, "kind", where);
  if (!k.is_string()) fail(where + ".kind", "expected a string");
  const std::string kind = k.get<std::string>();
  auto dim = [&](const char* key = "dim") { return count(field(j, key, where), where + "." + key); };
  auto param = [&](const char* key) { return number(field(j, key, where), where + "." + key); };
  return checked(where, [&]() -> KrausChannel {
    if (kind == "kraus") {
      const Json& ops = field(j, "ops", where);
      if (!ops.is_array() || ops.empty()) fail(where + ".ops", "expected a non-empty array of matrices");
      std::vector<ComplexMatrix> m;
      for (std::size_t i = 0; i < ops.size(); ++i) m.push_back(matrix_from_json(ops[i], where + ".ops[" + std::to_string(i) + "]"));
      const int in = j.contains("in_dim") ? dim("in_dim") : static_cast<int>(m.front().cols());
      const int out = j.contains("out_dim") ? dim("out_dim") : static_cast<int>(m.front().rows());
      return KrausChannel(in, out, std::move(m));
    }
    if (kind == "stinespring") {
      const ComplexMatrix v = matrix_from_json(field(j, "isometry", where), where + ".isometry");
      return stinespring_to_kraus(StinespringIsometry(v, dim("d_noise"), dim("d_out")));
    }
    if (kind == "identity") return identity_channel(dim());
    if (kind == "depolarizing") return depolarizing_channel(dim(), param("p"));
    if (kind == "amplitude_damping") return amplitude_damping_channel(param("gamma"));
    if (kind == "phase_damping") return phase_damping_channel(j.contains("dim") ? dim() : 2, param("lambda"));
    if (kind == "unitary") return unitary_channel(matrix_from_json(field(j, "u", where), where + ".u"));
    if (kind == "cq") return cq_channel(states_from_json(field(j, "states", where), where + ".states"));
    if (kind == "measure") return measurement_channel(povm_from_json(field(j, "povm", where), where + ".povm"));
    if (kind == "classical") return classical_channel(table_from(field(j, "transition", where), where + ".transition"));
    if (kind == "constant") return constant_channel(dim("in_dim"), state_from_json(field(j, "state", where), where + ".state"));
    fail(where + ".kind", "unknown channel kind '" + kind + "'");
  });
}

SearchBudget budget_from_json(const Json& j, const SearchBudget& defaults) {
  SearchBudget b = defaults;
  if (j.is_null()) return b;
  if (!j.is_object()) fail("budget", "expected an object");
  auto positive = [&](const char* key, int& out) {
    if (!j.contains(key)) return;
    if (!j[key].is_number_integer() || j[key].get<long long>() < 1) fail(std::string("budget.") + key, "expected a positive integer");
    out = j[key].get<int>();
  };
  positive("restarts", b.restarts);
  positive("max_evals", b.max_evals);
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() || j["seed"].get<long long>() < 0) fail("budget.seed", "expected a non-negative integer");
    b.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("tol")) {
    b.tol = number(j["tol"], "budget.tol");
    if (!(b.tol > 0.0)) fail("budget.tol", "expected a positive number");
  }
  return b;
}

Json budget_to_json(const SearchBudget& b) {
  return {{"restarts", b.restarts}, {"max_evals", b.max_evals}, {"seed", b.seed}, {"tol", b.tol}};
}

StateFamily family_from_json(const Json& j) {
  if (j.is_null()) return {};
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "full") return StateFamily::full();
    if (s == "diagonal") return StateFamily::diagonal();
    fail("family", "unknown family '" + s + "'");
  }
  const std::string kind = field(j, "kind", "family").get<std::string>();
  if (kind == "full") return StateFamily::full();
  if (kind == "diagonal") return StateFamily::diagonal();
  if (kind == "rank") return StateFamily::of_rank(count(field(j, "rank", "family"), "family.rank"));
  fail("family.kind", "unknown family '" + kind + "'");
}

CompoundInput compound_from_json(const Json& j, const std::string& where) {
  const int g = count(field(j, "d_G", where), where + ".d_G");
  const int k = count(field(j, "d_K", where), where + ".d_K");
  DensityOperator theta = state_from_json(field(j, "theta", where), where + ".theta");
  if (theta.dim() != g * k) fail(where + ".theta", "dimension is not d_G * d_K");
  return {std::move(theta), g, k};
}

Json real_to_json(double nats, bool bits) {
  if (std::isinf(nats)) return nats > 0 ? "inf" : "-inf";
  if (std::isnan(nats)) return "nan";
  return bits ? nats / std::numbers::ln2 : nats;
}

Json entropy_to_json(const EntropyValue& v, bool bits) { return real_to_json(v.nats(), bits); }

Json capacity_report_to_json(const CapacityReport& r, bool bits) {
  Json j{{"value", entropy_to_json(r.value, bits)},
         {"mode", r.mode},
         {"converged", r.converged},
         {"feasible", r.feasible},
         {"evals", r.evals},
         {"bound", real_to_json(r.bound, bits)}};
  if (r.input_state) j["input_state"] = matrix_to_json(r.input_state->matrix());
  if (!r.weights.empty()) j["weights"] = r.weights;
  if (!r.states.empty()) {
    Json s = Json::array();
    for (const auto& x : r.states) s.push_back(matrix_to_json(x.matrix()));
    j["states"] = std::move(s);
  }
  if (!r.effects.empty()) {
    Json e = Json::array();
    for (const auto& x : r.effects) e.push_back(matrix_to_json(x));
    j["effects"] = std::move(e);
  }
  return j;
}

Json classification_to_json(const ClassificationReport& r) {
  return {{"class", to_string(r.cls)}, {"off_diag_norm", r.off_diag_norm}, {"max_commutator", r.max_commutator}};
}

}  // namespace qmi::io
