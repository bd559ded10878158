#include "qmi/cli.hpp"

#include <openssl/evp.h>

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <sstream>

#include "qmi/capacity.hpp"
#include "qmi/entanglement.hpp"
#include "qmi/io.hpp"
#include "qmi/mutual_entropy.hpp"
#include "qmi/verify.hpp"

namespace qmi::cli {

namespace {

using io::Json;

constexpr std::uint64_t kDefaultSeed = 1234;

struct Outcome {
  Json result;
  bool converged = true;
  Json budget;
  /// Replaces the generic CSV flattening when non-empty (first row is the header).
  std::vector<std::vector<std::string>> table;
  bool failed = false;
};

class Context {
 public:
  Context(const Json& cfg, std::uint64_t seed, bool bits) : cfg_(cfg), seed_(seed), bits_(bits) {}

  const Json& need(const char* key) const {
    auto it = cfg_.find(key);
    if (it == cfg_.end()) throw io::ParseError(std::string("config: missing field \"") + key + "\"");
    return *it;
  }
  bool has(const char* key) const { return cfg_.contains(key); }
  const Json& cfg() const { return cfg_; }

  template <typename T>
  T get(const char* key, T fallback) const {
    auto it = cfg_.find(key);
    if (it == cfg_.end()) return fallback;
    try {
      return it->get<T>();
    } catch (const Json::exception&) {
      throw io::ParseError(std::string("config.") + key + ": wrong type");
    }
  }

  /// Budget from config[key]; its seed is derived from the master seed.
  SearchBudget budget(const char* key, const SearchBudget& defaults, std::uint64_t offset = 0) const {
    SearchBudget b = io::budget_from_json(cfg_.contains(key) ? cfg_[key] : Json(), defaults);
    b.seed = seed_ + offset;
    return b;
  }

  std::uint64_t seed() const { return seed_; }
  Json value(const EntropyValue& v) const { return io::entropy_to_json(v, bits_); }
  Json value(double nats) const { return io::real_to_json(nats, bits_); }
  Json report(const CapacityReport& r) const { return io::capacity_report_to_json(r, bits_); }
  const char* unit() const { return bits_ ? "bits" : "nats"; }

 private:
  const Json& cfg_;
  std::uint64_t seed_;
  bool bits_;
};

Json vectors_to_json(const std::vector<ComplexVector>& vs) {
  Json out = Json::array();
  for (const auto& v : vs) {
    Json row = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) row.push_back({v(i).real(), v(i).imag()});
    out.push_back(std::move(row));
  }
  return out;
}

Json matrices_to_json(const std::vector<DensityOperator>& states) {
  Json out = Json::array();
  for (const auto& s : states) out.push_back(io::matrix_to_json(s.matrix()));
  return out;
}

Outcome cmd_entropy(const Context& c) {
  const auto rho = io::state_from_json(c.need("state"), "state");
  Outcome o;
  o.result = {{c.unit(), c.value(von_neumann_entropy(rho))}, {"dim", rho.dim()}};
  return o;
}

Outcome cmd_relent(const Context& c) {
  const auto rho = io::state_from_json(c.need("rho"), "rho");
  const auto sigma = io::state_from_json(c.need("sigma"), "sigma");
  const auto v = umegaki_relative_entropy(rho, sigma);
  Outcome o;
  o.result = {{c.unit(), c.value(v)}, {"finite", v.is_finite()}};
  return o;
}

Outcome cmd_mutual(const Context& c) {
  const auto rho = io::state_from_json(c.need("state"), "state");
  const auto ch = io::channel_from_json(c.need("channel"), "channel");
  const SearchBudget budget = c.budget("budget", {});
  const auto r = ohya_mutual_entropy(rho, ch, budget);
  const auto terms = mutual_entropy_fixed(rho, ch, r.decomposition);
  Outcome o;
  o.budget = io::budget_to_json(budget);
  o.converged = r.converged;
  o.result = {{"value", c.value(r.value)},
              {"compound_form", c.value(terms.compound_form)},
              {"ensemble_form", c.value(terms.ensemble_form)},
              {"input_entropy", c.value(von_neumann_entropy(rho))},
              {"searched", r.searched},
              {"evals", r.evals},
              {"numerical_events", r.numerical_events},
              {"decomposition",
               {{"weights", r.decomposition.weights}, {"vectors", vectors_to_json(r.decomposition.vectors)}}}};
  return o;
}

Outcome cmd_pseudo(const Context& c) {
  const auto rho = io::state_from_json(c.need("state"), "state");
  const auto ch = io::channel_from_json(c.need("channel"), "channel");
  const int n = c.get<int>("n_components", rho.dim());
  if (n < 1) throw io::ParseError("config.n_components: must be positive");
  const SearchBudget budget = c.budget("budget", {});
  const auto r = pseudo_mutual_entropy(rho, ch, n, budget);
  const auto ohya = ohya_mutual_entropy(rho, ch, budget);
  Outcome o;
  o.budget = io::budget_to_json(budget);
  o.converged = r.converged;
  o.result = {{"value", c.value(r.value)},
              {"ohya_value", c.value(ohya.value)},
              {"weights", r.weights},
              {"components", matrices_to_json(r.components)},
              {"evals", r.evals}};
  return o;
}

Outcome cmd_holevo(const Context& c) {
  const auto lambda = io::probabilities_from_json(c.need("lambda"), "lambda");
  const auto coded = io::states_from_json(c.need("coding"), "coding");
  const auto ch = io::channel_from_json(c.need("channel"), "channel");
  if (coded.size() != lambda.size()) throw io::ParseError("config: lambda and coding lengths differ");
  Outcome o;
  o.result = {{"value", c.value(holevo_bound(lambda, coded, ch))}};
  if (c.has("decoding")) {
    const CqcInstance inst{lambda, CodingScheme(coded), ch, io::povm_from_json(c.need("decoding"), "decoding")};
    o.result["cqc_value"] = c.value(cqc_mutual_entropy(inst));
  }
  return o;
}

Outcome cmd_capacity(const Context& c) {
  const auto ch = io::channel_from_json(c.need("channel"), "channel");
  const std::string functional = c.get<std::string>("functional", "both");
  if (functional != "quantum" && functional != "pseudo" && functional != "both") {
    throw io::ParseError("config.functional: expected quantum, pseudo or both");
  }
  CapacityOptions opt;
  opt.family = io::family_from_json(c.has("family") ? c.need("family") : Json());
  opt.inner = c.budget("inner_budget", opt.inner, 1);
  const SearchBudget budget = c.budget("budget", {});
  const int n = c.get<int>("n_components", 0);
  Outcome o;
  o.budget = {{"outer", io::budget_to_json(budget)}, {"inner", io::budget_to_json(opt.inner)}};
  const auto q = quantum_capacity(ch, budget, opt);
  o.result["bound"] = c.value(q.bound);
  if (functional != "pseudo") {
    o.result["quantum"] = c.report(q);
    o.converged = q.converged;
  }
  if (functional != "quantum") {
    const auto p = pseudo_capacity(ch, n, budget, opt, &q);
    o.result["pseudo"] = c.report(p);
    o.converged = o.converged && p.converged;
  }
  return o;
}

CqcInstance cqc_instance(const Context& c) {
  CqcInstance inst{io::probabilities_from_json(c.need("lambda"), "lambda"),
                   CodingScheme(io::states_from_json(c.need("coding"), "coding")),
                   io::channel_from_json(c.need("channel"), "channel"),
                   io::povm_from_json(c.need("decoding"), "decoding")};
  if (static_cast<int>(inst.lambda.size()) != inst.coding.alphabet_size()) {
    throw io::ParseError("config: lambda and coding lengths differ");
  }
  inst.validate();
  return inst;
}

Outcome cmd_cqc(const Context& c) {
  const auto inst = cqc_instance(c);
  const std::string mode = c.get<std::string>("mode", "chain");
  CqcOptions opt;
  if (c.has("options")) {
    const Json& j = c.need("options");
    opt.mixed_coding = j.value("mixed_coding", false);
    opt.outcomes = j.value("outcomes", 0);
    opt.projective_only = j.value("projective_only", false);
  }
  const SearchBudget budget = c.budget("budget", {});
  Outcome o;
  o.budget = io::budget_to_json(budget);
  o.result["mode"] = mode;
  o.result["holevo_bound"] = c.value(holevo_bound(inst.lambda, inst.coding.states(), inst.channel));
  if (mode == "evaluate") {
    o.result["value"] = c.value(cqc_mutual_entropy(inst));
    o.result["transition"] = cqc_transition(inst.coding, inst.channel, inst.decoding);
    return o;
  }
  std::vector<CapacityReport> reports;
  if (mode == "chain") {
    reports = cqc_capacity_chain(inst, budget, opt);
  } else if (mode == "fixed") {
    reports.push_back(cqc_capacity(inst, CqcMode::Fixed, budget, opt));
  } else if (mode == "coding-free") {
    reports.push_back(cqc_capacity(inst, CqcMode::CodingFree, budget, opt));
  } else if (mode == "coding-decoding-free") {
    reports.push_back(cqc_capacity(inst, CqcMode::CodingDecodingFree, budget, opt));
  } else {
    throw io::ParseError("config.mode: unknown mode '" + mode + "'");
  }
  Json modes = Json::array();
  for (const auto& r : reports) {
    modes.push_back(c.report(r));
    o.converged = o.converged && r.converged;
  }
  o.result["modes"] = std::move(modes);
  o.table.push_back({"mode", "value", "bound", "converged", "evals"});
  for (const auto& r : reports) {
    o.table.push_back({r.mode, o.result["modes"][o.table.size() - 1]["value"].dump(),
                       c.value(r.bound).dump(), r.converged ? "true" : "false", std::to_string(r.evals)});
  }
  return o;
}

Json compound_json(const DensityOperator& theta, int g, int k) {
  return {{"d_G", g}, {"d_K", k}, {"theta", io::matrix_to_json(theta.matrix())}};
}

Json disentanglement_json(const Context& c, const CompoundState& cs) {
  const auto dd = conditional_and_degree(cs);
  return {{"h_sigma", c.value(dd.h_sigma)},
          {"mutual", c.value(dd.mutual)},
          {"conditional", c.value(dd.conditional)},
          {"degree", c.value(dd.degree)}};
}

Outcome cmd_entangle(const Context& c) {
  std::string action = c.get<std::string>("action", "");
  if (action.empty()) action = c.has("compound") ? "classify" : c.has("sigma") ? "standard" : "d_compound";
  std::optional<DensityOperator> theta;
  int g = 0;
  int k = 0;
  if (action == "classify" || action == "from_state") {
    auto in = io::compound_from_json(c.need("compound"), "compound");
    theta = std::move(in.theta);
    g = in.d_g;
    k = in.d_k;
  } else if (action == "standard") {
    const auto ec = standard_entanglement(io::state_from_json(c.need("sigma"), "sigma"));
    theta = ec.compound.theta();
    g = k = ec.compound.d_in();
  } else if (action == "d_compound") {
    const auto p = io::probabilities_from_json(c.need("p"), "p");
    const auto ec = d_compound(p, io::states_from_json(c.need("omegas"), "omegas"));
    theta = ec.compound.theta();
    g = ec.compound.d_in();
    k = ec.compound.d_out();
  } else {
    throw io::ParseError("config.action: unknown action '" + action + "'");
  }
  const CompoundState cs(*theta, g, k);
  const auto op = entangling_from_state(*theta, g, k);
  const auto weights = canonical_schatten(cs.input_marginal()).weights;
  Outcome o;
  o.result = {{"action", action},
              {"classification", io::classification_to_json(classify_compound(*theta, g, k))},
              {"mutual_entropy", c.value(entangled_mutual_entropy(cs))},
              {"disentanglement", disentanglement_json(c, cs)},
              {"weak_orthogonality_defect", weak_orthogonality_defect(op, weights)},
              {"strong_orthogonality_defect", strong_orthogonality_defect(op)},
              {"compound", compound_json(*theta, g, k)}};
  if (action == "from_state") {
    o.result["kappa"] = {{"f_dim", op.f_dim}, {"basis", io::matrix_to_json(op.basis)}, {"vectors", vectors_to_json(op.kappa)}};
  }
  return o;
}

Outcome cmd_qdc(const Context& c) {
  const auto rho = io::state_from_json(c.need("state"), "state");
  const auto ch = io::channel_from_json(c.need("channel"), "channel");
  if (rho.dim() != ch.in_dim()) throw io::ParseError("config: state and channel dimensions differ");
  ClassMutualOptions mopt;
  mopt.relaxed = c.get<bool>("relaxed", false);
  mopt.f_dim = c.get<int>("f_dim", 0);
  std::vector<std::string> classes = c.get<std::vector<std::string>>("classes", {"c", "d", "q"});
  const SearchBudget budget = c.budget("budget", {});
  Outcome o;
  o.budget = {{"mutual", io::budget_to_json(budget)}};

  std::vector<ClassMutualResult> results;
  for (const auto& name : classes) {
    EntanglementClass cls;
    try {
      cls = entanglement_class_from(name);
    } catch (const Error&) {
      throw io::ParseError("config.classes: unknown class '" + name + "'");
    }
    const ClassMutualResult* seed = results.empty() ? nullptr : &results.back();
    results.push_back(class_mutual_entropy(rho, ch, cls, budget, mopt, seed));
  }
  Json mutual = Json::object();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    Json j{{"value", c.value(r.value)},
           {"feasible", r.feasible},
           {"converged", r.converged},
           {"violation", r.violation},
           {"evals", r.evals}};
    if (r.compound) j["disentanglement"] = disentanglement_json(c, CompoundState(*r.compound, rho.dim(), ch.out_dim()));
    mutual[classes[i]] = std::move(j);
    o.converged = o.converged && r.converged;
  }
  const auto sigma = ch.apply(rho);
  o.result = {{"mutual", std::move(mutual)},
              {"relaxed", mopt.relaxed},
              {"output_entropy", c.value(von_neumann_entropy(sigma))},
              {"q_entropy", c.value(q_entropy_closed_form({{1.0, sigma}}))}};
  if (c.get<bool>("q_entropy_search", false)) {
    const SearchBudget qb = c.budget("q_entropy_budget", {4, 600, 0, 1e-10}, 2);
    o.budget["q_entropy"] = io::budget_to_json(qb);
    const auto q = q_entropy_sup(sigma, qb);
    o.result["q_entropy_search"] = {{"value", c.value(q.value)}, {"converged", q.converged}, {"evals", q.evals}};
    o.converged = o.converged && q.converged;
  }
  if (c.get<bool>("capacity", false)) {
    ClassCapacityOptions copt;
    copt.mutual = mopt;
    copt.family = io::family_from_json(c.has("family") ? c.need("family") : Json());
    copt.inner = c.budget("inner_budget", copt.inner, 1);
    const SearchBudget cb = c.budget("capacity_budget", {2, 120, 0, 1e-8}, 3);
    o.budget["capacity"] = io::budget_to_json(cb);
    o.budget["inner"] = io::budget_to_json(copt.inner);
    const auto chain = class_capacity_chain(ch, cb, copt);
    const char* names[] = {"c", "d", "q"};
    Json caps = Json::object();
    for (int i = 0; i < 3; ++i) {
      caps[names[i]] = c.report(chain[i]);
      o.converged = o.converged && chain[i].converged;
    }
    // The dimension-valued bound (C <= dim K) is reported for reference only.
    caps["raw_dim_bound"] = ch.out_dim();
    o.result["capacities"] = std::move(caps);
  }
  return o;
}

// ---- verify ----------------------------------------------------------------------------------

Json check_to_json(const verify::CheckResult& r) {
  return {{"id", r.id},           {"name", r.name},     {"passed", r.passed},
          {"checked", r.checked}, {"failed", r.failed}, {"max_error", r.max_error},
          {"detail", r.detail}};
}

verify::CheckResult cli_check(const std::string& id, const std::string& name, bool ok, double err,
                              const std::string& detail) {
  verify::CheckResult r;
  r.id = id;
  r.name = name;
  r.passed = ok;
  r.checked = 1;
  r.failed = ok ? 0 : 1;
  r.max_error = err;
  r.detail = detail;
  return r;
}

int run_captured(const std::string& command, const std::string& text, std::uint64_t seed, std::string& out,
                 std::string& err) {
  JobConfig job;
  job.command = command;
  job.seed = seed;
  std::ostringstream o;
  std::ostringstream e;
  const int code = run_text(job, text, "<self-test>", o, e);
  out = o.str();
  err = e.str();
  return code;
}

verify::SuiteReport cli_suite(std::uint64_t seed) {
  verify::SuiteReport rep;
  rep.name = "cli";
  std::string a, b, e;

  const std::string mutual_cfg =
      R"({"state":{"diagonal":[0.7,0.3]},"channel":{"kind":"identity","dim":2}})";
  int code = run_captured("mutual", mutual_cfg, seed, a, e);
  double err = 1.0;
  if (code == kOk) err = std::abs(Json::parse(a)["result"]["value"].get<double>() - 0.610864);
  rep.checks.push_back(cli_check("CL1", "mutual on diag(0.7, 0.3) through the identity", code == kOk && err < 1e-6,
                                 err, "0.610864 within 1e-6"));

  code = run_captured("entropy", R"({"state":{"maximally_mixed":2}})", seed, a, e);
  err = 1.0;
  if (code == kOk) err = std::abs(Json::parse(a)["result"]["nats"].get<double>() - std::numbers::ln2);
  rep.checks.push_back(cli_check("CL2", "entropy of I/2", code == kOk && err < 1e-12, err, "ln 2 within 1e-12"));

  code = run_captured("relent", R"({"rho":{"diagonal":[1,0]},"sigma":{"diagonal":[0,1]}})", seed, a, e);
  const bool inf_ok = code == kOk && Json::parse(a)["result"]["nats"] == "inf";
  rep.checks.push_back(cli_check("CL3", "infinite relative entropy serialized as \"inf\"", inf_ok, 0.0, "string literal"));

  code = run_captured("entropy", "{\n  \"state\": {\"diagonal\": [0.5, 0.5]\n}", seed, a, e);
  const bool anchored = code == kUsage && e.find("line ") != std::string::npos && e.find("column ") != std::string::npos;
  rep.checks.push_back(cli_check("CL4", "malformed JSON exits 1 with a line-anchored message", anchored, 0.0,
                                 "exit code and message"));

  code = run_captured("mutual", R"({"state":{"maximally_mixed":2},"channel":{"kind":"nope"}})", seed, a, e);
  rep.checks.push_back(cli_check("CL5", "invalid problem exits 1", code == kUsage, 0.0, "unknown channel kind"));

  const std::string degenerate_cfg =
      R"({"state":{"maximally_mixed":2},"channel":{"kind":"amplitude_damping","gamma":0.3},)"
      R"("budget":{"restarts":3,"max_evals":200}})";
  const int c1 = run_captured("mutual", degenerate_cfg, seed, a, e);
  const int c2 = run_captured("mutual", degenerate_cfg, seed, b, e);
  rep.checks.push_back(cli_check("CL6", "identical config and seed give byte-identical reports",
                                 c1 == kOk && c2 == kOk && a == b, 0.0, "searched mutual entropy"));
  return rep;
}

Outcome cmd_verify(const Context& c) {
  std::vector<std::string> suites = c.get<std::vector<std::string>>("suites", {});
  if (suites.empty()) {
    suites = verify::suite_names();
    suites.insert(suites.end() - 1, "cli");
  }
  Outcome o;
  o.budget = Json::object();
  Json list = Json::array();
  long checked = 0;
  bool all = true;
  o.table.push_back({"suite", "id", "name", "passed", "checked", "failed", "max_error"});
  for (const auto& name : suites) {
    verify::SuiteReport rep;
    if (name == "cli") {
      rep = cli_suite(c.seed());
    } else {
      try {
        rep = verify::run_suite(name, c.seed());
      } catch (const std::invalid_argument& e) {
        throw io::ParseError(std::string("config.suites: ") + e.what());
      }
    }
    Json checks = Json::array();
    for (const auto& ch : rep.checks) {
      checks.push_back(check_to_json(ch));
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3e", ch.max_error);
      o.table.push_back({rep.name, ch.id, ch.name, ch.passed ? "true" : "false", std::to_string(ch.checked),
                         std::to_string(ch.failed), buf});
    }
    const long passed = static_cast<long>(rep.checks.size()) - rep.failed();
    list.push_back({{"name", rep.name},
                    {"checks", static_cast<long>(rep.checks.size())},
                    {"passed", passed},
                    {"failed", rep.failed()},
                    {"assertions", rep.checked()},
                    {"results", std::move(checks)}});
    checked += rep.checked();
    all = all && rep.passed();
  }
  o.result = {{"suites", std::move(list)}, {"passed", all}, {"assertions", checked}};
  o.failed = !all;
  return o;
}

void print_suite_table(const Json& result, std::ostream& err) {
  err << std::left << std::setw(16) << "suite" << std::right << std::setw(8) << "checks" << std::setw(8) << "passed"
      << std::setw(8) << "failed" << std::setw(12) << "assertions" << "\n";
  for (const auto& s : result["suites"]) {
    err << std::left << std::setw(16) << s["name"].get<std::string>() << std::right << std::setw(8)
        << s["checks"].get<long>() << std::setw(8) << s["passed"].get<long>() << std::setw(8) << s["failed"].get<long>()
        << std::setw(12) << s["assertions"].get<long>() << "\n";
    for (const auto& r : s["results"]) {
      if (!r["passed"].get<bool>()) err << "  FAIL " << r["id"].get<std::string>() << ": " << r["detail"].get<std::string>() << "\n";
    }
  }
  err << (result["passed"].get<bool>() ? "all suites passed" : "verification FAILED") << "\n";
}

// ---- output ----------------------------------------------------------------------------------

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
  return q + "\"";
}

bool is_matrix(const Json& j) { return j.is_object() && j.contains("rows") && j.contains("cols") && j.contains("data"); }

void flatten(const Json& j, const std::string& prefix, std::vector<std::vector<std::string>>& rows) {
  if (is_matrix(j)) {
    rows.push_back({prefix, std::to_string(j["rows"].get<long>()) + "x" + std::to_string(j["cols"].get<long>()) + " matrix"});
  } else if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, rows);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), rows);
  } else {
    rows.push_back({prefix, j.is_string() ? j.get<std::string>() : j.dump()});
  }
}

std::string render_csv(const Json& report, const Outcome& o) {
  std::vector<std::vector<std::string>> rows = o.table;
  if (rows.empty()) {
    rows.push_back({"key", "value"});
    for (const char* key : {"command", "input_hash", "seed", "converged", "units"}) flatten(report[key], key, rows);
    flatten(o.result, "result", rows);
  }
  std::string s;
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) s += (i ? "," : "") + csv_cell(row[i]);
    s += "\n";
  }
  return s;
}

Outcome dispatch(const std::string& command, const Context& c) {
  if (command == "entropy") return cmd_entropy(c);
  if (command == "relent") return cmd_relent(c);
  if (command == "mutual") return cmd_mutual(c);
  if (command == "pseudo-mutual") return cmd_pseudo(c);
  if (command == "holevo") return cmd_holevo(c);
  if (command == "capacity") return cmd_capacity(c);
  if (command == "cqc") return cmd_cqc(c);
  if (command == "entangle") return cmd_entangle(c);
  if (command == "qdc") return cmd_qdc(c);
  if (command == "verify") return cmd_verify(c);
  throw io::ParseError("unknown command '" + command + "'");
}

std::uint64_t master_seed(const JobConfig& job, const Json& cfg) {
  if (job.seed) return *job.seed;
  auto from = [](const Json& j, const char* where) -> std::optional<std::uint64_t> {
    if (!j.is_number_integer() || j.get<long long>() < 0) throw io::ParseError(std::string(where) + ": expected a non-negative integer");
    return j.get<std::uint64_t>();
  };
  if (cfg.contains("seed")) return *from(cfg["seed"], "config.seed");
  if (cfg.contains("budget") && cfg["budget"].is_object() && cfg["budget"].contains("seed")) {
    return *from(cfg["budget"]["seed"], "config.budget.seed");
  }
  return kDefaultSeed;
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> list{"entropy", "relent", "mutual",   "pseudo-mutual", "holevo",
                                             "capacity", "cqc",   "entangle", "qdc",           "verify"};
  return list;
}

std::string sha256_hex(const std::string& bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  static const char* hex = "0123456789abcdef";
  std::string s;
  for (unsigned int i = 0; i < len; ++i) {
    s += hex[md[i] >> 4];
    s += hex[md[i] & 15];
  }
  return s;
}

int run_text(const JobConfig& job, const std::string& config_text, const std::string& source, std::ostream& out,
             std::ostream& err) {
  try {
    const Json cfg = io::parse_document(config_text, source);
    if (!cfg.is_object()) throw io::ParseError(source + ": top level must be an object");
    const std::uint64_t seed = master_seed(job, cfg);
    const Context ctx(cfg, seed, job.bits);
    Outcome o = dispatch(job.command, ctx);
    if (o.budget.is_null()) o.budget = io::budget_to_json(ctx.budget("budget", {}));

    const Json report{{"command", job.command}, {"input_hash", sha256_hex(config_text)},
                      {"seed", seed},           {"budget", o.budget},
                      {"converged", o.converged}, {"units", ctx.unit()},
                      {"result", o.result}};
    if (job.command == "verify") print_suite_table(o.result, err);
    const std::string text = job.csv ? render_csv(report, o) : report.dump(2) + "\n";
    if (job.out_path.empty()) {
      out << text;
    } else {
      std::ofstream f(job.out_path, std::ios::binary);
      if (!f || !(f << text)) {
        err << "qmi: cannot write " << job.out_path << "\n";
        return kUsage;
      }
    }
    return o.failed ? kConsistency : kOk;
  } catch (const io::ParseError& e) {
    err << "qmi: " << e.what() << "\n";
    return kUsage;
  } catch (const Json::exception& e) {
    err << "qmi: " << source << ": " << e.what() << "\n";
    return kUsage;
  } catch (const ConsistencyError& e) {
    err << "qmi: numerical consistency failure: " << e.what() << "\n";
    return kConsistency;
  } catch (const Error& e) {
    err << "qmi: invalid input in " << source << ": " << e.what() << "\n";
    return kUsage;
  } catch (const std::exception& e) {
    err << "qmi: internal error: " << e.what() << "\n";
    return kConsistency;
  }
}

int run(const JobConfig& job, std::ostream& out, std::ostream& err) {
  std::ifstream f(job.config_path, std::ios::binary);
  if (!f) {
    err << "qmi: cannot read config '" << job.config_path << "'\n";
    return kUsage;
  }
  std::ostringstream buf;
  buf << f.rdbuf();
  return run_text(job, buf.str(), job.config_path, out, err);
}

int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Quantum mutual entropy and capacity computations from JSON problem files."};
  app.name("qmi");
  JobConfig job;
  std::uint64_t seed = 0;
  app.add_option("command", job.command, "One of: entropy, relent, mutual, pseudo-mutual, holevo, capacity, cqc, entangle, qdc, verify")
      ->required()
      ->check(CLI::IsMember(commands()));
  app.add_option("--config", job.config_path, "JSON problem file")->required();
  auto* seed_opt = app.add_option("--seed", seed, "Master seed; overrides the config");
  app.add_flag("--bits", job.bits, "Report entropies in bits");
  app.add_flag("--csv", job.csv, "Tabular CSV output");
  app.add_option("--out", job.out_path, "Write the report to this file");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }
  if (seed_opt->count() > 0) job.seed = seed;
  return run(job, out, err);
}

}  // namespace qmi::cli
