#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qmi/capacity.hpp"
#include "qmi/channels.hpp"
#include "qmi/cli.hpp"
#include "qmi/entanglement.hpp"
#include "qmi/entropy.hpp"
#include "qmi/io.hpp"
#include "qmi/mutual_entropy.hpp"
#include "qmi/verify.hpp"

namespace py = pybind11;
using namespace qmi;

namespace {

DensityOperator state(const ComplexMatrix& m) { return DensityOperator(m); }

std::vector<DensityOperator> states(const std::vector<ComplexMatrix>& ms) {
  std::vector<DensityOperator> out;
  out.reserve(ms.size());
  for (const auto& m : ms) out.emplace_back(m);
  return out;
}

std::vector<ComplexMatrix> matrices(const std::vector<DensityOperator>& ss) {
  std::vector<ComplexMatrix> out;
  for (const auto& s : ss) out.push_back(s.matrix());
  return out;
}

py::dict capacity_dict(const CapacityReport& r) {
  py::dict d;
  d["value"] = r.value.nats();
  d["converged"] = r.converged;
  d["feasible"] = r.feasible;
  d["evals"] = r.evals;
  d["mode"] = r.mode;
  d["bound"] = r.bound;
  d["input_state"] = r.input_state ? py::cast(r.input_state->matrix()) : py::none();
  d["weights"] = r.weights;
  d["states"] = matrices(r.states);
  d["effects"] = r.effects;
  return d;
}

py::dict class_result_dict(const ClassMutualResult& r) {
  py::dict d;
  d["value"] = r.value.nats();
  d["cls"] = to_string(r.cls);
  d["converged"] = r.converged;
  d["feasible"] = r.feasible;
  d["violation"] = r.violation;
  d["evals"] = r.evals;
  d["compound"] = r.compound ? py::cast(r.compound->matrix()) : py::none();
  return d;
}

CqcInstance cqc(const std::vector<double>& lambda, const std::vector<ComplexMatrix>& coding, const KrausChannel& ch,
                const std::vector<ComplexMatrix>& effects) {
  CqcInstance inst{ProbabilityVector(lambda), CodingScheme(states(coding)), ch, Povm(effects)};
  inst.validate();
  return inst;
}

CqcMode cqc_mode(const std::string& s) {
  if (s == "fixed") return CqcMode::Fixed;
  if (s == "coding-free") return CqcMode::CodingFree;
  if (s == "coding-decoding-free") return CqcMode::CodingDecodingFree;
  throw InvalidArgument("unknown C-Q-C mode '" + s + "'");
}

StateFamily family(const std::string& kind, int rank) {
  if (kind == "full") return StateFamily::full();
  if (kind == "diagonal") return StateFamily::diagonal();
  if (kind == "rank") return StateFamily::of_rank(rank);
  throw InvalidArgument("unknown state family '" + kind + "'");
}

}  // namespace

PYBIND11_MODULE(_qmi, m) {
  m.doc() = "Quantum mutual entropy, channel capacities and the q/d/c entanglement hierarchy.";

  auto base = py::register_exception<Error>(m, "QmiError", PyExc_ValueError);
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<InvalidArgument>(m, "InvalidArgument", base.ptr());
  py::register_exception<ConsistencyError>(m, "ConsistencyError", PyExc_ArithmeticError);

  py::class_<SearchBudget>(m, "SearchBudget")
      .def(py::init([](int restarts, int max_evals, std::uint64_t seed, double tol) {
             return SearchBudget{restarts, max_evals, seed, tol};
           }),
           py::arg("restarts") = 32, py::arg("max_evals") = 400, py::arg("seed") = 1234, py::arg("tol") = 1e-7)
      .def_readwrite("restarts", &SearchBudget::restarts)
      .def_readwrite("max_evals", &SearchBudget::max_evals)
      .def_readwrite("seed", &SearchBudget::seed)
      .def_readwrite("tol", &SearchBudget::tol)
      .def("__repr__", [](const SearchBudget& b) {
        std::ostringstream s;
        s << "SearchBudget(restarts=" << b.restarts << ", max_evals=" << b.max_evals << ", seed=" << b.seed
          << ", tol=" << b.tol << ")";
        return s.str();
      });

  py::class_<KrausChannel>(m, "Channel")
      .def(py::init([](const std::vector<ComplexMatrix>& ops) {
             if (ops.empty()) throw InvalidArgument("a channel needs at least one Kraus operator");
             return KrausChannel(static_cast<int>(ops.front().cols()), static_cast<int>(ops.front().rows()), ops);
           }),
           py::arg("kraus"))
      .def_property_readonly("in_dim", &KrausChannel::in_dim)
      .def_property_readonly("out_dim", &KrausChannel::out_dim)
      .def_property_readonly("kraus", &KrausChannel::ops)
      .def("apply", [](const KrausChannel& ch, const ComplexMatrix& x) { return ch.apply_matrix(x); })
      .def("choi", [](const KrausChannel& ch) { return choi_matrix(ch); })
      .def("trace_preservation_defect", &KrausChannel::trace_preservation_defect)
      .def("then", [](const KrausChannel& first, const KrausChannel& second) { return compose(second, first); },
           "Channel applying self first, then `second`.")
      .def_static("identity", &identity_channel, py::arg("dim"))
      .def_static("depolarizing", &depolarizing_channel, py::arg("dim"), py::arg("p"))
      .def_static("amplitude_damping", &amplitude_damping_channel, py::arg("gamma"))
      .def_static("phase_damping", &phase_damping_channel, py::arg("dim"), py::arg("lam"))
      .def_static("unitary", &unitary_channel, py::arg("u"))
      .def_static("cq", [](const std::vector<ComplexMatrix>& s) { return cq_channel(states(s)); }, py::arg("states"))
      .def_static("measure", [](const std::vector<ComplexMatrix>& e) { return measurement_channel(Povm(e)); },
                  py::arg("effects"))
      .def_static("classical", &classical_channel, py::arg("transition"))
      .def_static("constant", [](int in_dim, const ComplexMatrix& s) { return constant_channel(in_dim, state(s)); },
                  py::arg("in_dim"), py::arg("state"))
      .def_static("from_json", [](const std::string& text) { return io::channel_from_json(io::parse_document(text)); });

  m.def("tensor_product", &tensor_product);
  m.def("partial_trace", [](const ComplexMatrix& t, int a, int b, bool keep_first) {
    return partial_trace(t, a, b, keep_first ? Keep::First : Keep::Second);
  }, py::arg("theta"), py::arg("d_first"), py::arg("d_second"), py::arg("keep_first") = true);
  m.def("schatten_decomposition", [](const ComplexMatrix& rho) {
    const auto dec = canonical_schatten(state(rho));
    return py::make_tuple(dec.weights, ComplexMatrix(dec.basis()));
  }, "Canonical (weights, basis columns) of a density matrix.");

  m.def("von_neumann_entropy", [](const ComplexMatrix& rho) { return von_neumann_entropy(state(rho)).nats(); });
  m.def("relative_entropy", [](const ComplexMatrix& rho, const ComplexMatrix& sigma) {
    return umegaki_relative_entropy(state(rho), state(sigma)).nats();
  }, "Umegaki relative entropy in nats; float('inf') when the support condition fails.");

  m.def("mutual_entropy", [](const ComplexMatrix& rho, const KrausChannel& ch, const SearchBudget& budget) {
    const auto r = ohya_mutual_entropy(state(rho), ch, budget);
    py::dict d;
    d["value"] = r.value.nats();
    d["converged"] = r.converged;
    d["searched"] = r.searched;
    d["evals"] = r.evals;
    d["weights"] = r.decomposition.weights;
    d["basis"] = ComplexMatrix(r.decomposition.basis());
    return d;
  }, py::arg("rho"), py::arg("channel"), py::arg("budget") = SearchBudget{});
  m.def("mutual_entropy_forms", [](const ComplexMatrix& rho, const KrausChannel& ch) {
    const auto t = mutual_entropy_fixed(state(rho), ch, canonical_schatten(state(rho)));
    return py::make_tuple(t.compound_form.nats(), t.ensemble_form.nats());
  }, "(compound form, ensemble form) at the canonical decomposition.");
  m.def("pseudo_mutual_entropy", [](const ComplexMatrix& rho, const KrausChannel& ch, int n, const SearchBudget& b) {
    const auto r = pseudo_mutual_entropy(state(rho), ch, n, b);
    py::dict d;
    d["value"] = r.value.nats();
    d["converged"] = r.converged;
    d["weights"] = r.weights;
    d["components"] = matrices(r.components);
    return d;
  }, py::arg("rho"), py::arg("channel"), py::arg("n_components"), py::arg("budget") = SearchBudget{});
  m.def("classical_mutual_entropy", [](const std::vector<double>& lambda, const KrausChannel& ch) {
    return classical_mutual_entropy(ProbabilityVector(lambda), ch).nats();
  });
  m.def("holevo_bound", [](const std::vector<double>& lambda, const std::vector<ComplexMatrix>& coded,
                           const KrausChannel& ch) {
    return holevo_bound(ProbabilityVector(lambda), states(coded), ch).nats();
  });

  m.def("cqc_mutual_entropy", [](const std::vector<double>& lambda, const std::vector<ComplexMatrix>& coding,
                                 const KrausChannel& ch, const std::vector<ComplexMatrix>& effects) {
    return cqc_mutual_entropy(cqc(lambda, coding, ch, effects)).nats();
  }, py::arg("lambda_"), py::arg("coding"), py::arg("channel"), py::arg("effects"));
  m.def("cqc_capacity", [](const std::vector<double>& lambda, const std::vector<ComplexMatrix>& coding,
                           const KrausChannel& ch, const std::vector<ComplexMatrix>& effects, const std::string& mode,
                           const SearchBudget& b) {
    const auto inst = cqc(lambda, coding, ch, effects);
    py::list out;
    if (mode == "chain") {
      for (const auto& r : cqc_capacity_chain(inst, b)) out.append(capacity_dict(r));
      return py::object(out);
    }
    return py::object(capacity_dict(cqc_capacity(inst, cqc_mode(mode), b)));
  }, py::arg("lambda_"), py::arg("coding"), py::arg("channel"), py::arg("effects"), py::arg("mode") = "chain",
     py::arg("budget") = SearchBudget{});
  m.def("quantum_capacity", [](const KrausChannel& ch, const SearchBudget& b, const std::string& kind, int rank) {
    CapacityOptions opt;
    opt.family = family(kind, rank);
    return capacity_dict(quantum_capacity(ch, b, opt));
  }, py::arg("channel"), py::arg("budget") = SearchBudget{}, py::arg("family") = "full", py::arg("rank") = 0);
  m.def("pseudo_capacity", [](const KrausChannel& ch, int n, const SearchBudget& b) {
    const auto c = quantum_capacity(ch, b);
    return capacity_dict(pseudo_capacity(ch, n, b, {}, &c));
  }, py::arg("channel"), py::arg("n_components") = 0, py::arg("budget") = SearchBudget{});

  m.def("classify_compound", [](const ComplexMatrix& theta, int g, int k) {
    const auto r = classify_compound(state(theta), g, k);
    py::dict d;
    d["class"] = to_string(r.cls);
    d["off_diag_norm"] = r.off_diag_norm;
    d["max_commutator"] = r.max_commutator;
    return d;
  }, py::arg("theta"), py::arg("d_g"), py::arg("d_k"));
  m.def("standard_entanglement", [](const ComplexMatrix& sigma) {
    return ComplexMatrix(standard_entanglement(state(sigma)).compound.theta().matrix());
  });
  m.def("d_compound", [](const std::vector<double>& p, const std::vector<ComplexMatrix>& omegas) {
    return ComplexMatrix(d_compound(ProbabilityVector(p), states(omegas)).compound.theta().matrix());
  });
  m.def("entangled_mutual_entropy", [](const ComplexMatrix& theta, int g, int k) {
    return entangled_mutual_entropy(CompoundState(state(theta), g, k)).nats();
  });
  m.def("degree_of_disentanglement", [](const ComplexMatrix& theta, int g, int k) {
    const auto r = conditional_and_degree(CompoundState(state(theta), g, k));
    py::dict d;
    d["h_sigma"] = r.h_sigma;
    d["mutual"] = r.mutual;
    d["conditional"] = r.conditional;
    d["degree"] = r.degree;
    return d;
  });
  m.def("q_entropy", [](const ComplexMatrix& sigma, const SearchBudget& b) {
    const auto r = q_entropy_sup(state(sigma), b);
    return py::make_tuple(r.value.nats(), r.closed_form.nats());
  }, py::arg("sigma"), py::arg("budget") = SearchBudget{4, 600, 1234, 1e-10},
     "(searched value, closed form) of the q-entropy.");
  m.def("class_mutual_entropy", [](const ComplexMatrix& rho, const KrausChannel& ch, const std::string& cls,
                                   const SearchBudget& b, bool relaxed) {
    ClassMutualOptions opt;
    opt.relaxed = relaxed;
    return class_result_dict(class_mutual_entropy(state(rho), ch, entanglement_class_from(cls), b, opt));
  }, py::arg("rho"), py::arg("channel"), py::arg("cls"), py::arg("budget") = SearchBudget{},
     py::arg("relaxed") = false);

  m.def("verify", [](std::uint64_t seed, const std::vector<std::string>& suites) {
    py::list out;
    for (const auto& rep : verify::run_verify({seed, suites})) {
      py::dict d;
      d["name"] = rep.name;
      d["checked"] = rep.checked();
      d["failed"] = rep.failed();
      py::list checks;
      for (const auto& c : rep.checks) {
        checks.append(py::dict(py::arg("id") = c.id, py::arg("name") = c.name, py::arg("passed") = c.passed,
                               py::arg("checked") = c.checked, py::arg("max_error") = c.max_error));
      }
      d["checks"] = checks;
      out.append(d);
    }
    return out;
  }, py::arg("seed") = 20240917, py::arg("suites") = std::vector<std::string>{});

  m.def("run", [](const std::string& command, const std::string& config, std::optional<std::uint64_t> seed, bool bits,
                  bool csv) {
    cli::JobConfig job;
    job.command = command;
    job.seed = seed;
    job.bits = bits;
    job.csv = csv;
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run_text(job, config, "<python>", out, err);
    return py::make_tuple(code, out.str(), err.str());
  }, py::arg("command"), py::arg("config"), py::arg("seed") = py::none(), py::arg("bits") = false,
     py::arg("csv") = false, "Runs a CLI job on config text; returns (exit code, report, diagnostics).");
}
