#pragma once

// JSON encodings of the library's values.

#include <string>
#include <vector>

#include <json.hpp>

#include "qmi/capacity.hpp"
#include "qmi/channels.hpp"
#include "qmi/entanglement.hpp"
#include "qmi/entropy.hpp"
#include "qmi/optimize.hpp"

namespace qmi::io {

using Json = nlohmann::json;

/// Malformed or semantically invalid input document. Carries a 1-based position when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, int line = 0, int column = 0);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// Parses text, translating byte offsets of syntax errors into line and column.
Json parse_document(const std::string& text, const std::string& source_name = "<input>");

ComplexMatrix matrix_from_json(const Json& j, const std::string& where = "matrix");
Json matrix_to_json(const ComplexMatrix& m);
ComplexVector vector_from_json(const Json& j, const std::string& where = "vector");

/// A matrix object, {"diagonal":[...]}, {"pure":[[re,im],...]} or {"maximally_mixed":d}.
DensityOperator state_from_json(const Json& j, const std::string& where = "state");
std::vector<DensityOperator> states_from_json(const Json& j, const std::string& where = "states");
ProbabilityVector probabilities_from_json(const Json& j, const std::string& where = "probabilities");

/// {"kind": "kraus" | "stinespring" | "identity" | "depolarizing" | "amplitude_damping" | "phase_damping" |
///  "unitary" | "cq" | "measure" | "classical" | "constant", ...}
KrausChannel channel_from_json(const Json& j, const std::string& where = "channel");
/// A list of effect matrices, or {"kind":"computational","dim":d}, or {"kind":"projective","basis":matrix}.
Povm povm_from_json(const Json& j, const std::string& where = "decoding");

SearchBudget budget_from_json(const Json& j, const SearchBudget& defaults = {});
Json budget_to_json(const SearchBudget& b);
StateFamily family_from_json(const Json& j);

/// {"d_G":g,"d_K":k,"theta":matrix}.
struct CompoundInput {
  DensityOperator theta;
  int d_g;
  int d_k;
};
CompoundInput compound_from_json(const Json& j, const std::string& where = "compound");

/// Number, or the string "inf". Values are in nats unless `bits` is set.
Json entropy_to_json(const EntropyValue& v, bool bits = false);
Json real_to_json(double nats, bool bits = false);

Json capacity_report_to_json(const CapacityReport& r, bool bits = false);
Json classification_to_json(const ClassificationReport& r);

}  // namespace qmi::io
