#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qcap/ensembles.hpp"
#include "qcap/gaussian.hpp"

namespace qcap::io {

using json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

/// Malformed or schema-violating input; the message carries file, line and
/// JSON pointer.
class SchemaError : public ValidationError {
 public:
  using ValidationError::ValidationError;
};

/// Parsed JSON text with the line on which every value starts.
class Source {
 public:
  Source(std::string text, std::string name);
  static Source from_file(const std::string& path);

  const json& root() const { return root_; }
  const std::string& name() const { return name_; }
  /// Line of the value at `pointer`, or of its nearest recorded ancestor.
  int line_of(const std::string& pointer) const;
  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const;

 private:
  std::string name_;
  json root_;
  std::map<std::string, int> lines_;
};

/// A value inside a Source together with its JSON pointer.
class Node {
 public:
  Node(const Source& src, const json& value, std::string pointer)
      : src_(&src), value_(&value), pointer_(std::move(pointer)) {}
  explicit Node(const Source& src) : Node(src, src.root(), "") {}

  const json& value() const { return *value_; }
  const std::string& pointer() const { return pointer_; }
  bool has(const std::string& key) const;
  Node at(const std::string& key) const;
  std::optional<Node> find(const std::string& key) const;
  Node at(std::size_t index) const;
  std::size_t size() const;  // array length; fails on non-arrays
  double number() const;
  int integer() const;
  bool boolean() const;
  std::string string() const;
  [[noreturn]] void fail(const std::string& message) const { src_->fail(pointer_, message); }

 private:
  const Source* src_;
  const json* value_;
  std::string pointer_;
};

/// Rows of entries, each a real number or an [re, im] pair.
Matrix parse_matrix(const Node& node);
Vector parse_vector(const Node& node);
RealMatrix parse_real_matrix(const Node& node);
RealVector parse_real_vector(const Node& node);

/// Requires {"schema": 1} at the root.
void check_schema(const Source& src);

KrausChannel parse_channel(const Source& src, const Tolerances& tol = {});
Ensemble parse_ensemble(const Source& src, const Tolerances& tol = {});
Hamiltonian parse_hamiltonian(const Source& src, const Tolerances& tol = {});
DensityMatrix parse_state(const Source& src, const Tolerances& tol = {});
GaussianChannelSpec parse_gaussian(const Source& src, const Tolerances& tol = {});
/// Optional "degradable" flag of a Gaussian spec file.
bool gaussian_degradable_flag(const Source& src);

/// `identity[:d]`, `dephasing[:d]`, `depolarizing[:d]`, `cq`, `random:dA:dB:k`
/// or a path to a channel file.
KrausChannel channel_from_argument(const std::string& arg, std::uint64_t seed,
                                   const Tolerances& tol = {});
bool is_preset(const std::string& arg);

/// The orthogonal-support c-q fixture: qubit in, qutrit out,
/// σ₀ = |0⟩⟨0|, σ₁ = (|1⟩⟨1| + |2⟩⟨2|)/2.
KrausChannel orthogonal_cq_fixture();

json to_json(const Matrix& m);
json to_json(const Vector& v);
json to_json(const RealMatrix& m);
json to_json(const KrausChannel& phi);
json to_json(const Ensemble& mu);
json to_json(const Tolerances& tol);

}  // namespace qcap::io
