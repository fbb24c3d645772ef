#include "qcap/io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "qcap/random.hpp"

namespace qcap::io {

namespace {

std::string escape_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

/// Records the starting line of every value in syntactically valid JSON.
class LineScanner {
 public:
  LineScanner(const std::string& text, std::map<std::string, int>& lines)
      : s_(text), lines_(lines) {}

  void run() { value(""); }

 private:
  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) {
      if (s_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string read_string() {
    std::string out;
    ++pos_;
    while (pos_ < s_.size() && s_[pos_] != '"') {
      if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) {
        const char e = s_[pos_ + 1];
        out += e == 'n' ? '\n' : e == 't' ? '\t' : e;
        pos_ += 2;
        continue;
      }
      out += s_[pos_++];
    }
    ++pos_;
    return out;
  }

  void value(const std::string& ptr) {
    skip_ws();
    if (pos_ >= s_.size()) return;
    lines_.emplace(ptr, line_);
    const char c = s_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      if (s_[pos_] == '}') {
        ++pos_;
        return;
      }
      while (pos_ < s_.size()) {
        skip_ws();
        const std::string key = read_string();
        skip_ws();
        ++pos_;  // ':'
        value(ptr + "/" + escape_token(key));
        skip_ws();
        if (s_[pos_++] == '}') return;
      }
    } else if (c == '[') {
      ++pos_;
      skip_ws();
      if (s_[pos_] == ']') {
        ++pos_;
        return;
      }
      for (std::size_t i = 0; pos_ < s_.size(); ++i) {
        value(ptr + "/" + std::to_string(i));
        skip_ws();
        if (s_[pos_++] == ']') return;
      }
    } else if (c == '"') {
      read_string();
    } else {
      while (pos_ < s_.size() && s_[pos_] != ',' && s_[pos_] != '}' && s_[pos_] != ']' &&
             !std::isspace(static_cast<unsigned char>(s_[pos_])))
        ++pos_;
    }
  }

  const std::string& s_;
  std::map<std::string, int>& lines_;
  std::size_t pos_ = 0;
  int line_ = 1;
};

int line_at_offset(const std::string& text, std::size_t offset) {
  int line = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i)
    if (text[i] == '\n') ++line;
  return line;
}

Complex parse_entry(const Node& n) {
  const json& v = n.value();
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  n.fail("expected a number or an [re, im] pair");
}

}  // namespace

Source::Source(std::string text, std::string name) : name_(std::move(name)) {
  try {
    root_ = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError(name_ + ":" + std::to_string(line_at_offset(text, e.byte)) +
                      ": invalid JSON: " + e.what());
  }
  LineScanner(text, lines_).run();
}

Source Source::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return Source(buf.str(), path);
}

int Source::line_of(const std::string& pointer) const {
  std::string p = pointer;
  while (true) {
    auto it = lines_.find(p);
    if (it != lines_.end()) return it->second;
    if (p.empty()) return 1;
    p.erase(p.rfind('/'));
  }
}

void Source::fail(const std::string& pointer, const std::string& message) const {
  throw SchemaError(name_ + ":" + std::to_string(line_of(pointer)) + ": " +
                    (pointer.empty() ? "/" : pointer) + ": " + message);
}

bool Node::has(const std::string& key) const { return value().is_object() && value().contains(key); }

Node Node::at(const std::string& key) const {
  if (!value().is_object()) fail("expected an object");
  if (!value().contains(key)) fail("missing required field \"" + key + "\"");
  return Node(*src_, value().at(key), pointer_ + "/" + escape_token(key));
}

std::optional<Node> Node::find(const std::string& key) const {
  if (!has(key)) return std::nullopt;
  return at(key);
}

Node Node::at(std::size_t index) const {
  if (!value().is_array()) fail("expected an array");
  if (index >= value().size()) fail("index " + std::to_string(index) + " out of range");
  return Node(*src_, value()[index], pointer_ + "/" + std::to_string(index));
}

std::size_t Node::size() const {
  if (!value().is_array()) fail("expected an array");
  return value().size();
}

double Node::number() const {
  if (!value().is_number()) fail("expected a number");
  return value().get<double>();
}

int Node::integer() const {
  if (!value().is_number_integer()) fail("expected an integer");
  return value().get<int>();
}

bool Node::boolean() const {
  if (!value().is_boolean()) fail("expected true or false");
  return value().get<bool>();
}

std::string Node::string() const {
  if (!value().is_string()) fail("expected a string");
  return value().get<std::string>();
}

Matrix parse_matrix(const Node& node) {
  const std::size_t rows = node.size();
  if (rows == 0) node.fail("matrix must have at least one row");
  const std::size_t cols = node.at(0).size();
  if (cols == 0) node.fail("matrix rows must not be empty");
  Matrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const Node row = node.at(i);
    if (row.size() != cols)
      row.fail("row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = parse_entry(row.at(j));
  }
  return m;
}

Vector parse_vector(const Node& node) {
  const std::size_t n = node.size();
  if (n == 0) node.fail("vector must not be empty");
  Vector v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = parse_entry(node.at(i));
  return v;
}

RealMatrix parse_real_matrix(const Node& node) {
  const std::size_t rows = node.size();
  if (rows == 0) node.fail("matrix must have at least one row");
  const std::size_t cols = node.at(0).size();
  RealMatrix m(rows, cols);
  for (std::size_t i = 0; i < rows; ++i) {
    const Node row = node.at(i);
    if (row.size() != cols)
      row.fail("row has " + std::to_string(row.size()) + " entries, expected " + std::to_string(cols));
    for (std::size_t j = 0; j < cols; ++j) m(i, j) = row.at(j).number();
  }
  return m;
}

RealVector parse_real_vector(const Node& node) {
  RealVector v(node.size());
  for (std::size_t i = 0; i < node.size(); ++i) v[i] = node.at(i).number();
  return v;
}

void check_schema(const Source& src) {
  const Node root(src);
  const Node s = root.at("schema");
  if (s.integer() != kSchemaVersion)
    s.fail("unsupported schema version " + std::to_string(s.integer()) + ", expected " +
           std::to_string(kSchemaVersion));
}

namespace {

/// Re-throws library validation failures with the location of `node`.
template <typename F>
auto located(const Node& node, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const SchemaError&) {
    throw;
  } catch (const ValidationError& e) {
    node.fail(e.what());
  }
}

}  // namespace

KrausChannel parse_channel(const Source& src, const Tolerances& tol) {
  check_schema(src);
  const Node kraus = Node(src).at("kraus");
  std::vector<Matrix> ops;
  for (std::size_t i = 0; i < kraus.size(); ++i) ops.push_back(parse_matrix(kraus.at(i)));
  const Node root(src);
  const int dim_in = root.at("dim_in").integer();
  const int dim_out = root.at("dim_out").integer();
  for (std::size_t i = 0; i < ops.size(); ++i)
    if (ops[i].rows() != dim_out || ops[i].cols() != dim_in)
      kraus.at(i).fail("Kraus operator must be dim_out x dim_in (" + std::to_string(dim_out) + "x" +
                       std::to_string(dim_in) + ")");
  return located(kraus, [&] { return KrausChannel(std::move(ops), tol); });
}

Ensemble parse_ensemble(const Source& src, const Tolerances& tol) {
  check_schema(src);
  const Node members = Node(src).at("members");
  std::vector<Member> out;
  for (std::size_t i = 0; i < members.size(); ++i) {
    const Node m = members.at(i);
    const double w = m.at("weight").number();
    if (auto v = m.find("vector")) {
      const Vector psi = parse_vector(*v);
      if (psi.norm() < 1e-12) v->fail("state vector must be nonzero");
      out.push_back({w, DensityMatrix::from_pure(psi / psi.norm())});
    } else {
      const Node s = m.at("state");
      out.push_back({w, located(s, [&] { return DensityMatrix(parse_matrix(s), tol); })});
    }
  }
  return located(members, [&] { return Ensemble(std::move(out), tol); });
}

Hamiltonian parse_hamiltonian(const Source& src, const Tolerances& tol) {
  check_schema(src);
  const Node m = Node(src).at("matrix");
  return located(m, [&] { return Hamiltonian(parse_matrix(m), tol); });
}

DensityMatrix parse_state(const Source& src, const Tolerances& tol) {
  check_schema(src);
  const Node root(src);
  if (auto v = root.find("vector")) {
    const Vector psi = parse_vector(*v);
    if (std::abs(psi.norm() - 1.0) > 1e-9) v->fail("state vector must have unit norm");
    return DensityMatrix::from_pure(psi);
  }
  const Node m = root.at("matrix");
  return located(m, [&] { return DensityMatrix(parse_matrix(m), tol); });
}

GaussianChannelSpec parse_gaussian(const Source& src, const Tolerances& tol) {
  check_schema(src);
  const Node root(src);
  const int s_a = root.at("s_A").integer();
  const int s_b = root.at("s_B").integer();
  const RealMatrix k = parse_real_matrix(root.at("K"));
  const RealMatrix alpha = parse_real_matrix(root.at("alpha"));
  RealVector l;
  if (auto n = root.find("l")) l = parse_real_vector(*n);
  return located(root, [&] { return GaussianChannelSpec(s_a, s_b, k, alpha, l, tol); });
}

bool gaussian_degradable_flag(const Source& src) {
  const Node root(src);
  if (auto n = root.find("degradable")) return n->boolean();
  return false;
}

KrausChannel orthogonal_cq_fixture() {
  std::vector<DensityMatrix> sigmas;
  sigmas.push_back(DensityMatrix::diagonal({1.0, 0.0, 0.0}));
  sigmas.push_back(DensityMatrix::diagonal({0.0, 0.5, 0.5}));
  return cq_channel(sigmas);
}

bool is_preset(const std::string& arg) {
  const std::string head = arg.substr(0, arg.find(':'));
  return head == "identity" || head == "dephasing" || head == "depolarizing" || head == "cq" ||
         head == "random";
}

KrausChannel channel_from_argument(const std::string& arg, std::uint64_t seed, const Tolerances& tol) {
  if (!is_preset(arg)) return parse_channel(Source::from_file(arg), tol);
  std::vector<std::string> parts;
  std::stringstream ss(arg);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  auto dim = [&](std::size_t i, int fallback) {
    if (parts.size() <= i) return fallback;
    try {
      const int d = std::stoi(parts[i]);
      if (d < 1 || d > 64) throw ValidationError("");
      return d;
    } catch (const std::exception&) {
      throw ValidationError("bad dimension \"" + parts[i] + "\" in channel preset " + arg);
    }
  };
  const std::string& head = parts[0];
  if (head == "identity") return KrausChannel::identity(dim(1, 2));
  if (head == "dephasing") return KrausChannel::dephasing(dim(1, 2));
  if (head == "depolarizing") return KrausChannel::depolarizing(dim(1, 2));
  if (head == "cq") return orthogonal_cq_fixture();
  if (parts.size() != 4) throw ValidationError("random preset must be random:dA:dB:k");
  random::Rng rng(seed);
  return random::random_channel(dim(1, 2), dim(2, 2), dim(3, 1), rng);
}

json to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(row);
  }
  return rows;
}

json to_json(const Vector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back({v[i].real(), v[i].imag()});
  return out;
}

json to_json(const RealMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

json to_json(const KrausChannel& phi) {
  json ops = json::array();
  for (const Matrix& k : phi.kraus()) ops.push_back(to_json(k));
  return {{"schema", kSchemaVersion}, {"dim_in", phi.dim_in()}, {"dim_out", phi.dim_out()}, {"kraus", ops}};
}

json to_json(const Ensemble& mu) {
  json members = json::array();
  for (const Member& m : mu.members())
    members.push_back({{"weight", m.weight}, {"state", to_json(m.state.matrix())}});
  return {{"schema", kSchemaVersion}, {"members", members}};
}

json to_json(const Tolerances& tol) {
  json out = json::object();
  for (const auto& [k, v] : tol.as_map()) out[k] = v;
  return out;
}

}  // namespace qcap::io
