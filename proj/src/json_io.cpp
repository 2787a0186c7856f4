#include "normsim/json_io.hpp"

#include <limits>

namespace normsim {

namespace {

using Kind = Factor::Kind;

[[noreturn]] void schema(const std::string& what) { throw CircuitParseError(what); }

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) schema(where + ": missing \"" + key + "\"");
  return j.at(key);
}

std::size_t index_from_json(const json& j, const std::string& where) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    schema(where + ": expected a register index");
  return j.get<std::size_t>();
}

std::vector<std::size_t> indices_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) schema(where + ": expected an array of register indices");
  std::vector<std::size_t> out;
  for (const auto& x : j) out.push_back(index_from_json(x, where));
  return out;
}

Kind kind_from_json(const json& j, const std::string& where) {
  if (!j.is_string()) schema(where + ": 'over' entries are \"Z\", \"T\" or \"ZN\"");
  auto s = j.get<std::string>();
  if (s == "Z") return Kind::Z;
  if (s == "T") return Kind::T;
  if (s == "ZN" || s == "Z_N") return Kind::Cyclic;
  schema(where + ": unknown basis kind '" + s + "'");
}

std::string kind_str(Kind k) { return k == Kind::Z ? "Z" : k == Kind::T ? "T" : "ZN"; }

ElementaryGroup group_from_json(const json& j, const std::string& where) {
  if (!j.is_string()) schema(where + ": expected a group string such as \"Z x Z4\"");
  try {
    return ElementaryGroup::parse(j.get<std::string>());
  } catch (const std::invalid_argument& e) {
    schema(where + ": " + e.what());
  }
}

std::optional<int> n_out_from_json(const json& g) {
  if (!g.contains("n_out")) return std::nullopt;
  if (!g["n_out"].is_number_integer() || g["n_out"].get<long long>() < 0) schema("n_out must be a nonnegative integer");
  return g["n_out"].get<int>();
}

}  // namespace

json to_json(const Integer& n) {
  if (n >= std::numeric_limits<std::int64_t>::min() && n <= std::numeric_limits<std::int64_t>::max())
    return n.convert_to<std::int64_t>();
  return to_string(n);
}

json to_json(const Rational& q) {
  if (is_integer(q)) return to_json(numerator(q));
  return to_string(q);
}

json to_json(const RatMatrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(to_json(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

json to_json(const RatVector& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
  return out;
}

json to_json(const IntMatrix& m) { return to_json(to_rational(m)); }
json to_json(const IntVector& v) { return to_json(RatVector(v.cast<Rational>())); }

Rational rational_from_json(const json& j) {
  if (j.is_number_integer()) return Rational(j.get<long long>());
  if (j.is_string()) {
    try {
      return parse_rational(j.get<std::string>());
    } catch (const std::exception&) {
      schema("bad rational literal '" + j.get<std::string>() + "'");
    }
  }
  schema("expected an integer or a \"p/q\" string, got " + j.dump());
}

RatMatrix matrix_from_json(const json& j) {
  if (!j.is_array()) schema("matrix must be an array of rows");
  const auto m = static_cast<Eigen::Index>(j.size());
  const Eigen::Index n = m == 0 ? 0 : static_cast<Eigen::Index>(j[0].is_array() ? j[0].size() : 0);
  RatMatrix out(m, n);
  for (Eigen::Index i = 0; i < m; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n) schema("matrix rows must have equal length");
    for (Eigen::Index k = 0; k < n; ++k) out(i, k) = rational_from_json(row[static_cast<std::size_t>(k)]);
  }
  return out;
}

RatVector vector_from_json(const json& j) {
  if (j.is_string()) {
    try {
      return parse_tuple(j.get<std::string>());
    } catch (const std::exception& e) {
      schema(std::string("bad tuple: ") + e.what());
    }
  }
  if (!j.is_array()) schema("vector must be an array or a tuple string");
  RatVector out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) out(static_cast<Eigen::Index>(i)) = rational_from_json(j[i]);
  return out;
}

json to_json(const BlackBoxGroup& B) {
  if (const auto* z = dynamic_cast<const ZNStarGroup*>(&B)) return json{{"type", "zn_star"}, {"N", z->modulus()}};
  if (const auto* e = dynamic_cast<const EllipticCurveGroup*>(&B))
    return json{{"type", "ec"}, {"p", e->prime()}, {"a", e->a()}, {"b", e->b()}};
  return json{{"type", "opaque"}, {"name", B.name()}};
}

BlackBoxPtr blackbox_from_json(const json& j) {
  const std::string where = "blackbox";
  auto type = field(j, "type", where);
  if (!type.is_string()) schema("blackbox type must be a string");
  auto num = [&](const char* key) {
    const auto& x = field(j, key, where);
    if (!x.is_number_unsigned() && !(x.is_number_integer() && x.get<long long>() >= 0))
      schema(std::string("blackbox ") + key + " must be a nonnegative integer");
    return x.get<std::uint64_t>();
  };
  try {
    if (type == "zn_star") return std::make_shared<ZNStarGroup>(num("N"));
    if (type == "ec") return std::make_shared<EllipticCurveGroup>(num("p"), num("a"), num("b"));
  } catch (const std::invalid_argument& e) {
    schema(std::string("blackbox: ") + e.what());
  }
  schema("unknown blackbox type " + type.dump());
}

json to_json(const DecompositionTable& T) {
  return json{{"type", T.type_string()}, {"alpha", T.alpha}, {"beta", T.beta},
              {"A", to_json(T.A)},       {"B", to_json(T.B)},  {"c", to_json(T.c)}};
}

json to_json(const Gate& g) {
  if (const auto* q = std::get_if<QFTGate>(&g)) {
    if (q->over.empty()) return json{{"qft", q->registers}};
    json over = json::array();
    for (auto k : q->over) over.push_back(kind_str(k));
    return json{{"qft", {{"registers", q->registers}, {"over", over}}}};
  }
  if (const auto* a = std::get_if<AutomorphismGate>(&g)) return json{{"automorphism", {{"matrix", to_json(a->rep.A)}}}};
  if (const auto* q = std::get_if<QuadraticGate>(&g))
    return json{{"quadratic", {{"M", to_json(q->form.M)}, {"v", to_json(q->form.v)}}}};
  if (const auto* m = std::get_if<ModExpGate>(&g)) {
    json body{{"name", "modexp"}, {"bases", m->bases}, {"controls", m->controls}};
    if (m->n_out) body["n_out"] = *m->n_out;
    return json{{"bb_automorphism", body}};
  }
  throw std::invalid_argument("gate '" + gate_kind(g) + "' is an oracle without a file representation");
}

json to_json(const CircuitRun& run) {
  const auto& c = run.circuit;
  json out;
  out["group"] = c.initial.labels.str();
  out["initial_basis"] = c.initial.labels.str();
  if (c.initial.has_slot()) out["blackbox"] = to_json(*c.initial.blackbox);
  out["input"] = to_json(run.input);
  if (c.initial.has_slot()) out["bb_input"] = run.bb_input;
  json gates = json::array();
  for (const auto& g : c.gates) gates.push_back(to_json(g));
  out["gates"] = gates;
  return out;
}

CircuitRun parse_circuit(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw CircuitParseError(std::string("JSON syntax error at byte ") + std::to_string(e.byte) + ": " + e.what());
  }
  return circuit_from_json(j);
}

CircuitRun circuit_from_json(const json& j) {
  if (!j.is_object()) schema("circuit file must be a JSON object");
  ElementaryGroup physical = group_from_json(field(j, "group", "circuit"), "group");
  ElementaryGroup labels = j.contains("initial_basis") ? group_from_json(j["initial_basis"], "initial_basis") : physical;
  if (labels.size() != physical.size()) schema("initial_basis and group have different register counts");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    bool same = labels[i] == physical[i] || (!labels[i].is_finite() && !physical[i].is_finite());
    if (!same) schema("initial_basis differs from group beyond Z <-> T flips at register " + std::to_string(i));
  }

  CircuitRun run;
  run.circuit.initial.labels = labels;
  if (j.contains("blackbox")) run.circuit.initial.blackbox = blackbox_from_json(j["blackbox"]);

  if (j.contains("input")) {
    run.input = vector_from_json(j["input"]);
    if (run.input.size() != static_cast<Eigen::Index>(labels.size())) schema("input has the wrong length");
    try {
      run.input = reduce(run.input, labels).coords;
    } catch (const std::invalid_argument& e) {
      schema(std::string("input: ") + e.what());
    }
  } else {
    run.input = identity(labels).coords;
  }
  if (run.circuit.initial.has_slot()) {
    const auto& B = *run.circuit.initial.blackbox;
    if (j.contains("bb_input")) {
      if (!j["bb_input"].is_string()) schema("bb_input must be a string encoding");
      run.bb_input = j["bb_input"].get<std::string>();
      if (!B.is_element(run.bb_input)) schema("bb_input '" + run.bb_input + "' is not in " + B.name());
    } else {
      run.bb_input = B.identity();
    }
  }

  const json& gates = field(j, "gates", "circuit");
  if (!gates.is_array()) schema("gates must be an array");
  DesignatedBasis basis = run.circuit.initial;
  for (std::size_t t = 0; t < gates.size(); ++t) {
    const json& g = gates[t];
    const std::string where = "gate " + std::to_string(t);
    if (!g.is_object() || g.size() != 1) schema(where + ": expected an object with exactly one gate key");
    const std::string key = g.begin().key();
    const json& body = g.begin().value();
    Gate gate;
    try {
      if (key == "qft") {
        QFTGate q;
        if (body.is_array()) {
          q.registers = indices_from_json(body, where);
        } else {
          q.registers = indices_from_json(field(body, "registers", where), where);
          if (body.contains("over"))
            for (const auto& k : body["over"]) q.over.push_back(kind_from_json(k, where));
        }
        gate = q;
      } else if (key == "automorphism") {
        gate = AutomorphismGate{validate_matrix_rep(matrix_from_json(field(body, "matrix", where)), basis.labels)};
      } else if (key == "quadratic") {
        RatMatrix M = matrix_from_json(field(body, "M", where));
        RatVector v = body.contains("v") ? vector_from_json(body["v"])
                                         : RatVector(RatVector::Zero(static_cast<Eigen::Index>(basis.labels.size())));
        gate = QuadraticGate{validate_quadratic(M, v, basis.labels)};
      } else if (key == "bb_automorphism") {
        const auto& name = field(body, "name", where);
        if (name != "modexp") schema(where + ": unknown black-box automorphism " + name.dump());
        ModExpGate m;
        if (body.contains("bases")) {
          for (const auto& b : body["bases"]) {
            if (!b.is_string()) schema(where + ": bases are string encodings");
            m.bases.push_back(b.get<std::string>());
          }
        } else {
          const auto& b = field(body, "base", where);
          if (!b.is_string()) schema(where + ": base is a string encoding");
          m.bases.push_back(b.get<std::string>());
        }
        if (body.contains("controls")) {
          m.controls = indices_from_json(body["controls"], where);
        } else {
          for (std::size_t k = 0; k < m.bases.size(); ++k) m.controls.push_back(k);
        }
        m.n_out = n_out_from_json(body);
        gate = m;
      } else {
        schema(where + ": unknown gate '" + key + "'");
      }
    } catch (const InvalidNormalForm& e) {
      throw CircuitError(t, e.what());
    }
    if (const auto* q = std::get_if<QFTGate>(&gate)) {
      try {
        basis = apply_qft_basis_update(basis, *q);
      } catch (const std::invalid_argument& e) {
        throw CircuitError(t, e.what());
      }
    }
    run.circuit.gates.push_back(std::move(gate));
  }
  validate_circuit(run.circuit);
  return run;
}

}  // namespace normsim
