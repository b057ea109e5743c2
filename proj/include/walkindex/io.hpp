#pragma once

#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "walkindex/walkindex.hpp"

namespace walkindex::io {

using Json = nlohmann::json;

class ParseError : public Error {
 public:
  using Error::Error;
};

inline constexpr int kSchemaVersion = 1;

/// Number formatting with 17 significant digits; keys are emitted in sorted order.
inline std::string format_number(double v) {
  if (!std::isfinite(v)) return "null";
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace detail {

inline void write_string(std::ostream& os, const std::string& s) { os << Json(s).dump(); }

inline void write(std::ostream& os, const Json& j, int indent, int depth) {
  const auto newline = [&](int d) {
    if (indent < 0) return;
    os << '\n' << std::string(static_cast<std::size_t>(indent * d), ' ');
  };
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << '{';
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ',';
        first = false;
        newline(depth + 1);
        write_string(os, it.key());
        os << (indent < 0 ? ":" : ": ");
        write(os, it.value(), indent, depth + 1);
      }
      newline(depth);
      os << '}';
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      // Arrays of scalars stay on one line.
      const bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      os << '[';
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << (flat && indent >= 0 ? ", " : ",");
        if (!flat) newline(depth + 1);
        write(os, j[i], indent, depth + 1);
      }
      if (!flat) newline(depth);
      os << ']';
      return;
    }
    case Json::value_t::number_float: os << format_number(j.get<double>()); return;
    default: os << j.dump();
  }
}

}  // namespace detail

/// Byte-stable serialization (sorted keys, %.17g numbers). indent < 0 gives one line.
inline std::string dump(const Json& j, int indent = 2) {
  std::ostringstream os;
  detail::write(os, j, indent, 0);
  if (indent >= 0) os << '\n';
  return os.str();
}

inline Json parse_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
}

// ---- matrices -------------------------------------------------------------

inline Json matrix_to_json(const ComplexMatrix& m) {
  Json re = Json::array(), im = Json::array();
  bool has_im = false;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json rr = Json::array(), ir = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      rr.push_back(m(i, j).real());
      ir.push_back(m(i, j).imag());
      has_im = has_im || m(i, j).imag() != 0.0;
    }
    re.push_back(rr);
    im.push_back(ir);
  }
  Json out{{"re", re}};
  if (has_im) out["im"] = im;
  return out;
}

namespace detail {
inline RealMatrix real_rows(const Json& j, const char* what) {
  if (!j.is_array() || j.empty()) throw ParseError(std::string(what) + ": expected a non-empty array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  if (!j[0].is_array() || j[0].empty()) throw ParseError(std::string(what) + ": rows must be non-empty arrays");
  const auto cols = static_cast<Eigen::Index>(j[0].size());
  RealMatrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
      throw ParseError(std::string(what) + ": ragged matrix");
    for (Eigen::Index c = 0; c < cols; ++c) {
      const Json& v = row[static_cast<std::size_t>(c)];
      if (!v.is_number()) throw ParseError(std::string(what) + ": matrix entries must be numbers");
      m(r, c) = v.get<double>();
    }
  }
  return m;
}
}  // namespace detail

inline ComplexMatrix matrix_from_json(const Json& j, const char* what = "matrix") {
  if (!j.is_object() || !j.contains("re")) throw ParseError(std::string(what) + ": expected {\"re\": ..., \"im\": ...}");
  const RealMatrix re = detail::real_rows(j["re"], what);
  ComplexMatrix m = re.cast<Complex>();
  if (j.contains("im")) {
    const RealMatrix im = detail::real_rows(j["im"], what);
    if (im.rows() != re.rows() || im.cols() != re.cols()) throw ParseError(std::string(what) + ": re/im shape mismatch");
    m += kI * im.cast<Complex>();
  }
  return m;
}

// ---- walks ----------------------------------------------------------------

inline Json walk_to_json(const LaurentMatrix& w) {
  Json coeffs = Json::array();
  for (const auto& [x, blk] : w.coefficients()) {
    Json c = matrix_to_json(blk);
    c["x"] = x;
    coeffs.push_back(c);
  }
  return Json{{"dim", w.dim()}, {"coeffs", coeffs}};
}

inline Json samples_to_json(const SampledUnitary& s) {
  Json values = Json::array();
  for (const auto& v : s.values()) values.push_back(matrix_to_json(v));
  return Json{{"sampled", Json{{"ks", s.ks()}, {"values", values}}}};
}

namespace detail {

inline double number(const Json& j, const char* key, const char* what) {
  if (!j.contains(key) || !j[key].is_number())
    throw ParseError(std::string(what) + ": missing numeric field \"" + key + "\"");
  return j[key].get<double>();
}

inline int integer(const Json& j, const char* key, const char* what) {
  if (!j.contains(key) || !j[key].is_number_integer())
    throw ParseError(std::string(what) + ": missing integer field \"" + key + "\"");
  return j[key].get<int>();
}

}  // namespace detail

/// Walk given either explicitly or as a named model.
struct WalkSpec {
  Json source;                        // canonical form of the document's "walk" entry
  Symbol symbol;                      // materialized walk
  std::optional<SymmetryRep> native;  // representation a named model comes with
};

inline WalkSpec parse_walk(const Json& j) {
  if (!j.is_object()) throw ParseError("walk: expected an object");
  if (j.contains("model")) {
    if (!j["model"].is_string()) throw ParseError("walk: \"model\" must be a string");
    const std::string name = j["model"].get<std::string>();
    if (name == "split_step") {
      const SplitStepParams p{detail::number(j, "theta1", "split_step"), detail::number(j, "theta2", "split_step")};
      const Model m = split_step(p);
      return {Json{{"model", name}, {"theta1", p.theta1}, {"theta2", p.theta2}}, Symbol(m.walk), m.rep};
    }
    if (name == "shift") {
      const int d = detail::integer(j, "dim", "shift"), n = detail::integer(j, "n", "shift");
      if (d < 1) throw ParseError("shift: dim must be positive");
      return {Json{{"model", name}, {"dim", d}, {"n", n}}, Symbol(shift_walk(d, n)), std::nullopt};
    }
    if (name == "diii_generator") {
      const Model m = diii_generator();
      return {Json{{"model", name}}, Symbol(m.walk), m.rep};
    }
    if (name == "bridge") {
      const double t = detail::number(j, "t", "bridge");
      try {
        return {Json{{"model", name}, {"t", t}}, Symbol(trivial_walk(bridge_walk(t))), regroup(split_step_rep())};
      } catch (const DomainError& e) {
        throw ParseError(e.what());
      }
    }
    throw ParseError("walk: unknown model \"" + name + "\"");
  }
  if (j.contains("sampled")) {
    const Json& s = j["sampled"];
    if (!s.is_object() || !s.contains("ks") || !s.contains("values") || !s["ks"].is_array() || !s["values"].is_array())
      throw ParseError("sampled: expected {\"ks\": [...], \"values\": [...]}");
    std::vector<double> ks;
    for (const auto& k : s["ks"]) {
      if (!k.is_number()) throw ParseError("sampled: ks must be numbers");
      ks.push_back(k.get<double>());
    }
    std::vector<ComplexMatrix> values;
    for (const auto& v : s["values"]) values.push_back(matrix_from_json(v, "sampled value"));
    try {
      SampledUnitary su(std::move(ks), std::move(values));
      return {samples_to_json(su), Symbol(su), std::nullopt};
    } catch (const Error& e) {
      throw ParseError(std::string("sampled: ") + e.what());
    }
  }
  const int d = detail::integer(j, "dim", "walk");
  if (d < 1) throw ParseError("walk: dim must be positive");
  if (!j.contains("coeffs") || !j["coeffs"].is_array()) throw ParseError("walk: missing \"coeffs\" array");
  LaurentMatrix w(d);
  for (const auto& c : j["coeffs"]) {
    const int x = detail::integer(c, "x", "coefficient");
    const ComplexMatrix m = matrix_from_json(c, "coefficient");
    if (m.rows() != d || m.cols() != d) throw ParseError("coefficient: block is not dim × dim");
    w.add_to(x, m);
  }
  return {walk_to_json(w), Symbol(w), std::nullopt};
}

// ---- symmetry -------------------------------------------------------------

inline Json symop_to_json(const SymOp& op) {
  Json j = matrix_to_json(op.matrix);
  j["antiunitary"] = op.antiunitary;
  return j;
}

inline Json rep_to_json(const SymmetryRep& rep) {
  Json j{{"type", std::string(to_string(rep.stype))}};
  if (rep.eta) j["eta"] = symop_to_json(*rep.eta);
  if (rep.tau) j["tau"] = symop_to_json(*rep.tau);
  if (rep.gamma) j["gamma"] = symop_to_json(*rep.gamma);
  return j;
}

inline SymmetryRep parse_rep(const Json& j) {
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ParseError("symmetry: expected an object with a \"type\" string");
  SymmetryType t;
  try {
    t = parse_symmetry_type(j["type"].get<std::string>());
  } catch (const SymmetryError& e) {
    throw ParseError(e.what());
  }
  const auto op = [&](const char* key) -> std::optional<SymOp> {
    if (!j.contains(key)) return std::nullopt;
    const Json& o = j[key];
    const bool anti = o.contains("antiunitary") && o["antiunitary"].is_boolean()
                          ? o["antiunitary"].get<bool>()
                          : std::string(key) != "gamma";
    return SymOp{matrix_from_json(o, key), anti};
  };
  try {
    return make_rep(t, op("eta"), op("tau"), op("gamma"));
  } catch (const Error& e) {
    throw ParseError(std::string("symmetry: ") + e.what());
  }
}

// ---- documents ------------------------------------------------------------

struct WalkDocument {
  WalkSpec walk;
  std::optional<SymmetryRep> rep;
  Options options;
  bool symmetry_from_model = false;
};

inline Json options_to_json(const Options& o) {
  return Json{{"samples", o.n_samples}, {"tol", o.tol}, {"gap_threshold", o.gap_threshold}, {"closure_steps", o.closure_steps}};
}

inline Options parse_options(const Json& j) {
  if (!j.is_object()) throw ParseError("options: expected an object");
  Options o;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "samples") o.n_samples = detail::integer(j, "samples", "options");
    else if (k == "tol") o.tol = detail::number(j, "tol", "options");
    else if (k == "gap_threshold") o.gap_threshold = detail::number(j, "gap_threshold", "options");
    else if (k == "closure_steps") o.closure_steps = detail::integer(j, "closure_steps", "options");
    else throw ParseError("options: unknown key \"" + k + "\"");
  }
  if (o.n_samples < 16) throw ParseError("options: samples must be at least 16");
  if (!(o.tol > 0) || !(o.gap_threshold >= 0) || o.closure_steps < 1) throw ParseError("options: invalid tolerance");
  return o;
}

/// Accepts a full document, a bare walk object, or a bare named model.
/// A named model without a "symmetry" entry carries its own representation;
/// "symmetry": null removes it.
inline WalkDocument parse_document(const Json& j) {
  if (!j.is_object()) throw ParseError("document: expected a JSON object");
  if (!j.contains("walk")) {
    WalkSpec spec = parse_walk(j);
    auto rep = spec.native;
    return {std::move(spec), rep, Options{}, rep.has_value()};
  }
  if (!j.contains("schema") || !j["schema"].is_number_integer()) throw ParseError("document: missing \"schema\" version");
  if (j["schema"].get<int>() != kSchemaVersion)
    throw ParseError("document: unsupported schema version " + j["schema"].dump());
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "schema" && it.key() != "walk" && it.key() != "symmetry" && it.key() != "options")
      throw ParseError("document: unknown key \"" + it.key() + "\"");
  WalkSpec spec = parse_walk(j["walk"]);
  std::optional<SymmetryRep> rep;
  bool from_model = false;
  if (!j.contains("symmetry")) {
    rep = spec.native;
    from_model = rep.has_value();
  } else if (!j["symmetry"].is_null()) {
    rep = parse_rep(j["symmetry"]);
  }
  const Options opt = j.contains("options") ? parse_options(j["options"]) : Options{};
  if (rep && rep->dim() != spec.symbol.dim())
    throw ParseError("document: symmetry acts on dimension " + std::to_string(rep->dim()) + ", walk cells have " +
                     std::to_string(spec.symbol.dim()));
  return {std::move(spec), std::move(rep), opt, from_model};
}

inline WalkDocument parse_document(const std::string& text) { return parse_document(parse_text(text)); }

/// Canonical form: explicit schema, options and symmetry.
inline Json to_json(const WalkDocument& doc) {
  Json j{{"schema", kSchemaVersion}, {"walk", doc.walk.source}, {"options", options_to_json(doc.options)}};
  j["symmetry"] = doc.rep ? rep_to_json(*doc.rep) : Json(nullptr);
  return j;
}

inline WalkDocument make_document(const LaurentMatrix& w, std::optional<SymmetryRep> rep, Options opt = {}) {
  return {WalkSpec{walk_to_json(w), Symbol(w), std::nullopt}, std::move(rep), opt, false};
}

inline WalkDocument make_document(const SampledUnitary& s, std::optional<SymmetryRep> rep, Options opt = {}) {
  return {WalkSpec{samples_to_json(s), Symbol(s), std::nullopt}, std::move(rep), opt, false};
}

}  // namespace walkindex::io
