#pragma once

#include <atomic>
#include <cstdlib>
#include <thread>

#include "walkindex/io.hpp"

namespace walkindex::cli {

using io::Json;

enum ExitCode : int { kOk = 0, kParseError = 1, kInadmissible = 2, kGapless = 3, kFailure = 4 };

struct Result {
  int code = kOk;
  Json json;             // structured report
  std::string csv;       // set by commands with tabular output
  std::vector<std::string> warnings;
};

inline Json index_value_json(const IndexValue& v) { return Json{{"group", std::string(to_string(v.group()))}, {"value", v.value()}}; }

inline IndexValue negate(const IndexValue& v) { return -v; }

// ---- validate ---------------------------------------------------------------

inline Result cmd_validate(const io::WalkDocument& doc) {
  const Symbol& w = doc.walk.symbol;
  Result r;
  Json& j = r.json;
  j["dim"] = w.dim();
  j["exact"] = w.is_exact();
  if (w.is_exact()) {
    j["lo"] = w.walk().lo();
    j["hi"] = w.walk().hi();
  }
  const bool unitary = !w.is_exact() || is_unitary(w.walk(), doc.options.tol);
  j["unitary"] = unitary;
  bool rep_ok = true, admissible = true;
  if (doc.rep) {
    j["symmetry"] = std::string(to_string(doc.rep->stype));
    rep_ok = check_rep(*doc.rep);
    j["rep_valid"] = rep_ok;
    admissible = rep_ok && unitary && is_admissible(w, *doc.rep, doc.options.tol);
  } else {
    j["symmetry"] = nullptr;
  }
  j["admissible"] = admissible;
  const double gap = unitary ? gap_min(w, doc.options.n_samples) : 0.0;
  j["gap"] = gap;
  const bool gapped = gap > doc.options.gap_threshold;
  j["gapped"] = gapped;
  j["valid"] = unitary && admissible && gapped;
  if (!unitary || !admissible) r.code = kInadmissible;
  else if (!gapped) r.code = kGapless;
  return r;
}

// ---- index ------------------------------------------------------------------

inline Result cmd_index(const io::WalkDocument& doc) {
  const Symbol& w = doc.walk.symbol;
  const Options& opt = doc.options;
  Result r;
  Json& j = r.json;
  const bool unitary = !w.is_exact() || is_unitary(w.walk(), opt.tol);
  bool admissible = unitary;
  if (doc.rep) admissible = admissible && check_rep(*doc.rep) && is_admissible(w, *doc.rep, opt.tol);
  j["admissible"] = admissible;
  if (doc.rep) j["symmetry"] = std::string(to_string(doc.rep->stype));
  if (!admissible) {
    r.code = kInadmissible;
    return r;
  }
  const double gap = gap_min(w, opt.n_samples);
  j["gap"] = gap;
  j["ind"] = index_ind(w, opt.n_samples);
  if (!doc.rep) return r;
  if (gap <= opt.gap_threshold) {
    r.code = kGapless;
    return r;
  }
  const IndexValue six = index(w, *doc.rep, opt);
  j["six_r"] = index_value_json(six);
  j["six_l"] = index_value_json(negate(six));
  Json extras = Json::object();
  switch (doc.rep->stype) {
    case SymmetryType::D: {
      const auto d = index_D_report(w, *doc.rep);
      extras["flip_s0_pi"] = d.flip_sign;
      extras["pfaffian_ratio"] = d.pfaffian_ratio;
      break;
    }
    case SymmetryType::BDI: {
      const auto c = index_chiral_report(w, *doc.rep, opt);
      extras["sign_c0"] = *c.sign_c0;
      extras["sign_cpi"] = *c.sign_cpi;
      extras["winding"] = c.winding;
      break;
    }
    case SymmetryType::AIII:
    case SymmetryType::CII: extras["winding"] = index_chiral_report(w, *doc.rep, opt).winding; break;
    case SymmetryType::DIII: {
      const auto d = index_DIII_report(w, *doc.rep, opt);
      extras["winding"] = d.winding;
      if (d.berry_value) extras["berry_value"] = d.berry_value->value();
      break;
    }
  }
  j["extras"] = extras;
  return r;
}

// ---- bands ------------------------------------------------------------------

inline Result cmd_bands(const io::WalkDocument& doc, int n_samples) {
  const Symbol& w = doc.walk.symbol;
  Result r;
  Json ks = Json::array(), phases = Json::array();
  std::ostringstream csv;
  csv << "k";
  for (Eigen::Index b = 0; b < w.dim(); ++b) csv << ",phase_" << b;
  csv << '\n';
  for (double k : w.grid(n_samples)) {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(w.at(k), false);
    std::vector<double> ph;
    for (Eigen::Index b = 0; b < es.eigenvalues().size(); ++b) ph.push_back(std::arg(es.eigenvalues()(b)));
    std::sort(ph.begin(), ph.end());
    ks.push_back(k);
    phases.push_back(ph);
    csv << io::format_number(k);
    for (double p : ph) csv << ',' << io::format_number(p);
    csv << '\n';
  }
  r.json = Json{{"ks", ks}, {"phases", phases}};
  r.csv = csv.str();
  return r;
}

// ---- phase diagram ----------------------------------------------------------

inline constexpr double kGaplessThreshold = 1e-3;
inline constexpr double kOracleModeTol = 1e-4;

struct PhasePoint {
  double theta1 = 0, theta2 = 0, gap = 0;
  std::optional<long long> six;
  std::optional<long long> oracle;
  bool oracle_failed = false;
  std::string error;
};

inline int thread_count() {
  if (const char* env = std::getenv("WALKINDEX_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v >= 1) return static_cast<int>(std::min(v, 256L));
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

/// Cell-centred n×n sweep of the split-step walk over (−π, π)², rows ordered by (θ₁, θ₂).
inline std::vector<PhasePoint> phase_diagram(int n, int n_samples, std::optional<int> oracle_cells, int threads) {
  if (n < 8) throw DomainError("phase-diagram: grid must be at least 8x8");
  std::vector<PhasePoint> pts(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      auto& p = pts[static_cast<std::size_t>(i) * n + j];
      p.theta1 = -kPi + (i + 0.5) * 2.0 * kPi / n;
      p.theta2 = -kPi + (j + 0.5) * 2.0 * kPi / n;
    }
  std::atomic<std::size_t> next{0};
  const auto work = [&]() {
    for (std::size_t idx = next++; idx < pts.size(); idx = next++) {
      auto& p = pts[idx];
      try {
        const Model m = split_step({p.theta1, p.theta2});
        p.gap = gap_min(m.walk, n_samples);
        if (p.gap < kGaplessThreshold) continue;
        Options opt;
        opt.n_samples = n_samples;
        p.six = index_chiral(Symbol(m.walk), m.rep, opt).value();
        if (oracle_cells) {
          try {
            const auto f = split_step_decoupled({p.theta1, p.theta2}, -kI * pauli::y(), *oracle_cells);
            p.oracle = six_oracle(f, m.rep, kOracleModeTol).value();
          } catch (const AmbiguityError&) {
            p.oracle_failed = true;
          }
        }
      } catch (const std::exception& e) {
        p.error = e.what();
      }
    }
  };
  std::vector<std::thread> pool;
  const int t = std::max(1, std::min(threads, static_cast<int>(pts.size())));
  for (int i = 1; i < t; ++i) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  for (const auto& p : pts)
    if (!p.error.empty())
      throw ConsistencyError("phase-diagram: point (" + std::to_string(p.theta1) + ", " + std::to_string(p.theta2) +
                             ") failed: " + p.error);
  return pts;
}

inline Result cmd_phase_diagram(int n, int n_samples, std::optional<int> oracle_cells, int threads = thread_count()) {
  const auto pts = phase_diagram(n, n_samples, oracle_cells, threads);
  Result r;
  std::ostringstream csv;
  csv << "theta1,theta2,gap,six_r" << (oracle_cells ? ",oracle_six_r" : "") << '\n';
  long long gapless = 0, mismatches = 0, oracle_failures = 0;
  for (const auto& p : pts) {
    csv << io::format_number(p.theta1) << ',' << io::format_number(p.theta2) << ',' << io::format_number(p.gap) << ',';
    csv << (p.six ? std::to_string(*p.six) : std::string("gapless"));
    if (oracle_cells) {
      csv << ',';
      if (p.oracle) csv << *p.oracle;
      else csv << (p.six ? "ambiguous" : "gapless");
    }
    csv << '\n';
    if (!p.six) ++gapless;
    if (p.oracle_failed) ++oracle_failures;
    if (p.six && p.oracle && *p.six != *p.oracle) ++mismatches;
  }
  r.csv = csv.str();
  r.json = Json{{"grid", n}, {"points", pts.size()}, {"gapless", gapless}};
  if (oracle_cells) {
    r.json["oracle_cells"] = *oracle_cells;
    r.json["oracle_mismatches"] = mismatches;
    r.json["oracle_ambiguous"] = oracle_failures;
    if (oracle_failures > 0) r.warnings.push_back(std::to_string(oracle_failures) + " oracle points had ambiguous boundary modes");
  }
  return r;
}

// ---- boundary ---------------------------------------------------------------

/// Decoupling coins for the split-step walk; "generic" uses the polar decoupler.
inline std::optional<ComplexMatrix> decoupler_coin(const std::string& name) {
  if (name == "-isigma2") return ComplexMatrix(-kI * pauli::y());
  if (name == "isigma2") return ComplexMatrix(kI * pauli::y());
  if (name == "sigma1") return pauli::x();
  if (name == "-sigma1") return ComplexMatrix(-pauli::x());
  if (name == "generic") return std::nullopt;
  throw io::ParseError("boundary: unknown decoupler \"" + name + "\" (expected -isigma2, isigma2, sigma1, -sigma1, generic)");
}

inline constexpr int kReliableCells = 32;

inline Result cmd_boundary(const io::WalkDocument& doc, const std::string& decoupler, int n_cells, double mode_tol) {
  Result r;
  if (!doc.rep) throw io::ParseError("boundary: document has no symmetry");
  if (!doc.walk.symbol.is_exact()) throw io::ParseError("boundary: needs an explicit walk, not samples");
  const LaurentMatrix& w = doc.walk.symbol.walk();
  if (!is_unitary(w, doc.options.tol) || !check_rep(*doc.rep) || !is_admissible(w, *doc.rep, doc.options.tol)) {
    r.code = kInadmissible;
    r.json = Json{{"admissible", false}};
    return r;
  }
  const auto coin = decoupler_coin(decoupler);
  FiniteWalk f;
  if (coin) {
    const Json& src = doc.walk.source;
    if (!src.contains("model") || src["model"] != "split_step")
      throw io::ParseError("boundary: decoupler \"" + decoupler + "\" applies to the split_step model only");
    f = split_step_decoupled({src["theta1"].get<double>(), src["theta2"].get<double>()}, *coin, n_cells);
  } else {
    f = build_finite(w, n_cells);
  }
  if (n_cells < kReliableCells)
    r.warnings.push_back("n_cells = " + std::to_string(n_cells) + " < " + std::to_string(kReliableCells) +
                         ": boundary modes may hybridize and localization may be ambiguous");

  Json summary{{"n_cells", n_cells}, {"decoupler", decoupler}, {"mode_tol", mode_tol}};
  Json predicted = Json::object();
  for (int s : {1, -1}) {
    try {
      const auto modes = decay_roots(w, s);
      predicted[s > 0 ? "+1" : "-1"] = modes.empty() ? Json(nullptr) : Json(predict_decay(w, s));
    } catch (const GapError&) {
      predicted[s > 0 ? "+1" : "-1"] = nullptr;
    }
  }
  summary["predicted_lambda"] = predicted;

  std::vector<BoundaryMode> modes;
  try {
    modes = boundary_modes(f, *doc.rep, mode_tol);
    summary["six_oracle"] = index_value_json(six_oracle(f, *doc.rep, mode_tol));
  } catch (const AmbiguityError& e) {
    r.warnings.push_back(std::string("localization ambiguity: ") + e.what());
    summary["six_oracle"] = nullptr;
    modes.clear();
  }

  std::ostringstream csv;
  csv << "s,chirality,side,fitted_lambda,predicted_lambda,residual\n";
  Json rows = Json::array();
  for (const auto& m : modes) {
    const Json& pl = predicted[m.s > 0 ? "+1" : "-1"];
    csv << m.s << ',' << io::format_number(m.chirality) << ',' << to_string(m.side) << ','
        << io::format_number(m.fitted_lambda) << ',' << (pl.is_null() ? std::string("") : io::format_number(pl.get<double>()))
        << ',' << io::format_number(m.residual) << '\n';
    rows.push_back(Json{{"s", m.s},
                        {"chirality", m.chirality},
                        {"side", std::string(to_string(m.side))},
                        {"fitted_lambda", m.fitted_lambda},
                        {"predicted_lambda", pl},
                        {"residual", m.residual}});
  }
  summary["modes"] = rows;
  summary["warnings"] = r.warnings;
  r.json = summary;
  r.csv = csv.str();
  return r;
}

// ---- regroup / flatten ------------------------------------------------------

inline Result cmd_regroup(const io::WalkDocument& doc) {
  if (!doc.walk.symbol.is_exact()) throw io::ParseError("regroup: needs an explicit walk, not samples");
  std::optional<SymmetryRep> rep;
  if (doc.rep) rep = regroup(*doc.rep);
  Result r;
  r.json = io::to_json(io::make_document(regroup(doc.walk.symbol.walk()), rep, doc.options));
  return r;
}

inline Result cmd_flatten(const io::WalkDocument& doc, int n_samples) {
  Result r;
  try {
    r.json = io::to_json(io::make_document(flatten(doc.walk.symbol, n_samples), doc.rep, doc.options));
  } catch (const GapError&) {
    r.code = kGapless;
    r.json = Json{{"gapped", false}};
  }
  return r;
}

/// Maps library exceptions to exit codes.
inline int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const io::ParseError*>(&e)) return kParseError;
  if (dynamic_cast<const GapError*>(&e)) return kGapless;
  if (dynamic_cast<const SymmetryError*>(&e) || dynamic_cast<const NotUnitaryError*>(&e)) return kInadmissible;
  return kFailure;
}

}  // namespace walkindex::cli
