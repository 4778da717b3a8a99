#include "logmink/json_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "logmink/errors.hpp"

namespace logmink {

namespace {

using nlohmann::json;

void append_vec(std::string& s, const Vec& v) {
  s += '[';
  for (int i = 0; i < v.size(); ++i) {
    if (i) s += ',';
    s += format_double(v[i]);
  }
  s += ']';
}

// Subspace bases serialize as a list of columns.
void append_basis(std::string& s, const Mat& B) {
  s += '[';
  for (int j = 0; j < B.cols(); ++j) {
    if (j) s += ',';
    append_vec(s, B.col(j));
  }
  s += ']';
}

void append_decomposition(std::string& s, const DecompositionNode* node) {
  if (!node) {
    s += "null";
    return;
  }
  s += "{\"xi\":";
  append_basis(s, node->xi.basis());
  s += ",\"xi_prime\":";
  append_basis(s, node->xi_prime.basis());
  s += ",\"a\":";
  s += format_double(node->a);
  s += ",\"r\":";
  s += format_double(node->r);
  s += ",\"left\":";
  append_decomposition(s, node->left ? node->left->node.get() : nullptr);
  s += ",\"right\":";
  append_decomposition(s, node->right ? node->right->node.get() : nullptr);
  s += '}';
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Strict: return "Strict";
    case Verdict::Equality: return "Equality";
    default: return "Violated";
  }
}

const char* status_name(ConcentrationStatus s) {
  switch (s) {
    case ConcentrationStatus::StrictlySatisfied: return "StrictlySatisfied";
    case ConcentrationStatus::SatisfiedWithEquality:
      return "SatisfiedWithEquality";
    default: return "Violated";
  }
}

Vec vec_from(const json& j) {
  if (!j.is_array() || j.empty())
    throw ParseError("parse: expected a nonempty number array");
  Vec v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ParseError("parse: expected a number");
    v[i] = j[i].get<double>();
  }
  return v;
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("parse: ") + e.what());
  }
}

Polytope polytope_from(const json& j, const Tolerances& tol) {
  try {
    if (!j.is_object() || !j.contains("dim") || !j.contains("reps") ||
        !j.contains("support"))
      throw ParseError("parse: polytope needs dim, reps and support");
    const int dim = j.at("dim").get<int>();
    std::vector<Vec> reps;
    for (const json& r : j.at("reps")) reps.push_back(vec_from(r));
    Vec h = vec_from(j.at("support"));
    DirectionSet dirs = DirectionSet::normalized(dim, std::move(reps), tol);
    Polytope P = build_wulff_body(dirs, SupportVector(dirs, std::move(h)), tol);
    if (j.contains("volume")) {
      const double stored = j.at("volume").get<double>();
      if (std::abs(stored - P.volume()) > tol.volume_identity_rel * P.volume())
        throw ParseError("parse: stored volume disagrees with the rebuilt body");
    }
    return P;
  } catch (const json::exception& e) {
    throw ParseError(std::string("parse: ") + e.what());
  }
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string to_json(const DiscreteMeasure& mu) {
  std::string s = "{\"dim\":" + std::to_string(mu.dim()) + ",\"pairs\":[";
  for (int i = 0; i < mu.count(); ++i) {
    if (i) s += ',';
    s += "{\"u\":";
    append_vec(s, mu.support()[i].u);
    s += ",\"mass\":";
    s += format_double(mu.support()[i].mass);
    s += '}';
  }
  s += "]}";
  return s;
}

std::string to_json(const Polytope& P) {
  std::string s = "{\"dim\":" + std::to_string(P.dim()) + ",\"reps\":[";
  for (int i = 0; i < P.directions().count(); ++i) {
    if (i) s += ',';
    append_vec(s, P.directions().rep(i));
  }
  s += "],\"support\":[";
  for (int i = 0; i < P.directions().count(); ++i) {
    if (i) s += ',';
    s += format_double(P.facet(i, +1).offset);
  }
  s += "],\"vertices\":[";
  for (std::size_t k = 0; k < P.vertices().size(); ++k) {
    if (k) s += ',';
    append_vec(s, P.vertices()[k]);
  }
  s += "],\"volume\":";
  s += format_double(P.volume());
  s += '}';
  return s;
}

std::string to_json(const ConcentrationReport& report) {
  std::string s = "{\"status\":\"";
  s += status_name(report.status);
  s += "\",\"total_mass\":";
  s += format_double(report.total_mass);
  s += ",\"condition_satisfied\":";
  s += report.condition_satisfied ? "true" : "false";
  s += ",\"records\":[";
  for (std::size_t i = 0; i < report.records.size(); ++i) {
    const ConcentrationRecord& r = report.records[i];
    if (i) s += ',';
    s += "{\"dim\":" + std::to_string(r.xi.dim()) + ",\"basis\":";
    append_basis(s, r.xi.basis());
    s += ",\"mass\":";
    s += format_double(r.mass);
    s += ",\"bound\":";
    s += format_double(r.bound);
    s += ",\"verdict\":\"";
    s += verdict_name(r.verdict);
    s += "\"}";
  }
  s += "],\"equality_pairs\":[";
  for (std::size_t i = 0; i < report.equality_pairs.size(); ++i) {
    if (i) s += ',';
    s += "{\"xi\":";
    append_basis(s, report.equality_pairs[i].xi.basis());
    s += ",\"xi_prime\":";
    append_basis(s, report.equality_pairs[i].xi_prime.basis());
    s += '}';
  }
  s += "],\"unpaired_equalities\":[";
  for (std::size_t i = 0; i < report.unpaired_equalities.size(); ++i) {
    if (i) s += ',';
    append_basis(s, report.unpaired_equalities[i].basis());
  }
  s += "],\"witness\":";
  if (report.witness)
    append_basis(s, report.witness->basis());
  else
    s += "null";
  s += '}';
  return s;
}

std::string to_json(const SolveResult& result) {
  std::string s = "{\"status\":\"ok\",\"path\":\"";
  s += result.path == SolveResult::Path::Strict ? "Strict" : "Decomposed";
  s += "\",\"residual\":";
  s += format_double(result.residual);
  s += ",\"objective\":";
  s += format_double(result.objective);
  s += ",\"iterations\":" + std::to_string(result.iterations);
  s += ",\"body\":";
  s += to_json(result.body);
  s += ",\"achieved_measure\":";
  s += to_json(result.achieved);
  s += ",\"decomposition\":";
  append_decomposition(s, result.node.get());
  s += '}';
  return s;
}

std::string to_off(const Polytope& P) {
  if (P.dim() != 3)
    throw PreconditionViolated("off: only 3-d bodies export to OFF");
  std::vector<const Facet*> active;
  for (const Facet& f : P.facets())
    if (f.area > 0) active.push_back(&f);
  std::size_t corner_count = 0;
  for (const Facet* f : active) corner_count += f->vertices.size();
  std::string s = "OFF\n";
  s += std::to_string(P.vertices().size()) + ' ' +
       std::to_string(active.size()) + ' ' +
       std::to_string(corner_count / 2) + '\n';
  for (const Vec& v : P.vertices()) {
    s += format_double(v[0]);
    s += ' ';
    s += format_double(v[1]);
    s += ' ';
    s += format_double(v[2]);
    s += '\n';
  }
  for (const Facet* f : active) {
    s += std::to_string(f->vertices.size());
    for (int id : f->vertices) s += ' ' + std::to_string(id);
    s += '\n';
  }
  return s;
}

std::string trace_to_csv(const std::vector<TraceRow>& trace) {
  std::string s = "iteration,objective,residual,step\n";
  for (const TraceRow& row : trace) {
    s += std::to_string(row.iteration);
    s += ',';
    s += format_double(row.objective);
    s += ',';
    s += format_double(row.residual);
    s += ',';
    s += format_double(row.step);
    s += '\n';
  }
  return s;
}

DiscreteMeasure measure_from_json(const std::string& text) {
  const json j = parse_text(text);
  try {
    if (!j.is_object() || !j.contains("dim") || !j.contains("pairs"))
      throw ParseError("parse: measure needs dim and pairs");
    const int dim = j.at("dim").get<int>();
    std::vector<std::pair<Vec, double>> raw;
    for (const json& p : j.at("pairs")) {
      if (!p.is_object() || !p.contains("u") || !p.contains("mass"))
        throw ParseError("parse: each pair needs u and mass");
      raw.push_back({vec_from(p.at("u")), p.at("mass").get<double>()});
    }
    return measure_from_pairs(dim, raw);
  } catch (const json::exception& e) {
    throw ParseError(std::string("parse: ") + e.what());
  }
}

Polytope polytope_from_json(const std::string& text, const Tolerances& tol) {
  return polytope_from(parse_text(text), tol);
}

Polytope result_body_from_json(const std::string& text,
                               const Tolerances& tol) {
  const json j = parse_text(text);
  if (!j.is_object() || !j.contains("body"))
    throw ParseError("parse: result file has no body");
  return polytope_from(j.at("body"), tol);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("io: cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("io: cannot write " + path);
  out << content;
  if (!out.flush()) throw Error("io: short write to " + path);
}

}  // namespace logmink
