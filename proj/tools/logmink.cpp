// Command-line front end: measure extraction, concentration checking,
// reconstruction, verification and linear images of origin-symmetric
// polytopes.  Exit codes are part of the interface so shell pipelines can
// route on them:
//   0  success (check: strictly satisfied)
//   1  verify mismatch
//   2  unusable input (file parse, malformed flags, bad measure data)
//   3  geometric degeneracy (unbounded, collapsed, singular map)
//   10 check: satisfied with equality
//   11 concentration condition violated (includes unpaired equalities)
//   12 solver divergence
#include <chrono>
#include <cstdio>
#include <ctime>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "logmink/concentration.hpp"
#include "logmink/errors.hpp"
#include "logmink/geometry.hpp"
#include "logmink/json_io.hpp"
#include "logmink/measure.hpp"
#include "logmink/solver.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using logmink::Mat;
using logmink::Vec;

struct Manifest {
  std::string command;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::vector<std::pair<std::string, std::string>> config;  // key, raw json
};

std::string utc_now() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string json_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  out += '"';
  return out;
}

// Written next to the primary output of every run, success or not.
void write_manifest(const Manifest& m, double wall_s, int exit_status) {
  const std::string path = (m.outputs.empty() ? m.command : m.outputs.front()) +
                           ".manifest.json";
  std::string s = "{\"command\":" + json_quote(m.command);
  s += ",\"tool_version\":\"";
  s += kVersion;
  s += "\",\"timestamp_utc\":" + json_quote(utc_now());
  s += ",\"inputs\":[";
  for (std::size_t i = 0; i < m.inputs.size(); ++i) {
    if (i) s += ',';
    s += json_quote(m.inputs[i]);
  }
  s += "],\"outputs\":[";
  for (std::size_t i = 0; i < m.outputs.size(); ++i) {
    if (i) s += ',';
    s += json_quote(m.outputs[i]);
  }
  s += "],\"config\":{";
  for (std::size_t i = 0; i < m.config.size(); ++i) {
    if (i) s += ',';
    s += json_quote(m.config[i].first) + ':' + m.config[i].second;
  }
  s += "},\"wall_time_s\":" + logmink::format_double(wall_s);
  s += ",\"exit_status\":" + std::to_string(exit_status);
  s += '}';
  try {
    logmink::write_file(path, s);
  } catch (const std::exception&) {
    // the manifest must never break the run it describes
  }
}

std::vector<double> parse_numbers(const std::string& text, char sep) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find(sep, pos);
    const std::string tok =
        text.substr(pos, next == std::string::npos ? next : next - pos);
    try {
      std::size_t used = 0;
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw logmink::ParseError("parse: bad number '" + tok + "'");
    }
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

std::vector<Vec> parse_vector_list(const std::string& text) {
  std::vector<Vec> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t next = text.find(';', pos);
    const std::string tok =
        text.substr(pos, next == std::string::npos ? next : next - pos);
    const std::vector<double> nums = parse_numbers(tok, ',');
    Vec v(nums.size());
    for (std::size_t i = 0; i < nums.size(); ++i) v[i] = nums[i];
    if (!out.empty() && v.size() != out.front().size())
      throw logmink::ParseError("parse: inconsistent vector lengths");
    out.push_back(std::move(v));
    if (next == std::string::npos) break;
    pos = next + 1;
  }
  return out;
}

Mat parse_matrix(const std::string& text) {
  const std::vector<Vec> rows = parse_vector_list(text);
  const int n = static_cast<int>(rows.size());
  if (n == 0 || rows.front().size() != n)
    throw logmink::ParseError("parse: matrix must be square (rows 'a,b;c,d')");
  Mat M(n, n);
  for (int i = 0; i < n; ++i) M.row(i) = rows[i].transpose();
  return M;
}

logmink::Polytope body_from_cli(const std::string& file,
                                const std::string& dirs_flag,
                                const std::string& support_flag,
                                Manifest& man) {
  if (!file.empty()) {
    if (!dirs_flag.empty() || !support_flag.empty())
      throw logmink::ParseError(
          "parse: give either a polytope file or --dirs/--support, not both");
    man.inputs.push_back(file);
    return logmink::polytope_from_json(logmink::read_file(file));
  }
  if (dirs_flag.empty() || support_flag.empty())
    throw logmink::ParseError(
        "parse: need a polytope file or both --dirs and --support");
  std::vector<Vec> raw = parse_vector_list(dirs_flag);
  const std::vector<double> hs = parse_numbers(support_flag, ',');
  if (hs.size() != raw.size())
    throw logmink::ParseError("parse: one support number per direction");
  const int dim = static_cast<int>(raw.front().size());
  logmink::DirectionSet dirs =
      logmink::DirectionSet::normalized(dim, std::move(raw));
  Vec h(hs.size());
  for (std::size_t i = 0; i < hs.size(); ++i) h[i] = hs[i];
  return logmink::build_wulff_body(dirs,
                                   logmink::SupportVector(dirs, std::move(h)));
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const logmink::ConditionViolated*>(&e)) return 11;
  if (dynamic_cast<const logmink::NotComplementary*>(&e)) return 11;
  if (dynamic_cast<const logmink::DivergenceDetected*>(&e)) return 12;
  if (dynamic_cast<const logmink::UnboundedBody*>(&e) ||
      dynamic_cast<const logmink::DegenerateBody*>(&e) ||
      dynamic_cast<const logmink::OriginNotInterior*>(&e) ||
      dynamic_cast<const logmink::SingularMap*>(&e) ||
      dynamic_cast<const logmink::ZeroDirection*>(&e) ||
      dynamic_cast<const logmink::LiftDegenerate*>(&e))
    return 3;
  return 2;  // parse errors, bad measure data, precondition failures
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cone-volume measures and log-Minkowski reconstruction for "
               "origin-symmetric polytopes"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  // conevol
  std::string cv_file, cv_dirs, cv_support, cv_out = "measure.json";
  double cv_p = 0;
  CLI::App* conevol = app.add_subcommand(
      "conevol", "facet measure of a polytope (cone volumes by default)");
  conevol->add_option("polytope", cv_file, "polytope JSON file");
  conevol->add_option("--dirs", cv_dirs,
                      "inline directions 'x,y,z;x,y,z;...' instead of a file");
  conevol->add_option("--support", cv_support,
                      "inline support numbers 'h1,h2,...'");
  CLI::Option* cv_p_opt = conevol->add_option(
      "--p", cv_p, "emit the L_p surface measure h^(1-p)*S instead");
  conevol->add_option("-o,--out", cv_out, "output measure path")
      ->capture_default_str();

  // check
  std::string ck_file, ck_out = "report.json";
  double ck_eqtol = 1e-9;
  CLI::App* check = app.add_subcommand(
      "check", "subspace concentration report for a measure");
  check->add_option("measure", ck_file, "measure JSON file")->required();
  check->add_option("--equality-tol", ck_eqtol,
                    "relative width of the equality band")
      ->capture_default_str();
  check->add_option("-o,--out", ck_out, "output report path")
      ->capture_default_str();

  // solve
  std::string sv_file, sv_out = "result.json", sv_trace, sv_off;
  logmink::SolveConfig sv_cfg;
  CLI::App* solve_cmd = app.add_subcommand(
      "solve", "reconstruct a polytope with the given cone-volume measure");
  solve_cmd->add_option("measure", sv_file, "measure JSON file")->required();
  solve_cmd->add_option("--tol", sv_cfg.tol_residual,
                        "per-direction residual target")
      ->capture_default_str();
  solve_cmd->add_option("--max-iter", sv_cfg.max_iters, "iteration budget")
      ->capture_default_str();
  solve_cmd->add_option("--armijo-c", sv_cfg.armijo_c,
                        "sufficient-decrease constant")
      ->capture_default_str();
  solve_cmd->add_option("--backtrack-ratio", sv_cfg.backtrack_ratio,
                        "line-search shrink factor")
      ->capture_default_str();
  solve_cmd->add_option("--divergence-ratio", sv_cfg.divergence_ratio,
                        "h_max/h_min blow-up threshold")
      ->capture_default_str();
  solve_cmd->add_option("--equality-tol", sv_cfg.equality_tol,
                        "equality-band width for routing")
      ->capture_default_str();
  solve_cmd->add_option("--trace", sv_trace, "write per-iteration CSV here");
  solve_cmd->add_option("--off", sv_off, "write an OFF mesh here (3-d only)");
  solve_cmd->add_option("-o,--out", sv_out, "output result path")
      ->capture_default_str();

  // verify
  std::string vf_measure, vf_result;
  double vf_tol = 1e-7;
  CLI::App* verify = app.add_subcommand(
      "verify", "recompute a result body's measure and compare to a target");
  verify->add_option("measure", vf_measure, "target measure JSON")->required();
  verify->add_option("result", vf_result, "solve result JSON")->required();
  verify->add_option("--tol", vf_tol, "acceptable relative residual")
      ->capture_default_str();

  // transform
  std::string tf_file, tf_matrix, tf_out = "transformed.json";
  CLI::App* transform = app.add_subcommand(
      "transform", "apply an invertible linear map to a polytope");
  transform->add_option("polytope", tf_file, "polytope JSON file")->required();
  transform->add_option("--matrix", tf_matrix, "row-major matrix 'a,b;c,d'")
      ->required();
  transform->add_option("-o,--out", tf_out, "output polytope path")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  Manifest man;
  const auto t0 = std::chrono::steady_clock::now();
  int code = 0;
  try {
    if (conevol->parsed()) {
      man.command = "conevol";
      man.outputs.push_back(cv_out);
      if (*cv_p_opt)
        man.config.push_back({"p", logmink::format_double(cv_p)});
      const logmink::Polytope P =
          body_from_cli(cv_file, cv_dirs, cv_support, man);
      const logmink::DiscreteMeasure mu =
          *cv_p_opt ? logmink::lp_surface_measure(P, cv_p)
                    : logmink::cone_volume_measure(P);
      logmink::write_file(cv_out, logmink::to_json(mu));
      const logmink::FirstMoment fm = logmink::check_first_moment(mu);
      std::printf("wrote %s: %d direction pairs, total mass %s\n",
                  cv_out.c_str(), mu.count(),
                  logmink::format_double(mu.total()).c_str());
      std::printf("first moment: residual %s, %s\n",
                  logmink::format_double(fm.residual).c_str(),
                  fm.pass ? "pass" : "FAIL");
    } else if (check->parsed()) {
      man.command = "check";
      man.outputs.push_back(ck_out);
      man.inputs.push_back(ck_file);
      man.config.push_back(
          {"equality_tol", logmink::format_double(ck_eqtol)});
      const logmink::DiscreteMeasure mu =
          logmink::measure_from_json(logmink::read_file(ck_file));
      logmink::CheckConfig ccfg;
      ccfg.equality_rel = ck_eqtol;
      const logmink::ConcentrationReport rep =
          logmink::check_subspace_concentration(mu, ccfg);
      logmink::write_file(ck_out, logmink::to_json(rep));
      const char* status =
          rep.status == logmink::ConcentrationStatus::StrictlySatisfied
              ? "strictly satisfied"
              : rep.status == logmink::ConcentrationStatus::SatisfiedWithEquality
                    ? "satisfied with equality"
                    : "violated";
      std::printf("wrote %s: %s, %zu subspaces checked\n", ck_out.c_str(),
                  status, rep.records.size());
      if (!rep.unpaired_equalities.empty())
        std::printf("unpaired equality subspaces present: no body can "
                    "realize this measure\n");
      if (rep.status == logmink::ConcentrationStatus::Violated ||
          !rep.condition_satisfied)
        code = 11;
      else if (rep.status ==
               logmink::ConcentrationStatus::SatisfiedWithEquality)
        code = 10;
    } else if (solve_cmd->parsed()) {
      man.command = "solve";
      man.outputs.push_back(sv_out);
      man.inputs.push_back(sv_file);
      man.config = {
          {"tol", logmink::format_double(sv_cfg.tol_residual)},
          {"max_iter", std::to_string(sv_cfg.max_iters)},
          {"armijo_c", logmink::format_double(sv_cfg.armijo_c)},
          {"backtrack_ratio", logmink::format_double(sv_cfg.backtrack_ratio)},
          {"divergence_ratio",
           logmink::format_double(sv_cfg.divergence_ratio)},
          {"equality_tol", logmink::format_double(sv_cfg.equality_tol)},
      };
      const logmink::DiscreteMeasure mu =
          logmink::measure_from_json(logmink::read_file(sv_file));
      const logmink::SolveResult res = logmink::solve(mu, sv_cfg);
      logmink::write_file(sv_out, logmink::to_json(res));
      if (!sv_trace.empty()) {
        logmink::write_file(sv_trace, logmink::trace_to_csv(res.trace));
        man.outputs.push_back(sv_trace);
      }
      if (!sv_off.empty()) {
        if (res.body.dim() == 3) {
          logmink::write_file(sv_off, logmink::to_off(res.body));
          man.outputs.push_back(sv_off);
        } else {
          std::fprintf(stderr,
                       "warning: --off ignored, body is %d-dimensional\n",
                       res.body.dim());
        }
      }
      std::printf("wrote %s: %s path, %d iterations, residual %s\n",
                  sv_out.c_str(),
                  res.path == logmink::SolveResult::Path::Strict
                      ? "strict"
                      : "decomposed",
                  res.iterations,
                  logmink::format_double(res.residual).c_str());
    } else if (verify->parsed()) {
      man.command = "verify";
      man.inputs = {vf_measure, vf_result};
      man.config.push_back({"tol", logmink::format_double(vf_tol)});
      const logmink::DiscreteMeasure target =
          logmink::measure_from_json(logmink::read_file(vf_measure));
      const logmink::Polytope body =
          logmink::result_body_from_json(logmink::read_file(vf_result));
      const logmink::DiscreteMeasure achieved =
          logmink::cone_volume_measure(body);
      const double resid = logmink::measure_residual(target, achieved);
      std::printf("max residual %s (tol %s): %s\n",
                  logmink::format_double(resid).c_str(),
                  logmink::format_double(vf_tol).c_str(),
                  resid <= vf_tol ? "match" : "MISMATCH");
      if (resid > vf_tol) code = 1;
    } else if (transform->parsed()) {
      man.command = "transform";
      man.outputs.push_back(tf_out);
      man.inputs.push_back(tf_file);
      man.config.push_back({"matrix", json_quote(tf_matrix)});
      const logmink::Polytope P =
          logmink::polytope_from_json(logmink::read_file(tf_file));
      const Mat phi = parse_matrix(tf_matrix);
      if (phi.rows() != P.dim())
        throw logmink::ParseError("parse: matrix size does not match body");
      const logmink::Polytope image = logmink::apply_linear_map(P, phi);
      logmink::write_file(tf_out, logmink::to_json(image));
      std::printf("wrote %s: volume %s\n", tf_out.c_str(),
                  logmink::format_double(image.volume()).c_str());
    }
  } catch (const std::exception& e) {
    code = exit_code_for(e);
    std::fprintf(stderr, "error: %s\n", e.what());
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  write_manifest(man, wall, code);
  return code;
}
