#pragma once

#include <string>

#include "logmink/concentration.hpp"
#include "logmink/geometry.hpp"
#include "logmink/measure.hpp"
#include "logmink/solver.hpp"

namespace logmink {

// Serialization of the public types.  Writers emit a fixed key order and
// format every floating-point number with 17 significant digits, so repeated
// runs over the same input are byte-identical.  Readers are tolerant: they
// accept non-unit direction vectors (normalizing) and merge duplicate or
// antipodal measure entries.

std::string format_double(double x);  // %.17g

std::string to_json(const DiscreteMeasure& mu);
std::string to_json(const Polytope& P);
std::string to_json(const ConcentrationReport& report);
std::string to_json(const SolveResult& result);

// ASCII OFF export of a 3-d body: active facets only, vertices
// counterclockwise as seen from outside.
std::string to_off(const Polytope& P);

// Per-iteration CSV: "iteration,objective,residual,step".
std::string trace_to_csv(const std::vector<TraceRow>& trace);

DiscreteMeasure measure_from_json(const std::string& text);

// Rebuilds the body from its stored directions and support numbers and
// cross-checks the recorded volume.
Polytope polytope_from_json(const std::string& text,
                            const Tolerances& tol = {});

// Extracts the "body" object of a solve-result file.
Polytope result_body_from_json(const std::string& text,
                               const Tolerances& tol = {});

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace logmink
