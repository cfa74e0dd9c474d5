#pragma once

#include <filesystem>

#include <nlohmann/json.hpp>

#include "qdil/generators.hpp"
#include "qdil/linalg.hpp"
#include "qdil/qphase.hpp"

namespace qdil {

using json = nlohmann::json;

/// {"rows": r, "cols": c, "data": [[re, im], ...]} in row-major order.
json matrix_to_json(const ComplexMatrix& m);
/// Throws InvalidInput on malformed input or non-finite entries.
ComplexMatrix matrix_from_json(const json& j);

json real_matrix_to_json(const RealMatrix& m);
RealMatrix real_matrix_from_json(const json& j);

/// {"n": n, "theta": [[...], ...]}.
json phases_to_json(const PhaseMatrix& p);
PhaseMatrix phases_from_json(const json& j);

/// {"type": "qtuple", "n": n, "phases": {...}, "ops": [matrix, ...]}.
json tuple_to_json(const QTuple& t);
QTuple tuple_from_json(const json& j);

/// {"type": "qpair", "variant": "left|middle|right", "T1", "T2", "Q"}.
json pair_to_json(const QPair& p);
QPair pair_from_json(const json& j);

json instance_to_json(const Instance& inst);
Instance instance_from_json(const json& j);

json spec_to_json(const GeneratorSpec& s);
GeneratorSpec spec_from_json(const json& j);

json tolerances_to_json(const ToleranceConfig& cfg);
/// Starts from `base` and overrides the keys present in j.
ToleranceConfig tolerances_from_json(const json& j, ToleranceConfig base = {});

/// Throws IoError.
json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const json& j);

}  // namespace qdil
