#pragma once

#include "qcascade/qsys.hpp"
#include "qcascade/types.hpp"

#include <nlohmann/json_fwd.hpp>

#include <string>
#include <variant>

namespace qcascade {

// JSON encodings: real matrices as nested arrays of numbers, complex
// matrices as nested arrays of [re, im] pairs. Parsers reject NaN/Inf and
// ragged rows.

nlohmann::json real_matrix_to_json(const RealMatrix& m);
nlohmann::json complex_matrix_to_json(const ComplexMatrix& m);
RealMatrix real_matrix_from_json(const nlohmann::json& j);
ComplexMatrix complex_matrix_from_json(const nlohmann::json& j);

/// Reads {"schema_version": 1, "matrix": [[...]]} (a bare nested array is
/// also accepted).
RealMatrix read_matrix_file(const std::string& path);
void write_matrix_file(const std::string& path, const RealMatrix& m);

/// Self-describing system file, mode "quadrature" (A, B, C, D) or "sdh"
/// (S, K, R with complex entries as [re, im]).
using SystemVariant = std::variant<QuadSystem, SdhSystem>;
SystemVariant read_system_file(const std::string& path);
nlohmann::json system_to_json(const QuadSystem& g);
nlohmann::json system_to_json(const SdhSystem& g);

nlohmann::json cascade_to_json(const CascadeRealization& cascade, Index n, Index m);
CascadeRealization cascade_from_json(const nlohmann::json& j);

/// FNV-1a digest of a file's bytes, as a hex string; recorded in reports so
/// a run can be tied to its exact inputs.
std::string file_digest(const std::string& path);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace qcascade
