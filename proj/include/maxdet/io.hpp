#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "maxdet/certificate.hpp"
#include "maxdet/error.hpp"
#include "maxdet/linalg.hpp"
#include "maxdet/mvee.hpp"

namespace maxdet::io {

// Matrix JSON: {"dim": N, "rows": [[...], ...]}. An ellipsoid JSON is also
// accepted, in which case its "x" member is read. Entries must agree with
// their transpose to 1e-12 (relative to max(1, |entry|)); the stored matrix
// is the average of the two triangles.
linalg::SymMatrix parse_matrix(std::string_view text);
linalg::SymMatrix load_matrix(const std::filesystem::path& path);
std::string matrix_json(const linalg::SymMatrix& m);

// Points CSV: one point per line, N comma-separated columns, no header.
mvee::PointSet parse_points(std::string_view text);
mvee::PointSet load_points(const std::filesystem::path& path);
std::string points_csv(const mvee::PointSet& pts);

// {"x": matrix-json, "b": [...], "logdet_x": ..., plus solver diagnostics}
std::string report_json(const mvee::SolveReport& report);

// Non-finite values are written as null.
std::string certificate_json(const cert::Certificate& c);

// {"error": "<ErrorCode>", "message": "..."}
std::string error_json(const Error& e);
std::string error_json(std::string_view code, std::string_view message);

// printf %.17g
std::string format_real(double v);

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace maxdet::io
