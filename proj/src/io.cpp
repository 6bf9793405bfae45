#include "maxdet/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace maxdet::io {

namespace {

using nlohmann::json;

constexpr double kSymmetryTolerance = 1e-12;

json real(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json matrix_value(const linalg::SymMatrix& m) {
  json rows = json::array();
  for (std::size_t i = 0; i < m.dim(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return json{{"dim", m.dim()}, {"rows", std::move(rows)}};
}

linalg::SymMatrix matrix_from(const json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::ParseError, "matrix JSON: expected an object");
  if (doc.contains("x")) return matrix_from(doc.at("x"));
  if (!doc.contains("dim") || !doc.contains("rows")) {
    throw Error(ErrorCode::ParseError, "matrix JSON: missing \"dim\" or \"rows\"");
  }
  const auto& dim_field = doc.at("dim");
  if (!dim_field.is_number_unsigned() || dim_field.get<std::size_t>() == 0) {
    throw Error(ErrorCode::ParseError, "matrix JSON: \"dim\" must be a positive integer");
  }
  const auto n = dim_field.get<std::size_t>();
  const auto& rows = doc.at("rows");
  if (!rows.is_array() || rows.size() != n) {
    throw Error(ErrorCode::InvalidShape, "matrix JSON: expected " + std::to_string(n) + " rows");
  }
  linalg::Matrix full(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& row = rows[i];
    if (!row.is_array() || row.size() != n) {
      throw Error(ErrorCode::InvalidShape, "matrix JSON: row " + std::to_string(i) + " does not have " +
                                               std::to_string(n) + " entries");
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (!row[j].is_number()) throw Error(ErrorCode::ParseError, "matrix JSON: non-numeric entry");
      full(i, j) = row[j].get<double>();
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double a = full(i, j);
      const double b = full(j, i);
      const double scale = std::max({1.0, std::abs(a), std::abs(b)});
      if (!(std::abs(a - b) <= kSymmetryTolerance * scale)) {
        throw Error(ErrorCode::InvalidInput, "matrix JSON: entries (" + std::to_string(i) + "," +
                                                 std::to_string(j) + ") and transpose differ");
      }
    }
  }
  return linalg::SymMatrix::symmetrized(full);
}

}  // namespace

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::InvalidInput, "cannot write " + path.string());
  out << contents;
}

linalg::SymMatrix parse_matrix(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::ParseError, std::string("matrix JSON: ") + e.what());
  }
  return matrix_from(doc);
}

linalg::SymMatrix load_matrix(const std::filesystem::path& path) { return parse_matrix(read_file(path)); }

std::string matrix_json(const linalg::SymMatrix& m) { return matrix_value(m).dump(); }

mvee::PointSet parse_points(std::string_view text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(cell, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || cell.find_first_not_of(" \t", used) != std::string::npos) {
        throw Error(ErrorCode::ParseError, "points CSV line " + std::to_string(line_no) + ": bad value '" + cell + "'");
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return mvee::PointSet::from_rows(rows);
}

mvee::PointSet load_points(const std::filesystem::path& path) { return parse_points(read_file(path)); }

std::string points_csv(const mvee::PointSet& pts) {
  std::string out;
  for (std::size_t i = 0; i < pts.count(); ++i) {
    const auto p = pts.point(i);
    for (std::size_t j = 0; j < p.size(); ++j) {
      if (j) out += ',';
      out += format_real(p[j]);
    }
    out += '\n';
  }
  return out;
}

std::string report_json(const mvee::SolveReport& report) {
  json doc{{"x", matrix_value(report.ellipsoid.x)},
           {"b", report.ellipsoid.b},
           {"logdet_x", real(report.logdet_x)},
           {"iterations", report.iterations},
           {"tolerance", report.tolerance},
           {"khachiyan_gap", real(report.khachiyan_gap)},
           {"converged", report.converged},
           {"inflation", report.inflation}};
  return doc.dump(2);
}

std::string certificate_json(const cert::Certificate& c) {
  json doc{{"epsilon", real(c.epsilon)},
           {"lambda_star", real(c.lambda_star)},
           {"g_exact", real(c.g_exact)},
           {"g_closed", real(c.g_closed)},
           {"spectral_norm_xf", real(c.spectral_norm_xf)},
           {"frobenius_bound", real(c.frobenius_bound)},
           {"vacuous", c.vacuous},
           {"epsilon_clamped", c.epsilon_clamped},
           {"reduced_accuracy", c.reduced_accuracy}};
  return doc.dump(2);
}

std::string error_json(std::string_view code, std::string_view message) {
  return json{{"error", code}, {"message", message}}.dump();
}

std::string error_json(const Error& e) { return error_json(to_string(e.code()), e.what()); }

}  // namespace maxdet::io
