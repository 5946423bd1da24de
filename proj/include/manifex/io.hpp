#pragma once

#include "manifex/analysis.hpp"
#include "manifex/extender.hpp"
#include "manifex/online.hpp"
#include "manifex/tomo.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace manifex {

/// 16-bit binary PGM (P5, maxval 65535, big-endian samples). Values are
/// affinely scaled to [0, 65535]; the scale is recorded in a sidecar
/// "<path>.scale.txt" holding the original min and max.
void write_pgm16(const std::filesystem::path& path, const Eigen::MatrixXd& m);

/// Reads a 16-bit P5 image back, undoing the affine scale from the sidecar
/// when one sits next to the file (unit scale otherwise).
Eigen::MatrixXd read_pgm16(const std::filesystem::path& path);

/// Raw little-endian float64 matrix with a 16-byte header:
/// magic "MXF1", rows (u32 LE), cols (u32 LE), reserved u32 = 0; then
/// rows*cols doubles, row-major.
void write_mxf(const std::filesystem::path& path, const Eigen::MatrixXd& m);
Eigen::MatrixXd read_mxf(const std::filesystem::path& path);

/// Angle-list sidecar: one decimal-degree value per line.
void write_angles(const std::filesystem::path& path, const std::vector<double>& angles);
std::vector<double> read_angles(const std::filesystem::path& path);

/// report.csv: header "method,batch,error,runtime_s", '.' decimal separator,
/// UTF-8, LF line endings.
void write_reports_csv(const std::filesystem::path& path,
                       const std::vector<ErrorReport>& reports);

/// Self-describing model container (versioned, crc32-checksummed): ambient
/// and target dims, value dim, delta, half-width, basis, training data, and
/// optionally the evaluation cache. Round-trips reproduce predictions
/// bitwise. Distinct diagnostics for bad magic/version, truncation, and
/// checksum mismatch.
void save_model(const std::filesystem::path& path, const ExtenderModel& model,
                const EvaluationCache* cache = nullptr);
ExtenderModel load_model(const std::filesystem::path& path,
                         EvaluationCache* cache = nullptr);

} // namespace manifex
