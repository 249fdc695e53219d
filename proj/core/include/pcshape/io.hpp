#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "pcshape/corr.hpp"
#include "pcshape/curves.hpp"
#include "pcshape/dilation.hpp"

namespace pcshape::io {

/// Whole file, or standard input for "-". Throws Errc::io.
std::string read_text(const std::string& path);
/// Whole file, or standard output for "-". Throws Errc::io.
void write_text(const std::string& path, std::string_view text);

/// Matrix from CSV (one row per line, comma separated, no header) or JSON
/// {"n": int, "entries": [[...], ...]}; the format is detected from the first
/// non-blank character.
Eigen::MatrixXd parse_matrix(std::string_view text);
std::string format_matrix_csv(const Eigen::MatrixXd& m);
std::string format_matrix_json(const Eigen::MatrixXd& m);

/// One realisation per CSV row.
RealizationSet parse_realizations(std::string_view text);
std::string format_realizations(const RealizationSet& data);

/// {"n": int, "gamma": [[i, j, value], ...], "degenerate": [[i, j], ...]}
/// with 1-based indices i < j.
SchurParams parse_schur_params(std::string_view text);
std::string format_schur_params(const SchurParams& params);

/// JSON list of matrices (an object {"dim", "matrices"} is also accepted).
DilationSequence parse_dilation_sequence(std::string_view text);
std::string format_dilation_sequence(const DilationSequence& seq);
/// Directory of W_0001.csv, W_0002.csv, ... read back in name order.
void write_sequence_directory(const std::filesystem::path& dir, const DilationSequence& seq);
DilationSequence read_sequence_directory(const std::filesystem::path& dir);

/// {"closed": bool, "points": [matrix, ...], "origin": matrix, "correction": matrix}.
/// origin and correction are optional: a curve produced from a dilation
/// sequence stores origin = W_0, so that W_k = x_k origin, and its component
/// correction F (which cancels in x_k = (W_k F)(W_0 F)^T). A bare JSON list of matrices is read
/// as an open curve.
struct CurveDocument {
  ManifoldCurve curve;
  std::optional<Eigen::MatrixXd> origin;
  std::optional<Eigen::MatrixXd> correction;
};
CurveDocument parse_curve(std::string_view text);
std::string format_curve(const CurveDocument& doc);

/// Header row of identifiers followed by the numeric rows.
std::string format_distance_matrix(const std::vector<std::string>& ids, const Eigen::MatrixXd& d);
std::pair<std::vector<std::string>, Eigen::MatrixXd> parse_distance_matrix(std::string_view text);

}  // namespace pcshape::io
