#include "pcshape/io.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "pcshape/error.hpp"

namespace pcshape::io {

namespace {

using json = nlohmann::json;
using Index = Eigen::Index;

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

double parse_number(std::string_view token, std::size_t line) {
  token = trim(token);
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size() || token.empty()) {
    std::ostringstream os;
    os << "line " << line << ": '" << token << "' is not a number";
    throw Error(Errc::parse, os.str());
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string_view> nonblank_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  for (auto line : split(text, '\n')) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  return lines;
}

Eigen::MatrixXd parse_csv_rows(const std::vector<std::string_view>& lines, std::size_t first_line) {
  if (lines.empty()) throw Error(Errc::parse, "no rows");
  std::vector<std::vector<double>> rows;
  for (std::size_t l = 0; l < lines.size(); ++l) {
    std::vector<double> row;
    for (auto tok : split(trim(lines[l]), ',')) row.push_back(parse_number(tok, first_line + l));
    if (!rows.empty() && row.size() != rows.front().size()) {
      std::ostringstream os;
      os << "line " << first_line + l << " has " << row.size() << " fields, expected "
         << rows.front().size();
      throw Error(Errc::parse, os.str());
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j];
  }
  return m;
}

std::string format_double(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("nan");
}

json matrix_to_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd matrix_from_json(const json& rows) {
  if (!rows.is_array() || rows.empty() || !rows.front().is_array()) {
    throw Error(Errc::parse, "matrix must be a non-empty array of rows");
  }
  const std::size_t cols = rows.front().size();
  Eigen::MatrixXd m(static_cast<Index>(rows.size()), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (!rows[i].is_array() || rows[i].size() != cols) {
      throw Error(Errc::parse, "matrix rows differ in length");
    }
    for (std::size_t j = 0; j < cols; ++j) {
      if (!rows[i][j].is_number()) throw Error(Errc::parse, "matrix entry is not a number");
      m(static_cast<Index>(i), static_cast<Index>(j)) = rows[i][j].get<double>();
    }
  }
  return m;
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::exception& e) {
    throw Error(Errc::parse, e.what());
  }
}

bool looks_like_json(std::string_view text) {
  const auto t = trim(text);
  return !t.empty() && (t.front() == '{' || t.front() == '[');
}

std::vector<Eigen::MatrixXd> matrices_from_json(const json& list) {
  if (!list.is_array()) throw Error(Errc::parse, "expected a list of matrices");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(list.size());
  for (const auto& m : list) out.push_back(matrix_from_json(m));
  return out;
}

}  // namespace

std::string read_text(const std::string& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io, "cannot open '" + path + "' for reading");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text(const std::string& path, std::string_view text) {
  if (path == "-") {
    std::cout << text;
    std::cout.flush();
    if (!std::cout) throw Error(Errc::io, "cannot write to standard output");
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(Errc::io, "write to '" + path + "' failed");
}

Eigen::MatrixXd parse_matrix(std::string_view text) {
  if (looks_like_json(text)) {
    const json doc = parse_json(text);
    const json& entries = doc.is_object() ? doc.at("entries") : doc;
    Eigen::MatrixXd m = matrix_from_json(entries);
    if (doc.is_object() && doc.contains("n") && doc.at("n").get<Index>() != m.rows()) {
      throw Error(Errc::parse, "\"n\" does not match the number of rows");
    }
    return m;
  }
  return parse_csv_rows(nonblank_lines(text), 1);
}

std::string format_matrix_csv(const Eigen::MatrixXd& m) {
  std::string out;
  for (Index i = 0; i < m.rows(); ++i) {
    for (Index j = 0; j < m.cols(); ++j) {
      if (j > 0) out += ',';
      out += format_double(m(i, j));
    }
    out += '\n';
  }
  return out;
}

std::string format_matrix_json(const Eigen::MatrixXd& m) {
  json doc;
  doc["n"] = m.rows();
  doc["entries"] = matrix_to_json(m);
  return doc.dump() + "\n";
}

RealizationSet parse_realizations(std::string_view text) {
  return RealizationSet(parse_csv_rows(nonblank_lines(text), 1));
}

std::string format_realizations(const RealizationSet& data) {
  return format_matrix_csv(data.samples());
}

SchurParams parse_schur_params(std::string_view text) {
  const json doc = parse_json(text);
  try {
    const auto n = doc.at("n").get<std::size_t>();
    SchurParams params(n);
    for (const auto& entry : doc.at("gamma")) {
      if (!entry.is_array() || entry.size() != 3) {
        throw Error(Errc::parse, "gamma entries must be [i, j, value]");
      }
      const auto i = entry[0].get<std::size_t>();
      const auto j = entry[1].get<std::size_t>();
      if (i == 0 || j == 0) throw Error(Errc::parse, "gamma indices are 1-based");
      params.set(i - 1, j - 1, entry[2].get<double>());
    }
    if (doc.contains("degenerate")) {
      for (const auto& entry : doc.at("degenerate")) {
        params.mark_degenerate(entry.at(0).get<std::size_t>() - 1, entry.at(1).get<std::size_t>() - 1);
      }
    }
    return params;
  } catch (const json::exception& e) {
    throw Error(Errc::parse, e.what());
  }
}

std::string format_schur_params(const SchurParams& params) {
  json doc;
  doc["n"] = params.size();
  json gamma = json::array();
  for (std::size_t i = 0; i < params.size(); ++i) {
    for (std::size_t j = i + 1; j < params.size(); ++j) gamma.push_back({i + 1, j + 1, params(i, j)});
  }
  doc["gamma"] = std::move(gamma);
  json degenerate = json::array();
  for (const auto& [i, j] : params.degenerate()) degenerate.push_back({i + 1, j + 1});
  doc["degenerate"] = std::move(degenerate);
  return doc.dump() + "\n";
}

DilationSequence parse_dilation_sequence(std::string_view text) {
  const json doc = parse_json(text);
  try {
    return DilationSequence(matrices_from_json(doc.is_object() ? doc.at("matrices") : doc));
  } catch (const json::exception& e) {
    throw Error(Errc::parse, e.what());
  }
}

std::string format_dilation_sequence(const DilationSequence& seq) {
  json list = json::array();
  for (const auto& w : seq.matrices()) list.push_back(matrix_to_json(w));
  return list.dump() + "\n";
}

void write_sequence_directory(const std::filesystem::path& dir, const DilationSequence& seq) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(Errc::io, "cannot create '" + dir.string() + "': " + ec.message());
  for (std::size_t i = 0; i < seq.count(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "W_%04zu.csv", i + 1);
    write_text((dir / name).string(), format_matrix_csv(seq[i]));
  }
}

DilationSequence read_sequence_directory(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  std::error_code ec;
  for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
    if (entry.is_regular_file() && entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  if (ec) throw Error(Errc::io, "cannot list '" + dir.string() + "': " + ec.message());
  std::sort(files.begin(), files.end());
  std::vector<Eigen::MatrixXd> matrices;
  for (const auto& f : files) matrices.push_back(parse_matrix(read_text(f.string())));
  return DilationSequence(std::move(matrices));
}

CurveDocument parse_curve(std::string_view text) {
  const json doc = parse_json(text);
  try {
    const bool closed = doc.is_object() && doc.value("closed", false);
    const auto matrices = matrices_from_json(doc.is_object() ? doc.at("points") : doc);
    std::vector<GroupElement> points;
    points.reserve(matrices.size());
    for (const auto& m : matrices) points.emplace_back(m);
    CurveDocument out{ManifoldCurve(std::move(points), closed), std::nullopt, std::nullopt};
    if (doc.is_object() && doc.contains("origin")) out.origin = matrix_from_json(doc.at("origin"));
    if (doc.is_object() && doc.contains("correction")) {
      out.correction = matrix_from_json(doc.at("correction"));
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(Errc::parse, e.what());
  }
}

std::string format_curve(const CurveDocument& doc) {
  json out;
  out["closed"] = doc.curve.closed();
  json points = json::array();
  for (const auto& p : doc.curve.points()) points.push_back(matrix_to_json(p.matrix()));
  out["points"] = std::move(points);
  if (doc.origin) out["origin"] = matrix_to_json(*doc.origin);
  if (doc.correction) out["correction"] = matrix_to_json(*doc.correction);
  return out.dump() + "\n";
}

std::string format_distance_matrix(const std::vector<std::string>& ids, const Eigen::MatrixXd& d) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ',';
    out += ids[i];
  }
  out += '\n';
  return out + format_matrix_csv(d);
}

std::pair<std::vector<std::string>, Eigen::MatrixXd> parse_distance_matrix(std::string_view text) {
  auto lines = nonblank_lines(text);
  if (lines.empty()) throw Error(Errc::parse, "empty distance matrix");
  std::vector<std::string> ids;
  for (auto tok : split(trim(lines.front()), ',')) ids.emplace_back(trim(tok));
  lines.erase(lines.begin());
  Eigen::MatrixXd d = parse_csv_rows(lines, 2);
  if (static_cast<std::size_t>(d.rows()) != ids.size() || d.rows() != d.cols()) {
    throw Error(Errc::parse, "distance matrix does not match its header");
  }
  return {std::move(ids), std::move(d)};
}

}  // namespace pcshape::io
