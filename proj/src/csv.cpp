#include "handpose/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include "handpose/errors.hpp"

namespace handpose::csv {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string token;
  std::istringstream in(line);
  while (std::getline(in, token, ',')) {
    // trim surrounding whitespace
    const auto begin = token.find_first_not_of(" \t\r");
    const auto end = token.find_last_not_of(" \t\r");
    out.push_back(begin == std::string::npos ? std::string{} : token.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot open '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  // tolerate trailing blank lines
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::IoError, "cannot write '" + path.string() + "'");
  return out;
}

}  // namespace

double parse_double(const std::string& token, const std::string& where) {
  double value = 0.0;
  const char* begin = token.data();
  const char* end = token.data() + token.size();
  const auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc{} || ptr != end) {
    fail(ErrorCode::ParseError, where + ": not a number: '" + token + "'");
  }
  return value;
}

std::string format_double(double value) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, ptr);
}

PoseSet load_pose_csv(const std::filesystem::path& path, const HandModel& model) {
  const auto lines = read_lines(path);
  if (lines.size() < 2) {
    fail(ErrorCode::ParseError, path.string() + ": expected a header row and at least one pose");
  }
  const std::vector<std::string> header = split_line(lines[0]);
  if (header.size() != static_cast<std::size_t>(model.size())) {
    fail(ErrorCode::ParseError, path.string() + ":1: header has " +
                                    std::to_string(header.size()) + " columns, model has " +
                                    std::to_string(model.size()) + " DoFs");
  }
  // column -> model index, by name
  std::vector<int> target(header.size());
  std::vector<bool> seen(header.size(), false);
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (!model.has(header[c])) {
      fail(ErrorCode::UnknownDof, path.string() + ":1: unknown DoF '" + header[c] + "'");
    }
    const int idx = model.index_of(header[c]);
    if (seen[static_cast<std::size_t>(idx)]) {
      fail(ErrorCode::DuplicateDof, path.string() + ":1: DoF '" + header[c] + "' appears twice");
    }
    seen[static_cast<std::size_t>(idx)] = true;
    target[c] = idx;
  }

  Eigen::MatrixXd poses(static_cast<Eigen::Index>(lines.size() - 1), model.size());
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_line(lines[r]);
    const std::string where = path.string() + ":" + std::to_string(r + 1);
    if (cells.size() != header.size()) {
      fail(ErrorCode::ParseError, where + ": expected " + std::to_string(header.size()) +
                                      " values, got " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      poses(static_cast<Eigen::Index>(r - 1), target[c]) = parse_double(cells[c], where);
    }
  }
  return make_pose_set(model, std::move(poses), path.filename().string());
}

void write_pose_csv(const std::filesystem::path& path, const PoseSet& poses) {
  auto out = open_output(path);
  const auto names = poses.model.names();
  for (std::size_t i = 0; i < names.size(); ++i) {
    out << (i ? "," : "") << names[i];
  }
  out << "\n";
  for (Eigen::Index r = 0; r < poses.poses.rows(); ++r) {
    for (Eigen::Index c = 0; c < poses.poses.cols(); ++c) {
      out << (c ? "," : "") << format_double(poses.poses(r, c));
    }
    out << "\n";
  }
}

Eigen::MatrixXd load_matrix_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.empty()) fail(ErrorCode::ParseError, path.string() + ": empty matrix file");
  std::vector<std::vector<double>> rows;
  for (std::size_t r = 0; r < lines.size(); ++r) {
    const auto cells = split_line(lines[r]);
    const std::string where = path.string() + ":" + std::to_string(r + 1);
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) row.push_back(parse_double(cell, where));
    if (!rows.empty() && row.size() != rows.front().size()) {
      fail(ErrorCode::ParseError, where + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                    static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < rows[r].size(); ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
    }
  }
  return m;
}

void write_matrix_csv(const std::filesystem::path& path, const Eigen::MatrixXd& matrix) {
  auto out = open_output(path);
  for (Eigen::Index r = 0; r < matrix.rows(); ++r) {
    for (Eigen::Index c = 0; c < matrix.cols(); ++c) {
      out << (c ? "," : "") << format_double(matrix(r, c));
    }
    out << "\n";
  }
}

ReadingsTable load_readings_csv(const std::filesystem::path& path) {
  const auto lines = read_lines(path);
  if (lines.size() < 2) {
    fail(ErrorCode::ParseError, path.string() + ": expected a header row and at least one reading");
  }
  ReadingsTable table;
  table.channels = split_line(lines[0]);
  table.rows.resize(static_cast<Eigen::Index>(lines.size() - 1),
                    static_cast<Eigen::Index>(table.channels.size()));
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_line(lines[r]);
    const std::string where = path.string() + ":" + std::to_string(r + 1);
    if (cells.size() != table.channels.size()) {
      fail(ErrorCode::ParseError, where + ": expected " + std::to_string(table.channels.size()) +
                                      " values, got " + std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < cells.size(); ++c) {
      table.rows(static_cast<Eigen::Index>(r - 1), static_cast<Eigen::Index>(c)) =
          parse_double(cells[c], where);
    }
  }
  return table;
}

void write_readings_csv(const std::filesystem::path& path, const ReadingsTable& table) {
  auto out = open_output(path);
  for (std::size_t i = 0; i < table.channels.size(); ++i) {
    out << (i ? "," : "") << table.channels[i];
  }
  out << "\n";
  for (Eigen::Index r = 0; r < table.rows.rows(); ++r) {
    for (Eigen::Index c = 0; c < table.rows.cols(); ++c) {
      out << (c ? "," : "") << format_double(table.rows(r, c));
    }
    out << "\n";
  }
}

std::vector<Eigen::MatrixXd> load_raw_windows_csv(const std::filesystem::path& path,
                                                  const std::vector<std::string>& channels) {
  const auto lines = read_lines(path);
  if (lines.size() < 2) {
    fail(ErrorCode::ParseError, path.string() + ": expected a header row and at least one sample");
  }
  const auto header = split_line(lines[0]);
  if (header.size() != 3 || header[0] != "window_id" || header[1] != "channel" ||
      header[2] != "value") {
    fail(ErrorCode::ParseError, path.string() + ":1: expected header 'window_id,channel,value'");
  }

  auto channel_index = [&](const std::string& token, const std::string& where) -> std::size_t {
    for (std::size_t i = 0; i < channels.size(); ++i) {
      if (channels[i] == token) return i;
    }
    int idx = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), idx);
    if (ec == std::errc{} && ptr == token.data() + token.size() && idx >= 0 &&
        static_cast<std::size_t>(idx) < channels.size()) {
      return static_cast<std::size_t>(idx);
    }
    fail(ErrorCode::ParseError, where + ": unknown channel '" + token + "'");
  };

  // window id -> per-channel sample list, keeping first-appearance order
  std::vector<std::string> window_order;
  std::map<std::string, std::vector<std::vector<double>>> windows;
  for (std::size_t r = 1; r < lines.size(); ++r) {
    const auto cells = split_line(lines[r]);
    const std::string where = path.string() + ":" + std::to_string(r + 1);
    if (cells.size() != 3) {
      fail(ErrorCode::ParseError, where + ": expected 3 values");
    }
    auto [it, inserted] =
        windows.try_emplace(cells[0], std::vector<std::vector<double>>(channels.size()));
    if (inserted) window_order.push_back(cells[0]);
    it->second[channel_index(cells[1], where)].push_back(parse_double(cells[2], where));
  }

  std::vector<Eigen::MatrixXd> out;
  out.reserve(window_order.size());
  for (const auto& id : window_order) {
    const auto& per_channel = windows.at(id);
    const std::size_t samples = per_channel.front().size();
    for (const auto& series : per_channel) {
      if (series.size() != samples) {
        fail(ErrorCode::ParseError,
             path.string() + ": window '" + id + "' has unequal sample counts across channels");
      }
    }
    Eigen::MatrixXd block(static_cast<Eigen::Index>(channels.size()),
                          static_cast<Eigen::Index>(samples));
    for (std::size_t ch = 0; ch < per_channel.size(); ++ch) {
      for (std::size_t s = 0; s < samples; ++s) {
        block(static_cast<Eigen::Index>(ch), static_cast<Eigen::Index>(s)) = per_channel[ch][s];
      }
    }
    out.push_back(std::move(block));
  }
  return out;
}

}  // namespace handpose::csv
