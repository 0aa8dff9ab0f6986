#include "tvvar/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace tvvar {

namespace {

std::string trim(const std::string& s)
{
  const auto b = s.find_first_not_of(" \t\r\"");
  if (b == std::string::npos) {
    return "";
  }
  const auto e = s.find_last_not_of(" \t\r\"");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& line, char delimiter)
{
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, delimiter)) {
    out.push_back(trim(field));
  }
  if (!line.empty() && line.back() == delimiter) {
    out.emplace_back();
  }
  return out;
}

std::optional<double> parse_number(const std::string& s)
{
  if (s.empty()) {
    return std::nullopt;
  }
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

bool is_missing(const std::string& s)
{
  std::string lower = s;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return lower.empty() || lower == "na" || lower == "nan" || lower == "." || lower == "null";
}

bool looks_like_index(const std::string& header)
{
  std::string lower = header;
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  static const char* const names[] = {"date", "time", "index", "t", "period",
                                      "quarter", "observation_date", "obs"};
  return std::find(std::begin(names), std::end(names), lower) != std::end(names);
}

} // namespace

Dataset parse_dataset(std::istream& in, const std::string& source, char delimiter)
{
  std::string line;
  std::vector<std::string> header;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') {
      continue;
    }
    header = split(line, delimiter);
    break;
  }
  if (header.empty()) {
    throw std::runtime_error(source + ": no header row");
  }

  std::vector<std::vector<std::string>> records;
  std::vector<int> record_lines;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty() || line.front() == '#') {
      continue;
    }
    records.push_back(split(line, delimiter));
    record_lines.push_back(line_no);
  }
  if (records.empty()) {
    throw std::runtime_error(source + ": no data rows");
  }

  const bool has_index = looks_like_index(header.front()) ||
                         (!records.front().empty() && !is_missing(records.front().front()) &&
                          !parse_number(records.front().front()));
  const std::size_t first = has_index ? 1 : 0;
  if (header.size() <= first) {
    throw std::runtime_error(source + ": no numeric columns");
  }

  Dataset data;
  if (has_index) {
    data.index_name = header.front();
  }
  data.columns.assign(header.begin() + first, header.end());
  const auto d = static_cast<Eigen::Index>(data.columns.size());
  data.values.resize(d, static_cast<Eigen::Index>(records.size()));
  for (std::size_t r = 0; r < records.size(); ++r) {
    const auto& rec = records[r];
    const std::string where = source + ": data row " + std::to_string(r + 1) + " (line " +
                              std::to_string(record_lines[r]) + ")";
    if (rec.size() != header.size()) {
      throw std::runtime_error(where + " has " + std::to_string(rec.size()) +
                               " fields, expected " + std::to_string(header.size()));
    }
    if (has_index) {
      data.index.push_back(rec.front());
    }
    for (Eigen::Index c = 0; c < d; ++c) {
      const std::string& field = rec[first + c];
      if (is_missing(field)) {
        throw std::runtime_error(where + ": missing value in column '" + data.columns[c] + "'");
      }
      const auto v = parse_number(field);
      if (!v) {
        throw std::runtime_error(where + ": cannot parse '" + field + "' in column '" +
                                 data.columns[c] + "'");
      }
      data.values(c, static_cast<Eigen::Index>(r)) = *v;
    }
  }
  return data;
}

Dataset read_dataset(const std::string& path, char delimiter)
{
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open " + path);
  }
  return parse_dataset(in, path, delimiter);
}

Eigen::MatrixXd transform_columns(const Dataset& data, const IngestOptions& options)
{
  Eigen::MatrixXd x;
  if (options.columns.empty()) {
    x = data.values;
  } else {
    x.resize(static_cast<Eigen::Index>(options.columns.size()), data.values.cols());
    for (std::size_t k = 0; k < options.columns.size(); ++k) {
      const auto it = std::find(data.columns.begin(), data.columns.end(), options.columns[k]);
      if (it == data.columns.end()) {
        throw std::runtime_error("no column named '" + options.columns[k] + "'");
      }
      x.row(static_cast<Eigen::Index>(k)) = data.values.row(it - data.columns.begin());
    }
  }
  if (options.difference) {
    if (x.cols() < 2) {
      throw std::runtime_error("cannot difference fewer than two observations");
    }
    x = (x.rightCols(x.cols() - 1) - x.leftCols(x.cols() - 1)).eval();
  }
  if (options.demean) {
    const Eigen::VectorXd mean = x.rowwise().mean();
    x.colwise() -= mean;
  }
  return x;
}

TimeSeries to_series(const Dataset& data, const IngestOptions& options)
{
  Eigen::MatrixXd x = transform_columns(data, options);
  const Eigen::Index d = x.rows();
  if (x.cols() < 10 * d) {
    throw std::runtime_error("series too short: " + std::to_string(x.cols()) +
                             " observations for dimension " + std::to_string(d) +
                             " (need at least " + std::to_string(10 * d) + ")");
  }
  return TimeSeries(std::move(x), 0);
}

TimeSeries ingest(const std::string& path, bool difference, bool demean)
{
  return to_series(read_dataset(path), IngestOptions{difference, demean, {}});
}

void write_series_csv(std::ostream& out, const TimeSeries& ts,
                      const std::vector<std::string>& names, const std::string& comment)
{
  if (static_cast<int>(names.size()) != ts.dim()) {
    throw std::invalid_argument("write_series_csv: need one name per component");
  }
  if (!comment.empty()) {
    out << "# " << comment << "\n";
  }
  out << "t";
  for (const auto& name : names) {
    out << "," << name;
  }
  out << "\n";
  const auto old = out.precision(10);
  for (int c = 0; c < ts.total_size(); ++c) {
    out << (c - ts.presample() + 1);
    for (int k = 0; k < ts.dim(); ++k) {
      out << "," << ts.values()(k, c);
    }
    out << "\n";
  }
  out.precision(old);
}

} // namespace tvvar
