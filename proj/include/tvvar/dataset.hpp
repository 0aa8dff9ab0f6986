#pragma once

#include "tvvar/varproc.hpp"

#include <Eigen/Dense>

#include <istream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace tvvar {

/// Rectangular delimited table: a header row, an optional leading date/index
/// column, then d numeric columns with one row per time point. Lines starting
/// with '#' are comments.
struct Dataset
{
  std::optional<std::string> index_name;
  std::vector<std::string> index;
  std::vector<std::string> columns;
  Eigen::MatrixXd values; ///< d × rows

  int rows() const { return static_cast<int>(values.cols()); }
};

/// Parse a table; `source` names the input in error messages. Throws
/// std::runtime_error naming the data row of any missing or malformed value.
Dataset parse_dataset(std::istream& in, const std::string& source = "<input>",
                      char delimiter = ',');
Dataset read_dataset(const std::string& path, char delimiter = ',');

struct IngestOptions
{
  bool difference = false;
  bool demean = false;
  /// Subset of columns by name, in order; all numeric columns when empty.
  std::vector<std::string> columns;
};

/// Selected columns (d × rows) after optional first differencing and mean
/// removal; no length check.
Eigen::MatrixXd transform_columns(const Dataset& data, const IngestOptions& options);

/// Dataset → series with no presample, after optional first differencing and
/// mean removal. Requires at least 10·d observations after differencing.
TimeSeries to_series(const Dataset& data, const IngestOptions& options);
TimeSeries ingest(const std::string& path, bool difference, bool demean);

/// Every observation (presample included) as CSV under `names`, preceded by
/// one '#' line holding `comment` when it is non-empty.
void write_series_csv(std::ostream& out, const TimeSeries& ts,
                      const std::vector<std::string>& names, const std::string& comment = "");

} // namespace tvvar
