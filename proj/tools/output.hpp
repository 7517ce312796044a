#pragma once

#include <filesystem>
#include <initializer_list>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace qwalk::cli {

enum class Format { Csv, Json, Svg };

Format parse_format(const std::string& name);
std::string to_string(Format format);

/// 17 significant digits, shortest form for integers.
std::string format_double(double v);

/// Comma separated rows with LF endings.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header);

  CsvTable& row();
  CsvTable& cell(double v);
  CsvTable& cell(long v);
  CsvTable& cell(int v) { return cell(static_cast<long>(v)); }
  CsvTable& cell(bool v);
  CsvTable& cell(const std::string& v);

  void write(std::ostream& os) const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<std::string>> rows_;
};

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
  std::string color;
};

struct ChartLabels {
  std::string title;
  std::string x_axis;
  std::string y_axis;
  bool log_y = false;
};

/// Static polyline chart with axes and a legend.
void write_svg(std::ostream& os, const ChartLabels& labels, const std::vector<Series>& series);

/// Writes `text` to `path` (creating parent directories), or to stdout when
/// the path is empty.
void emit(const std::filesystem::path& path, const std::string& text);

std::string dump_json(const nlohmann::ordered_json& j);

}  // namespace qwalk::cli
