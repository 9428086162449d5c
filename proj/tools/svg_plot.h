// Copyright 2026 The LooseIMU Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LOOSEIMU_TOOLS_SVG_PLOT_H_
#define LOOSEIMU_TOOLS_SVG_PLOT_H_

#include <string>
#include <vector>

namespace looseimu::tools {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = false;
  // Free text placed in the SVG <metadata> element.
  std::string metadata;
  std::vector<Series> series;
};

// Standalone SVG line chart, 800 x 500.
std::string LinePlotSvg(const PlotSpec& spec);

// A CSV with a header row. Lines starting with '#' are kept apart as
// comments.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  // Text of the '#' lines, without the marker.
  std::vector<std::string> comments;

  // Numeric values of a named column; throws ConfigError if it is missing.
  std::vector<double> Column(const std::string& name) const;
};
CsvTable ReadCsv(const std::string& path);

}  // namespace looseimu::tools

#endif  // LOOSEIMU_TOOLS_SVG_PLOT_H_
