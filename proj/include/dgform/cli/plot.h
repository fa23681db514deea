// Copyright 2026 The DGform Authors
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

#ifndef DGFORM_CLI_PLOT_H_
#define DGFORM_CLI_PLOT_H_

#include <string>
#include <vector>

namespace dgform {

struct Bar {
  std::string label;
  double mean = 0.0;
  double spread = 0.0;  // half-height of the error bar
};

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

// Standalone SVG documents; byte-identical output for identical input.
std::string BarChartSvg(const std::string& title, const std::vector<Bar>& bars);
std::string LineChartSvg(const std::string& title, const std::string& x_label,
                         const std::vector<Series>& series);

}  // namespace dgform

#endif  // DGFORM_CLI_PLOT_H_
