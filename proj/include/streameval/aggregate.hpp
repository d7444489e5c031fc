/*
 * Copyright 2026 The StreamEval Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Per-category metric rows, suite averages and report rendering.
//
// Values are stored as fractions at full precision. Rendering to CSV and
// markdown turns them into percentages rounded half-up to one decimal; JSON
// carries the stored fractions so a report can be read back unchanged.

#ifndef STREAMEVAL_AGGREGATE_HPP_
#define STREAMEVAL_AGGREGATE_HPP_

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace streameval {

struct CategoryReport {
  std::string category;
  double img_auroc = 0.0;
  double img_ap = 0.0;
  double img_f1max = 0.0;
  double px_auroc = 0.0;
  double px_ap = 0.0;
  double px_f1max = 0.0;
  double aupro = 0.0;
  double iou_max = 0.0;
  double mad = 0.0;

  // The seven fields that enter mAD, in table order.
  std::array<double, 7> mad_inputs() const {
    return {img_auroc, img_ap, img_f1max, px_auroc, px_ap, px_f1max, aupro};
  }

  friend bool operator==(const CategoryReport&,
                         const CategoryReport&) = default;
};

struct SuiteReport {
  std::vector<CategoryReport> rows;
  CategoryReport avg;

  friend bool operator==(const SuiteReport&, const SuiteReport&) = default;
};

enum class ReportFormat { kCsv, kMarkdown, kJson };

// Column names in table order.
inline constexpr std::array<std::string_view, 10> kReportColumns = {
    "category", "img_auroc", "img_ap",  "img_f1max", "px_auroc",
    "px_ap",    "px_f1max",  "aupro",   "iou_max",   "mad"};

// Arithmetic mean of the seven values. Throws DomainError for any value
// outside [0, 1].
double mad(std::span<const double> seven);

// Fills in every field except mad from its arguments, then computes mad.
CategoryReport make_category_report(std::string category, double img_auroc,
                                    double img_ap, double img_f1max,
                                    double px_auroc, double px_ap,
                                    double px_f1max, double aupro,
                                    double iou_max);

// Unweighted per-field mean, named "Avg". Throws DomainError on an empty
// suite.
CategoryReport suite_average(std::span<const CategoryReport> rows);

SuiteReport make_suite_report(std::vector<CategoryReport> rows);

// Percentage with one decimal, rounded half-up: 0.85443 -> "85.4".
std::string format_percent(double fraction);

// Throws UsageError for an unknown format name.
ReportFormat parse_report_format(std::string_view name);

std::string render(const SuiteReport& report, ReportFormat format);

// Inverse of render(..., kJson).
SuiteReport parse_json_report(std::string_view text);

}  // namespace streameval

#endif  // STREAMEVAL_AGGREGATE_HPP_
