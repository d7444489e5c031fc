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

#include "streameval/aggregate.hpp"

#include <cmath>
#include <cstdio>
#include <utility>

#include "json.hpp"
#include "streameval/errors.hpp"

namespace streameval {

namespace {

using json = nlohmann::ordered_json;

// The nine numeric columns after "category", in table order.
std::array<double CategoryReport::*, 9> NumericFields() {
  return {&CategoryReport::img_auroc, &CategoryReport::img_ap,
          &CategoryReport::img_f1max, &CategoryReport::px_auroc,
          &CategoryReport::px_ap,     &CategoryReport::px_f1max,
          &CategoryReport::aupro,     &CategoryReport::iou_max,
          &CategoryReport::mad};
}

void CheckFraction(double v, std::string_view what) {
  if (!(v >= 0.0 && v <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0, 1], got " +
                      std::to_string(v));
  }
}

std::string CsvField(const std::string& s) {
  const bool quote =
      s.empty() || s.find_first_of(",\"\r\n") != std::string::npos;
  if (!quote) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string MarkdownCell(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    if (c == '\n' || c == '\r') {
      out += ' ';
      continue;
    }
    out += c;
  }
  return out;
}

json RowToJson(const CategoryReport& row) {
  json j = json::object();
  j["category"] = row.category;
  const auto fields = NumericFields();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    j[std::string(kReportColumns[i + 1])] = row.*fields[i];
  }
  return j;
}

CategoryReport RowFromJson(const json& j) {
  CategoryReport row;
  row.category = j.at("category").get<std::string>();
  const auto fields = NumericFields();
  for (std::size_t i = 0; i < fields.size(); ++i) {
    row.*fields[i] = j.at(std::string(kReportColumns[i + 1])).get<double>();
  }
  return row;
}

}  // namespace

double mad(std::span<const double> seven) {
  if (seven.size() != 7) {
    throw DomainError("mAD takes exactly seven metrics, got " +
                      std::to_string(seven.size()));
  }
  double sum = 0.0;
  for (double v : seven) {
    CheckFraction(v, "mAD input");
    sum += v;
  }
  return sum / 7.0;
}

CategoryReport make_category_report(std::string category, double img_auroc,
                                    double img_ap, double img_f1max,
                                    double px_auroc, double px_ap,
                                    double px_f1max, double aupro,
                                    double iou_max) {
  CategoryReport row;
  row.category = std::move(category);
  row.img_auroc = img_auroc;
  row.img_ap = img_ap;
  row.img_f1max = img_f1max;
  row.px_auroc = px_auroc;
  row.px_ap = px_ap;
  row.px_f1max = px_f1max;
  row.aupro = aupro;
  row.iou_max = iou_max;
  CheckFraction(iou_max, "iou_max");
  const auto seven = row.mad_inputs();
  row.mad = mad(seven);
  return row;
}

CategoryReport suite_average(std::span<const CategoryReport> rows) {
  if (rows.empty()) {
    throw DomainError("cannot average an empty suite");
  }
  CategoryReport avg;
  avg.category = "Avg";
  const double n = static_cast<double>(rows.size());
  for (double CategoryReport::*field : NumericFields()) {
    double sum = 0.0;
    for (const CategoryReport& row : rows) sum += row.*field;
    avg.*field = sum / n;
  }
  return avg;
}

SuiteReport make_suite_report(std::vector<CategoryReport> rows) {
  SuiteReport report;
  report.avg = suite_average(rows);
  report.rows = std::move(rows);
  return report;
}

std::string format_percent(double fraction) {
  // The slack absorbs binary representation error so that a stored 0.8545
  // renders as 85.5.
  const double tenths = std::floor(fraction * 1000.0 + 0.5 + 1e-9);
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", tenths / 10.0);
  return buf;
}

ReportFormat parse_report_format(std::string_view name) {
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "markdown" || name == "md") return ReportFormat::kMarkdown;
  if (name == "json") return ReportFormat::kJson;
  throw UsageError("unknown report format '" + std::string(name) +
                   "' (expected csv, markdown or json)");
}

std::string render(const SuiteReport& report, ReportFormat format) {
  std::vector<const CategoryReport*> all;
  for (const CategoryReport& row : report.rows) all.push_back(&row);
  all.push_back(&report.avg);
  const auto fields = NumericFields();

  switch (format) {
    case ReportFormat::kCsv: {
      std::string out;
      for (std::size_t i = 0; i < kReportColumns.size(); ++i) {
        if (i) out += ',';
        out += kReportColumns[i];
      }
      out += "\r\n";
      for (const CategoryReport* row : all) {
        out += CsvField(row->category);
        for (auto field : fields) {
          out += ',';
          out += format_percent(row->*field);
        }
        out += "\r\n";
      }
      return out;
    }
    case ReportFormat::kMarkdown: {
      std::string out = "|";
      std::string rule = "|";
      for (std::size_t i = 0; i < kReportColumns.size(); ++i) {
        out += ' ';
        out += kReportColumns[i];
        out += " |";
        rule += i == 0 ? ":---|" : "---:|";
      }
      out += '\n' + rule + '\n';
      for (const CategoryReport* row : all) {
        out += "| " + MarkdownCell(row->category) + " |";
        for (auto field : fields) {
          out += ' ' + format_percent(row->*field) + " |";
        }
        out += '\n';
      }
      return out;
    }
    case ReportFormat::kJson: {
      json doc = json::object();
      doc["rows"] = json::array();
      for (const CategoryReport& row : report.rows) {
        doc["rows"].push_back(RowToJson(row));
      }
      doc["avg"] = RowToJson(report.avg);
      return doc.dump(2) + '\n';
    }
  }
  throw UsageError("unknown report format");
}

SuiteReport parse_json_report(std::string_view text) {
  try {
    const json doc = json::parse(text);
    SuiteReport report;
    for (const json& row : doc.at("rows")) {
      report.rows.push_back(RowFromJson(row));
    }
    report.avg = RowFromJson(doc.at("avg"));
    return report;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed JSON report: ") + e.what());
  }
}

}  // namespace streameval
