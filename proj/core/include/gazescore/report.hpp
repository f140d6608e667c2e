#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gazescore/scoring.hpp"

namespace gazescore::report {

/// One scatter point of a report: truth on x, score/prediction on y.
struct Point {
  std::string participant_id;
  double x = 0;
  double y = 0;
};

/// Self-contained SVG scatter with axes, ticks and an r (and optional MAE)
/// annotation. Throws DataError for fewer than 2 points.
std::string svg_scatter(const std::vector<Point>& points,
                        const std::string& x_label, const std::string& y_label,
                        double r, std::optional<double> mae_value);

void write_text_file(const std::string& path, const std::string& content);

/// report.json / report.csv for a prediction run.
void write_eval_report_json(const std::string& path,
                            const scoring::EvalReport& report,
                            double lambda_used,
                            const std::map<std::string, std::string>& config_echo);
void write_eval_report_csv(const std::string& path,
                           const scoring::EvalReport& report);

scoring::EvalReport read_eval_report_json(const std::string& path);

}  // namespace gazescore::report
