#include "gazescore/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>

#include "gazescore/csv.hpp"
#include "gazescore/errors.hpp"

namespace gazescore::report {

using nlohmann::json;

namespace {

std::string fmt(double v, int decimals) {
  char buf[48];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  return buf;
}

// Round tick bounds outward to a tidy step.
struct Axis {
  double lo, hi, step;
};

Axis make_axis(double lo, double hi) {
  if (lo == hi) {
    lo -= 1;
    hi += 1;
  }
  const double span = hi - lo;
  const double raw_step = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw_step)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * m >= raw_step) {
      step = mag * m;
      break;
    }
  }
  return {std::floor(lo / step) * step, std::ceil(hi / step) * step, step};
}

}  // namespace

std::string svg_scatter(const std::vector<Point>& points,
                        const std::string& x_label, const std::string& y_label,
                        double r, std::optional<double> mae_value) {
  if (points.size() < 2) {
    throw DataError("scatter plot needs at least 2 points, got " +
                    std::to_string(points.size()));
  }
  const int width = 640, height = 480;
  const int ml = 70, mr = 25, mt = 30, mb = 55;

  double xlo = points[0].x, xhi = points[0].x;
  double ylo = points[0].y, yhi = points[0].y;
  for (const auto& p : points) {
    xlo = std::min(xlo, p.x);
    xhi = std::max(xhi, p.x);
    ylo = std::min(ylo, p.y);
    yhi = std::max(yhi, p.y);
  }
  const Axis xa = make_axis(xlo, xhi);
  const Axis ya = make_axis(ylo, yhi);

  auto sx = [&](double v) {
    return ml + (v - xa.lo) / (xa.hi - xa.lo) * (width - ml - mr);
  };
  auto sy = [&](double v) {
    return height - mb - (v - ya.lo) / (ya.hi - ya.lo) * (height - mt - mb);
  };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         std::to_string(width) + "\" height=\"" + std::to_string(height) +
         "\" viewBox=\"0 0 " + std::to_string(width) + " " +
         std::to_string(height) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // gridlines and tick labels
  for (double v = xa.lo; v <= xa.hi + xa.step / 2; v += xa.step) {
    const double x = sx(v);
    svg += "<line x1=\"" + fmt(x, 1) + "\" y1=\"" + std::to_string(mt) +
           "\" x2=\"" + fmt(x, 1) + "\" y2=\"" + std::to_string(height - mb) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + fmt(x, 1) + "\" y=\"" + std::to_string(height - mb + 18) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + format_double(v) +
           "</text>\n";
  }
  for (double v = ya.lo; v <= ya.hi + ya.step / 2; v += ya.step) {
    const double y = sy(v);
    svg += "<line x1=\"" + std::to_string(ml) + "\" y1=\"" + fmt(y, 1) +
           "\" x2=\"" + std::to_string(width - mr) + "\" y2=\"" + fmt(y, 1) +
           "\" stroke=\"#dddddd\"/>\n";
    svg += "<text x=\"" + std::to_string(ml - 8) + "\" y=\"" + fmt(y + 4, 1) +
           "\" font-size=\"11\" text-anchor=\"end\">" + format_double(v) +
           "</text>\n";
  }

  // axes
  svg += "<line x1='" + std::to_string(ml) + "' y1='" +
         std::to_string(height - mb) + "' x2='" + std::to_string(width - mr) +
         "' y2='" + std::to_string(height - mb) + "' stroke='black'/>\n";
  svg += "<line x1='" + std::to_string(ml) + "' y1='" + std::to_string(mt) +
         "' x2='" + std::to_string(ml) + "' y2='" + std::to_string(height - mb) +
         "' stroke='black'/>\n";

  for (const auto& p : points) {
    svg += "<circle cx=\"" + fmt(sx(p.x), 2) + "\" cy=\"" + fmt(sy(p.y), 2) +
           "\" r=\"4\" fill=\"#2266aa\" fill-opacity=\"0.7\"><title>" +
           p.participant_id + "</title></circle>\n";
  }

  svg += "<text x=\"" + std::to_string((ml + width - mr) / 2) + "\" y=\"" +
         std::to_string(height - 12) +
         "\" font-size=\"14\" text-anchor=\"middle\">" + x_label + "</text>\n";
  svg += "<text x=\"18\" y=\"" + std::to_string((mt + height - mb) / 2) +
         "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
         std::to_string((mt + height - mb) / 2) + ")\">" + y_label + "</text>\n";

  std::string annot = "r = " + fmt(r, 3) + " (n = " + std::to_string(points.size()) + ")";
  if (mae_value) annot += ", MAE = " + fmt(*mae_value, 2);
  svg += "<text x=\"" + std::to_string(width - mr - 6) + "\" y=\"" +
         std::to_string(mt + 16) + "\" font-size=\"13\" text-anchor=\"end\">" +
         annot + "</text>\n";
  svg += "</svg>\n";
  return svg;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << content;
}

void write_eval_report_json(const std::string& path,
                            const scoring::EvalReport& rep, double lambda_used,
                            const std::map<std::string, std::string>& config_echo) {
  json j;
  j["kind"] = "eval_report";
  if (rep.pearson_r) {
    j["pearson_r"] = *rep.pearson_r;
  } else {
    j["pearson_r"] = nullptr;
  }
  j["mae"] = rep.mae;
  j["n"] = rep.n;
  j["lambda"] = lambda_used;
  json cfg = json::object();
  for (const auto& [k, v] : config_echo) cfg[k] = v;
  j["config"] = cfg;
  json pairs = json::array();
  for (const auto& p : rep.pairs) {
    pairs.push_back({{"participant_id", p.participant_id},
                     {"true", p.truth},
                     {"predicted", p.predicted}});
  }
  j["pairs"] = pairs;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path + ": cannot open for writing");
  out << j.dump(2) << "\n";
}

void write_eval_report_csv(const std::string& path,
                           const scoring::EvalReport& rep) {
  CsvWriter out(path, {"participant_id", "true", "predicted"});
  for (const auto& p : rep.pairs) {
    out.row({p.participant_id, format_double(p.truth), format_double(p.predicted)});
  }
}

scoring::EvalReport read_eval_report_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError(path + ": cannot open");
  json j;
  in >> j;
  if (j.value("kind", "") != "eval_report") {
    throw DataError(path + ": not an eval report");
  }
  std::vector<scoring::EvalPair> pairs;
  for (const auto& e : j.at("pairs")) {
    pairs.push_back({e.at("participant_id").get<std::string>(),
                     e.at("true").get<double>(), e.at("predicted").get<double>()});
  }
  auto rep = scoring::eval_from_pairs(std::move(pairs));
  // verify the headline numbers reproduce from the stored pairs
  const double stored_mae = j.at("mae").get<double>();
  if (std::fabs(stored_mae - rep.mae) > 1e-9) {
    throw DataError(path + ": stored MAE " + format_double(stored_mae) +
                    " does not match pairs (" + format_double(rep.mae) + ")");
  }
  if (!j.at("pearson_r").is_null() && rep.pearson_r) {
    const double stored_r = j.at("pearson_r").get<double>();
    if (std::fabs(stored_r - *rep.pearson_r) > 1e-9) {
      throw DataError(path + ": stored r does not match pairs");
    }
  }
  return rep;
}

}  // namespace gazescore::report
