#include "neurobeat/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <tuple>

#include "neurobeat/error.hpp"

namespace neurobeat {

namespace {

std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);  // binary: keep "\n" endings everywhere
  if (!out) throw error(errc::io, "cannot write " + path.string());
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_real(const std::string& text, const std::filesystem::path& path, long line_no) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw error(errc::parse, path.string() + ":" + std::to_string(line_no) +
                                 ": expected a number, got '" + text + "'");
  }
}

long parse_count(const std::string& text, const std::filesystem::path& path, long line_no) {
  try {
    std::size_t used = 0;
    const long v = std::stol(text, &used);
    if (used != text.size() || v < 0) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw error(errc::parse, path.string() + ":" + std::to_string(line_no) +
                                 ": expected a non-negative integer, got '" + text + "'");
  }
}

std::string xml_escape(const std::string& text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

constexpr char kMetricsHeader[] =
    "method,subject,song,tolerance_s,precision,recall,f_measure,n_ref,n_est,n_tp";

}  // namespace

void write_metrics_csv(std::vector<MetricsRow> rows, const std::filesystem::path& path) {
  std::sort(rows.begin(), rows.end(), [](const MetricsRow& a, const MetricsRow& b) {
    return std::tie(a.method, a.subject, a.song, a.tolerance_s) <
           std::tie(b.method, b.subject, b.song, b.tolerance_s);
  });
  std::ofstream out = open_out(path);
  out << kMetricsHeader << "\n";
  for (const MetricsRow& r : rows) {
    out << r.method << ',' << r.subject << ',' << r.song << ',' << fixed6(r.tolerance_s) << ','
        << fixed6(r.metrics.precision) << ',' << fixed6(r.metrics.recall) << ','
        << fixed6(r.metrics.f_measure) << ',' << r.metrics.n_ref << ',' << r.metrics.n_est << ','
        << r.metrics.n_tp << "\n";
  }
  if (!out) throw error(errc::io, "short write to " + path.string());
}

std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::io, "cannot open metrics CSV: " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kMetricsHeader) {
    throw error(errc::parse, path.string() + ": metrics CSV must start with '" +
                                 std::string(kMetricsHeader) + "'");
  }
  std::vector<MetricsRow> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 10) {
      throw error(errc::parse, path.string() + ":" + std::to_string(line_no) + ": expected 10 " +
                                   "fields, got " + std::to_string(f.size()));
    }
    MetricsRow r;
    r.method = f[0];
    r.subject = f[1];
    r.song = f[2];
    r.tolerance_s = parse_real(f[3], path, line_no);
    r.metrics.precision = parse_real(f[4], path, line_no);
    r.metrics.recall = parse_real(f[5], path, line_no);
    r.metrics.f_measure = parse_real(f[6], path, line_no);
    r.metrics.n_ref = parse_count(f[7], path, line_no);
    r.metrics.n_est = parse_count(f[8], path, line_no);
    r.metrics.n_tp = parse_count(f[9], path, line_no);
    rows.push_back(r);
  }
  return rows;
}

void write_loss_history_csv(const std::vector<std::vector<double>>& per_fold_losses,
                            const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << "fold,epoch,mean_loss\n";
  for (std::size_t fold = 0; fold < per_fold_losses.size(); ++fold) {
    for (std::size_t epoch = 0; epoch < per_fold_losses[fold].size(); ++epoch) {
      out << fold << ',' << epoch << ',' << fixed6(per_fold_losses[fold][epoch]) << "\n";
    }
  }
  if (!out) throw error(errc::io, "short write to " + path.string());
}

void write_summary_csv(std::vector<SummaryRow> rows, const std::filesystem::path& path) {
  std::sort(rows.begin(), rows.end(), [](const SummaryRow& a, const SummaryRow& b) {
    return std::tie(a.method, a.metric, a.tolerance_s) <
           std::tie(b.method, b.metric, b.tolerance_s);
  });
  std::ofstream out = open_out(path);
  out << "method,metric,tolerance_s,mean,stddev,min,q1,median,q3,max\n";
  for (const SummaryRow& r : rows) {
    out << r.method << ',' << r.metric << ',' << fixed6(r.tolerance_s) << ','
        << fixed6(r.summary.mean) << ',' << fixed6(r.summary.stddev) << ','
        << fixed6(r.summary.min) << ',' << fixed6(r.summary.q1) << ',' << fixed6(r.summary.median)
        << ',' << fixed6(r.summary.q3) << ',' << fixed6(r.summary.max) << "\n";
  }
  if (!out) throw error(errc::io, "short write to " + path.string());
}

std::string render_boxplot_svg(const std::map<std::string, std::vector<double>>& groups,
                               const std::string& metric_name) {
  if (groups.empty()) throw error(errc::empty_group, "render_boxplot_svg: no groups");
  for (const auto& [name, values] : groups) {
    if (values.empty()) {
      throw error(errc::empty_group, "render_boxplot_svg: group '" + name + "' is empty");
    }
  }

  struct Box {
    std::string name;
    ScoreSummary s;
    double lo_whisker{0.0};
    double hi_whisker{0.0};
    std::vector<double> outliers;
  };
  std::vector<Box> boxes;
  double data_lo = 0.0;
  double data_hi = 1.0;
  bool first = true;
  for (const auto& [name, values] : groups) {
    Box box;
    box.name = name;
    box.s = aggregate_subjects(values);
    const double iqr = box.s.q3 - box.s.q1;
    const double lo_fence = box.s.q1 - 1.5 * iqr;
    const double hi_fence = box.s.q3 + 1.5 * iqr;
    box.lo_whisker = box.s.q3;
    box.hi_whisker = box.s.q1;
    for (double v : values) {
      if (v < lo_fence || v > hi_fence) {
        box.outliers.push_back(v);
      } else {
        box.lo_whisker = std::min(box.lo_whisker, v);
        box.hi_whisker = std::max(box.hi_whisker, v);
      }
    }
    std::sort(box.outliers.begin(), box.outliers.end());
    if (first) {
      data_lo = box.s.min;
      data_hi = box.s.max;
      first = false;
    }
    data_lo = std::min(data_lo, box.s.min);
    data_hi = std::max(data_hi, box.s.max);
    boxes.push_back(std::move(box));
  }
  if (data_hi - data_lo < 1e-12) {
    data_lo -= 0.5;
    data_hi += 0.5;
  }
  const double pad = 0.05 * (data_hi - data_lo);
  data_lo -= pad;
  data_hi += pad;

  const double plot_top = 48.0;
  const double plot_bottom = 368.0;
  const double left = 72.0;
  const double slot = 120.0;
  const double box_w = 56.0;
  const double width = left + slot * static_cast<double>(boxes.size()) + 24.0;
  const double height = 420.0;
  const auto y_of = [&](double v) {
    return plot_bottom - (v - data_lo) / (data_hi - data_lo) * (plot_bottom - plot_top);
  };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fixed2(width) << "\" height=\""
      << fixed2(height) << "\" viewBox=\"0 0 " << fixed2(width) << " " << fixed2(height)
      << "\" font-family=\"sans-serif\" font-size=\"13\">\n";
  svg << "  <rect x=\"0\" y=\"0\" width=\"" << fixed2(width) << "\" height=\"" << fixed2(height)
      << "\" fill=\"white\"/>\n";
  svg << "  <text x=\"" << fixed2(width / 2.0)
      << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(metric_name)
      << "</text>\n";

  // y axis with five ticks
  svg << "  <line x1=\"" << fixed2(left - 16.0) << "\" y1=\"" << fixed2(plot_top) << "\" x2=\""
      << fixed2(left - 16.0) << "\" y2=\"" << fixed2(plot_bottom)
      << "\" stroke=\"black\" stroke-width=\"1\"/>\n";
  for (int tick = 0; tick <= 4; ++tick) {
    const double v = data_lo + (data_hi - data_lo) * static_cast<double>(tick) / 4.0;
    const double y = y_of(v);
    svg << "  <line x1=\"" << fixed2(left - 22.0) << "\" y1=\"" << fixed2(y) << "\" x2=\""
        << fixed2(left - 16.0) << "\" y2=\"" << fixed2(y) << "\" stroke=\"black\"/>\n";
    svg << "  <text x=\"" << fixed2(left - 26.0) << "\" y=\"" << fixed2(y + 4.0)
        << "\" text-anchor=\"end\">" << fixed2(v) << "</text>\n";
  }

  for (std::size_t b = 0; b < boxes.size(); ++b) {
    const Box& box = boxes[b];
    const double cx = left + slot * (static_cast<double>(b) + 0.5);
    const double x0 = cx - box_w / 2.0;
    const double y_q1 = y_of(box.s.q1);
    const double y_q3 = y_of(box.s.q3);
    const double y_med = y_of(box.s.median);
    const double y_lo = y_of(box.lo_whisker);
    const double y_hi = y_of(box.hi_whisker);

    svg << "  <line x1=\"" << fixed2(cx) << "\" y1=\"" << fixed2(y_lo) << "\" x2=\"" << fixed2(cx)
        << "\" y2=\"" << fixed2(y_q1) << "\" stroke=\"black\"/>\n";
    svg << "  <line x1=\"" << fixed2(cx) << "\" y1=\"" << fixed2(y_q3) << "\" x2=\"" << fixed2(cx)
        << "\" y2=\"" << fixed2(y_hi) << "\" stroke=\"black\"/>\n";
    for (double w : {box.lo_whisker, box.hi_whisker}) {
      svg << "  <line x1=\"" << fixed2(cx - box_w / 4.0) << "\" y1=\"" << fixed2(y_of(w))
          << "\" x2=\"" << fixed2(cx + box_w / 4.0) << "\" y2=\"" << fixed2(y_of(w))
          << "\" stroke=\"black\"/>\n";
    }
    svg << "  <rect class=\"box\" x=\"" << fixed2(x0) << "\" y=\"" << fixed2(y_q3) << "\" width=\""
        << fixed2(box_w) << "\" height=\"" << fixed2(y_q1 - y_q3)
        << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
    svg << "  <line x1=\"" << fixed2(x0) << "\" y1=\"" << fixed2(y_med) << "\" x2=\""
        << fixed2(x0 + box_w) << "\" y2=\"" << fixed2(y_med)
        << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
    for (double v : box.outliers) {
      svg << "  <circle cx=\"" << fixed2(cx) << "\" cy=\"" << fixed2(y_of(v))
          << "\" r=\"3\" fill=\"none\" stroke=\"black\"/>\n";
    }
    svg << "  <text x=\"" << fixed2(cx) << "\" y=\"" << fixed2(plot_bottom + 24.0)
        << "\" text-anchor=\"middle\">" << xml_escape(box.name) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace neurobeat
