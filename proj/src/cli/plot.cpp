#include "slotzero/cli/plot.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace sz::cli {

namespace {

struct Series {
  std::vector<double> x, y;
};

constexpr double kWidth = 640, kPanel = 240, kLeft = 60, kRight = 20, kTop = 30, kGap = 50;

std::string f2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string g4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

void panel(std::ostringstream& svg, const Series& s, double top, const std::string& title,
           const std::string& color, bool unit_range) {
  const double w = kWidth - kLeft - kRight;
  const double h = kPanel - 40;
  svg << "<g>\n<text x=\"" << kLeft << "\" y=\"" << f2(top - 8) << "\" font-size=\"13\">" << title
      << "</text>\n";
  svg << "<rect x=\"" << kLeft << "\" y=\"" << f2(top) << "\" width=\"" << f2(w) << "\" height=\""
      << f2(h) << "\" fill=\"none\" stroke=\"#999\"/>\n";
  if (s.x.empty()) {
    svg << "<text x=\"" << f2(kLeft + 10) << "\" y=\"" << f2(top + 20)
        << "\" font-size=\"12\">no data</text>\n</g>\n";
    return;
  }
  double x0 = *std::min_element(s.x.begin(), s.x.end());
  double x1 = *std::max_element(s.x.begin(), s.x.end());
  double y0 = unit_range ? 0.0 : *std::min_element(s.y.begin(), s.y.end());
  double y1 = unit_range ? 1.0 : *std::max_element(s.y.begin(), s.y.end());
  if (x1 <= x0) x1 = x0 + 1.0;
  if (y1 <= y0) y1 = y0 + 1.0;
  auto px = [&](double x) { return kLeft + (x - x0) / (x1 - x0) * w; };
  auto py = [&](double y) { return top + h - (y - y0) / (y1 - y0) * h; };
  svg << "<text x=\"" << f2(kLeft - 5) << "\" y=\"" << f2(top + 10)
      << "\" font-size=\"10\" text-anchor=\"end\">" << g4(y1) << "</text>\n";
  svg << "<text x=\"" << f2(kLeft - 5) << "\" y=\"" << f2(top + h)
      << "\" font-size=\"10\" text-anchor=\"end\">" << g4(y0) << "</text>\n";
  svg << "<text x=\"" << f2(kLeft) << "\" y=\"" << f2(top + h + 14) << "\" font-size=\"10\">" << g4(x0)
      << "</text>\n";
  svg << "<text x=\"" << f2(kLeft + w) << "\" y=\"" << f2(top + h + 14)
      << "\" font-size=\"10\" text-anchor=\"end\">" << g4(x1) << " env steps</text>\n";
  svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < s.x.size(); ++i) svg << (i ? " " : "") << f2(px(s.x[i])) << ',' << f2(py(s.y[i]));
  svg << "\"/>\n";
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    svg << "<circle class=\"point\" cx=\"" << f2(px(s.x[i])) << "\" cy=\"" << f2(py(s.y[i]))
        << "\" r=\"2.5\" fill=\"" << color << "\"/>\n";
  }
  svg << "</g>\n";
}

}  // namespace

std::string render_learning_curve_svg(const std::vector<trainer::MetricsRow>& rows) {
  Series success, loss;
  for (const auto& r : rows) {
    auto& s = r.kind == trainer::RowKind::eval ? success : loss;
    s.x.push_back(static_cast<double>(r.env_steps));
    s.y.push_back(r.kind == trainer::RowKind::eval ? r.eval_success : r.loss_total);
  }
  const double height = kTop + 2 * kPanel + kGap;
  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << kWidth << ' ' << height << "\" font-family=\"sans-serif\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  panel(svg, success, kTop, "eval success rate", "#1f77b4", true);
  panel(svg, loss, kTop + kPanel + kGap, "training loss", "#d62728", false);
  svg << "</svg>\n";
  return svg.str();
}

std::string summary_table(const std::vector<trainer::MetricsRow>& rows) {
  const trainer::MetricsRow* last_eval = nullptr;
  const trainer::MetricsRow* last_train = nullptr;
  double best = 0.0;
  std::size_t evals = 0, trains = 0;
  for (const auto& r : rows) {
    if (r.kind == trainer::RowKind::eval) {
      last_eval = &r;
      best = std::max(best, r.eval_success);
      ++evals;
    } else {
      last_train = &r;
      ++trains;
    }
  }
  std::ostringstream out;
  auto line = [&](const std::string& k, const std::string& v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%-24s %s\n", k.c_str(), v.c_str());
    out << buf;
  };
  line("train rows", std::to_string(trains));
  line("eval rows", std::to_string(evals));
  if (last_eval != nullptr) {
    line("final env steps", std::to_string(last_eval->env_steps));
    line("final eval success", g4(last_eval->eval_success));
    line("best eval success", g4(best));
    line("final eval return", g4(last_eval->eval_return_mean) + " +/- " + g4(last_eval->eval_return_std));
  }
  if (last_train != nullptr) {
    line("final loss total", g4(last_train->loss_total));
    line("final loss reward", g4(last_train->loss_reward));
    line("final loss policy", g4(last_train->loss_policy));
    line("final loss value", g4(last_train->loss_value));
    line("final loss consistency", g4(last_train->loss_consistency));
  }
  const std::int64_t faults = rows.empty() ? 0 : rows.back().faults;
  line("faults", std::to_string(faults));
  return out.str();
}

}  // namespace sz::cli
