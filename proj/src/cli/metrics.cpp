#include "slotzero/cli/metrics.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace sz::cli {

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

std::string metrics_csv(const std::vector<trainer::MetricsRow>& rows) {
  std::ostringstream out;
  out << kMetricsHeader << "\n" << kMetricsColumns << "\n";
  for (const auto& r : rows) {
    out << (r.kind == trainer::RowKind::train ? "train" : "eval") << ',' << r.iteration << ','
        << r.env_steps << ',' << num(r.loss_total) << ',' << num(r.loss_reward) << ','
        << num(r.loss_policy) << ',' << num(r.loss_value) << ',' << num(r.loss_consistency) << ','
        << num(r.grad_norm) << ',' << r.td_branch << ',' << r.search_branch << ','
        << num(r.eval_success) << ',' << num(r.eval_return_mean) << ',' << num(r.eval_return_std)
        << ',' << r.faults << '\n';
  }
  return out.str();
}

std::vector<trainer::MetricsRow> parse_metrics_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<trainer::MetricsRow> rows;
  bool seen_columns = false;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    if (!seen_columns) {
      if (line != kMetricsColumns) {
        throw std::runtime_error("metrics: unexpected column header on line " + std::to_string(line_no));
      }
      seen_columns = true;
      continue;
    }
    const auto c = split(line);
    if (c.size() != 15) {
      throw std::runtime_error("metrics: line " + std::to_string(line_no) + " has " +
                               std::to_string(c.size()) + " fields, expected 15");
    }
    try {
      trainer::MetricsRow r;
      if (c[0] == "train") {
        r.kind = trainer::RowKind::train;
      } else if (c[0] == "eval") {
        r.kind = trainer::RowKind::eval;
      } else {
        throw std::invalid_argument("kind");
      }
      r.iteration = std::stoll(c[1]);
      r.env_steps = std::stoll(c[2]);
      r.loss_total = std::stod(c[3]);
      r.loss_reward = std::stod(c[4]);
      r.loss_policy = std::stod(c[5]);
      r.loss_value = std::stod(c[6]);
      r.loss_consistency = std::stod(c[7]);
      r.grad_norm = std::stod(c[8]);
      r.td_branch = std::stoll(c[9]);
      r.search_branch = std::stoll(c[10]);
      r.eval_success = std::stod(c[11]);
      r.eval_return_mean = std::stod(c[12]);
      r.eval_return_std = std::stod(c[13]);
      r.faults = std::stoll(c[14]);
      rows.push_back(r);
    } catch (const std::logic_error&) {
      throw std::runtime_error("metrics: malformed value on line " + std::to_string(line_no));
    }
  }
  if (!seen_columns) throw std::runtime_error("metrics: missing column header");
  return rows;
}

void write_metrics(const std::filesystem::path& path, const std::vector<trainer::MetricsRow>& rows) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("metrics: cannot write " + path.string());
  out << metrics_csv(rows);
}

std::vector<trainer::MetricsRow> read_metrics(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("metrics: cannot open " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_metrics_csv(text.str());
}

}  // namespace sz::cli
