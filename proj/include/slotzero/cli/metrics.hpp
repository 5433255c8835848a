#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "slotzero/trainer/run.hpp"

namespace sz::cli {

inline constexpr const char* kMetricsHeader = "# slotzero metrics v1";
inline constexpr const char* kMetricsColumns =
    "kind,iteration,env_steps,loss_total,loss_reward,loss_policy,loss_value,loss_consistency,"
    "grad_norm,td_branch,sve_branch,eval_success,eval_return_mean,eval_return_std,faults";

std::string metrics_csv(const std::vector<trainer::MetricsRow>& rows);
std::vector<trainer::MetricsRow> parse_metrics_csv(const std::string& text);

void write_metrics(const std::filesystem::path& path, const std::vector<trainer::MetricsRow>& rows);
std::vector<trainer::MetricsRow> read_metrics(const std::filesystem::path& path);

}  // namespace sz::cli
