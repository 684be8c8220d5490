#pragma once

// Historical monthly rate series and the horizon-length windows drawn from
// them for stochastic training.

#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "paycheck/goals.hpp"

namespace paycheck {

struct YearMonth {
  int year = 1970;
  int month = 1;  // 1..12

  // Months since year 0.
  int index() const { return year * 12 + (month - 1); }
  static YearMonth from_index(int index) { return {index / 12, index % 12 + 1}; }
  YearMonth plus(int months) const { return from_index(index() + months); }
  // "YYYY-MM"; throws DataError on anything else.
  static YearMonth parse(const std::string& text);
  std::string str() const;

  auto operator<=>(const YearMonth&) const = default;
};

struct RateObservation {
  YearMonth month;
  double annual_rate = 0.0;
};

struct RateSeries {
  std::string id;
  std::vector<RateObservation> observations;  // strictly increasing, gap-free
  std::string source;

  YearMonth first() const { return observations.front().month; }
  YearMonth last() const { return observations.back().month; }
  // Annual rate at `month`; throws DataError outside the covered range.
  double at(YearMonth month) const;
};

// Sidecar JSON describing how a CSV column becomes an annual rate.
struct SeriesDescriptor {
  enum class ValueKind { kAnnualRate, kIndexLevel };
  enum class Transform {
    kNone,
    kYearOverYear,    // level(t) / level(t-12) - 1
    kMonthOverMonth,  // (level(t) / level(t-1))^12 - 1
  };

  std::string id;
  std::string file;  // CSV path relative to the descriptor
  ValueKind kind = ValueKind::kAnnualRate;
  Transform transform = Transform::kNone;
  double scale = 1.0;  // applied to annual-rate values, e.g. 0.01 for percent quotes
  std::string source;
};

SeriesDescriptor load_descriptor(const std::filesystem::path& path);

// Parses a `date,value` CSV and applies the descriptor's transform. Rows may
// come in any order; duplicates and gaps are rejected.
RateSeries load_series(const std::filesystem::path& csv, const SeriesDescriptor& descriptor);
RateSeries parse_series(const std::string& csv_text, const SeriesDescriptor& descriptor);

// Annual-rate CSV with shortest round-trip number formatting.
std::string to_canonical_csv(const RateSeries& series);

// Loads every *.json descriptor in `dir`, keyed by series id.
std::map<std::string, RateSeries> load_rates_dir(const std::filesystem::path& dir);

// First and last month covered by every series.
std::pair<YearMonth, YearMonth> common_coverage(const std::map<std::string, RateSeries>& series);

struct RateTrajectory {
  std::optional<YearMonth> start;
  std::map<std::string, std::vector<double>> monthly;  // rate key -> months 0..T

  std::size_t length() const { return monthly.empty() ? 0 : monthly.begin()->second.size(); }
  std::map<std::string, double> at(std::size_t month) const;
};

// The aligned window starting at `start`, annual rates converted to monthly.
RateTrajectory window_at(const std::map<std::string, RateSeries>& series, YearMonth start,
                         int horizon);

// `count` windows with uniformly random start months over the common coverage.
std::vector<RateTrajectory> sample_windows(const std::map<std::string, RateSeries>& series,
                                           int horizon, int count, std::uint64_t seed);

// Every window of length horizon + 1 in the common coverage, in start order.
std::vector<RateTrajectory> all_windows(const std::map<std::string, RateSeries>& series,
                                        int horizon);

// Constant-source plan rates repeated for months 0..horizon. Throws
// ConfigError if the plan references a series.
RateTrajectory constant_trajectory(const PlanConfig& plan, int horizon);

// Adds the plan's constant-source columns to a series window.
RateTrajectory with_plan_constants(const PlanConfig& plan, RateTrajectory window);

}  // namespace paycheck
