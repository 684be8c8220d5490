#include "paycheck/rates.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "paycheck/errors.hpp"

namespace paycheck {

namespace {

std::string trim(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

double parse_number(const std::string& text, int line) {
  double v = 0.0;
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw DataError("value '" + text + "' is not a finite decimal", line);
  return v;
}

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

}  // namespace

YearMonth YearMonth::parse(const std::string& text) {
  const std::string t = trim(text);
  int year = 0;
  int month = 0;
  if (t.size() != 7 || t[4] != '-') throw DataError("date '" + text + "' is not YYYY-MM");
  auto r1 = std::from_chars(t.data(), t.data() + 4, year);
  auto r2 = std::from_chars(t.data() + 5, t.data() + 7, month);
  if (r1.ec != std::errc() || r1.ptr != t.data() + 4 || r2.ec != std::errc() ||
      r2.ptr != t.data() + 7 || month < 1 || month > 12)
    throw DataError("date '" + text + "' is not YYYY-MM");
  return {year, month};
}

std::string YearMonth::str() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d", year, month);
  return buf;
}

double RateSeries::at(YearMonth month) const {
  if (observations.empty() || month < first() || month > last())
    throw DataError("series '" + id + "' has no observation for " + month.str());
  return observations[static_cast<std::size_t>(month.index() - first().index())].annual_rate;
}

SeriesDescriptor load_descriptor(const std::filesystem::path& path) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(path));
  } catch (const nlohmann::json::exception& e) {
    throw DataError("descriptor " + path.string() + ": " + e.what());
  }
  SeriesDescriptor d;
  try {
    d.id = j.at("id").get<std::string>();
    d.file = j.at("file").get<std::string>();
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "annual_rate") {
      d.kind = SeriesDescriptor::ValueKind::kAnnualRate;
    } else if (kind == "index_level") {
      d.kind = SeriesDescriptor::ValueKind::kIndexLevel;
    } else {
      throw DataError("descriptor " + path.string() + ": unknown kind '" + kind + "'");
    }
    const std::string transform = j.value("transform", "none");
    if (transform == "none") {
      d.transform = SeriesDescriptor::Transform::kNone;
    } else if (transform == "yoy") {
      d.transform = SeriesDescriptor::Transform::kYearOverYear;
    } else if (transform == "mom") {
      d.transform = SeriesDescriptor::Transform::kMonthOverMonth;
    } else {
      throw DataError("descriptor " + path.string() + ": unknown transform '" + transform + "'");
    }
    d.scale = j.value("scale", 1.0);
    d.source = j.value("source", "");
  } catch (const nlohmann::json::exception& e) {
    throw DataError("descriptor " + path.string() + ": " + e.what());
  }
  if ((d.kind == SeriesDescriptor::ValueKind::kIndexLevel) ==
      (d.transform == SeriesDescriptor::Transform::kNone))
    throw DataError("descriptor " + path.string() +
                    ": index levels need a yoy or mom transform, annual rates need none");
  return d;
}

RateSeries parse_series(const std::string& csv_text, const SeriesDescriptor& descriptor) {
  std::istringstream in(csv_text);
  std::string line;
  int line_no = 0;
  if (!std::getline(in, line)) throw DataError("empty rate file", 1);
  ++line_no;
  {
    std::string header = trim(line);
    header.erase(std::remove(header.begin(), header.end(), ' '), header.end());
    if (header != "date,value") throw DataError("header must be 'date,value'", line_no);
  }

  struct Row {
    YearMonth month;
    double value;
    int line;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos || t.find(',', comma + 1) != std::string::npos)
      throw DataError("expected two comma-separated fields", line_no);
    YearMonth month;
    try {
      month = YearMonth::parse(t.substr(0, comma));
    } catch (const DataError& e) {
      throw DataError(e.what(), line_no);
    }
    rows.push_back({month, parse_number(trim(t.substr(comma + 1)), line_no), line_no});
  }
  if (rows.empty()) throw DataError("rate file has no observations", line_no);

  std::stable_sort(rows.begin(), rows.end(),
                   [](const Row& a, const Row& b) { return a.month < b.month; });
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].month == rows[i - 1].month)
      throw DataError("duplicate month " + rows[i].month.str(), rows[i].line);
    if (rows[i].month.index() != rows[i - 1].month.index() + 1)
      throw DataError("gap in series: missing month " + rows[i - 1].month.plus(1).str(),
                      rows[i].line);
  }

  RateSeries series;
  series.id = descriptor.id;
  series.source = descriptor.source;
  using T = SeriesDescriptor::Transform;
  const int lag = descriptor.transform == T::kYearOverYear     ? 12
                  : descriptor.transform == T::kMonthOverMonth ? 1
                                                               : 0;
  if (static_cast<int>(rows.size()) <= lag)
    throw DataError("series '" + descriptor.id + "' is too short for its transform");
  for (std::size_t i = static_cast<std::size_t>(lag); i < rows.size(); ++i) {
    double annual = 0.0;
    if (descriptor.transform == T::kNone) {
      annual = rows[i].value * descriptor.scale;
    } else {
      const double prev = rows[i - lag].value;
      if (!(prev > 0.0) || !(rows[i].value > 0.0))
        throw DataError("index levels must be positive", rows[i].line);
      const double ratio = rows[i].value / prev;
      annual = descriptor.transform == T::kYearOverYear ? ratio - 1.0 : std::pow(ratio, 12.0) - 1.0;
    }
    if (!(annual > -1.0)) throw DataError("annual rate must exceed -1", rows[i].line);
    series.observations.push_back({rows[i].month, annual});
  }
  return series;
}

RateSeries load_series(const std::filesystem::path& csv, const SeriesDescriptor& descriptor) {
  return parse_series(read_file(csv), descriptor);
}

std::string to_canonical_csv(const RateSeries& series) {
  std::string out = "date,value\n";
  for (const auto& o : series.observations) {
    out += o.month.str();
    out += ',';
    out += format_number(o.annual_rate);
    out += '\n';
  }
  return out;
}

std::map<std::string, RateSeries> load_rates_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw DataError("rates directory " + dir.string() + " not found");
  std::vector<std::filesystem::path> descriptors;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.path().extension() == ".json") descriptors.push_back(entry.path());
  std::sort(descriptors.begin(), descriptors.end());
  std::map<std::string, RateSeries> out;
  for (const auto& path : descriptors) {
    SeriesDescriptor d = load_descriptor(path);
    RateSeries s = load_series(path.parent_path() / d.file, d);
    if (!out.emplace(d.id, std::move(s)).second)
      throw DataError("duplicate series id '" + d.id + "' in " + dir.string());
  }
  if (out.empty()) throw DataError("no series descriptors in " + dir.string());
  return out;
}

std::pair<YearMonth, YearMonth> common_coverage(const std::map<std::string, RateSeries>& series) {
  if (series.empty()) throw DataError("no series supplied");
  YearMonth lo = series.begin()->second.first();
  YearMonth hi = series.begin()->second.last();
  for (const auto& [id, s] : series) {
    lo = std::max(lo, s.first());
    hi = std::min(hi, s.last());
  }
  if (hi < lo) throw DataError("series have no common coverage");
  return {lo, hi};
}

std::map<std::string, double> RateTrajectory::at(std::size_t month) const {
  std::map<std::string, double> out;
  for (const auto& [key, values] : monthly) out[key] = values.at(month);
  return out;
}

RateTrajectory window_at(const std::map<std::string, RateSeries>& series, YearMonth start,
                         int horizon) {
  if (horizon < 0) throw DataError("horizon must be nonnegative");
  RateTrajectory t;
  t.start = start;
  for (const auto& [id, s] : series) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(horizon) + 1);
    for (int m = 0; m <= horizon; ++m) v.push_back(monthly_rate(s.at(start.plus(m))));
    t.monthly.emplace(id, std::move(v));
  }
  return t;
}

std::vector<RateTrajectory> sample_windows(const std::map<std::string, RateSeries>& series,
                                           int horizon, int count, std::uint64_t seed) {
  if (count < 0) throw DataError("window count must be nonnegative");
  if (count == 0) return {};
  const auto [lo, hi] = common_coverage(series);
  const int last_start = hi.index() - horizon;
  if (last_start < lo.index())
    throw DataError("common coverage " + lo.str() + ".." + hi.str() + " is shorter than " +
                    std::to_string(horizon + 1) + " months");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(lo.index(), last_start);
  std::vector<RateTrajectory> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k)
    out.push_back(window_at(series, YearMonth::from_index(pick(rng)), horizon));
  return out;
}

std::vector<RateTrajectory> all_windows(const std::map<std::string, RateSeries>& series,
                                        int horizon) {
  const auto [lo, hi] = common_coverage(series);
  std::vector<RateTrajectory> out;
  for (int s = lo.index(); s + horizon <= hi.index(); ++s)
    out.push_back(window_at(series, YearMonth::from_index(s), horizon));
  if (out.empty())
    throw DataError("common coverage is shorter than " + std::to_string(horizon + 1) + " months");
  return out;
}

RateTrajectory with_plan_constants(const PlanConfig& plan, RateTrajectory window) {
  const std::size_t length =
      window.monthly.empty() ? static_cast<std::size_t>(plan.horizon_months) + 1 : window.length();
  auto put = [&](const std::string& key, double monthly) {
    auto [it, inserted] = window.monthly.emplace(key, std::vector<double>(length, monthly));
    if (!inserted) throw ConfigError("rate key '" + key + "' is defined twice");
  };
  for (const auto& g : plan.goals) {
    if (!is_stock(g.kind) || !g.rate_source.is_constant()) continue;
    put(rate_key(g), to_monthly(g.rate_source.annual_rate, plan.rate_convention,
                                g.kind == GoalKind::kDebt));
  }
  if (plan.inflation_source.is_constant())
    put(kInflationKey, to_monthly(plan.inflation_source.annual_rate, plan.rate_convention, false));
  return window;
}

RateTrajectory constant_trajectory(const PlanConfig& plan, int horizon) {
  if (horizon < 0) throw ConfigError("horizon must be nonnegative", "/horizon_months");
  for (std::size_t i = 0; i < plan.goals.size(); ++i)
    if (is_stock(plan.goals[i].kind) && !plan.goals[i].rate_source.is_constant())
      throw ConfigError("goal uses a rate series; constant rates required",
                        "/goals/" + std::to_string(i) + "/rate_source");
  if (!plan.inflation_source.is_constant())
    throw ConfigError("inflation uses a rate series; constant rates required", "/inflation_source");
  RateTrajectory empty;
  PlanConfig sized = plan;
  sized.horizon_months = horizon;
  return with_plan_constants(sized, std::move(empty));
}

}  // namespace paycheck
