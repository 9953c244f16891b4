#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fogcache/csv.hpp"
#include "fogcache/geo.hpp"

namespace fogcache {

enum class Technology { k3G, kLTE, kWiFi, kNone };

enum class ContentCategory { YouTube, OnDemand, RealTime, Players, Weather, Maps, News, Sports, Other };

inline constexpr std::array kAllCategories = {
    ContentCategory::YouTube, ContentCategory::OnDemand, ContentCategory::RealTime,
    ContentCategory::Players, ContentCategory::Weather,  ContentCategory::Maps,
    ContentCategory::News,    ContentCategory::Sports,   ContentCategory::Other,
};

std::string_view to_string(ContentCategory category) noexcept;
std::optional<ContentCategory> parse_category(std::string_view text) noexcept;

// RealTime and Players content is never requested twice.
bool is_cacheable(ContentCategory category) noexcept;

std::string_view to_string(Technology technology) noexcept;
std::optional<Technology> parse_technology(std::string_view text) noexcept;

enum class MobilityClass { Static, Pedestrian, Vehicular };

std::string_view to_string(MobilityClass mobility) noexcept;

struct TraceRecord {
  std::string day;
  int hour = 0;
  std::string user_id;
  LatLon position;
  std::string operator_name;
  std::optional<std::string> cell_id;
  Technology technology = Technology::kNone;
  std::string app_class;
  std::uint64_t bytes_down = 0;
  std::uint64_t bytes_up = 0;
  // Parsed but unused by the analysis.
  std::string ssid;
  std::string bssid;

  friend bool operator==(const TraceRecord&, const TraceRecord&) = default;
};

// Column names for each record field. Empty names for optional fields mean
// "not present in this file".
struct TraceSchema {
  std::string day = "day";
  std::string hour = "hour";
  std::string user_id = "user_id";
  std::string lat = "lat";
  std::string lon = "lon";
  std::string operator_name = "operator";
  std::string cell_id = "cell_id";
  std::string technology = "technology";
  std::string app_class = "app_class";
  std::string bytes_down = "bytes_down";
  std::string bytes_up = "bytes_up";
  std::string ssid = "ssid";
  std::string bssid = "bssid";

  // Reads `field = column` lines; unknown fields are a ValidationError.
  static TraceSchema load(const std::filesystem::path& path);
};

// Streaming reader over a trace CSV. Malformed rows are skipped and counted;
// reaching end of file with more than `max_malformed_fraction` of the data
// rows malformed throws ValidationError.
class TraceReader {
 public:
  TraceReader(const std::filesystem::path& path, TraceSchema schema = {},
              double max_malformed_fraction = 0.5);

  std::optional<TraceRecord> next();

  std::size_t rows_read() const { return rows_; }
  std::size_t malformed_rows() const { return malformed_; }

 private:
  std::optional<TraceRecord> parse_row(const std::vector<std::string>& fields) const;

  csv::Reader reader_;
  TraceSchema schema_;
  double max_malformed_fraction_;
  std::size_t rows_ = 0;
  std::size_t malformed_ = 0;
  bool finished_ = false;

  struct Columns {
    int day = -1, hour = -1, user_id = -1, lat = -1, lon = -1, operator_name = -1, cell_id = -1,
        technology = -1, app_class = -1, bytes_down = -1, bytes_up = -1, ssid = -1, bssid = -1;
  } cols_;
  std::size_t header_width_ = 0;
};

struct TraceParseResult {
  std::vector<TraceRecord> records;
  std::size_t malformed_rows = 0;
  std::size_t total_rows = 0;
};

TraceParseResult parse_trace(const std::filesystem::path& path, const TraceSchema& schema = {});

// Writes records with the schema's column names, in the default field order.
void write_trace(const std::filesystem::path& path, std::span<const TraceRecord> records,
                 const TraceSchema& schema = {});

enum class MatchKind { Substring, Prefix };

struct CategoryRule {
  MatchKind kind = MatchKind::Substring;
  std::string pattern;  // stored upper-case
  ContentCategory category = ContentCategory::Other;
};

// Ordered rule list; the first matching rule wins and unmatched class names
// map to Other. Matching is case-insensitive.
class CategoryRules {
 public:
  explicit CategoryRules(std::vector<CategoryRule> rules);

  static CategoryRules defaults();
  // CSV of `match,pattern,category` with '#' comments.
  static CategoryRules load(const std::filesystem::path& path);

  ContentCategory map(std::string_view app_class) const;
  std::span<const CategoryRule> rules() const { return rules_; }

 private:
  std::vector<CategoryRule> rules_;
};

ContentCategory map_app_to_category(std::string_view app_class, const CategoryRules& rules);

struct MobilityThresholds {
  double static_km = 0.05;
  double vehicular_km = 5.0;
};

void validate(const MobilityThresholds& thresholds);

struct UserHourProfile {
  std::string user_id;
  std::string day;
  int hour = 0;
  std::vector<LatLon> positions;
  double distance_km = 0.0;
  MobilityClass mobility = MobilityClass::Static;
};

MobilityClass classify_distance(double distance_km, const MobilityThresholds& thresholds);

// Throws ValidationError for an empty position list or invalid thresholds.
MobilityClass classify_mobility(const UserHourProfile& profile,
                                const MobilityThresholds& thresholds = {});

// One profile per (user, day, hour), positions in record order, sorted by key.
std::vector<UserHourProfile> build_profiles(std::span<const TraceRecord> records,
                                            const MobilityThresholds& thresholds = {});

// Records whose (user, day, hour) bucket is vehicular, in input order.
std::vector<TraceRecord> filter_vehicular(std::span<const TraceRecord> records,
                                          const MobilityThresholds& thresholds = {});

}  // namespace fogcache
