#include "fogcache/trace.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <tuple>

#include "fogcache/error.hpp"

namespace fogcache {

namespace {

std::string upper(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) ==
                  std::tolower(static_cast<unsigned char>(y));
         });
}

using BucketKey = std::tuple<std::string, std::string, int>;

BucketKey bucket_of(const TraceRecord& r) { return {r.user_id, r.day, r.hour}; }

const std::filesystem::path& existing_file(const std::filesystem::path& path) {
  if (!std::filesystem::is_regular_file(path)) throw IoError("trace file not found: " + path.string());
  return path;
}

}  // namespace

std::string_view to_string(ContentCategory category) noexcept {
  switch (category) {
    case ContentCategory::YouTube: return "YouTube";
    case ContentCategory::OnDemand: return "OnDemand";
    case ContentCategory::RealTime: return "RealTime";
    case ContentCategory::Players: return "Players";
    case ContentCategory::Weather: return "Weather";
    case ContentCategory::Maps: return "Maps";
    case ContentCategory::News: return "News";
    case ContentCategory::Sports: return "Sports";
    case ContentCategory::Other: return "Other";
  }
  return "Other";
}

std::optional<ContentCategory> parse_category(std::string_view text) noexcept {
  text = csv::trim(text);
  for (auto c : kAllCategories)
    if (iequals(text, to_string(c))) return c;
  // The original data calls weather "Meteo".
  if (iequals(text, "Meteo")) return ContentCategory::Weather;
  return std::nullopt;
}

bool is_cacheable(ContentCategory category) noexcept {
  return category != ContentCategory::RealTime && category != ContentCategory::Players;
}

std::string_view to_string(Technology technology) noexcept {
  switch (technology) {
    case Technology::k3G: return "3G";
    case Technology::kLTE: return "LTE";
    case Technology::kWiFi: return "WiFi";
    case Technology::kNone: return "None";
  }
  return "None";
}

std::optional<Technology> parse_technology(std::string_view text) noexcept {
  text = csv::trim(text);
  if (text.empty() || iequals(text, "None")) return Technology::kNone;
  if (iequals(text, "3G")) return Technology::k3G;
  if (iequals(text, "LTE") || iequals(text, "4G")) return Technology::kLTE;
  if (iequals(text, "WiFi") || iequals(text, "Wi-Fi")) return Technology::kWiFi;
  return std::nullopt;
}

std::string_view to_string(MobilityClass mobility) noexcept {
  switch (mobility) {
    case MobilityClass::Static: return "Static";
    case MobilityClass::Pedestrian: return "Pedestrian";
    case MobilityClass::Vehicular: return "Vehicular";
  }
  return "Static";
}

// ---------------------------------------------------------------------------
// Schema and reader

TraceSchema TraceSchema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema file " + path.string());
  TraceSchema schema;
  const std::map<std::string, std::string TraceSchema::*, std::less<>> fields = {
      {"day", &TraceSchema::day},
      {"hour", &TraceSchema::hour},
      {"user_id", &TraceSchema::user_id},
      {"lat", &TraceSchema::lat},
      {"lon", &TraceSchema::lon},
      {"operator", &TraceSchema::operator_name},
      {"cell_id", &TraceSchema::cell_id},
      {"technology", &TraceSchema::technology},
      {"app_class", &TraceSchema::app_class},
      {"bytes_down", &TraceSchema::bytes_down},
      {"bytes_up", &TraceSchema::bytes_up},
      {"ssid", &TraceSchema::ssid},
      {"bssid", &TraceSchema::bssid},
  };
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = csv::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos)
      throw ValidationError("schema line " + std::to_string(line_no) + ": expected field = column");
    const auto key = csv::trim(text.substr(0, eq));
    const auto value = csv::trim(text.substr(eq + 1));
    const auto it = fields.find(key);
    if (it == fields.end())
      throw ValidationError("schema line " + std::to_string(line_no) + ": unknown field '" +
                            std::string(key) + "'");
    schema.*(it->second) = std::string(value);
  }
  return schema;
}

TraceReader::TraceReader(const std::filesystem::path& path, TraceSchema schema,
                         double max_malformed_fraction)
    : reader_(existing_file(path)),
      schema_(std::move(schema)),
      max_malformed_fraction_(max_malformed_fraction) {
  auto header = reader_.next();
  if (!header) throw ValidationError("trace " + path.string() + " has no header row");
  header_width_ = header->size();

  auto locate = [&](const std::string& name, int& slot, bool required) {
    if (name.empty()) {
      if (required) throw ValidationError("schema leaves a required column unnamed");
      return;
    }
    for (std::size_t i = 0; i < header->size(); ++i) {
      if (csv::trim((*header)[i]) == name) {
        slot = static_cast<int>(i);
        return;
      }
    }
    if (required)
      throw ValidationError("trace " + path.string() + " is missing required column '" + name +
                            "'");
  };
  locate(schema_.day, cols_.day, true);
  locate(schema_.hour, cols_.hour, true);
  locate(schema_.user_id, cols_.user_id, true);
  locate(schema_.lat, cols_.lat, true);
  locate(schema_.lon, cols_.lon, true);
  locate(schema_.operator_name, cols_.operator_name, true);
  locate(schema_.app_class, cols_.app_class, true);
  locate(schema_.bytes_down, cols_.bytes_down, true);
  locate(schema_.cell_id, cols_.cell_id, false);
  locate(schema_.technology, cols_.technology, false);
  locate(schema_.bytes_up, cols_.bytes_up, false);
  locate(schema_.ssid, cols_.ssid, false);
  locate(schema_.bssid, cols_.bssid, false);
}

std::optional<TraceRecord> TraceReader::parse_row(const std::vector<std::string>& fields) const {
  if (fields.size() != header_width_) return std::nullopt;
  auto field = [&](int col) -> std::string_view {
    return col < 0 ? std::string_view{} : csv::trim(fields[static_cast<std::size_t>(col)]);
  };

  TraceRecord r;
  r.day = std::string(field(cols_.day));
  r.user_id = std::string(field(cols_.user_id));
  r.operator_name = std::string(field(cols_.operator_name));
  r.app_class = std::string(field(cols_.app_class));
  if (r.day.empty() || r.user_id.empty()) return std::nullopt;

  const auto hour = csv::parse_int(field(cols_.hour));
  const auto lat = csv::parse_double(field(cols_.lat));
  const auto lon = csv::parse_double(field(cols_.lon));
  const auto down = csv::parse_uint(field(cols_.bytes_down));
  if (!hour || !lat || !lon || !down) return std::nullopt;
  if (*hour < 0 || *hour > 23) return std::nullopt;
  r.hour = static_cast<int>(*hour);
  r.position = {*lat, *lon};
  if (!is_valid(r.position)) return std::nullopt;
  r.bytes_down = *down;

  if (cols_.bytes_up >= 0 && !field(cols_.bytes_up).empty()) {
    const auto up = csv::parse_uint(field(cols_.bytes_up));
    if (!up) return std::nullopt;
    r.bytes_up = *up;
  }
  if (cols_.cell_id >= 0 && !field(cols_.cell_id).empty())
    r.cell_id = std::string(field(cols_.cell_id));
  if (cols_.technology >= 0) {
    const auto tech = parse_technology(field(cols_.technology));
    if (!tech) return std::nullopt;
    r.technology = *tech;
  }
  r.ssid = std::string(field(cols_.ssid));
  r.bssid = std::string(field(cols_.bssid));
  return r;
}

std::optional<TraceRecord> TraceReader::next() {
  if (finished_) return std::nullopt;
  while (auto fields = reader_.next()) {
    ++rows_;
    if (auto record = parse_row(*fields)) return record;
    ++malformed_;
  }
  finished_ = true;
  if (rows_ > 0 &&
      static_cast<double>(malformed_) > max_malformed_fraction_ * static_cast<double>(rows_)) {
    throw ValidationError("trace aborted: " + std::to_string(malformed_) + " of " +
                          std::to_string(rows_) + " rows are malformed");
  }
  return std::nullopt;
}

TraceParseResult parse_trace(const std::filesystem::path& path, const TraceSchema& schema) {
  TraceReader reader(path, schema);
  TraceParseResult result;
  while (auto record = reader.next()) result.records.push_back(std::move(*record));
  result.malformed_rows = reader.malformed_rows();
  result.total_rows = reader.rows_read();
  return result;
}

void write_trace(const std::filesystem::path& path, std::span<const TraceRecord> records,
                 const TraceSchema& schema) {
  auto out = csv::open_output(path);
  out << csv::join({schema.day, schema.hour, schema.user_id, schema.lat, schema.lon,
                    schema.operator_name, schema.cell_id, schema.technology, schema.app_class,
                    schema.bytes_down, schema.bytes_up, schema.ssid, schema.bssid})
      << '\n';
  for (const auto& r : records) {
    out << csv::join({r.day, std::to_string(r.hour), r.user_id, csv::format_double(r.position.lat),
                      csv::format_double(r.position.lon), r.operator_name, r.cell_id.value_or(""),
                      std::string(to_string(r.technology)), r.app_class,
                      std::to_string(r.bytes_down), std::to_string(r.bytes_up), r.ssid, r.bssid})
        << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

// ---------------------------------------------------------------------------
// Categories

CategoryRules::CategoryRules(std::vector<CategoryRule> rules) : rules_(std::move(rules)) {
  if (rules_.empty()) throw ValidationError("category rule list is empty");
  for (auto& rule : rules_) {
    if (rule.pattern.empty()) throw ValidationError("category rule with empty pattern");
    rule.pattern = upper(rule.pattern);
  }
}

CategoryRules CategoryRules::defaults() {
  using C = ContentCategory;
  constexpr auto S = MatchKind::Substring;
  return CategoryRules({
      {S, "YOUTUBE", C::YouTube},     {S, "NETFLIX", C::OnDemand},
      {S, "TWC", C::OnDemand},        {S, "TIMEWARNER", C::OnDemand},
      {S, "SHOWTIME", C::OnDemand},   {S, "HULU", C::OnDemand},
      {S, "PERISCOPE", C::RealTime},  {S, "DIRECTV", C::RealTime},
      {S, "VLC", C::Players},         {S, "HTC.VIDEO", C::Players},
      {S, "VIDEOPLAYER", C::Players}, {S, "WEATHER", C::Weather},
      {S, "MAPS", C::Maps},           {S, "CNN", C::News},
      {S, "NBC", C::News},            {S, "NFL", C::Sports},
      {S, "FOXSPORTS", C::Sports},    {S, "ESPN", C::Sports},
  });
}

CategoryRules CategoryRules::load(const std::filesystem::path& path) {
  csv::Reader reader(path, /*skip_comments=*/true);
  std::vector<CategoryRule> rules;
  while (auto fields = reader.next()) {
    const auto where = path.string() + ":" + std::to_string(reader.line_number());
    if (fields->size() != 3) throw ValidationError(where + ": expected match,pattern,category");
    CategoryRule rule;
    const auto kind = csv::trim((*fields)[0]);
    if (iequals(kind, "substring")) {
      rule.kind = MatchKind::Substring;
    } else if (iequals(kind, "prefix")) {
      rule.kind = MatchKind::Prefix;
    } else {
      throw ValidationError(where + ": unknown match kind '" + std::string(kind) + "'");
    }
    rule.pattern = std::string(csv::trim((*fields)[1]));
    const auto category = parse_category((*fields)[2]);
    if (!category) throw ValidationError(where + ": unknown category '" + (*fields)[2] + "'");
    rule.category = *category;
    rules.push_back(std::move(rule));
  }
  return CategoryRules(std::move(rules));
}

ContentCategory CategoryRules::map(std::string_view app_class) const {
  const auto name = upper(app_class);
  for (const auto& rule : rules_) {
    const bool hit = rule.kind == MatchKind::Prefix ? name.starts_with(rule.pattern)
                                                    : name.find(rule.pattern) != std::string::npos;
    if (hit) return rule.category;
  }
  return ContentCategory::Other;
}

ContentCategory map_app_to_category(std::string_view app_class, const CategoryRules& rules) {
  return rules.map(app_class);
}

// ---------------------------------------------------------------------------
// Mobility

void validate(const MobilityThresholds& t) {
  if (!(t.static_km >= 0.0) || !(t.static_km < t.vehicular_km))
    throw ValidationError("mobility thresholds must satisfy 0 <= static_km < vehicular_km");
}

MobilityClass classify_distance(double distance_km, const MobilityThresholds& t) {
  if (distance_km > t.vehicular_km) return MobilityClass::Vehicular;
  if (distance_km <= t.static_km) return MobilityClass::Static;
  return MobilityClass::Pedestrian;
}

MobilityClass classify_mobility(const UserHourProfile& profile, const MobilityThresholds& t) {
  validate(t);
  if (profile.positions.empty())
    throw ValidationError("cannot classify mobility of " + profile.user_id +
                          ": empty position list");
  return classify_distance(profile.distance_km, t);
}

std::vector<UserHourProfile> build_profiles(std::span<const TraceRecord> records,
                                            const MobilityThresholds& t) {
  validate(t);
  std::map<BucketKey, std::vector<LatLon>> buckets;
  for (const auto& r : records) buckets[bucket_of(r)].push_back(r.position);

  std::vector<UserHourProfile> profiles;
  profiles.reserve(buckets.size());
  for (auto& [key, positions] : buckets) {
    UserHourProfile p;
    std::tie(p.user_id, p.day, p.hour) = key;
    p.positions = std::move(positions);
    p.distance_km = path_length_km(p.positions);
    p.mobility = classify_distance(p.distance_km, t);
    profiles.push_back(std::move(p));
  }
  return profiles;
}

std::vector<TraceRecord> filter_vehicular(std::span<const TraceRecord> records,
                                          const MobilityThresholds& t) {
  const auto profiles = build_profiles(records, t);
  std::map<BucketKey, MobilityClass> classes;
  for (const auto& p : profiles) classes.emplace(BucketKey{p.user_id, p.day, p.hour}, p.mobility);

  std::vector<TraceRecord> out;
  for (const auto& r : records)
    if (classes.at(bucket_of(r)) == MobilityClass::Vehicular) out.push_back(r);
  return out;
}

}  // namespace fogcache
