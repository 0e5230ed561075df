#pragma once

// Wire formats. Streams, event logs and ground truth are JSON Lines (one
// UTF-8 JSON object per line); the common operating picture is a GeoJSON
// FeatureCollection; scenarios and noise settings are single JSON documents.
//
// Frame line:
//   {"frame_id":0,"timestamp_ms":0,"width":1920,"height":1080,
//    "geo":{"center_lat":..,"center_lon":..,"gsd_m_per_px":..,"heading_deg":..},
//    "features":{"altitude_m":..,"water_fraction":..,"clutter_score":..},
//    "context_logits":[z0,z1,z2,z3,z4],
//    "detections":[{"class":"person","bbox":[x,y,w,h],"confidence":0.9,"tile":3}]}
// geo, features, context_logits and tile are optional.

#include <cstddef>
#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fmvsense/events.hpp"
#include "fmvsense/model.hpp"
#include "fmvsense/simulator.hpp"

namespace fmv {

/// Parses and validates one frame line. Errors name the field.
FrameRecord parse_frame(std::string_view line);
/// One line, no trailing newline.
std::string serialize_frame(const FrameRecord& r);
/// Newline-terminated lines.
std::string serialize_stream(std::span<const FrameRecord> stream);

/// Incremental reader over a line-delimited stream. Blank lines are skipped.
/// Errors are ValidationErrors prefixed with "line N: ".
class StreamReader {
 public:
  explicit StreamReader(std::istream& in) : in_(in) {}
  std::optional<FrameRecord> next();
  std::size_t line_number() const { return line_; }

 private:
  std::istream& in_;
  std::size_t line_ = 0;
  std::optional<std::uint64_t> last_frame_;
};

std::vector<FrameRecord> parse_stream(std::string_view text);
std::vector<FrameRecord> load_stream(const std::filesystem::path& path);

std::string serialize_event(const Event& e);
Event parse_event(std::string_view line);
std::string export_events(std::span<const Event> events);
std::vector<Event> parse_events(std::string_view text);
/// GeoJSON FeatureCollection with one Point per geolocated event.
std::string export_cop(std::span<const Event> events);

std::string serialize_truth(std::span<const TruthRecord> truth);
std::vector<TruthRecord> parse_truth(std::string_view text);

Scenario parse_scenario(std::string_view json_text);
Scenario load_scenario(const std::filesystem::path& path);

NoiseParams parse_noise(std::string_view json_text);

}  // namespace fmv
