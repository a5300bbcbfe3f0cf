#include "threadtrace/ground_truth_io.hpp"

#include <json.hpp>

namespace threadtrace {

using nlohmann::json;

std::string ground_truth_to_json(const SceneGroundTruth& gt) {
  json doc;
  doc["width"] = gt.width;
  doc["height"] = gt.height;
  json control = json::array();
  for (const Vec2& p : gt.control_points) control.push_back({p.x, p.y});
  doc["control_points"] = std::move(control);
  json occluded = json::array();
  for (bool flag : gt.occluded) occluded.push_back(flag);
  doc["occluded"] = std::move(occluded);
  json centerline = json::array();
  for (const auto& sample : gt.centerline) centerline.push_back({sample.position.x, sample.position.y, sample.s});
  doc["centerline"] = std::move(centerline);
  return doc.dump();
}

namespace {

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw FormatError(std::string("ground truth: missing key '") + key + "'");
  return *it;
}

double number_at(const json& array, std::size_t i, const char* what) {
  if (i >= array.size() || !array[i].is_number()) {
    throw FormatError(std::string("ground truth: ") + what + " entries must be numeric tuples");
  }
  return array[i].get<double>();
}

}  // namespace

SceneGroundTruth ground_truth_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("ground truth: invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("ground truth: document must be an object");

  SceneGroundTruth gt;
  const json& width = require(doc, "width");
  const json& height = require(doc, "height");
  if (!width.is_number_integer() || !height.is_number_integer()) {
    throw FormatError("ground truth: width/height must be integers");
  }
  gt.width = width.get<int>();
  gt.height = height.get<int>();
  if (gt.width <= 0 || gt.height <= 0) throw FormatError("ground truth: width/height must be positive");

  for (const json& p : require(doc, "control_points")) {
    gt.control_points.push_back({number_at(p, 0, "control_points"), number_at(p, 1, "control_points")});
  }
  for (const json& flag : require(doc, "occluded")) {
    if (!flag.is_boolean()) throw FormatError("ground truth: occluded entries must be booleans");
    gt.occluded.push_back(flag.get<bool>());
  }
  if (gt.occluded.size() != gt.control_points.size()) {
    throw FormatError("ground truth: occluded must have one flag per control point");
  }
  for (const json& c : require(doc, "centerline")) {
    CenterlineSample sample{{number_at(c, 0, "centerline"), number_at(c, 1, "centerline")},
                            number_at(c, 2, "centerline")};
    if (!gt.centerline.empty() && !(sample.s > gt.centerline.back().s)) {
      throw FormatError("ground truth: centerline parameters must be strictly increasing");
    }
    gt.centerline.push_back(sample);
  }
  return gt;
}

}  // namespace threadtrace
