#include "threadtrace/json_io.hpp"

#include <cmath>
#include <json.hpp>

namespace threadtrace {

using nlohmann::json;

namespace {

json pieces_to_json(const std::vector<CubicPiece>& pieces) {
  json out = json::array();
  for (const CubicPiece& c : pieces) out.push_back({c[0], c[1], c[2], c[3]});
  return out;
}

std::vector<CubicPiece> pieces_from_json(const json& array, const char* key) {
  if (!array.is_array()) throw FormatError(std::string("spline: '") + key + "' must be an array");
  std::vector<CubicPiece> out;
  for (const json& row : array) {
    if (!row.is_array() || row.size() != 4) throw FormatError(std::string("spline: '") + key + "' rows need 4 coefficients");
    CubicPiece c{};
    for (std::size_t k = 0; k < 4; ++k) {
      if (!row[k].is_number()) throw FormatError("spline: coefficients must be numeric");
      c[k] = row[k].get<double>();
    }
    out.push_back(c);
  }
  return out;
}

json parse(const std::string& text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string(what) + ": invalid JSON: " + e.what());
  }
}

}  // namespace

std::string spline_to_json(const ThreadSpline& spline) {
  json doc;
  doc["knots"] = spline.knots();
  doc["cx"] = pieces_to_json(spline.coeffs_x());
  doc["cy"] = pieces_to_json(spline.coeffs_y());
  doc["n_points"] = spline.knots().size();
  return doc.dump();
}

ThreadSpline spline_from_json(const std::string& text) {
  const json doc = parse(text, "spline");
  for (const char* key : {"knots", "cx", "cy", "n_points"}) {
    if (!doc.contains(key)) throw FormatError(std::string("spline: missing key '") + key + "'");
  }
  if (!doc["knots"].is_array()) throw FormatError("spline: 'knots' must be an array");
  std::vector<double> knots;
  for (const json& k : doc["knots"]) {
    if (!k.is_number()) throw FormatError("spline: knots must be numeric");
    knots.push_back(k.get<double>());
  }
  if (knots.empty()) return ThreadSpline();
  try {
    return ThreadSpline(std::move(knots), pieces_from_json(doc["cx"], "cx"), pieces_from_json(doc["cy"], "cy"));
  } catch (const ArgumentError& e) {
    throw FormatError(std::string("spline: ") + e.what());
  }
}

std::string config_to_json(const PipelineConfig& cfg) {
  json doc;
  doc["w"] = cfg.w;
  doc["t_l"] = cfg.t_l;
  doc["t_u"] = cfg.t_u;
  doc["t_d"] = cfg.t_d;
  doc["t_v"] = cfg.t_v;
  doc["t_c"] = cfg.t_c;
  doc["mask_tolerance"] = cfg.mask_tolerance;
  doc["mask_threshold"] = cfg.mask_threshold;
  doc["smoothing"] = cfg.smoothing;
  doc["n_samples"] = cfg.n_samples;
  return doc.dump(2);
}

PipelineConfig config_from_json(const std::string& text, PipelineConfig base) {
  const json doc = parse(text, "config");
  if (!doc.is_object()) throw FormatError("config: document must be an object");
  for (const auto& [key, value] : doc.items()) {
    const bool integral = key == "t_c" || key == "n_samples";
    if (integral ? !value.is_number_integer() : !value.is_number()) {
      throw FormatError("config: '" + key + "' has the wrong type");
    }
    if (key == "w") base.w = value.get<double>();
    else if (key == "t_l") base.t_l = value.get<double>();
    else if (key == "t_u") base.t_u = value.get<double>();
    else if (key == "t_d") base.t_d = value.get<double>();
    else if (key == "t_v") base.t_v = value.get<double>();
    else if (key == "t_c") base.t_c = value.get<int>();
    else if (key == "mask_tolerance") base.mask_tolerance = value.get<double>();
    else if (key == "mask_threshold") base.mask_threshold = value.get<double>();
    else if (key == "smoothing") base.smoothing = value.get<double>();
    else if (key == "n_samples") base.n_samples = value.get<int>();
    else throw FormatError("config: unknown key '" + key + "'");
  }
  return base;
}

std::string metrics_to_json(std::optional<double> psnr_db, const OttpReport& report) {
  json doc;
  if (!psnr_db) {
    doc["psnr_db"] = nullptr;
  } else if (std::isinf(*psnr_db)) {
    doc["psnr_db"] = "inf";
  } else {
    doc["psnr_db"] = *psnr_db;
  }
  doc["ottp"] = {{"overall", report.overall}, {"needle_end", report.needle_end}, {"tail_end", report.tail_end}};
  return doc.dump();
}

}  // namespace threadtrace
