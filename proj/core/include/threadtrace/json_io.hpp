#pragma once

#include <optional>
#include <string>

#include "threadtrace/metrics.hpp"
#include "threadtrace/pipeline.hpp"
#include "threadtrace/spline.hpp"

namespace threadtrace {

// {"knots":[...],"cx":[[a,b,c,d],...],"cy":[[a,b,c,d],...],"n_points":int}
// n_points is the number of fitted points (== knots); an undetected thread is
// written with empty arrays and n_points 0.
std::string spline_to_json(const ThreadSpline& spline);
ThreadSpline spline_from_json(const std::string& text);

// Keys match the PipelineConfig field names. Unknown keys are rejected.
std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(const std::string& text, PipelineConfig base = {});

// {"psnr_db":float|"inf","ottp":{"overall":f,"needle_end":f,"tail_end":f}};
// psnr_db is null when no predicted map was supplied.
std::string metrics_to_json(std::optional<double> psnr_db, const OttpReport& report);

}  // namespace threadtrace
