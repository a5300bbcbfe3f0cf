#pragma once

#include <string>

#include "threadtrace/raster.hpp"

namespace threadtrace {

// {"width":int,"height":int,"control_points":[[x,y],...],"occluded":[bool,...],
//  "centerline":[[x,y,s],...]}. Raster fields are not part of the document.
std::string ground_truth_to_json(const SceneGroundTruth& gt);

/// Parses the geometry fields; raster members are left empty. Throws
/// FormatError on schema violations (including non-increasing s).
SceneGroundTruth ground_truth_from_json(const std::string& text);

}  // namespace threadtrace
