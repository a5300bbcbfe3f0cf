#include "threadtrace/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace threadtrace {

double psnr(const ScalarField& a, const ScalarField& b) {
  if (!a.same_shape(b)) throw ArgumentError("psnr: maps differ in size");
  if (a.empty()) throw ArgumentError("psnr: empty maps");
  auto va = a.values();
  auto vb = b.values();
  double sse = 0.0;
  for (std::size_t i = 0; i < va.size(); ++i) {
    const double d = va[i] - vb[i];
    sse += d * d;
  }
  const double mse = sse / static_cast<double>(va.size());
  if (mse == 0.0) return kInfinitePsnr;
  return 10.0 * std::log10(1.0 / mse);
}

double psnr(const GradientMap& a, const GradientMap& b) { return psnr(a.field(), b.field()); }

OttpReport ottp(std::span<const Vec2> predicted, std::span<const CenterlineSample> ground_truth) {
  if (predicted.empty() || ground_truth.empty()) throw ArgumentError("ottp: empty input");
  OttpReport report;
  double total = 0.0;
  for (const Vec2& p : predicted) {
    double best = std::numeric_limits<double>::infinity();
    for (const CenterlineSample& g : ground_truth) best = std::min(best, squared_distance(p, g.position));
    total += std::sqrt(best);
  }
  report.overall = total / static_cast<double>(predicted.size());
  const auto [lo, hi] = std::minmax_element(ground_truth.begin(), ground_truth.end(),
                                            [](const CenterlineSample& a, const CenterlineSample& b) { return a.s < b.s; });
  report.needle_end = distance(predicted.front(), lo->position);
  report.tail_end = distance(predicted.back(), hi->position);
  return report;
}

}  // namespace threadtrace
