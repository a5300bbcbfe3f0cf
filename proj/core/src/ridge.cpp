#include "threadtrace/ridge.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace threadtrace {

void StegerParams::validate() const {
  if (!(sigma > 0.0)) throw ArgumentError("sigma must be positive");
  if (!(lower >= 0.0 && lower <= upper)) throw ArgumentError("thresholds must satisfy 0 <= lower <= upper");
}

double sigma_from_width(double w) {
  if (!(w > 0.0)) throw ArgumentError("thread width must be positive");
  return w / (2.0 * std::sqrt(3.0)) + 0.5;
}

namespace {

struct Kernels {
  int radius = 0;
  std::vector<double> smooth, first, second;  // index k + radius holds tap k
};

double gauss(double x, double sigma) {
  return std::exp(-0.5 * x * x / (sigma * sigma)) / (std::sqrt(2.0 * std::numbers::pi) * sigma);
}
double gauss_d1(double x, double sigma) { return -x / (sigma * sigma) * gauss(x, sigma); }
double gauss_cdf(double x, double sigma) { return 0.5 * std::erfc(-x / (sigma * std::numbers::sqrt2)); }

// Pixel-integrated Gaussian kernels: tap k averages the continuous kernel over
// [k - 1/2, k + 1/2], which stays accurate for sigma near 1.
Kernels make_kernels(double sigma) {
  Kernels k;
  k.radius = static_cast<int>(std::ceil(3.5 * sigma));
  const int n = 2 * k.radius + 1;
  k.smooth.resize(n);
  k.first.resize(n);
  k.second.resize(n);
  for (int i = -k.radius; i <= k.radius; ++i) {
    const double lo = i - 0.5, hi = i + 0.5;
    k.smooth[i + k.radius] = gauss_cdf(hi, sigma) - gauss_cdf(lo, sigma);
    k.first[i + k.radius] = gauss(hi, sigma) - gauss(lo, sigma);
    k.second[i + k.radius] = gauss_d1(hi, sigma) - gauss_d1(lo, sigma);
  }
  double sum = 0.0;
  for (double v : k.smooth) sum += v;
  for (double& v : k.smooth) v /= sum;
  double mean2 = 0.0;
  for (double v : k.second) mean2 += v;
  mean2 /= n;
  for (double& v : k.second) v -= mean2;
  return k;
}

int reflect(int i, int n) {
  if (n == 1) return 0;
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

// out(x) = sum_k kernel[k] * in(x - k) along rows.
void convolve_rows(const ScalarField& in, const std::vector<double>& kernel, int radius, ScalarField& out) {
  const int w = in.width();
  std::vector<double> padded(static_cast<std::size_t>(w + 2 * radius));
  for (int y = 0; y < in.height(); ++y) {
    for (int x = -radius; x < w + radius; ++x) padded[static_cast<std::size_t>(x + radius)] = in(reflect(x, w), y);
    for (int x = 0; x < w; ++x) {
      double acc = 0.0;
      for (int k = -radius; k <= radius; ++k) acc += kernel[static_cast<std::size_t>(k + radius)] * padded[static_cast<std::size_t>(x - k + radius)];
      out(x, y) = acc;
    }
  }
}

void convolve_cols(const ScalarField& in, const std::vector<double>& kernel, int radius, ScalarField& out) {
  const int w = in.width();
  const int h = in.height();
  std::vector<double> acc(static_cast<std::size_t>(w));
  for (int y = 0; y < h; ++y) {
    std::fill(acc.begin(), acc.end(), 0.0);
    for (int k = -radius; k <= radius; ++k) {
      const double c = kernel[static_cast<std::size_t>(k + radius)];
      const int sy = reflect(y - k, h);
      for (int x = 0; x < w; ++x) acc[static_cast<std::size_t>(x)] += c * in(x, sy);
    }
    for (int x = 0; x < w; ++x) out(x, y) = acc[static_cast<std::size_t>(x)];
  }
}

}  // namespace

DerivativeImages gaussian_derivatives(const ScalarField& field, double sigma) {
  const Kernels k = make_kernels(sigma);
  const int w = field.width(), h = field.height();
  ScalarField r0(w, h), r1(w, h), r2(w, h);
  convolve_rows(field, k.smooth, k.radius, r0);
  convolve_rows(field, k.first, k.radius, r1);
  convolve_rows(field, k.second, k.radius, r2);
  DerivativeImages d{ScalarField(w, h), ScalarField(w, h), ScalarField(w, h), ScalarField(w, h), ScalarField(w, h)};
  convolve_cols(r1, k.smooth, k.radius, d.rx);
  convolve_cols(r0, k.first, k.radius, d.ry);
  convolve_cols(r2, k.smooth, k.radius, d.rxx);
  convolve_cols(r1, k.first, k.radius, d.rxy);
  convolve_cols(r0, k.second, k.radius, d.ryy);
  return d;
}

LinePointSet extract_line_points(const ScalarField& gray, const StegerParams& params) {
  params.validate();
  if (gray.empty()) throw ArgumentError("empty input field");
  for (double v : gray.values()) {
    if (!std::isfinite(v)) throw InputError("input field contains non-finite values");
  }
  const int w = gray.width(), h = gray.height();
  LinePointSet out;
  out.width = w;
  out.height = h;

  const DerivativeImages d = gaussian_derivatives(gray, params.sigma);
  const double scale = params.sigma * params.sigma;

  // Per-pixel line analysis: Taylor offset to the extremum, tangent, response.
  struct Analysis {
    bool line = false;
    Vec2 offset;
    Vec2 tangent;
    double response = 0.0;
  };
  Raster<Analysis> cell(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double rxx = d.rxx(x, y), rxy = d.rxy(x, y), ryy = d.ryy(x, y);
      const double half_trace = 0.5 * (rxx + ryy);
      const double spread = std::hypot(0.5 * (rxx - ryy), rxy);
      const double lambda_hi = half_trace + spread;
      const double lambda_lo = half_trace - spread;
      // Bright lines: dominant eigenvalue must be the negative one.
      if (!(std::abs(lambda_lo) > std::abs(lambda_hi)) || !(lambda_lo < 0.0)) continue;
      const double response = -lambda_lo * scale;
      if (response < params.lower) continue;
      const double theta = 0.5 * std::atan2(2.0 * rxy, rxx - ryy);
      const Vec2 normal{-std::sin(theta), std::cos(theta)};  // eigenvector of lambda_lo
      const double t = -(d.rx(x, y) * normal.x + d.ry(x, y) * normal.y) / lambda_lo;
      Vec2 tangent{normal.y, -normal.x};
      if (tangent.y < 0.0 || (tangent.y == 0.0 && tangent.x < 0.0)) tangent = -1.0 * tangent;
      tangent = (1.0 / norm(tangent)) * tangent;
      cell(x, y) = {true, t * normal, tangent, response};
    }
  }

  auto inside = [](Vec2 o) { return std::abs(o.x) <= 0.5 && std::abs(o.y) <= 0.5; };
  auto step = [](double o) { return o > 0.5 ? 1 : (o < -0.5 ? -1 : 0); };
  auto extent = [](Vec2 o) { return std::max(std::abs(o.x), std::abs(o.y)); };

  // Candidate pass: one slot per pixel, index into `candidates` or -1.
  std::vector<LinePoint> candidates;
  Raster<int> slot(w, h, -1);
  auto add = [&](int x, int y, Vec2 offset, const Analysis& a) {
    const Vec2 pos{x + offset.x, y + offset.y};
    if (pos.x < 0.0 || pos.y < 0.0 || pos.x > w - 1 || pos.y > h - 1) return;
    slot(x, y) = static_cast<int>(candidates.size());
    candidates.push_back({pos, a.tangent, a.response, std::clamp(sample_bilinear(gray, pos), 0.0, 1.0)});
  };
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const Analysis& a = cell(x, y);
      if (!a.line) continue;
      if (inside(a.offset)) {
        add(x, y, a.offset, a);
        continue;
      }
      // The first-order step overshoots slightly, so an extremum on the border
      // of two pixels can be pushed out of both. When two neighbors point at
      // each other, keep one point at the mean of their estimates.
      if (extent(a.offset) > 1.0) continue;
      const int qx = x + step(a.offset.x), qy = y + step(a.offset.y);
      if (!cell.contains(qx, qy)) continue;
      const Analysis& b = cell(qx, qy);
      if (!b.line || inside(b.offset) || extent(b.offset) > 1.0) continue;
      if (qx + step(b.offset.x) != x || qy + step(b.offset.y) != y) continue;
      const bool mine = extent(a.offset) < extent(b.offset) ||
                        (extent(a.offset) == extent(b.offset) && (y < qy || (y == qy && x < qx)));
      if (!mine) continue;
      const Vec2 other{qx - x + b.offset.x, qy - y + b.offset.y};
      const Vec2 mean = 0.5 * (a.offset + other);
      add(x, y, {std::clamp(mean.x, -0.5, 0.5), std::clamp(mean.y, -0.5, 0.5)}, a);
    }
  }

  // Hysteresis: grow from strong points through 8-connected weak ones.
  std::vector<char> accepted(candidates.size(), 0);
  std::vector<std::pair<int, int>> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const int idx = slot(x, y);
      if (idx < 0 || accepted[static_cast<std::size_t>(idx)] || candidates[static_cast<std::size_t>(idx)].response < params.upper) continue;
      accepted[static_cast<std::size_t>(idx)] = 1;
      stack.push_back({x, y});
      while (!stack.empty()) {
        const auto [cx, cy] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = cx + dx, ny = cy + dy;
            if (!slot.contains(nx, ny)) continue;
            const int n = slot(nx, ny);
            if (n < 0 || accepted[static_cast<std::size_t>(n)]) continue;
            accepted[static_cast<std::size_t>(n)] = 1;
            stack.push_back({nx, ny});
          }
        }
      }
    }
  }
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (accepted[i]) out.points.push_back(candidates[i]);
  }
  return out;
}

void resample_intensity(LinePointSet& set, const ScalarField& field) {
  for (LinePoint& p : set.points) p.intensity = std::clamp(sample_bilinear(field, p.position), 0.0, 1.0);
}

void resample_intensity(LinePointSet& set, const ScalarField& field, const ScalarField& weight) {
  if (!field.same_shape(weight)) throw ArgumentError("field and weight differ in size");
  for (LinePoint& p : set.points) {
    const int x0 = std::clamp(static_cast<int>(std::floor(p.position.x)), 0, field.width() - 1);
    const int y0 = std::clamp(static_cast<int>(std::floor(p.position.y)), 0, field.height() - 1);
    const double fx = p.position.x - x0, fy = p.position.y - y0;
    double best = 0.0;
    p.intensity = 0.0;
    for (int dy = 0; dy <= 1; ++dy) {
      for (int dx = 0; dx <= 1; ++dx) {
        const int x = x0 + dx, y = y0 + dy;
        if (!weight.contains(x, y)) continue;
        const double score = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) * weight(x, y);
        if (score > best) {
          best = score;
          p.intensity = std::clamp(field(x, y) / weight(x, y), 0.0, 1.0);
        }
      }
    }
  }
}

}  // namespace threadtrace
