#include "cascnn/augment.hpp"

#include <algorithm>
#include <cmath>

#include "cascnn/errors.hpp"

namespace cascnn {

void AugmentParams::validate() const {
    if (!(scale_min > 0.0) || !(scale_max > 0.0) || scale_min > scale_max)
        throw ConfigError("augment: scale range must satisfy 0 < min <= max");
    if (angle_min_deg > angle_max_deg) throw ConfigError("augment: angle range inverted");
}

Patch augment_patch(const Patch& p, double angle_deg, double scale, int ordinal) {
    if (!(scale > 0.0)) throw ConfigError("augment_patch: scale must be positive");

    const auto& shape = p.pixels.shape();
    const int c = shape[0], h = shape[1], w = shape[2];
    const double cy = (h - 1) * 0.5;
    const double cx = (w - 1) * 0.5;
    const double theta = angle_deg * 3.14159265358979323846 / 180.0;
    const double cs = std::cos(theta);
    const double sn = std::sin(theta);

    Tensor out({c, h, w});
    const float* src = p.pixels.data();
    float* dst = out.data();
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            // invert: un-scale, then un-rotate around the center
            const double ux = (x - cx) / scale;
            const double uy = (y - cy) / scale;
            const double sx = cs * ux + sn * uy + cx;
            const double sy = -sn * ux + cs * uy + cy;

            // bilinear with edge replication
            const int x0 = static_cast<int>(std::floor(sx));
            const int y0 = static_cast<int>(std::floor(sy));
            const double fx = sx - x0;
            const double fy = sy - y0;
            const auto clampx = [w](int v) { return std::clamp(v, 0, w - 1); };
            const auto clampy = [h](int v) { return std::clamp(v, 0, h - 1); };
            const int xa = clampx(x0), xb = clampx(x0 + 1);
            const int ya = clampy(y0), yb = clampy(y0 + 1);
            for (int ic = 0; ic < c; ++ic) {
                const float* plane = src + static_cast<std::size_t>(ic) * h * w;
                const double v00 = plane[ya * w + xa];
                const double v01 = plane[ya * w + xb];
                const double v10 = plane[yb * w + xa];
                const double v11 = plane[yb * w + xb];
                const double v = (1.0 - fy) * ((1.0 - fx) * v00 + fx * v01) +
                                 fy * ((1.0 - fx) * v10 + fx * v11);
                dst[(static_cast<std::size_t>(ic) * h + y) * w + x] = static_cast<float>(v);
            }
        }
    }

    Patch q;
    q.pixels = std::move(out);
    q.label = p.label;
    q.scan_id = p.scan_id;
    q.augmented_from = p.base_lesion_id();
    q.lesion_id = q.augmented_from + "~a" + std::to_string(ordinal);
    return q;
}

}  // namespace cascnn
