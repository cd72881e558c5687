#include "cascnn/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "cascnn/errors.hpp"
#include "cascnn/rng.hpp"

namespace cascnn {

void SyntheticConfig::validate() const {
    if (n_scans <= 0) throw ConfigError("synthetic: n_scans must be positive");
    if (positives_per_scan < 0 || negatives_per_scan < 0)
        throw ConfigError("synthetic: per-scan counts must be non-negative");
    if (!(hard_negative_fraction >= 0.0 && hard_negative_fraction <= 1.0))
        throw ConfigError("synthetic: hard_negative_fraction must be in [0,1]");
    if (!(noise_level > 0.0)) throw ConfigError("synthetic: noise_level must be positive");
    if (channels <= 0 || height <= 0 || width <= 0)
        throw ConfigError("synthetic: patch dimensions must be positive");
}

namespace {

constexpr double kBackground = 0.15;

// attenuation of the off-center slices relative to the middle one
double channel_weight(int c, int channels) {
    if (channels == 1) return 1.0;
    const double mid = (channels - 1) * 0.5;
    const double d = std::fabs(c - mid) / std::max(1.0, mid);
    return 1.0 - 0.4 * d;
}

Tensor noise_base(int c, int h, int w, double noise_level, Rng& rng) {
    Tensor t({c, h, w});
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double v = kBackground + noise_level * rng.normal();
        t[i] = static_cast<float>(std::clamp(v, 0.0, 1.0));
    }
    return t;
}

void add_blob(Tensor& t, double cx, double cy, double radius, double amplitude) {
    const int c = t.dim(0), h = t.dim(1), w = t.dim(2);
    const double sigma = radius * 0.5;
    const double inv = 1.0 / (2.0 * sigma * sigma);
    for (int ic = 0; ic < c; ++ic) {
        const double a = amplitude * channel_weight(ic, c);
        float* plane = t.data() + static_cast<std::size_t>(ic) * h * w;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
                const double v = plane[y * w + x] + a * std::exp(-d2 * inv);
                plane[y * w + x] = static_cast<float>(std::min(v, 1.0));
            }
    }
}

// bright ridge through (px,py) with direction angle, Gaussian cross-section
void add_line(Tensor& t, double px, double py, double angle, double thickness,
              double amplitude) {
    const int c = t.dim(0), h = t.dim(1), w = t.dim(2);
    const double nx = -std::sin(angle);
    const double ny = std::cos(angle);
    const double inv = 1.0 / (2.0 * thickness * thickness);
    for (int ic = 0; ic < c; ++ic) {
        const double a = amplitude * channel_weight(ic, c);
        float* plane = t.data() + static_cast<std::size_t>(ic) * h * w;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double dist = (x - px) * nx + (y - py) * ny;
                const double v = plane[y * w + x] + a * std::exp(-dist * dist * inv);
                plane[y * w + x] = static_cast<float>(std::min(v, 1.0));
            }
    }
}

// bright ring segment: distance to a circle of radius r around (cx,cy)
void add_arc(Tensor& t, double cx, double cy, double r, double thickness, double amplitude) {
    const int c = t.dim(0), h = t.dim(1), w = t.dim(2);
    const double inv = 1.0 / (2.0 * thickness * thickness);
    for (int ic = 0; ic < c; ++ic) {
        const double a = amplitude * channel_weight(ic, c);
        float* plane = t.data() + static_cast<std::size_t>(ic) * h * w;
        for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) {
                const double d = std::sqrt((x - cx) * (x - cx) + (y - cy) * (y - cy)) - r;
                const double v = plane[y * w + x] + a * std::exp(-d * d * inv);
                plane[y * w + x] = static_cast<float>(std::min(v, 1.0));
            }
    }
}

std::string zero_pad_id(const char* prefix, int n, int width) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%s%0*d", prefix, width, n);
    return buf;
}

}  // namespace

CandidateSet generate_synthetic(const SyntheticConfig& cfg) {
    cfg.validate();
    Rng rng(mix_seed(cfg.seed, 0x51));
    CandidateSet set;

    for (int s = 0; s < cfg.n_scans; ++s) {
        const std::string scan_id = zero_pad_id("scan", s, 4);

        for (int i = 0; i < cfg.positives_per_scan; ++i) {
            Patch p;
            p.pixels = noise_base(cfg.channels, cfg.height, cfg.width, cfg.noise_level, rng);
            const double cx = (cfg.width - 1) * 0.5 + rng.uniform(-6.0, 6.0);
            const double cy = (cfg.height - 1) * 0.5 + rng.uniform(-6.0, 6.0);
            const double radius = rng.uniform(4.0, 10.0);
            const double amplitude = rng.uniform(0.45, 0.75);
            add_blob(p.pixels, cx, cy, radius, amplitude);
            p.label = 1;
            p.scan_id = scan_id;
            p.lesion_id = scan_id + "_p" + std::to_string(i);
            set.add(std::move(p));
        }

        for (int j = 0; j < cfg.negatives_per_scan; ++j) {
            Patch p;
            p.pixels = noise_base(cfg.channels, cfg.height, cfg.width, cfg.noise_level, rng);
            if (rng.uniform() < cfg.hard_negative_fraction) {
                const double amplitude = rng.uniform(0.45, 0.75);
                const double thickness = rng.uniform(1.5, 3.5);
                if (rng.uniform() < 0.5) {
                    const double px = rng.uniform(8.0, cfg.width - 9.0);
                    const double py = rng.uniform(8.0, cfg.height - 9.0);
                    add_line(p.pixels, px, py, rng.uniform(0.0, 3.14159265358979323846),
                             thickness, amplitude);
                } else {
                    const double r = rng.uniform(12.0, 30.0);
                    const double cx = rng.uniform(0.0, static_cast<double>(cfg.width));
                    const double cy = rng.uniform(0.0, static_cast<double>(cfg.height));
                    add_arc(p.pixels, cx, cy, r, thickness, amplitude);
                }
            }
            p.label = 0;
            p.scan_id = scan_id;
            p.lesion_id = scan_id + "_n" + std::to_string(j);
            set.add(std::move(p));
        }
    }
    return set;
}

}  // namespace cascnn
