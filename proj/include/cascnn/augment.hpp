#pragma once

#include "cascnn/patch.hpp"

namespace cascnn {

/// Rotation/scaling ranges for oversampling. Angles in degrees, scales are
/// isotropic multipliers. Sampling is bilinear with edge-replicated fill.
struct AugmentParams {
    double angle_min_deg = 0.0;
    double angle_max_deg = 360.0;
    double scale_min = 0.85;
    double scale_max = 1.15;

    void validate() const;
    bool operator==(const AugmentParams&) const = default;
};

/// Rotates the patch about its center by `angle_deg`, then scales its content
/// by `scale` (>1 enlarges), resampling bilinearly with edge replication.
/// Label and scan_id are preserved; the copy gets lesion_id
/// "<base>~a<ordinal>" and augmented_from set to the non-augmented ancestor.
Patch augment_patch(const Patch& p, double angle_deg, double scale, int ordinal = 0);

}  // namespace cascnn
