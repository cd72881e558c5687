#pragma once

#include <string>

#include "cascnn/patch.hpp"

namespace cascnn {

/// Sidecar CSV path for a patchset file (path + ".csv").
std::string patchset_index_path(const std::string& path);

/// Writes the pixel file (magic "PSET", version, count, dims, then raw
/// little-endian f32 records) plus the sidecar index CSV with header
/// `record,scan_id,lesion_id,label,augmented_from`. Round-trips bit-exact.
void save_patchset(const CandidateSet& set, const std::string& path);

/// Loads both files. Throws FormatError (with a byte offset for the binary
/// file) on bad magic/version/truncation or when the sidecar row count does
/// not match the pixel record count.
CandidateSet load_patchset(const std::string& path);

}  // namespace cascnn
