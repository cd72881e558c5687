#pragma once

#include <string>

#include "cascnn/network.hpp"

namespace cascnn {

/// Writes a network to a self-describing binary file: magic "CSNN",
/// format version u32, input shape, init seed, the layer-spec table, then
/// every parameter tensor as little-endian f32. Round-trips bit-exact.
void save_network(const Network& net, const std::string& path);

/// Reads a file written by save_network. Throws FormatError (with the byte
/// offset) on bad magic, unsupported version, or truncation.
Network load_network(const std::string& path);

}  // namespace cascnn
