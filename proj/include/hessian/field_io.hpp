#pragma once

// Binary field dumps.
//
// Layout (little endian), 64-byte header followed by row-major float64 values for
// every lattice node (exterior slots are written as NaN):
//   0..7    magic "HESSFLD1"
//   8..11   uint32 complex dimension n
//   12..15  uint32 number of real axes (2n)
//   16..31  uint32 node count per axis, 4 slots, unused slots are 1
//   32..39  float64 spacing h
//   40..47  float64 coordinate of the first node on every axis
//   48..63  zero
// A JSON sidecar "<path>.json" describes the domain.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hessian/domain.hpp"

namespace hessian {

struct FieldDump {
    std::uint32_t n = 0;
    std::uint32_t axes = 0;
    std::array<std::uint32_t, 4> counts{1, 1, 1, 1};
    double h = 0.0;
    double origin = 0.0;
    std::vector<double> values;
};

nlohmann::json domain_json(const GridDomain& g);

/// Writes the binary dump and, when `sidecar` is true, "<path>.json".
void write_field(const std::filesystem::path& path, const ScalarField& u, const nlohmann::json& extra = {},
                 bool sidecar = true);

/// Reads a dump; throws std::runtime_error on a bad magic or a truncated file.
FieldDump read_field(const std::filesystem::path& path);

}  // namespace hessian
