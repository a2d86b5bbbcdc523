#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "dnf/grid.hpp"

namespace dnf {

// Self-describing binary snapshot container, magic "DNF1":
//   magic[4] | version u32 | n u32 | m u32 | cells[n] u32 | lo[n] f64 |
//   hi[n] f64 | N u32 | tau f64 | solver_tol f64 | meta_len u32 |
//   meta (JSON: potential selections) | payload ((N+1)*nodes*m f64,
//   little-endian, node-major row order) | fnv1a64 checksum of all bytes
//   after the magic.
inline constexpr char kTrajectoryMagic[4] = {'D', 'N', 'F', '1'};
inline constexpr std::uint32_t kTrajectoryVersion = 1;

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);

// Validates magic, version, declared sizes and the checksum trailer; throws
// io_error on any mismatch.
Trajectory read_trajectory(const std::filesystem::path& path);

std::uint64_t fnv1a64(const void* data, size_t len, std::uint64_t seed = 14695981039346656037ull);

// Checksum of an existing trajectory file's payload section (snapshot bytes
// only), for golden-file comparisons.
std::uint64_t trajectory_payload_checksum(const std::filesystem::path& path);

// Per-step solver log as JSON lines: {"k":..,"iterations":..,"residual":..,
// "functional":..}. Timing is deliberately excluded to keep bytes stable.
void write_step_reports(const std::filesystem::path& path, const Trajectory& traj);

}  // namespace dnf
