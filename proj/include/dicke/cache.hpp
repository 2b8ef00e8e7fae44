// cache.hpp - binary snapshots of solved spectra
#pragma once

#include <cstdint>
#include <string>

#include "dicke/eigensolve.hpp"

namespace dicke {

inline constexpr std::uint32_t cache_format_version = 1;

// Writes the whole solution (all sectors, energies, stored vectors, tags) as a
// little-endian binary stream with a leading DCKE magic and a closing mark.
void save_solution(const std::string& path, const EigenSolution& sol);

// Reads a snapshot back; the displaced frame is rebuilt from the stored
// parameters. Throws std::runtime_error on damaged or foreign files.
EigenSolution load_solution(const std::string& path);

// True when the file exists and its header matches the request exactly.
// Truncation is not compared: any stable basis size qualifies.
bool cache_matches(const std::string& path, const ModelParams& p, BasisKind kind, double delta);

}  // namespace dicke
