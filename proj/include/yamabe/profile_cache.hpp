#pragma once

#include "yamabe/ground_state.hpp"

#include <filesystem>
#include <optional>

namespace yamabe {

/// Disk cache of ground-state profiles. Keys carry every solver setting that
/// shapes a profile, so changed tolerances or grids never reuse stale files.
/// Writes are atomic; a default-constructed cache is disabled and always
/// recomputes.
class ProfileCache {
  public:
    ProfileCache() = default;
    explicit ProfileCache(std::filesystem::path dir) : dir_(std::move(dir)) {}

    bool enabled() const { return !dir_.empty(); }
    const std::filesystem::path& dir() const { return dir_; }

    std::filesystem::path key_path(const ProblemDims& dims, bool unit_normalization,
                                   const ShootConfig& config) const;

    /// Loads the profile when a matching file exists, otherwise computes and
    /// stores it. Mismatched or unreadable files are silently recomputed.
    RadialProfile get_or_compute(const ProblemDims& dims, bool unit_normalization,
                                 const ShootConfig& config) const;

  private:
    std::filesystem::path dir_;
};

} // namespace yamabe
