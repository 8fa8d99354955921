#pragma once

#include <filesystem>
#include <string>

#include "cenlad/core_model.hpp"

namespace cenlad {

/// Header `y,c,x1,...,xp`, one row per observation.
void write_dataset(const std::filesystem::path& path, const Dataset& data);
Dataset read_dataset(const std::filesystem::path& path);

/// Header `j,beta0`, j is 1-based. Only beta0 and its support round-trip.
void write_truth(const std::filesystem::path& path, const GroundTruth& truth);
GroundTruth read_truth(const std::filesystem::path& path);

/// Header `j,beta_hat`, preceded by a `# key=value ...` comment line.
void write_coefficients(const std::filesystem::path& path, const Vector& beta, const std::string& comment);

/// Shortest decimal form that parses back to exactly `v`.
std::string format_double(double v);

}  // namespace cenlad
