#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "drivesim/renderer.hpp"

namespace drivesim {

// Frozen render fixtures over the bundled data: <name>.ppm in the golden directory.
struct GoldenCase {
  std::string name;
  std::function<BirdviewFrame()> render;
};

std::vector<GoldenCase> golden_cases(const std::filesystem::path& data_dir);
// Renders every case into out_dir; returns the written paths.
std::vector<std::filesystem::path> write_goldens(const std::filesystem::path& data_dir,
                                                 const std::filesystem::path& out_dir);

}  // namespace drivesim
