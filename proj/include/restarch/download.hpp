#pragma once

#include <filesystem>
#include <vector>

#include "restarch/mapper.hpp"

namespace restarch {

/// Local path of a file element below `dir`: project, subject and
/// experiment ids as directories, then `level/id` pairs for anything
/// deeper, ending with the file name.
std::filesystem::path download_location(const std::filesystem::path& dir, const ResourcePath& file);

/// Drains `stream` on the calling thread and downloads every file element
/// with `workers` threads (at least one). Non-file elements are skipped.
/// The first failure is rethrown once all workers have stopped. Returns
/// the written paths, sorted.
std::vector<std::filesystem::path> download_all(ElementStream& stream, const std::filesystem::path& dir,
                                                unsigned workers);

}  // namespace restarch
