#pragma once

// Grid specs, atomic file output and the worker pool used by the CLI.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace winter {

/// Parses a grid spec:
///   "v"                    one point
///   "v1,v2,..."            explicit list
///   "start:stop:count"     linear, endpoints included
///   "logspace:start:stop:count"  geometric between the two values
/// Each value is a number, "pi", or "<number>*pi". Throws DomainError.
std::vector<double> parse_grid(std::string_view spec);

/// Writes via a temporary sibling and rename, so readers never see a
/// partial file.
void write_atomic(const std::filesystem::path& path, const std::string& content);

/// Worker count: hardware concurrency capped by WINTER_THREADS when set.
int worker_count();

/// Runs body(i) for i in [0, n) on worker_count() threads. The first
/// exception thrown by any body is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace winter
