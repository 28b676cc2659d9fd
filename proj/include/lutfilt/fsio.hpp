#pragma once

#include <string>
#include <vector>

namespace lutfilt {

// Whole-file helpers. Writes go to a temp file in the same directory and are
// renamed into place, so a crash or error never leaves a partial target.
std::vector<unsigned char> read_file(const std::string& path);
void write_file_atomic(const std::string& path, const unsigned char* data, size_t size);
void write_file_atomic(const std::string& path, const std::vector<unsigned char>& data);

}  // namespace lutfilt
