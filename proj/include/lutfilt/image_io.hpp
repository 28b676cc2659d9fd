#pragma once

#include <string>
#include <vector>

#include "lutfilt/core.hpp"

namespace lutfilt {

// Binary PGM (P5), maxval 255. Comments and arbitrary whitespace in the
// header are tolerated on read.
Plane read_pgm(const std::string& path);
void write_pgm(const std::string& path, const Plane& p);

// Headerless row-major bytes; dimensions must be supplied on read.
Plane read_raw(const std::string& path, int width, int height);
void write_raw(const std::string& path, const Plane& p);

// Raw planar 8-bit 4:2:0, frame after frame. The frame count comes from the
// file length, which must divide evenly.
std::vector<Frame> read_yuv420(const std::string& path, int width, int height);
void write_yuv420(const std::string& path, const std::vector<Frame>& frames);

}  // namespace lutfilt
