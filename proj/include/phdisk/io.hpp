#pragma once

#include <filesystem>

#include "phdisk/grid.hpp"

namespace phdisk {

enum class FileFormat { phd1, csv };

// Format from the extension: ".csv" is CSV, anything else PHD1.
FileFormat format_for(const std::filesystem::path& path);

// PHD1: "PHD1", u32 n_r, u32 n_theta (little endian), then n_r * n_theta
// (re, im) float64 pairs row-major by radius. Masked nodes are written as NaN.
void write_phd1(const std::filesystem::path& path, const GridFunction& f);
void write_phd1(const std::filesystem::path& path, const BoundaryFunction& b);

// CSV with header "r,theta,re,im", one row per node.
void write_csv(const std::filesystem::path& path, const GridFunction& f);
void write_csv(const std::filesystem::path& path, const BoundaryFunction& b);

void write_grid_function(const std::filesystem::path& path, const GridFunction& f);
void write_boundary_function(const std::filesystem::path& path, const BoundaryFunction& b);

// Reads either format. Non-finite values come back masked. The unit-disk
// grid is rebuilt from the stored (or inferred) dimensions.
GridFunction read_grid_function(const std::filesystem::path& path);
// Accepts files with n_r = 1.
BoundaryFunction read_boundary_function(const std::filesystem::path& path);

struct Slice {
  enum class Kind { radius, angle } kind = Kind::radius;
  double value = 0.0;
};

// CSV "coordinate,re,im,abs,masked" along the circle r = value (coordinate
// theta) or the ray theta = value (coordinate r). The coordinate must be a
// grid node value.
void emit_slice(const GridFunction& f, const Slice& slice, const std::filesystem::path& path);

}  // namespace phdisk
