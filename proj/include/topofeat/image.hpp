#pragma once

#include "topofeat/pointcloud.hpp"

#include <cstdint>
#include <filesystem>
#include <vector>

namespace topofeat {

// Grayscale raster, intensities normalized into [0,1].
struct GrayImage {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<double> data; // row-major
    int bit_depth_origin = 8; // 8 or 16

    double at(std::size_t row, std::size_t col) const { return data[row * width + col]; }
    double& at(std::size_t row, std::size_t col) { return data[row * width + col]; }
    std::size_t pixels() const { return width * height; }
};

struct BinaryMask {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> data; // row-major, values 0/1

    std::uint8_t at(std::size_t row, std::size_t col) const { return data[row * width + col]; }
    std::size_t count() const;
};

// Downsampled pixels below this are treated as zero when emitting points;
// half an 8-bit LSB so 16-bit noise does not spray spurious points.
inline constexpr double kNonzeroEps = 1.0 / 512.0;

// Reads PGM (P2/P5) or single-channel PNG, 8 or 16 bit. Intensities are
// scaled by the source's full-scale value into [0,1].
GrayImage load_gray(const std::filesystem::path& path);

// Mask of pixels with intensity >= the (1-fraction)-quantile; ties at the
// threshold are all included.
BinaryMask threshold_top_fraction(const GrayImage& img, double fraction);

// Block-average downsample to grid x grid, then one point per cell whose
// averaged value exceeds kNonzeroEps. Remainder pixels fold into the last
// block. Points sit at cell centers, coordinates in grid units.
PointCloud resize_pointcloud(const GrayImage& img, std::size_t grid);

// threshold_top_fraction, then 8-connected components of the mask; one point
// per component at its pixel centroid. Components smaller than min_area are
// discarded.
PointCloud contour_pointcloud(const GrayImage& img, double fraction, std::size_t min_area = 1);

// 8-connected component labeling. Returns per-pixel label (0 = background,
// components numbered from 1 in row-major discovery order) and the count.
struct ComponentLabels {
    std::vector<std::uint32_t> label;
    std::uint32_t count = 0;
};
ComponentLabels label_components_8(const BinaryMask& mask);

} // namespace topofeat
