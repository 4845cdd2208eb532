// Illumination-profile analytics: rendering model intensity images, extracting
// illuminated masks against a noise floor, intersection-over-union overlap,
// and cross-section extraction. Images load from 16-bit binary PGM (P5) or
// whitespace-delimited text matrices.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dualbeam/beam.hpp"

namespace dualbeam {

struct IntensityImage {
  int width = 0;
  int height = 0;
  double pixel_pitch_m = 1.0;
  std::vector<double> values;  // row-major, non-negative

  IntensityImage() = default;
  IntensityImage(int width, int height, double pixel_pitch_m);

  double& at(int row, int col) { return values[row * width + col]; }
  double at(int row, int col) const { return values[row * width + col]; }
};

struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> set;  // row-major, 0/1

  long popcount() const;
};

/// Model intensity sampled at pixel centers, grid centered on the beam axis.
IntensityImage render_intensity(const AstigmaticBeam& beam, int width,
                                int height, double pixel_pitch_m);

struct NoiseStats {
  double mean;
  double sd;
};

/// Pixels brighter than noise_mean + k * noise_sd. When stats are omitted they
/// are estimated from the border frame (outer 10% of each dimension, at least
/// 16 pixels); a constant border makes the estimate impossible and throws.
BinaryMask illuminated_mask(const IntensityImage& img,
                            std::optional<NoiseStats> noise = {},
                            double k = 3.0);

/// |a AND b| / |a OR b|; 0 when both masks are empty.
double iou(const BinaryMask& a, const BinaryMask& b);

enum class SectionAxis { horizontal, vertical };

/// One row (horizontal) or column (vertical) of the image.
std::vector<double> cross_section(const IntensityImage& img, SectionAxis axis,
                                  int position);

// 16-bit big-endian binary PGM (P5, maxval 65535).
IntensityImage read_pgm16(std::istream& is, double pixel_pitch_m = 1.0);
void write_pgm16(const IntensityImage& img, std::ostream& os);

// Whitespace-delimited text matrix, one image row per line.
IntensityImage read_text_matrix(std::istream& is, double pixel_pitch_m = 1.0);

// Masks are written as P5 PGM with values 0/65535.
void write_mask_pgm(const BinaryMask& mask, std::ostream& os);

void write_section_csv(const std::vector<double>& section, std::ostream& os);

}  // namespace dualbeam
