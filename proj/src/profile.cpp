#include "dualbeam/profile.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dualbeam {

namespace {

void check_shape(int width, int height) {
  if (width < 2 || height < 2) {
    throw std::domain_error("image dimensions must be at least 2x2");
  }
}

void check_same_shape(const BinaryMask& a, const BinaryMask& b) {
  if (a.width != b.width || a.height != b.height) {
    throw std::domain_error("mask shapes do not match");
  }
}

}  // namespace

IntensityImage::IntensityImage(int width_, int height_, double pixel_pitch)
    : width(width_), height(height_), pixel_pitch_m(pixel_pitch) {
  check_shape(width, height);
  if (!(pixel_pitch_m > 0.0)) {
    throw std::domain_error("pixel pitch must be > 0");
  }
  values.assign(static_cast<std::size_t>(width) * height, 0.0);
}

long BinaryMask::popcount() const {
  return std::count(set.begin(), set.end(), std::uint8_t{1});
}

IntensityImage render_intensity(const AstigmaticBeam& beam, int width,
                                int height, double pixel_pitch_m) {
  IntensityImage img(width, height, pixel_pitch_m);
  const double cx = 0.5 * (width - 1);
  const double cy = 0.5 * (height - 1);
  for (int r = 0; r < height; ++r) {
    const double y = (r - cy) * pixel_pitch_m;
    for (int c = 0; c < width; ++c) {
      const double x = (c - cx) * pixel_pitch_m;
      img.at(r, c) = intensity_at(beam, x, y);
    }
  }
  return img;
}

BinaryMask illuminated_mask(const IntensityImage& img,
                            std::optional<NoiseStats> noise, double k) {
  check_shape(img.width, img.height);

  NoiseStats stats{};
  if (noise) {
    stats = *noise;
  } else {
    const int bw = std::max(1, static_cast<int>(std::floor(0.1 * img.width)));
    const int bh = std::max(1, static_cast<int>(std::floor(0.1 * img.height)));
    std::vector<double> frame;
    for (int r = 0; r < img.height; ++r) {
      for (int c = 0; c < img.width; ++c) {
        if (r < bh || r >= img.height - bh || c < bw || c >= img.width - bw) {
          frame.push_back(img.at(r, c));
        }
      }
    }
    if (frame.size() < 16) {
      throw std::domain_error("border frame too small to estimate noise");
    }
    double mean = 0.0;
    for (double v : frame) mean += v;
    mean /= static_cast<double>(frame.size());
    double ss = 0.0;
    for (double v : frame) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / static_cast<double>(frame.size() - 1));
    if (!(sd > 0.0)) {
      throw std::domain_error(
          "border frame is constant; supply noise stats explicitly");
    }
    stats = {mean, sd};
  }

  BinaryMask mask{img.width, img.height, {}};
  mask.set.resize(img.values.size());
  const double threshold = stats.mean + k * stats.sd;
  for (std::size_t i = 0; i < img.values.size(); ++i) {
    mask.set[i] = img.values[i] > threshold ? 1 : 0;
  }
  return mask;
}

double iou(const BinaryMask& a, const BinaryMask& b) {
  check_same_shape(a, b);
  long inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.set.size(); ++i) {
    const bool pa = a.set[i] != 0, pb = b.set[i] != 0;
    inter += pa && pb;
    uni += pa || pb;
  }
  return uni == 0 ? 0.0 : static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<double> cross_section(const IntensityImage& img, SectionAxis axis,
                                  int position) {
  if (axis == SectionAxis::horizontal) {
    if (position < 0 || position >= img.height) {
      throw std::domain_error("row index out of bounds");
    }
    std::vector<double> row(img.width);
    for (int c = 0; c < img.width; ++c) row[c] = img.at(position, c);
    return row;
  }
  if (position < 0 || position >= img.width) {
    throw std::domain_error("column index out of bounds");
  }
  std::vector<double> col(img.height);
  for (int r = 0; r < img.height; ++r) col[r] = img.at(r, position);
  return col;
}

IntensityImage read_pgm16(std::istream& is, double pixel_pitch_m) {
  std::string magic;
  is >> magic;
  if (magic != "P5") throw std::runtime_error("expected binary PGM (P5)");

  // Header tokens may be separated by whitespace and '#' comment lines.
  const auto next_int = [&]() {
    for (;;) {
      int ch = is.peek();
      if (ch == '#') {
        std::string comment;
        std::getline(is, comment);
      } else if (std::isspace(ch)) {
        is.get();
      } else {
        break;
      }
    }
    long v = -1;
    is >> v;
    if (!is || v < 0) throw std::runtime_error("malformed PGM header");
    return v;
  };

  const long width = next_int();
  const long height = next_int();
  const long maxval = next_int();
  if (maxval != 65535) {
    throw std::runtime_error("expected 16-bit PGM (maxval 65535)");
  }
  is.get();  // single whitespace byte after maxval

  IntensityImage img(static_cast<int>(width), static_cast<int>(height),
                     pixel_pitch_m);
  std::vector<unsigned char> raw(img.values.size() * 2);
  is.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(is.gcount()) != raw.size()) {
    throw std::runtime_error("truncated PGM pixel data");
  }
  for (std::size_t i = 0; i < img.values.size(); ++i) {
    img.values[i] = raw[2 * i] * 256.0 + raw[2 * i + 1];  // big-endian
  }
  return img;
}

void write_pgm16(const IntensityImage& img, std::ostream& os) {
  const double peak = *std::max_element(img.values.begin(), img.values.end());
  const double scale = peak > 0.0 ? 65535.0 / peak : 0.0;
  os << "P5\n" << img.width << " " << img.height << "\n65535\n";
  for (double v : img.values) {
    const auto q = static_cast<unsigned>(std::lround(v * scale));
    os.put(static_cast<char>((q >> 8) & 0xFF));
    os.put(static_cast<char>(q & 0xFF));
  }
}

IntensityImage read_text_matrix(std::istream& is, double pixel_pitch_m) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(is, line)) {
    std::istringstream ls(line);
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    if (row.empty()) continue;
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error("ragged rows in text matrix");
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < 2 || rows.front().size() < 2) {
    throw std::runtime_error("text matrix must be at least 2x2");
  }
  IntensityImage img(static_cast<int>(rows.front().size()),
                     static_cast<int>(rows.size()), pixel_pitch_m);
  for (int r = 0; r < img.height; ++r) {
    for (int c = 0; c < img.width; ++c) {
      const double v = rows[r][c];
      if (!(v >= 0.0) || !std::isfinite(v)) {
        throw std::runtime_error("image values must be finite and >= 0");
      }
      img.at(r, c) = v;
    }
  }
  return img;
}

void write_mask_pgm(const BinaryMask& mask, std::ostream& os) {
  os << "P5\n" << mask.width << " " << mask.height << "\n65535\n";
  for (std::uint8_t s : mask.set) {
    const unsigned q = s ? 65535u : 0u;
    os.put(static_cast<char>((q >> 8) & 0xFF));
    os.put(static_cast<char>(q & 0xFF));
  }
}

void write_section_csv(const std::vector<double>& section, std::ostream& os) {
  os << "index,value\n";
  char buf[64];
  for (std::size_t i = 0; i < section.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.12g\n", i, section[i]);
    os << buf;
  }
}

}  // namespace dualbeam
