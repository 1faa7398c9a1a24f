#include "stereospoof/image_io.hpp"

#include <bit>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace stereospoof {

namespace {

// Skips netpbm whitespace and '#' comment lines, then reads one token.
std::string next_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  while (c != EOF && !std::isspace(c)) {
    tok.push_back(static_cast<char>(c));
    c = in.get();
  }
  return tok;
}

int parse_dim(const std::string& tok, const std::string& path, const char* what) {
  try {
    const int v = std::stoi(tok);
    if (v <= 0) throw std::invalid_argument("non-positive");
    return v;
  } catch (const std::exception&) {
    throw IoError(path + ": bad " + what + " in header");
  }
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open for reading: " + path);
  return in;
}

}  // namespace

void write_ppm(const std::string& path, const ImageRgb8& img) {
  auto out = open_out(path);
  out << "P6\n" << img.width << " " << img.height << "\n255\n";
  static_assert(sizeof(Rgb8) == 3);
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size() * 3));
  if (!out) throw IoError("write failed: " + path);
}

ImageRgb8 read_ppm(const std::string& path) {
  auto in = open_in(path);
  if (next_token(in) != "P6") throw IoError(path + ": not a binary PPM (P6)");
  const int w = parse_dim(next_token(in), path, "width");
  const int h = parse_dim(next_token(in), path, "height");
  if (next_token(in) != "255") throw IoError(path + ": unsupported maxval (need 255)");
  ImageRgb8 img(w, h);
  in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size() * 3));
  if (in.gcount() != static_cast<std::streamsize>(img.data.size() * 3)) {
    throw IoError(path + ": truncated pixel data");
  }
  return img;
}

void write_pgm(const std::string& path, const ImageGray8& img) {
  auto out = open_out(path);
  out << "P5\n" << img.width << " " << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()),
            static_cast<std::streamsize>(img.data.size()));
  if (!out) throw IoError("write failed: " + path);
}

ImageGray8 read_pgm(const std::string& path) {
  auto in = open_in(path);
  if (next_token(in) != "P5") throw IoError(path + ": not a binary PGM (P5)");
  const int w = parse_dim(next_token(in), path, "width");
  const int h = parse_dim(next_token(in), path, "height");
  if (next_token(in) != "255") throw IoError(path + ": unsupported maxval (need 255)");
  ImageGray8 img(w, h);
  in.read(reinterpret_cast<char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
  if (in.gcount() != static_cast<std::streamsize>(img.data.size())) {
    throw IoError(path + ": truncated pixel data");
  }
  return img;
}

void write_pfm(const std::string& path, const Plane<float>& img) {
  static_assert(std::endian::native == std::endian::little,
                "PFM writer assumes a little-endian host");
  auto out = open_out(path);
  out << "Pf\n" << img.width << " " << img.height << "\n-1.0\n";
  // Bottom-up scanline order.
  for (int y = img.height - 1; y >= 0; --y) {
    out.write(reinterpret_cast<const char*>(&img.at(0, y)),
              static_cast<std::streamsize>(sizeof(float) * img.width));
  }
  if (!out) throw IoError("write failed: " + path);
}

Plane<float> read_pfm(const std::string& path) {
  auto in = open_in(path);
  if (next_token(in) != "Pf") throw IoError(path + ": not a single-channel PFM (Pf)");
  const int w = parse_dim(next_token(in), path, "width");
  const int h = parse_dim(next_token(in), path, "height");
  double scale = 0.0;
  try {
    scale = std::stod(next_token(in));
  } catch (const std::exception&) {
    throw IoError(path + ": bad scale in header");
  }
  if (scale >= 0.0) throw IoError(path + ": big-endian PFM unsupported");
  Plane<float> img(w, h);
  for (int y = h - 1; y >= 0; --y) {
    in.read(reinterpret_cast<char*>(&img.at(0, y)), static_cast<std::streamsize>(sizeof(float) * w));
    if (in.gcount() != static_cast<std::streamsize>(sizeof(float) * w)) {
      throw IoError(path + ": truncated pixel data");
    }
  }
  return img;
}

void write_ply(const std::string& path, const std::vector<std::array<double, 3>>& points) {
  std::FILE* fp = std::fopen(path.c_str(), "w");
  if (!fp) throw IoError("cannot open for writing: " + path);
  std::fprintf(fp, "ply\nformat ascii 1.0\nelement vertex %zu\n", points.size());
  std::fprintf(fp, "property float x\nproperty float y\nproperty float z\nend_header\n");
  for (const auto& p : points) {
    std::fprintf(fp, "%g %g %g\n", p[0], p[1], p[2]);
  }
  if (std::ferror(fp)) {
    std::fclose(fp);
    throw IoError("write failed: " + path);
  }
  std::fclose(fp);
}

}  // namespace stereospoof
