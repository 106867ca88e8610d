#pragma once

// File formats: binary PGM frames, the tracker result CSV, bare x,y,w,h
// ground-truth lines and a plain-text matrix dump.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ios>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ast/appearance.hpp"
#include "ast/bag.hpp"
#include "ast/error.hpp"
#include "ast/numerics.hpp"
#include "ast/tracker.hpp"

namespace ast {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// PGM

namespace detail {

// Reads one header token, skipping whitespace and '#' comments.
inline std::string pgm_token(std::istream& in) {
  std::string tok;
  int c;
  while ((c = in.get()) != EOF) {
    if (c == '#') {
      while ((c = in.get()) != EOF && c != '\n' && c != '\r') {}
      continue;
    }
    if (std::isspace(c)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(c));
  }
  return tok;
}

inline int parse_positive(const std::string& tok, const std::string& what, const std::string& file) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (ec != std::errc() || ptr != tok.data() + tok.size() || v <= 0) {
    throw FormatError(file + ": bad PGM " + what + " '" + tok + "'");
  }
  return v;
}

}  // namespace detail

/// Decodes a binary (P5) PGM with maxval 255.
inline Frame read_pgm(std::istream& in, const std::string& name = "<stream>") {
  if (detail::pgm_token(in) != "P5") throw FormatError(name + ": not a binary PGM (magic P5)");
  const int w = detail::parse_positive(detail::pgm_token(in), "width", name);
  const int h = detail::parse_positive(detail::pgm_token(in), "height", name);
  const std::string maxval = detail::pgm_token(in);
  if (maxval != "255") throw FormatError(name + ": unsupported PGM maxval '" + maxval + "'");
  // pgm_token consumed exactly one whitespace byte after maxval.
  Frame f(w, h);
  in.read(reinterpret_cast<char*>(f.pixels.data()), static_cast<std::streamsize>(f.pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(f.pixels.size())) {
    throw FormatError(name + ": truncated PGM pixel data");
  }
  return f;
}

inline Frame read_pgm(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return read_pgm(in, path.string());
}

inline void write_pgm(std::ostream& out, const Frame& frame) {
  if (!frame.valid()) throw InvalidInput("write_pgm: frame is malformed");
  out << "P5\n" << frame.width << ' ' << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
}

inline void write_pgm(const fs::path& path, const Frame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  write_pgm(out, frame);
  if (!out) throw FormatError("write failed for " + path.string());
}

/// .pgm files of a directory in byte-wise name order.
inline std::vector<fs::path> list_frame_files(const fs::path& dir) {
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) throw FormatError("not a directory: " + dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.is_regular_file() && entry.path().extension() == ".pgm") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });
  if (files.empty()) throw FormatError("no .pgm files in " + dir.string());
  return files;
}

inline std::vector<Frame> load_frames(const fs::path& dir) {
  std::vector<Frame> frames;
  for (const fs::path& p : list_frame_files(dir)) {
    Frame f = read_pgm(p);
    if (!frames.empty() && (f.width != frames.front().width || f.height != frames.front().height)) {
      throw FormatError(p.string() + ": frame size differs from the first frame");
    }
    f.index = frames.size() + 1;
    frames.push_back(std::move(f));
  }
  return frames;
}

// ---------------------------------------------------------------------------
// Text helpers

namespace detail {

inline std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = line.find(sep, start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) {
  s = trim(s);
  if (s.empty()) return false;
  if constexpr (std::is_floating_point_v<T>) {
    // from_chars for double is available in libstdc++ 11+.
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
  } else {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
  }
}

inline std::string fixed6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Result CSV

inline constexpr std::string_view kRecordHeader = "frame,x,y,s,w,h,score";

inline void save_records(std::ostream& out, std::span<const TrackRecord> records) {
  out << kRecordHeader << '\n';
  for (const TrackRecord& r : records) {
    out << r.frame << ',' << detail::fixed6(r.x) << ',' << detail::fixed6(r.y) << ','
        << detail::fixed6(r.s) << ',' << r.w << ',' << r.h << ',' << detail::fixed6(r.score) << '\n';
  }
}

inline void save_records(const fs::path& path, std::span<const TrackRecord> records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  save_records(out, records);
  if (!out) throw FormatError("write failed for " + path.string());
}

inline std::vector<TrackRecord> load_records(std::istream& in) {
  std::string line;
  std::size_t lineno = 1;
  if (!std::getline(in, line) || detail::trim(line) != kRecordHeader) {
    throw ParseError("missing result header '" + std::string(kRecordHeader) + "'", lineno);
  }
  std::vector<TrackRecord> records;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line, ',');
    TrackRecord r;
    if (f.size() != 7 || !detail::parse_number(f[0], r.frame) || !detail::parse_number(f[1], r.x) ||
        !detail::parse_number(f[2], r.y) || !detail::parse_number(f[3], r.s) ||
        !detail::parse_number(f[4], r.w) || !detail::parse_number(f[5], r.h) ||
        !detail::parse_number(f[6], r.score)) {
      throw ParseError("malformed result row", lineno);
    }
    records.push_back(r);
  }
  return records;
}

inline std::vector<TrackRecord> load_records(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return load_records(in);
}

// ---------------------------------------------------------------------------
// Ground truth: one "x,y,w,h" line per frame, no header.

struct GroundTruthBox {
  int x = 0;
  int y = 0;
  int w = 0;
  int h = 0;

  friend bool operator==(const GroundTruthBox&, const GroundTruthBox&) = default;
};

inline void save_ground_truth(std::ostream& out, std::span<const GroundTruthBox> boxes) {
  for (const auto& b : boxes) out << b.x << ',' << b.y << ',' << b.w << ',' << b.h << '\n';
}

inline void save_ground_truth(const fs::path& path, std::span<const GroundTruthBox> boxes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot write " + path.string());
  save_ground_truth(out, boxes);
}

inline std::vector<GroundTruthBox> load_ground_truth(std::istream& in) {
  std::vector<GroundTruthBox> boxes;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (detail::trim(line).empty()) continue;
    const auto f = detail::split(line, ',');
    GroundTruthBox b;
    if (f.size() != 4 || !detail::parse_number(f[0], b.x) || !detail::parse_number(f[1], b.y) ||
        !detail::parse_number(f[2], b.w) || !detail::parse_number(f[3], b.h) || b.w <= 0 || b.h <= 0) {
      throw ParseError("malformed ground-truth row", lineno);
    }
    boxes.push_back(b);
  }
  return boxes;
}

inline std::vector<GroundTruthBox> load_ground_truth(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return load_ground_truth(in);
}

// ---------------------------------------------------------------------------
// Matrix text: "rows cols" then one line per row, values in %.17g.

inline void write_matrix(std::ostream& out, const Matrix& m) {
  out << m.rows() << ' ' << m.cols() << '\n';
  char buf[64];
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      std::snprintf(buf, sizeof buf, "%.17g", m(r, c));
      if (c) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

inline Matrix read_matrix(std::istream& in) {
  std::size_t rows = 0;
  std::size_t cols = 0;
  if (!(in >> rows >> cols)) throw FormatError("matrix header missing");
  std::vector<double> entries(rows * cols);
  for (double& v : entries) {
    std::string tok;
    if (!(in >> tok) || !detail::parse_number(tok, v)) throw FormatError("matrix entry missing or malformed");
  }
  return Matrix(rows, cols, std::move(entries));
}

/// One file per model (model_00.txt oldest): the origin as a D x 1 matrix
/// followed by the basis as a D x r matrix.
inline void dump_bag(const fs::path& dir, const ModelBag& bag) {
  fs::create_directories(dir);
  std::size_t i = 0;
  for (const AffineSubspace& m : bag.all_models()) {
    char name[32];
    std::snprintf(name, sizeof name, "model_%02zu.txt", i++);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) throw FormatError("cannot write " + (dir / name).string());
    write_matrix(out, Matrix(m.ambient_dim(), 1, m.origin()));
    write_matrix(out, m.basis());
  }
}

inline AffineSubspace read_model(std::istream& in) {
  Matrix origin = read_matrix(in);
  Matrix basis = read_matrix(in);
  if (origin.cols() != 1) throw FormatError("model origin must be a single column");
  return AffineSubspace(Vector(origin.data().begin(), origin.data().end()), LinearSubspace(std::move(basis)));
}

/// Copy of the frame with a one-pixel white rectangle at the record's box.
inline Frame draw_box(Frame frame, const TrackRecord& r) {
  const int x0 = static_cast<int>(std::lround(r.x));
  const int y0 = static_cast<int>(std::lround(r.y));
  const int x1 = x0 + r.w - 1;
  const int y1 = y0 + r.h - 1;
  auto put = [&](int x, int y) {
    if (x >= 0 && y >= 0 && x < frame.width && y < frame.height) frame.at(x, y) = 255;
  };
  for (int x = x0; x <= x1; ++x) {
    put(x, y0);
    put(x, y1);
  }
  for (int y = y0; y <= y1; ++y) {
    put(x0, y);
    put(x1, y);
  }
  return frame;
}

}  // namespace ast
