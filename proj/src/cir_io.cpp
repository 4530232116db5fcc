#include "uwbcap/cir_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string_view>

#include "uwbcap/errors.hpp"

namespace uwbcap {

namespace {

constexpr std::string_view kVersionTag = "#cirv1";

/// Parse one double starting at `pos` (0-based) in `line`; advances pos past
/// the number. Throws ParseError with 1-based coordinates on failure.
double parse_double(const std::string& line, std::size_t line_no, std::size_t& pos,
                    const char* what) {
  double value{};
  const char* begin = line.data() + pos;
  const char* end = line.data() + line.size();
  const auto result = std::from_chars(begin, end, value);
  if (result.ec != std::errc{} || !std::isfinite(value))
    throw ParseError(line_no, pos + 1, std::string("expected ") + what);
  pos = static_cast<std::size_t>(result.ptr - line.data());
  return value;
}

void expect_char(const std::string& line, std::size_t line_no, std::size_t& pos, char c) {
  if (pos >= line.size() || line[pos] != c)
    throw ParseError(line_no, pos + 1, std::string("expected '") + c + "'");
  ++pos;
}

void expect_literal(const std::string& line, std::size_t line_no, std::size_t& pos,
                    std::string_view literal) {
  if (line.compare(pos, literal.size(), literal) != 0)
    throw ParseError(line_no, pos + 1, "expected '" + std::string(literal) + "'");
  pos += literal.size();
}

void format_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

std::vector<CirRecord> load_cir_file(const std::string& path, double grid_step) {
  if (!(grid_step > 0)) throw Error("grid step must be positive");
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "' for reading");

  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) throw ParseError(1, 1, "empty file");
  ++line_no;
  if (line.rfind("#cir", 0) == 0 && line.rfind(kVersionTag, 0) != 0)
    throw UnsupportedVersion("unsupported CIR format version in '" + line.substr(0, 16) + "'");
  std::size_t pos = 0;
  expect_literal(line, line_no, pos, kVersionTag);
  expect_char(line, line_no, pos, ' ');
  expect_literal(line, line_no, pos, "ds=");
  const double spread = parse_double(line, line_no, pos, "delay spread");
  if (!(spread > 0)) throw ParseError(line_no, pos, "delay spread must be positive");
  expect_char(line, line_no, pos, ' ');
  expect_literal(line, line_no, pos, "n=");
  const double count_real = parse_double(line, line_no, pos, "record count");
  if (pos != line.size()) throw ParseError(line_no, pos + 1, "trailing characters");
  if (count_real < 0 || count_real != std::floor(count_real))
    throw ParseError(line_no, 1, "record count must be a nonnegative integer");
  const auto declared = static_cast<std::size_t>(count_real);

  // Grid points covering [0, spread); a tap at exactly the spread is pulled
  // onto the last in-range sample so every response stays strictly inside.
  auto support = static_cast<Eigen::Index>(std::floor(spread / grid_step)) + 1;
  if (static_cast<double>(support - 1) * grid_step >= spread * (1.0 - 1e-12)) --support;
  if (support < 1) support = 1;
  const double weight_scale = 1.0 / std::sqrt(grid_step);

  std::vector<CirRecord> records;
  CirRecord* current = nullptr;
  double last_time = -1.0;
  std::size_t record_header_line = 0;

  const auto finish_record = [&] {
    if (!current) return;
    const double raw = energy(current->response.signal);
    if (!(raw > 0))
      throw ParseError(record_header_line, 1, "record has zero energy");
    current->response.signal.samples /= std::sqrt(raw);
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    if (line[0] == '#') {
      pos = 0;
      expect_literal(line, line_no, pos, "#i=");
      const double idx = parse_double(line, line_no, pos, "record index");
      if (pos != line.size()) throw ParseError(line_no, pos + 1, "trailing characters");
      if (idx < 0 || idx != std::floor(idx))
        throw ParseError(line_no, 4, "record index must be a nonnegative integer");
      finish_record();
      CirRecord record;
      record.id = static_cast<std::uint64_t>(idx);
      record.response.signal.samples.setZero(support);
      record.response.signal.grid_step = grid_step;
      record.response.signal.t0 = 0.0;
      record.response.delay_spread = spread;
      record.meta = path;
      records.push_back(std::move(record));
      current = &records.back();
      last_time = -1.0;
      record_header_line = line_no;
      continue;
    }
    if (!current) throw ParseError(line_no, 1, "tap line before any record header");
    pos = 0;
    const double time = parse_double(line, line_no, pos, "tap time");
    expect_char(line, line_no, pos, ',');
    const double re = parse_double(line, line_no, pos, "tap real part");
    expect_char(line, line_no, pos, ',');
    const double im = parse_double(line, line_no, pos, "tap imaginary part");
    if (pos != line.size()) throw ParseError(line_no, pos + 1, "trailing characters");
    if (time < 0) throw ParseError(line_no, 1, "tap time is negative");
    if (time > spread) throw ParseError(line_no, 1, "tap time exceeds declared delay spread");
    if (time <= last_time) throw ParseError(line_no, 1, "tap times must be strictly increasing");
    last_time = time;

    auto index = static_cast<Eigen::Index>(std::llround(time / grid_step));
    index = std::min(index, support - 1);
    current->response.signal.samples[index] += std::complex<double>(re, im) * weight_scale;
  }
  finish_record();

  if (records.size() != declared)
    throw ParseError(line_no == 0 ? 1 : line_no, 1,
                     "file declares " + std::to_string(declared) + " records but contains " +
                         std::to_string(records.size()));
  return records;
}

void save_cir_file(const std::string& path, const std::vector<CirRecord>& records) {
  double spread = 0.0;
  if (!records.empty()) {
    spread = records.front().response.delay_spread;
    for (const auto& r : records)
      if (r.response.delay_spread != spread)
        throw Error("records in one CIR file must share a delay spread");
  }

  std::ofstream out(path, std::ios::binary);  // binary keeps LF on every platform
  if (!out) throw IoError("cannot open '" + path + "' for writing");

  std::string text;
  text += "#cirv1 ds=";
  format_double(text, spread);
  text += " n=";
  text += std::to_string(records.size());
  text += '\n';
  for (const auto& r : records) {
    text += "#i=";
    text += std::to_string(r.id);
    text += '\n';
    const auto& sig = r.response.signal;
    const double weight_scale = std::sqrt(sig.grid_step);
    for (Eigen::Index n = 0; n < sig.size(); ++n) {
      const auto v = sig.samples[n];
      if (v == std::complex<double>{}) continue;
      format_double(text, sig.time_at(n));
      text += ',';
      format_double(text, v.real() * weight_scale);
      text += ',';
      format_double(text, v.imag() * weight_scale);
      text += '\n';
    }
  }
  out << text;
  if (!out) throw IoError("write to '" + path + "' failed");
}

}  // namespace uwbcap
