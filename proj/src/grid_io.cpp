#include "ftc/grid_io.hpp"

#include "ftc/errors.hpp"
#include "ftc/text.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace ftc {

namespace {

constexpr std::string_view kMagic = "FTCGRID 1";

std::uint64_t to_little_endian(std::uint64_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  std::uint64_t r = 0;
  for (int b = 0; b < 8; ++b) r |= ((v >> (8 * b)) & 0xffu) << (8 * (7 - b));
  return r;
}

std::string format_integer_cell(double v) {
  if (std::isnan(v)) return "nan";
  return std::to_string(static_cast<long long>(std::llround(v)));
}

}  // namespace

std::string_view to_string(Payload p) {
  switch (p) {
    case Payload::csv:
      return "csv";
    case Payload::binary:
      return "binary";
    case Payload::integer:
      return "int";
  }
  return "csv";
}

Payload parse_payload(std::string_view name) {
  if (name == "csv") return Payload::csv;
  if (name == "binary") return Payload::binary;
  if (name == "int") return Payload::integer;
  throw ConfigError("unknown grid payload '" + std::string(name) + "'");
}

void write_grid(std::ostream& out, const FieldGrid& field, Payload payload) {
  out << kMagic << '\n';
  out << field.nx() << ' ' << field.ny() << '\n';
  const auto& b = field.bounds();
  out << format_real(b.x_min) << ' ' << format_real(b.x_max) << ' ' << format_real(b.y_min) << ' '
      << format_real(b.y_max) << '\n';
  for (const auto& [k, v] : field.meta) {
    if (k == "payload") continue;
    if (k.find('=') != std::string::npos || k.find('\n') != std::string::npos ||
        v.find('\n') != std::string::npos)
      throw ConfigError("metadata key/value not representable: " + k);
    out << k << '=' << v << '\n';
  }
  out << "payload=" << to_string(payload) << '\n';

  const auto values = field.values();
  if (payload == Payload::binary) {
    for (std::size_t k = 0; k < values.size(); ++k) {
      const double v = field.valid(k) ? values[k] : std::numeric_limits<double>::quiet_NaN();
      const std::uint64_t bits = to_little_endian(std::bit_cast<std::uint64_t>(v));
      char buf[8];
      std::memcpy(buf, &bits, 8);
      out.write(buf, 8);
    }
  } else {
    std::string line;
    for (int j = 0; j < field.ny(); ++j) {
      line.clear();
      for (int i = 0; i < field.nx(); ++i) {
        const auto k = field.index(i, j);
        const double v = field.valid(k) ? values[k] : std::numeric_limits<double>::quiet_NaN();
        if (i) line += ',';
        line += payload == Payload::integer ? format_integer_cell(v) : format_real(v);
      }
      line += '\n';
      out << line;
    }
  }
  if (!out) throw Error("failed writing grid");
}

void write_grid(const std::filesystem::path& path, const FieldGrid& field, Payload payload) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open '" + path.string() + "' for writing");
  write_grid(out, field, payload);
}

FieldGrid read_grid(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kMagic) throw ConfigError("not an FTCGRID file");
  int nx = 0, ny = 0;
  {
    if (!std::getline(in, line)) throw ConfigError("FTCGRID: missing dimensions");
    std::istringstream ss(line);
    if (!(ss >> nx >> ny)) throw ConfigError("FTCGRID: bad dimensions line");
  }
  Bounds b;
  {
    if (!std::getline(in, line)) throw ConfigError("FTCGRID: missing bounds");
    std::vector<double> v;
    for (const auto& tok : split(trim(line), ' '))
      if (!tok.empty()) v.push_back(parse_real(tok));
    if (v.size() != 4) throw ConfigError("FTCGRID: bounds line needs 4 numbers");
    b = {v[0], v[1], v[2], v[3]};
  }
  FieldGrid field(GridSpec{nx, ny, b});

  Payload payload = Payload::csv;
  std::string first_payload_line;
  bool have_line = false;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      first_payload_line = line;
      have_line = true;
      break;
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    field.meta[key] = value;
    if (key == "payload") {
      payload = parse_payload(trim(value));
      break;
    }
  }

  const std::size_t n = field.size();
  if (payload == Payload::binary) {
    for (std::size_t k = 0; k < n; ++k) {
      char buf[8];
      if (!in.read(buf, 8)) throw ConfigError("FTCGRID: truncated binary payload");
      std::uint64_t bits;
      std::memcpy(&bits, buf, 8);
      field.set(k, std::bit_cast<double>(to_little_endian(bits)));
    }
    return field;
  }

  std::size_t k = 0;
  auto consume = [&](const std::string& row) {
    if (trim(row).empty()) return;
    for (const auto& tok : split(row, ',')) {
      if (k >= n) throw ConfigError("FTCGRID: too many payload values");
      field.set(k++, parse_real(tok));
    }
  };
  if (have_line) consume(first_payload_line);
  while (k < n && std::getline(in, line)) consume(line);
  if (k != n)
    throw ConfigError("FTCGRID: expected " + std::to_string(n) + " values, got " +
                      std::to_string(k));
  return field;
}

FieldGrid read_grid(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  return read_grid(in);
}

}  // namespace ftc
