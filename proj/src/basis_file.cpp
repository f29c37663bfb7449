#include "l1embed/basis_file.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

namespace l1embed {

namespace {

struct Dimensions {
  std::size_t blocks;
  std::size_t width;
  std::size_t dim;
};

Dimensions header_dimensions(const nlohmann::ordered_json& header) {
  try {
    if (header.at("version").get<int>() != 1) {
      throw FormatError("unsupported basis file version");
    }
    return Dimensions{header.at("n").get<std::size_t>(), header.at("B").get<std::size_t>(),
                      header.at("m").get<std::size_t>()};
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed basis header: ") + e.what());
  }
}

nlohmann::ordered_json parse_header(std::string_view line) {
  try {
    auto header = nlohmann::ordered_json::parse(line);
    if (!header.is_object()) throw FormatError("basis header is not a JSON object");
    return header;
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("basis header is not valid JSON: ") + e.what());
  }
}

SubspaceBasis make_basis(const Dimensions& d, Matrix columns) {
  try {
    return SubspaceBasis(BlockShape(d.blocks, d.width), std::move(columns));
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("basis header dimensions are invalid: ") + e.what());
  }
}

void check_header_matches(const BasisFile& file) {
  const Dimensions d = header_dimensions(file.header);
  const BlockShape& s = file.basis.shape();
  if (d.blocks != s.num_blocks() || d.width != s.block_width() || d.dim != file.basis.dim()) {
    throw FormatError("basis header dimensions do not match the basis");
  }
}

std::size_t checked_entries(const Dimensions& d) {
  std::size_t rows;
  std::size_t total;
  if (__builtin_mul_overflow(d.blocks, d.width, &rows) ||
      __builtin_mul_overflow(rows, d.dim, &total) || total > (std::size_t{1} << 40)) {
    throw FormatError("basis header dimensions are too large");
  }
  return total;
}

}  // namespace

nlohmann::ordered_json make_basis_header(const SubspaceBasis& basis, double scaling,
                                         std::uint64_t bits_consumed,
                                         nlohmann::ordered_json certificate) {
  nlohmann::ordered_json header;
  header["version"] = 1;
  header["n"] = basis.shape().num_blocks();
  header["B"] = basis.shape().block_width();
  header["m"] = basis.dim();
  header["scaling_M"] = scaling;
  header["bits_consumed"] = bits_consumed;
  header["certificate"] = std::move(certificate);
  return header;
}

std::string encode_basis(const BasisFile& file) {
  check_header_matches(file);
  std::string out = file.header.dump();
  out.push_back('\n');
  const auto values = file.basis.columns().data();
  out.reserve(out.size() + values.size() * 8);
  for (double v : values) {
    const auto bits = std::bit_cast<std::uint64_t>(v);
    for (int byte = 0; byte < 8; ++byte) {
      out.push_back(static_cast<char>((bits >> (8 * byte)) & 0xFFu));
    }
  }
  return out;
}

BasisFile decode_basis(std::string_view bytes) {
  const auto newline = bytes.find('\n');
  if (newline == std::string_view::npos) throw FormatError("basis file has no header line");
  auto header = parse_header(bytes.substr(0, newline));
  const Dimensions d = header_dimensions(header);
  const std::size_t entries = checked_entries(d);
  const std::string_view payload = bytes.substr(newline + 1);
  if (payload.size() != entries * 8) {
    throw FormatError("basis payload holds " + std::to_string(payload.size()) +
                      " bytes, header requires " + std::to_string(entries * 8));
  }
  Matrix columns(d.blocks * d.width, d.dim);
  auto values = columns.data();
  for (std::size_t i = 0; i < entries; ++i) {
    std::uint64_t bits = 0;
    for (int byte = 7; byte >= 0; --byte) {
      bits = (bits << 8) | static_cast<unsigned char>(payload[i * 8 + static_cast<std::size_t>(byte)]);
    }
    values[i] = std::bit_cast<double>(bits);
  }
  return BasisFile{std::move(header), make_basis(d, std::move(columns))};
}

std::string encode_basis_csv(const BasisFile& file) {
  check_header_matches(file);
  std::string out = "# " + file.header.dump() + "\n";
  const Matrix& q = file.basis.columns();
  std::array<char, 64> buffer{};
  for (std::size_t i = 0; i < q.rows(); ++i) {
    for (std::size_t j = 0; j < q.cols(); ++j) {
      if (j > 0) out.push_back(',');
      const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), q(i, j),
                                        std::chars_format::general, 17);
      out.append(buffer.data(), result.ptr);
    }
    out.push_back('\n');
  }
  return out;
}

BasisFile decode_basis_csv(std::string_view text) {
  if (!text.starts_with("# ")) throw FormatError("CSV basis file must start with '# '");
  const auto newline = text.find('\n');
  if (newline == std::string_view::npos) throw FormatError("CSV basis file has no header line");
  auto header = parse_header(text.substr(2, newline - 2));
  const Dimensions d = header_dimensions(header);
  checked_entries(d);
  Matrix columns(d.blocks * d.width, d.dim);
  std::string_view rest = text.substr(newline + 1);
  for (std::size_t i = 0; i < columns.rows(); ++i) {
    const auto eol = rest.find('\n');
    const std::string_view row = rest.substr(0, eol);
    std::size_t pos = 0;
    for (std::size_t j = 0; j < columns.cols(); ++j) {
      const auto comma = row.find(',', pos);
      const bool last = j + 1 == columns.cols();
      if (last != (comma == std::string_view::npos)) {
        throw FormatError("CSV row " + std::to_string(i) + " does not have m fields");
      }
      const std::string_view field = row.substr(pos, last ? std::string_view::npos : comma - pos);
      double value = 0.0;
      const auto result = std::from_chars(field.data(), field.data() + field.size(), value);
      if (result.ec != std::errc{} || result.ptr != field.data() + field.size()) {
        throw FormatError("CSV row " + std::to_string(i) + " has a malformed number");
      }
      columns(i, j) = value;
      pos = comma + 1;
    }
    if (eol == std::string_view::npos) {
      if (i + 1 != columns.rows()) throw FormatError("CSV basis file has too few rows");
      rest = {};
    } else {
      rest = rest.substr(eol + 1);
    }
  }
  if (!rest.empty()) throw FormatError("CSV basis file has trailing content");
  return BasisFile{std::move(header), make_basis(d, std::move(columns))};
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return std::move(buffer).str();
}

BasisFile load_basis_file(const std::filesystem::path& path) {
  const std::string bytes = read_file(path);
  if (!bytes.empty() && bytes.front() == '#') return decode_basis_csv(bytes);
  return decode_basis(bytes);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view bytes) {
  std::filesystem::path temp = path;
  temp += ".tmp";
  {
    std::ofstream out(temp, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot open " + temp.string() + " for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
      out.close();
      std::filesystem::remove(temp);
      throw FormatError("failed writing " + temp.string());
    }
  }
  std::filesystem::rename(temp, path);
}

}  // namespace l1embed
