#pragma once

// Basis file format.
//
// Binary: one line of JSON,
//   {"version":1,"n":..,"B":..,"m":..,"scaling_M":..,"bits_consumed":..,"certificate":{..}}
// terminated by '\n', followed by the m columns of the (n*B x m) basis as
// IEEE-754 binary64 little-endian values, column after column, no padding.
//
// CSV: "# " + the same JSON line, then n*B rows of m comma-separated values
// printed with 17 significant digits.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include <json.hpp>

#include "l1embed/blockspace.hpp"

namespace l1embed {

class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BasisFile {
  nlohmann::ordered_json header;
  SubspaceBasis basis;
};

// Header with the dimension fields taken from `basis`; keys in canonical order.
nlohmann::ordered_json make_basis_header(const SubspaceBasis& basis, double scaling,
                                         std::uint64_t bits_consumed,
                                         nlohmann::ordered_json certificate);

std::string encode_basis(const BasisFile& file);
BasisFile decode_basis(std::string_view bytes);

std::string encode_basis_csv(const BasisFile& file);
BasisFile decode_basis_csv(std::string_view text);

// Picks the decoder from the first byte ('#' means CSV).
BasisFile load_basis_file(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

// Writes to a sibling temporary file, then renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

}  // namespace l1embed
