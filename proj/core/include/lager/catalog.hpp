#pragma once

#include <span>
#include <string_view>

namespace lager::catalog {

struct Entry {
  std::string_view abbreviation;
  std::string_view full_name;
};

// Standard cephalometric landmarks used for midsagittal plane estimation:
// 11 midline landmarks and 13 bilateral pairs, in catalog order.
std::span<const Entry> unpaired();
std::span<const Entry> paired();

bool is_catalog_unpaired(std::string_view abbreviation);
bool is_catalog_paired(std::string_view abbreviation);

// Landmarks whose positions on the symmetric model score a fitted plane.
inline constexpr std::string_view kNasion = "N";
inline constexpr std::string_view kUpperDentalMidline = "U1";
inline constexpr std::string_view kPogonion = "Pg";

}  // namespace lager::catalog
