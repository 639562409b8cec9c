#include "lager/catalog.hpp"

#include <algorithm>
#include <array>

namespace lager::catalog {
namespace {

constexpr std::array<Entry, 11> kUnpaired{{
    {"S", "Sella"},
    {"N", "Nasion"},
    {"Ba", "Basion"},
    {"FMp", "Posterior foramen magnum"},
    {"ANS", "Anterior nasal spine"},
    {"PNS", "Posterior nasal spine"},
    {"U1", "Upper central dental midline"},
    {"L1", "Lower central dental midline"},
    {"Pg", "Pogonion"},
    {"Gn", "Gnathion"},
    {"Me", "Menton"},
}};

constexpr std::array<Entry, 13> kPaired{{
    {"Or", "Orbitale"},
    {"Fz", "Frontozygomatic point"},
    {"J", "Jugale"},
    {"SOF", "Superior orbital fissure"},
    {"Po", "Porion"},
    {"ZMS", "Zygomaticomaxillary suture"},
    {"U6", "Upper first molar, mesiobuccal cusp"},
    {"L6", "Lower first molar, mesiobuccal cusp"},
    {"Co", "Condylion"},
    {"SIG", "Sigmoid notch"},
    {"Cr", "Coronion"},
    {"Gos", "Superoposterior gonial angle"},
    {"Goi", "Inferior gonial angle"},
}};

bool contains(std::span<const Entry> entries, std::string_view abbreviation) {
  return std::any_of(entries.begin(), entries.end(),
                     [&](const Entry& e) { return e.abbreviation == abbreviation; });
}

}  // namespace

std::span<const Entry> unpaired() { return kUnpaired; }
std::span<const Entry> paired() { return kPaired; }

bool is_catalog_unpaired(std::string_view abbreviation) { return contains(kUnpaired, abbreviation); }
bool is_catalog_paired(std::string_view abbreviation) { return contains(kPaired, abbreviation); }

}  // namespace lager::catalog
