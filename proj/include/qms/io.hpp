#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace qms {

// Shortest round-trip-ish decimal used for all data files; chosen once so
// every writer produces byte-identical text for identical doubles.
std::string format_g12(double x);

uint64_t fnv1a64(std::string_view bytes);
std::string hex64(uint64_t v);

// Counter-based seed derivation: realization k gets the same seed no
// matter how many realizations end up running or on which worker.
uint64_t split_seed(uint64_t master, uint64_t counter);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace qms
