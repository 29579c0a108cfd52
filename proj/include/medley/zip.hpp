#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace medley::zip {

bool looks_like_zip(std::string_view bytes);

// Entry names in central-directory order.
std::vector<std::string> entry_names(std::string_view archive);

// Extracts one entry (stored or deflated). Throws MedleyError on a missing
// entry or a corrupt archive.
std::string read_entry(std::string_view archive, std::string_view name);

// Test support and fixture generation: builds an archive with all entries
// stored uncompressed.
std::string write_archive(const std::vector<std::pair<std::string, std::string>>& entries);

}  // namespace medley::zip
