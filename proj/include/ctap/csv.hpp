#ifndef CTAP_CSV_HPP
#define CTAP_CSV_HPP

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace ctap {

// Round-trippable fixed representation ("%.17g"), identical across runs.
std::string format_double(double v);

// Writes "# key=value" provenance lines ahead of a CSV header.
void write_comment_block(std::ostream& os, const std::vector<std::pair<std::string, std::string>>& entries);

// Opens `path` for writing, throwing std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& contents);

}  // namespace ctap

#endif  // CTAP_CSV_HPP
