#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ckml/context.hpp"

namespace ckml {

// Plain-text (Burmeister style) context format:
//
//   B
//   <object count>
//   <attribute count>
//   <object names, one per line>
//   <attribute names, one per line>
//   <one row per object of 'X' / '.' characters>
//
// The writer emits exactly this layout with '\n' line endings. The reader
// also accepts the classic variant with a context-name line after "B" and
// blank separator lines, lowercase 'x' crosses and CRLF line endings.

FormalContext read_context(std::istream& in);
FormalContext read_context_file(const std::filesystem::path& path);
FormalContext parse_context(const std::string& text);

void write_context(std::ostream& out, const FormalContext& ctx);
std::string format_context(const FormalContext& ctx);
void write_context_file(const std::filesystem::path& path, const FormalContext& ctx);

// Label sidecar: one `name = label` entry per line; '#' starts a comment.
FormalContext apply_labels(const FormalContext& ctx, std::istream& in);
FormalContext apply_labels_file(const FormalContext& ctx, const std::filesystem::path& path);

}  // namespace ckml
