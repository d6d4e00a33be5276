#include "ckml/context_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "text_util.hpp"

namespace ckml {

namespace {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next line with a trailing '\r' removed; throws at end of input.
  std::string next(const char* expecting) {
    std::string line;
    if (!std::getline(in_, line)) {
      throw ContextError("context file ended early (line " + std::to_string(number_ + 1) +
                         "), expecting " + expecting);
    }
    ++number_;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    return line;
  }

  std::string next_nonblank(const char* expecting) {
    for (;;) {
      std::string line = next(expecting);
      if (!trim(line).empty()) return line;
    }
  }

  std::size_t number() const { return number_; }

 private:
  std::istream& in_;
  std::size_t number_ = 0;
};

std::optional<std::size_t> parse_count(const std::string& s) {
  std::string t = trim(s);
  std::size_t value = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) return std::nullopt;
  return value;
}

}  // namespace

FormalContext read_context(std::istream& in) {
  LineReader lines(in);
  if (trim(lines.next("'B' header")) != "B") throw ContextError("context file must start with 'B'");

  std::string name;
  std::string line = lines.next_nonblank("object count");
  auto objects = parse_count(line);
  if (!objects) {
    name = trim(line);
    objects = parse_count(lines.next_nonblank("object count"));
    if (!objects) throw ContextError("invalid object count at line " + std::to_string(lines.number()));
  }
  auto attributes = parse_count(lines.next_nonblank("attribute count"));
  if (!attributes) throw ContextError("invalid attribute count at line " + std::to_string(lines.number()));

  std::vector<std::string> object_names, attribute_names, rows;
  for (std::size_t i = 0; i < *objects; ++i) object_names.push_back(trim(lines.next_nonblank("object name")));
  for (std::size_t i = 0; i < *attributes; ++i) {
    attribute_names.push_back(trim(lines.next_nonblank("attribute name")));
  }
  for (std::size_t i = 0; i < *objects; ++i) {
    // A row of a 0-attribute context is empty, so blank lines are rows here.
    std::string row = *attributes == 0 ? trim(lines.next("cross table row"))
                                       : trim(lines.next_nonblank("cross table row"));
    rows.push_back(std::move(row));
  }
  return FormalContext::from_cross_table(std::move(object_names), std::move(attribute_names), rows,
                                         std::move(name));
}

FormalContext read_context_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContextError("cannot open context file '" + path.string() + "'");
  return read_context(in);
}

FormalContext parse_context(const std::string& text) {
  std::istringstream in(text);
  return read_context(in);
}

void write_context(std::ostream& out, const FormalContext& ctx) {
  out << "B\n" << ctx.object_count() << '\n' << ctx.attribute_count() << '\n';
  for (const auto& o : ctx.objects()) out << o << '\n';
  for (const auto& a : ctx.attributes()) out << a << '\n';
  for (std::size_t g = 0; g < ctx.object_count(); ++g) {
    for (std::size_t m = 0; m < ctx.attribute_count(); ++m) out << (ctx.incident(g, m) ? 'X' : '.');
    out << '\n';
  }
}

std::string format_context(const FormalContext& ctx) {
  std::ostringstream out;
  write_context(out, ctx);
  return out.str();
}

void write_context_file(const std::filesystem::path& path, const FormalContext& ctx) {
  std::ofstream out(path);
  if (!out) throw ContextError("cannot write context file '" + path.string() + "'");
  write_context(out, ctx);
}

FormalContext apply_labels(const FormalContext& ctx, std::istream& in) {
  FormalContext out = ctx;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ContextError("label line " + std::to_string(number) + " lacks '='");
    }
    out = out.with_label(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return out;
}

FormalContext apply_labels_file(const FormalContext& ctx, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ContextError("cannot open label file '" + path.string() + "'");
  return apply_labels(ctx, in);
}

}  // namespace ckml
