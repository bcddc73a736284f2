#include "cmc/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "cmc/csv.hpp"
#include "cmc/error.hpp"

namespace cmc {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

KeyValues KeyValues::parse(std::string_view text, std::string_view source) {
  KeyValues kv;
  kv.source_ = source;
  std::size_t line_no = 0, start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos)
      throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": expected 'key = value'");
    auto key = trim(std::string_view(body).substr(0, eq));
    if (key.empty()) throw DataError(std::string(source) + ":" + std::to_string(line_no) + ": empty key");
    kv.set(std::move(key), trim(std::string_view(body).substr(eq + 1)));
  }
  return kv;
}

KeyValues KeyValues::read(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open config " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void KeyValues::set(std::string key, std::string value) {
  for (auto& [k, v] : entries_)
    if (k == key) {
      v = std::move(value);
      return;
    }
  entries_.emplace_back(std::move(key), std::move(value));
}

bool KeyValues::contains(std::string_view key) const { return get(key).has_value(); }

std::optional<std::string> KeyValues::get(std::string_view key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return v;
  return std::nullopt;
}

std::string KeyValues::require(std::string_view key) const {
  auto v = get(key);
  if (!v) throw DataError(source_ + ": missing required key '" + std::string(key) + "'");
  return *v;
}

std::string KeyValues::get_or(std::string_view key, std::string fallback) const {
  auto v = get(key);
  return v ? *v : std::move(fallback);
}

double KeyValues::get_double(std::string_view key, double fallback) const {
  auto v = get(key);
  return v ? csv::parse_double(*v, source_ + " key '" + std::string(key) + "'") : fallback;
}

long KeyValues::get_int(std::string_view key, long fallback) const {
  auto v = get(key);
  return v ? csv::parse_int(*v, source_ + " key '" + std::string(key) + "'") : fallback;
}

std::uint64_t KeyValues::get_u64(std::string_view key, std::uint64_t fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v->data(), v->data() + v->size(), out);
  if (ec != std::errc() || ptr != v->data() + v->size() || v->empty())
    throw DataError(source_ + " key '" + std::string(key) + "': not an unsigned integer: '" + *v + "'");
  return out;
}

bool KeyValues::get_bool(std::string_view key, bool fallback) const {
  auto v = get(key);
  if (!v) return fallback;
  if (*v == "true" || *v == "1" || *v == "yes") return true;
  if (*v == "false" || *v == "0" || *v == "no") return false;
  throw DataError(source_ + " key '" + std::string(key) + "': not a boolean: '" + *v + "'");
}

std::vector<std::pair<std::string, std::string>> KeyValues::with_prefix(std::string_view prefix) const {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& [k, v] : entries_)
    if (k.starts_with(prefix)) out.emplace_back(k.substr(prefix.size()), v);
  return out;
}

std::string KeyValues::to_string() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + " = " + v + "\n";
  return out;
}

}  // namespace cmc
