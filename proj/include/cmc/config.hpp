#pragma once

// Flat `key = value` text: one entry per line, '#' starts a comment, blank
// lines ignored. Later duplicates override earlier ones.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cmc {

class KeyValues {
 public:
  static KeyValues parse(std::string_view text, std::string_view source = "<config>");
  static KeyValues read(const std::filesystem::path& path);

  void set(std::string key, std::string value);
  bool contains(std::string_view key) const;
  std::optional<std::string> get(std::string_view key) const;
  std::string require(std::string_view key) const;

  std::string get_or(std::string_view key, std::string fallback) const;
  double get_double(std::string_view key, double fallback) const;
  long get_int(std::string_view key, long fallback) const;
  std::uint64_t get_u64(std::string_view key, std::uint64_t fallback) const;
  bool get_bool(std::string_view key, bool fallback) const;

  // Keys starting with `prefix`, with the prefix stripped, in file order.
  std::vector<std::pair<std::string, std::string>> with_prefix(std::string_view prefix) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string to_string() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::string source_;
};

std::string trim(std::string_view s);

}  // namespace cmc
