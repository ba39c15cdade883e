#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace tilebn {

// Formats a double with 17 significant digits, enough to reconstruct the
// exact bit pattern on parse. All serialized probabilities and scores go
// through this so that output files are byte-stable.
std::string format_double(double value);

// Minimal deterministic JSON emitter: fixed key order (insertion order),
// two-space indentation, format_double for every floating-point value.
// Output is byte-identical across runs for identical inputs.
class JsonWriter {
 public:
  JsonWriter& begin_object();
  JsonWriter& end_object();
  JsonWriter& begin_array();
  JsonWriter& end_array();
  JsonWriter& key(const std::string& name);
  JsonWriter& value(const std::string& text);
  JsonWriter& value(const char* text);
  JsonWriter& value(double number);
  JsonWriter& value(int number);
  JsonWriter& value(int64_t number);
  JsonWriter& value(uint64_t number);
  JsonWriter& value(bool flag);

  std::string str() const { return out_; }

 private:
  void prepare_value();
  void open(char bracket);
  void close(char bracket);
  void raw(const std::string& text);
  void newline_indent();

  std::string out_;
  // One flag per open container: whether it already holds an element.
  std::vector<bool> has_element_;
  bool pending_key_ = false;
};

std::string escape_json(const std::string& text);

// Writes `content` to `path` via a temporary file in the same directory and
// an atomic rename, so failed runs never leave partial output behind.
void write_file_atomic(const std::string& path, const std::string& content);

// Reads an entire file; throws IoError when it cannot be opened.
std::string read_file(const std::string& path);

}  // namespace tilebn
